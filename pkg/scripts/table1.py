"""Zero-energy eigenvalues per angular momentum at N_p = 20, with verification."""
import argparse

from wick_cutkosky.basis import BasisSpec
from wick_cutkosky.model import ModelParams
from wick_cutkosky.reference import DELTA, TABLE1
from wick_cutkosky.verify import residual_grid, solve_fields


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-p", type=int, default=20)
    parser.add_argument("--script-n", type=int, default=1, choices=(1, 3))
    args = parser.parse_args()
    print(f"{'ell':>3} {'#':>2} {'lambda/m^2':>12} {'exact':>8} {'rel.err':>9} {'1 - r':>9}")
    for ell, exact in TABLE1.items():
        spec = BasisSpec(n_p=args.n_p, n_theta=1, ell=ell, script_n=args.script_n)
        fields, _ = solve_fields(ModelParams(DELTA, 0.0, ell=ell), spec, n_eigen=len(exact))
        for i, (f, ref) in enumerate(zip(fields, exact), 1):
            r = residual_grid(f).r_lhs_rhs
            print(f"{ell:>3} {i:>2} {f.eigenvalue:>12.6f} {ref:>8} {(f.eigenvalue - ref) / ref:>9.2e} {1 - r:>9.2e}")


if __name__ == "__main__":
    main()
