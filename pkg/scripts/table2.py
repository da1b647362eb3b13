"""Finite-energy eigenvalues for the four reference energies, with |Im| and r per eigenvalue."""
import argparse
import time

from wick_cutkosky.basis import BasisSpec
from wick_cutkosky.model import ModelParams
from wick_cutkosky.reference import DELTA, TABLE2
from wick_cutkosky.spectrum import imag_parts
from wick_cutkosky.verify import residual_grid, solve_fields


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--energies", default=",".join(map(str, TABLE2)), help="comma-separated epsilon^2 subset")
    parser.add_argument("--xi", type=float, default=None)
    parser.add_argument("--c-prime", type=float, default=1.0)
    args = parser.parse_args()
    for eps2 in (float(e) for e in args.energies.split(",")):
        n_p, n_theta, exact, tol = TABLE2[eps2]
        t0 = time.perf_counter()
        spec = BasisSpec(n_p=n_p, n_theta=n_theta, c_prime=args.c_prime)
        fields, spectrum = solve_fields(ModelParams.from_epsilon2(DELTA, eps2, xi=args.xi), spec, n_eigen=len(exact))
        imag = imag_parts(spectrum)
        print(f"eps2={eps2} N_p={n_p} N_theta={n_theta} tolerance {tol:.1%} ({time.perf_counter() - t0:.1f} s)")
        for i, (f, ref) in enumerate(zip(fields, exact)):
            err = (f.eigenvalue - ref) / ref
            r = residual_grid(f).r_lhs_rhs
            print(f"  {i + 1} {f.eigenvalue:>10.5f} {ref:>8} {err:>+9.2%} |Im|={imag[i]:.1e} r={r:.4f}")


if __name__ == "__main__":
    main()
