"""Near-threshold study: lowest six eigenvalues at eps^2 = 0.99 across basis sizes and knot scales."""
import argparse

from wick_cutkosky.basis import BasisSpec
from wick_cutkosky.model import ModelParams
from wick_cutkosky.reference import DELTA, TABLE2
from wick_cutkosky.verify import residual_grid, solve_fields


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="30:30,40:30,40:40")
    parser.add_argument("--c-primes", default="1.0")
    args = parser.parse_args()
    exact = TABLE2[0.99][2]
    params = ModelParams.from_epsilon2(DELTA, 0.99)
    for c_prime in map(float, args.c_primes.split(",")):
        for item in args.sizes.split(","):
            n_p, n_theta = map(int, item.split(":"))
            fields, _ = solve_fields(params, BasisSpec(n_p=n_p, n_theta=n_theta, c_prime=c_prime))
            cells = " ".join(
                f"{f.eigenvalue:.4f}({(f.eigenvalue - ref) / ref:+.1%},r={residual_grid(f).r_lhs_rhs:.3f})"
                for f, ref in zip(fields, exact)
            )
            print(f"C'={c_prime} {n_p}x{n_theta}: {cells}")


if __name__ == "__main__":
    main()
