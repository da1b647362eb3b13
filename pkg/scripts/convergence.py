"""Basis-size ladder at one energy: eigenvalues, 1 - r and drift between rungs."""
import argparse

from wick_cutkosky.basis import BasisSpec
from wick_cutkosky.model import ModelParams
from wick_cutkosky.verify import convergence_study, drift


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--delta", type=float, default=0.6)
    parser.add_argument("--epsilon2", type=float, default=0.0)
    parser.add_argument("--ladder", default="5:1,10:1,20:1", help="n_p:n_theta pairs")
    parser.add_argument("--n-eigen", type=int, default=3)
    args = parser.parse_args()
    params = ModelParams.from_epsilon2(args.delta, args.epsilon2)
    ladder = [BasisSpec(n_p=int(a), n_theta=int(b)) for a, b in (s.split(":") for s in args.ladder.split(","))]
    rows = convergence_study(params, ladder, n_eigen=args.n_eigen)
    for row in rows:
        if row.error:
            print(f"N_p={row.n_p} N_theta={row.n_theta}: {row.error}")
            continue
        cells = "  ".join(f"{lam:.6f} ({1 - r:.1e})" for lam, r in zip(row.eigenvalues, row.r))
        print(f"N_p={row.n_p:>3} N_theta={row.n_theta:>3}  {cells}")
    print("ground-state drift:", ["%.2e" % d for d in drift(rows)])


if __name__ == "__main__":
    main()
