"""Eigenvalue dependence on the centre-of-mass parameter xi inside the Wick-rotation window."""
import argparse

import numpy as np

from wick_cutkosky.basis import BasisSpec
from wick_cutkosky.cli import wick_window_ok
from wick_cutkosky.model import ModelParams
from wick_cutkosky.verify import solve_fields


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epsilon2", type=float, default=0.1)
    parser.add_argument("--xis", default="0.5,0.6,0.7,0.8")
    parser.add_argument("--n-p", type=int, default=20)
    parser.add_argument("--n-theta", type=int, default=10)
    args = parser.parse_args()
    spec = BasisSpec(n_p=args.n_p, n_theta=args.n_theta)
    base = None
    for xi in map(float, args.xis.split(",")):
        params = ModelParams.from_epsilon2(0.6, args.epsilon2, xi=xi)
        if not wick_window_ok(params):
            print(f"xi={xi}: outside the Wick-rotation window, skipped")
            continue
        fields, _ = solve_fields(params, spec)
        lam = np.array([f.eigenvalue for f in fields])
        base = lam if base is None else base
        n = min(len(lam), len(base))
        print(f"xi={xi}: {np.round(lam, 5)}  max rel. change {np.max(np.abs(lam[:n] / base[:n] - 1)):.2e}")


if __name__ == "__main__":
    main()
