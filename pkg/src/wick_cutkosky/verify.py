"""Solution reconstruction and checks against the integral equation itself.

A solved coefficient vector defines psi(p, z) = sum g_{n,k} G_n(p) P2_{k,l}(z).
Both sides of the separated equation are sampled at the centres of the
rectangles cut by the momentum knots (physical region p >= 0) and the angular
knots, and summarised by a reliability coefficient that equals 1 only for
pointwise agreement.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .assembly import QuadratureRule, assemble, inner_integrals
from .basis import BasisSpec, KnotVector, angular_matrix, make_knots, radial_matrix
from .model import ModelParams, d_imag, d_real, polar_to_components
from .spectrum import filter_real, solve_generalized


@dataclass
class SolutionField:
    coeffs: np.ndarray
    params: ModelParams
    spec: BasisSpec
    knots: KnotVector
    eigenvalue: float

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.spec.size,):
            raise ValueError(f"expected {self.spec.size} coefficients, got shape {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    @property
    def grid(self) -> np.ndarray:
        """Coefficients as (n_theta, n_p): row I_theta - 1, column I_p - 1."""
        return self.coeffs.reshape(self.spec.n_theta, self.spec.n_p)

    def __call__(self, p, z):
        return evaluate_psi(self, p, z)


def evaluate_psi(field: SolutionField, p, z):
    p, z = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(z, dtype=float))
    g = radial_matrix(p.ravel(), field.spec, field.knots)
    ang = angular_matrix(z.ravel(), field.spec)
    vals = np.einsum("xn,kn,xk->x", g, field.grid, ang)
    return vals.reshape(p.shape) if p.ndim else float(vals[0])


@dataclass(frozen=True)
class ParityComponent:
    """Even (chi_R, sign=+1) or odd (chi_I, sign=-1) part of psi in z."""

    field: SolutionField
    sign: int

    def __call__(self, p, z):
        z = np.asarray(z, dtype=float)
        return 0.5 * (evaluate_psi(self.field, p, z) + self.sign * evaluate_psi(self.field, p, -z))


def decompose_parity(field: SolutionField):
    return ParityComponent(field, +1), ParityComponent(field, -1)


def reliability_coefficient(lhs, rhs) -> float:
    """Concordance 2 cov(L, R) / (var L + var R + (mean L - mean R)^2)."""
    lhs = np.asarray(lhs, dtype=float).ravel()
    rhs = np.asarray(rhs, dtype=float).ravel()
    if lhs.shape != rhs.shape:
        raise ValueError("sample vectors must have equal length")
    var_l, var_r = lhs.var(), rhs.var()
    denom = var_l + var_r + (lhs.mean() - rhs.mean()) ** 2
    if var_l == 0 and var_r == 0:
        raise ValueError("reliability undefined: both sample vectors are constant")
    cov = np.mean((lhs - lhs.mean()) * (rhs - rhs.mean()))
    return float(2.0 * cov / denom)


def pearson_coefficient(lhs, rhs) -> float:
    lhs = np.asarray(lhs, dtype=float).ravel()
    rhs = np.asarray(rhs, dtype=float).ravel()
    if lhs.std() == 0 or rhs.std() == 0:
        raise ValueError("correlation undefined for constant samples")
    return float(np.corrcoef(lhs, rhs)[0, 1])


@dataclass
class VerificationReport:
    p: np.ndarray
    z: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    r_lhs_rhs: float
    max_rel_resid: float
    eigenvalue: float = float("nan")

    @property
    def size(self) -> int:
        return len(self.p)

    def records(self):
        for row in zip(self.p, self.z, self.lhs, self.rhs):
            yield dict(zip(("p", "z", "lhs", "rhs"), map(float, row)))

    def to_dict(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "r_lhs_rhs": self.r_lhs_rhs,
            "max_rel_resid": self.max_rel_resid,
            "points": list(self.records()),
        }

    def write_text(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write(f"# eigenvalue={self.eigenvalue!r} r_lhs_rhs={self.r_lhs_rhs!r} max_rel_resid={self.max_rel_resid!r}\n")
            writer = csv.writer(fh, delimiter="\t")
            writer.writerow(["p", "z", "lhs", "rhs"])
            for rec in self.records():
                writer.writerow([repr(v) for v in rec.values()])
        return path

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=1))
        return path

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        pts = data["points"]
        col = lambda key: np.array([pt[key] for pt in pts])  # noqa: E731
        return cls(col("p"), col("z"), col("lhs"), col("rhs"), data["r_lhs_rhs"], data["max_rel_resid"], data["eigenvalue"])


def rectangle_centres(knots: KnotVector):
    """Centres of the physical momentum intervals and of every angular interval."""
    tp = knots.positive_knots
    tz = knots.t_z
    return 0.5 * (tp[:-1] + tp[1:]), 0.5 * (tz[:-1] + tz[1:])


def equation_sides(field: SolutionField, p, z, quad: Optional[QuadratureRule] = None):
    """lhs = sum g G_n [D_R P_k(z) + D_I P_k(-z)], rhs = (lam / pi^2) sum g int q^3 G_n Lambda_k P_k(z)."""
    quad = quad or QuadratureRule()
    p = np.atleast_1d(np.asarray(p, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    spec, coeffs = field.spec, field.grid
    g = radial_matrix(p, spec, field.knots)
    ang = angular_matrix(z, spec)
    ang_neg = angular_matrix(-z, spec)
    p0, ps2 = polar_to_components(p[:, None], z[None, :])
    dr = d_real(p0, ps2, field.params)
    di = d_imag(p0, ps2, field.params)
    radial = g @ coeffs.T  # (p, k)
    lhs = dr * (radial @ ang.T) + di * (radial @ ang_neg.T)
    inner = inner_integrals(p, spec, field.knots, quad)  # (p, k, n)
    rhs_radial = np.einsum("akn,kn->ak", inner, coeffs)
    rhs = field.eigenvalue / np.pi**2 * (rhs_radial @ ang.T)
    return lhs, rhs


def residual_grid(field: SolutionField, quad: Optional[QuadratureRule] = None, coefficient: Callable = reliability_coefficient) -> VerificationReport:
    pc, zc = rectangle_centres(field.knots)
    lhs, rhs = equation_sides(field, pc, zc, quad)
    pp, zz = np.meshgrid(pc, zc, indexing="ij")
    scale = np.abs(lhs).max()
    max_rel = float(np.abs(lhs - rhs).max() / scale) if scale > 0 else float("inf")
    return VerificationReport(
        pp.ravel(), zz.ravel(), lhs.ravel(), rhs.ravel(), coefficient(lhs, rhs), max_rel, float(field.eigenvalue)
    )


def log_slope(field: SolutionField, p_lo: float, p_hi: float, z: float = 0.3, n: int = 24) -> float:
    """Least-squares slope of log|psi| against log p on [p_lo, p_hi]."""
    p = np.geomspace(p_lo, p_hi, n)
    vals = np.abs(evaluate_psi(field, p, np.full_like(p, z)))
    return float(np.polyfit(np.log(p), np.log(vals), 1)[0])


@dataclass
class Rung:
    n_p: int
    n_theta: int
    eigenvalues: list = field(default_factory=list)
    r: list = field(default_factory=list)
    max_resid: list = field(default_factory=list)
    error: Optional[str] = None


def solve_fields(params: ModelParams, spec: BasisSpec, quad: Optional[QuadratureRule] = None, n_eigen: int = 6, tol_real: float = 1e-6, workers: int = 1):
    """Assemble, solve and wrap the lowest ``n_eigen`` real solutions as fields."""
    knots = make_knots(spec)
    pair = assemble(params, spec, knots, quad, workers=workers)
    spectrum = solve_generalized(pair, tol_real=tol_real)
    values, vectors = filter_real(spectrum)
    fields = [SolutionField(vectors[:, i], params, spec, knots, values[i]) for i in range(min(n_eigen, len(values)))]
    return fields, spectrum


def convergence_study(params: ModelParams, ladder: Sequence[BasisSpec], n_eigen: int = 6, quad: Optional[QuadratureRule] = None) -> list:
    """Solve and verify each rung of increasing basis sizes; failures are recorded, not raised."""
    rows = []
    for spec in ladder:
        rung = Rung(spec.n_p, spec.n_theta)
        try:
            fields, _ = solve_fields(params, spec, quad, n_eigen)
            rung.eigenvalues = [f.eigenvalue for f in fields]
            reports = [residual_grid(f, quad) for f in fields]
            rung.r = [rep.r_lhs_rhs for rep in reports]
            rung.max_resid = [rep.max_rel_resid for rep in reports]
        except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            rung.error = f"{type(exc).__name__}: {exc}"
        rows.append(rung)
    return rows


def drift(rows: Sequence[Rung], index: int = 0) -> list:
    """Relative change of eigenvalue ``index`` between consecutive successful rungs."""
    vals = [r.eigenvalues[index] for r in rows if r.error is None and len(r.eigenvalues) > index]
    return [abs(b - a) / abs(b) for a, b in zip(vals, vals[1:])]
