"""Assembly of the matrix pencil (A, B).

A couples the radial/angular basis through D_R and D_I; its z-integral is done
by Gauss-Chebyshev (second kind) quadrature, which absorbs sqrt(1 - z^2) and
is exact here because D_R, D_I are polynomials in z at fixed |p|.

B is block-diagonal in the angular index; its z-integral is analytic and the
remaining double integral over (p, q) carries the kernel R(p, q)^m, which has
a derivative kink at q = p.  Inner q-integrals are therefore split at p and
graded geometrically around it so that large powers m stay resolved.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from math import factorial
from pathlib import Path
from typing import Optional

import numpy as np

from .basis import BasisSpec, KnotVector, angular_matrix, make_knots, radial_matrix
from .model import ModelParams, d_imag, d_real, polar_to_components


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature orders.

    ``n_gl`` Gauss-Legendre nodes per radial interval; ``n_gc`` Gauss-Chebyshev
    nodes in z (``None`` picks 2 (K_max + 4)); ``grading`` is the number of
    geometric sub-intervals placed on each side of q = p for inner integrals.
    """

    n_gl: int = 12
    n_gc: Optional[int] = None
    grading: int = 18

    def __post_init__(self):
        if self.n_gl < 1:
            raise ValueError(f"n_gl must be >= 1, got {self.n_gl}")
        if self.n_gc is not None and self.n_gc < 1:
            raise ValueError(f"n_gc must be >= 1, got {self.n_gc}")
        if self.grading < 0:
            raise ValueError(f"grading must be >= 0, got {self.grading}")

    def angular_order(self, spec: BasisSpec) -> int:
        n = self.n_gc if self.n_gc is not None else 2 * (spec.k_max + 4)
        if n < spec.k_max + 3:
            raise ValueError(f"n_gc={n} too small for K_max={spec.k_max}; need >= {spec.k_max + 3}")
        return n

    def legendre(self):
        return np.polynomial.legendre.leggauss(self.n_gl)


def gauss_chebyshev2(n: int):
    """Nodes and weights for int_{-1}^{1} sqrt(1 - z^2) f(z) dz."""
    j = np.arange(1, n + 1)
    theta = j * np.pi / (n + 1)
    return np.cos(theta), np.pi / (n + 1) * np.sin(theta) ** 2


def composite_legendre(breaks, x, w):
    """Map reference GL rule (x, w) onto every interval of ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def radial_rule(knots: KnotVector, quad: QuadratureRule):
    """Composite GL over [0, last knot], one panel per knot interval."""
    x, w = quad.legendre()
    return composite_legendre(knots.positive_knots, x, w)


def graded_rule(p: float, knots: KnotVector, quad: QuadratureRule, m_max: int):
    """Composite GL for q-integrals whose integrand has a kink at q = p.

    Breakpoints are the knots, p itself, and p * rho^(+-j) for j up to
    ``quad.grading`` with rho = exp(2 / m_max); beyond that R^m_max < e^-36.
    """
    breaks = knots.positive_knots
    if quad.grading and m_max > 0:
        rho = 2.0 / m_max
        j = np.arange(1, quad.grading + 1)
        graded = np.concatenate([p * np.exp(rho * j), p * np.exp(-rho * j)])
        breaks = np.concatenate([breaks, graded[(graded > 0) & (graded < knots.p_max)]])
    breaks = np.unique(np.concatenate([breaks, [p]]))
    keep = np.concatenate([[True], np.diff(breaks) > 1e-14 * max(1.0, knots.p_max)])
    x, w = quad.legendre()
    return composite_legendre(breaks[keep], x, w)


def kernel_moments(p: float, powers, spec: BasisSpec, knots: KnotVector, quad: QuadratureRule) -> np.ndarray:
    """int_0^inf dq q^2 R(p, q)^m G_n(q) for each m in ``powers`` and each spline n.

    Shape (len(powers), n_p).
    """
    if p <= 0:
        raise ValueError(f"kernel moments need p > 0, got {p}")
    powers = np.atleast_1d(np.asarray(powers))
    q, wq = graded_rule(p, knots, quad, int(powers.max()))
    g = radial_matrix(q, spec, knots)
    r = np.minimum(p, q) / np.maximum(p, q)
    kern = r[None, :] ** powers[:, None] * (wq * q**2)[None, :]
    return kern @ g


def radial_inner_integral(i_p: int, k: int, p: float, spec: BasisSpec, knots: KnotVector, quad: QuadratureRule) -> float:
    """int dq q^3 G_{i_p}(q) Lambda_k(p, q), split at q = p."""
    if not 1 <= i_p <= spec.n_p:
        raise IndexError(f"spline index {i_p} outside 1..{spec.n_p}")
    mom = kernel_moments(p, [k + 1], spec, knots, quad)[0, i_p - 1]
    return 2.0 * np.pi**2 / (p * (k + 1)) * mom


def inner_integrals(p, spec: BasisSpec, knots: KnotVector, quad: QuadratureRule) -> np.ndarray:
    """All int dq q^3 G_n(q) Lambda_k(p, q) at each p; shape (len(p), n_theta, n_p)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    ks = spec.k_values
    out = np.empty((len(p), len(ks), spec.n_p))
    for a, pa in enumerate(p):
        mom = kernel_moments(pa, ks + 1, spec, knots, quad)
        out[a] = 2.0 * np.pi**2 / (pa * (ks + 1))[:, None] * mom
    return out


def _check_finite(mat: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(mat)):
        raise FloatingPointError(f"non-finite entries in {name}; check knots and quadrature")
    return mat


def angular_couplings(params: ModelParams, spec: BasisSpec, quad: QuadratureRule, p: np.ndarray) -> np.ndarray:
    """M[a, I, J] = int dz sqrt(1-z^2) P_I(z) [D_R P_J(z) + D_I P_J(-z)] at |p| = p[a]."""
    z, wz = gauss_chebyshev2(quad.angular_order(spec))
    pz = angular_matrix(z, spec)
    pz_neg = angular_matrix(-z, spec)
    p0, ps2 = polar_to_components(p[:, None], z[None, :])
    dr = d_real(p0, ps2, params) * wz
    di = d_imag(p0, ps2, params) * wz
    return np.einsum("ci,ac,cj->aij", pz, dr, pz, optimize=True) + np.einsum(
        "ci,ac,cj->aij", pz, di, pz_neg, optimize=True
    )


def _to_flat(blocks: np.ndarray) -> np.ndarray:
    """(I_theta, I_p, J_theta, J_p) -> (i, j) with i = n_p (I_theta - 1) + I_p."""
    nt, n_p = blocks.shape[:2]
    return blocks.reshape(nt * n_p, nt * n_p)


def assemble_a(params: ModelParams, spec: BasisSpec, knots: KnotVector, quad: QuadratureRule) -> np.ndarray:
    p, wp = radial_rule(knots, quad)
    g = radial_matrix(p, spec, knots)
    ang = angular_couplings(params, spec, quad, p)
    radial = (wp * p**spec.script_n)[:, None, None] * g[:, :, None] * g[:, None, :]
    n_p, nt = spec.n_p, spec.n_theta
    # sum over radial nodes as one matmul: (n_p^2, nodes) @ (nodes, nt^2)
    prod = radial.reshape(len(p), n_p * n_p).T @ ang.reshape(len(p), nt * nt)
    blocks = prod.reshape(n_p, n_p, nt, nt).transpose(2, 0, 3, 1)
    return _check_finite(_to_flat(blocks), "A")


def b_block_factor(ell: int, i_theta: int) -> float:
    """Analytic z-integral prefactor pi (2l + I)! / ((l + I)(I - 1)!)."""
    return np.pi * factorial(2 * ell + i_theta) / ((ell + i_theta) * factorial(i_theta - 1))


def assemble_b(
    params: ModelParams, spec: BasisSpec, knots: KnotVector, quad: QuadratureRule, workers: int = 1
) -> np.ndarray:
    # params is unused: B does not depend on the physical configuration
    del params
    p, wp = radial_rule(knots, quad)
    outer = (wp * p ** (spec.script_n - 1))[:, None] * radial_matrix(p, spec, knots)
    powers = spec.k_values + 1

    def moments_at(pa):
        return kernel_moments(pa, powers, spec, knots, quad)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mom = np.stack(list(pool.map(moments_at, p)))
    else:
        mom = np.stack([moments_at(pa) for pa in p])
    n_p, nt = spec.n_p, spec.n_theta
    blocks = np.zeros((nt, n_p, nt, n_p))
    for it in range(nt):
        m = powers[it]
        blocks[it, :, it, :] = b_block_factor(spec.ell, it + 1) / m * (outer.T @ mom[:, it, :])
    return _check_finite(_to_flat(blocks), "B")


@dataclass
class MatrixPair:
    a_mat: np.ndarray
    b_mat: np.ndarray
    spec: BasisSpec
    params: ModelParams
    knots: Optional[KnotVector] = None

    @property
    def size(self) -> int:
        return self.a_mat.shape[0]

    def block(self, mat: str, i_theta: int, j_theta: int) -> np.ndarray:
        m = self.a_mat if mat == "a" else self.b_mat
        n = self.spec.n_p
        return m[n * (i_theta - 1) : n * i_theta, n * (j_theta - 1) : n * j_theta]


def assemble(
    params: ModelParams,
    spec: BasisSpec,
    knots: Optional[KnotVector] = None,
    quad: Optional[QuadratureRule] = None,
    workers: int = 1,
) -> MatrixPair:
    if spec.ell != params.ell:
        raise ValueError(f"basis ell={spec.ell} does not match model ell={params.ell}")
    knots = knots if knots is not None else make_knots(spec)
    quad = quad if quad is not None else QuadratureRule()
    a_mat = assemble_a(params, spec, knots, quad)
    b_mat = assemble_b(params, spec, knots, quad, workers=workers)
    return MatrixPair(a_mat, b_mat, spec, params, knots)


def save_matrices(path, pair: MatrixPair) -> Path:
    """Debug dump: npz holding ``a_mat``, ``b_mat`` (row-major) and a JSON ``header``."""
    path = Path(path)
    header = {"n_p": pair.spec.n_p, "n_theta": pair.spec.n_theta, "spec": asdict(pair.spec), "params": asdict(pair.params)}
    np.savez(path, a_mat=pair.a_mat, b_mat=pair.b_mat, header=np.array(json.dumps(header)))
    return path


def load_matrices(path) -> MatrixPair:
    with np.load(path) as data:
        header = json.loads(str(data["header"]))
        spec = BasisSpec(**header["spec"])
        params = ModelParams(**header["params"])
        return MatrixPair(data["a_mat"].copy(), data["b_mat"].copy(), spec, params, make_knots(spec))


