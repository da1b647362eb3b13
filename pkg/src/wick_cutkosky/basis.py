"""Discretization: knots, cubic B-splines, convergence functions, spherical functions.

Radial basis functions are G_n(p) = p^l / (a + p^(2l+5)) * B_n(p), with B_n
the cubic B-splines over N_p + 4 momentum knots.  Three knots sit on the
"negative" momentum axis so the first three splines are finite at p = 0.

Angular dependence uses P2_{k,l}(z) = (1 - z^2)^(l/2) d^l/dz^l C^1_k(z),
evaluated through d^l C^1_k = 2^l l! C^(l+1)_(k-l).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, gamma, pi

import numpy as np

SPLINE_ORDER = 4  # cubic


@dataclass(frozen=True)
class BasisSpec:
    n_p: int = 20
    n_theta: int = 1
    c_prime: float = 1.0
    c_dprime: float = 0.01
    a: float = 1.0
    script_n: int = 1
    ell: int = 0

    def __post_init__(self):
        if self.n_p < 4:
            raise ValueError(f"n_p must be >= 4, got {self.n_p}")
        if self.n_theta < 1:
            raise ValueError(f"n_theta must be >= 1, got {self.n_theta}")
        if self.c_prime <= 0:
            raise ValueError(f"c_prime must be > 0, got {self.c_prime}")
        if self.a <= 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if self.script_n not in (1, 3):
            raise ValueError(f"script_n must be 1 or 3, got {self.script_n}")
        if self.ell < 0:
            raise ValueError(f"ell must be >= 0, got {self.ell}")

    @property
    def k_max(self) -> int:
        return self.ell + self.n_theta - 1

    @property
    def size(self) -> int:
        return self.n_p * self.n_theta

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(self.ell, self.k_max + 1)

    def index(self, i_p: int, i_theta: int) -> int:
        """Zero-based flat index for 1-based (I_p, I_theta)."""
        return self.n_p * (i_theta - 1) + (i_p - 1)


@dataclass(frozen=True)
class KnotVector:
    t_p: np.ndarray
    t_z: np.ndarray = field(default_factory=lambda: np.array([-1.0, 1.0]))

    def __post_init__(self):
        t_p = np.asarray(self.t_p, dtype=float)
        t_z = np.asarray(self.t_z, dtype=float)
        if not np.all(np.isfinite(t_p)):
            raise ValueError("momentum knots must be finite")
        if np.any(np.diff(t_p) <= 0):
            raise ValueError("momentum knots must be strictly increasing")
        if np.any(np.diff(t_z) <= 0) or t_z[0] != -1.0 or t_z[-1] != 1.0:
            raise ValueError("angular knots must increase strictly from -1 to 1")
        t_p.setflags(write=False)
        t_z.setflags(write=False)
        object.__setattr__(self, "t_p", t_p)
        object.__setattr__(self, "t_z", t_z)

    @property
    def n_splines(self) -> int:
        return len(self.t_p) - SPLINE_ORDER

    @property
    def p_max(self) -> float:
        return float(self.t_p[-1])

    @property
    def positive_knots(self) -> np.ndarray:
        """Knots on [0, p_max]; the breakpoints of every radial integrand."""
        return self.t_p[self.t_p >= 0.0]


@dataclass(frozen=True)
class BoundaryExponents:
    g0: float
    g_inf: float
    i0: float
    i_inf: float
    small_branch: str
    large_branch: str


class OutsideValidityRegion(ValueError):
    pass


def chebyshev_points(n: int) -> np.ndarray:
    """x_i = -cos((2i - 1) pi / 2n), i = 1..n; increasing on (-1, 1)."""
    if n < 1:
        raise ValueError(f"need at least one Chebyshev point, got n={n}")
    i = np.arange(1, n + 1)
    return -np.cos((2 * i - 1) * np.pi / (2 * n))


def momentum_knots(spec: BasisSpec) -> np.ndarray:
    x = chebyshev_points(spec.n_p)
    mapped = spec.c_prime * np.sqrt((1.0 + x) / (1.0 - x)) + spec.c_dprime
    if not np.all(np.isfinite(mapped)):
        raise ValueError("momentum knot map produced non-finite values")
    return np.concatenate([-mapped[2::-1], [0.0], mapped])


def angular_knots(spec: BasisSpec) -> np.ndarray:
    return np.concatenate([[-1.0], chebyshev_points(spec.n_theta + 2), [1.0]])


def make_knots(spec: BasisSpec) -> KnotVector:
    return KnotVector(t_p=momentum_knots(spec), t_z=angular_knots(spec))


def bspline_matrix(p, t) -> np.ndarray:
    """All cubic B-splines over knot vector ``t`` at points ``p``.

    Returns shape (len(p), len(t) - 4).  Cox-de Boor recursion on half-open
    intervals, so every spline is zero at and beyond the last knot.
    """
    x = np.atleast_1d(np.asarray(p, dtype=float))[:, None]
    t = np.asarray(t, dtype=float)
    b = ((t[:-1] <= x) & (x < t[1:])).astype(float)
    for d in range(1, SPLINE_ORDER):
        left = (x - t[: -d - 1]) / (t[d:-1] - t[: -d - 1])
        right = (t[d + 1 :] - x) / (t[d + 1 :] - t[1:-d])
        b = left * b[:, :-1] + right * b[:, 1:]
    return b


def bspline(n: int, p, knots: KnotVector):
    """Cubic B-spline B_n (1-based) supported on [T_p(n), T_p(n + 4)]."""
    if not 1 <= n <= knots.n_splines:
        raise IndexError(f"spline index {n} outside 1..{knots.n_splines}")
    t = knots.t_p[n - 1 : n + SPLINE_ORDER]
    values = bspline_matrix(p, t)[:, 0]
    return values if np.ndim(p) else float(values[0])


def convergence_function(ell: int, a: float, p):
    p = np.asarray(p, dtype=float)
    return p**ell / (a + p ** (2 * ell + 5))


def radial_matrix(p, spec: BasisSpec, knots: KnotVector) -> np.ndarray:
    """G_n(p) for all n; shape (len(p), n_p)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    return convergence_function(spec.ell, spec.a, p)[:, None] * bspline_matrix(p, knots.t_p)


def radial_basis(n: int, p, spec: BasisSpec, knots: KnotVector):
    return convergence_function(spec.ell, spec.a, p) * bspline(n, p, knots)


def gegenbauer(k: int, alpha: float, z):
    """C^alpha_k(z) by the three-term recurrence."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if k == 0:
        return prev
    cur = 2.0 * alpha * z
    for n in range(2, k + 1):
        prev, cur = cur, (2.0 * z * (n + alpha - 1) * cur - (n + 2 * alpha - 2) * prev) / n
    return cur


def spherical_fn(k: int, ell: int, z):
    """P2_{k,l}(z) = (1 - z^2)^(l/2) d^l/dz^l C^1_k(z)."""
    if k < ell:
        raise ValueError(f"spherical function needs k >= ell, got k={k}, ell={ell}")
    z = np.asarray(z, dtype=float)
    scale = 2.0**ell * factorial(ell)
    return (1.0 - z**2) ** (ell / 2.0) * scale * gegenbauer(k - ell, ell + 1, z)


def angular_matrix(z, spec: BasisSpec) -> np.ndarray:
    """P2_{k,l}(z) for k = l..K_max; shape (len(z), n_theta)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return np.stack([spherical_fn(int(k), spec.ell, z) for k in spec.k_values], axis=1)


def spherical_norm(k: int, ell: int) -> float:
    """Integral of sqrt(1 - z^2) P2_{k,l}(z)^2 over [-1, 1]."""
    return pi * gamma(k + ell + 2) / ((2 * k + 2) * gamma(k - ell + 1))


def asymptotic_exponents(n: float, g0: float, g_inf: float, k: int) -> BoundaryExponents:
    """Power laws of I(p) = int dq q^n G(q) Lambda_k(p, q) at small and large p.

    ``G`` behaves as q^g0 near zero and q^-g_inf at infinity.
    """
    if -n + k + 1 <= g0 and n - k - 1 < g_inf:
        i0, small = k, "IA"
    elif -n - k - 1 < g0 < -n + k + 1 and n - k - 1 < g_inf:
        i0, small = g0 + n - 1, "IB"
    else:
        raise OutsideValidityRegion(f"outside validity region for small p: n={n}, g0={g0}, g_inf={g_inf}, k={k}")
    if -n - k - 1 < g0 and n + k + 1 <= g_inf:
        i_inf, large = k + 2, "IIA"
    elif -n - k - 1 < g0 and n - k - 1 < g_inf <= n + k + 1:
        i_inf, large = g_inf - n + 1, "IIB"
    else:
        raise OutsideValidityRegion(f"outside validity region for large p: n={n}, g0={g0}, g_inf={g_inf}, k={k}")
    return BoundaryExponents(g0, g_inf, i0, i_inf, small, large)


def boundary_exponents(k: int, n: int = 3) -> BoundaryExponents:
    """Solve for (g0, g_inf) consistent with the equation.

    As p -> 0 the left side goes as p^g0 (D_R -> const) and must match p^i0;
    as p -> inf it goes as p^(4 - g_inf) and must match p^-i_inf.  Only the
    IA / IIA branches give non-degenerate solutions.
    """
    g0 = k
    g_inf = k + 6
    exps = asymptotic_exponents(n, g0, g_inf, k)
    if exps.i0 != g0 or exps.i_inf != g_inf - 4:
        raise OutsideValidityRegion(f"no consistent boundary exponents for k={k}, n={n}")
    return exps
