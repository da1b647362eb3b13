"""Physics functions of the Wick-rotated, partially separated Wick-Cutkosky equation.

Everything is dimensionless in units of m, where m1 = m(1 + delta) and
m2 = m(1 - delta).  Couplings come out as lambda / m^2.

The functions accept numpy arrays and broadcast, so the assembly and
verification code can call them on whole quadrature grids at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of one bound-state problem.

    ``xi`` defaults to ``(1 + delta) / 2 = m1 / (m1 + m2)``.
    """

    delta: float = 0.0
    epsilon: float = 0.0
    xi: Optional[float] = None
    ell: int = 0

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must satisfy 0 <= delta < 1, got {self.delta}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must satisfy 0 <= epsilon < 1, got {self.epsilon}")
        if self.xi is None:
            object.__setattr__(self, "xi", 0.5 * (1.0 + self.delta))
        if not 0.0 < self.xi < 1.0:
            raise ValueError(f"xi must satisfy 0 < xi < 1, got {self.xi}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise ValueError(f"ell must be a non-negative integer, got {self.ell}")
        object.__setattr__(self, "ell", int(self.ell))

    @classmethod
    def from_epsilon2(cls, delta: float, epsilon2: float, xi: Optional[float] = None, ell: int = 0):
        if epsilon2 < 0:
            raise ValueError(f"epsilon2 must be non-negative, got {epsilon2}")
        return cls(delta=delta, epsilon=float(np.sqrt(epsilon2)), xi=xi, ell=ell)

    @property
    def m1(self) -> float:
        return 1.0 + self.delta

    @property
    def m2(self) -> float:
        return 1.0 - self.delta

    @property
    def epsilon2(self) -> float:
        return self.epsilon**2


def _brackets(p0, ps2, params: ModelParams):
    eps2 = params.epsilon**2
    xi = params.xi
    s = np.asarray(p0) ** 2 + np.asarray(ps2)
    first = s - 4.0 * xi**2 * eps2 + (1.0 + params.delta) ** 2
    second = s - 4.0 * (1.0 - xi) ** 2 * eps2 + (1.0 - params.delta) ** 2
    return first, second


def d_real(p0, ps2, params: ModelParams):
    """Real part D_R of the two-propagator factor at Euclidean (p0, |p|^2)."""
    first, second = _brackets(p0, ps2, params)
    xi = params.xi
    return first * second + 16.0 * xi * (1.0 - xi) * params.epsilon**2 * np.asarray(p0) ** 2


def d_imag(p0, ps2, params: ModelParams):
    """Imaginary part D_I; odd in p0, zero at epsilon = 0."""
    first, second = _brackets(p0, ps2, params)
    xi = params.xi
    return 4.0 * params.epsilon * np.asarray(p0) * (-xi * second + (1.0 - xi) * first)


def _check_positive(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(p <= 0) or np.any(q <= 0):
        raise ValueError("momenta must be strictly positive")
    return p, q


def ratio(p, q):
    """min(p, q) / max(p, q)."""
    p, q = _check_positive(p, q)
    return np.minimum(p, q) / np.maximum(p, q)


def lambda_kernel(k: int, p, q):
    """Hecke-reduced kernel 2 pi^2 R^(k+1) / (p q (k+1))."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    p, q = _check_positive(p, q)
    return 2.0 * np.pi**2 / (p * q * (k + 1)) * ratio(p, q) ** (k + 1)


def polar_to_components(p, z):
    """(|p|, z = cos theta_1) -> (p0, |p_vec|^2)."""
    p = np.asarray(p, dtype=float)
    z = np.asarray(z, dtype=float)
    return p * z, p**2 * (1.0 - z**2)
