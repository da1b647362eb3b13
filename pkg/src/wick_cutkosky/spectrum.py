"""Dense generalized eigensolve A g = (lambda / m^2) B g and real-eigenvalue filtering."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import MatrixPair

TOL_RESID = 1e-8
TOL_REAL = 1e-6
PIVOT_TOL = 1e-13


class SingularBError(np.linalg.LinAlgError):
    pass


class EigenSolverError(np.linalg.LinAlgError):
    pass


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    residuals: np.ndarray
    tol_real: float = TOL_REAL
    real_subset: np.ndarray = field(init=False)

    def __post_init__(self):
        self.real_subset = real_indices(self.eigenvalues, self.tol_real)

    def __len__(self):
        return len(self.eigenvalues)


def real_indices(eigenvalues, tol_real: float = TOL_REAL) -> np.ndarray:
    """Indices of eigenvalues with negligible imaginary part and positive real part, ascending."""
    w = np.asarray(eigenvalues, dtype=complex)
    keep = (np.abs(w.imag) <= tol_real * np.maximum(1.0, np.abs(w.real))) & (w.real > 0)
    idx = np.flatnonzero(keep)
    return idx[np.argsort(w.real[idx], kind="stable")]


def pair_residuals(a_mat, b_mat, eigenvalues, eigenvectors) -> np.ndarray:
    """||A g - lam B g|| / ((||A|| + |lam| ||B||) ||g||) per pair."""
    a_norm = np.linalg.norm(a_mat, 2)
    b_norm = np.linalg.norm(b_mat, 2)
    r = a_mat @ eigenvectors - (b_mat @ eigenvectors) * eigenvalues[None, :]
    scale = (a_norm + np.abs(eigenvalues) * b_norm) * np.linalg.norm(eigenvectors, axis=0)
    return np.linalg.norm(r, axis=0) / scale


def solve_generalized(pair: MatrixPair | tuple, tol_real: float = TOL_REAL, tol_resid: float = TOL_RESID) -> Spectrum:
    """Full spectrum of the pencil (A, B).

    B is diagonally equilibrated and LU-factored; the equivalent standard
    problem B^-1 A is handed to LAPACK's dense nonsymmetric solver and the
    vectors are mapped back.  Every pair must meet the residual bound.
    """
    a_mat, b_mat = (pair.a_mat, pair.b_mat) if isinstance(pair, MatrixPair) else pair
    a_mat = np.asarray(a_mat, dtype=float)
    b_mat = np.asarray(b_mat, dtype=float)
    diag = np.abs(np.diag(b_mat))
    if np.any(diag == 0):
        raise SingularBError("B has a zero diagonal entry")
    s = 1.0 / np.sqrt(diag)
    a_s = s[:, None] * a_mat * s[None, :]
    b_s = s[:, None] * b_mat * s[None, :]

    with warnings.catch_warnings():
        # exact-zero pivots are reported below as SingularBError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(b_s, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_TOL * np.linalg.norm(b_s, 2):
        raise SingularBError(f"B is numerically singular: smallest pivot {pivots.min():.3e}")
    c = sla.lu_solve((lu, piv), a_s)
    try:
        w, v = sla.eig(c, check_finite=True)
    except sla.LinAlgError as exc:
        raise EigenSolverError(f"dense eigensolver did not converge: {exc}") from exc
    vecs = s[:, None] * v
    vecs /= np.linalg.norm(vecs, axis=0)
    res = pair_residuals(a_mat, b_mat, w, vecs)
    if np.any(res > tol_resid):
        # polish the stragglers with QZ on the original pencil
        w_qz, v_qz = sla.eig(a_s, b_s)
        v_qz = s[:, None] * v_qz
        v_qz /= np.linalg.norm(v_qz, axis=0)
        res_qz = pair_residuals(a_mat, b_mat, w_qz, v_qz)
        if res_qz.max() < res.max():
            w, vecs, res = w_qz, v_qz, res_qz
    if np.any(res > tol_resid):
        raise EigenSolverError(f"eigenpair residual {res.max():.3e} exceeds {tol_resid:.1e}")
    return Spectrum(w, vecs, res, tol_real=tol_real)


def normalize_vector(g: np.ndarray) -> np.ndarray:
    """Scale so the largest-magnitude component is +1; drop the imaginary part."""
    g = np.asarray(g)
    pivot = g[np.argmax(np.abs(g))]
    return np.real(g / pivot)


def filter_real(spectrum: Spectrum, tol_real: float | None = None):
    """Real, positive eigenvalues ascending, with normalized real eigenvectors as columns."""
    tol = spectrum.tol_real if tol_real is None else tol_real
    idx = real_indices(spectrum.eigenvalues, tol)
    values = spectrum.eigenvalues[idx].real
    vectors = np.empty((spectrum.eigenvectors.shape[0], len(idx)))
    for col, i in enumerate(idx):
        vectors[:, col] = normalize_vector(spectrum.eigenvectors[:, i])
    return values, vectors


def imag_parts(spectrum: Spectrum, tol_real: float | None = None) -> np.ndarray:
    """|Im lambda| of the filtered eigenvalues, in the same order as ``filter_real``."""
    tol = spectrum.tol_real if tol_real is None else tol_real
    return np.abs(spectrum.eigenvalues[real_indices(spectrum.eigenvalues, tol)].imag)
