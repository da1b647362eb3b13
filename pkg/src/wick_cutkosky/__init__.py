"""Coupling-constant eigenvalues of the Wick-Cutkosky Bethe-Salpeter equation with unequal masses."""
from .assembly import MatrixPair, QuadratureRule, assemble, assemble_a, assemble_b, radial_inner_integral
from .basis import BasisSpec, KnotVector, make_knots
from .model import ModelParams, d_imag, d_real, lambda_kernel, ratio
from .spectrum import Spectrum, filter_real, solve_generalized
from .verify import SolutionField, VerificationReport, convergence_study, decompose_parity, evaluate_psi, residual_grid

__all__ = [
    "BasisSpec",
    "KnotVector",
    "MatrixPair",
    "ModelParams",
    "QuadratureRule",
    "SolutionField",
    "Spectrum",
    "VerificationReport",
    "assemble",
    "assemble_a",
    "assemble_b",
    "convergence_study",
    "d_imag",
    "d_real",
    "decompose_parity",
    "evaluate_psi",
    "filter_real",
    "lambda_kernel",
    "make_knots",
    "radial_inner_integral",
    "ratio",
    "residual_grid",
    "solve_generalized",
]
