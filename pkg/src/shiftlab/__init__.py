"""shiftlab: a laboratory for shifted QR deflation on symmetric tridiagonal matrices.

The package implements the signed shifted QR step and its inverse on
real symmetric tridiagonal matrices, the Rayleigh / Wilkinson / mixed
shift rules, the geometry of deflation neighborhoods (canonical
projection and tube coordinates), and a diagnostics harness that
measures quadratic vs. cubic convergence of the bottom subdiagonal
entry.  Hot kernels run through a compiled extension when available
(``shiftlab._core.BACKEND`` reports which backend is active).
"""

from shiftlab._core import BACKEND
from shiftlab.diagnostics import (
    HeightSpec,
    IterationTrace,
    RateEstimate,
    StepRecord,
    exception_count,
    height,
    iterate,
    parlett_check,
    rate_exponents,
)
from shiftlab.dynamics import StepResult, drop_signs, phi, phi_star, sign_conjugate, step, step_inverse
from shiftlab.errors import (
    AlmostSingular,
    Breakdown,
    CalibrationFailed,
    DuplicateEigenvalue,
    InsufficientData,
    NoConvergence,
    ShiftLabError,
    Singular,
    StepFailure,
    WrongStrategy,
)
from shiftlab.factor import almost_invertible, qr_plain, qr_star, rq_star
from shiftlab.geometry import (
    NeighborhoodParams,
    SpectrumInfo,
    TubularPoint,
    calibrate_neighborhoods,
    classify_spectrum,
    deflation_component,
    double_deflation_gap,
    project,
    tubular_coords,
    tubular_inverse,
)
from shiftlab.lanczos import lanczos_from_spectrum, spectral_weights
from shiftlab.oracle import dense_eig_oracle, matrix_function
from shiftlab.strategies import Strategy, axiom_check, mixed, parse_strategy, rayleigh, wilkinson
from shiftlab.tridiag import OrthogonalFactor, SignMatrix, SymTridiag, UpperTriangularBand

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AlmostSingular",
    "Breakdown",
    "CalibrationFailed",
    "DuplicateEigenvalue",
    "HeightSpec",
    "InsufficientData",
    "IterationTrace",
    "NeighborhoodParams",
    "NoConvergence",
    "OrthogonalFactor",
    "RateEstimate",
    "ShiftLabError",
    "SignMatrix",
    "Singular",
    "SpectrumInfo",
    "StepFailure",
    "StepRecord",
    "StepResult",
    "Strategy",
    "SymTridiag",
    "TubularPoint",
    "UpperTriangularBand",
    "WrongStrategy",
    "almost_invertible",
    "axiom_check",
    "calibrate_neighborhoods",
    "classify_spectrum",
    "deflation_component",
    "dense_eig_oracle",
    "double_deflation_gap",
    "drop_signs",
    "exception_count",
    "height",
    "iterate",
    "lanczos_from_spectrum",
    "matrix_function",
    "mixed",
    "parlett_check",
    "parse_strategy",
    "phi",
    "phi_star",
    "project",
    "qr_plain",
    "qr_star",
    "rate_exponents",
    "rayleigh",
    "rq_star",
    "sign_conjugate",
    "spectral_weights",
    "step",
    "step_inverse",
    "tubular_coords",
    "tubular_inverse",
    "wilkinson",
]
