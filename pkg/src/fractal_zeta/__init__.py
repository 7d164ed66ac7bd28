"""Spectral zeta functions of fractal Laplacians via spectral decimation.

The package solves the Poincare functional equation Phi(lam z) = p(Phi(z))
for a polynomial decimation model, enumerates Laplacian eigenvalues
lam^m * mu through inverse-branch words, continues the fiber zeta
functions by a Mellin series/quadrature split, and assembles the spectral
zeta function with its poles, special values, and log-periodic
oscillation diagnostics.  `oracle` carries the independent ground truth
(closed-form hyperbolic model, discrete gasket eigensolves) and `cli` the
command-line front end.
"""

from .precision import (DEFAULT_DIGITS, ModelValidationError,
                        NonConvergenceError, PoleProximityError,
                        default_digits, working_precision)
from .poly import (DecimationPolynomial, RationalGF, OffsetSpec,
                   DecimationModel)
from .models import get_model, model_names, write_model_files
from .poincare import (PoincareSeries, build_series, eval_phi, eval_log_phi,
                       build_log_phi_series, build_periodic_F, fourier_F,
                       certify_growth, smallest_root_estimate)
from .spectrum import (MuRoot, EigenvalueRecord, EigenvalueList,
                       CountingSample, HeatTraceSample, OscillationReport,
                       beta, mu_solutions, eigenvalues, counting, heat_trace,
                       oscillation_spectrum, spectral_dimension)
from .zeta import (SpectralValue, PoleReport, mellin_split, mellin_M,
                   validate_mellin_split, zeta_phi, zeta_delta,
                   zeta_consistency, H0, special_values, poles,
                   boundary_product_samples)
from .oracle import (GasketGraph, SymSpectrum, sinh_phi, sinh_zeta,
                     build_gasket, laplacian_spectrum, verify_decimation,
                     verify_sinh)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_DIGITS", "ModelValidationError", "NonConvergenceError",
    "PoleProximityError", "default_digits", "working_precision",
    "DecimationPolynomial", "RationalGF", "OffsetSpec", "DecimationModel",
    "get_model", "model_names", "write_model_files",
    "PoincareSeries", "build_series", "eval_phi", "eval_log_phi",
    "build_log_phi_series", "build_periodic_F", "fourier_F",
    "certify_growth", "smallest_root_estimate",
    "MuRoot", "EigenvalueRecord", "EigenvalueList", "CountingSample",
    "HeatTraceSample", "OscillationReport", "beta", "mu_solutions",
    "eigenvalues", "counting", "heat_trace", "oscillation_spectrum",
    "spectral_dimension",
    "SpectralValue", "PoleReport", "mellin_split", "mellin_M",
    "validate_mellin_split", "zeta_phi", "zeta_delta", "zeta_consistency",
    "H0", "special_values", "poles", "boundary_product_samples",
    "GasketGraph", "SymSpectrum", "sinh_phi", "sinh_zeta", "build_gasket",
    "laplacian_spectrum", "verify_decimation", "verify_sinh",
    "__version__",
]
