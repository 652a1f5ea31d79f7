"""Total-variation image deblurring without boundary artifacts.

Alternating minimization with a quadratic-penalty continuation ladder;
the image update is solved by the fast transform matching the boundary
model (FFT / DCT-II / a decoupled sine-transform scheme), or on an
enlarged periodic domain for nonsymmetric kernels.
"""

from .energy import energy
from .errors import (ConvergenceError, DataError, PreconditionError, ShapeError,
                     SingularPlanError, SymmetryError, TvDeblurError, UnsupportedError)
from .grid import (BOUNDARY_MODELS, DEFAULT_BETA_LADDER, EnergyReport,
                   GradientField, Psf, SolveParams, as_image)
from .harness import (Experiment, FieldOfView, SweepResult, SweepRow, builtin_truth,
                      diagonal_motion_psf, gaussian_psf, parse_mode, restore,
                      simulate, snr, sweep, sweep_csv_text, write_sweep_csv)
from .operators import (PaddedDomain, adjoint_gradient, apply_blur,
                        apply_correlation, crop, extend, gradient,
                        transpose_adjoint_gradient)
from .solver import (SolveTrace, TraceRecord, shrink, solve, solve_enlarged,
                     u_step)
from .transforms import (SpectralPlan, SystemPlanner, dct2, dst1, fft2_real,
                         idct2, ifft2_real, plan_system, solve_system)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY_MODELS", "DEFAULT_BETA_LADDER", "ConvergenceError", "DataError",
    "EnergyReport", "Experiment", "FieldOfView", "GradientField", "PaddedDomain",
    "PreconditionError", "Psf", "ShapeError", "SingularPlanError", "SolveParams",
    "SolveTrace", "SpectralPlan", "SweepResult", "SweepRow", "SymmetryError",
    "SystemPlanner", "TraceRecord", "TvDeblurError", "UnsupportedError",
    "adjoint_gradient", "apply_blur", "apply_correlation", "as_image",
    "builtin_truth", "crop", "dct2", "diagonal_motion_psf", "dst1", "energy",
    "extend", "fft2_real", "gaussian_psf", "gradient", "idct2", "ifft2_real",
    "parse_mode", "plan_system", "restore", "shrink", "simulate", "snr", "solve",
    "solve_enlarged", "solve_system", "sweep", "sweep_csv_text",
    "transpose_adjoint_gradient", "u_step", "write_sweep_csv",
]
