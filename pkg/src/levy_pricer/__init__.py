"""European call pricing under exponential-Lévy (KoBoL) models by contour-deformed
Fourier inversion and band-limited sampling, with an explicit error budget."""

from .budget import ErrorBudget, SamplingPlan, compute_M, make_plan, sigma_for_eps, tail_eps
from .charexp import (GaussianParams, KoBoLParams, LevyExponent, LevyMeasureSpec,
                      calibrate_drift, gaussian_psi, kobol_exponent, kobol_levy_measure,
                      kobol_psi, levy_khintchine_psi_numeric, matched_gaussian)
from .contour import ArcFamily, ContourSpec, eval_contour, make_contour, make_lower_contour, verify_arc_decay
from .density import (DensityCurve, density_approximant, density_contour, density_quadrature,
                      density_stable)
from .errors import (ContourError, CutError, DomainError, LevyPricerError, NumericalError,
                     PlanError, QuadratureError, StripError)
from .pricer import MarketSpec, PriceResult, black_scholes_reference, price_quadrature, price_series
from .sampling import SampleGrid, best_approx_bound, wks_interpolate

__version__ = "0.1.0"

__all__ = [
    "ArcFamily", "ContourError", "ContourSpec", "CutError", "DensityCurve", "DomainError",
    "ErrorBudget", "GaussianParams", "KoBoLParams", "LevyExponent", "LevyMeasureSpec",
    "LevyPricerError", "MarketSpec", "NumericalError", "PlanError", "PriceResult",
    "QuadratureError", "SampleGrid", "SamplingPlan", "StripError", "best_approx_bound",
    "black_scholes_reference", "calibrate_drift", "compute_M", "density_approximant",
    "density_contour", "density_quadrature", "density_stable", "eval_contour",
    "gaussian_psi", "kobol_exponent", "kobol_levy_measure", "kobol_psi",
    "levy_khintchine_psi_numeric", "make_contour", "make_lower_contour", "make_plan",
    "matched_gaussian", "price_quadrature", "price_series", "sigma_for_eps", "tail_eps",
    "verify_arc_decay", "wks_interpolate",
]
