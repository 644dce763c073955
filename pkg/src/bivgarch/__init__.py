"""Bivariate CCC-GARCH(1,1) simulation, tail indices, extremograms and fitting."""

from .errors import (BiasWarning, BivgarchError, DegenerateSeries, EmptySeries, FewExceedancesWarning,
                     MCDegenerate, NoRootInRange, NonConvergenceWarning, ParseError, PipelineError,
                     SingularDesign, StationarityWarning, ZeroDenominator, ZeroVariance)
from .extremogram import (ExtremogramConfig, ExtremogramResult, TailSet, exceedance_clock_profile,
                          extremogram_with_bands, permutation_bands, quantile_transform, sample_ccf,
                          sample_extremogram)
from .fit import (FitResult, VarFit, extract_residuals, fit_bivariate_qmle, fit_univariate_qmle,
                  fit_univariate_t_mle, fit_var, qq_points, volatility_filter)
from .io import load_series
from .model import (BivariateGarchParams, InnovationSpec, SimulatedPath, UnivariateGarchParams,
                    check_growth_condition, lyapunov_exponent, simulate_bivariate, simulate_univariate,
                    spectral_radius, spectral_radius_check)
from .pipeline import run_pipeline
from .tails import (decay_envelope, lambda_function, tail_index_bivariate, tail_index_univariate,
                    theoretical_extremogram_sigma)

__version__ = "0.1.0"
