"""Outage analysis for OSTBC transmission over multi-cluster scattering
MIMO channels, where the effective channel is a product of i.i.d. complex
Gaussian matrices.

The package computes exact integer moments of the squared Frobenius norm of
the product channel, fits a moment-matched Gamma-Laguerre CDF model, maps it
to outage probability and outage capacity, and validates everything against
a seeded Monte-Carlo simulator.
"""

from .channel import ChannelConfig
from .errors import (
    FitError,
    NumericError,
    ParameterError,
    RayprodError,
    ResourceError,
)
from .gamma_laguerre import GammaLaguerreModel, cdf, cdf_inverse, fit
from .moments import (
    MomentSet,
    closed_form_moment,
    exact_moment,
    leading_order_moment,
    mgf_moment,
    mgf_moments,
    moment_set,
)
from .montecarlo import (
    Ecdf,
    SampleSet,
    load_samples,
    rayleigh_limit_distance,
    sample_frobenius,
    save_samples,
    variance_recursion,
)
from .ostbc import (
    OstbcScheme,
    db_to_linear,
    effective_snr,
    linear_to_db,
    ostbc_catalog,
    outage_capacity,
    outage_probability,
)
from .special import (
    LogSigned,
    det_dense,
    gamma_det_identity,
    log_gamma,
    pochhammer_log,
    reg_lower_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "Ecdf",
    "FitError",
    "GammaLaguerreModel",
    "LogSigned",
    "MomentSet",
    "NumericError",
    "OstbcScheme",
    "ParameterError",
    "RayprodError",
    "ResourceError",
    "SampleSet",
    "cdf",
    "cdf_inverse",
    "closed_form_moment",
    "db_to_linear",
    "det_dense",
    "effective_snr",
    "exact_moment",
    "fit",
    "gamma_det_identity",
    "leading_order_moment",
    "linear_to_db",
    "load_samples",
    "log_gamma",
    "mgf_moment",
    "mgf_moments",
    "moment_set",
    "ostbc_catalog",
    "outage_capacity",
    "outage_probability",
    "pochhammer_log",
    "rayleigh_limit_distance",
    "reg_lower_gamma",
    "sample_frobenius",
    "save_samples",
    "variance_recursion",
]
