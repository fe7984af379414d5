"""Level crossing rate and average fade duration of cascaded Rayleigh fading."""

from .core import (
    CascadeSpec,
    ChannelError,
    Explicit,
    FixedC,
    FixedToMobile,
    HopSpec,
    MobileToMobile,
    SecondOrderCurve,
    SemiBlind,
    ThresholdGrid,
    Unity,
    derivative_variance,
    doppler_sum_sq,
    effective_doppler,
    max_doppler,
    phi,
)
from .specialfn import (
    CdfEvalOptions,
    cdf_product_rayleigh,
    gamma_upper_zero,
    product_exp_cdf,
)
from .relay import scenario_phi, semi_blind_gain
from .analytic import (
    LaplaceProblem,
    LaplaceResult,
    generic_laplace_approx,
    laplace_afd,
    laplace_lcr,
    lcr_critical_point,
    lcr_hessian,
    rayleigh_lcr,
    special_case_lcr,
)
from .exact import QuadratureSpec, exact_afd, exact_lcr, exact_lcr_dualhop
from .simulator import (
    FadingTrace,
    SimEstimate,
    TraceSpec,
    cascade_trace,
    estimate_lcr_afd,
    gen_f2m_trace,
    gen_m2m_trace,
)
from .scenario import ScenarioFile, compute_curves, load_scenario, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "CascadeSpec",
    "ChannelError",
    "Explicit",
    "FixedC",
    "FixedToMobile",
    "HopSpec",
    "MobileToMobile",
    "SecondOrderCurve",
    "SemiBlind",
    "ThresholdGrid",
    "Unity",
    "derivative_variance",
    "doppler_sum_sq",
    "effective_doppler",
    "max_doppler",
    "phi",
    "CdfEvalOptions",
    "cdf_product_rayleigh",
    "gamma_upper_zero",
    "product_exp_cdf",
    "scenario_phi",
    "semi_blind_gain",
    "LaplaceProblem",
    "LaplaceResult",
    "generic_laplace_approx",
    "laplace_afd",
    "laplace_lcr",
    "lcr_critical_point",
    "lcr_hessian",
    "rayleigh_lcr",
    "special_case_lcr",
    "QuadratureSpec",
    "exact_afd",
    "exact_lcr",
    "exact_lcr_dualhop",
    "FadingTrace",
    "SimEstimate",
    "TraceSpec",
    "cascade_trace",
    "estimate_lcr_afd",
    "gen_f2m_trace",
    "gen_m2m_trace",
    "ScenarioFile",
    "compute_curves",
    "load_scenario",
    "parse_scenario",
]
