"""Directional statistics of handset orientation.

von Mises-Fisher fitting, sampling and goodness of fit on the unit sphere,
per-usage-type finite mixtures, and the accelerometer clean-up pipeline
that feeds them.
"""
from .geometry import DomainError, from_spherical, normalize, rotate_pole_to, to_spherical
from .ingestion import AccelSample, OrientationSet, UsageType, dedup, iqr_filter, parse_log
from .mixture import MixtureModel, build_mixture, heuristic_weights, mixture_pdf, sample_mixture
from .vmf import (
    DegenerateDataError,
    FitReport,
    VmfParams,
    bessel_ratio_a3,
    fit_vmf,
    invert_a3,
    log_likelihood,
    sample_vmf,
    vmf_pdf,
)

__version__ = "0.1.0"
