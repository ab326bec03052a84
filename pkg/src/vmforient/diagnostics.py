"""Goodness of fit through projection quantiles.

Observations are projected onto the fitted mean direction and the
empirical quantiles of ``rho.mu`` are paired with those of the model. For
a vMF the projection ``t`` has CDF
``F(t) = (exp(kappa t) - exp(-kappa)) / (2 sinh kappa)`` on [-1, 1], which
inverts in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, as_vectors
from .vmf import TINY_KAPPA, VmfParams, projection_inverse_cdf, sample_vmf


def default_taus() -> np.ndarray:
    """0.05, 0.06, ..., 0.95 (91 levels)."""
    return np.round(0.05 + 0.01 * np.arange(91), 12)


def parse_taus(spec: str) -> np.ndarray:
    """Parse ``"start:step:stop"`` (inclusive stop) into quantile levels."""
    try:
        start, step, stop = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(f"tau grid must look like 0.05:0.01:0.95, got {spec!r}") from None
    if step <= 0 or not (0 < start <= stop < 1):
        raise ValueError(f"invalid tau grid {spec!r}")
    count = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(count), 12)


@dataclass(frozen=True)
class QQSeries:
    taus: np.ndarray
    empirical: np.ndarray
    reference: np.ndarray

    def __post_init__(self):
        if not (len(self.taus) == len(self.empirical) == len(self.reference)):
            raise ValueError("Q-Q series columns differ in length")

    @property
    def max_deviation(self) -> float:
        if len(self.taus) == 0:
            return 0.0
        return float(np.max(np.abs(self.empirical - self.reference)))


def projection_quantiles(samples, mu_hat, taus) -> np.ndarray:
    """Quantiles of ``rho . mu_hat`` (linear interpolation between order stats)."""
    x = as_vectors(samples).reshape(-1, 3)
    taus = np.asarray(taus, dtype=float)
    if taus.size == 0:
        return np.empty(0)
    if len(x) < 2:
        raise DomainError("projection quantiles need at least two samples")
    proj = np.clip(x @ np.asarray(mu_hat, dtype=float), -1.0, 1.0)
    return np.quantile(proj, taus)


def projection_cdf(kappa: float, t) -> np.ndarray:
    """CDF of ``rho . mu`` under a vMF with concentration ``kappa``."""
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    if kappa == 0:
        return (t + 1.0) / 2.0
    if kappa < TINY_KAPPA:
        return (t + 1.0) / 2.0 + 0.25 * kappa * (t * t - 1.0)
    # (e^{kt} - e^{-k}) / (e^k - e^{-k}) with e^k factored out
    return np.exp(-kappa * (1.0 - t)) * -np.expm1(-kappa * (t + 1.0)) / -math.expm1(-2.0 * kappa)


def theoretical_projection_quantile(kappa: float, tau) -> np.ndarray:
    """Inverse projection CDF: ``log((1 - tau) e^-k + tau e^k) / k``.

    Evaluated as ``1 + log(tau + (1 - tau) e^{-2k}) / k`` so large kappa does
    not overflow; ``kappa == 0`` gives ``2 tau - 1``. This is the same map
    the sampler uses to turn uniforms into projections.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any((tau <= 0) | (tau >= 1)):
        raise DomainError("quantile levels must lie in (0, 1)")
    if kappa < 0:
        raise DomainError("kappa must be >= 0")
    return projection_inverse_cdf(kappa, tau)


def qq_series(
    samples,
    model: VmfParams,
    taus=None,
    reference: str = "closed_form",
    rng=None,
    n_reference: int | None = None,
) -> QQSeries:
    """Pair empirical and model projection quantiles.

    ``reference="simulated"`` draws ``n_reference`` vectors (default: as
    many as the data) from ``model`` and uses their empirical projection
    quantiles instead of the closed form.
    """
    x = as_vectors(samples).reshape(-1, 3)
    if len(x) == 0:
        raise DomainError("Q-Q series of an empty sample")
    taus = default_taus() if taus is None else np.asarray(taus, dtype=float)
    empirical = projection_quantiles(x, model.mu, taus)
    if reference == "closed_form":
        ref = theoretical_projection_quantile(model.kappa, taus)
    elif reference == "simulated":
        sim = sample_vmf(model, n_reference or len(x), rng)
        ref = projection_quantiles(sim, model.mu, taus)
    else:
        raise ValueError(f"unknown reference mode {reference!r}")
    return QQSeries(taus, empirical, ref)


def component_histograms(vectors, bins: int = 50):
    """Density-normalized histograms of the x, y and z components on [-1, 1].

    Returns ``(edges, hx, hy, hz)``.
    """
    v = as_vectors(vectors).reshape(-1, 3)
    if len(v) == 0:
        raise DomainError("histograms need at least one vector")
    if bins < 1:
        raise DomainError("bins must be >= 1")
    edges = np.linspace(-1.0, 1.0, bins + 1)
    comps = np.clip(v, -1.0, 1.0)
    hists = [np.histogram(comps[:, i], bins=edges, density=True)[0] for i in range(3)]
    return (edges, *hists)
