"""Exportable views of fitted models: density grids on the Mollweide
projection, a phi-theta summary of the fitted modes, and the usage-type to
OTA test-condition mapping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .geometry import DomainError, from_spherical, to_spherical
from .ingestion import UsageType
from .mixture import MixtureModel, mixture_pdf
from .reference_models import TEST_CONDITIONS, USAGE_TEST_CONDITIONS, TestCondition
from .vmf import FitReport, VmfParams, vmf_pdf

Model = Union[VmfParams, MixtureModel]

MOLLWEIDE_TOL = 1e-10
MOLLWEIDE_MAX_ITER = 100


def mollweide_auxiliary(latitude_rad) -> np.ndarray:
    """Solve ``2a + sin(2a) = pi sin(lat)`` for the auxiliary angle ``a``.

    Newton on ``t = 2a``, started at ``t = 2 lat``; the poles are set directly.
    """
    lat = np.asarray(latitude_rad, dtype=float)
    target = np.pi * np.sin(lat)
    t = 2.0 * lat
    pole = np.abs(lat) >= np.pi / 2
    for _ in range(MOLLWEIDE_MAX_ITER):
        f = t + np.sin(t) - target
        if np.all(pole | (np.abs(f) < MOLLWEIDE_TOL)):
            break
        df = 1.0 + np.cos(t)
        step = np.divide(f, df, out=np.zeros_like(f), where=df > 0)
        t = np.where(pole, t, np.clip(t - step, -np.pi, np.pi))
    return np.where(pole, np.sign(lat) * np.pi / 2, t / 2.0)


def mollweide(phi_deg, theta_deg) -> tuple[np.ndarray, np.ndarray]:
    """Forward Mollweide projection of (azimuth, polar angle) in degrees.

    Longitude is the azimuth wrapped to (-180, 180]; latitude is
    ``90 - theta``. Output spans ``|x| <= 2*sqrt(2)``, ``|y| <= sqrt(2)``.
    """
    phi = np.asarray(phi_deg, dtype=float)
    lon = np.radians(np.where(phi > 180.0, phi - 360.0, phi))
    lat = np.radians(90.0 - np.asarray(theta_deg, dtype=float))
    a = mollweide_auxiliary(lat)
    x = 2.0 * math.sqrt(2.0) / math.pi * lon * np.cos(a)
    y = math.sqrt(2.0) * np.sin(a)
    return x, y


@dataclass(frozen=True)
class DensityGrid:
    phi_deg: np.ndarray
    theta_deg: np.ndarray
    mollweide_x: np.ndarray
    mollweide_y: np.ndarray
    density: np.ndarray
    n_phi: int
    n_theta: int

    def quadrature_sum(self) -> float:
        """Midpoint-rule integral of the density over the sphere."""
        dphi = 2.0 * math.pi / self.n_phi
        dtheta = math.pi / self.n_theta
        return float(np.sum(self.density * np.sin(np.radians(self.theta_deg))) * dphi * dtheta)

    def argmax(self) -> tuple[float, float]:
        k = int(np.argmax(self.density))
        return float(self.phi_deg[k]), float(self.theta_deg[k])

    def rows(self) -> np.ndarray:
        return np.column_stack(
            [self.phi_deg, self.theta_deg, self.mollweide_x, self.mollweide_y, self.density]
        )


def evaluate(model: Model, rho) -> np.ndarray:
    if isinstance(model, MixtureModel):
        return mixture_pdf(rho, model)
    return vmf_pdf(rho, model)


def density_grid(model: Model, n_phi: int = 360, n_theta: int = 180) -> DensityGrid:
    """Evaluate the density at cell centers of a regular phi-theta grid.

    Rows run over theta (outer) then phi (inner).
    """
    if n_phi < 2 or n_theta < 2:
        raise DomainError("grid needs at least 2 cells per axis")
    phi = (np.arange(n_phi) + 0.5) * 360.0 / n_phi
    theta = (np.arange(n_theta) + 0.5) * 180.0 / n_theta
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    ph, th = ph.ravel(), th.ravel()
    dens = evaluate(model, from_spherical(ph, th))
    x, y = mollweide(ph, th)
    return DensityGrid(ph, th, x, y, dens, n_phi, n_theta)


@dataclass(frozen=True)
class SummaryRow:
    usage: str
    phi_deg: float
    theta_deg: float
    kappa: float
    inv_kappa: float


def phi_theta_summary(fits: Iterable[tuple[UsageType, FitReport | VmfParams]]) -> list[SummaryRow]:
    """Mean-direction angles per usage type, with ``1/kappa`` as marker size."""
    rows = []
    for usage, fit in fits:
        params = fit.params if isinstance(fit, FitReport) else fit
        phi, theta = to_spherical(params.mu)
        inv = 1.0 / params.kappa if params.kappa > 0 else math.inf
        rows.append(SummaryRow(str(usage), float(phi), float(theta), params.kappa, inv))
    if not rows:
        raise DomainError("summary needs at least one fit")
    return rows


def usage_to_test_conditions(usage: UsageType | str) -> list[int]:
    """OTA test-condition indices matching a usage type; empty if unmapped."""
    return list(USAGE_TEST_CONDITIONS.get(str(usage), ()))


def conditions_for_usage(usage: UsageType | str) -> list[TestCondition]:
    return [TEST_CONDITIONS[i] for i in usage_to_test_conditions(usage)]

