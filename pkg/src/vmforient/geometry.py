"""Unit-sphere vector helpers.

Vectors are plain numpy arrays: a single vector has shape ``(3,)`` and a
batch has shape ``(n, 3)``. Angles cross the public API in degrees
(``phi`` azimuth in [0, 360), ``theta`` polar angle in [0, 180] with
``theta = 0`` on +z) and are handled in radians internally.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-9
POLE = np.array([0.0, 0.0, 1.0])


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class SphericalDirection:
    phi: float
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.phi < 360.0):
            raise DomainError(f"phi={self.phi} outside [0, 360)")
        if not (0.0 <= self.theta <= 180.0):
            raise DomainError(f"theta={self.theta} outside [0, 180]")


def as_vectors(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1:] != (3,):
        raise DomainError(f"expected trailing dimension 3, got shape {arr.shape}")
    return arr


def normalize(a) -> np.ndarray:
    """Scale ``a`` (one vector or a batch) to unit length.

    A zero or non-finite vector raises :class:`DomainError`; such a row
    in accelerometer data means the sample is corrupt.
    """
    a = as_vectors(a)
    if not np.all(np.isfinite(a)):
        raise DomainError("non-finite vector component")
    norm = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise DomainError("cannot normalize a zero vector")
    return a / norm


def is_unit(v, tol: float = UNIT_TOL) -> bool:
    v = as_vectors(v)
    return bool(np.all(np.abs(np.linalg.norm(v, axis=-1) - 1.0) <= tol))


def to_spherical(u) -> np.ndarray:
    """Return ``(phi_deg, theta_deg)`` with shape ``(..., 2)``.

    Azimuth at the poles is pinned to 0.
    """
    u = as_vectors(u)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    theta = np.degrees(np.arccos(np.clip(z, -1.0, 1.0)))
    on_axis = (x == 0.0) & (y == 0.0)
    phi = np.degrees(np.arctan2(y, x))
    phi = np.where(on_axis, 0.0, np.mod(phi, 360.0))
    # mod can round -tiny up to exactly 360
    phi = np.where(phi >= 360.0, 0.0, phi)
    return np.stack([phi, theta], axis=-1)


def direction_of(u) -> SphericalDirection:
    phi, theta = to_spherical(u)
    return SphericalDirection(float(phi), float(theta))


def from_spherical(phi_deg, theta_deg) -> np.ndarray:
    phi = np.radians(np.asarray(phi_deg, dtype=float))
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def rotation_from_pole(mu) -> np.ndarray:
    """3x3 rotation matrix taking +z onto the unit vector ``mu``.

    This is the minimal rotation about the axis ``z x mu``. For
    ``mu = -z`` the axis is undefined and a 180 degree turn about +x is
    used instead.
    """
    a, b, c = as_vectors(mu)
    s2 = a * a + b * b
    if s2 == 0.0:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    # 1/(1+c) rewritten so it stays accurate as c -> -1
    k = 1.0 / (1.0 + c) if c >= 0 else (1.0 - c) / s2
    return np.array(
        [
            [1.0 - a * a * k, -a * b * k, a],
            [-a * b * k, 1.0 - b * b * k, b],
            [-a, -b, c],
        ]
    )


def rotate_pole_to(mu, v) -> np.ndarray:
    """Apply the pole-to-``mu`` rotation to ``v`` (one vector or a batch)."""
    return as_vectors(v) @ rotation_from_pole(mu).T


def angle_between(u, v) -> np.ndarray:
    """Angle in radians, accurate for nearly parallel vectors."""
    u = as_vectors(u)
    v = as_vectors(v)
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    dot = np.sum(u * v, axis=-1)
    return np.arctan2(cross, dot)


def sphere_quadrature(n_phi: int, n_theta: int):
    """Nodes and weights integrating smooth functions over the unit sphere.

    Gauss-Legendre in ``cos(theta)`` times the periodic trapezoid rule in
    ``phi``. Returns ``(points, weights)`` with shapes ``(n_phi*n_theta, 3)``
    and ``(n_phi*n_theta,)``; weights sum to 4*pi.
    """
    if n_phi < 1 or n_theta < 1:
        raise DomainError("quadrature needs at least one node per axis")
    t, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - t * t)
    pts = np.stack(
        [
            np.outer(np.cos(phi), st),
            np.outer(np.sin(phi), st),
            np.broadcast_to(t, (n_phi, n_theta)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    w = np.broadcast_to(wt * (2.0 * np.pi / n_phi), (n_phi, n_theta)).reshape(-1)
    return pts, w.copy()
