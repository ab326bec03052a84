"""von Mises-Fisher distribution on the 2-sphere.

Density ``f(rho) = kappa / (4 pi sinh kappa) * exp(kappa mu.rho)``,
maximum-likelihood fitting via Newton inversion of the Bessel ratio
``A3(kappa) = I_{3/2}(kappa) / I_{1/2}(kappa) = coth(kappa) - 1/kappa``,
and exact inverse-CDF sampling.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, as_vectors, is_unit, normalize, rotate_pole_to, to_spherical

log = logging.getLogger(__name__)

SMALL_KAPPA = 1e-4
TINY_KAPPA = 1e-8
CF_KAPPA = 1.0
CF_DEPTH = 24
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
LOG_4PI = math.log(4.0 * math.pi)


class DegenerateDataError(ValueError):
    """Sample set admits no finite vMF fit (zero resultant or all identical)."""


@dataclass(frozen=True)
class VmfParams:
    mu: np.ndarray
    kappa: float

    def __post_init__(self):
        mu = as_vectors(self.mu).astype(float).reshape(3)
        if not is_unit(mu):
            raise DomainError("mean direction must be a unit vector")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa}")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "kappa", float(self.kappa))

    @classmethod
    def from_rounded(cls, mu, kappa: float) -> VmfParams:
        """Build from a published, rounded mean direction by renormalizing it."""
        return cls(normalize(mu), kappa)

    @property
    def angles(self) -> tuple[float, float]:
        phi, theta = to_spherical(self.mu)
        return float(phi), float(theta)


@dataclass(frozen=True)
class FitReport:
    params: VmfParams
    n: int
    rbar: float
    newton_iterations: int
    log_likelihood: float


def log_normalizer(kappa: float) -> float:
    """``log(kappa / (4 pi sinh kappa))``; finite for all kappa >= 0."""
    if kappa == 0:
        return -LOG_4PI
    # log sinh k = k + log(1 - exp(-2k)) - log 2
    log_sinh = kappa + math.log(-math.expm1(-2.0 * kappa)) - math.log(2.0)
    return math.log(kappa) - LOG_4PI - log_sinh


def vmf_logpdf(rho, params: VmfParams) -> np.ndarray:
    rho = as_vectors(rho)
    if params.kappa == 0:
        return np.full(rho.shape[:-1], -LOG_4PI)
    return log_normalizer(params.kappa) + params.kappa * (rho @ params.mu)


def vmf_pdf(rho, params: VmfParams) -> np.ndarray:
    """Density per steradian at ``rho`` (one vector or a batch)."""
    rho = as_vectors(rho)
    if params.kappa == 0:
        return np.full(rho.shape[:-1], 1.0 / (4.0 * math.pi))
    return np.exp(vmf_logpdf(rho, params))


def log_likelihood(samples, params: VmfParams) -> float:
    samples = as_vectors(samples).reshape(-1, 3)
    n = len(samples)
    if n == 0:
        raise DomainError("log-likelihood of an empty sample")
    if params.kappa == 0:
        return -n * LOG_4PI
    return n * log_normalizer(params.kappa) + params.kappa * float(params.mu @ samples.sum(axis=0))


def bessel_ratio_a3(kappa: float) -> float:
    """``I_{3/2}(kappa) / I_{1/2}(kappa)``, in closed form ``coth k - 1/k``."""
    if not kappa > 0:
        raise DomainError(f"A3 is defined for kappa > 0, got {kappa}")
    if kappa < SMALL_KAPPA:
        return kappa / 3.0 - kappa**3 / 45.0
    if kappa < CF_KAPPA:
        # k / (3 + k^2 / (5 + k^2 / (7 + ...))): same function, no cancellation
        k2 = kappa * kappa
        tail = 2.0 * CF_DEPTH + 3.0
        for m in range(CF_DEPTH - 1, -1, -1):
            tail = 2.0 * m + 3.0 + k2 / tail
        return kappa / tail
    return 1.0 / math.tanh(kappa) - 1.0 / kappa


def bessel_ratio_a3_prime(kappa: float) -> float:
    """Derivative ``A3'(k) = 1 - A3(k)^2 - 2 A3(k) / k``."""
    if kappa < SMALL_KAPPA:
        return 1.0 / 3.0 - kappa**2 / 15.0
    a = bessel_ratio_a3(kappa)
    return 1.0 - a * a - 2.0 * a / kappa


def initial_kappa(rbar: float, form: str = "one_minus_r") -> float:
    """Closed-form starting value for the Newton inversion of A3.

    ``form="one_minus_r"`` gives ``R(3 - R^2) / (1 - R)``. The
    ``"one_minus_r2"`` form divides by ``1 - R^2`` instead (Banerjee et al.),
    which is much closer to the root for large R and needs at most four
    Newton updates on R in [0.01, 0.99] versus twelve.
    """
    if form == "one_minus_r":
        return rbar * (3.0 - rbar**2) / (1.0 - rbar)
    if form == "one_minus_r2":
        return rbar * (3.0 - rbar**2) / (1.0 - rbar**2)
    raise ValueError(f"unknown initial guess form {form!r}")


def newton_a3(
    rbar: float,
    steps: int | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    start: str = "one_minus_r",
) -> tuple[float, int]:
    """Solve ``A3(kappa) = rbar``; returns ``(kappa, iterations)``.

    With ``steps`` set, exactly that many Newton updates are taken (the
    fixed two-step shortcut is ``steps=2``). Otherwise iterate until
    ``|A3(kappa) - rbar| < tol`` and the implied Newton step is below
    ``tol * max(kappa, 1)``, or ``max_iter`` updates. The second condition
    matters for large kappa, where A3 is flat.
    """
    if not (0.0 <= rbar < 1.0):
        raise DegenerateDataError(f"degenerate concentration: rbar={rbar} not in [0, 1)")
    if rbar == 0.0:
        return 0.0, 0
    kappa = initial_kappa(rbar, start)
    it = 0
    while True:
        resid = bessel_ratio_a3(kappa) - rbar
        slope = bessel_ratio_a3_prime(kappa)
        if steps is None and abs(resid) < tol and abs(resid / slope) <= tol * max(kappa, 1.0):
            break
        if steps is not None and it >= steps:
            break
        if it >= max_iter:
            log.warning("Newton inversion of A3 stopped at %d iterations (residual %.3g)", it, resid)
            break
        new = kappa - resid / slope
        # the iterate can only undershoot the root; keep it positive
        kappa = new if new > 0 else kappa / 2.0
        it += 1
    return kappa, it


def invert_a3(rbar: float, **kwargs) -> float:
    return newton_a3(rbar, **kwargs)[0]


def fit_vmf(samples, two_step: bool = False, start: str = "one_minus_r") -> FitReport:
    """Maximum-likelihood vMF fit.

    The mean direction is the normalized resultant; kappa solves
    ``A3(kappa) = |sum rho| / n``. ``two_step=True`` stops after two Newton
    updates instead of iterating to convergence.
    """
    x = as_vectors(samples).reshape(-1, 3)
    n = len(x)
    if n < 2:
        raise DegenerateDataError("need at least two samples to fit")
    resultant = x.sum(axis=0)
    rlen = float(np.linalg.norm(resultant))
    if rlen <= 1e-12 * n:
        raise DegenerateDataError("no mean direction: resultant vector is zero")
    if np.all(x == x[0]):
        raise DegenerateDataError("degenerate concentration: all samples identical")
    rbar = min(rlen / n, 1.0)
    if rbar >= 1.0:
        raise DegenerateDataError("degenerate concentration: rbar == 1")
    kappa, iters = newton_a3(rbar, steps=2 if two_step else None, start=start)
    params = VmfParams(resultant / rlen, kappa)
    return FitReport(params, n, rbar, iters, log_likelihood(x, params))


def projection_inverse_cdf(kappa: float, u) -> np.ndarray:
    """Quantile function of ``w = mu.rho`` under a vMF with concentration ``kappa``.

    ``w = 1 + log(u + (1 - u) exp(-2 kappa)) / kappa``, written with
    log1p/expm1 so it stays accurate for small kappa. Below
    ``TINY_KAPPA`` the first-order expansion ``s + kappa (1 - s^2) / 2``
    with ``s = 2u - 1`` is used, since the closed form underflows there.
    """
    u = np.asarray(u, dtype=float)
    s = 2.0 * u - 1.0
    if kappa == 0:
        return s
    if kappa < TINY_KAPPA:
        return s + 0.5 * kappa * (1.0 - s * s)
    w = 1.0 + np.log1p((1.0 - u) * math.expm1(-2.0 * kappa)) / kappa
    return np.clip(w, -1.0, 1.0)


def sample_vmf(params: VmfParams, n: int, rng=None) -> np.ndarray:
    """Draw ``n`` unit vectors from the vMF distribution, shape ``(n, 3)``.

    ``rng`` is a seed or a ``numpy.random.Generator``. Exactly two
    uniforms are consumed per draw, so output is reproducible per seed.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(rng)
    if n == 0:
        return np.empty((0, 3))
    u = rng.random((n, 2))
    # projection uniform taken from (0, 1] so the log never sees 0
    w = projection_inverse_cdf(params.kappa, 1.0 - u[:, 0])
    psi = 2.0 * math.pi * u[:, 1]
    r = np.sqrt(np.clip(1.0 - w * w, 0.0, None))
    v = np.column_stack([r * np.cos(psi), r * np.sin(psi), w])
    return rotate_pole_to(params.mu, v)
