"""Finite mixtures of vMF components, one component per usage type.

Weights are observation frequencies, ``N_ijkl / sum N``, renormalized over
whichever usage types are included. Usage types without data get weight 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .geometry import DomainError, as_vectors
from .ingestion import UsageType
from .vmf import VmfParams, sample_vmf, vmf_pdf


@dataclass(frozen=True)
class MixtureComponent:
    usage: UsageType
    params: VmfParams
    weight: float
    n_samples: int

    def __post_init__(self):
        if not (self.weight >= 0 and math.isfinite(self.weight)):
            raise DomainError(f"component weight must be finite and >= 0, got {self.weight}")


@dataclass(frozen=True)
class MixtureModel:
    components: tuple[MixtureComponent, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DomainError("a mixture needs at least one component")
        total = math.fsum(c.weight for c in comps)
        if total <= 0:
            raise DomainError("mixture weights sum to zero")
        if abs(total - 1.0) > 1e-12:
            comps = tuple(
                MixtureComponent(c.usage, c.params, c.weight / total, c.n_samples) for c in comps
            )
        object.__setattr__(self, "components", comps)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def usages(self) -> list[UsageType]:
        return [c.usage for c in self.components]

    def __len__(self) -> int:
        return len(self.components)


def heuristic_weights(counts: Mapping[UsageType, int]) -> dict[UsageType, float]:
    """Frequency weights ``N_u / sum(N)``."""
    if any(n < 0 for n in counts.values()):
        raise DomainError("sample counts must be non-negative")
    total = sum(counts.values())
    if total <= 0:
        raise DomainError("at least one usage type needs a positive sample count")
    return {u: n / total for u, n in counts.items()}


def build_mixture(
    fits: Iterable[tuple[UsageType, VmfParams, int]],
    subset: Iterable[UsageType] | None = None,
) -> MixtureModel:
    """Assemble a mixture from per-usage fits, optionally restricted to ``subset``.

    Weights come from :func:`heuristic_weights` over the selected counts,
    so a subset is renormalized to sum to one.
    """
    fits = list(fits)
    if subset is not None:
        wanted = set(subset)
        fits = [f for f in fits if f[0] in wanted]
    if not fits:
        raise DomainError("subset selects no fitted usage type")
    weights = heuristic_weights({u: n for u, _, n in fits})
    return MixtureModel(
        tuple(MixtureComponent(u, p, weights[u], n) for u, p, n in fits)
    )


def mixture_pdf(rho, model: MixtureModel) -> np.ndarray:
    rho = as_vectors(rho)
    out = np.zeros(rho.shape[:-1])
    for c in model.components:
        out = out + c.weight * vmf_pdf(rho, c.params)
    return out


def sample_mixture(model: MixtureModel, n: int, rng=None) -> tuple[list[UsageType], np.ndarray]:
    """Composition-method sampling.

    One uniform per draw picks the component by inverting the cumulative
    weights; the vector is then drawn from that component. Returns the
    per-draw usage labels and an ``(n, 3)`` array of unit vectors.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(rng)
    if n == 0:
        return [], np.empty((0, 3))
    cum = np.cumsum(model.weights)
    cum[-1] = 1.0
    idx = np.searchsorted(cum, rng.random(n), side="right")
    vectors = np.empty((n, 3))
    for k, comp in enumerate(model.components):
        sel = np.flatnonzero(idx == k)
        if sel.size:
            vectors[sel] = sample_vmf(comp.params, sel.size, rng)
    labels = [model.components[k].usage for k in idx]
    return labels, vectors
