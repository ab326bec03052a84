"""File formats: fitted-model and mixture JSON, and the CSV exports.

Every writer goes through :func:`atomic_write`, which writes a temporary
file in the target directory and renames it into place. Floats are written
with ``repr`` so they round-trip exactly and output is byte-stable.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .diagnostics import QQSeries
from .geometry import normalize
from .ingestion import OrientationSet, UsageType
from .mixture import MixtureComponent, MixtureModel
from .report import DensityGrid, SummaryRow
from .vmf import FitReport, VmfParams


class ModelFileError(ValueError):
    """A model or mixture file is missing fields or holds invalid values."""


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _f(x: float) -> str:
    return repr(float(x))


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _f(v) for v in row))
    return "\n".join(lines) + "\n"


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# --- fitted vMF models -------------------------------------------------------

def fit_to_dict(usage: UsageType, fit: FitReport) -> dict:
    phi, theta = fit.params.angles
    return {
        "usage": str(usage),
        "mu": [float(v) for v in fit.params.mu],
        "kappa": fit.params.kappa,
        "phi_deg": phi,
        "theta_deg": theta,
        "n_samples": fit.n,
        "rbar": fit.rbar,
        "log_likelihood": fit.log_likelihood,
    }


def write_fit(path, usage: UsageType, fit: FitReport) -> Path:
    return atomic_write(path, dump_json(fit_to_dict(usage, fit)))


def read_fit(path) -> tuple[UsageType, VmfParams, dict]:
    try:
        doc = json.loads(Path(path).read_text())
        usage = UsageType.from_code(doc["usage"])
        params = VmfParams(normalize(doc["mu"]), float(doc["kappa"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    return usage, params, doc


# --- mixtures ----------------------------------------------------------------

def mixture_to_dict(model: MixtureModel) -> dict:
    return {
        "components": [
            {
                "usage": str(c.usage),
                "mu": [float(v) for v in c.params.mu],
                "kappa": c.params.kappa,
                "weight": c.weight,
                "n_samples": c.n_samples,
            }
            for c in model.components
        ]
    }


def write_mixture(path, model: MixtureModel) -> Path:
    return atomic_write(path, dump_json(mixture_to_dict(model)))


def mixture_from_dict(doc: dict) -> MixtureModel:
    """Build a mixture, renormalizing weights; negative weights are rejected."""
    try:
        comps = []
        for c in doc["components"]:
            w = float(c["weight"])
            if w < 0 or not math.isfinite(w):
                raise ModelFileError(f"invalid component weight {w}")
            comps.append(
                MixtureComponent(
                    UsageType.from_code(c["usage"]),
                    VmfParams(normalize(c["mu"]), float(c["kappa"])),
                    w,
                    int(c.get("n_samples", 0)),
                )
            )
        return MixtureModel(tuple(comps))
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(str(exc)) from exc


def read_mixture(path) -> MixtureModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    return mixture_from_dict(doc)


# --- CSV exports -------------------------------------------------------------

def write_orientations(path, oset: OrientationSet) -> Path:
    return atomic_write(path, csv_text(("x", "y", "z"), oset.vectors))


def read_orientations(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data.reshape(-1, 3)


def write_qq(path, series: QQSeries) -> Path:
    rows = zip(series.taus, series.empirical, series.reference)
    return atomic_write(path, csv_text(("tau", "empirical", "reference"), rows))


def write_grid(path, grid: DensityGrid) -> Path:
    header = ("phi_deg", "theta_deg", "mollweide_x", "mollweide_y", "density")
    return atomic_write(path, csv_text(header, grid.rows()))


def write_summary(path, rows: Sequence[SummaryRow]) -> Path:
    body = ((r.usage, r.phi_deg, r.theta_deg, r.kappa, r.inv_kappa) for r in rows)
    return atomic_write(path, csv_text(("usage", "phi_deg", "theta_deg", "kappa", "inv_kappa"), body))


def write_samples(path, labels: Sequence[UsageType], vectors: np.ndarray) -> Path:
    body = ((str(u), *v) for u, v in zip(labels, vectors))
    return atomic_write(path, csv_text(("usage", "x", "y", "z"), body))
