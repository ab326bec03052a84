"""Pipeline configuration: a JSON file plus command-line overrides."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .diagnostics import parse_taus
from .ingestion import UsageType


@dataclass
class PipelineConfig:
    inputs: list[str] = field(default_factory=list)
    out: str = "out"
    taus: str = "0.05:0.01:0.95"
    grid: str = "360x180"
    seed: int = 0
    subset: list[str] | None = None
    n_samples: int = 10000
    orientations: str | None = None
    # two-step Newton for kappa and a simulated Q-Q reference
    paper_compat: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.seed is None:
            raise ValueError("a seed is required")
        self.seed = int(self.seed)
        n_phi, n_theta = self.grid_shape
        if n_phi < 2 or n_theta < 2:
            raise ValueError(f"grid resolution must be at least 2x2, got {self.grid}")
        parse_taus(self.taus)
        if self.subset is not None:
            self.subset = [UsageType.from_code(c).code for c in self.subset]
        if self.n_samples < 0:
            raise ValueError("n_samples must be >= 0")

    @property
    def grid_shape(self) -> tuple[int, int]:
        try:
            a, b = self.grid.lower().split("x")
            return int(a), int(b)
        except ValueError:
            raise ValueError(f"grid must look like 360x180, got {self.grid!r}") from None

    @property
    def tau_grid(self):
        return parse_taus(self.taus)

    @property
    def subset_types(self) -> list[UsageType] | None:
        if self.subset is None:
            return None
        return [UsageType.from_code(c) for c in self.subset]

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> PipelineConfig:
        """Read a JSON config (if given) and apply non-None overrides."""
        data: dict = {}
        if path is not None:
            data = json.loads(Path(path).read_text())
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)
