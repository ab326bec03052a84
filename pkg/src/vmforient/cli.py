"""Command-line driver: ingest -> fit -> sample / qq / grid / report.

Exit codes: 0 success, 2 input or I/O error, 3 empty or degenerate data.
Each command writes ``manifest_<command>.json`` into the output directory,
echoing the resolved configuration and listing what was written.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import formats
from .config import PipelineConfig
from .diagnostics import qq_series
from .geometry import DomainError
from .ingestion import LogFormatError, UsageType, ingest, parse_log
from .mixture import build_mixture, sample_mixture
from .reference_models import TEST_CONDITIONS
from .report import density_grid, phi_theta_summary, usage_to_test_conditions
from .vmf import DegenerateDataError, fit_vmf

log = logging.getLogger("vmforient")

EXIT_OK = 0
EXIT_IO = 2
EXIT_EMPTY = 3


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _usage_rng(seed: int, code: str) -> np.random.Generator:
    # one stream per usage type, independent of processing order
    return np.random.default_rng([seed, int(code, 2)])


def _write_manifest(cfg: PipelineConfig, command: str, outputs, **extra) -> None:
    out = cfg.out_dir
    doc = {
        "command": command,
        "config": cfg.to_dict(),
        "outputs": sorted(str(Path(p).relative_to(out)) for p in outputs),
        **extra,
    }
    formats.atomic_write(out / f"manifest_{command}.json", formats.dump_json(doc))


def _models_dir(cfg: PipelineConfig) -> Path:
    return Path(cfg.inputs[0]) if cfg.inputs else cfg.out_dir / "models"


def _orientations_dir(cfg: PipelineConfig) -> Path:
    return Path(cfg.orientations) if cfg.orientations else cfg.out_dir / "orientations"


def _load_fits(models: Path):
    if not models.is_dir():
        raise CommandError(f"model directory {models} not found", EXIT_IO)
    fits = []
    for path in sorted(models.glob("vmf_*.json")):
        try:
            usage, params, doc = formats.read_fit(path)
        except (formats.ModelFileError, OSError) as exc:
            raise CommandError(str(exc), EXIT_IO) from exc
        fits.append((usage, params, int(doc.get("n_samples", 0))))
    if not fits:
        raise CommandError(f"no fitted models in {models}", EXIT_EMPTY)
    return fits


def cmd_ingest(cfg: PipelineConfig) -> int:
    if not cfg.inputs:
        raise CommandError("ingest needs --input", EXIT_IO)
    samples, rejects = [], []
    for path in cfg.inputs:
        try:
            with open(path, "rb") as fh:
                parsed = parse_log(fh)
        except OSError as exc:
            raise CommandError(f"cannot read {path}: {exc}", EXIT_IO) from exc
        except (LogFormatError, UnicodeDecodeError) as exc:
            raise CommandError(f"{path}: {exc}", EXIT_IO) from exc
        samples.extend(parsed.samples)
        rejects.extend((path, r.line, r.reason) for r in parsed.rejects)

    sets = ingest(samples)
    out = cfg.out_dir
    written = []
    report = {}
    for usage, oset in sets.items():
        report[usage.code] = {
            "n_raw": oset.n_raw,
            "n_after_iqr": oset.n_after_iqr,
            "n_after_dedup": oset.n_after_dedup,
        }
        if len(oset) == 1:
            log.warning("usage %s: only one sample survives filtering", usage)
        if len(oset):
            written.append(formats.write_orientations(out / "orientations" / f"orient_{usage}.csv", oset))
    written.append(formats.atomic_write(out / "ingest_report.json", formats.dump_json(report)))
    written.append(
        formats.atomic_write(
            out / "rejects.csv",
            formats.csv_text(("file", "line", "reason"), ((p, str(n), r) for p, n, r in rejects)),
        )
    )
    _write_manifest(cfg, "ingest", written)
    if not any(len(s) for s in sets.values()):
        raise CommandError("no samples left after filtering", EXIT_EMPTY)
    return EXIT_OK


def cmd_fit(cfg: PipelineConfig) -> int:
    src = Path(cfg.inputs[0]) if cfg.inputs else _orientations_dir(cfg)
    if not src.is_dir():
        raise CommandError(f"orientation directory {src} not found", EXIT_IO)
    paths = sorted(src.glob("orient_*.csv"))
    out = cfg.out_dir / "models"
    written, skipped, fits = [], {}, []
    for path in paths:
        usage = UsageType.from_code(path.stem.split("_", 1)[1])
        try:
            vectors = formats.read_orientations(path)
        except (OSError, ValueError) as exc:
            raise CommandError(f"cannot read {path}: {exc}", EXIT_IO) from exc
        try:
            fit = fit_vmf(vectors, two_step=cfg.paper_compat)
        except (DegenerateDataError, DomainError) as exc:
            log.warning("usage %s skipped: %s", usage, exc)
            skipped[usage.code] = str(exc)
            continue
        written.append(formats.write_fit(out / f"vmf_{usage}.json", usage, fit))
        fits.append((usage, fit.params, fit.n))

    if fits:
        subset = cfg.subset_types
        if subset is not None and not any(u in subset for u, _, _ in fits):
            log.warning("subset selects no fitted type; mixture uses all fits")
            subset = None
        written.append(formats.write_mixture(out / "mixture.json", build_mixture(fits, subset)))
    _write_manifest(cfg, "fit", written, skipped=skipped)
    if not fits:
        raise CommandError("no usage type could be fitted", EXIT_EMPTY)
    return EXIT_OK


def cmd_sample(cfg: PipelineConfig) -> int:
    path = Path(cfg.inputs[0]) if cfg.inputs else cfg.out_dir / "models" / "mixture.json"
    try:
        model = formats.read_mixture(path)
    except (OSError, formats.ModelFileError, DomainError) as exc:
        raise CommandError(f"invalid mixture file {path}: {exc}", EXIT_IO) from exc
    labels, vectors = sample_mixture(model, cfg.n_samples, np.random.default_rng(cfg.seed))
    written = [formats.write_samples(cfg.out_dir / "samples.csv", labels, vectors)]
    _write_manifest(cfg, "sample", written)
    return EXIT_OK


def _qq_outputs(cfg: PipelineConfig, fits) -> tuple[list, dict]:
    orient = _orientations_dir(cfg)
    taus = cfg.tau_grid
    mode = "simulated" if cfg.paper_compat else "closed_form"
    written, missing = [], {}
    for usage, params, _ in fits:
        path = orient / f"orient_{usage}.csv"
        if not path.exists():
            missing[usage.code] = f"no orientation data at {path}"
            continue
        vectors = formats.read_orientations(path)
        try:
            series = qq_series(vectors, params, taus, reference=mode, rng=_usage_rng(cfg.seed, usage.code))
        except DomainError as exc:
            missing[usage.code] = str(exc)
            continue
        written.append(formats.write_qq(cfg.out_dir / "qq" / f"qq_{usage}.csv", series))
    return written, missing


def _grid_outputs(cfg: PipelineConfig, fits) -> list:
    n_phi, n_theta = cfg.grid_shape
    grids = cfg.out_dir / "grids"
    written = [
        formats.write_grid(grids / f"grid_{usage}.csv", density_grid(params, n_phi, n_theta))
        for usage, params, _ in fits
    ]
    try:
        mixture = build_mixture(fits, cfg.subset_types)
    except DomainError as exc:
        raise CommandError(str(exc), EXIT_EMPTY) from exc
    written.append(formats.write_grid(grids / "grid_mixture.csv", density_grid(mixture, n_phi, n_theta)))
    return written


def cmd_qq(cfg: PipelineConfig) -> int:
    fits = _load_fits(_models_dir(cfg))
    written, missing = _qq_outputs(cfg, fits)
    _write_manifest(cfg, "qq", written, partial=bool(missing), missing=missing)
    if not written:
        raise CommandError("no Q-Q series could be computed", EXIT_EMPTY)
    return EXIT_OK


def cmd_grid(cfg: PipelineConfig) -> int:
    fits = _load_fits(_models_dir(cfg))
    _write_manifest(cfg, "grid", _grid_outputs(cfg, fits))
    return EXIT_OK


def cmd_report(cfg: PipelineConfig) -> int:
    fits = _load_fits(_models_dir(cfg))
    written, missing = _qq_outputs(cfg, fits)
    written += _grid_outputs(cfg, fits)
    rows = phi_theta_summary((u, p) for u, p, _ in fits)
    written.append(formats.write_summary(cfg.out_dir / "summary.csv", rows))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("usage", "index", "name", "comment"))
    for usage, _, _ in fits:
        for idx in usage_to_test_conditions(usage):
            cond = TEST_CONDITIONS[idx]
            writer.writerow((usage.code, idx, cond.name, cond.comment))
    written.append(formats.atomic_write(cfg.out_dir / "test_conditions.csv", buf.getvalue()))
    _write_manifest(cfg, "report", written, partial=bool(missing), missing=missing)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "fit": cmd_fit,
    "sample": cmd_sample,
    "qq": cmd_qq,
    "grid": cmd_grid,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vmforient",
        description="Fit and sample von Mises-Fisher models of phone orientation.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--input", nargs="+", dest="inputs")
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        p.add_argument("--subset", help="comma-separated usage codes, e.g. 0000,1000")
        p.add_argument("--taus", help="start:step:stop, e.g. 0.05:0.01:0.95")
        p.add_argument("--grid", help="NPHIxNTHETA, e.g. 360x180")
        p.add_argument("--orientations", help="orientation directory for qq/report")
        p.add_argument("-n", "--n-samples", type=int, dest="n_samples")
        p.add_argument(
            "--paper-compat",
            action="store_true",
            default=None,
            dest="paper_compat",
            help="two-step Newton for kappa and simulated Q-Q reference",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    subset = args.subset.split(",") if args.subset else None
    try:
        cfg = PipelineConfig.load(
            args.config,
            inputs=args.inputs,
            out=args.out,
            seed=args.seed,
            subset=subset,
            taus=args.taus,
            grid=args.grid,
            orientations=args.orientations,
            n_samples=args.n_samples,
            paper_compat=args.paper_compat,
        )
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](cfg)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
