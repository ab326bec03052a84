"""Run the full CLI pipeline on a synthetic log drawn from the reference fits.

Each usage type gets ``scale * N_s`` clean readings plus a few gross
outliers and a duplicate block, so filtering, fitting, sampling and
reporting are all exercised. Recovered parameters are printed against the
generating ones.

    python3 scripts/simulate_pipeline.py --out out/sim --scale 0.25 --seed 0
"""
import argparse
import json
from pathlib import Path

import numpy as np

from vmforient.cli import main as cli
from vmforient.geometry import angle_between
from vmforient.ingestion import UsageType
from vmforient.reference_models import REFERENCE_FITS, reference_params
from vmforient.synthetic import SyntheticSpec, synthesize, to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/sim"))
    ap.add_argument("--scale", type=float, default=0.25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", default="180x90")
    args = ap.parse_args()

    specs = [
        SyntheticSpec(
            UsageType.from_code(r.usage),
            reference_params(r.usage),
            max(2, int(r.n_samples * args.scale)),
            n_outliers=10,
            duplicate_block=5,
        )
        for r in REFERENCE_FITS
    ]
    args.out.mkdir(parents=True, exist_ok=True)
    log = args.out / "synthetic_log.csv"
    log.write_text(to_csv(synthesize(specs, rng=args.seed)))

    common = ["--out", str(args.out), "--seed", str(args.seed)]
    for step in (
        ["ingest", "--input", str(log)],
        ["fit"],
        ["sample", "-n", "10000"],
        ["report", "--grid", args.grid],
    ):
        code = cli(step + common)
        if code:
            raise SystemExit(f"{step[0]} failed with exit code {code}")

    print(f"{'usage':>5} {'kappa':>7} {'fitted':>7} {'mu err deg':>10}")
    for r in REFERENCE_FITS:
        doc = json.loads((args.out / "models" / f"vmf_{r.usage}.json").read_text())
        truth = reference_params(r.usage)
        err = float(np.degrees(angle_between(np.array(doc["mu"]), truth.mu)))
        print(f"{r.usage:>5} {truth.kappa:7.3f} {doc['kappa']:7.3f} {err:10.3f}")
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
