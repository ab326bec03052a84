"""Recompute weights and mode angles from the published reference fits.

Prints, per usage type, the frequency weight derived from the sample counts
and the (phi, theta) of the renormalized mean direction next to the
published values, and writes the reference models as JSON files.

    python3 scripts/reference_tables.py --out out/reference
"""
import argparse
from pathlib import Path

import numpy as np

from vmforient import formats
from vmforient.geometry import normalize, to_spherical
from vmforient.ingestion import UsageType
from vmforient.mixture import build_mixture, heuristic_weights
from vmforient.reference_models import REFERENCE_FITS, reference_fits


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, help="directory for model JSON files")
    args = ap.parse_args()

    weights = heuristic_weights({UsageType.from_code(r.usage): r.n_samples for r in REFERENCE_FITS})
    print(f"{'usage':>5} {'weight':>8} {'table':>7} {'phi':>7} {'table':>7} {'theta':>7} {'table':>7}")
    for r in REFERENCE_FITS:
        phi, theta = to_spherical(normalize(np.array(r.mu)))
        w = weights[UsageType.from_code(r.usage)]
        print(f"{r.usage:>5} {w:8.4f} {r.weight:7.4f} {phi:7.2f} {r.phi_deg:7.2f} {theta:7.2f} {r.theta_deg:7.2f}")

    if args.out:
        mixture = build_mixture(reference_fits())
        formats.write_mixture(args.out / "mixture.json", mixture)
        print(f"wrote {args.out / 'mixture.json'}")


if __name__ == "__main__":
    main()
