"""Acceptance criteria, one test per criterion (criterion 4 in three parts).

Each test prints a single ``[ACCEPTANCE] <id> PASS|FAIL`` line with the
measured figure next to its tolerance, then asserts.
"""
import json
import math

import numpy as np
import pytest

from vmforient.cli import main
from vmforient.diagnostics import default_taus, qq_series
from vmforient.geometry import angle_between, normalize, sphere_quadrature, to_spherical
from vmforient.ingestion import UsageType, ingest, parse_log
from vmforient.mixture import heuristic_weights, mixture_pdf, sample_mixture, build_mixture
from vmforient.reference_models import REFERENCE_FITS, reference_fits, reference_params
from vmforient.report import usage_to_test_conditions
from vmforient.synthetic import SyntheticSpec, synthesize, to_csv
from vmforient.vmf import VmfParams, bessel_ratio_a3, fit_vmf, invert_a3, newton_a3, sample_vmf, vmf_pdf

U = UsageType.from_code


@pytest.fixture
def verdict(capsys):
    def report(criterion: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[ACCEPTANCE] {criterion} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, f"{criterion}: {detail}"

    return report


def test_weight_reproduction(verdict):
    counts = {U(r.usage): r.n_samples for r in REFERENCE_FITS}
    w = heuristic_weights(counts)
    err = max(abs(w[U(r.usage)] - r.weight) for r in REFERENCE_FITS)
    verdict("1 weight reproduction", err <= 1e-3, f"max |pi - table| = {err:.2e} (tol 1e-3)")


def test_angle_reproduction(verdict):
    errs = {}
    for r in REFERENCE_FITS:
        phi, theta = to_spherical(normalize(np.array(r.mu)))
        errs[r.usage] = max(abs(phi - r.phi_deg), abs(theta - r.theta_deg))
    worst = max(errs.values())
    ok = worst <= 1.0 and errs["0000"] <= 0.3
    verdict("2 angle reproduction", ok, f"max angle error {worst:.3f} deg (tol 1.0), row 0000 {errs['0000']:.3f} deg (tol 0.3)")


def test_fit_recovery(verdict):
    worst_k, worst_a = 0.0, 0.0
    for i, r in enumerate(REFERENCE_FITS):
        truth = reference_params(r.usage)
        fit = fit_vmf(sample_vmf(truth, 50_000, np.random.default_rng(1000 + i))).params
        worst_k = max(worst_k, abs(fit.kappa - truth.kappa) / truth.kappa)
        worst_a = max(worst_a, float(np.degrees(angle_between(fit.mu, truth.mu))))
    ok = worst_k < 0.03 and worst_a < 1.0
    verdict("3 fit recovery", ok, f"max kappa rel err {worst_k:.4f} (tol 0.03), max mu error {worst_a:.3f} deg (tol 1)")


def test_estimator_identity(verdict):
    kappas = np.geomspace(1e-3, 500, 400)
    err = max(abs(invert_a3(bessel_ratio_a3(k)) - k) / k for k in kappas)
    verdict("4a invert_a3(A3(k)) = k", err <= 1e-9, f"max rel err {err:.2e} on [1e-3, 500] (tol 1e-9)")


def test_estimator_newton_iterations(verdict):
    rbars = np.linspace(0.01, 0.99, 99)
    iters = {float(r): newton_a3(float(r))[1] for r in rbars}
    worst = max(iters, key=iters.get)
    verdict(
        "4b Newton iterations",
        iters[worst] <= 6,
        f"max {iters[worst]} iterations at rbar={worst:.2f} from the (1-R) start (limit 6)",
    )


def test_estimator_two_step(verdict):
    rbars = np.linspace(0.1, 0.9, 81)
    errs = {}
    for r in rbars:
        exact = invert_a3(float(r))
        errs[float(r)] = abs(newton_a3(float(r), steps=2)[0] - exact) / exact
    worst = max(errs, key=errs.get)
    verdict(
        "4c two-step Newton",
        errs[worst] <= 1e-6,
        f"max rel err {errs[worst]:.2e} at rbar={worst:.2f} (tol 1e-6)",
    )


def test_normalization(verdict):
    pts, w = sphere_quadrature(720, 360)
    mu = normalize(np.array([0.3, -0.5, 0.8]))
    errs = {f"kappa={k}": abs(float(w @ vmf_pdf(pts, VmfParams(mu, k))) - 1.0) for k in (0, 0.5, 1, 3.23, 10, 100)}
    errs["table mixture"] = abs(float(w @ mixture_pdf(pts, build_mixture(reference_fits()))) - 1.0)
    worst = max(errs, key=errs.get)
    verdict("5 normalization", errs[worst] <= 1e-6, f"worst |integral - 1| = {errs[worst]:.2e} ({worst}, tol 1e-6)")


def test_qq_straightness(verdict):
    n = 100_000
    data = sample_vmf(reference_params("0000"), n, np.random.default_rng(41))
    fitted = fit_vmf(data).params
    dev = qq_series(data, fitted, default_taus()).max_deviation
    wrong = qq_series(data, VmfParams(fitted.mu, fitted.kappa * 10), default_taus()).max_deviation
    bound = 4 / math.sqrt(n)
    ok = dev < bound and wrong > 0.1
    verdict("6 Q-Q straightness", ok, f"max dev {dev:.5f} (tol {bound:.5f}); 10x kappa mismatch {wrong:.3f} (> 0.1)")


def test_composition_sampling(verdict):
    n = 100_000
    model = build_mixture(reference_fits())
    labels, _ = sample_mixture(model, n, np.random.default_rng(7))
    codes = np.array([str(u) for u in labels])
    z = max(
        abs(np.mean(codes == str(c.usage)) - c.weight) / math.sqrt(c.weight * (1 - c.weight) / n)
        for c in model.components
    )
    uniform = sample_vmf(VmfParams(np.array([0.0, 0.0, 1.0]), 0.0), n, np.random.default_rng(8))
    rbar = float(np.linalg.norm(uniform.mean(axis=0)))
    ok = z <= 3 and rbar < 0.01
    verdict("7 composition sampling", ok, f"max label z-score {z:.2f} (limit 3); uniform rbar {rbar:.4f} (< 0.01)")


def _fixture_log(path):
    specs = [
        SyntheticSpec(U("0000"), reference_params("0000"), 500, n_outliers=12, duplicate_block=30),
        SyntheticSpec(U("0100"), reference_params("0100"), 300, n_outliers=5),
        SyntheticSpec(U("1010"), reference_params("1010"), 200, duplicate_block=9),
    ]
    path.write_text(to_csv(synthesize(specs, rng=2024)))
    return path


def test_pipeline_determinism_and_filtering(verdict, tmp_path):
    log = _fixture_log(tmp_path / "log.csv")
    sets = ingest(parse_log(log.read_text()).samples)
    counts = {str(u): (s.n_raw, s.n_after_iqr, s.n_after_dedup) for u, s in sets.items()}
    expected = {"0000": (542, 530, 500), "0100": (305, 300, 300), "1010": (209, 209, 200)}

    outputs = []
    for d in ("a", "b"):
        out = tmp_path / d
        codes = [
            main(["ingest", "--input", str(log), "--out", str(out), "--seed", "5"]),
            main(["fit", "--out", str(out), "--seed", "5"]),
            main(["sample", "--out", str(out), "--seed", "5", "-n", "1000"]),
            main(["report", "--out", str(out), "--seed", "5", "--grid", "36x18"]),
        ]
        files = {}
        for p in sorted(out.rglob("*")):
            if p.is_file():
                body = p.read_bytes()
                if p.name.startswith("manifest_"):
                    doc = json.loads(body)
                    doc["config"].pop("out")
                    body = json.dumps(doc, sort_keys=True).encode()
                files[str(p.relative_to(out))] = body
        outputs.append((codes, files))
    identical = outputs[0] == outputs[1] and outputs[0][0] == [0, 0, 0, 0]
    ok = counts == expected and identical
    verdict(
        "8 pipeline determinism and filtering",
        ok,
        f"counts (raw, after IQR, after dedup) {counts}; {len(outputs[0][1])} output files byte-identical: {identical}",
    )


def test_test_condition_mapping(verdict):
    table = {
        "0000": [1], "0001": [10], "0010": [5, 9], "0100": [3],
        "1000": [5, 9], "1010": [1, 5, 9], "1100": [5, 9],
    }
    mapped = all(usage_to_test_conditions(U(c)) == v for c, v in table.items())
    unmapped = [f"{i:04b}" for i in range(16) if f"{i:04b}" not in table]
    empty = all(usage_to_test_conditions(U(c)) == [] for c in unmapped)
    verdict("9 test-condition mapping", mapped and empty, f"7 mapped rows match: {mapped}; {len(unmapped)} unmapped empty: {empty}")
