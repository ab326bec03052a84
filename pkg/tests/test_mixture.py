import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vmforient.geometry import DomainError, sphere_quadrature
from vmforient.ingestion import UsageType
from vmforient.mixture import (
    MixtureComponent,
    MixtureModel,
    build_mixture,
    heuristic_weights,
    mixture_pdf,
    sample_mixture,
)
from vmforient.reference_models import REFERENCE_FITS, reference_fits
from vmforient.vmf import VmfParams, vmf_pdf
from conftest import random_unit

U = UsageType.from_code
Z = np.array([0.0, 0.0, 1.0])


def table_model(subset=None):
    return build_mixture(reference_fits(), subset)


def test_weights_match_published_column():
    w = heuristic_weights({U(r.usage): r.n_samples for r in REFERENCE_FITS})
    for r in REFERENCE_FITS:
        assert w[U(r.usage)] == pytest.approx(r.weight, abs=1e-3)
    assert w[U("0000")] == pytest.approx(0.5433, abs=1e-4)


def test_weights_single():
    assert heuristic_weights({U("0000"): 10}) == {U("0000"): 1.0}


def test_weights_subset_arithmetic():
    w = heuristic_weights({U("0000"): 47988, U("1000"): 6134})
    assert w[U("0000")] == pytest.approx(0.8866634640257197, rel=1e-14)
    assert w[U("1000")] == pytest.approx(0.11333653597428033, rel=1e-14)


def test_weights_zero_counts():
    with pytest.raises(DomainError):
        heuristic_weights({U("0000"): 0})
    w = heuristic_weights({U("0000"): 3, U("0001"): 0})
    assert w[U("0001")] == 0.0


@given(st.dictionaries(st.sampled_from(UsageType.all()), st.integers(0, 10**6), min_size=1).filter(
    lambda d: sum(d.values()) > 0))
def test_weights_sum_to_one(counts):
    assert math.fsum(heuristic_weights(counts).values()) == pytest.approx(1.0, abs=1e-12)


def test_build_full_model():
    m = table_model()
    assert len(m) == 7
    for c, r in zip(m.components, REFERENCE_FITS):
        assert c.weight == pytest.approx(r.weight, abs=1e-3)


def test_build_subset():
    m = table_model({U("0000"), U("1000")})
    assert [c.usage.code for c in m.components] == ["0000", "1000"]
    np.testing.assert_allclose(m.weights, [0.8866634640257197, 0.11333653597428033], rtol=1e-14)
    single = table_model({U("0000")})
    assert single.weights.tolist() == [1.0]


def test_build_empty_selection():
    with pytest.raises(DomainError):
        table_model({U("1111")})


@given(st.sets(st.sampled_from([U(r.usage) for r in REFERENCE_FITS]), min_size=1))
def test_subset_weights_normalized(subset):
    m = table_model(subset)
    assert math.fsum(m.weights) == pytest.approx(1.0, abs=1e-12)
    assert {c.usage for c in m.components} == subset


def test_model_renormalizes_and_rejects_negative():
    p = VmfParams(Z, 1.0)
    m = MixtureModel((MixtureComponent(U("0000"), p, 2.0, 1), MixtureComponent(U("0001"), p, 6.0, 1)))
    np.testing.assert_allclose(m.weights, [0.25, 0.75])
    with pytest.raises(DomainError):
        MixtureComponent(U("0000"), p, -0.1, 1)
    with pytest.raises(DomainError):
        MixtureModel(())


def test_pdf_single_component(rng):
    p = VmfParams(Z, 2.5)
    m = build_mixture([(U("0100"), p, 5)])
    x = random_unit(rng, 50)
    np.testing.assert_allclose(mixture_pdf(x, m), vmf_pdf(x, p), rtol=1e-15)


def test_pdf_uniform_components(rng):
    m = build_mixture([(U("0000"), VmfParams(Z, 0.0), 1), (U("0001"), VmfParams(-Z, 0.0), 1)])
    np.testing.assert_allclose(mixture_pdf(random_unit(rng, 20), m), 1 / (4 * np.pi), rtol=1e-15)


def test_pdf_term_by_term():
    m = table_model()
    expected = 0.0
    for r in REFERENCE_FITS:
        mu = np.array(r.mu) / np.linalg.norm(r.mu)
        dens = r.kappa / (4 * math.pi * math.sinh(r.kappa)) * math.exp(r.kappa * mu[2])
        expected += r.n_samples / 88328 * dens
    assert mixture_pdf(Z, m) == pytest.approx(expected, abs=1e-12)


def test_pdf_integrates_to_one():
    pts, w = sphere_quadrature(720, 360)
    assert np.sum(w * mixture_pdf(pts, table_model())) == pytest.approx(1.0, abs=1e-6)


def test_pdf_sandwich(rng):
    m = table_model()
    x = random_unit(rng, 200)
    comp = np.array([c.weight * vmf_pdf(x, c.params) for c in m.components])
    single = np.array([vmf_pdf(x, c.params) for c in m.components])
    f = mixture_pdf(x, m)
    assert np.all(f >= comp.min(axis=0))
    assert np.all(f <= single.max(axis=0) * len(m))


def test_sample_single_component():
    m = build_mixture([(U("0010"), VmfParams(Z, 4.0), 9)])
    labels, x = sample_mixture(m, 500, 1)
    assert set(labels) == {U("0010")} and x.shape == (500, 3)


def test_sample_zero():
    labels, x = sample_mixture(table_model(), 0, 1)
    assert labels == [] and x.shape == (0, 3)


def test_sample_label_frequencies():
    m = table_model()
    n = 100_000
    labels, x = sample_mixture(m, n, 2024)
    codes = np.array([u.code for u in labels])
    for c in m.components:
        p = c.weight
        band = 3 * math.sqrt(p * (1 - p) / n)
        assert abs(np.mean(codes == c.usage.code) - p) < band
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0)


def test_sample_deterministic():
    a = sample_mixture(table_model(), 1000, 9)
    b = sample_mixture(table_model(), 1000, 9)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])


def test_sample_vectors_follow_their_label():
    m = table_model()
    labels, x = sample_mixture(m, 20_000, 4)
    codes = np.array([u.code for u in labels])
    for c in m.components:
        sel = x[codes == c.usage.code]
        # mean projection onto the component mean approaches coth k - 1/k
        expected = 1 / math.tanh(c.params.kappa) - 1 / c.params.kappa
        assert np.mean(sel @ c.params.mu) == pytest.approx(expected, abs=6 / math.sqrt(len(sel)))
