import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shapebern.certify import HYPOTHESIS_TARGETS, HypothesisId, ShapeQuery, certify_shape, check_hypothesis
from shapebern.corrections import EnvelopeKind, envelope_poly
from shapebern.exact import DomainError, TiePolicy
from shapebern.operators import CLASSICAL, FLOOR_INT, apply_grid, nearest_int
from shapebern.search import (
    COUNTEREXAMPLE_6,
    ExampleMismatch,
    SampleMode,
    SearchConfig,
    find_counterexample,
    random_shaped_samples,
    samples_satisfying,
    trial_rng,
    verify_paper_examples,
)

QUERIES = list(ShapeQuery)


def grid_shape_holds(values, q):
    if q.order == 1:
        d = [b - a for a, b in zip(values, values[1:])]
    else:
        d = [values[k + 2] - 2 * values[k + 1] + values[k] for k in range(len(values) - 2)]
    return all(q.sign * x >= 0 for x in d)


@given(st.integers(2, 25), st.sampled_from(QUERIES), st.integers(1, 80),
       st.integers(0, 2**64 - 1), st.sampled_from(list(SampleMode)))
def test_random_samples_have_shape(n, q, resolution, seed, mode):
    v = random_shaped_samples(n, q, resolution, trial_rng(seed, 0), mode)
    assert len(v) == n + 1
    assert v[0].denominator == 1 and v[-1].denominator == 1
    assert all(x.denominator <= resolution for x in v)
    assert grid_shape_holds(v, q)


def test_samples_are_reproducible():
    a = random_shaped_samples(9, ShapeQuery.CONVEX, 60, trial_rng(42, 7))
    b = random_shaped_samples(9, ShapeQuery.CONVEX, 60, trial_rng(42, 7))
    c = random_shaped_samples(9, ShapeQuery.CONVEX, 60, trial_rng(42, 8))
    assert a == b and a != c


@settings(max_examples=40)
@given(st.sampled_from(list(HypothesisId)), st.integers(3, 20), st.integers(0, 10**6))
def test_generated_samples_satisfy_hypothesis(hid, n, seed):
    v = samples_satisfying(hid, n, random.Random(seed))
    assert check_hypothesis(v, n, hid).holds


def test_seeded_search_returns_counterexample():
    cfg = SearchConfig(6, seed_samples=(COUNTEREXAMPLE_6,), budget=5)
    rep = find_counterexample(cfg)
    assert rep.found and rep.trials_used == 1
    assert rep.int_coeffs == (0, 5, 14, 19, 14, 5, 1)
    assert rep.certificate.refuted and rep.verify()
    p = apply_grid(rep.samples, FLOOR_INT)
    from shapebern.bernstein import derivative, evaluate
    assert evaluate(derivative(p.to_bernstein()), Fraction(7, 10)) == Fraction(-73, 2000)


def test_random_search_is_deterministic():
    a = find_counterexample(SearchConfig(6, budget=2000, seed=11))
    b = find_counterexample(SearchConfig(6, budget=2000, seed=11))
    assert a.found and a.to_json() == b.to_json() and a.verify()


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("op", [FLOOR_INT] + [nearest_int(t) for t in TiePolicy])
@pytest.mark.parametrize("q", [ShapeQuery.MONOTONE_INCREASING, ShapeQuery.MONOTONE_DECREASING])
def test_degrees_one_and_two_never_fail(n, op, q):
    res = find_counterexample(SearchConfig(n, op, q, budget=1500, seed=5))
    assert not res.found
    assert "evidence" in res.to_json()["note"]


def test_config_validation():
    with pytest.raises(DomainError):
        SearchConfig(0)
    with pytest.raises(DomainError):
        SearchConfig(5, budget=0)
    with pytest.raises(DomainError):
        SearchConfig(5, resolution=0)
    with pytest.raises(DomainError):
        SearchConfig(5, operator=CLASSICAL)
    with pytest.raises(DomainError):
        SearchConfig(1, query=ShapeQuery.CONVEX)


def test_verify_examples_report():
    rep = verify_paper_examples()
    assert rep.passed
    names = [c.name for c in rep.checks]
    assert names == ["counterexample-n6", "power-shifted", "sqrt"]
    assert rep.to_json()["checks"][0]["derivative_at_7/10"] == "-73/2000"


def test_mismatch_names_example(monkeypatch):
    import shapebern.search as s

    monkeypatch.setattr(s, "COUNTEREXAMPLE_6_COEFFS", (0, 5, 14, 19, 14, 5, 2))
    with pytest.raises(ExampleMismatch) as info:
        s.verify_paper_examples()
    assert info.value.example == "counterexample-n6"
    assert not s.verify_paper_examples(strict=False).passed


def test_nearest_rounding_escapes_convex_envelope():
    # the convexity envelope bounds the floor losses only; for nearest
    # rounding a convex grid can still give a non-convex corrected output
    found = None
    for trial in range(400):
        v = random_shaped_samples(10, ShapeQuery.CONVEX, 60, trial_rng(3, trial))
        p = apply_grid(v, nearest_int()).to_bernstein() + envelope_poly(EnvelopeKind.EPSILON_CONVEX, 10)
        if certify_shape(p, ShapeQuery.CONVEX).refuted:
            found = v
            break
    assert found is not None
    p = apply_grid(found, FLOOR_INT).to_bernstein() + envelope_poly(EnvelopeKind.EPSILON_CONVEX, 10)
    assert certify_shape(p, ShapeQuery.CONVEX).certified
