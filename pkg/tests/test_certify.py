from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shapebern.bernstein import (
    BernsteinPoly,
    IntegerBernsteinPoly,
    derivative,
    evaluate,
    from_power_basis,
    second_derivative,
)
from shapebern.certify import (
    HYPOTHESIS_TARGETS,
    Certificate,
    HypothesisId,
    ShapeQuery,
    Status,
    certify_nonnegative,
    certify_shape,
    check_hypothesis,
    coefficient_shape_test,
    hypothesis_margins,
    sign_change_brackets,
)
from shapebern.exact import DomainError, Enclosure
from shapebern.operators import FLOOR_INT, apply, apply_grid, sample, power_shifted, sqrt_function

GRID6 = [Fraction(v, 60) for v in (0, 50, 56, 57, 58, 59, 60)]
COUNTER = IntegerBernsteinPoly([0, 5, 14, 19, 14, 5, 1])
polys = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=20), min_size=2, max_size=8).map(BernsteinPoly)


def test_counterexample_refuted_with_exact_witness():
    cert = certify_shape(COUNTER, ShapeQuery.MONOTONE_INCREASING)
    assert cert.status is Status.REFUTED
    assert cert.witness_value < 0
    assert cert.witness_value == evaluate(derivative(COUNTER.to_bernstein()), cert.witness_x)
    assert (cert.witness_x, cert.witness_value) == (Fraction(3, 4), Fraction(-1, 256))


def test_counterexample_coefficient_test_fails():
    assert not coefficient_shape_test(COUNTER, ShapeQuery.MONOTONE_INCREASING)
    b = COUNTER.to_bernstein().coeffs
    assert b[4] - b[3] == Fraction(-1, 60)


def test_square_needs_subdivision():
    p = from_power_basis([Fraction(1, 4), -1, 1])  # (x - 1/2)^2
    cert = certify_nonnegative(p)
    assert cert.status is Status.CERTIFIED_BY_SUBDIVISION and cert.depth == 1
    assert certify_shape(p, ShapeQuery.CONVEX).status is Status.CERTIFIED_BY_COEFFICIENTS


def test_double_root_hits_depth_cap():
    # (x - 1/3)^2 touches zero at a non-dyadic point: never certifiable
    p = from_power_basis([Fraction(1, 9), Fraction(-2, 3), 1])
    cert = certify_nonnegative(p, depth_cap=12)
    assert cert.status is Status.UNKNOWN and cert.depth_cap == 12


def test_linear_increasing_by_coefficients():
    p = from_power_basis([0, 1], 5)
    assert certify_shape(p, ShapeQuery.MONOTONE_INCREASING).status is Status.CERTIFIED_BY_COEFFICIENTS
    assert certify_shape(p, ShapeQuery.MONOTONE_DECREASING).refuted


def test_decreasing_and_concave_witness_carry_true_sign():
    p = from_power_basis([0, 0, 1], 4)  # x^2
    dec = certify_shape(p, ShapeQuery.MONOTONE_DECREASING)
    assert dec.refuted and dec.witness_value > 0
    cav = certify_shape(p, ShapeQuery.CONCAVE)
    assert cav.refuted and cav.witness_value == 2


@given(polys)
def test_certificates_are_sound(p):
    cert = certify_nonnegative(p, depth_cap=16)
    samples = [evaluate(p, Fraction(j, 64)) for j in range(65)]
    if cert.refuted:
        assert cert.witness_value < 0
        assert cert.witness_value == evaluate(p, cert.witness_x)
    elif cert.certified:
        assert min(samples) >= 0
    if min(samples) < 0:
        assert not cert.certified


def test_sqrt_concavity_refuted_and_inflection_moves_right():
    f = sqrt_function()
    b5 = apply(f, 5, FLOOR_INT)
    b10 = apply(f, 10, FLOOR_INT)
    for p in (b5, b10):
        assert certify_shape(p, ShapeQuery.CONCAVE).refuted
    br5 = sign_change_brackets(second_derivative(b5.to_bernstein()))
    br10 = sign_change_brackets(second_derivative(b10.to_bernstein()))
    assert len(br5) == 1 and len(br10) == 1
    assert br10[0][0] > br5[0][1]
    # the n = 5 inflection is exactly 2/3
    assert br5[0][0] <= Fraction(2, 3) <= br5[0][1]


def test_sign_change_bracket_contains_root():
    p = from_power_basis([Fraction(-1, 3), 1], 3)
    (lo, hi), = sign_change_brackets(p, depth=20)
    assert lo <= Fraction(1, 3) <= hi and hi - lo == Fraction(1, 2**20)


def test_certificate_json_roundtrip():
    for cert in (certify_shape(COUNTER, ShapeQuery.MONOTONE_INCREASING),
                 Certificate(Status.UNKNOWN, ShapeQuery.CONVEX, 7, 7)):
        assert Certificate.from_json(cert.to_json()) == cert


def test_phi_inc_condition_fails_at_k2():
    res = check_hypothesis(GRID6, 6, HypothesisId.PROP_PHI_INC)
    assert not res and res.violation == 2


def test_power_shifted_condition():
    f = power_shifted()
    for n in (5, 10):
        assert check_hypothesis(sample(f, n), n, HypothesisId.THM1M_A)
        assert certify_shape(apply(f, n, FLOOR_INT), ShapeQuery.MONOTONE_INCREASING).certified


def test_margins_shape():
    for hid in HypothesisId:
        q, ops = HYPOTHESIS_TARGETS[hid]
        m = hypothesis_margins(hid, 8)
        assert len(m) == (8 if q.order == 1 else 7)
        for v in m:
            low = v.lower if isinstance(v, Enclosure) else v
            assert low >= 0


def test_entropy_margins_are_enclosures():
    m = hypothesis_margins(HypothesisId.THM1C_A, 6)
    assert all(isinstance(v, Enclosure) and v.lower > 0 for v in m)


def test_check_hypothesis_domain():
    with pytest.raises(DomainError):
        check_hypothesis(GRID6[:-1], 6, "Thm1m_a")
    with pytest.raises(DomainError):
        check_hypothesis([Fraction(1, 2), 1], 1, "Thm1m_a")
    with pytest.raises(ValueError):
        check_hypothesis(GRID6, 6, "NoSuchId")


def test_entropy_margin_is_conservative():
    # a difference exactly at the lower end of the enclosure is not accepted
    m = hypothesis_margins(HypothesisId.THM1C_A, 4)[1]
    values = [Fraction(0), Fraction(0), m.lower, 2 * m.lower, 3 * m.lower]
    shift = (values[-1].__ceil__() - values[-1]) / 4
    values = [v + k * shift for k, v in enumerate(values)]
    assert not check_hypothesis(values, 4, HypothesisId.THM1C_A)
