from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shapebern.bernstein import BernsteinPoly, evaluate, to_power_basis
from shapebern.exact import DomainError, Enclosure, TiePolicy, binomial
from shapebern.operators import (
    CLASSICAL,
    FLOOR_INT,
    INTEGER_OPERATORS,
    Builtin,
    GridSamples,
    PreconditionError,
    RoundingUndecidable,
    apply,
    apply_grid,
    control_values,
    entropy_function,
    linear,
    load_samples,
    nearest_int,
    parse_function_spec,
    parse_operator,
    polynomial,
    sqrt_function,
    sup_deviation,
)

GRID6 = [Fraction(v, 60) for v in (0, 50, 56, 57, 58, 59, 60)]


def test_floor_counterexample_coefficients():
    p = apply_grid(GRID6, FLOOR_INT)
    assert p.int_coeffs == (0, 5, 14, 19, 14, 5, 1)
    assert control_values(p) == [0, Fraction(5, 6), Fraction(14, 15), Fraction(19, 20),
                                 Fraction(14, 15), Fraction(5, 6), 1]


def test_sqrt_nearest_small():
    assert apply(sqrt_function(), 4, nearest_int()).int_coeffs == (0, 2, 4, 3, 1)
    assert apply(sqrt_function(), 4, FLOOR_INT).int_coeffs == (0, 2, 4, 3, 1)


@pytest.mark.parametrize("n", [1, 2, 5, 13, 40])
def test_integer_operators_reproduce_identity(n):
    for kind in INTEGER_OPERATORS:
        p = apply(linear(1, 0), n, kind)
        assert to_power_basis(p)[:2] == [0, 1]
        assert not any(to_power_basis(p)[2:])


def test_classical_operator_on_square():
    n = 7
    p = apply(polynomial([0, 0, 1]), n, CLASSICAL)
    for j in range(8):
        x = Fraction(j, 7)
        assert evaluate(p, x) == x * x + x * (1 - x) / n


grids = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=97), min_size=n - 1, max_size=n - 1),
        st.integers(-3, 3),
        st.integers(-3, 3),
    )
)


@given(grids)
def test_rounding_error_bounds(g):
    n, inner, a, b = g
    values = [Fraction(a)] + inner + [Fraction(b)]
    fl = control_values(apply_grid(values, FLOOR_INT))
    for k, (v, c) in enumerate(zip(values, fl)):
        assert 0 <= v - c < Fraction(1, binomial(n, k))
    for tie in TiePolicy:
        nr = control_values(apply_grid(values, nearest_int(tie)))
        for k, (v, c) in enumerate(zip(values, nr)):
            assert abs(v - c) <= Fraction(1, 2 * binomial(n, k))
    assert fl[0] == a and fl[-1] == b


def test_non_integer_endpoint_rejected():
    with pytest.raises(PreconditionError):
        apply_grid([Fraction(1, 2), 1], FLOOR_INT)
    with pytest.raises(PreconditionError):
        apply(linear(1, Fraction(1, 3)), 3, FLOOR_INT)
    # the classical operator has no such requirement
    apply(linear(1, Fraction(1, 3)), 3, CLASSICAL)


def test_grid_length_mismatch():
    with pytest.raises(DomainError):
        apply(GridSamples(GRID6), 5, FLOOR_INT)
    with pytest.raises(DomainError):
        GridSamples([1])


def test_entropy_operator_runs():
    p = apply(entropy_function(), 10, FLOOR_INT)
    assert p.int_coeffs[0] == 0 and p.int_coeffs[-1] == 0
    assert all(c < 0 for c in p.int_coeffs[1:-1])


def test_undecidable_rounding_is_reported():
    # an evaluator that can never separate f(1/2) from the integer threshold
    def enclose(x, bits):
        if x in (0, 1):
            return Fraction(x)
        w = Fraction(1, 2**bits)
        return Enclosure(Fraction(1, 2) - w, Fraction(1, 2) + w, bits)

    f = Builtin("stuck", enclose, lambda x: x)
    with pytest.raises(RoundingUndecidable) as info:
        apply(f, 2, FLOOR_INT)
    assert info.value.k == 1


@pytest.mark.parametrize(
    "spec, name",
    [("sqrt", "sqrt"), ("(x+1)^5", "(x+1)^5"), ("entropy", "entropy"), ("linear:2,1", "linear:2,1"),
     ("poly:0,0,1", "poly:0,0,1")],
)
def test_parse_function_spec(spec, name):
    assert parse_function_spec(spec).name == name


def test_parse_function_spec_errors(tmp_path):
    for bad in ("cos", "linear:1", "poly:"):
        with pytest.raises(ValueError):
            parse_function_spec(bad)
    path = tmp_path / "s.json"
    path.write_text('{"n": 6, "values": ["0", "1"]}')
    with pytest.raises(DomainError):
        load_samples(path)


def test_samples_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text('{"n": 6, "values": ["0", "50/60", "56/60", "57/60", "58/60", "59/60", "1"]}')
    g = parse_function_spec("@" + str(path))
    assert g.values == tuple(GRID6)


def test_parse_operator():
    assert parse_operator("floor") == FLOOR_INT
    assert parse_operator("nearest", "half-even") == nearest_int(TiePolicy.HALF_EVEN)
    assert str(parse_operator("nearest")) == "nearest(half-up)"
    with pytest.raises(ValueError):
        parse_operator("ceil")


def test_sup_deviation_decreases_for_sqrt():
    f = sqrt_function()
    d10 = sup_deviation(f, apply(f, 10, FLOOR_INT))
    d100 = sup_deviation(f, apply(f, 100, FLOOR_INT))
    assert d100 < d10
    assert sup_deviation(linear(1, 0), apply(linear(1, 0), 9, FLOOR_INT)) == 0
