import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftsim.errors import InputError
from liftsim.poly import AffineExpression, Monomial, ParametricPolynomial, Polynomial


def poly_from_dense(arity, entries):
    """entries: list of (coeff, dense exponent tuple)."""
    return Polynomial(
        arity, {Monomial.from_exponents(e): c for c, e in entries}
    )


def duffing_second_component():
    # xdot + 0.1*(2x - 2x^3 - 0.5 xdot + u) over variables (x, xdot, u)
    return poly_from_dense(
        3,
        [
            (0.2, (1, 0, 0)),
            (-0.2, (3, 0, 0)),
            (0.95, (0, 1, 0)),
            (0.1, (0, 0, 1)),
        ],
    )


class TestEvaluate:
    def test_square(self):
        p = poly_from_dense(1, [(1.0, (2,))])
        assert p.evaluate([2.0]) == 4.0

    def test_zero_polynomial(self):
        assert Polynomial.zero(3).evaluate([1.0, -2.0, 7.5]) == 0.0

    def test_duffing_equilibrium(self):
        # second Euler component at (x, xdot, u) = (1, 0, 0) vanishes
        assert duffing_second_component().evaluate([1.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-15)

    def test_arity_mismatch(self):
        p = poly_from_dense(2, [(1.0, (1, 1))])
        with pytest.raises(InputError):
            p.evaluate([1.0])


class TestCompose:
    def test_binomial_expansion(self):
        p = poly_from_dense(1, [(1.0, (2,))])  # x^2
        s = poly_from_dense(2, [(1.0, (1, 0)), (1.0, (0, 1))])  # x + y
        expected = poly_from_dense(2, [(1.0, (2, 0)), (2.0, (1, 1)), (1.0, (0, 2))])
        assert p.compose([s]) == expected

    def test_square_of_duffing_first_component(self):
        # third component of the quadratic lifting applied to x + 0.1*xdot;
        # 0.1 is not dyadic, so compare coefficients with tolerance
        p = poly_from_dense(1, [(1.0, (2,))])
        f1 = poly_from_dense(2, [(1.0, (1, 0)), (0.1, (0, 1))])
        expected = poly_from_dense(
            2, [(1.0, (2, 0)), (0.2, (1, 1)), (0.01, (0, 2))]
        )
        got = p.compose([f1])
        assert set(got.terms) == set(expected.terms)
        for mon, c in expected.terms.items():
            assert got.terms[mon] == pytest.approx(c, rel=1e-12)

    def test_identity_substitution(self):
        p = duffing_second_component()
        assert p.compose(Polynomial.variables(3)) == p

    def test_arity_mismatch(self):
        p = poly_from_dense(2, [(1.0, (1, 1))])
        with pytest.raises(InputError):
            p.compose([Polynomial.variable(1, 0)])


class TestArith:
    def test_add_cancels(self):
        x = Polynomial.variable(1, 0)
        one = Polynomial.constant(1, 1.0)
        assert (x + one) + (x - one) == x.scale(2.0)

    def test_difference_of_squares(self):
        x = Polynomial.variable(1, 0)
        one = Polynomial.constant(1, 1.0)
        assert (x + one) * (x - one) == x * x - one

    def test_scale_to_zero(self):
        p = poly_from_dense(1, [(1.0, (2,))])
        assert p.scale(0.0) == Polynomial.zero(1)
        assert p.scale(0.0).degree == -1

    def test_mul_arity_mismatch(self):
        with pytest.raises(InputError):
            Polynomial.variable(1, 0) * Polynomial.variable(2, 0)


class TestParametric:
    def test_collect_merges_decisions(self):
        x = Polynomial.variable(1, 0)
        p = ParametricPolynomial.scaled_decision(AffineExpression.var("a"), x) + \
            ParametricPolynomial.scaled_decision(AffineExpression.var("b"), x)
        collected = p.collect()
        assert len(collected) == 1
        mon, expr = collected[0]
        assert mon == Monomial.from_exponents((1,))
        assert expr == AffineExpression.of(0.0, {"a": 1.0, "b": 1.0})

    def test_collect_separates_monomials(self):
        x2 = poly_from_dense(1, [(1.0, (2,))])
        p = ParametricPolynomial.scaled_decision(AffineExpression.var("a"), x2) + \
            Polynomial.constant(1, 3.0)
        entries = {m: e for m, e in p.collect()}
        assert entries[Monomial.from_exponents((2,))] == AffineExpression.var("a")
        assert entries[Monomial()] == AffineExpression.constant(3.0)

    def test_substitute_then_evaluate(self):
        x = Polynomial.variable(1, 0)
        p = ParametricPolynomial.scaled_decision(AffineExpression.var("a"), x) + \
            ParametricPolynomial.scaled_decision(AffineExpression.var("b"), x)
        assert p.substitute({"a": 1.0, "b": 2.0}).evaluate([1.0]) == 3.0

    def test_collect_is_canonical(self):
        x = Polynomial.variable(2, 0)
        y = Polynomial.variable(2, 1)
        a = AffineExpression.var("a")
        p = ParametricPolynomial.scaled_decision(a, x * y) + y - y + \
            ParametricPolynomial.scaled_decision(a.scale(-1.0), x * y)
        # fully cancelled: canonical form is empty
        assert p == ParametricPolynomial.zero(2)

    def test_compose_matches_numeric(self):
        x2 = poly_from_dense(1, [(1.0, (2,))])
        p = ParametricPolynomial.scaled_decision(AffineExpression.var("a"), x2)
        sub = poly_from_dense(2, [(1.0, (1, 0)), (0.1, (0, 1))])
        composed = p.compose([sub]).substitute({"a": 2.0})
        assert composed == x2.compose([sub]).scale(2.0)


# -- randomized invariants -------------------------------------------------

coeffs = st.integers(min_value=-5, max_value=5)


@st.composite
def polynomials(draw, arity=2, max_degree=3, max_terms=5):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n):
        exps = tuple(draw(st.integers(0, max_degree)) for _ in range(arity))
        if sum(exps) > max_degree:
            continue
        terms[Monomial.from_exponents(exps)] = float(draw(coeffs))
    return Polynomial(arity, terms)


points = st.lists(
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False), min_size=2, max_size=2
)


def rel_close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@settings(max_examples=150, deadline=None)
@given(polynomials(), polynomials(), points)
def test_eval_is_additive_and_multiplicative(p, q, v):
    assert rel_close((p + q).evaluate(v), p.evaluate(v) + q.evaluate(v))
    assert rel_close((p * q).evaluate(v), p.evaluate(v) * q.evaluate(v))


@settings(max_examples=100, deadline=None)
@given(polynomials(), polynomials(arity=2, max_degree=2), polynomials(arity=2, max_degree=2), points)
def test_compose_commutes_with_eval(p, s0, s1, v):
    composed = p.compose([s0, s1])
    direct = p.evaluate([s0.evaluate(v), s1.evaluate(v)])
    assert rel_close(composed.evaluate(v), direct)


@settings(max_examples=60, deadline=None)
@given(polynomials())
def test_grlex_terms_sorted(p):
    keys = [m.grlex_key(p.arity) for m, _ in p.sorted_terms()]
    assert keys == sorted(keys)


def test_pow_matches_repeated_mul():
    p = poly_from_dense(2, [(1.0, (1, 0)), (-2.0, (0, 1)), (1.0, (0, 0))])
    assert p ** 3 == p * p * p
    assert p ** 0 == Polynomial.constant(2, 1.0)
