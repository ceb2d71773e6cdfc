"""Parser, evaluator, exact derivative, and analyticity checks."""

import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holomech.potentials import (
    BUILTIN_SOURCES,
    Call,
    Const,
    Power,
    Product,
    Quotient,
    Z,
    PotentialOverflowError,
    PotentialSyntaxError,
    UnsupportedFunctionError,
    cauchy_riemann_residual,
    compile_potential,
    derivative,
    eval_potential,
    get_builtin,
    make_call,
    make_neg,
    make_power,
    make_product,
    make_quotient,
    make_sum,
    parse_potential,
    split_real_imag,
    to_source,
)


class TestParse:
    def test_iz3_structure(self):
        assert parse_potential("i*z^3") == Product(Const(1j), Power(Z(), 3))

    def test_exp_of_iz(self):
        assert parse_potential("exp(i*z)") == Call("exp", Product(Const(1j), Z()))

    def test_sqrt_rejected(self):
        with pytest.raises(UnsupportedFunctionError):
            parse_potential("sqrt(z)")

    def test_log_rejected(self):
        with pytest.raises(UnsupportedFunctionError):
            parse_potential("log(z)")

    def test_fractional_power_rejected(self):
        with pytest.raises(UnsupportedFunctionError):
            parse_potential("z^1.5")

    def test_negative_power_of_z_rejected(self):
        with pytest.raises(UnsupportedFunctionError):
            parse_potential("z^-2")

    def test_negative_power_of_constant_folds(self):
        assert parse_potential("2^-1") == Const(0.5 + 0j)

    def test_division_by_z_rejected(self):
        with pytest.raises(UnsupportedFunctionError):
            parse_potential("1/z")

    def test_division_by_zero(self):
        with pytest.raises(PotentialSyntaxError):
            parse_potential("z/0")

    def test_division_by_overflowing_constant(self):
        with pytest.raises(PotentialOverflowError):
            parse_potential("z/exp(10000)")

    def test_unknown_identifier_position(self):
        with pytest.raises(PotentialSyntaxError) as err:
            parse_potential("z + w")
        assert err.value.position == 4

    def test_trailing_garbage(self):
        with pytest.raises(PotentialSyntaxError):
            parse_potential("z^2 )")

    def test_complex_literal_folds(self):
        assert parse_potential("2+3*i") == Const(2 + 3j)

    def test_unary_minus_binds_before_power(self):
        # grammar: factor := base ('^' int)?, base := '-' base, so the
        # minus is part of the power's base
        assert parse_potential("-z^2") == Power(make_neg(Z()), 2)
        assert parse_potential("-(z^2)") == make_neg(Power(Z(), 2))

    def test_whitespace_insignificant(self):
        assert parse_potential(" i * z ^ 3 ") == parse_potential("i*z^3")

    def test_quotient_by_constant(self):
        e = parse_potential("z^2/2")
        assert e == Quotient(Power(Z(), 2), Const(2 + 0j))


class TestEval:
    def test_square_at_one_plus_i(self):
        assert eval_potential(parse_potential("z^2"), 1 + 1j) == 2j

    def test_i_sin_at_zero(self):
        assert eval_potential(parse_potential("i*sin(z)"), 0j) == 0j

    def test_iz3_at_i(self):
        assert eval_potential(parse_potential("i*z^3"), 1j) == 1 + 0j

    def test_compile_matches_eval(self, rng):
        for src in BUILTIN_SOURCES.values():
            e = parse_potential(src)
            f = compile_potential(e)
            for _ in range(50):
                z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                assert f(z) == eval_potential(e, z)

    def test_overflow_flagged(self):
        e = parse_potential("exp(z)")
        with pytest.raises(PotentialOverflowError):
            eval_potential(e, 1e4 + 0j)


class TestDerivative:
    def test_iz3(self):
        d = derivative(parse_potential("i*z^3"))
        assert eval_potential(d, 1.0 + 0j) == 3j

    def test_exp_iz_at_zero(self):
        d = derivative(parse_potential("exp(i*z)"))
        assert eval_potential(d, 0j) == 1j

    def test_square_at_one_plus_i(self):
        d = derivative(parse_potential("z^2"))
        assert eval_potential(d, 1 + 1j) == 2 + 2j

    def test_quotient_rule_constant_denominator(self):
        d = derivative(parse_potential("z^3/3"))
        assert eval_potential(d, 2.0 + 0j) == pytest.approx(4.0)

    def test_matches_finite_differences(self, builtins_map, rng):
        # central differences with a real step approximate d/dz for an
        # analytic function; relative tolerance 1e-6 at step 1e-5
        h = 1e-5
        for expr in builtins_map.values():
            d = derivative(expr)
            for _ in range(20):
                z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                fd = (eval_potential(expr, z + h) - eval_potential(expr, z - h)) / (2 * h)
                exact = eval_potential(d, z)
                assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


class TestSplitAndAnalyticity:
    def test_split_iz(self):
        assert split_real_imag(parse_potential("i*z"), 1.0, 0.0) == (0.0, 1.0)

    def test_split_square(self):
        assert split_real_imag(parse_potential("z^2"), 1.0, 1.0) == (0.0, 2.0)

    def test_split_exp(self):
        assert split_real_imag(parse_potential("exp(i*z)"), 0.0, 0.0) == (1.0, 0.0)

    def test_split_consistent_with_eval(self, builtins_map, rng):
        for expr in builtins_map.values():
            for _ in range(200):
                x, y = rng.uniform(-2, 2, size=2)
                vr, vi = split_real_imag(expr, x, y)
                assert complex(vr, vi) == eval_potential(expr, complex(x, y))

    def test_cauchy_riemann_iz3(self):
        r1, r2 = cauchy_riemann_residual(parse_potential("i*z^3"), 1.0, 1.0, 1e-5)
        assert abs(r1) <= 1e-8 and abs(r2) <= 1e-8

    def test_cauchy_riemann_polynomial_tight(self, rng):
        e = parse_potential("z^2")
        for _ in range(20):
            x, y = rng.uniform(-2, 2, size=2)
            r1, r2 = cauchy_riemann_residual(e, x, y, 1e-5)
            assert abs(r1) <= 1e-10 and abs(r2) <= 1e-10

    def test_cauchy_riemann_exp(self):
        r1, r2 = cauchy_riemann_residual(parse_potential("exp(i*z)"), 0.0, 0.0, 1e-5)
        assert abs(r1) <= 1e-8 and abs(r2) <= 1e-8

    def test_cauchy_riemann_all_builtins(self, builtins_map, rng):
        for expr in builtins_map.values():
            for _ in range(100):
                x, y = rng.uniform(-2, 2, size=2)
                r1, r2 = cauchy_riemann_residual(expr, x, y, 1e-5)
                assert abs(r1) <= 1e-7 and abs(r2) <= 1e-7

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError):
            cauchy_riemann_residual(parse_potential("z^2"), 0.0, 0.0, 0.0)


class TestBuiltins:
    def test_count(self, builtins_map):
        assert len(builtins_map) == 6

    def test_lookup_iz3(self):
        assert get_builtin("iz3") == parse_potential("i*z^3")

    def test_unknown_not_found(self):
        with pytest.raises(KeyError):
            get_builtin("unknown")

    def test_catalog_order(self, builtins_map):
        assert list(builtins_map) == ["iz", "z2", "iz3", "neg_z4", "exp_iz", "i_sin_z"]


# ---------------------------------------------------------------------------
# Round-trip property: parse(to_source(e)) is structurally equal to e for
# any AST built through the node constructors.
# ---------------------------------------------------------------------------

_consts = st.complex_numbers(min_magnitude=0, max_magnitude=1e6,
                             allow_nan=False, allow_infinity=False).map(Const)
_leaves = st.one_of(_consts, st.just(Z()))


def _branch(children):
    nonzero_consts = _consts.filter(lambda c: c.value != 0)
    return st.one_of(
        st.tuples(children, children).map(lambda t: make_sum(*t)),
        st.tuples(children, children).map(lambda t: make_product(*t)),
        st.tuples(children, nonzero_consts).map(lambda t: make_quotient(*t)),
        st.tuples(children, st.integers(0, 4)).map(lambda t: make_power(*t)),
        children.map(make_neg),
        st.tuples(st.sampled_from(["exp", "sin", "cos", "sinh", "cosh"]),
                  children).map(lambda t: make_call(*t)),
    )


def _all_consts_finite(e):
    """Constant folding can overflow; such ASTs are outside the domain."""
    from holomech.potentials import Expr

    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Const):
            if not (cmath.isfinite(node.value)):
                return False
        else:
            stack.extend(v for v in vars(node).values() if isinstance(v, Expr))
    return True


_expressions = st.recursive(_leaves, _branch, max_leaves=12).filter(_all_consts_finite)


@settings(max_examples=200, deadline=None)
@given(_expressions)
def test_print_parse_round_trip(expr):
    assert parse_potential(to_source(expr)) == expr


def test_round_trip_builtins(builtins_map):
    for expr in builtins_map.values():
        assert parse_potential(to_source(expr)) == expr
