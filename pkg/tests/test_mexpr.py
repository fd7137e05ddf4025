"""Mass-expression parsing, printing, and jet evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdml import mexpr
from pdml.massmodel import exp_up_mass, gaussian_mass, lorentzian_mass, mass_jet
from pdml.mexpr import BinOp, Call, EvalError, Neg, Num, ParseError, Var, eval_jet, parse, to_text


class TestParse:
    def test_mul_exp_neg_pow(self):
        ast = parse("2*exp(-x^2)").ast
        assert ast == BinOp("*", Num(2.0), Call("exp", Neg(BinOp("^", Var(), Num(2.0)))))

    def test_div_add_pow(self):
        ast = parse("1/(1+x^2)").ast
        assert ast == BinOp("/", Num(1.0), BinOp("+", Num(1.0), BinOp("^", Var(), Num(2.0))))

    def test_unclosed_call(self):
        with pytest.raises(ParseError) as info:
            parse("exp(x")
        assert info.value.offset == 6
        assert ")" in info.value.expected

    def test_no_implicit_multiplication(self):
        with pytest.raises(ParseError) as info:
            parse("2x")
        assert info.value.offset == 2

    def test_unknown_identifier(self):
        with pytest.raises(ParseError) as info:
            parse("foo(x)")
        assert info.value.offset == 1
        assert "x" in info.value.expected

    def test_function_requires_parens(self):
        with pytest.raises(ParseError) as info:
            parse("exp x")
        assert "(" in info.value.expected

    def test_power_right_associative(self):
        ast = parse("2^3^2").ast
        assert ast == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))

    def test_unary_minus_binds_below_power(self):
        assert parse("-x^2").ast == Neg(BinOp("^", Var(), Num(2.0)))

    def test_negative_exponent(self):
        jet = eval_jet(parse("2^-3"), 0.0)
        assert jet.v0 == pytest.approx(0.125)

    def test_scientific_literals(self):
        assert parse("1.5e-2").ast == Num(0.015)


_leaf = st.sampled_from([Num(1.0), Num(2.5), Num(0.015), Var()])


def _ast_strategy():
    return st.recursive(
        _leaf,
        lambda children: st.one_of(
            st.builds(Neg, children),
            st.builds(lambda a, b, op: BinOp(op, a, b), children, children,
                      st.sampled_from(["+", "-", "*", "/", "^"])),
            st.builds(lambda f, a: Call(f, a), st.sampled_from(mexpr.FUNCTIONS), children),
        ),
        max_leaves=12,
    )


@given(_ast_strategy())
@settings(max_examples=150, deadline=None)
def test_print_parse_roundtrip(ast):
    assert parse(to_text(ast)).ast == ast


def test_reserialize_source_examples():
    for text in ("2*exp(-x^2)", "1/(1+x^2)", "x^2-3*x+1", "sqrt(cosh(x))^1.5", "-(x+1)^-2"):
        expr = parse(text)
        assert parse(to_text(expr)).ast == expr.ast


class TestEvalJet:
    def test_square(self):
        jet = eval_jet(parse("x^2"), 3.0)
        assert (jet.v0, jet.v1, jet.v2, jet.v3) == (9.0, 6.0, 2.0, 0.0)

    def test_gaussian_at_origin(self):
        jet = eval_jet(parse("exp(-x^2)"), 0.0)
        assert jet.v0 == pytest.approx(1.0)
        assert jet.v1 == pytest.approx(0.0, abs=1e-15)
        assert jet.v2 == pytest.approx(-2.0)
        assert jet.v3 == pytest.approx(0.0, abs=1e-15)

    def test_lorentzian_at_one(self):
        # symbolic oracle: m = 1/(1+x^2) has m(1) = 1/2, m'(1) = -1/2,
        # m''(1) = 1/2, m'''(1) = 0
        sympy = pytest.importorskip("sympy")
        x = sympy.Symbol("x")
        m = 1 / (1 + x ** 2)
        expected = [float(sympy.diff(m, x, k).subs(x, 1)) for k in range(4)]
        assert expected == [0.5, -0.5, 0.5, 0.0]
        jet = eval_jet(parse("1/(1+x^2)"), 1.0)
        for got, want in zip((jet.v0, jet.v1, jet.v2, jet.v3), expected):
            assert got == pytest.approx(want, abs=1e-14)

    def test_matches_sympy_on_composites(self):
        sympy = pytest.importorskip("sympy")
        x = sympy.Symbol("x")
        cases = {
            "exp(-x^2/2)*cosh(x)": sympy.exp(-x ** 2 / 2) * sympy.cosh(x),
            "sqrt(1+x^2)": sympy.sqrt(1 + x ** 2),
            "ln(2+sin(x))": sympy.log(2 + sympy.sin(x)),
            "x^1.5": x ** 1.5,
        }
        rng = np.random.default_rng(2)
        for text, sym in cases.items():
            expr = parse(text)
            derivs = [sympy.lambdify(x, sympy.diff(sym, x, k)) for k in range(4)]
            for _ in range(10):
                pt = rng.uniform(0.2, 2.0)
                jet = eval_jet(expr, pt)
                for got, fn in zip((jet.v0, jet.v1, jet.v2, jet.v3), derivs):
                    assert got == pytest.approx(fn(pt), rel=1e-11, abs=1e-11)

    def test_builtin_parity(self):
        # every built-in profile written as text matches the analytic jets
        pairs = [
            ("2.5*exp(-x^2)", gaussian_mass(2.5)),
            ("2.5/(1+x^2)", lorentzian_mass(2.5)),
            ("2.5*exp(x)", exp_up_mass(2.5)),
        ]
        rng = np.random.default_rng(4)
        for text, model in pairs:
            expr = parse(text)
            for _ in range(50):
                pt = rng.uniform(-3, 3)
                jet = eval_jet(expr, pt)
                ref = mass_jet(model, pt)
                for got, want in zip((jet.v0, jet.v1, jet.v2, jet.v3),
                                     (ref.v0, ref.v1, ref.v2, ref.v3)):
                    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_non_integer_power_needs_positive_base(self):
        with pytest.raises(EvalError):
            eval_jet(parse("(0-2)^0.5"), 1.0)

    def test_variable_power_needs_positive_base(self):
        expr = parse("x^x")
        assert eval_jet(expr, 2.0).v0 == pytest.approx(4.0)
        with pytest.raises(EvalError):
            eval_jet(expr, -1.0)

    def test_division_by_zero(self):
        with pytest.raises(EvalError):
            eval_jet(parse("1/x"), 0.0)

    def test_log_of_nonpositive(self):
        with pytest.raises(EvalError):
            eval_jet(parse("ln(0-1)"), 0.0)

    def test_sqrt_of_negative(self):
        with pytest.raises(EvalError):
            eval_jet(parse("sqrt(x)"), -4.0)

    def test_overflow_reported(self):
        with pytest.raises(EvalError):
            eval_jet(parse("exp(exp(x))"), 10.0)
