import pytest
from hypothesis import given, strategies as st

from intervalkit.errors import DegenerateInterval, ExprSyntaxError
from intervalkit.expr import (Binary, Call, IntervalLit, IntervalOf, Power, RealLit, Unary, Var,
                              interval_literals, parse, render, substitute_var, variables)

CORPUS = [
    "1", "t", "x", "-x", "[1,2]", "<0;1>", "[-1,1]+x", "x-x", "x*sin(t)", "[1,2]*t/(1+x^2)",
    "[1,2]*sin(t)/(1+x^2)", "x^0", "x^3", "(x+1)^2", "-(x+1)", "x--x", "2*3+4", "2*(3+4)",
    "1-2-3", "1-(2-3)", "1/2/3", "1/(2/3)", "-x^2", "(-x)^2", "t^2*x", "exp(t)*x",
    "ln(2+t)*[0,1]", "abs(t-1)*x", "cos(t)^2+sin(t)^2", "smul(-1, x)+smul([1,2], t)",
    "madd(x, [1,2])", "msub(x, [0,1])", "hsub([3,5], [1,2])", "ghsub(x, [0,1])",
    "mmul(x, [1,2])", "mdiv(x, [1,2])", "smul(sin(t), x)", "[t, t^2+1]", "[t^2, 2*t+1]",
    "[x^2/2, 1+x^2/2+2*sin(x)^2]", "<t; exp(t)>", "pi", "e", "2*pi*t", "x/[2,3]",
    "[0.5,3.5]-[1.5,2.5]", "1e-3*x", "(t+x)*(t-x)", "-(-(-x))", "[1,2]*[3,4]*[5,6]",
]


def test_corpus_size():
    assert len(CORPUS) == 50
    assert len(set(CORPUS)) == 50


@pytest.mark.parametrize("src", CORPUS)
def test_render_is_a_fixed_point(src):
    once = render(parse(src))
    assert render(parse(once)) == once
    assert parse(once) == parse(src)


def test_structure_of_rational_rhs():
    e = parse("[1,2]*t/(1+x^2)")
    assert e == Binary("/", Binary("*", IntervalLit(1.0, 2.0, 0), Var("t")),
                       Binary("+", RealLit(1.0), Power(Var("x"), 2)))


def test_param_ids_in_parse_order():
    e = parse("[1,2]*x + <0;3> - smul([4,5], t)")
    lits = interval_literals(e)
    assert [l.param_id for l in lits] == [0, 1, 2]
    assert [l.bounds for l in lits] == [(1, 2), (-3, 3), (4, 5)]


def test_precedence_and_unary():
    assert parse("-x^2") == Power(Unary("-", Var("x")), 2)
    assert parse("1-2-3") == Binary("-", Binary("-", RealLit(1.0), RealLit(2.0)), RealLit(3.0))
    assert parse("sin(t)") == Call("sin", (Var("t"),))


def test_constants_and_unicode_minus():
    assert parse("pi") == parse("3.141592653589793")
    assert parse("−x") == parse("-x")
    assert parse("[−1,1]") == parse("[-1,1]")


def test_expression_brackets():
    e = parse("[t, t^2+1]")
    assert isinstance(e, IntervalOf) and e.form == "endpoints"
    # constant brackets fold to literals
    assert isinstance(parse("[1-2, 3*1]"), IntervalLit)


def test_degenerate_literal():
    with pytest.raises(DegenerateInterval):
        parse("[2,1]")
    with pytest.raises(DegenerateInterval):
        parse("<0;0>")


@pytest.mark.parametrize("src, offset", [
    ("x -", 3), ("(x", 2), ("x)", 1), ("1 + * 2", 4), ("foo(x)", 0), ("x^1.5", 2),
    ("x^-1", 2), ("[1,2", 4), ("y", 0), ("", 0), ("sin(x, t)", 0), ("x $ 2", 2),
])
def test_syntax_errors_report_offset(src, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(src)
    assert info.value.offset == offset
    assert f"at offset {offset}" in str(info.value)


def test_offset_counts_utf8_bytes():
    with pytest.raises(ExprSyntaxError) as info:
        parse("−x +")
    assert info.value.offset == len("−x +".encode())


def test_variables_and_substitution():
    e = parse("x*sin(t)")
    assert variables(e) == {"x", "t"}
    assert variables(substitute_var(e, "x", "t")) == {"t"}


_leaf = st.sampled_from(["t", "x", "2", "0.5", "[1,2]", "<0;1>", "pi"])


def _compose(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/"), children).map(
            lambda p: f"({p[0]}){p[1]}({p[2]})"),
        children.map(lambda c: f"-({c})"),
        st.tuples(children, st.integers(0, 3)).map(lambda p: f"({p[0]})^{p[1]}"),
        children.map(lambda c: f"smul(2, {c})"),
    )


@given(st.recursive(_leaf, _compose, max_leaves=8))
def test_random_expressions_round_trip(src):
    e = parse(src)
    assert parse(render(e)) == e
