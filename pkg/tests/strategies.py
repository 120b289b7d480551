"""Hypothesis strategies shared by the expression and jet tests."""

from hypothesis import strategies as st

from zerocount.expr import Binary, Call, Const, Num, Unary, Var

# functions that are smooth on the whole line
ENTIRE = ("sin", "cos", "exp", "sinh", "cosh", "tanh", "erf", "besselj0", "besselj1", "atan")

numbers = st.integers(0, 40).map(lambda k: Num(str(k / 4) if k % 4 else str(k // 4)))
leaves = st.one_of(numbers, st.just(Var()), st.sampled_from([Const("pi"), Const("e")]))


def _extend(children):
    return st.one_of(
        st.builds(Unary, st.just("-"), children),
        st.builds(Binary, st.sampled_from("+-*"), children, children),
        st.builds(Binary, st.just("^"), children, st.integers(0, 3).map(lambda k: Num(str(k)))),
        st.builds(Call, st.sampled_from(ENTIRE), children),
    )


smooth_asts = st.recursive(leaves, _extend, max_leaves=8)


def _extend_any(children):
    return st.one_of(
        _extend(children),
        st.builds(Binary, st.just("/"), children, children),
        st.builds(Call, st.sampled_from(("sqrt", "ln", "tan", "abs")), children),
    )


any_asts = st.recursive(leaves, _extend_any, max_leaves=8)
