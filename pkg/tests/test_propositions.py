from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formula_strategies import formulas, hole_contexts
from wglfix.derivation import DerivationError, ProofBuilder
from wglfix.formula import (
    FALSUM,
    TOP,
    Box,
    Formula,
    Implies,
    Variable,
    box_power,
    boxdot,
    conj,
    conj_all,
    iff,
    iterate,
    substitute,
)
from wglfix.kernel import Certificate, check
from wglfix.propositions import (
    SideConditionError,
    derive_equiv_box,
    derive_lob,
    derive_power_unfolding,
    derive_subst,
    derive_top_unfolding,
    derive_trans,
    top_box_equivalence,
)
from wglfix.syntax import parse

P = Variable("p")
Q = Variable("q")
LOGICS = [1, 2, 3]


def _assert_checked(cert: Certificate, goal: Formula) -> None:
    assert cert.goal == goal
    report = check(cert)
    assert report.ok, f"{report.line}: {report.reason}"


def _premise(n: int, formula: Formula) -> Certificate:
    builder = ProofBuilder(n)
    return builder.certificate(builder.taut(formula))


# trans -----------------------------------------------------------------------------


@pytest.mark.parametrize(("a", "n"), [(Q, 2), (FALSUM, 3), (parse("box p -> q"), 1)])
def test_derive_trans_examples(a: Formula, n: int) -> None:
    _assert_checked(derive_trans(a, n), Implies(Box(a), box_power(n + 1, a)))


@settings(max_examples=50, deadline=None)
@given(formulas(("p", "q"), max_leaves=5), st.sampled_from(LOGICS))
def test_derive_trans_random(a, n: int) -> None:
    _assert_checked(derive_trans(a, n), Implies(Box(a), box_power(n + 1, a)))


def test_top_box_equivalence() -> None:
    builder = ProofBuilder(2)
    index = top_box_equivalence(builder)
    _assert_checked(builder.certificate(index), iff(Box(TOP), TOP))


# substitution ------------------------------------------------------------------------


@pytest.mark.parametrize("n", LOGICS)
def test_subst_plus_on_single_box(n: int) -> None:
    a, b = parse("q & r"), parse("r & q")
    cert = derive_subst("plus", parse("box p"), [(a, b)], "p", n)
    _assert_checked(cert, Implies(boxdot(n, iff(a, b), plus=True), iff(Box(a), Box(b))))


@pytest.mark.parametrize("n", LOGICS)
def test_subst_box_with_two_holes(n: int) -> None:
    pairs = [(parse("q"), parse("~~q")), (parse("box r"), parse("box r & true"))]
    context = parse("x -> box(y & x)")
    cert = derive_subst("box", context, pairs, ["x", "y"], n)
    equivalence = conj_all([iff(a, b) for a, b in pairs])
    left = Box(substitute(substitute(context, "x", pairs[0][0]), "y", pairs[1][0]))
    right = Box(substitute(substitute(context, "x", pairs[0][1]), "y", pairs[1][1]))
    _assert_checked(cert, Implies(boxdot(n, equivalence), iff(left, right)))


def test_subst_residue() -> None:
    a, b = parse("q"), parse("~~q")
    context = parse("box(r -> box p)")
    cert = derive_subst("residue", context, [(a, b)], "p", 3)
    _assert_checked(
        cert,
        Implies(box_power(2, iff(a, b)), iff(substitute(context, "p", a), substitute(context, "p", b))),
    )


def test_subst_residue_rejects_zero_class() -> None:
    with pytest.raises(SideConditionError) as excinfo:
        derive_subst("residue", parse("box box box p"), [(Q, Q)], "p", 3)
    assert excinfo.value.residues == frozenset({0})
    assert "[0]_3" in str(excinfo.value)


@pytest.mark.parametrize("n", LOGICS)
def test_subst_modalized(n: int) -> None:
    a = parse("box q -> q")
    b = TOP
    context = Implies(box_power(n, Variable("p")), Q)
    cert = derive_subst("modalized", context, [(a, b)], "p", n)
    goal = Implies(box_power(n, iff(a, b)), iff(substitute(context, "p", a), substitute(context, "p", b)))
    _assert_checked(cert, goal)


@settings(max_examples=50, deadline=None)
@given(
    st.data(),
    formulas(("q", "r"), max_leaves=3),
    formulas(("q", "r"), max_leaves=3),
    st.sampled_from(LOGICS),
)
def test_subst_modalized_random(data, a, b, n: int) -> None:
    context = data.draw(hole_contexts([box_power(n, P), box_power(2 * n, P)]))
    cert = derive_subst("modalized", context, [(a, b)], "p", n)
    goal = Implies(box_power(n, iff(a, b)), iff(substitute(context, "p", a), substitute(context, "p", b)))
    _assert_checked(cert, goal)


@settings(max_examples=50, deadline=None)
@given(
    st.data(),
    formulas(("q", "r"), max_leaves=3),
    formulas(("q", "r"), max_leaves=3),
    st.sampled_from([2, 3]),
)
def test_subst_residue_random(data, a, b, n: int) -> None:
    i = data.draw(st.integers(min_value=1, max_value=n - 1))
    context = data.draw(hole_contexts([box_power(i, P), box_power(i + n, P)]))
    cert = derive_subst("residue", context, [(a, b)], "p", n)
    goal = Implies(box_power(i, iff(a, b)), iff(substitute(context, "p", a), substitute(context, "p", b)))
    _assert_checked(cert, goal)


def test_subst_residue_has_no_instance_in_gl() -> None:
    with pytest.raises(SideConditionError):
        derive_subst("residue", parse("box(q -> box p)"), [(Q, Q)], "p", 1)


def test_subst_modalized_rejects_bare_occurrence() -> None:
    with pytest.raises(SideConditionError):
        derive_subst("modalized", parse("p -> box box p"), [(Q, Q)], "p", 2)


def test_subst_argument_errors() -> None:
    with pytest.raises(ValueError):
        derive_subst("other", parse("box p"), [(Q, Q)], "p", 2)
    with pytest.raises(DerivationError):
        derive_subst("plus", parse("box p"), [(Q, Q), (Q, Q)], "p", 2)


@settings(max_examples=50, deadline=None)
@given(
    formulas(("p", "q"), max_leaves=4),
    formulas(("q", "r"), max_leaves=3),
    formulas(("q", "r"), max_leaves=3),
    st.sampled_from(LOGICS),
    st.sampled_from(["plus", "box"]),
)
def test_subst_random(context, a, b, n: int, kind: str) -> None:
    cert = derive_subst(kind, context, [(a, b)], "p", n)
    left, right = substitute(context, "p", a), substitute(context, "p", b)
    if kind == "plus":
        goal = Implies(boxdot(n, iff(a, b), plus=True), iff(left, right))
    else:
        goal = Implies(boxdot(n, iff(a, b)), iff(Box(left), Box(right)))
    _assert_checked(cert, goal)


# Lob and equivalence under boxes -------------------------------------------------------


@pytest.mark.parametrize("n", LOGICS)
def test_derive_lob_tautological_premise(n: int) -> None:
    premise = _premise(n, Implies(boxdot(n, TOP), TOP))
    _assert_checked(derive_lob(premise, TOP, n), TOP)


def test_derive_lob_rejects_mismatch() -> None:
    premise = _premise(2, Implies(boxdot(2, TOP), TOP))
    with pytest.raises(DerivationError):
        derive_lob(premise, TOP, 3)
    with pytest.raises(DerivationError):
        derive_lob(premise, Q, 2)


@settings(max_examples=50, deadline=None)
@given(formulas(("p", "q"), max_leaves=3), st.sampled_from(LOGICS))
def test_derive_lob_random(x, n: int) -> None:
    a = Implies(x, conj(x, TOP))
    premise = _premise(n, Implies(boxdot(n, a), a))
    _assert_checked(derive_lob(premise, a, n), a)


@pytest.mark.parametrize(("k", "n"), [(1, 1), (2, 2), (3, 3), (4, 2)])
def test_derive_lob_from_necessitated_theorem(k: int, n: int) -> None:
    a = box_power(k, Implies(Q, Q))
    builder = ProofBuilder(n)
    line = builder.taut(Implies(Q, Q))
    for _ in range(k):
        line = builder.nec(line)
    premise = builder.certificate(builder.chain([line], Implies(boxdot(n, a), a)))

    assert any(step.rule == "nec" for step in premise.lines)
    _assert_checked(derive_lob(premise, a, n), a)


@settings(max_examples=50, deadline=None)
@given(formulas(("p", "q"), max_leaves=3), st.sampled_from(LOGICS))
def test_derive_lob_from_trans_theorem(x, n: int) -> None:
    a = Implies(Box(x), box_power(n + 1, x))
    builder = ProofBuilder(n)
    premise = builder.certificate(builder.chain([builder.trans(x)], Implies(boxdot(n, a), a)))

    assert any(step.rule == "axwgl" for step in premise.lines)
    _assert_checked(derive_lob(premise, a, n), a)


@pytest.mark.parametrize("n", LOGICS)
def test_derive_equiv_box_trivial(n: int) -> None:
    a = parse("box q -> r")
    premise = _premise(n, Implies(box_power(n, a), iff(a, a)))
    _assert_checked(derive_equiv_box(premise, a, a, n), iff(Box(a), Box(a)))


@settings(max_examples=50, deadline=None)
@given(formulas(("p", "q"), max_leaves=4), st.sampled_from(LOGICS))
def test_derive_equiv_box_random(a, n: int) -> None:
    b = conj(a, box_power(n, a))
    premise = _premise(n, Implies(box_power(n, a), iff(a, b)))
    _assert_checked(derive_equiv_box(premise, a, b, n), iff(Box(a), Box(b)))


def test_derive_equiv_box_rejects_wrong_shape() -> None:
    premise = _premise(2, Implies(Box(Q), iff(Q, Q)))
    with pytest.raises(DerivationError):
        derive_equiv_box(premise, Q, Q, 2)


# Simple fixed points ------------------------------------------------------------------


@pytest.mark.parametrize(
    ("text", "n"),
    [("box(p -> box q)", 1), ("box box ~p", 2), ("box box box(p -> q)", 3), ("box(~box p)", 1)],
)
def test_derive_top_unfolding(text: str, n: int) -> None:
    boxed = parse(text)
    fixed = substitute(boxed, "p", TOP)
    _assert_checked(derive_top_unfolding(boxed, "p", n), iff(fixed, substitute(boxed, "p", fixed)))


def test_derive_top_unfolding_rejects_other_residues() -> None:
    with pytest.raises(SideConditionError):
        derive_top_unfolding(parse("box(p & box p)"), "p", 2)


@pytest.mark.parametrize(("text", "n"), [("box box ~p", 3), ("box ~p", 2), ("box(q -> p)", 3)])
def test_derive_power_unfolding(text: str, n: int) -> None:
    boxed = parse(text)
    fixed = substitute(iterate(boxed, "p", n), "p", TOP)
    _assert_checked(derive_power_unfolding(boxed, "p", n), iff(fixed, substitute(boxed, "p", fixed)))


def test_derive_power_unfolding_rejects_zero_residue() -> None:
    with pytest.raises(SideConditionError):
        derive_power_unfolding(parse("box box p"), "p", 2)
