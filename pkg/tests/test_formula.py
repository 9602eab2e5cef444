from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formula_strategies import formulas
from wglfix.depth import dep
from wglfix.formula import (
    FALSUM,
    TOP,
    Box,
    Implies,
    LogicIndex,
    OccurrenceError,
    Variable,
    atoms,
    box_power,
    boxdot,
    conj,
    conj_all,
    fresh_variable,
    iff,
    iterate,
    logic_n,
    modal_degree,
    neg,
    occurrences,
    resolve,
    simplify,
    size,
    split_iff,
    substitute,
    substitute_at,
    substitute_many,
)
from wglfix.kripke import KripkeModel, extension
from wglfix.syntax import parse

P = Variable("p")
Q = Variable("q")


def test_structural_equality_and_hash() -> None:
    left = Box(Implies(P, Box(Box(P))))
    right = Box(Implies(Variable("p"), Box(Box(Variable("p")))))

    assert left == right
    assert hash(left) == hash(right)
    assert left != Box(Implies(P, Box(P)))
    assert len({left, right}) == 1


def test_variable_rejects_empty_name() -> None:
    with pytest.raises(ValueError):
        Variable("")


@pytest.mark.parametrize("value", [0, -2, True])
def test_logic_index_rejects_invalid(value: object) -> None:
    with pytest.raises(ValueError):
        LogicIndex(value)  # type: ignore[arg-type]


def test_logic_index_gl() -> None:
    assert LogicIndex(1).is_gl
    assert not LogicIndex(3).is_gl
    assert logic_n(LogicIndex(4)) == 4
    assert logic_n(2) == 2


def test_box_power() -> None:
    assert box_power(0, P) == P
    assert box_power(3, P) == Box(Box(Box(P)))
    assert box_power(2, Box(P)) == box_power(3, P)
    with pytest.raises(ValueError):
        box_power(-1, P)


def test_boxdot_examples() -> None:
    assert boxdot(1, P) == Box(P)
    assert boxdot(2, P, plus=True) == conj(P, conj(Box(P), box_power(2, P)))
    assert boxdot(3, FALSUM) == conj(Box(FALSUM), conj(box_power(2, FALSUM), box_power(3, FALSUM)))
    assert boxdot(2, P, plus=True) == conj_all([P, Box(P), box_power(2, P)])
    with pytest.raises(ValueError):
        boxdot(0, P)


def test_conj_all_edges() -> None:
    assert conj_all([]) == TOP
    assert conj_all([P]) == P
    assert conj_all([P, Q]) == conj(P, Q)


def test_iff_is_recognized() -> None:
    assert split_iff(iff(P, Q)) == (P, Q)
    assert split_iff(conj(P, Q)) is None


def test_substitute_examples() -> None:
    assert substitute(Box(Implies(P, Q)), "p", FALSUM) == Box(Implies(FALSUM, Q))
    assert substitute(P, "p", Box(Q)) == Box(Q)


def test_substitute_shifts_depths() -> None:
    a = parse("p & box(p -> box box p)")
    result = substitute(a, "p", Box(P))

    assert result == parse("box p & box(box p -> box box box p)")
    assert dep(result, "p") == frozenset({1, 2, 4})


def test_substitute_many_is_simultaneous() -> None:
    swapped = substitute_many(Implies(P, Box(Q)), {"p": Q, "q": P})
    assert swapped == Implies(Q, Box(P))


def test_iterate() -> None:
    boxed = parse("box box ~p")
    assert iterate(boxed, "p", 0) == P
    assert substitute(iterate(boxed, "p", 2), "p", TOP) == parse("box box ~box box ~true")
    assert iterate(Box(Q), "p", 5) == Box(Q)


def test_atoms_size_degree() -> None:
    assert atoms(parse("p & box(p -> box box p)")) == frozenset({"p"})
    assert atoms(FALSUM) == frozenset()
    assert atoms(parse("box(p -> q)")) == frozenset({"p", "q"})
    assert size(Box(Implies(P, FALSUM))) == 4
    assert modal_degree(parse("box(p -> box box q)")) == 3


def test_fresh_variable_skips_taken_names() -> None:
    assert fresh_variable({"p"}) == "_fp0"
    assert fresh_variable({"_fp0", "_fp1"}) == "_fp2"


def test_occurrences_are_left_to_right_with_depth() -> None:
    a = parse("box(p & box p)")
    found = occurrences(a, "p")

    assert [occ.depth for occ in found] == [1, 2]
    assert all(resolve(a, occ) == P for occ in found)


def test_substitute_at_selected_occurrence() -> None:
    a = parse("box(p & box p)")
    deep = [occ for occ in occurrences(a, "p") if occ.depth == 2]

    assert substitute_at(a, deep, TOP) == parse("box(p & box true)")
    assert substitute_at(a, [], TOP) is a
    assert substitute_at(a, occurrences(a, "p"), TOP) == substitute(a, "p", TOP)


def test_substitute_at_rejects_bad_paths() -> None:
    a = parse("box(p -> q)")
    inner = occurrences(a, "p")[0]
    parent = type(inner)(inner.path[:-1])
    with pytest.raises(OccurrenceError):
        substitute_at(a, [parent], TOP)
    with pytest.raises(OccurrenceError):
        substitute_at(a, [inner, occurrences(a, "q")[0]], TOP)
    with pytest.raises(OccurrenceError):
        resolve(a, type(inner)(("left",)))


def test_simplify_examples() -> None:
    assert simplify(parse("box(false -> q)")) == TOP
    assert simplify(neg(neg(P))) == P
    untouched = parse("box(p -> q)")
    assert simplify(untouched) is untouched
    assert simplify(parse("box box dia dia box box false")) == parse("box box ~box box ~box box false")


@given(formulas())
def test_substitute_identity(a) -> None:
    assert substitute(a, "p", P) == a


@given(formulas(), formulas(("q", "r")), formulas(("r",)))
def test_substitute_compositional(a, b, c) -> None:
    # q は a には現れず、b の像の中にだけ現れる
    a = substitute(a, "q", Variable("r"))
    left = substitute(substitute(a, "p", b), "q", c)
    right = substitute(a, "p", substitute(b, "q", c))
    assert left == right


@settings(max_examples=200)
@given(
    formulas(("p", "q"), max_leaves=6),
    st.integers(min_value=1, max_value=4),
    st.data(),
)
def test_simplify_preserves_extension(a, worlds: int, data) -> None:
    pairs = [(i, j) for i in range(worlds) for j in range(worlds)]
    edges = frozenset(data.draw(st.sets(st.sampled_from(pairs))))
    world_sets = st.frozensets(st.integers(min_value=0, max_value=worlds - 1))
    valuation = {"p": data.draw(world_sets), "q": data.draw(world_sets)}
    model = KripkeModel(worlds, edges, valuation)

    assert extension(model, simplify(a)) == extension(model, a)
