from __future__ import annotations

import pytest

from wglfix.derivation import DerivationError, ProofBuilder, curry
from wglfix.formula import (
    Box,
    Formula,
    Implies,
    Variable,
    box_power,
    conj,
    dia,
    dia_power,
    iff,
    neg,
    substitute,
)
from wglfix.kernel import check
from wglfix.syntax import parse

P = Variable("p")
Q = Variable("q")


def _assert_proves(builder: ProofBuilder, index: int, goal: Formula) -> None:
    assert builder.formula(index) == goal
    cert = builder.certificate(index)
    report = check(cert)
    assert report.ok, report.reason
    assert cert.goal == goal
    assert [line.index for line in cert.lines] == list(range(len(cert.lines)))


def test_curry() -> None:
    assert curry([P, Q], P) == Implies(P, Implies(Q, P))
    assert curry([], P) == P


def test_primitive_rules_validate_inputs() -> None:
    builder = ProofBuilder(2)
    with pytest.raises(DerivationError):
        builder.taut(parse("box p -> p"))
    first = builder.taut(parse("p -> p"))
    assert builder.taut(parse("p -> p")) == first
    with pytest.raises(DerivationError):
        builder.mp(first, first)


def test_regularity() -> None:
    builder = ProofBuilder(2)
    seed = builder.taut(parse("p & q -> p"))
    index = builder.regularity(seed, 2)
    _assert_proves(builder, index, Implies(box_power(2, conj(P, Q)), box_power(2, P)))


def test_box_conj_intro() -> None:
    builder = ProofBuilder(3)
    index = builder.box_conj_intro(2, [P, Q])
    _assert_proves(builder, index, Implies(conj(box_power(2, P), box_power(2, Q)), box_power(2, conj(P, Q))))


def test_box_lift_without_hypotheses_uses_necessitation() -> None:
    builder = ProofBuilder(2)
    seed = builder.taut(parse("p -> p"))
    index = builder.box_lift(seed, [], 2)
    _assert_proves(builder, index, box_power(2, parse("p -> p")))


def test_box_lift_rejects_mismatched_hypotheses() -> None:
    builder = ProofBuilder(2)
    seed = builder.taut(parse("p & q -> p"))
    with pytest.raises(DerivationError):
        builder.box_lift(seed, [Q, P])


def test_box_iff() -> None:
    builder = ProofBuilder(2)
    index = builder.box_iff(P, Q)
    _assert_proves(builder, index, Implies(Box(iff(P, Q)), iff(Box(P), Box(Q))))


def test_dia_mono_and_merge() -> None:
    builder = ProofBuilder(2)
    seed = builder.taut(parse("p & q -> p"))
    mono = builder.dia_mono(seed, 2)
    _assert_proves(builder, mono, Implies(dia_power(2, conj(P, Q)), dia_power(2, P)))

    merge = builder.dia_box_merge(2, P, Q)
    _assert_proves(builder, merge, Implies(conj(dia_power(2, P), box_power(2, Q)), dia_power(2, conj(P, Q))))


def test_replace_under_boxes() -> None:
    builder = ProofBuilder(2)
    hole = builder.taut(iff(P, neg(neg(P))))
    context = parse("box(r -> q) & r")
    index = builder.replace(context, {"r": hole})
    goal = iff(substitute(context, "r", P), substitute(context, "r", neg(neg(P))))
    _assert_proves(builder, index, goal)


def test_replace_requires_equivalence_lines() -> None:
    builder = ProofBuilder(2)
    line = builder.taut(parse("p -> p"))
    with pytest.raises(DerivationError):
        builder.replace(parse("box r"), {"r": line})


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trans(n: int) -> None:
    builder = ProofBuilder(n)
    index = builder.trans(P)
    _assert_proves(builder, index, Implies(Box(P), box_power(n + 1, P)))
    assert builder.trans(P) == index


def test_derive_implication_structural() -> None:
    builder = ProofBuilder(2)
    index = builder.derive_implication(box_power(2, neg(neg(P))), box_power(2, P))
    assert index is not None
    _assert_proves(builder, index, Implies(box_power(2, neg(neg(P))), box_power(2, P)))
    assert builder.derive_implication(Box(P), P) is None


def test_derive_equivalence_through_negated_boxes() -> None:
    builder = ProofBuilder(3)
    left = parse("box box dia dia box box false")
    right = parse("box box ~box box ~box box false")
    index = builder.derive_equivalence(left, right)
    assert index is not None
    _assert_proves(builder, index, iff(left, right))


def test_replay_with_substitution() -> None:
    source = ProofBuilder(2)
    goal = source.trans(P)
    cert = source.certificate(goal)

    target = ProofBuilder(2)
    replacement = parse("q & box r")
    index = target.replay(cert.lines, len(cert.lines) - 1, {"p": replacement})
    _assert_proves(target, index, Implies(Box(replacement), box_power(3, replacement)))


def test_include_checks_logic() -> None:
    source = ProofBuilder(2)
    cert = source.certificate(source.trans(P))
    assert ProofBuilder(2).include(cert) >= 0
    with pytest.raises(DerivationError):
        ProofBuilder(3).include(cert)


def test_certificate_keeps_only_reachable_lines() -> None:
    builder = ProofBuilder(2)
    builder.taut(parse("q -> q"))
    index = builder.nec(builder.taut(parse("p -> p")))
    cert = builder.certificate(index)
    assert len(cert.lines) == 2
    assert check(cert).ok
