from __future__ import annotations

import pytest

from wglfix.formula import FALSUM, TOP, Box, Implies, Variable, box_power, conj_all
from wglfix.kernel import (
    AXIOM_K,
    AXIOM_WGL,
    MODUS_PONENS,
    NECESSITATION,
    TAUT,
    Certificate,
    ProofLine,
    TautologyBudgetError,
    boolean_abstraction,
    check,
    is_axiom_k,
    is_axiom_wgl,
    taut_check,
)
from wglfix.syntax import parse

P = Variable("p")


def _box_top_certificate(n: int = 2) -> Certificate:
    lines = (
        ProofLine(0, TOP, TAUT),
        ProofLine(1, Box(TOP), NECESSITATION, (0,)),
    )
    return Certificate(n, lines, Box(TOP))


def test_taut_check_examples() -> None:
    assert taut_check(parse("box p -> box p"))
    assert taut_check(parse("(box p -> q) -> (~q -> ~box p)"))
    assert not taut_check(parse("box p -> p"))
    assert not taut_check(parse("box(p -> p)"))


def test_boolean_abstraction_shares_atoms() -> None:
    skeleton, atoms = boolean_abstraction(parse("box p -> (q -> box p)"))
    assert atoms == [Box(P), Variable("q")]
    assert skeleton == (0, (1, 0))


def test_taut_budget() -> None:
    wide = Implies(conj_all([Variable(f"v{i}") for i in range(6)]), FALSUM)
    with pytest.raises(TautologyBudgetError):
        taut_check(wide, budget=5)


def test_axiom_shapes() -> None:
    assert is_axiom_k(parse("box(p -> q) -> (box p -> box q)"))
    assert not is_axiom_k(parse("box(p -> q) -> (box q -> box p)"))
    assert is_axiom_wgl(parse("box(box box p -> p) -> box p"), 2)
    assert not is_axiom_wgl(parse("box(box box p -> p) -> box p"), 3)
    assert is_axiom_wgl(parse("box(box p -> p) -> box p"), 1)


def test_checker_accepts_small_proof() -> None:
    report = check(_box_top_certificate())
    assert report.ok
    assert report.checked_lines == 2


def test_checker_accepts_wgl_instance() -> None:
    axiom = Implies(Box(Implies(box_power(3, P), P)), Box(P))
    premise = Implies(box_power(3, P), P)
    lines = (
        ProofLine(0, Implies(P, premise), TAUT),
        ProofLine(1, axiom, AXIOM_WGL),
    )
    assert check(Certificate(3, lines, axiom)).ok


def test_checker_modus_ponens() -> None:
    identity = Implies(P, P)
    lines = (
        ProofLine(0, TOP, TAUT),
        ProofLine(1, Implies(TOP, identity), TAUT),
        ProofLine(2, identity, MODUS_PONENS, (0, 1)),
    )
    assert check(Certificate(1, lines, identity)).ok


def test_checker_rejects_non_tautology() -> None:
    lines = (
        ProofLine(0, P, TAUT),
        ProofLine(1, Box(P), NECESSITATION, (0,)),
    )
    report = check(Certificate(1, lines, Box(P)))
    assert not report.ok
    assert report.line == 0


@pytest.mark.parametrize(
    ("line", "reason_fragment"),
    [
        (ProofLine(1, Box(Box(TOP)), NECESSITATION, (0,)), "nec"),
        (ProofLine(1, Box(TOP), NECESSITATION, (1,)), "前提番号"),
        (ProofLine(1, Box(TOP), NECESSITATION, (0, 0)), "nec"),
        (ProofLine(1, Box(TOP), MODUS_PONENS, (0, 0)), "mp"),
        (ProofLine(1, Box(TOP), AXIOM_K), "K 公理"),
        (ProofLine(1, Box(TOP), AXIOM_WGL), "wGL"),
        (ProofLine(1, Box(TOP), "magic"), "未知の規則"),
        (ProofLine(5, Box(TOP), NECESSITATION, (0,)), "行番号"),
        (ProofLine(1, Box(TOP), TAUT, (0,)), "taut"),
    ],
)
def test_checker_rejects_bad_line(line: ProofLine, reason_fragment: str) -> None:
    cert = Certificate(2, (ProofLine(0, TOP, TAUT), line), Box(TOP))
    report = check(cert)

    assert not report.ok
    assert report.line == 1
    assert reason_fragment in report.reason


def test_checker_rejects_goal_mismatch() -> None:
    cert = _box_top_certificate()
    wrong = Certificate(cert.logic, cert.lines, Box(Box(TOP)))
    report = check(wrong)
    assert not report.ok
    assert "ゴール" in report.reason


def test_checker_rejects_logic_mismatch_and_empty() -> None:
    assert not check(_box_top_certificate(2), 3).ok
    assert not check(Certificate(2, (), TOP)).ok


def test_check_report_to_dict() -> None:
    payload = check(_box_top_certificate()).to_dict()
    assert payload == {"ok": True, "line": None, "reason": "", "checked_lines": 2}
