"""wGL_n の Hilbert 式証明を検査する信頼済みカーネル。

カーネルが知っているのは 5 種類の正当化 (taut, axk, axwgl, mp, nec) だけです。
証明を組み立てる側 (derivation, propositions, certify) は信頼せず、出力は必ず
ここで検査します。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .formula import FALSUM, Box, Formula, Implies, LogicIndex, Variable, box_power, logic_n

TAUT = "taut"
AXIOM_K = "axk"
AXIOM_WGL = "axwgl"
MODUS_PONENS = "mp"
NECESSITATION = "nec"
RULES = (TAUT, AXIOM_K, AXIOM_WGL, MODUS_PONENS, NECESSITATION)
DEFAULT_ATOM_BUDGET = 24


class TautologyBudgetError(ValueError):
    """ブール抽象化の原子数が上限を超えた場合の例外。"""

    def __init__(self, atom_count: int, budget: int) -> None:
        self.atom_count = atom_count
        self.budget = budget
        super().__init__(f"ブール抽象化の原子数 {atom_count} が上限 {budget} を超えています。")


@dataclass(frozen=True, slots=True)
class ProofLine:
    index: int
    formula: Formula
    rule: str
    premises: tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class Certificate:
    logic: int
    lines: tuple[ProofLine, ...]
    goal: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "logic", logic_n(self.logic))
        object.__setattr__(self, "lines", tuple(self.lines))


@dataclass(slots=True)
class CheckReport:
    ok: bool
    line: int | None = None
    reason: str = ""
    checked_lines: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "ok": self.ok,
            "line": self.line,
            "reason": self.reason,
            "checked_lines": self.checked_lines,
        }


# Tautologies -------------------------------------------------------------------


def boolean_abstraction(a: Formula) -> tuple[object, list[Formula]]:
    """極大 □ 部分式と変数を原子へ写したブール骨格と、原子の一覧を返します。

    骨格のノードは False (⊥)、int (原子番号)、(左, 右) の組 (→) のいずれかです。
    同一の部分式は同じ原子番号を受け取ります。
    """

    atom_ids: dict[Formula, int] = {}
    atoms: list[Formula] = []
    memo: dict[int, object] = {}

    def walk(node: Formula) -> object:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Implies):
            result: object = (walk(node.left), walk(node.right))
        elif isinstance(node, (Box, Variable)):
            index = atom_ids.get(node)
            if index is None:
                index = len(atoms)
                atom_ids[node] = index
                atoms.append(node)
            result = index
        elif node == FALSUM:
            result = False
        else:
            raise TypeError(f"未知の論理式ノードです: {type(node).__name__}")
        memo[id(node)] = result
        return result

    return walk(a), atoms


def taut_check(a: Formula, budget: int = DEFAULT_ATOM_BUDGET) -> bool:
    """a のブール抽象化が古典トートロジーかどうかを判定します。"""

    skeleton, atoms = boolean_abstraction(a)
    if len(atoms) > budget:
        raise TautologyBudgetError(len(atoms), budget)
    return _valid(skeleton, len(atoms), {})


def _evaluate(node: object, assignment: dict[int, bool]) -> bool | None:
    # bool は int の部分型なので先に判定する
    if node is False:
        return False
    if isinstance(node, int):
        return assignment.get(node)
    left, right = node  # type: ignore[misc]
    antecedent = _evaluate(left, assignment)
    if antecedent is False:
        return True
    consequent = _evaluate(right, assignment)
    if consequent is True:
        return True
    if antecedent is True and consequent is False:
        return False
    return None


def _valid(node: object, atom_count: int, assignment: dict[int, bool]) -> bool:
    value = _evaluate(node, assignment)
    if value is not None:
        return value
    atom = next(index for index in range(atom_count) if index not in assignment)
    for choice in (False, True):
        assignment[atom] = choice
        try:
            if not _valid(node, atom_count, assignment):
                return False
        finally:
            del assignment[atom]
    return True


# Axiom shapes ------------------------------------------------------------------


def is_axiom_k(f: Formula) -> bool:
    """□(X→Y)→(□X→□Y) の形かどうか。"""

    if not (isinstance(f, Implies) and isinstance(f.left, Box) and isinstance(f.right, Implies)):
        return False
    body = f.left.inner
    if not isinstance(body, Implies):
        return False
    return f.right.left == Box(body.left) and f.right.right == Box(body.right)


def is_axiom_wgl(f: Formula, n: int) -> bool:
    """□(□ⁿX→X)→□X の形かどうか。"""

    if not (isinstance(f, Implies) and isinstance(f.left, Box) and isinstance(f.right, Box)):
        return False
    body = f.left.inner
    if not isinstance(body, Implies):
        return False
    target = f.right.inner
    return body.right == target and body.left == box_power(n, target)


# Checker -----------------------------------------------------------------------


class ProofChecker:
    """証明書を 1 行ずつ検査し、最初に失敗した行を報告します。"""

    def __init__(self, n: int | LogicIndex, atom_budget: int = DEFAULT_ATOM_BUDGET) -> None:
        self.n = logic_n(n)
        self.atom_budget = atom_budget
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def check(self, cert: Certificate) -> CheckReport:
        if cert.logic != self.n:
            return CheckReport(False, None, f"証明書の n={cert.logic} がカーネルの n={self.n} と一致しません")
        if not cert.lines:
            return CheckReport(False, None, "証明行がありません")
        for position, line in enumerate(cert.lines):
            reason = self._check_line(position, line, cert.lines)
            if reason:
                self._logger.info("証明書の %d 行目で検査に失敗しました: %s", position, reason)
                return CheckReport(False, position, reason, position)
        if cert.lines[-1].formula != cert.goal:
            return CheckReport(False, len(cert.lines) - 1, "最終行がゴールと一致しません", len(cert.lines))
        self._logger.info("証明書を検査しました (%d 行)。", len(cert.lines))
        return CheckReport(True, None, "", len(cert.lines))

    def _check_line(self, position: int, line: ProofLine, lines: Sequence[ProofLine]) -> str:
        if line.index != position:
            return f"行番号 {line.index} が連続していません (期待値 {position})"
        for premise in line.premises:
            if isinstance(premise, bool) or not isinstance(premise, int):
                return f"前提番号 {premise!r} が整数ではありません"
            if not 0 <= premise < position:
                return f"前提番号 {premise} が範囲外です"
        formula = line.formula
        if line.rule == TAUT:
            if line.premises:
                return "taut は前提を取りません"
            try:
                ok = taut_check(formula, self.atom_budget)
            except TautologyBudgetError as exc:
                return str(exc)
            return "" if ok else "トートロジーではありません"
        if line.rule == AXIOM_K:
            if line.premises:
                return "axk は前提を取りません"
            return "" if is_axiom_k(formula) else "K 公理の形ではありません"
        if line.rule == AXIOM_WGL:
            if line.premises:
                return "axwgl は前提を取りません"
            if is_axiom_wgl(formula, self.n):
                return ""
            return f"n={self.n} の wGL 公理の形ではありません"
        if line.rule == MODUS_PONENS:
            if len(line.premises) != 2:
                return "mp は前提を 2 つ取ります"
            minor = lines[line.premises[0]].formula
            major = lines[line.premises[1]].formula
            if major != Implies(minor, formula):
                return "mp の大前提が「小前提 → 結論」の形ではありません"
            return ""
        if line.rule == NECESSITATION:
            if len(line.premises) != 1:
                return "nec は前提を 1 つ取ります"
            if formula != Box(lines[line.premises[0]].formula):
                return "nec の結論が前提の □ ではありません"
            return ""
        return f"未知の規則です: {line.rule!r}"


def check(cert: Certificate, n: int | LogicIndex | None = None, atom_budget: int = DEFAULT_ATOM_BUDGET) -> CheckReport:
    """証明書を検査します。n を省略すると証明書自身の n を使います。"""

    return ProofChecker(cert.logic if n is None else n, atom_budget).check(cert)
