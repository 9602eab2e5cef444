"""様相化された論理式の不動点を構成的に求めます。

□A の形の入力には 0-インスタンスとシフト置換列によるループ (n = 1 では
□A(⊤)) を使い、一般の入力は極大 □ 部分式への分解で連立系に帰着します。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .config import SynthConfig
from .depth import dep_mod, is_modalized, replace_by_residue
from .formula import (
    TOP,
    Box,
    Formula,
    Implies,
    LogicIndex,
    Variable,
    atoms,
    fresh_variable,
    iterate,
    logic_n,
    substitute,
    substitute_many,
)
from .kernel import DEFAULT_ATOM_BUDGET, Certificate


class ShapeError(ValueError):
    """入力の形 (□A であること、連立系の変数の数など) が合わない場合の例外。"""

    def __init__(self, reason: str, formula: Formula | None = None) -> None:
        self.reason = reason
        self.formula = formula
        super().__init__(reason)


class NotModalizedError(ValueError):
    """変数の出現が □ の外にある場合の例外。"""

    def __init__(self, variable: str, formula: Formula) -> None:
        self.variable = variable
        self.formula = formula
        super().__init__(f"formula is not modalized in {variable}")


class SynthesisInvariantError(RuntimeError):
    """構成の途中で不変条件が崩れた場合の例外 (内部不整合)。"""


@dataclass(frozen=True, slots=True)
class TraceStage:
    label: str
    formula: Formula
    kind: str
    base: Formula | None = None
    residue: int | None = None


@dataclass(slots=True)
class SynthTrace:
    input: Formula
    n: int
    var: str
    stages: list[TraceStage] = field(default_factory=list)

    def add(self, label: str, formula: Formula, kind: str, base: Formula | None = None, residue: int | None = None) -> Formula:
        self.stages.append(TraceStage(label, formula, kind, base, residue))
        return formula

    @property
    def result(self) -> Formula:
        return self.stages[-1].formula

    def labels(self) -> list[str]:
        return [stage.label for stage in self.stages]

    def stage(self, label: str) -> Formula:
        for item in self.stages:
            if item.label == label:
                return item.formula
        raise KeyError(label)


@dataclass(slots=True)
class BoxedPlan:
    """□A(p) 一つ分の解き方。certify はこれを辿って証明を組み立てます。"""

    boxed: Formula
    var: str
    fixed_point: Formula
    method: str
    trace: SynthTrace


@dataclass(slots=True)
class SystemPlan:
    system: tuple[Formula, ...]
    variables: tuple[str, ...]
    solutions: tuple[Formula, ...]
    head: "SystemPlan | None"
    last: BoxedPlan


@dataclass(slots=True)
class Decomposition:
    skeleton: Formula
    parts: tuple[Formula, ...]
    fresh: tuple[str, ...]


@dataclass(slots=True)
class ReductionPlan:
    formula: Formula
    var: str
    decomposition: Decomposition
    system: SystemPlan | None
    fixed_point: Formula


@dataclass(slots=True)
class FixedPointResult:
    fixed_point: Formula
    trace: SynthTrace
    certificate: Certificate | None = None
    plan: BoxedPlan | ReductionPlan | None = None


# Stage operators ------------------------------------------------------------------


def _require_box(boxed: Formula) -> Box:
    if not isinstance(boxed, Box):
        raise ShapeError("入力が □A の形ではありません", boxed)
    return boxed


def zero_instance(boxed: Formula, p: str, n: int | LogicIndex) -> Formula:
    """深さが 0 (mod n) の p をすべて ⊤ に置き換えた □A′ を返します。"""

    _require_box(boxed)
    return replace_by_residue(boxed, p, 0, n, TOP)


def shifting_sequence(boxed: Formula, p: str, k: int, n: int | LogicIndex, count: int) -> list[Formula]:
    """k-シフト置換列の先頭 count + 1 項 [□A₀, …, □A_count] を返します。"""

    _require_box(boxed)
    modulus = logic_n(n)
    if count < 1:
        raise ValueError(f"count は 1 以上で指定してください: {count}")
    sequence = [boxed]
    for i in range(count):
        sequence.append(replace_by_residue(sequence[-1], p, (k + i) % modulus, modulus, boxed))
    return sequence


def simple_fixed_point(boxed: Formula, p: str, n: int | LogicIndex) -> Formula | None:
    """dep_n が 1 点集合のときの簡単な不動点。該当しなければ None です。"""

    _require_box(boxed)
    modulus = logic_n(n)
    if modulus == 1:
        return substitute(boxed, p, TOP)
    residues = dep_mod(boxed, p, modulus)
    if residues == {0}:
        return substitute(boxed, p, TOP)
    if len(residues) == 1:
        return substitute(iterate(boxed, p, modulus), p, TOP)
    return None


# Synthesizer ------------------------------------------------------------------------


class FixedPointSynthesizer:
    """不動点の構成を担当します。証明書の生成は certify に委ねます。"""

    def __init__(
        self,
        n: int | LogicIndex,
        config: SynthConfig | None = None,
        atom_budget: int = DEFAULT_ATOM_BUDGET,
    ) -> None:
        self.n = logic_n(n)
        self.config = config or SynthConfig()
        self.atom_budget = atom_budget
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def boxed_plan(self, boxed: Formula, p: str, prefer_shortcut: bool | None = None) -> BoxedPlan:
        _require_box(boxed)
        shortcut = self.config.prefer_shortcut if prefer_shortcut is None else prefer_shortcut
        n = self.n
        trace = SynthTrace(boxed, n, p)
        trace.add("B_0", boxed, "input")
        if p not in atoms(boxed):
            trace.add("fixed_point", boxed, "shortcut")
            return BoxedPlan(boxed, p, boxed, "absent", trace)
        if n == 1:
            fixed = trace.add("fixed_point", substitute(boxed, p, TOP), "shortcut")
            return BoxedPlan(boxed, p, fixed, "gl_top", trace)
        residues = dep_mod(boxed, p, n)
        if shortcut and len(residues) == 1:
            method = "zero_residue" if residues == {0} else "single_residue"
            fixed = simple_fixed_point(boxed, p, n)
            assert fixed is not None
            trace.add("fixed_point", fixed, "shortcut")
            self._logger.info("簡単な不動点 (%s) を使います。", method)
            return BoxedPlan(boxed, p, fixed, method, trace)
        self._run_loop(trace, boxed, p)
        return BoxedPlan(boxed, p, trace.result, "loop", trace)

    def _run_loop(self, trace: SynthTrace, boxed: Formula, p: str) -> None:
        n = self.n
        current = boxed
        for k in range(n - 1):
            base = trace.add(f"B_{k}'", zero_instance(current, p, n), "zero_instance", current, 0)
            shift = n - k - 1
            sequence = shifting_sequence(base, p, shift, n, k + 1)
            for j, formula in enumerate(sequence[1:], start=1):
                label = f"B_{k + 1}" if j == k + 1 else f"C_{k},{j}"
                trace.add(label, formula, "shift", base, (shift + j - 1) % n)
            current = sequence[-1]
            residues = dep_mod(current, p, n)
            if not residues <= set(range(n - k - 1)):
                raise SynthesisInvariantError(
                    f"B_{k + 1} の dep_n が {sorted(residues)} で、{{0..{n - k - 2}}} に収まっていません"
                )
            self._logger.info("B_%d を構成しました (dep_n = %s)。", k + 1, sorted(residues))
        trace.add("fixed_point", substitute(current, p, TOP), "top")

    def system_plan(
        self,
        system: Sequence[Formula],
        variables: Sequence[str],
        prefer_shortcut: bool | None = None,
    ) -> SystemPlan:
        if len(system) != len(variables) or not system:
            raise ShapeError(f"連立系の式の数 {len(system)} と変数の数 {len(variables)} が一致しません")
        if len(set(variables)) != len(variables):
            raise ShapeError("連立系の変数が重複しています")
        for item in system:
            _require_box(item)
        if len(system) == 1:
            last = self.boxed_plan(system[0], variables[0], prefer_shortcut)
            return SystemPlan(tuple(system), tuple(variables), (last.fixed_point,), None, last)
        head = self.system_plan(system[:-1], variables[:-1], prefer_shortcut)
        pivot = variables[-1]
        reduced = substitute_many(system[-1], dict(zip(variables[:-1], head.solutions)))
        last = self.boxed_plan(reduced, pivot, prefer_shortcut)
        solutions = tuple(substitute(f, pivot, last.fixed_point) for f in head.solutions) + (last.fixed_point,)
        return SystemPlan(tuple(system), tuple(variables), solutions, head, last)

    def solve(self, a: Formula, p: str, want_cert: bool | None = None, prefer_shortcut: bool | None = None) -> FixedPointResult:
        want = self.config.certify if want_cert is None else want_cert
        if not is_modalized(a, p):
            raise NotModalizedError(p, a)
        if p not in atoms(a):
            trace = SynthTrace(a, self.n, p)
            trace.add("B_0", a, "input")
            trace.add("fixed_point", a, "shortcut")
            plan: BoxedPlan | ReductionPlan = ReductionPlan(a, p, Decomposition(a, (), ()), None, a)
            result = FixedPointResult(a, trace, None, plan)
        elif isinstance(a, Box):
            boxed = self.boxed_plan(a, p, prefer_shortcut)
            result = FixedPointResult(boxed.fixed_point, boxed.trace, None, boxed)
        else:
            result = self._solve_reduction(a, p, prefer_shortcut)
        self._check_hygiene(a, p, result.fixed_point)
        if want:
            from .certify import certify_result

            result.certificate = certify_result(
                a, p, result, self.n, check=self.config.check_certificates, atom_budget=self.atom_budget
            )
        return result

    def _solve_reduction(self, a: Formula, p: str, prefer_shortcut: bool | None) -> FixedPointResult:
        parts = decompose(a, p)
        # □C_i(p) ↦ □C_i(B(q_1, …, q_m))
        system = [substitute(part, p, parts.skeleton) for part in parts.parts]
        plan = self.system_plan(system, parts.fresh, prefer_shortcut)
        fixed = substitute_many(parts.skeleton, dict(zip(parts.fresh, plan.solutions)))
        trace = SynthTrace(a, self.n, p)
        trace.add("B_0", a, "input")
        for index, (name, solution) in enumerate(zip(parts.fresh, plan.solutions)):
            trace.add(f"F_{index}", solution, "system", parts.parts[index], None)
            self._logger.debug("%s の解を求めました。", name)
        trace.add("fixed_point", fixed, "skeleton")
        reduction = ReductionPlan(a, p, parts, plan, fixed)
        return FixedPointResult(fixed, trace, None, reduction)

    def _check_hygiene(self, a: Formula, p: str, fixed: Formula) -> None:
        allowed = atoms(a) - {p}
        found = atoms(fixed)
        if not found <= allowed:
            raise SynthesisInvariantError(f"不動点に許されない変数が含まれています: {sorted(found - allowed)}")


# Decomposition --------------------------------------------------------------------


def decompose(a: Formula, p: str) -> Decomposition:
    """極大 □ 部分式を新しい変数で抽象化し、□ を含まない骨格を返します。

    同じ □ 部分式は同じ変数を共有し、変数は左から初出順に番号付けします。
    """

    if not is_modalized(a, p):
        raise NotModalizedError(p, a)
    avoid = set(atoms(a))
    names: dict[Formula, str] = {}
    parts: list[Formula] = []
    fresh: list[str] = []

    def walk(node: Formula) -> Formula:
        if isinstance(node, Box):
            name = names.get(node)
            if name is None:
                name = fresh_variable(avoid)
                avoid.add(name)
                names[node] = name
                parts.append(node)
                fresh.append(name)
            return Variable(name)
        if isinstance(node, Implies):
            left = walk(node.left)
            right = walk(node.right)
            return node if left is node.left and right is node.right else Implies(left, right)
        return node

    skeleton = walk(a)
    return Decomposition(skeleton, tuple(parts), tuple(fresh))


# Module-level entry points -------------------------------------------------------------


def boxed_fixed_point(
    boxed: Formula,
    p: str,
    n: int | LogicIndex,
    want_cert: bool = False,
    config: SynthConfig | None = None,
) -> FixedPointResult:
    """□A(p) の不動点を返します。n = 1 では □A(⊤) です。"""

    synthesizer = FixedPointSynthesizer(n, config or SynthConfig(prefer_shortcut=False))
    _require_box(boxed)
    return synthesizer.solve(boxed, p, want_cert)


def simultaneous_fixed_points(
    system: Sequence[Formula],
    variables: Sequence[str],
    n: int | LogicIndex,
    config: SynthConfig | None = None,
) -> list[Formula]:
    plan = FixedPointSynthesizer(n, config).system_plan(system, variables)
    return list(plan.solutions)


def fixed_point(
    a: Formula,
    p: str,
    n: int | LogicIndex,
    want_cert: bool = False,
    config: SynthConfig | None = None,
) -> FixedPointResult:
    return FixedPointSynthesizer(n, config).solve(a, p, want_cert)
