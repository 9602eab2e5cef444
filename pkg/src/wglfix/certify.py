"""合成された不動点 F について ⊢ F ↔ A(F) の証明書を組み立てます。

synthesis が残した計画 (BoxedPlan / SystemPlan / ReductionPlan) を逆順に辿り、
0-インスタンス・置換列・連立系・分解の各段を propositions の命題で繋ぎます。
"""

from __future__ import annotations

import logging

from .depth import replace_by_residue
from .derivation import DerivationError, ProofBuilder
from .formula import (
    FALSUM,
    TOP,
    Box,
    Formula,
    Implies,
    LogicIndex,
    Variable,
    atoms,
    box_power,
    boxdot,
    conj,
    conj_all,
    dia,
    dia_power,
    fresh_variable,
    iff,
    neg,
    substitute,
)
from .kernel import DEFAULT_ATOM_BUDGET, Certificate
from .kernel import check as check_certificate
from .propositions import lob, power_unfolding, subst_box, top_unfolding
from .synthesis import BoxedPlan, FixedPointResult, ReductionPlan, SystemPlan

logger = logging.getLogger(__name__)


def boxed_line(builder: ProofBuilder, plan: BoxedPlan) -> int:
    """⊢ F ↔ □A(F) の行を返します。"""

    boxed, p, fixed = plan.boxed, plan.var, plan.fixed_point
    if plan.method == "absent":
        return builder.taut(iff(boxed, boxed))
    if plan.method in ("gl_top", "zero_residue"):
        return top_unfolding(builder, boxed, p)
    if plan.method == "single_residue":
        return power_unfolding(builder, boxed, p)
    if plan.method != "loop":
        raise DerivationError("certify", f"未知の構成方法です: {plan.method!r}")

    stages = plan.trace.stages
    if stages[0].formula != boxed or stages[-1].formula != fixed:
        raise DerivationError("certify", "トレースが入力と一致しません")
    groups: list[tuple[Formula, Formula, list[Formula], list[int]]] = []
    for stage in stages[1:-1]:
        if stage.kind == "zero_instance":
            assert stage.base is not None
            groups.append((stage.base, stage.formula, [stage.formula], []))
        elif stage.kind == "shift":
            if not groups or stage.residue is None:
                raise DerivationError("certify", "シフト段の前に 0-インスタンスがありません")
            groups[-1][2].append(stage.formula)
            groups[-1][3].append(stage.residue)
        else:
            raise DerivationError("certify", f"ループのトレースに想定外の段があります: {stage.kind}")
    last = stages[-2].formula
    if substitute(last, p, TOP) != fixed:
        raise DerivationError("certify", "最後の段に ⊤ を代入した式が不動点と一致しません")
    line = top_unfolding(builder, last, p)
    for original, zero, sequence, residues in reversed(groups):
        line = _sequence_lemma(builder, sequence, residues, p, fixed, line)
        line = _zero_instance_lemma(builder, original, zero, p, fixed, line)
    return line


def _sequence_lemma(
    builder: ProofBuilder,
    sequence: list[Formula],
    residues: list[int],
    p: str,
    fixed: Formula,
    line: int,
) -> int:
    """⊢ F ↔ □A_i(F) から ⊢ F ↔ □A(F) を導きます (□A = sequence[0])。"""

    n = builder.n
    base = sequence[0]
    target = substitute(base, p, fixed)
    equivalence = iff(fixed, target)
    if len(sequence) == 1:
        return line
    hole = fresh_variable(atoms(base) | atoms(fixed) | {p})
    steps: list[int] = []
    for j, residue in enumerate(residues):
        context = replace_by_residue(sequence[j], p, residue, n, Variable(hole))
        if substitute(context, hole, base) != sequence[j + 1]:
            raise DerivationError("certify", f"置換列の {j + 1} 番目が k-シフトの形ではありません")
        instantiated = substitute(context, p, fixed)
        assert isinstance(instantiated, Box)
        steps.append(subst_box(builder, instantiated.inner, {hole: (fixed, target)}))
    premise = builder.chain([*steps, line], Implies(boxdot(n, equivalence), equivalence))
    return lob(builder, premise)


def _zero_instance_lemma(
    builder: ProofBuilder,
    boxed: Formula,
    zero: Formula,
    p: str,
    fixed: Formula,
    line: int,
) -> int:
    """⊢ F ↔ □A′(F) から ⊢ F ↔ □A(F) を導きます (□A′ は □A の 0-インスタンス)。"""

    if zero == boxed:
        return line
    hole = fresh_variable(atoms(boxed) | atoms(fixed) | {p})
    context = replace_by_residue(boxed, p, 0, builder.n, Variable(hole))
    instantiated = substitute(context, p, fixed)
    unfold = top_unfolding(builder, instantiated, hole)
    swap = builder.replace(instantiated, {hole: line})
    return builder.chain([line, unfold, swap], iff(fixed, substitute(boxed, p, fixed)))


def system_lines(builder: ProofBuilder, plan: SystemPlan) -> list[int]:
    """連立系の各解 Sᵢ について ⊢ Sᵢ ↔ □Bᵢ(S₁, …, S_m) の行を返します。"""

    last = boxed_line(builder, plan.last)
    if plan.head is None:
        return [last]
    pivot = plan.variables[-1]
    fixed = plan.last.fixed_point
    head = system_lines(builder, plan.head)
    replayed = [builder.replay(builder.lines, index, {pivot: fixed}) for index in head]
    return [*replayed, last]


def reduction_line(builder: ProofBuilder, plan: ReductionPlan) -> int:
    if plan.system is None:
        return builder.taut(iff(plan.formula, plan.formula))
    lines = system_lines(builder, plan.system)
    holes = dict(zip(plan.decomposition.fresh, lines))
    return builder.replace(plan.decomposition.skeleton, holes)


def derive_fixed_point_cert(
    a: Formula,
    p: str,
    result: FixedPointResult,
    n: int | LogicIndex,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> Certificate:
    """FixedPointResult の計画から ⊢ F ↔ A(F) の証明書を作ります。"""

    builder = ProofBuilder(n, atom_budget)
    return builder.certificate(fixed_point_line(builder, a, p, result))


def fixed_point_line(builder: ProofBuilder, a: Formula, p: str, result: FixedPointResult) -> int:
    plan = result.plan
    if plan is None or result.trace.n != builder.n:
        raise DerivationError("certify", "構成の計画がないか、n が一致しません")
    if isinstance(plan, BoxedPlan):
        if plan.boxed != a or plan.var != p:
            raise DerivationError("certify", "トレースが入力と一致しません")
        line = boxed_line(builder, plan)
    else:
        if plan.formula != a or plan.var != p:
            raise DerivationError("certify", "トレースが入力と一致しません")
        line = reduction_line(builder, plan)
    goal = iff(result.fixed_point, substitute(a, p, result.fixed_point))
    if builder.formula(line) != goal:
        raise DerivationError("certify", "導出した同値式が F ↔ A(F) と一致しません")
    return line


def certify_result(
    a: Formula,
    p: str,
    result: FixedPointResult,
    n: int | LogicIndex,
    check: bool = True,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> Certificate:
    """証明書を作り、check が真ならカーネルで検査してから返します。"""

    cert = derive_fixed_point_cert(a, p, result, n, atom_budget)
    if check:
        _require_ok(cert, atom_budget)
    logger.info("不動点の証明書を作成しました (%d 行)。", len(cert.lines))
    return cert


def _require_ok(cert: Certificate, atom_budget: int) -> None:
    report = check_certificate(cert, cert.logic, atom_budget)
    if not report.ok:
        raise DerivationError("certify", f"証明書が検査に通りません ({report.line} 行目: {report.reason})")


# wGL_3 の例: □²◇²⊤ ↔ □²◇²□²⊥ -----------------------------------------------------------


def known_equivalence_sides() -> tuple[Formula, Formula]:
    x = dia_power(2, TOP)
    return box_power(2, x), box_power(2, dia_power(2, box_power(2, FALSUM)))


def known_equivalence_line(builder: ProofBuilder) -> int:
    if builder.n != 3:
        raise DerivationError("known", "この同値式は n = 3 でだけ導出します")
    left, right = known_equivalence_sides()
    x = dia_power(2, TOP)

    # (←)
    seed = builder.taut(Implies(box_power(2, FALSUM), TOP))
    backward = builder.regularity(builder.dia_mono(seed, 2), 2)

    # (→) まず D → ◇³D
    d = conj_all([x, box_power(2, x), box_power(3, x)])
    boxed_d = Box(d)
    lift_5 = builder.trans(Box(x))
    lift_6 = builder.trans(box_power(2, x))
    gather_3 = builder.box_conj_intro(3, [x, box_power(2, x), box_power(3, x)])
    gather_2 = builder.box_conj_intro(2, [x, boxed_d])
    merge_2 = builder.dia_box_merge(2, TOP, conj(x, boxed_d))
    weaken = builder.dia_mono(builder.taut(Implies(dia(TOP), TOP)), 1)
    merge_1 = builder.dia_box_merge(1, TOP, d)
    drop_top = builder.dia_mono(builder.taut(Implies(conj(TOP, d), d)), 1)
    inner = builder.chain(
        [weaken, merge_1, drop_top],
        Implies(conj(TOP, conj(x, boxed_d)), dia(d)),
    )
    outer = builder.dia_mono(inner, 2)
    progress = builder.chain(
        [lift_5, lift_6, gather_3, gather_2, merge_2, outer],
        Implies(d, dia_power(3, d)),
    )

    # □³¬D → ¬D、Lob で ¬D
    not_d = neg(d)
    unfold = builder.derive_implication(box_power(3, not_d), neg(dia_power(3, d)))
    if unfold is None:
        raise DerivationError("known", "□³¬D → ¬◇³D を導けませんでした")
    step = builder.chain([unfold, progress], Implies(box_power(3, not_d), not_d))
    refuted = lob(builder, builder.chain([step], Implies(boxdot(3, not_d), not_d)))

    # □²X ∧ ◇²□²X → ◇²D
    y = box_power(2, x)
    lift_y = builder.trans(Box(x))
    pack = builder.box_conj_intro(2, [x, box_power(3, x)])
    merge_y = builder.dia_box_merge(2, y, conj(x, box_power(3, x)))
    reorder = builder.dia_mono(builder.taut(Implies(conj(y, conj(x, box_power(3, x))), d)), 2)
    reach = builder.chain(
        [lift_y, pack, merge_y, reorder],
        Implies(conj(y, dia_power(2, y)), dia_power(2, d)),
    )
    boxed_not_d = builder.nec(builder.nec(refuted))
    bridge = builder.derive_implication(box_power(2, not_d), neg(dia_power(2, d)))
    if bridge is None:
        raise DerivationError("known", "□²¬D → ¬◇²D を導けませんでした")
    unreachable = builder.mp(boxed_not_d, bridge)
    halfway = builder.chain([reach, unreachable], Implies(left, neg(dia_power(2, y))))
    rewrite = builder.derive_implication(neg(dia_power(2, y)), right)
    if rewrite is None:
        raise DerivationError("known", "¬◇²□²◇²⊤ → □²◇²□²⊥ を導けませんでした")
    forward = builder.chain([halfway, rewrite], Implies(left, right))
    return builder.chain([forward, backward], iff(left, right))


def derive_known_equivalence(atom_budget: int = DEFAULT_ATOM_BUDGET) -> Certificate:
    """wGL_3 ⊢ □²◇²⊤ ↔ □²◇²□²⊥ の証明書を返します。"""

    builder = ProofBuilder(3, atom_budget)
    return builder.certificate(known_equivalence_line(builder))
