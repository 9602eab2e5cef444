"""wGL_n の基本命題を証明行として組み立てるコンビネータ。

各関数は ProofBuilder に行を追記して結論の行番号を返します。`derive_*` は
それを独立した Certificate に切り出す公開ラッパーです。
"""

from __future__ import annotations

from typing import Sequence

from .depth import dep, dep_mod
from .derivation import DerivationError, ProofBuilder
from .formula import (
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
    iff,
    iterate,
    logic_n,
    split_iff,
    substitute,
    substitute_many,
)
from .kernel import DEFAULT_ATOM_BUDGET, Certificate, check

SUBST_KINDS = ("plus", "box", "residue", "modalized")


class SideConditionError(ValueError):
    """置換命題の適用条件 (dep_n に関する条件) を満たさない場合の例外。"""

    def __init__(self, kind: str, residues: frozenset[int], n: int) -> None:
        self.kind = kind
        self.residues = residues
        self.n = n
        tokens = ", ".join(f"[{r}]_{n}" for r in sorted(residues)) or "なし"
        super().__init__(f"{kind} 型の置換の適用条件を満たしません (dep_n = {{{tokens}}})")


def trans(builder: ProofBuilder, a: Formula) -> int:
    """⊢ □A → □ⁿ⁺¹A"""

    return builder.trans(a)


def top_box_equivalence(builder: ProofBuilder) -> int:
    """⊢ □⊤ ↔ ⊤"""

    boxed_top = builder.nec(builder.taut(TOP))
    return builder.chain([boxed_top], iff(Box(TOP), TOP))


# Congruence with several holes -----------------------------------------------------


class _MultiHole:
    """⊞ₙ⁺ / ⊞ₙ を仮定とする同値置換。穴は変数名で指定します。"""

    def __init__(self, builder: ProofBuilder, pairs: dict[str, tuple[Formula, Formula]]) -> None:
        self.builder = builder
        self.pairs = pairs
        n = builder.n
        self.equivalence = conj_all([iff(x, y) for x, y in pairs.values()])
        self.plus_items = [box_power(j, self.equivalence) for j in range(n + 1)]
        self.plus = conj_all(self.plus_items)
        self.box_hypothesis = boxdot(n, self.equivalence)
        self._plus_memo: dict[Formula, int] = {}
        self._box_memo: dict[Formula, int] = {}

    def sides(self, context: Formula) -> tuple[Formula, Formula]:
        left = substitute_many(context, {name: pair[0] for name, pair in self.pairs.items()})
        right = substitute_many(context, {name: pair[1] for name, pair in self.pairs.items()})
        return left, right

    def plus_line(self, context: Formula) -> int:
        cached = self._plus_memo.get(context)
        if cached is not None:
            return cached
        builder = self.builder
        x, y = self.sides(context)
        goal = Implies(self.plus, iff(x, y))
        if isinstance(context, Variable) and context.name in self.pairs:
            result = builder.taut(goal)
        elif not (atoms(context) & self.pairs.keys()):
            result = builder.taut(goal)
        elif isinstance(context, Implies):
            left = self.plus_line(context.left)
            right = self.plus_line(context.right)
            result = builder.chain([left, right], goal)
        else:
            assert isinstance(context, Box)
            result = builder.chain([self.box_line(context.inner)], goal)
        self._plus_memo[context] = result
        return result

    def box_line(self, context: Formula) -> int:
        """⊞ₙE → (□C(A) ↔ □C(B))"""

        cached = self._box_memo.get(context)
        if cached is not None:
            return cached
        builder = self.builder
        x, y = self.sides(context)
        lifted = builder.box_lift(self.plus_line(context), self.plus_items)
        distribute = builder.box_iff(x, y)
        widen = builder.trans(self.equivalence)
        result = builder.chain(
            [widen, lifted, distribute],
            Implies(self.box_hypothesis, iff(Box(x), Box(y))),
        )
        self._box_memo[context] = result
        return result


# Congruence with one hole, refined by residues ------------------------------------------


class _SingleHole:
    def __init__(self, builder: ProofBuilder, p: str, a: Formula, b: Formula) -> None:
        self.builder = builder
        self.p = p
        self.a = a
        self.b = b
        self.equivalence = iff(a, b)
        self._memo: dict[tuple[Formula, int], int] = {}

    def hypothesis(self, residue: int) -> Formula:
        if residue == 0:
            return conj(self.equivalence, box_power(self.builder.n, self.equivalence))
        return box_power(residue, self.equivalence)

    def sides(self, context: Formula) -> tuple[Formula, Formula]:
        return substitute(context, self.p, self.a), substitute(context, self.p, self.b)

    def residue_line(self, context: Formula, residue: int) -> int:
        """hypothesis(residue) → (C(A) ↔ C(B))"""

        key = (context, residue)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        builder = self.builder
        x, y = self.sides(context)
        goal = Implies(self.hypothesis(residue), iff(x, y))
        if self.p not in atoms(context):
            result = builder.taut(goal)
        elif isinstance(context, Variable):
            result = builder.taut(goal)
        elif isinstance(context, Implies):
            left = self.residue_line(context.left, residue)
            right = self.residue_line(context.right, residue)
            result = builder.chain([left, right], goal)
        else:
            assert isinstance(context, Box)
            result = builder.chain([self.box_line(context.inner, residue)], goal)
        self._memo[key] = result
        return result

    def box_line(self, inner: Formula, residue: int) -> int:
        """□ᵏ(A↔B) → (□D(A) ↔ □D(B))。k は residue (0 のときは n)。"""

        builder = self.builder
        n = builder.n
        below = residue - 1 if residue else n - 1
        x, y = self.sides(inner)
        distribute = builder.box_iff(x, y)
        premise = box_power(residue if residue else n, self.equivalence)
        goal = Implies(premise, iff(Box(x), Box(y)))
        if below != 0:
            step = self.residue_line(inner, below)
            lifted = builder.box_lift(step, [self.hypothesis(below)])
            return builder.chain([lifted, distribute], goal)
        step = self.residue_line(inner, 0)
        lifted = builder.box_lift(step, [self.equivalence, box_power(n, self.equivalence)])
        widen = builder.trans(self.equivalence)
        return builder.chain([widen, lifted, distribute], goal)

    def modalized_line(self, context: Formula) -> int:
        """□ⁿ(A↔B) → (C(A) ↔ C(B))。C は p について様相化されている前提です。"""

        builder = self.builder
        x, y = self.sides(context)
        goal = Implies(box_power(builder.n, self.equivalence), iff(x, y))
        if self.p not in atoms(context):
            return builder.taut(goal)
        if isinstance(context, Implies):
            left = self.modalized_line(context.left)
            right = self.modalized_line(context.right)
            return builder.chain([left, right], goal)
        if isinstance(context, Box):
            return self.box_line(context.inner, 0)
        raise DerivationError("subst", "様相化されていない出現があります")


def subst_plus(builder: ProofBuilder, context: Formula, pairs: dict[str, tuple[Formula, Formula]]) -> int:
    """⊢ ⊞ₙ⁺⋀(Aⱼ↔Bⱼ) → (C(A) ↔ C(B))"""

    return _MultiHole(builder, pairs).plus_line(context)


def subst_box(builder: ProofBuilder, context: Formula, pairs: dict[str, tuple[Formula, Formula]]) -> int:
    """⊢ ⊞ₙ⋀(Aⱼ↔Bⱼ) → (□C(A) ↔ □C(B))"""

    return _MultiHole(builder, pairs).box_line(context)


def subst_residue(builder: ProofBuilder, context: Formula, p: str, a: Formula, b: Formula) -> int:
    """dep_n(C,p) = {[i]ₙ} (0<i<n) のとき ⊢ □ⁱ(A↔B) → (C(A) ↔ C(B))"""

    residues = dep_mod(context, p, builder.n)
    if len(residues) != 1 or 0 in residues:
        raise SideConditionError("residue", residues, builder.n)
    (residue,) = residues
    return _SingleHole(builder, p, a, b).residue_line(context, residue)


def subst_modalized(builder: ProofBuilder, context: Formula, p: str, a: Formula, b: Formula) -> int:
    """dep_n(C,p) ⊆ {[0]ₙ} かつ 0 ∉ dep(C,p) のとき ⊢ □ⁿ(A↔B) → (C(A) ↔ C(B))"""

    residues = dep_mod(context, p, builder.n)
    if not residues <= {0} or 0 in dep(context, p):
        raise SideConditionError("modalized", residues, builder.n)
    return _SingleHole(builder, p, a, b).modalized_line(context)


# Lob-like rule and equivalence under boxes ---------------------------------------------


def lob(builder: ProofBuilder, premise: int) -> int:
    """⊢ ⊞ₙA → A の行から ⊢ A を導きます。"""

    n = builder.n
    formula = builder.formula(premise)
    if not isinstance(formula, Implies):
        raise DerivationError("lob", "前提が含意ではありません")
    a = formula.right
    if formula.left != boxdot(n, a):
        raise DerivationError("lob", "前提の前件が ⊞ₙA の形ではありません")
    powers = [box_power(j, a) for j in range(n + 2)]
    plus = conj_all(powers[: n + 1])
    # S_k: □^{k+1}A ∧ … ∧ □ⁿA → ⊞ₙ⁺A
    base = builder.chain([premise], Implies(formula.left, plus))
    current = base
    extractions = [builder.regularity(builder.taut(Implies(plus, powers[j]))) for j in range(n)]
    axiom = builder.axiom_wgl(a)
    widen = builder.trans(a)
    for k in range(n - 1):
        items = powers[k + 1 : n + 1]
        lifted = builder.box_lift(current, items)
        lower = items[:-1]
        reduced = builder.chain([current], Implies(conj_all(lower), Implies(powers[n], a)))
        reduced_lifted = builder.box_lift(reduced, lower)
        current = builder.chain(
            [lifted, *extractions, reduced_lifted, axiom, widen, base],
            Implies(conj_all(powers[k + 2 : n + 1]), plus),
        )
    closing = builder.chain([current], Implies(powers[n], a))
    boxed_a = builder.mp(builder.nec(closing), axiom)
    top = boxed_a
    for _ in range(n - 1):
        top = builder.nec(top)
    return builder.mp(top, closing)


def equiv_box(builder: ProofBuilder, premise: int) -> int:
    """⊢ □ⁿA → (A ↔ B) の行から ⊢ □A ↔ □B を導きます。"""

    n = builder.n
    formula = builder.formula(premise)
    if not isinstance(formula, Implies):
        raise DerivationError("equiv", "前提が含意ではありません")
    a = _box_base(formula.left, n)
    parts = split_iff(formula.right)
    if a is None or parts is None or parts[0] != a:
        raise DerivationError("equiv", "前提が □ⁿA → (A ↔ B) の形ではありません")
    b = parts[1]
    forward_seed = builder.chain([premise], Implies(a, Implies(box_power(n, a), b)))
    forward_boxed = builder.box_curried(forward_seed, 2)
    forward = builder.chain([forward_boxed, builder.trans(a)], Implies(Box(a), Box(b)))
    backward_seed = builder.chain([premise], Implies(b, Implies(box_power(n, a), a)))
    backward = builder.chain(
        [builder.regularity(backward_seed), builder.axiom_wgl(a)],
        Implies(Box(b), Box(a)),
    )
    return builder.chain([forward, backward], iff(Box(a), Box(b)))


def _box_base(formula: Formula, n: int) -> Formula | None:
    for _ in range(n):
        if not isinstance(formula, Box):
            return None
        formula = formula.inner
    return formula


# Simple fixed points -----------------------------------------------------------------


def top_unfolding(builder: ProofBuilder, boxed: Formula, p: str) -> int:
    """dep_n(□A,p) ⊆ {[0]ₙ} のとき ⊢ □A(⊤) ↔ □A(□A(⊤))"""

    n = builder.n
    if not isinstance(boxed, Box):
        raise DerivationError("top_unfolding", "□A の形ではありません")
    residues = dep_mod(boxed, p, n)
    if not residues <= {0}:
        raise SideConditionError("top_unfolding", residues, n)
    body = boxed.inner
    instance = substitute(body, p, TOP)
    fixed = Box(instance)
    unfolded = substitute(body, p, fixed)
    goal = iff(fixed, Box(unfolded))
    if p not in atoms(body):
        return builder.taut(goal)
    shifted = substitute(body, p, Box(Variable(p)))
    seed = builder.regularity(builder.taut(Implies(instance, iff(TOP, instance))), n)
    congruence = subst_modalized(builder, shifted, p, TOP, instance)
    collapse = builder.replace(body, {p: top_box_equivalence(builder)})
    premise = builder.chain(
        [seed, congruence, collapse],
        Implies(box_power(n, instance), iff(instance, unfolded)),
    )
    return equiv_box(builder, premise)


def power_unfolding(builder: ProofBuilder, boxed: Formula, p: str) -> int:
    """dep_n(□A,p) = {[i]ₙ} (0<i<n) のとき ⊢ (□A)ⁿ(⊤) ↔ (□A)ⁿ⁺¹(⊤)"""

    n = builder.n
    if not isinstance(boxed, Box):
        raise DerivationError("power_unfolding", "□A の形ではありません")
    residues = dep_mod(boxed, p, n)
    if len(residues) != 1 or 0 in residues:
        raise SideConditionError("power_unfolding", residues, n)
    body = boxed.inner
    power = iterate(boxed, p, n)
    assert isinstance(power, Box)
    doubled = top_unfolding(builder, power, p)
    inner_power = power.inner
    g_n = substitute(power, p, TOP)
    g_2n = substitute(power, p, g_n)
    lifted_body = substitute(body, p, g_n)
    lowered_body = substitute(inner_power, p, TOP)
    shifted = substitute(inner_power, p, Box(Variable(p)))
    seed = builder.regularity(builder.taut(Implies(lifted_body, iff(TOP, lifted_body))), n)
    congruence = subst_modalized(builder, shifted, p, TOP, lifted_body)
    unfold = builder.replace(body, {p: doubled})
    collapse = builder.replace(inner_power, {p: top_box_equivalence(builder)})
    if builder.formula(unfold) != iff(lifted_body, substitute(body, p, g_2n)):
        raise DerivationError("power_unfolding", "(□A)ⁿ(⊤) の置換結果が期待した形ではありません")
    premise = builder.chain(
        [seed, congruence, unfold, collapse],
        Implies(box_power(n, lifted_body), iff(lifted_body, lowered_body)),
    )
    swapped = equiv_box(builder, premise)
    return builder.chain([swapped], iff(g_n, Box(lifted_body)))


# Certificate-level wrappers ------------------------------------------------------------


def derive_trans(a: Formula, n: int | LogicIndex, atom_budget: int = DEFAULT_ATOM_BUDGET) -> Certificate:
    builder = ProofBuilder(n, atom_budget)
    return builder.certificate(trans(builder, a))


def derive_subst(
    kind: str,
    context: Formula,
    pairs: Sequence[tuple[Formula, Formula]],
    p: str | Sequence[str],
    n: int | LogicIndex,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> Certificate:
    """置換命題 4 種の証明書を作ります。

    plus と box は穴を複数取れます (p に変数名の列を渡す)。residue と
    modalized は穴 1 つ、組 1 つだけです。
    """

    if kind not in SUBST_KINDS:
        raise ValueError(f"未知の置換の種類です: {kind!r} (候補: {', '.join(SUBST_KINDS)})")
    holes = [p] if isinstance(p, str) else list(p)
    if len(holes) != len(pairs) or not holes:
        raise DerivationError("subst", "穴の数と組の数が一致しません")
    builder = ProofBuilder(n, atom_budget)
    if kind in ("plus", "box"):
        mapping = dict(zip(holes, pairs))
        if kind == "plus":
            return builder.certificate(subst_plus(builder, context, mapping))
        return builder.certificate(subst_box(builder, context, mapping))
    if len(holes) != 1:
        raise DerivationError("subst", f"{kind} 型の置換は穴を 1 つだけ取ります")
    (a, b), hole = pairs[0], holes[0]
    if kind == "residue":
        return builder.certificate(subst_residue(builder, context, hole, a, b))
    return builder.certificate(subst_modalized(builder, context, hole, a, b))


def derive_lob(
    premise: Certificate,
    a: Formula,
    n: int | LogicIndex,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> Certificate:
    modulus = logic_n(n)
    _require_premise(premise, modulus, Implies(boxdot(modulus, a), a), "lob", atom_budget)
    builder = ProofBuilder(modulus, atom_budget)
    return builder.certificate(lob(builder, builder.include(premise)))


def derive_equiv_box(
    premise: Certificate,
    a: Formula,
    b: Formula,
    n: int | LogicIndex,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> Certificate:
    modulus = logic_n(n)
    _require_premise(premise, modulus, Implies(box_power(modulus, a), iff(a, b)), "equiv", atom_budget)
    builder = ProofBuilder(modulus, atom_budget)
    return builder.certificate(equiv_box(builder, builder.include(premise)))


def derive_top_unfolding(boxed: Formula, p: str, n: int | LogicIndex, atom_budget: int = DEFAULT_ATOM_BUDGET) -> Certificate:
    builder = ProofBuilder(n, atom_budget)
    return builder.certificate(top_unfolding(builder, boxed, p))


def derive_power_unfolding(boxed: Formula, p: str, n: int | LogicIndex, atom_budget: int = DEFAULT_ATOM_BUDGET) -> Certificate:
    builder = ProofBuilder(n, atom_budget)
    return builder.certificate(power_unfolding(builder, boxed, p))


def _require_premise(premise: Certificate, n: int, goal: Formula, rule: str, atom_budget: int) -> None:
    if premise.logic != n:
        raise DerivationError(rule, f"前提の証明書の n={premise.logic} が指定の n={n} と一致しません")
    if premise.goal != goal:
        raise DerivationError(rule, "前提の証明書のゴールが期待した形ではありません")
    report = check(premise, n, atom_budget)
    if not report.ok:
        raise DerivationError(rule, f"前提の証明書が検査に通りません ({report.line} 行目: {report.reason})")
