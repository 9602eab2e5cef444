"""証明を組み立てる非信頼側のビルダーと派生規則。

ここで作った行はすべて kernel の 5 規則に展開済みで、最終的に
`ProofBuilder.certificate` が到達可能な行だけを番号付け直して取り出します。
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .formula import (
    Box,
    Formula,
    Implies,
    LogicIndex,
    Variable,
    atoms,
    box_power,
    conj,
    conj_all,
    dia,
    dia_power,
    iff,
    is_neg,
    logic_n,
    neg,
    split_iff,
    substitute_many,
)
from .kernel import (
    AXIOM_K,
    AXIOM_WGL,
    DEFAULT_ATOM_BUDGET,
    MODUS_PONENS,
    NECESSITATION,
    TAUT,
    Certificate,
    ProofLine,
    taut_check,
)


class DerivationError(ValueError):
    """派生規則に与えた前提の形が合わない場合の例外。"""

    def __init__(self, rule: str, reason: str) -> None:
        self.rule = rule
        self.reason = reason
        super().__init__(f"{rule}: {reason}")


def curry(premises: Sequence[Formula], conclusion: Formula) -> Formula:
    """P1 → (P2 → … → (Pk → C)) を作ります。"""

    result = conclusion
    for premise in reversed(premises):
        result = Implies(premise, result)
    return result


class ProofBuilder:
    """証明行を追記していくビルダー。同じ論理式の行は一度しか作りません。"""

    def __init__(self, n: int | LogicIndex, atom_budget: int = DEFAULT_ATOM_BUDGET) -> None:
        self.n = logic_n(n)
        self.atom_budget = atom_budget
        self.lines: list[ProofLine] = []
        self._proved: dict[Formula, int] = {}
        self._trans_cache: dict[Formula, int] = {}

    def __len__(self) -> int:
        return len(self.lines)

    def formula(self, index: int) -> Formula:
        return self.lines[index].formula

    def lookup(self, formula: Formula) -> int | None:
        return self._proved.get(formula)

    # Primitive rules -----------------------------------------------------------

    def _emit(self, formula: Formula, rule: str, premises: tuple[int, ...] = ()) -> int:
        existing = self._proved.get(formula)
        if existing is not None:
            return existing
        index = len(self.lines)
        self.lines.append(ProofLine(index, formula, rule, premises))
        self._proved[formula] = index
        return index

    def taut(self, formula: Formula) -> int:
        existing = self._proved.get(formula)
        if existing is not None:
            return existing
        if not taut_check(formula, self.atom_budget):
            raise DerivationError("taut", "トートロジーではない論理式です")
        return self._emit(formula, TAUT)

    def axiom_k(self, x: Formula, y: Formula) -> int:
        return self._emit(Implies(Box(Implies(x, y)), Implies(Box(x), Box(y))), AXIOM_K)

    def axiom_wgl(self, x: Formula) -> int:
        return self._emit(Implies(Box(Implies(box_power(self.n, x), x)), Box(x)), AXIOM_WGL)

    def mp(self, minor: int, major: int) -> int:
        antecedent = self.formula(minor)
        implication = self.formula(major)
        if not isinstance(implication, Implies) or implication.left != antecedent:
            raise DerivationError("mp", "大前提が小前提を前件とする含意ではありません")
        return self._emit(implication.right, MODUS_PONENS, (minor, major))

    def nec(self, index: int) -> int:
        return self._emit(Box(self.formula(index)), NECESSITATION, (index,))

    # Derived rules ---------------------------------------------------------------

    def chain(self, premises: Sequence[int], conclusion: Formula) -> int:
        """前提行からトートロジー的に従う結論を導きます。"""

        formulas = [self.formula(index) for index in premises]
        current = self.taut(curry(formulas, conclusion))
        for index in premises:
            current = self.mp(index, current)
        return current

    def box_curried(self, index: int, arity: int) -> int:
        """X1 → … → (Xm → Y) から □X1 → … → (□Xm → □Y) を導きます。"""

        if arity < 1:
            raise DerivationError("box_curried", "arity は 1 以上です")
        formula = self.formula(index)
        hypotheses: list[Formula] = []
        body = formula
        for _ in range(arity):
            if not isinstance(body, Implies):
                raise DerivationError("box_curried", "含意の連鎖が短すぎます")
            hypotheses.append(body.left)
            body = body.right
        # □X1 → □R1 where R1 = X2 → … → Y
        current = self.mp(self.nec(index), self.axiom_k(formula.left, formula.right))  # type: ignore[attr-defined]
        rest = formula.right  # type: ignore[attr-defined]
        boxed_hypotheses = [Box(hypotheses[0])]
        for hypothesis in hypotheses[1:]:
            assert isinstance(rest, Implies)
            distribution = self.axiom_k(rest.left, rest.right)
            boxed_hypotheses.append(Box(hypothesis))
            current = self.chain([current, distribution], curry(boxed_hypotheses, Box(rest.right)))
            rest = rest.right
        return current

    def regularity(self, index: int, k: int = 1) -> int:
        """X → Y から □ᵏX → □ᵏY を導きます。"""

        current = index
        for _ in range(k):
            current = self.box_curried(current, 1)
        return current

    def box_lift(self, index: int, hypotheses: Sequence[Formula], k: int = 1) -> int:
        """⋀H → C から ⋀□ᵏH → □ᵏC を導きます (H が空なら ⊢C から ⊢□ᵏC)。"""

        formula = self.formula(index)
        if not hypotheses:
            current = index
            for _ in range(k):
                current = self.nec(current)
            return current
        if not isinstance(formula, Implies) or formula.left != conj_all(list(hypotheses)):
            raise DerivationError("box_lift", "前件が仮定の連言と一致しません")
        conclusion = formula.right
        current = self.chain([index], curry(hypotheses, conclusion))
        for _ in range(k):
            current = self.box_curried(current, len(hypotheses))
        boxed = [box_power(k, h) for h in hypotheses]
        return self.chain([current], Implies(conj_all(boxed), box_power(k, conclusion)))

    def box_conj_intro(self, k: int, items: Sequence[Formula]) -> int:
        """⋀□ᵏxᵢ → □ᵏ⋀xᵢ を導きます。"""

        target = conj_all(list(items))
        start = self.taut(Implies(target, target))
        return self.box_lift(start, items, k)

    def box_iff(self, x: Formula, y: Formula) -> int:
        """□(X↔Y) → (□X ↔ □Y) を導きます。"""

        equivalence = iff(x, y)
        forward = self.box_curried(self.taut(Implies(equivalence, Implies(x, y))), 2)
        backward = self.box_curried(self.taut(Implies(equivalence, Implies(y, x))), 2)
        return self.chain([forward, backward], Implies(Box(equivalence), iff(Box(x), Box(y))))

    def dia_mono(self, index: int, k: int = 1) -> int:
        """X → Y から ◇ᵏX → ◇ᵏY を導きます。"""

        current = index
        for _ in range(k):
            formula = self.formula(current)
            if not isinstance(formula, Implies):
                raise DerivationError("dia_mono", "前提が含意ではありません")
            x, y = formula.left, formula.right
            contrapositive = self.chain([current], Implies(neg(y), neg(x)))
            boxed = self.regularity(contrapositive)
            current = self.chain([boxed], Implies(dia(x), dia(y)))
        return current

    def dia_box_merge(self, k: int, b: Formula, c: Formula) -> int:
        """◇ᵏB ∧ □ᵏC → ◇ᵏ(B ∧ C) を導きます。"""

        if k < 1:
            raise DerivationError("dia_box_merge", "k は 1 以上です")
        if k == 1:
            both = conj(b, c)
            seed = self.taut(Implies(c, Implies(neg(both), neg(b))))
            lifted = self.box_curried(seed, 2)
            return self.chain([lifted], Implies(conj(dia(b), Box(c)), dia(both)))
        outer = self.dia_box_merge(1, dia_power(k - 1, b), box_power(k - 1, c))
        inner = self.dia_box_merge(k - 1, b, c)
        lifted = self.dia_mono(inner, 1)
        return self.chain(
            [outer, lifted],
            Implies(conj(dia_power(k, b), box_power(k, c)), dia_power(k, conj(b, c))),
        )

    def replace(self, context: Formula, holes: Mapping[str, int]) -> int:
        """⊢ Xⱼ ↔ Yⱼ の行から ⊢ C(X) ↔ C(Y) を導きます (K の同値置換)。"""

        pairs: dict[str, tuple[Formula, Formula]] = {}
        for name, index in holes.items():
            parts = split_iff(self.formula(index))
            if parts is None:
                raise DerivationError("replace", f"{name} の行が同値式ではありません")
            pairs[name] = parts
        memo: dict[Formula, int] = {}
        return self._replace(context, pairs, holes, memo)

    def _replace(
        self,
        context: Formula,
        pairs: Mapping[str, tuple[Formula, Formula]],
        holes: Mapping[str, int],
        memo: dict[Formula, int],
    ) -> int:
        cached = memo.get(context)
        if cached is not None:
            return cached
        if isinstance(context, Variable) and context.name in pairs:
            result = holes[context.name]
        elif not (atoms(context) & pairs.keys()):
            result = self.taut(iff(context, context))
        elif isinstance(context, Implies):
            left = self._replace(context.left, pairs, holes, memo)
            right = self._replace(context.right, pairs, holes, memo)
            x = self.instantiate(context, pairs, 0)
            y = self.instantiate(context, pairs, 1)
            result = self.chain([left, right], iff(x, y))
        else:
            assert isinstance(context, Box)
            inner = self._replace(context.inner, pairs, holes, memo)
            x, y = split_iff(self.formula(inner))  # type: ignore[misc]
            result = self.mp(self.nec(inner), self.box_iff(x, y))
        memo[context] = result
        return result

    @staticmethod
    def instantiate(context: Formula, pairs: Mapping[str, tuple[Formula, Formula]], side: int) -> Formula:
        return substitute_many(context, {name: pair[side] for name, pair in pairs.items()})

    def trans(self, a: Formula) -> int:
        """□A → □ⁿ⁺¹A (trans の命題) を導きます。"""

        cached = self._trans_cache.get(a)
        if cached is not None:
            return cached
        n = self.n
        tied = conj(a, box_power(n, a))
        step = self.regularity(self.taut(Implies(tied, a)), n)
        seed = self.chain([step], Implies(a, Implies(box_power(n, tied), tied)))
        boxed = self.regularity(seed)
        axiom = self.axiom_wgl(tied)
        to_tied = self.chain([boxed, axiom], Implies(Box(a), Box(tied)))
        projection = self.regularity(self.taut(Implies(tied, box_power(n, a))))
        result = self.chain([to_tied, projection], Implies(Box(a), box_power(n + 1, a)))
        self._trans_cache[a] = result
        return result

    def derive_implication(self, a: Formula, b: Formula) -> int | None:
        """a → b を、二重否定・対偶・□ の単調性だけで構造的に導きます。

        トートロジーでなく、構造も合わない場合は None を返します。
        """

        return self._structural(a, b, depth=0)

    def _structural(self, a: Formula, b: Formula, depth: int) -> int | None:
        goal = Implies(a, b)
        existing = self._proved.get(goal)
        if existing is not None:
            return existing
        if depth > 64:
            return None
        try:
            if taut_check(goal, self.atom_budget):
                return self.taut(goal)
        except ValueError:
            pass
        if isinstance(a, Box) and isinstance(b, Box):
            inner = self._structural(a.inner, b.inner, depth + 1)
            return None if inner is None else self.regularity(inner)
        if is_neg(a) and is_neg(a.left):  # type: ignore[attr-defined]
            core = a.left.left  # type: ignore[attr-defined]
            step = self._structural(core, b, depth + 1)
            if step is not None:
                return self.chain([step], goal)
        if is_neg(b) and is_neg(b.left):  # type: ignore[attr-defined]
            core = b.left.left  # type: ignore[attr-defined]
            step = self._structural(a, core, depth + 1)
            if step is not None:
                return self.chain([step], goal)
        if is_neg(a) and is_neg(b):
            step = self._structural(b.left, a.left, depth + 1)  # type: ignore[attr-defined]
            if step is not None:
                return self.chain([step], goal)
        return None

    def derive_equivalence(self, a: Formula, b: Formula) -> int | None:
        forward = self.derive_implication(a, b)
        backward = self.derive_implication(b, a)
        if forward is None or backward is None:
            return None
        return self.chain([forward, backward], iff(a, b))

    # Import / export ---------------------------------------------------------------

    def replay(self, source: Sequence[ProofLine], goal_index: int, substitution: Mapping[str, Formula] | None = None) -> int:
        """他の証明の行を (必要なら代入を施して) 取り込みます。

        トートロジーと公理の代入例はまた同じ規則の例なので、代入後も検査を通ります。
        """

        mapping = dict(substitution or {})
        needed = _reachable(source, goal_index)
        translated: dict[int, int] = {}
        for index in sorted(needed):
            line = source[index]
            formula = substitute_many(line.formula, mapping) if mapping else line.formula
            existing = self._proved.get(formula)
            if existing is not None:
                translated[index] = existing
                continue
            if line.rule == TAUT:
                translated[index] = self._emit(formula, TAUT)
            elif line.rule in (AXIOM_K, AXIOM_WGL):
                translated[index] = self._emit(formula, line.rule)
            elif line.rule == MODUS_PONENS:
                minor, major = (translated[p] for p in line.premises)
                translated[index] = self.mp(minor, major)
            elif line.rule == NECESSITATION:
                translated[index] = self.nec(translated[line.premises[0]])
            else:
                raise DerivationError("replay", f"未知の規則です: {line.rule!r}")
        return translated[goal_index]

    def include(self, cert: Certificate) -> int:
        if cert.logic != self.n:
            raise DerivationError("include", f"証明書の n={cert.logic} がビルダーの n={self.n} と一致しません")
        return self.replay(cert.lines, len(cert.lines) - 1)

    def certificate(self, index: int) -> Certificate:
        """index の行をゴールとし、到達可能な行だけを番号付け直した証明書を返します。"""

        needed = sorted(_reachable(self.lines, index))
        renumber = {old: new for new, old in enumerate(needed)}
        lines = tuple(
            ProofLine(renumber[old], self.lines[old].formula, self.lines[old].rule,
                      tuple(renumber[p] for p in self.lines[old].premises))
            for old in needed
        )
        return Certificate(self.n, lines, self.lines[index].formula)


def _reachable(lines: Sequence[ProofLine], goal_index: int) -> set[int]:
    needed: set[int] = set()
    stack = [goal_index]
    while stack:
        index = stack.pop()
        if index in needed:
            continue
        needed.add(index)
        stack.extend(lines[index].premises)
    return needed


__all__ = [
    "DerivationError",
    "ProofBuilder",
    "curry",
]
