"""様相論理式の抽象構文木と記法演算子群。

保存される構造は ⊥・→・□ と命題変数の 4 構成子のみで、⊤・¬・∧・∨・↔・◇ は
構築用ヘルパと印字時の略記としてだけ現れます。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

LEFT = "left"
RIGHT = "right"
INNER = "inner"


class OccurrenceError(ValueError):
    """出現パスが変数を指していない、または異なる変数を指している場合の例外。"""

    def __init__(self, path: tuple[str, ...], reason: str) -> None:
        self.path = path
        self.reason = reason
        rendered = "/".join(path) or "<root>"
        super().__init__(f"出現パス {rendered} が不正です: {reason}")


class Formula:
    """全ての論理式ノードの基底クラス。

    ハッシュ値は構築時に一度だけ計算してキャッシュし、等価判定は同一性と
    ハッシュの比較で大半を打ち切ってから構造比較に進みます。
    """

    __slots__ = ()

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        if self._hash != other._hash:  # type: ignore[attr-defined]
            return False
        return _structurally_equal(self, other)

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __str__(self) -> str:
        from .syntax import to_text

        return to_text(self, sugar=True)


@dataclass(frozen=True, slots=True, eq=False)
class Falsum(Formula):
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("false",)))


@dataclass(frozen=True, slots=True, eq=False)
class Variable(Formula):
    name: str
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("変数名が空です。")
        object.__setattr__(self, "_hash", hash(("var", self.name)))


@dataclass(frozen=True, slots=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("imp", self.left._hash, self.right._hash)))


@dataclass(frozen=True, slots=True, eq=False)
class Box(Formula):
    inner: Formula
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash(("box", self.inner._hash)))


FALSUM = Falsum()
TOP = Implies(FALSUM, FALSUM)


def _structurally_equal(a: Formula, b: Formula) -> bool:
    stack: list[tuple[Formula, Formula]] = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y) or x._hash != y._hash:  # type: ignore[attr-defined]
            return False
        if isinstance(x, Variable):
            if x.name != y.name:  # type: ignore[attr-defined]
                return False
        elif isinstance(x, Implies):
            stack.append((x.left, y.left))  # type: ignore[attr-defined]
            stack.append((x.right, y.right))  # type: ignore[attr-defined]
        elif isinstance(x, Box):
            stack.append((x.inner, y.inner))  # type: ignore[attr-defined]
    return True


@dataclass(frozen=True, slots=True)
class LogicIndex:
    """wGL_n の添字 n。n = 1 は GL を表します。"""

    n: int

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"論理の添字 n は 1 以上の整数である必要があります: {self.n!r}")

    @property
    def is_gl(self) -> bool:
        return self.n == 1

    @classmethod
    def coerce(cls, value: "int | LogicIndex") -> "LogicIndex":
        if isinstance(value, LogicIndex):
            return value
        return cls(value)


def logic_n(value: "int | LogicIndex") -> int:
    """int と LogicIndex のどちらを受け取っても検証済みの n を返します。"""

    return LogicIndex.coerce(value).n


# Sugar -------------------------------------------------------------------


def var(name: str) -> Variable:
    return Variable(name)


def neg(a: Formula) -> Formula:
    return Implies(a, FALSUM)


def conj(a: Formula, b: Formula) -> Formula:
    return neg(Implies(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))


def dia(a: Formula) -> Formula:
    return neg(Box(neg(a)))


def conj_all(items: Sequence[Formula]) -> Formula:
    """右結合の連言を作ります。空列は ⊤、1 要素はその要素自身です。"""

    if not items:
        return TOP
    result = items[-1]
    for item in reversed(items[:-1]):
        result = conj(item, result)
    return result


def is_neg(a: Formula) -> bool:
    return isinstance(a, Implies) and a.right == FALSUM


def split_conj(a: Formula) -> tuple[Formula, Formula] | None:
    """a が conj(x, y) の形なら (x, y) を返します。"""

    if not is_neg(a):
        return None
    body = a.left  # type: ignore[attr-defined]
    if isinstance(body, Implies) and is_neg(body.right):
        return body.left, body.right.left  # type: ignore[attr-defined]
    return None


def split_iff(a: Formula) -> tuple[Formula, Formula] | None:
    parts = split_conj(a)
    if parts is None:
        return None
    forward, backward = parts
    if (
        isinstance(forward, Implies)
        and isinstance(backward, Implies)
        and forward.left == backward.right
        and forward.right == backward.left
    ):
        return forward.left, forward.right
    return None


# Notation operators ------------------------------------------------------


def box_power(k: int, a: Formula) -> Formula:
    if k < 0:
        raise ValueError(f"□ の冪は 0 以上である必要があります: {k}")
    result = a
    for _ in range(k):
        result = Box(result)
    return result


def dia_power(k: int, a: Formula) -> Formula:
    result = a
    for _ in range(k):
        result = dia(result)
    return result


def boxdot(k: int, a: Formula, plus: bool = False) -> Formula:
    """⊞_k a = □a ∧ … ∧ □^k a を返します。plus を立てると a ∧ ⊞_k a です。"""

    if k < 1:
        raise ValueError(f"boxdot の k は 1 以上である必要があります: {k}")
    body = conj_all([box_power(j, a) for j in range(1, k + 1)])
    if plus:
        return conj(a, body)
    return body


def substitute(a: Formula, p: str, b: Formula) -> Formula:
    return substitute_many(a, {p: b})


def substitute_many(a: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """変数の同時置換。変化しない部分木は元のオブジェクトを再利用します。"""

    if not mapping:
        return a
    memo: dict[int, Formula] = {}

    def walk(node: Formula) -> Formula:
        key = id(node)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, Variable):
            result = mapping.get(node.name, node)
        elif isinstance(node, Implies):
            left = walk(node.left)
            right = walk(node.right)
            result = node if left is node.left and right is node.right else Implies(left, right)
        elif isinstance(node, Box):
            inner = walk(node.inner)
            result = node if inner is node.inner else Box(inner)
        else:
            result = node
        memo[key] = result
        return result

    return walk(a)


def iterate(a: Formula, p: str, k: int) -> Formula:
    """A^k(p) を返します。A^0(p) は p 自身です。"""

    if k < 0:
        raise ValueError(f"反復回数は 0 以上である必要があります: {k}")
    result: Formula = Variable(p)
    for _ in range(k):
        result = substitute(a, p, result)
    return result


def atoms(a: Formula) -> frozenset[str]:
    names: set[str] = set()
    seen: set[int] = set()
    stack = [a]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Variable):
            names.add(node.name)
        elif isinstance(node, Implies):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Box):
            stack.append(node.inner)
    return frozenset(names)


def size(a: Formula) -> int:
    """木としてのノード数 (共有部分木も重複して数えます)。"""

    memo: dict[int, int] = {}

    def walk(node: Formula) -> int:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Implies):
            total = 1 + walk(node.left) + walk(node.right)
        elif isinstance(node, Box):
            total = 1 + walk(node.inner)
        else:
            total = 1
        memo[id(node)] = total
        return total

    return walk(a)


def modal_degree(a: Formula) -> int:
    if isinstance(a, Implies):
        return max(modal_degree(a.left), modal_degree(a.right))
    if isinstance(a, Box):
        return 1 + modal_degree(a.inner)
    return 0


def fresh_variable(avoid: Iterable[str], prefix: str = "_fp") -> str:
    """avoid に含まれない予約名前空間の変数名を返します。"""

    taken = set(avoid)
    index = 0
    while f"{prefix}{index}" in taken:
        index += 1
    return f"{prefix}{index}"


# Occurrences ---------------------------------------------------------------


@dataclass(frozen=True, slots=True, order=True)
class OccurrencePath:
    """根からの子セレクタ列で表した、変数の 1 出現の番地。"""

    path: tuple[str, ...] = ()

    @property
    def depth(self) -> int:
        return sum(1 for step in self.path if step == INNER)

    def child(self, step: str) -> "OccurrencePath":
        return OccurrencePath(self.path + (step,))


def occurrences(a: Formula, p: str) -> tuple[OccurrencePath, ...]:
    """p の全出現を左から右の順で返します。"""

    found: list[OccurrencePath] = []
    stack: list[tuple[Formula, tuple[str, ...]]] = [(a, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Variable):
            if node.name == p:
                found.append(OccurrencePath(path))
        elif isinstance(node, Implies):
            stack.append((node.right, path + (RIGHT,)))
            stack.append((node.left, path + (LEFT,)))
        elif isinstance(node, Box):
            stack.append((node.inner, path + (INNER,)))
    return tuple(found)


def resolve(a: Formula, occurrence: OccurrencePath) -> Formula:
    node = a
    for index, step in enumerate(occurrence.path):
        if step in (LEFT, RIGHT) and isinstance(node, Implies):
            node = node.left if step == LEFT else node.right
        elif step == INNER and isinstance(node, Box):
            node = node.inner
        else:
            raise OccurrenceError(occurrence.path, f"{index} 番目のセレクタ {step!r} を辿れません")
    return node


def substitute_at(a: Formula, occs: Iterable[OccurrencePath], b: Formula) -> Formula:
    """指定した出現だけを b で置き換えます。"""

    targets = {occ.path for occ in occs}
    if not targets:
        return a
    names: set[str] = set()
    for path in targets:
        node = resolve(a, OccurrencePath(path))
        if not isinstance(node, Variable):
            raise OccurrenceError(path, "変数ノードではありません")
        names.add(node.name)
    if len(names) > 1:
        raise OccurrenceError(
            min(targets), f"複数の変数を指しています: {', '.join(sorted(names))}"
        )

    def rebuild(node: Formula, paths: set[tuple[str, ...]]) -> Formula:
        if not paths:
            return node
        if () in paths:
            return b
        if isinstance(node, Implies):
            left = rebuild(node.left, {p[1:] for p in paths if p[0] == LEFT})
            right = rebuild(node.right, {p[1:] for p in paths if p[0] == RIGHT})
            if left is node.left and right is node.right:
                return node
            return Implies(left, right)
        if isinstance(node, Box):
            inner = rebuild(node.inner, {p[1:] for p in paths})
            return node if inner is node.inner else Box(inner)
        return node

    return rebuild(a, targets)


# Simplification --------------------------------------------------------------


def simplify(a: Formula) -> Formula:
    """K で同値性を保つ書き換えだけで ⊤/⊥ と二重否定を畳み込みます。"""

    memo: dict[int, Formula] = {}

    def walk(node: Formula) -> Formula:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Box):
            inner = walk(node.inner)
            result: Formula = TOP if inner == TOP else (node if inner is node.inner else Box(inner))
        elif isinstance(node, Implies):
            left = walk(node.left)
            right = walk(node.right)
            if left == FALSUM or right == TOP:
                result = TOP
            elif left == TOP:
                result = right
            elif right == FALSUM and is_neg(left):
                result = left.left  # type: ignore[attr-defined]
            elif left is node.left and right is node.right:
                result = node
            else:
                result = Implies(left, right)
        else:
            result = node
        memo[id(node)] = result
        return result

    return walk(a)
