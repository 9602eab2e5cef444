"""変数出現の様相深さ dep(A, p) と、その n を法とする剰余像 dep_n(A, p)。"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import Box, Formula, Implies, LogicIndex, OccurrencePath, Variable, logic_n, occurrences


@dataclass(frozen=True, slots=True)
class DepthProfile:
    depths: frozenset[int]
    modulus: int | None = None
    residues: frozenset[int] | None = None

    def __post_init__(self) -> None:
        if (self.modulus is None) != (self.residues is None):
            raise ValueError("modulus と residues は同時に指定する必要があります。")

    @property
    def occurs(self) -> bool:
        return bool(self.depths)

    def residue_tokens(self) -> list[str]:
        if self.modulus is None or self.residues is None:
            return []
        return [f"[{r}]_{self.modulus}" for r in sorted(self.residues)]

    def to_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {"depths": sorted(self.depths)}
        if self.modulus is not None:
            payload["modulus"] = self.modulus
            payload["residues"] = self.residue_tokens()
        return payload


def dep(a: Formula, p: str) -> frozenset[int]:
    """p の全出現の深さの集合を一回の走査で求めます。"""

    memo: dict[int, frozenset[int]] = {}

    def walk(node: Formula) -> frozenset[int]:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Variable):
            result = frozenset({0}) if node.name == p else frozenset()
        elif isinstance(node, Implies):
            result = walk(node.left) | walk(node.right)
        elif isinstance(node, Box):
            result = frozenset(x + 1 for x in walk(node.inner))
        else:
            result = frozenset()
        memo[id(node)] = result
        return result

    return walk(a)


def dep_mod(a: Formula, p: str, n: int | LogicIndex) -> frozenset[int]:
    modulus = logic_n(n)
    return frozenset(d % modulus for d in dep(a, p))


def is_modalized(a: Formula, p: str) -> bool:
    return 0 not in dep(a, p)


def occurrences_by_residue(a: Formula, p: str, r: int, n: int | LogicIndex) -> frozenset[OccurrencePath]:
    modulus = logic_n(n)
    if not 0 <= r < modulus:
        raise ValueError(f"剰余 r は 0 <= r < {modulus} の範囲で指定してください: {r}")
    return frozenset(occ for occ in occurrences(a, p) if occ.depth % modulus == r)


def depth_profile(a: Formula, p: str, n: int | LogicIndex | None = None) -> DepthProfile:
    depths = dep(a, p)
    if n is None:
        return DepthProfile(depths)
    modulus = logic_n(n)
    return DepthProfile(depths, modulus, frozenset(d % modulus for d in depths))


def replace_by_residue(a: Formula, p: str, r: int, n: int | LogicIndex, b: Formula) -> Formula:
    """深さが r (mod n) の p の出現をすべて b に置き換えます。

    substitute_at(a, occurrences_by_residue(a, p, r, n), b) と同じ結果を、
    共有部分木を (ノード, 深さの剰余) ごとに一度だけ辿って求めます。
    """

    modulus = logic_n(n)
    memo: dict[tuple[int, int], Formula] = {}

    def walk(node: Formula, residue: int) -> Formula:
        key = (id(node), residue)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, Variable):
            result = b if node.name == p and residue == r else node
        elif isinstance(node, Implies):
            left = walk(node.left, residue)
            right = walk(node.right, residue)
            result = node if left is node.left and right is node.right else Implies(left, right)
        elif isinstance(node, Box):
            inner = walk(node.inner, (residue + 1) % modulus)
            result = node if inner is node.inner else Box(inner)
        else:
            result = node
        memo[key] = result
        return result

    return walk(a, 0)
