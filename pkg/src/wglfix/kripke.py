"""有限 Kripke モデルと、wGL_n フレーム上の有界な反例モデル探索。

世界は 0..k-1 の整数、集合は int のビットマスクで表します。探索は
フレーム数 k の小さい順、同じ k では隣接ビットマスクの昇順、次に付値
ビットマスクの昇順に進み、最初に見つかった反例を返します。
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import networkx as nx

from .config import MAX_SEARCH_WORLDS, KripkeConfig
from .formula import Box, Formula, Implies, LogicIndex, Variable, atoms, box_power, logic_n

DEFAULT_FRAME_BOUND = 6


class SearchBoundError(ValueError):
    """探索の上限を超える指定がされた場合の例外。"""

    def __init__(self, what: str, value: int, limit: int) -> None:
        self.what = what
        self.value = value
        self.limit = limit
        super().__init__(f"{what} が上限を超えています ({value} > {limit})")


class ModelError(ValueError):
    """存在しない世界や付値のない変数で評価しようとした場合の例外。"""


@dataclass(frozen=True, slots=True)
class KripkeModel:
    worlds: int
    edges: frozenset[tuple[int, int]]
    valuation: Mapping[str, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.worlds < 1:
            raise ModelError("世界は 1 つ以上必要です")
        for source, target in self.edges:
            if not (0 <= source < self.worlds and 0 <= target < self.worlds):
                raise ModelError(f"辺 ({source}, {target}) が世界の範囲外です")
        for name, members in self.valuation.items():
            if any(not 0 <= w < self.worlds for w in members):
                raise ModelError(f"変数 {name} の付値が世界の範囲外です")

    def successor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.worlds
        for source, target in self.edges:
            masks[source] |= 1 << target
        return tuple(masks)

    def valuation_masks(self) -> dict[str, int]:
        return {name: sum(1 << w for w in members) for name, members in self.valuation.items()}

    def to_dict(self) -> dict[str, object]:
        return {
            "worlds": self.worlds,
            "edges": [list(edge) for edge in sorted(self.edges)],
            "valuation": {name: sorted(self.valuation[name]) for name in sorted(self.valuation)},
        }


# Evaluation ----------------------------------------------------------------------


def _compile(a: Formula) -> tuple[list[tuple[str, object, object]], dict[Formula, int]]:
    """部分式を共有した後順の命令列に変換します。"""

    program: list[tuple[str, object, object]] = []
    slots: dict[Formula, int] = {}
    stack: list[tuple[Formula, bool]] = [(a, False)]
    while stack:
        node, ready = stack.pop()
        if node in slots:
            continue
        if isinstance(node, Implies):
            if not ready:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
                continue
            op: tuple[str, object, object] = ("imp", slots[node.left], slots[node.right])
        elif isinstance(node, Box):
            if not ready:
                stack.append((node, True))
                stack.append((node.inner, False))
                continue
            op = ("box", slots[node.inner], None)
        elif isinstance(node, Variable):
            op = ("var", node.name, None)
        else:
            op = ("bot", None, None)
        slots[node] = len(program)
        program.append(op)
    return program, slots


def _extension(program: list[tuple[str, object, object]], successors: tuple[int, ...], values: Mapping[str, int]) -> int:
    full = (1 << len(successors)) - 1
    results: list[int] = []
    for kind, first, second in program:
        if kind == "imp":
            results.append((~results[first] | results[second]) & full)  # type: ignore[index]
        elif kind == "box":
            inner = results[first]  # type: ignore[index]
            mask = 0
            for world, targets in enumerate(successors):
                if targets & ~inner == 0:
                    mask |= 1 << world
            results.append(mask)
        elif kind == "var":
            results.append(values[first] & full)  # type: ignore[index]
        else:
            results.append(0)
    return results[-1]


def extension(m: KripkeModel, a: Formula) -> int:
    """a が成り立つ世界の集合をビットマスクで返します。"""

    values = m.valuation_masks()
    missing = atoms(a) - values.keys()
    if missing:
        raise ModelError(f"付値のない変数があります: {', '.join(sorted(missing))}")
    program, _ = _compile(a)
    return _extension(program, m.successor_masks(), values)


def forces(m: KripkeModel, w: int, a: Formula) -> bool:
    if not 0 <= w < m.worlds:
        raise ModelError(f"存在しない世界です: {w}")
    return bool(extension(m, a) >> w & 1)


# Frames --------------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _axiom_program(n: int) -> list[tuple[str, object, object]]:
    p = Variable("p")
    axiom = Implies(Box(Implies(box_power(n, p), p)), Box(p))
    return _compile(axiom)[0]


def _successors(worlds: int, relation: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    masks = [0] * worlds
    for source, target in relation:
        if not (0 <= source < worlds and 0 <= target < worlds):
            raise ModelError(f"辺 ({source}, {target}) が世界の範囲外です")
        masks[source] |= 1 << target
    return tuple(masks)


def _validates(successors: tuple[int, ...], n: int) -> bool:
    program = _axiom_program(n)
    full = (1 << len(successors)) - 1
    for world, targets in enumerate(successors):
        if targets >> world & 1:
            return False
    return all(
        _extension(program, successors, {"p": valuation}) == full
        for valuation in range(1 << len(successors))
    )


def frame_validates_wgl(
    worlds: int,
    relation: Iterable[tuple[int, int]],
    n: int | LogicIndex,
    bound: int = DEFAULT_FRAME_BOUND,
) -> bool:
    """p の全付値と全世界で □(□ⁿp→p)→□p が成り立つかを調べます。"""

    if worlds > bound:
        raise SearchBoundError("世界数", worlds, bound)
    return _validates(_successors(worlds, relation), logic_n(n))


def gl_frame_condition(worlds: int, relation: Iterable[tuple[int, int]]) -> bool:
    """推移的かつ非巡回 (有限なら推移的かつ非反射的) かどうかを networkx で調べます。"""

    graph = nx.DiGraph()
    graph.add_nodes_from(range(worlds))
    graph.add_edges_from(relation)
    if not nx.is_directed_acyclic_graph(graph):
        return False
    closure = nx.transitive_closure_dag(graph)
    return set(closure.edges()) == set(graph.edges())


def frame_edges(worlds: int, mask: int) -> frozenset[tuple[int, int]]:
    """非対角の順序対 (i, j) を辞書順に並べ、mask のビットに対応する辺を返します。"""

    pairs = _off_diagonal(worlds)
    return frozenset(pair for bit, pair in enumerate(pairs) if mask >> bit & 1)


@lru_cache(maxsize=16)
def _off_diagonal(worlds: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(worlds) for j in range(worlds) if i != j)


# Search ----------------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, order=True)
class _Witness:
    worlds: int
    frame: int
    valuation: int
    world: int


def _search_frames(
    text: str,
    names: tuple[str, ...],
    n: int,
    worlds: int,
    start: int,
    stop: int,
) -> _Witness | None:
    from .syntax import parse

    program, _ = _compile(parse(text, allow_reserved=True))
    pairs = _off_diagonal(worlds)
    full = (1 << worlds) - 1
    for frame in range(start, stop):
        successors = [0] * worlds
        for bit, (source, target) in enumerate(pairs):
            if frame >> bit & 1:
                successors[source] |= 1 << target
        frame_successors = tuple(successors)
        if not _validates(frame_successors, n):
            continue
        for valuation in range(1 << (worlds * len(names))):
            values = {name: valuation >> (index * worlds) & full for index, name in enumerate(names)}
            holds = _extension(program, frame_successors, values)
            if holds != full:
                world = next(w for w in range(worlds) if not holds >> w & 1)
                return _Witness(worlds, frame, valuation, world)
    return None


class CountermodelSearch:
    """wGL_n フレーム上で a を偽にするモデルを探します。"""

    def __init__(self, n: int | LogicIndex, config: KripkeConfig | None = None) -> None:
        self.n = logic_n(n)
        self.config = config or KripkeConfig()
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def search(self, a: Formula, max_worlds: int | None = None) -> tuple[KripkeModel, int] | None:
        limit = self.config.max_worlds if max_worlds is None else max_worlds
        if limit > MAX_SEARCH_WORLDS:
            raise SearchBoundError("max_worlds", limit, MAX_SEARCH_WORLDS)
        if limit < 1:
            raise SearchBoundError("max_worlds", limit, MAX_SEARCH_WORLDS)
        names = tuple(sorted(atoms(a)))
        bits = len(names) * limit
        if bits > self.config.valuation_bits:
            raise SearchBoundError("付値のビット数", bits, self.config.valuation_bits)
        from .syntax import to_text

        text = to_text(a, sugar=False)
        for worlds in range(1, limit + 1):
            witness = self._search_size(text, names, worlds)
            if witness is not None:
                self._logger.info("%d 世界のフレームで反例を見つけました。", worlds)
                return self._materialize(witness, names)
        self._logger.info("%d 世界以下に反例はありません。", limit)
        return None

    def _search_size(self, text: str, names: tuple[str, ...], worlds: int) -> _Witness | None:
        total = 1 << len(_off_diagonal(worlds))
        workers = self.config.max_workers or 1
        if workers <= 1 or total < 64:
            return _search_frames(text, names, self.n, worlds, 0, total)
        chunk = max(1, total // (workers * 4))
        bounds = [(start, min(total, start + chunk)) for start in range(0, total, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(_search_frames, text, names, self.n, worlds, start, stop)
                for start, stop in bounds
            ]
            found = [future.result() for future in futures]
        candidates = [item for item in found if item is not None]
        return min(candidates) if candidates else None

    @staticmethod
    def _materialize(witness: _Witness, names: tuple[str, ...]) -> tuple[KripkeModel, int]:
        worlds = witness.worlds
        full = (1 << worlds) - 1
        valuation = {}
        for index, name in enumerate(names):
            mask = witness.valuation >> (index * worlds) & full
            valuation[name] = frozenset(w for w in range(worlds) if mask >> w & 1)
        model = KripkeModel(worlds, frame_edges(worlds, witness.frame), valuation)
        return model, witness.world


def countermodel(
    a: Formula,
    n: int | LogicIndex,
    max_worlds: int = 3,
    config: KripkeConfig | None = None,
) -> tuple[KripkeModel, int] | None:
    """有界な反例探索。None は「上限内に反例がない」ことしか意味しません。"""

    return CountermodelSearch(n, config).search(a, max_worlds)
