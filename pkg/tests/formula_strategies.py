"""テスト用の hypothesis ストラテジー。"""

from __future__ import annotations

from hypothesis import strategies as st

from wglfix.formula import FALSUM, Box, Formula, Implies, Variable, size


def formulas(names: tuple[str, ...] = ("p", "q", "r"), max_leaves: int = 8) -> st.SearchStrategy[Formula]:
    leaves = st.sampled_from([FALSUM, *(Variable(name) for name in names)])
    return st.recursive(
        leaves,
        lambda children: st.one_of(
            st.builds(Implies, children, children),
            st.builds(Box, children),
        ),
        max_leaves=max_leaves,
    )


def modalized_formulas(
    p: str = "p",
    parameters: tuple[str, ...] = ("q", "r"),
    max_leaves: int = 6,
) -> st.SearchStrategy[Formula]:
    """p が必ず □ の下にだけ現れる論理式。"""

    anywhere = formulas((p, *parameters), max_leaves=max_leaves)
    unboxed_leaves = st.sampled_from([FALSUM, *(Variable(name) for name in parameters)])
    return st.recursive(
        st.one_of(unboxed_leaves, st.builds(Box, anywhere)),
        lambda children: st.builds(Implies, children, children),
        max_leaves=3,
    )


def sweep_formulas(p: str = "p", max_size: int = 12) -> st.SearchStrategy[Formula]:
    """健全性スイープ用: サイズ max_size 以下の様相化された論理式。"""

    return modalized_formulas(p, ("q", "r"), max_leaves=4).filter(lambda a: size(a) <= max_size)


def boxed_formulas(p: str = "p", parameters: tuple[str, ...] = ("q",), max_leaves: int = 5) -> st.SearchStrategy[Formula]:
    return st.builds(Box, formulas((p, *parameters), max_leaves=max_leaves))


def hole_contexts(
    holes: list[Formula],
    parameters: tuple[str, ...] = ("q",),
    max_leaves: int = 4,
) -> st.SearchStrategy[Formula]:
    """holes のいずれかを必ず含み、→ だけで組み立てた文脈。

    □ を新たに足さないので、p の深さは holes が決めたものから変わりません。
    """

    hole = st.sampled_from(holes)
    leaves = st.sampled_from([FALSUM, *(Variable(name) for name in parameters), *holes])
    tree = st.recursive(leaves, lambda children: st.builds(Implies, children, children), max_leaves=max_leaves)
    return st.one_of(hole, st.builds(Implies, hole, tree), st.builds(Implies, tree, hole))
