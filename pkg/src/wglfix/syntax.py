"""論理式の構文解析と印字。

構文解析は lark の LALR パーサで行い、派生結合子は解析時に ⊥・→・□ の核へ
展開します。印字は parse(to_text(f)) == f を満たすように略記を選びます。
"""

from __future__ import annotations

import re
from functools import lru_cache

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from .formula import (
    FALSUM,
    TOP,
    Box,
    Formula,
    Implies,
    Variable,
    conj,
    dia,
    disj,
    iff,
    is_neg,
    neg,
    split_conj,
    split_iff,
)

RESERVED_PREFIX = "_fp"
IDENTIFIER_PATTERN = re.compile(r"[a-z][a-z0-9_]*\Z")
RESERVED_PATTERN = re.compile(r"_fp[0-9]+\Z")

GRAMMAR = r"""
?start: iff

?iff: imp
    | iff IFF imp -> iff_op

?imp: or_
    | or_ IMP imp -> imp_op

?or_: and_
    | or_ OR and_ -> or_op

?and_: unary
    | and_ AND unary -> and_op

?unary: NOT unary -> not_op
    | BOX unary -> box_op
    | DIA unary -> dia_op
    | atom

?atom: FALSE -> false
    | TRUE -> true
    | IDENT -> ident
    | "(" iff ")"

IFF: "<->" | "↔"
IMP: "->" | "→"
OR: "|" | "∨"
AND: "&" | "∧"
NOT: "~" | "¬"
BOX: /box\b/ | "[]" | "□"
DIA: /dia\b/ | "<>" | "◇"
TRUE: /true\b/ | "⊤"
FALSE: /false\b/ | "⊥"
IDENT: /(?!(?:box|dia|true|false)\b)[a-z][a-z0-9_]*/ | /_fp[0-9]+/

%import common.WS
%ignore WS
"""


class FormulaSyntaxError(ValueError):
    """論理式テキストが文法に合わない場合の例外。"""

    def __init__(
        self,
        text: str,
        line: int | None,
        column: int | None,
        expected: frozenset[str] = frozenset(),
        detail: str = "",
    ) -> None:
        self.text = text
        self.line = line
        self.column = column
        self.expected = expected
        self.detail = detail
        location = f"{line}:{column}" if line is not None else "入力末尾"
        message = f"構文エラー ({location})"
        if detail:
            message += f": {detail}"
        if expected:
            message += f" [期待されるトークン: {', '.join(sorted(expected))}]"
        super().__init__(message)


@v_args(inline=True)
class _ToFormula(Transformer):
    def __init__(self, allow_reserved: bool) -> None:
        super().__init__()
        self._allow_reserved = allow_reserved

    def false(self, _token: Token) -> Formula:
        return FALSUM

    def true(self, _token: Token) -> Formula:
        return TOP

    def ident(self, token: Token) -> Formula:
        name = str(token)
        if name.startswith(RESERVED_PREFIX) and not self._allow_reserved:
            raise ValueError(f"予約済みの変数名は使用できません: {name}")
        return Variable(name)

    def not_op(self, _op: Token, operand: Formula) -> Formula:
        return neg(operand)

    def box_op(self, _op: Token, operand: Formula) -> Formula:
        return Box(operand)

    def dia_op(self, _op: Token, operand: Formula) -> Formula:
        return dia(operand)

    def and_op(self, left: Formula, _op: Token, right: Formula) -> Formula:
        return conj(left, right)

    def or_op(self, left: Formula, _op: Token, right: Formula) -> Formula:
        return disj(left, right)

    def imp_op(self, left: Formula, _op: Token, right: Formula) -> Formula:
        return Implies(left, right)

    def iff_op(self, left: Formula, _op: Token, right: Formula) -> Formula:
        return iff(left, right)


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(GRAMMAR, parser="lalr", start="start")


def parse(text: str, *, allow_reserved: bool = False) -> Formula:
    """テキストを脱糖済みの Formula に変換します。

    allow_reserved は証明書の読み込み時にだけ使い、`_fp` 名前空間の変数を
    受け付けます。
    """

    try:
        tree = _parser().parse(text)
    except UnexpectedInput as exc:
        raise _syntax_error(text, exc) from exc
    try:
        return _ToFormula(allow_reserved).transform(tree)
    except VisitError as exc:
        original = exc.orig_exc
        raise FormulaSyntaxError(text, None, None, detail=str(original)) from original


def is_identifier(name: str, *, allow_reserved: bool = False) -> bool:
    if name in {"box", "dia", "true", "false"}:
        return False
    if IDENTIFIER_PATTERN.match(name):
        return True
    return allow_reserved and bool(RESERVED_PATTERN.match(name))


def _syntax_error(text: str, exc: UnexpectedInput) -> FormulaSyntaxError:
    line = getattr(exc, "line", None)
    column = getattr(exc, "column", None)
    if isinstance(exc, UnexpectedToken):
        expected = frozenset(exc.expected)
        found = exc.token
        detail = "入力が途中で終わっています" if found.type == "$END" else f"予期しないトークン {str(found)!r}"
        if found.type == "$END":
            line, column = None, None
        return FormulaSyntaxError(text, line, column, expected, detail)
    if isinstance(exc, UnexpectedCharacters):
        expected = frozenset(exc.allowed or ())
        return FormulaSyntaxError(text, line, column, expected, f"未知の文字 {exc.char!r}")
    if isinstance(exc, UnexpectedEOF):
        return FormulaSyntaxError(text, None, None, frozenset(exc.expected), "入力が途中で終わっています")
    return FormulaSyntaxError(text, line, column, frozenset(), str(exc))


# Printing ---------------------------------------------------------------------


def to_text(f: Formula, sugar: bool = True) -> str:
    """決定的なテキスト表現を返します。sugar=False では ⊥・→・□ だけを使います。"""

    return _render(f, sugar)


def _render(f: Formula, sugar: bool) -> str:
    if isinstance(f, Variable):
        return f.name
    if f == FALSUM:
        return "false"
    if isinstance(f, Box):
        return "box " + _operand(f.inner, sugar)
    if not isinstance(f, Implies):
        raise TypeError(f"未知の論理式ノードです: {type(f).__name__}")
    if sugar:
        if f == TOP:
            return "true"
        parts = split_iff(f)
        if parts is not None:
            return f"{_operand(parts[0], sugar)} <-> {_operand(parts[1], sugar)}"
        parts = split_conj(f)
        if parts is not None:
            return f"{_operand(parts[0], sugar)} & {_operand(parts[1], sugar)}"
        if is_neg(f) and isinstance(f.left, Box) and is_neg(f.left.inner):
            return "dia " + _operand(f.left.inner.left, sugar)  # type: ignore[attr-defined]
        if is_neg(f):
            return "~" + _operand(f.left, sugar)
    return f"{_operand(f.left, sugar)} -> {_operand(f.right, sugar)}"


def _operand(f: Formula, sugar: bool) -> str:
    text = _render(f, sugar)
    if _is_binary(f, sugar):
        return f"({text})"
    return text


def _is_binary(f: Formula, sugar: bool) -> bool:
    if not isinstance(f, Implies):
        return False
    if not sugar:
        return True
    if f == TOP:
        return False
    if split_iff(f) is not None or split_conj(f) is not None:
        return True
    return not is_neg(f)
