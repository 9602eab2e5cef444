"""トレース・モデル・証明書の JSON 入出力。論理式は脱糖済みの文法で書き出します。"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .formula import Formula
from .kernel import RULES, Certificate, ProofLine
from .kripke import KripkeModel
from .syntax import FormulaSyntaxError, parse, to_text
from .synthesis import SynthTrace


class CertificateFormatError(ValueError):
    """証明書 JSON の形が不正な場合の例外。"""

    def __init__(self, reason: str, line: int | None = None) -> None:
        self.reason = reason
        self.line = line
        location = f" ({line} 行目)" if line is not None else ""
        super().__init__(f"証明書の形式が不正です{location}: {reason}")


def formula_text(f: Formula) -> str:
    return to_text(f, sugar=False)


def trace_to_list(trace: SynthTrace) -> list[dict[str, str]]:
    return [{"label": stage.label, "formula": formula_text(stage.formula)} for stage in trace.stages]


def model_to_dict(model: KripkeModel) -> dict[str, object]:
    return model.to_dict()


def model_from_dict(payload: dict[str, Any]) -> KripkeModel:
    edges = frozenset((int(i), int(j)) for i, j in payload.get("edges", []))
    valuation = {str(name): frozenset(int(w) for w in worlds) for name, worlds in payload.get("valuation", {}).items()}
    return KripkeModel(int(payload["worlds"]), edges, valuation)


def certificate_to_dict(cert: Certificate) -> dict[str, object]:
    return {
        "logic_n": cert.logic,
        "goal": formula_text(cert.goal),
        "lines": [
            {"i": line.index, "f": formula_text(line.formula), "rule": line.rule, "prem": list(line.premises)}
            for line in cert.lines
        ],
    }


def certificate_to_json(cert: Certificate) -> str:
    return json.dumps(certificate_to_dict(cert), ensure_ascii=False, indent=2) + "\n"


def certificate_from_dict(payload: Any) -> Certificate:
    if not isinstance(payload, dict):
        raise CertificateFormatError("最上位が JSON オブジェクトではありません")
    for key in ("logic_n", "goal", "lines"):
        if key not in payload:
            raise CertificateFormatError(f"{key} がありません")
    logic = payload["logic_n"]
    if isinstance(logic, bool) or not isinstance(logic, int) or logic < 1:
        raise CertificateFormatError(f"logic_n が正の整数ではありません: {logic!r}")
    raw_lines = payload["lines"]
    if not isinstance(raw_lines, list):
        raise CertificateFormatError("lines が配列ではありません")
    goal = _parse_formula(payload["goal"], None)
    lines: list[ProofLine] = []
    for position, raw in enumerate(raw_lines):
        if not isinstance(raw, dict):
            raise CertificateFormatError("行が JSON オブジェクトではありません", position)
        index = raw.get("i")
        if isinstance(index, bool) or not isinstance(index, int):
            raise CertificateFormatError(f"行番号が整数ではありません: {index!r}", position)
        rule = raw.get("rule")
        if rule not in RULES:
            raise CertificateFormatError(f"未知の規則です: {rule!r}", position)
        premises = raw.get("prem", [])
        if not isinstance(premises, list) or any(isinstance(p, bool) or not isinstance(p, int) for p in premises):
            raise CertificateFormatError("prem は整数の配列である必要があります", position)
        lines.append(ProofLine(index, _parse_formula(raw.get("f"), position), rule, tuple(premises)))
    return Certificate(logic, tuple(lines), goal)


def certificate_from_json(text: str) -> Certificate:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(f"JSON として読めません ({exc.msg})") from exc
    return certificate_from_dict(payload)


def _parse_formula(value: Any, position: int | None) -> Formula:
    if not isinstance(value, str):
        raise CertificateFormatError("論理式が文字列ではありません", position)
    try:
        return parse(value, allow_reserved=True)
    except FormulaSyntaxError as exc:
        raise CertificateFormatError(str(exc), position) from exc


def read_certificate(path: Path) -> Certificate:
    return certificate_from_json(path.read_text(encoding="utf-8"))


def write_certificate(cert: Certificate, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(certificate_to_json(cert), encoding="utf-8")
    return path


def write_trace(trace: SynthTrace, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(trace_to_list(trace), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return path
