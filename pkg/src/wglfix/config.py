"""wglfix の設定モデル群。"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .kernel import DEFAULT_ATOM_BUDGET

COMMANDS = ("fixpoint", "verify", "check-cert", "depths", "countermodel")
VERIFY_METHODS = ("cert", "kripke", "both")
COLOR_MODES = ("auto", "always", "never")
MAX_SEARCH_WORLDS = 5


@dataclass(slots=True)
class KernelConfig:
    """証明書検査カーネルの設定。"""

    atom_budget: int = DEFAULT_ATOM_BUDGET


@dataclass(slots=True)
class SynthConfig:
    """不動点構成の設定。"""

    prefer_shortcut: bool = True
    certify: bool = False
    check_certificates: bool = True


@dataclass(slots=True)
class KripkeConfig:
    """反例モデル探索の設定。"""

    max_worlds: int = 3
    valuation_bits: int = 16
    max_workers: int | None = None


@dataclass(slots=True)
class OutputConfig:
    """出力形式と書き出し先の設定。"""

    json: bool = False
    simplify: bool = False
    certificate_path: Path | None = None
    trace_path: Path | None = None
    color: str = "auto"


@dataclass(slots=True)
class RunConfig:
    """1 回の CLI 実行を束ねる設定。"""

    command: str
    n: int = 1
    var: str = "p"
    formula: str = ""
    candidate: str | None = None
    method: str = "both"
    modulus: int | None = None
    certificate_input: Path | None = None
    kernel: KernelConfig = field(default_factory=KernelConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    kripke: KripkeConfig = field(default_factory=KripkeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def from_args(
        cls,
        command: str,
        n: int = 1,
        var: str = "p",
        formula: str = "",
        candidate: Optional[str] = None,
        method: str = "both",
        modulus: Optional[int] = None,
        certificate_input: Optional[Path] = None,
        kernel_overrides: Mapping[str, Any] | None = None,
        synth_overrides: Mapping[str, Any] | None = None,
        kripke_overrides: Mapping[str, Any] | None = None,
        output_overrides: Mapping[str, Any] | None = None,
    ) -> "RunConfig":
        if command not in COMMANDS:
            raise ValueError(f"未知のコマンドです: {command!r}")
        if n < 1:
            raise ValueError(f"n は 1 以上で指定してください: {n}")
        if method not in VERIFY_METHODS:
            raise ValueError(f"未知の検証方法です: {method!r}")
        kripke_kwargs = dict(kripke_overrides) if kripke_overrides else {}
        if "max_workers" in kripke_kwargs and kripke_kwargs["max_workers"] is not None:
            kripke_kwargs["max_workers"] = max(1, int(kripke_kwargs["max_workers"]))
        output_kwargs = dict(output_overrides) if output_overrides else {}
        for key in ("certificate_path", "trace_path"):
            if output_kwargs.get(key) is not None:
                output_kwargs[key] = Path(output_kwargs[key])
        if output_kwargs.get("color", "auto") not in COLOR_MODES:
            output_kwargs["color"] = "auto"
        return cls(
            command=command,
            n=n,
            var=var,
            formula=formula,
            candidate=candidate,
            method=method,
            modulus=modulus,
            certificate_input=certificate_input,
            kernel=KernelConfig(**(dict(kernel_overrides) if kernel_overrides else {})),
            synth=SynthConfig(**(dict(synth_overrides) if synth_overrides else {})),
            kripke=KripkeConfig(**kripke_kwargs),
            output=OutputConfig(**output_kwargs),
        )
