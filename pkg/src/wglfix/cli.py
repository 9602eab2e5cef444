"""wglfix のコマンドラインインターフェース。"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, TextIO

from .config import COMMANDS, MAX_SEARCH_WORLDS, VERIFY_METHODS, RunConfig
from .depth import depth_profile
from .env import colorize, current_color_mode, current_max_workers, load_env_file
from .formula import simplify
from .kernel import check
from .kripke import CountermodelSearch
from .serialization import read_certificate, trace_to_list, write_certificate, write_trace
from .syntax import is_identifier, parse, to_text
from .synthesis import FixedPointSynthesizer
from .verification import FixpointVerifier


def parse_args(argv: Iterable[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="wglfix", description="wGL_n の様相不動点を構成し、証明書とモデル探索で検証します")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", dest="n", type=int, default=1, help="論理 wGL_n の添字 (1 は GL)")
    common.add_argument("--var", dest="var", type=str, default="p", help="不動点を取る変数名")
    common.add_argument("--json", dest="json", action="store_true", help="結果を 1 つの JSON オブジェクトとして出力")
    common.add_argument("--verbose", dest="verbose", action="store_true", help="進捗ログを表示")

    formula_args = argparse.ArgumentParser(add_help=False)
    formula_args.add_argument(
        "--formula",
        dest="formula",
        type=str,
        required=True,
        help="論理式。@path でファイルから、- で標準入力から読み込みます",
    )

    search_args = argparse.ArgumentParser(add_help=False)
    search_args.add_argument(
        "--max-worlds",
        dest="max_worlds",
        type=int,
        default=None,
        help=f"反例探索の最大世界数 (既定 3、最大 {MAX_SEARCH_WORLDS})",
    )
    search_args.add_argument("--workers", dest="workers", type=int, default=None, help="反例探索のプロセス数")

    fixpoint = subparsers.add_parser("fixpoint", parents=[common, formula_args], help="不動点を構成する")
    fixpoint.add_argument("--simplify", dest="simplify", action="store_true", help="表示前に ⊤/⊥ と二重否定を畳み込む")
    fixpoint.add_argument("--certificate-out", dest="certificate_out", type=Path, default=None, help="証明書 JSON の書き出し先")
    fixpoint.add_argument("--trace-out", dest="trace_out", type=Path, default=None, help="構成トレース JSON の書き出し先")
    fixpoint.add_argument("--no-shortcut", dest="no_shortcut", action="store_true", help="剰余が 1 種類のときの近道を使わない")

    verify = subparsers.add_parser("verify", parents=[common, formula_args, search_args], help="候補式が不動点か確かめる")
    verify.add_argument("--candidate", dest="candidate", type=str, required=True, help="不動点の候補式")
    verify.add_argument("--method", dest="method", choices=VERIFY_METHODS, default="both", help="検証方法")
    verify.add_argument("--certificate-out", dest="certificate_out", type=Path, default=None, help="証明書 JSON の書き出し先")

    check_cert = subparsers.add_parser("check-cert", parents=[common], help="証明書 JSON を検査する")
    check_cert.add_argument("certificate", type=Path, help="証明書 JSON のパス")

    depths = subparsers.add_parser("depths", parents=[common, formula_args], help="変数出現の深さを表示する")
    depths.add_argument("--mod", dest="modulus", type=int, default=None, help="剰余を取る法")

    subparsers.add_parser("countermodel", parents=[common, formula_args, search_args], help="wGL_n フレーム上の反例を探す")
    return parser.parse_args(list(argv) if argv is not None else None)


def main(argv: Iterable[str] | None = None) -> None:
    load_env_file()
    args = parse_args(argv)
    _validate_args(args)
    _configure_logging(args.verbose)
    try:
        formula_text = _read_formula(args.formula) if getattr(args, "formula", None) is not None else ""
    except OSError as exc:
        print(f"[エラー] --formula を読み込めません: {exc}", file=sys.stderr)
        raise SystemExit(2)
    config = RunConfig.from_args(
        args.command,
        n=args.n,
        var=args.var,
        formula=formula_text,
        candidate=getattr(args, "candidate", None),
        method=getattr(args, "method", "both"),
        modulus=getattr(args, "modulus", None),
        certificate_input=getattr(args, "certificate", None),
        synth_overrides=_collect_synth_overrides(args),
        kripke_overrides=_collect_kripke_overrides(args),
        output_overrides=_collect_output_overrides(args),
    )
    try:
        status = run(config)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        raise SystemExit(1)
    except OSError as exc:
        print(f"[エラー] 出力ファイルを書き込めません: {exc}", file=sys.stderr)
        raise SystemExit(1)
    if status:
        raise SystemExit(status)


def run(config: RunConfig, stream: TextIO | None = None) -> int:
    """設定に従ってコマンドを実行し、終了コードを返します。ドメインエラーは ValueError のまま送出します。"""

    out = stream or sys.stdout
    handlers = {
        "fixpoint": _run_fixpoint,
        "verify": _run_verify,
        "check-cert": _run_check_cert,
        "depths": _run_depths,
        "countermodel": _run_countermodel,
    }
    return handlers[config.command](config, out)


# Commands ------------------------------------------------------------------------------


def _run_fixpoint(config: RunConfig, out: TextIO) -> int:
    a = parse(config.formula)
    want_cert = config.output.certificate_path is not None
    synthesizer = FixedPointSynthesizer(config.n, config.synth, config.kernel.atom_budget)
    result = synthesizer.solve(a, config.var, want_cert=want_cert)
    shown = simplify(result.fixed_point) if config.output.simplify else result.fixed_point
    if result.certificate is not None and config.output.certificate_path is not None:
        write_certificate(result.certificate, config.output.certificate_path)
    if config.output.trace_path is not None:
        write_trace(result.trace, config.output.trace_path)
    if config.output.json:
        summary: dict[str, Any] = {
            "command": "fixpoint",
            "n": config.n,
            "var": config.var,
            "formula": to_text(a),
            "fixed_point": to_text(shown),
            "trace": trace_to_list(result.trace),
        }
        if result.certificate is not None:
            summary["certificate"] = str(config.output.certificate_path)
            summary["certificate_lines"] = len(result.certificate.lines)
        _emit_json(summary, out)
        return 0
    out.write(colorize(to_text(shown), "formula", config.output.color, out) + "\n")
    if result.certificate is not None:
        label = colorize("certificate", "label", config.output.color, out)
        out.write(f"{label}: {config.output.certificate_path} ({len(result.certificate.lines)} lines)\n")
    return 0


def _run_verify(config: RunConfig, out: TextIO) -> int:
    a = parse(config.formula)
    assert config.candidate is not None
    candidate = parse(config.candidate)
    verifier = FixpointVerifier(config.n, config.kernel, config.synth, config.kripke)
    report = verifier.verify(a, candidate, config.var, config.method, config.kripke.max_worlds)
    if report.certificate is not None and config.output.certificate_path is not None:
        write_certificate(report.certificate, config.output.certificate_path)
    if config.output.json:
        _emit_json({"command": "verify", **report.to_dict()}, out)
    else:
        color = config.output.color
        if report.certificate_verdict is not None:
            role = "ok" if report.proved else "error"
            strategy = f" ({report.strategy})" if report.strategy else ""
            out.write(f"cert: {colorize(report.certificate_verdict, role, color, out)}{strategy}\n")
        if report.kripke_verdict is not None:
            role = "error" if report.countermodel is not None else "ok"
            out.write(f"kripke: {colorize(report.kripke_verdict, role, color, out)}\n")
            if report.countermodel is not None:
                out.write(_describe_model(report.countermodel, report.countermodel_world))
    return 0 if report.ok else 1


def _run_check_cert(config: RunConfig, out: TextIO) -> int:
    assert config.certificate_input is not None
    cert = read_certificate(config.certificate_input)
    report = check(cert, cert.logic, config.kernel.atom_budget)
    if config.output.json:
        payload = {"command": "check-cert", "logic_n": cert.logic, "goal": to_text(cert.goal), **report.to_dict()}
        _emit_json(payload, out)
    elif report.ok:
        verdict = colorize("certificate ok", "ok", config.output.color, out)
        out.write(f"{verdict}: wGL_{cert.logic} ⊢ {to_text(cert.goal)}\n")
    else:
        verdict = colorize("certificate rejected", "error", config.output.color, out)
        out.write(f"{verdict} at line {report.line}: {report.reason}\n")
    return 0 if report.ok else 1


def _run_depths(config: RunConfig, out: TextIO) -> int:
    a = parse(config.formula)
    profile = depth_profile(a, config.var, config.modulus)
    if config.output.json:
        _emit_json({"command": "depths", "var": config.var, "formula": to_text(a), **profile.to_dict()}, out)
        return 0
    out.write("depths: " + ", ".join(str(d) for d in sorted(profile.depths)) + "\n")
    if profile.modulus is not None:
        out.write("residues: " + ", ".join(profile.residue_tokens()) + "\n")
    return 0


def _run_countermodel(config: RunConfig, out: TextIO) -> int:
    a = parse(config.formula)
    limit = config.kripke.max_worlds
    found = CountermodelSearch(config.n, config.kripke).search(a, limit)
    if config.output.json:
        payload: dict[str, Any] = {"command": "countermodel", "n": config.n, "formula": to_text(a), "max_worlds": limit}
        payload["countermodel"] = found[0].to_dict() if found else None
        payload["world"] = found[1] if found else None
        _emit_json(payload, out)
        return 0
    if found is None:
        out.write(colorize(f"no countermodel <= {limit} worlds", "ok", config.output.color, out) + "\n")
        return 0
    model, world = found
    out.write(colorize("countermodel found", "error", config.output.color, out) + "\n")
    out.write(_describe_model(model.to_dict(), world))
    return 0


# Helpers ------------------------------------------------------------------------------------


def _emit_json(payload: dict[str, Any], out: TextIO) -> None:
    out.write(json.dumps(payload, ensure_ascii=False) + "\n")


def _describe_model(model: dict[str, Any], world: int | None) -> str:
    edges = ", ".join(f"{i}->{j}" for i, j in model["edges"]) or "(none)"
    valuation = "; ".join(f"{name}={{{', '.join(str(w) for w in worlds)}}}" for name, worlds in model["valuation"].items())
    lines = [f"  worlds: {model['worlds']}", f"  edges: {edges}"]
    if valuation:
        lines.append(f"  valuation: {valuation}")
    lines.append(f"  refuted at: {world}")
    return "\n".join(lines) + "\n"


def _read_formula(raw: str) -> str:
    if raw == "-":
        return sys.stdin.read().strip()
    if raw.startswith("@"):
        return Path(raw[1:]).read_text(encoding="utf-8").strip()
    return raw


def _validate_args(args: argparse.Namespace) -> None:
    errors: list[str] = []
    if args.command not in COMMANDS:
        errors.append(f"[エラー] 未知のコマンドです: {args.command}")
    if args.n < 1:
        errors.append("[エラー] --n には 1 以上の整数を指定してください。")
    if not is_identifier(args.var):
        errors.append(f"[エラー] --var に変数名として使えない文字列が指定されました: {args.var}")
    max_worlds = getattr(args, "max_worlds", None)
    if max_worlds is not None and not 1 <= max_worlds <= MAX_SEARCH_WORLDS:
        errors.append(f"[エラー] --max-worlds には 1 以上 {MAX_SEARCH_WORLDS} 以下の整数を指定してください。")
    workers = getattr(args, "workers", None)
    if workers is not None and workers < 1:
        errors.append("[エラー] --workers には 1 以上の整数を指定してください。")
    modulus = getattr(args, "modulus", None)
    if modulus is not None and modulus < 1:
        errors.append("[エラー] --mod には 1 以上の整数を指定してください。")
    certificate = getattr(args, "certificate", None)
    if certificate is not None and not certificate.is_file():
        errors.append(f"[エラー] 証明書ファイルが見つかりません: {certificate}")
    formula = getattr(args, "formula", None)
    if formula is not None and formula.startswith("@") and not Path(formula[1:]).is_file():
        errors.append(f"[エラー] 論理式ファイルが見つかりません: {formula[1:]}")

    if errors:
        for message in errors:
            print(message, file=sys.stderr)
        raise SystemExit(2)


def _collect_synth_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if getattr(args, "no_shortcut", False):
        overrides["prefer_shortcut"] = False
    return overrides


def _collect_kripke_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    if getattr(args, "max_worlds", None) is not None:
        overrides["max_worlds"] = args.max_worlds
    workers = getattr(args, "workers", None)
    if workers is None:
        workers = current_max_workers()
    if workers is not None:
        overrides["max_workers"] = workers
    return overrides


def _collect_output_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {"json": args.json, "color": current_color_mode()}
    if getattr(args, "simplify", False):
        overrides["simplify"] = True
    if getattr(args, "certificate_out", None) is not None:
        overrides["certificate_path"] = args.certificate_out
    if getattr(args, "trace_out", None) is not None:
        overrides["trace_path"] = args.trace_out
    return overrides


def _configure_logging(verbose: bool) -> None:
    level = logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s [%(levelname)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S")


if __name__ == "__main__":
    main()
