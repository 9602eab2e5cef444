"""環境変数と端末の色設定のローダー。"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Mapping, TextIO

from .config import COLOR_MODES

DEFAULT_ENV_NAME = ".env"
COLOR_ENV = "FP_COLOR"
MAX_WORKERS_ENV = "WGLFIX_MAX_WORKERS"

_ANSI = {
    "ok": "\033[32m",
    "error": "\033[31m",
    "formula": "\033[36m",
    "label": "\033[1m",
}
_RESET = "\033[0m"


def load_env_file(path: str | Path | None = None) -> dict[str, str]:
    """`.env` ファイルを読み込み、未設定の環境変数を補完します。"""

    env_path = _locate_env_file(path)
    if env_path is None or not env_path.exists():
        return {}
    loaded: dict[str, str] = {}
    for raw_line in env_path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            continue
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            continue
        value = _strip_quotes(value.strip())
        if key not in os.environ:
            os.environ[key] = value
        loaded[key] = value
    return loaded


def current_color_mode(source: Mapping[str, str] | None = None) -> str:
    """FP_COLOR を読み取ります。不正な値は auto として扱います。"""

    env = os.environ if source is None else source
    value = (env.get(COLOR_ENV) or "auto").strip().lower()
    return value if value in COLOR_MODES else "auto"


def current_max_workers(source: Mapping[str, str] | None = None) -> int | None:
    env = os.environ if source is None else source
    raw = (env.get(MAX_WORKERS_ENV) or "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value >= 1 else None


def colorize(text: str, role: str, mode: str = "auto", stream: TextIO | None = None) -> str:
    if mode == "never" or role not in _ANSI:
        return text
    if mode == "auto":
        isatty = getattr(stream, "isatty", None)
        if stream is None or isatty is None or not isatty():
            return text
    return f"{_ANSI[role]}{text}{_RESET}"


def _locate_env_file(path: str | Path | None) -> Path | None:
    if path is not None:
        candidate = Path(path)
        if candidate.is_dir():
            candidate = candidate / DEFAULT_ENV_NAME
        return candidate
    candidates: Iterable[Path] = (
        Path.cwd() / DEFAULT_ENV_NAME,
        Path(__file__).resolve().parents[2] / DEFAULT_ENV_NAME,
    )
    for candidate in candidates:
        if candidate.exists():
            return candidate
    return None


def _strip_quotes(value: str) -> str:
    if not value:
        return value
    if len(value) >= 2 and value[0] == value[-1] and value[0] in {'"', "'"}:
        return value[1:-1]
    return value
