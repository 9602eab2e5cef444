from __future__ import annotations

import io
import os
from pathlib import Path

import pytest

from wglfix import env


class _Terminal(io.StringIO):
    def isatty(self) -> bool:
        return True


def test_load_env_file_populates_missing_variables(tmp_path: Path, monkeypatch) -> None:
    env_path = tmp_path / ".env"
    env_path.write_text(
        """
        # comment
        FP_COLOR="always"
        WGLFIX_MAX_WORKERS=4
        not a pair
        """,
        encoding="utf-8",
    )
    monkeypatch.setenv("FP_COLOR", "")
    monkeypatch.delenv("FP_COLOR")
    monkeypatch.setenv("WGLFIX_MAX_WORKERS", "2")

    loaded = env.load_env_file(tmp_path)

    assert loaded == {"FP_COLOR": "always", "WGLFIX_MAX_WORKERS": "4"}
    assert os.environ["FP_COLOR"] == "always"
    # 既存の環境変数は上書きしない
    assert os.environ["WGLFIX_MAX_WORKERS"] == "2"


def test_load_env_file_missing(tmp_path: Path) -> None:
    assert env.load_env_file(tmp_path / "absent.env") == {}


@pytest.mark.parametrize(
    ("value", "expected"),
    [("always", "always"), (" NEVER ", "never"), ("rainbow", "auto"), ("", "auto")],
)
def test_current_color_mode(value: str, expected: str) -> None:
    assert env.current_color_mode({"FP_COLOR": value}) == expected


@pytest.mark.parametrize(("value", "expected"), [("3", 3), ("0", None), ("many", None), ("", None)])
def test_current_max_workers(value: str, expected: int | None) -> None:
    assert env.current_max_workers({"WGLFIX_MAX_WORKERS": value}) == expected


def test_colorize_respects_mode_and_terminal() -> None:
    assert env.colorize("ok", "ok", "never", _Terminal()) == "ok"
    assert env.colorize("ok", "ok", "auto", io.StringIO()) == "ok"
    assert env.colorize("ok", "ok", "auto", _Terminal()) == "\033[32mok\033[0m"
    assert env.colorize("ok", "ok", "always", io.StringIO()) == "\033[32mok\033[0m"
    assert env.colorize("ok", "unknown", "always") == "ok"
