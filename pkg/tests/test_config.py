from __future__ import annotations

from pathlib import Path

import pytest

from wglfix.config import RunConfig


def test_from_args_accepts_overrides(tmp_path: Path) -> None:
    config = RunConfig.from_args(
        "verify",
        n=3,
        formula="box box ~p",
        candidate="true",
        method="kripke",
        kernel_overrides={"atom_budget": 12},
        synth_overrides={"prefer_shortcut": False},
        kripke_overrides={"max_worlds": 4, "max_workers": 0},
        output_overrides={"json": True, "certificate_path": str(tmp_path / "cert.json"), "color": "always"},
    )

    assert config.kernel.atom_budget == 12
    assert config.synth.prefer_shortcut is False
    assert config.kripke.max_worlds == 4
    # 0 以下のワーカー数は 1 に丸める
    assert config.kripke.max_workers == 1
    assert config.output.certificate_path == tmp_path / "cert.json"
    assert config.output.color == "always"
    assert config.output.json is True


def test_from_args_defaults() -> None:
    config = RunConfig.from_args("depths", formula="box p")

    assert config.n == 1
    assert config.var == "p"
    assert config.kripke.max_worlds == 3
    assert config.kripke.max_workers is None
    assert config.output.color == "auto"


def test_unknown_color_falls_back_to_auto() -> None:
    config = RunConfig.from_args("depths", output_overrides={"color": "rainbow"})
    assert config.output.color == "auto"


@pytest.mark.parametrize(
    "kwargs",
    [{"command": "prove"}, {"command": "fixpoint", "n": 0}, {"command": "verify", "method": "oracle"}],
)
def test_from_args_rejects_invalid_values(kwargs: dict[str, object]) -> None:
    with pytest.raises(ValueError):
        RunConfig.from_args(**kwargs)  # type: ignore[arg-type]
