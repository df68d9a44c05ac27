"""Tests for the command-line entry point."""

import pytest
import yaml

from src.core.error_classifier import ErrorCategory, ErrorClassifier
from src.main import build_parser, main

TINY_RUN = {
    "seed": 1,
    "batch_size": 8,
    "epochs": 1,
    "checkpoint_every": 1,
    "model": {
        "clip_size": 3,
        "height": 32,
        "width": 48,
        "backbone_channels": [4, 4, 6, 8],
        "wsl_channels": 4,
        "scene_channels": 5,
        "guidance_dim": 3,
        "decoder_width": 8,
        "decoder_heads": 2,
        "decoder_layers": 1,
    },
    "data": {"heldout_videos": 1, "synthetic": {"videos": 2, "frames_per_video": 8}},
}


@pytest.fixture(autouse=True)
def _log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("LOG_DIR", str(tmp_path / "logs"))


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.yml"
    path.write_text(yaml.safe_dump({"run": TINY_RUN}), encoding="utf-8")
    return path


def _error_lines(err: str) -> list[str]:
    return [line for line in err.splitlines() if line.startswith("error category=")]


class TestParser:
    def test_eval_requires_checkpoint(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["eval", "--out", "x"])

    def test_flags(self):
        args = build_parser().parse_args(
            ["train", "--config", "c.yml", "--seed", "5", "--out", "o", "--deterministic"]
        )
        assert (args.command, args.config, args.seed, args.deterministic) == ("train", "c.yml", 5, True)


class TestCommands:
    def test_train_then_eval(self, config_file, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["--log-level", "ERROR", "train", "--config", str(config_file), "--out", str(out), "--deterministic"]) == 0
        assert (out / "model.ckpt").exists()
        assert yaml.safe_load((out / "run_config.yml").read_text())["run"]["deterministic"] is True

        eval_dir = tmp_path / "eval"
        code = main(
            ["--log-level", "ERROR", "eval", "--checkpoint", str(out / "model.ckpt"), "--out", str(eval_dir)]
        )
        assert code == 0
        assert (eval_dir / "predictions.txt").exists()
        assert (eval_dir / "report.txt").exists()
        assert _error_lines(capsys.readouterr().err) == []

    def test_synth_writes_layout(self, config_file, tmp_path):
        out = tmp_path / "data"
        assert main(["--log-level", "ERROR", "synth", "--config", str(config_file), "--out", str(out)]) == 0
        assert sorted(p.name for p in (out / "labels").iterdir()) == ["SYN0-000.txt", "SYN0-001.txt"]
        assert (out / "splits.yml").exists()

    def test_ablate_with_grid(self, config_file, tmp_path):
        grid = tmp_path / "grid.yml"
        grid.write_text(yaml.safe_dump({"grid": {"axes": {"model.clip_size": [1, 3]}}}))
        out = tmp_path / "ablation"
        code = main(
            ["--log-level", "ERROR", "ablate", "--config", str(config_file), "--grid", str(grid), "--out", str(out)]
        )
        assert code == 0
        assert len((out / "ablation.csv").read_text().splitlines()) == 3


class TestErrors:
    def test_missing_config_is_io(self, tmp_path, capsys):
        code = main(["train", "--config", str(tmp_path / "nope.yml"), "--out", str(tmp_path / "o")])
        assert code == ErrorClassifier.EXIT_CODES[ErrorCategory.IO]
        lines = _error_lines(capsys.readouterr().err)
        assert len(lines) == 1
        assert lines[0].startswith("error category=io message=") and "nope.yml" in lines[0]

    def test_invalid_value_is_configuration(self, tmp_path, capsys):
        path = tmp_path / "bad.yml"
        path.write_text(yaml.safe_dump({"run": {"model": {"tam": {"kernel": 4}}}}))
        code = main(["train", "--config", str(path), "--out", str(tmp_path / "o")])
        assert code == ErrorClassifier.EXIT_CODES[ErrorCategory.CONFIGURATION]
        assert _error_lines(capsys.readouterr().err)[0].startswith("error category=configuration")

    def test_missing_checkpoint_is_io(self, tmp_path, capsys):
        code = main(["eval", "--checkpoint", str(tmp_path / "none.ckpt"), "--out", str(tmp_path / "o")])
        assert code == ErrorClassifier.EXIT_CODES[ErrorCategory.IO]
        assert "none.ckpt" in _error_lines(capsys.readouterr().err)[0]


class TestLogLevel:
    def _log_text(self, tmp_path) -> str:
        return "".join(p.read_text(encoding="utf-8") for p in (tmp_path / "logs").glob("*.log"))

    def test_yaml_level_applies(self, tmp_path, monkeypatch):
        monkeypatch.delenv("LOG_LEVEL", raising=False)
        path = tmp_path / "debug.yml"
        path.write_text(yaml.safe_dump({"run": {**TINY_RUN, "log_level": "debug"}}))
        assert main(["synth", "--config", str(path), "--out", str(tmp_path / "data")]) == 0

        text = self._log_text(tmp_path)
        assert "DEBUG" in text and "Resolved" in text

    def test_flag_beats_yaml_level(self, tmp_path, monkeypatch):
        monkeypatch.delenv("LOG_LEVEL", raising=False)
        path = tmp_path / "debug.yml"
        path.write_text(yaml.safe_dump({"run": {**TINY_RUN, "log_level": "DEBUG"}}))
        code = main(["--log-level", "INFO", "synth", "--config", str(path), "--out", str(tmp_path / "data")])
        assert code == 0
        assert "Resolved" not in self._log_text(tmp_path)

    def test_unknown_level_is_configuration_error(self, tmp_path, capsys):
        path = tmp_path / "bad.yml"
        path.write_text(yaml.safe_dump({"run": {"log_level": "LOUD"}}))
        code = main(["synth", "--config", str(path), "--out", str(tmp_path / "data")])
        assert code == ErrorClassifier.EXIT_CODES[ErrorCategory.CONFIGURATION]
        assert "log_level" in _error_lines(capsys.readouterr().err)[0]
