"""Command line entry points: outputs on disk and exit codes."""
import json

import pytest

from followbot.cli import main


class TestRun:
    def test_writes_metrics_and_figure(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["run", "--out", str(out), "--trace"])
        assert code == 0
        for name in ("metrics.json", "metrics.csv", "run_log.json",
                     "trace.json", "trajectory.png"):
            assert (out / name).exists(), name
        text = capsys.readouterr().out
        assert "follow success: True" in text
        doc = json.loads((out / "metrics.json").read_text())
        assert doc["final_state"] == "following_behind"

    def test_seed_override(self, tmp_path):
        out = tmp_path / "run"
        main(["run", "--out", str(out), "--seed", "99"])
        doc = json.loads((out / "run_log.json").read_text())
        assert doc["config"]["seed"] == 99

    def test_bad_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"duration": -5}))
        code = main(["run", "--config", str(bad)])
        assert code == 2
        assert "scenario error" in capsys.readouterr().err


class TestSweep:
    def test_writes_table_and_figure(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = main(["sweep", "--out", str(out), "--seeds", "2",
                     "--speeds", "0.2"])
        assert code == 0
        for name in ("sweep.csv", "sweep.json", "sweep.png"):
            assert (out / name).exists(), name
        csv_text = (out / "sweep.csv").read_text()
        assert csv_text.splitlines()[0] == "speed_mps,behind,right,left"
        assert "speed_mps" in capsys.readouterr().out


class TestCaseStudy:
    def test_pass_exit_0(self, tmp_path, capsys):
        out = tmp_path / "cs"
        code = main(["case-study", "--out", str(out)])
        assert code == 0
        for name in ("case_study.json", "case_study.png", "trajectory.png"):
            assert (out / name).exists(), name
        text = capsys.readouterr().out
        assert "result: PASS" in text
        assert "completion time" in text

    def test_fail_exit_1(self, tmp_path, capsys):
        from followbot.scenario import bundled_scenario_path
        doc = json.loads(bundled_scenario_path("case_study_chair").read_text())
        doc["keywords"] = []
        cfg = tmp_path / "no_help.json"
        cfg.write_text(json.dumps(doc))
        code = main(["case-study", "--config", str(cfg),
                     "--out", str(tmp_path / "cs")])
        assert code == 1
        assert "FAIL" in capsys.readouterr().out


class TestServe:
    def test_requires_tokens(self, capsys):
        code = main(["serve"])
        assert code == 2
        assert "no auth tokens" in capsys.readouterr().err

    def test_token_file(self, tmp_path, capsys, monkeypatch):
        # stop the serve loop right after startup by faking an interrupt
        import time as time_mod

        real_sleep = time_mod.sleep

        def raise_interrupt(seconds):
            # only the serve wait loop uses this exact interval
            if seconds == 0.5:
                raise KeyboardInterrupt
            real_sleep(seconds)

        monkeypatch.setattr(time_mod, "sleep", raise_interrupt)
        tokens = tmp_path / "tokens.txt"
        tokens.write_text("alpha\n\nbeta\n")
        code = main(["serve", "--port", "0", "--token-file", str(tokens)])
        assert code == 0
        assert "serving on 127.0.0.1:" in capsys.readouterr().out
