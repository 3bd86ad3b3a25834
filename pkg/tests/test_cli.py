import json

import pytest

from platform_sim.cli import main
from platform_sim.experiments import read_csv

SMALL = {"n_human_creators": 6, "n_ai_creators": 4, "n_consumers": 30, "steps": 10,
         "introduce_ai_step": 5, "slate_size": 2}


def write_config(tmp_path, **sections):
    doc = {"sim_config": dict(SMALL)}
    doc.update(sections)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def files(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestAnalyze:
    def test_json_report(self, capsys):
        assert main(["analyze", "--json"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert {"equilibrium", "pre_ai_equilibrium", "welfare", "pre_ai_welfare", "delta",
                "welfare_case"} <= set(rep)
        w = rep["welfare"]
        assert w["welfare"] == pytest.approx(w["cs"] + w["ps_human"] + w["ps_ai"])

    def test_text_and_csv(self, tmp_path, capsys):
        assert main(["analyze", "--out", str(tmp_path)]) == 0
        assert "welfare case" in capsys.readouterr().out
        header, rows = read_csv(tmp_path / "analysis.csv")
        assert header == ["quantity", "with_ai", "without_ai"]
        assert rows

    def test_worked_example(self, tmp_path, capsys):
        doc = {"model_params": dict(beta_h=1, beta_ai=1, eta=1, phi_h=1, phi_ai=2, kappa=1,
                                    gamma=10, alpha_h=2, alpha_ai=2, theta_u=1, delta_u=1)}
        path = tmp_path / "w.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["analyze", "--json", "--config", str(path)]) == 0
        eq = json.loads(capsys.readouterr().out)["equilibrium"]
        assert (eq["A"], eq["B"], eq["C"], eq["p_star"], eq["q_star"]) == (3, 0, 6, 2, 1)


class TestRun:
    def test_rows_and_panels(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--config", write_config(tmp_path), "--out", str(out)]) == 0
        _, rows = read_csv(out / "history.csv")
        assert len(rows) == 10
        assert len(list(out.glob("*.svg"))) == 7

    def test_byte_identical_rerun(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", cfg, "--out", str(a), "--seed", "3"]) == 0
        assert main(["run", "--config", cfg, "--out", str(b), "--seed", "3"]) == 0
        assert files(a) == files(b)


class TestSweepGrid:
    def test_sweep(self, tmp_path):
        cfg = write_config(tmp_path, sweep={"parameter": "platform_fee", "values": [0.0, 0.2],
                                            "seeds": [0, 1]})
        out = tmp_path / "out"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_csv(out / "sweep.csv")
        assert header == ["parameter", "value", "mean_w", "mean_cs", "mean_ps", "n_seeds"]
        assert len(rows) == 2
        _, runs = read_csv(out / "sweep_runs.csv")
        assert len(runs) == 4
        assert (out / "sweep.svg").exists()

    def test_sweep_parallel_invariant(self, tmp_path):
        cfg = write_config(tmp_path, sweep={"parameter": "subsidy", "values": [0.0, 0.5],
                                            "seeds": [0, 1]})
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["sweep", "--config", cfg, "--out", str(a), "--parallel", "1"]) == 0
        assert main(["sweep", "--config", cfg, "--out", str(b), "--parallel", "2"]) == 0
        assert files(a) == files(b)

    def test_grid_single_cell(self, tmp_path):
        cfg = write_config(tmp_path, grid={"fees": [0.2], "biases": [0.5], "subsidies": [0.0],
                                           "seeds": [0]})
        out = tmp_path / "out"
        assert main(["grid", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_csv(out / "grid.csv")
        assert header == ["fee", "bias", "subsidy", "longterm_w", "longterm_cs", "longterm_ps", "rank"]
        assert len(rows) == 1 and rows[0][-1] == "1"

    def test_missing_sections_are_config_errors(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert main(["grid", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestExitCodes:
    def test_missing_config_is_io(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 1

    def test_unwritable_out_is_io(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        assert main(["run", "--config", write_config(tmp_path), "--out", str(blocker / "sub")]) == 1

    def test_invalid_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"sim_config": {"platform_fee": 2.0}}), encoding="utf-8")
        assert main(["run", "--config", str(path), "--out", str(tmp_path)]) == 2
        assert "sim_config.platform_fee" in capsys.readouterr().err

    def test_negative_seed(self, tmp_path):
        assert main(["run", "--out", str(tmp_path), "--seed", "-1"]) == 2

    def test_run_failure(self, tmp_path, monkeypatch):
        import platform_sim.cli as cli

        def boom(config):
            raise RuntimeError("engine exploded")

        monkeypatch.setattr(cli, "run", boom)
        assert main(["run", "--config", write_config(tmp_path), "--out", str(tmp_path / "o")]) == 3

    def test_grid_run_failure(self, tmp_path, monkeypatch):
        import platform_sim.experiments as ex

        def boom(config):
            raise RuntimeError("engine exploded")

        monkeypatch.setattr(ex, "run", boom)
        cfg = write_config(tmp_path, grid={"fees": [0.1], "biases": [1.0], "subsidies": [0.0],
                                           "seeds": [0]})
        assert main(["grid", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
