import json
import subprocess
import sys

from dcsim.cli import main


def run_cli(args):
    return main(args)


class TestRun:
    def test_baseline_run_writes_outputs(self, tmp_path, fixtures_dir, capsys):
        out = tmp_path / "out"
        code = run_cli(["run", "--config", str(fixtures_dir / "ny_7day.json"),
                        "--controllers", "ls=baseline,dc=g36,bat=ci3h",
                        "--horizon", "96", "--out", str(out)])
        assert code == 0
        metrics = json.loads((out / "metrics.json").read_text())
        assert len(metrics) == 1
        row = metrics[0]
        for key in ("cfp_kg", "hvac_kwh", "it_kwh", "water_liters",
                    "task_queue", "dropped_total"):
            assert row[key] >= 0.0
        assert (out / "metrics.csv").exists()
        assert "cfp_kg" in capsys.readouterr().out

    def test_horizon_one_trace_has_one_row(self, tmp_path, fixtures_dir):
        out = tmp_path / "out"
        code = run_cli(["run", "--config", str(fixtures_dir / "ny_7day.json"),
                        "--horizon", "1", "--trace", "--out", str(out)])
        assert code == 0
        lines = (out / "trace.csv").read_text().splitlines()
        assert len(lines) == 2  # header + one record

    def test_missing_config_exits_nonzero_without_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = run_cli(["run", "--config", str(tmp_path / "nope.json"),
                        "--out", str(out)])
        assert code == 1
        assert not out.exists()
        assert "error" in capsys.readouterr().err

    def test_invalid_controller_is_validation_error(self, tmp_path, fixtures_dir):
        code = run_cli(["run", "--config", str(fixtures_dir / "ny_7day.json"),
                        "--controllers", "ls=mystery", "--out", str(tmp_path / "o")])
        assert code == 1

    def test_repeat_runs_byte_identical(self, tmp_path, fixtures_dir):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            code = run_cli(["run", "--config", str(fixtures_dir / "ny_7day.json"),
                            "--horizon", "96", "--trace", "--repeat", "2",
                            "--out", str(out)])
            assert code == 0
        assert (out1 / "metrics.csv").read_bytes() == (out2 / "metrics.csv").read_bytes()
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()

    def test_jsonl_trace_structure(self, tmp_path, fixtures_dir):
        jsonl = tmp_path / "golden.jsonl"
        code = run_cli(["run", "--config", str(fixtures_dir / "ny_7day.json"),
                        "--controllers", "ls=scripted:1,dc=scripted:2,bat=scripted:3",
                        "--horizon", "5", "--jsonl", str(jsonl),
                        "--out", str(tmp_path / "out")])
        assert code == 0
        lines = [json.loads(ln) for ln in jsonl.read_text().splitlines()]
        assert len(lines) == 5
        assert lines[-1]["done"] is True
        assert not lines[0]["done"]
        assert set(lines[0]["obs"]) == {"agent_ls", "agent_dc", "agent_bat"}
        assert set(lines[0]["rewards"]) == {"agent_ls", "agent_dc", "agent_bat"}
        assert lines[0]["info"]["t"] == 0


class TestSweep:
    def make_bad_scenario(self, tmp_path, fixtures_dir):
        bad = {
            "experiment": {
                "workload_path": str(fixtures_dir / "workload.csv"),
                "ci_path": str(fixtures_dir / "ci.csv"),
                "weather_path": str(tmp_path / "missing.epw"),
                "horizon_steps": 48,
            }
        }
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(bad))
        return p

    def make_small_scenario(self, tmp_path, fixtures_dir, name="small.json"):
        body = {
            "experiment": {
                "workload_path": str(fixtures_dir / "workload.csv"),
                "ci_path": str(fixtures_dir / "ci.csv"),
                "weather_path": str(fixtures_dir / "weather.epw"),
                "horizon_steps": 48,
            }
        }
        p = tmp_path / name
        p.write_text(json.dumps(body))
        return p

    def test_cartesian_cells_and_ztable(self, tmp_path, fixtures_dir):
        a = self.make_small_scenario(tmp_path, fixtures_dir, "a.json")
        b = self.make_small_scenario(tmp_path, fixtures_dir, "b.json")
        out = tmp_path / "out"
        code = run_cli(["sweep", "--locations", f"locA={a}", f"locB={b}",
                        "--controllers", "ls=baseline,dc=g36,bat=idle",
                        "ls=greedy,dc=g36,bat=ci3h",
                        "--out", str(out), "--jobs", "2"])
        assert code == 0
        lines = (out / "sweep_metrics.csv").read_text().splitlines()
        assert len(lines) == 5  # header + 4 cells
        z = json.loads((out / "sweep_ztable.json").read_text())
        assert len(z["controllers"]) == 4

    def test_partial_failure_keeps_good_cells(self, tmp_path, fixtures_dir):
        good = self.make_small_scenario(tmp_path, fixtures_dir)
        bad = self.make_bad_scenario(tmp_path, fixtures_dir)
        out = tmp_path / "out"
        code = run_cli(["sweep", "--locations", f"good={good}", f"bad={bad}",
                        "--controllers", "ls=baseline,dc=g36,bat=idle",
                        "ls=baseline,dc=maintain,bat=idle",
                        "--out", str(out)])
        assert code == 3
        lines = (out / "sweep_metrics.csv").read_text().splitlines()
        assert len(lines) == 3  # header + 2 good cells
        failures = json.loads((out / "sweep_failures.json").read_text())
        assert len(failures) == 2
        assert all(f["location"] == "bad" for f in failures)

    def test_sweep_outputs_deterministic(self, tmp_path, fixtures_dir):
        a = self.make_small_scenario(tmp_path, fixtures_dir)
        outs = []
        for name in ("o1", "o2"):
            out = tmp_path / name
            code = run_cli(["sweep", "--locations", f"locA={a}",
                            "--controllers", "ls=baseline,dc=g36,bat=ci3h",
                            "ls=baseline,dc=g36,bat=idle", "--out", str(out)])
            assert code == 0
            outs.append((out / "sweep_metrics.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_malformed_location_rejected(self, tmp_path):
        code = run_cli(["sweep", "--locations", "justapath.json",
                        "--controllers", "ls=baseline", "--out", str(tmp_path)])
        assert code == 1


def test_module_entry_point(fixtures_dir, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "dcsim", "run",
         "--config", str(fixtures_dir / "ny_7day.json"),
         "--horizon", "4", "--out", str(tmp_path / "out")],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "cfp_kg" in proc.stdout
