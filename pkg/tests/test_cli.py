"""Command-line front end: subcommands, exit codes, determinism, CSV."""

import csv
import json

from orliczmax.cli import run


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestYoungCommand:
    def test_bp_check_reports_nonmember(self, tmp_path, capsys):
        out = tmp_path / "young.json"
        code = run(["young", "--family", "power", "--a", "2", "--p", "2",
                    "--bp-check", "--out", str(out)])
        assert code == 0
        rep = read_json(out)
        assert rep["bp"]["member"] is False
        assert rep["bp"]["integral"] == "inf"
        assert rep["phi_at_1"] == 1.0

    def test_sandwich_flag(self, tmp_path):
        out = tmp_path / "young.json"
        code = run(["young", "--family", "power_log", "--a", "2", "--b", "1",
                    "--sandwich", "--out", str(out)])
        assert code == 0
        rep = read_json(out)
        assert rep["sandwich"]["ok"] is True
        assert 1.0 - 1e-9 <= rep["sandwich"]["min_ratio"]
        assert rep["sandwich"]["max_ratio"] <= 2.0 + 1e-9


class TestGridCommand:
    def test_tiling_and_covering(self, tmp_path):
        out = tmp_path / "grid.json"
        assert run(["grid", "--depth", "6", "--out", str(out)]) == 0
        rep = read_json(out)
        assert rep["pass"] is True
        assert rep["grid"]["shifts"] == ["0", "1/3"]
        assert rep["tiling"]["rel_err"] <= 1e-12


class TestWeightsCommand:
    def test_power_weight_classes(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "grid": {"root": [0, 1], "depth": 4, "padded": False},
            "omega": {"kind": "power_y", "s": 0.5},
        }))
        out = tmp_path / "w.json"
        code = run(["weights", "--config", str(cfg), "--p", "2",
                    "--alpha", "0", "--classes", "b1,bp,binf", "--out", str(out)])
        assert code == 0
        rep = read_json(out)
        assert abs(rep["bp"]["constant"] - 4.0 / 3.0) <= 1e-9
        assert rep["bp"]["family_size"] > 0
        assert len(rep["bp"]["witness_interval"]) == 2


class TestMaximalCommand:
    def test_field_csv_columns(self, tmp_path, capsys):
        out = tmp_path / "field.csv"
        code = run(["maximal", "--op", "dyadic", "--beta", "0",
                    "--depth", "4", "--family", "power", "--a", "1.5",
                    "--out", str(out)])
        assert code == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["level", "index", "value"]
        assert len(rows) == 1 + 3 * (2**5 - 1)
        report = json.loads(capsys.readouterr().out)
        assert report["beta"] == "0"

    def test_shifted_beta_label(self, tmp_path, capsys):
        out = tmp_path / "field.csv"
        code = run(["maximal", "--op", "dyadic", "--beta", "1/3",
                    "--depth", "4", "--out", str(out)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["beta"] == "1/3"

    def test_kmu_op(self, tmp_path, capsys):
        out = tmp_path / "kmu.csv"
        code = run(["maximal", "--op", "kmu", "--depth", "4", "--out", str(out)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert abs(report["max_value"] - 1.0) <= 1e-9  # measure = weight

    def test_brute_op(self, tmp_path, capsys):
        out = tmp_path / "brute.csv"
        code = run(["maximal", "--op", "brute", "--depth", "4",
                    "--lattice-depth", "3", "--family", "power", "--a", "1.5",
                    "--out", str(out)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["provenance"] == "brute-force"
        assert report["max_value"] > 0.0


class TestStoppingCommand:
    def test_family_schema_and_checks(self, tmp_path):
        out = tmp_path / "family.json"
        code = run(["stopping", "--lambda", "0.2", "--depth", "5",
                    "--family", "power", "--a", "1", "--out", str(out)])
        assert code == 0
        rep = read_json(out)
        assert rep["lambda"] == 0.2
        assert rep["checks"] == {"disjoint": True, "maximal": True, "union": True}
        for member in rep["intervals"]:
            assert set(member) == {"level", "index", "norm"}
            assert member["norm"] > 0.2

    def test_ladder_csv(self, tmp_path):
        out = tmp_path / "family.json"
        ladder = tmp_path / "ladder.csv"
        code = run(["stopping", "--lambda", "0.2", "--depth", "5",
                    "--out", str(out), "--ladder-out", str(ladder)])
        assert code == 0
        with open(ladder, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["lambda", "superlevel_mass", "bound", "ratio"]
        assert len(rows) == 21
        for _, _, _, ratio in rows[1:]:
            assert float(ratio) <= 1.0 + 1e-9


class TestVerifyCommand:
    def test_pass_instance_exit_zero(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["verify", "--thm", "T1", "--depths", "4,5", "--out", str(out)])
        assert code == 0
        rep = read_json(out)
        assert rep["pass"] is True
        assert {r["depth"] for r in rep["ratios"]} == {4, 5}
        assert "runtime_ms" in rep

    def test_negative_control_exit_one(self, tmp_path):
        cfg = tmp_path / "neg.json"
        cfg.write_text(json.dumps({
            "mu": {"kind": "deep_spike", "scale": 16.0},
            "omega": {"kind": "constant", "value": 1.0},
            "condition_family": "dyadic",
            "indicator_depth": 2,
            "seeded_count": 2,
        }))
        out = tmp_path / "report.json"
        code = run(["verify", "--thm", "T1", "--config", str(cfg),
                    "--depths", "4,5", "--out", str(out)])
        assert code == 1
        assert read_json(out)["pass"] is False


class TestExitCodes:
    def test_unknown_subcommand(self):
        assert run(["frobnicate"]) == 2

    def test_unknown_flag(self):
        assert run(["grid", "--no-such-flag"]) == 2

    def test_config_error_names_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"grid": {"root": [1, 0]}}))
        code = run(["grid", "--config", str(cfg)])
        assert code == 2
        assert "grid.root" in capsys.readouterr().err

    def test_unparseable_config(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert run(["grid", "--config", str(cfg)]) == 2

    def test_unknown_field_kind(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"omega": {"kind": "mystery"}}))
        code = run(["maximal", "--config", str(cfg), "--depth", "4"])
        assert code == 2
        assert "field.kind" in capsys.readouterr().err


class TestDeterminism:
    def test_identical_config_identical_bytes(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "omega": {"kind": "power_y", "s": 0.5},
            "seeded_count": 3,
            "indicator_depth": 2,
        }))
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert run(["verify", "--thm", "T1", "--config", str(cfg),
                        "--depths", "4,5", "--seed", "0xB5EBA",
                        "--out", str(out)]) == 0
            rep = read_json(out)
            rep.pop("runtime_ms")
            outs.append(json.dumps(rep, sort_keys=True))
        assert outs[0] == outs[1]

    def test_thread_flag_does_not_change_output(self, tmp_path):
        outs = []
        for threads, name in (("1", "a.json"), ("8", "b.json")):
            out = tmp_path / name
            assert run(["--threads", threads, "verify", "--thm", "T1",
                        "--depths", "4", "--out", str(out)]) == 0
            rep = read_json(out)
            rep.pop("runtime_ms")
            outs.append(json.dumps(rep, sort_keys=True))
        assert outs[0] == outs[1]

    def test_suite_lines_deterministic_modulo_timing(self):
        import re

        from orliczmax.acceptance import run_suite

        def capture():
            lines = []
            run_suite(quick=True, out=lines.append)
            return [re.sub(r" \[\d+\.\d+s\]$", "", ln) for ln in lines
                    if "wall time" not in ln]

        assert capture() == capture()
