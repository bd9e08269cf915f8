import json
import subprocess
import sys

import pytest

from protoseq.cli import main
from protoseq.crt import crt0_set
from protoseq.hexalloc import ReusePlan
from protoseq.rscpc import tdma_set


def run(*argv):
    return main(list(argv))


@pytest.fixture()
def scenario_file(tmp_path):
    cfg = {
        "tau_s": 1e-3, "L": 60, "F": 3, "delta_c_slots": 2,
        "R_m": 500.0, "h_m": 1.0, "M": 3,
        "sequences": {"construction": "crt0", "p": 3, "q": 5, "pad_slots": 3},
        "users": [
            {"id": "a", "x": 0, "y": 0, "label": "g0", "shift": 7},
            {"id": "b", "x": 200, "y": 0, "label": "g2", "shift": 3},
            {"id": "c", "x": 0, "y": 350, "label": "*", "shift": 11},
        ],
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestGen:
    def test_writes_set_with_manifest(self, tmp_path):
        out = tmp_path / "family.json"
        assert run("gen", "crt0", "--p", "3", "--q", "5",
                   "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        labels = [e["label"] for e in doc["sequences"]]
        assert labels == ["g0", "g2", "*"]
        assert doc["manifest"]["command"] == "gen"
        assert "created_utc" not in doc["manifest"]
        side = json.loads((tmp_path / "family.json.manifest.json").read_text())
        assert "created_utc" in side
        assert side["config_digest"] == doc["manifest"]["config_digest"]

    def test_reruns_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("gen", "rs_cpc", "--n", "5", "--p", "11", "--k", "3", "--out", str(a))
        run("gen", "rs_cpc", "--n", "5", "--p", "11", "--k", "3", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_pad_flag(self, capsys):
        assert run("gen", "crt0", "--p", "3", "--q", "5", "--pad", "3") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["sequences"][0]["period"] == 60

    def test_product_from_files(self, tmp_path):
        fx, fy = tmp_path / "x.json", tmp_path / "y.json"
        crt0_set(2, 3).save(str(fx))
        tdma_set(5, 0).save(str(fy))
        out = tmp_path / "prod.json"
        assert run("gen", "product", "--x", str(fx), "--y", str(fy),
                   "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["sequences"][0]["period"] == 30

    def test_expanded_from_base_file(self, tmp_path, capsys):
        base = tmp_path / "base.json"
        run("gen", "rs_cpc", "--n", "8", "--p", "17", "--k", "3",
            "--out", str(base))
        capsys.readouterr()
        assert run("gen", "expanded", "--base", str(base), "--p", "3",
                   "--m", "3") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["meta"]["cf_floor"] == 12
        assert len(doc["sequences"]) == 17

    def test_missing_flags(self):
        assert run("gen", "crt0", "--p", "3") == 2

    def test_invalid_construction_params(self):
        assert run("gen", "crt0", "--p", "4", "--q", "8") == 2  # gcd != 1


class TestVerify:
    def test_ui_holds(self, tmp_path):
        f = tmp_path / "s.json"
        crt0_set(3, 5).save(str(f))
        assert run("verify", "ui", "--set", str(f)) == 0

    def test_ui_violated(self, capsys):
        # two weight-1 members of period 2 collide whenever shifts align
        cfg = json.dumps({"sequences": [
            {"period": 2, "ones": [0], "label": "a"},
            {"period": 2, "ones": [1], "label": "b"}]})
        assert run("verify", "ui", "--config", cfg) == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["counterexample"] == {"shifts": [0, 1]}

    def test_window_shortcut(self):
        assert run("verify", "window", "--p", "3") == 0

    def test_xcorr_violated(self, capsys):
        cfg = json.dumps({"construction": "crt0", "p": 4, "q": 7})
        assert run("verify", "xcorr", "--config", cfg, "--bound", "1") == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["counterexample"]["value"] == 2

    def test_separation_default_bound(self, tmp_path):
        f = tmp_path / "s.json"
        crt0_set(5, 9).save(str(f))
        assert run("verify", "separation", "--set", str(f)) == 0

    def test_report_file_and_rerun(self, tmp_path):
        f = tmp_path / "s.json"
        crt0_set(3, 5).save(str(f))
        a, b = tmp_path / "r1.json", tmp_path / "r2.json"
        run("verify", "ui", "--set", str(f), "--out", str(a))
        run("verify", "ui", "--set", str(f), "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert json.loads(a.read_text())["verdict"] == "holds"

    def test_random_mode_needs_seeded_report(self, tmp_path, capsys):
        f = tmp_path / "s.json"
        crt0_set(3, 5).save(str(f))
        assert run("verify", "ui", "--set", str(f), "--mode", "random",
                   "--samples", "500", "--seed", "7") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["seed"] == 7 and doc["samples"] == 500

    def test_missing_source(self):
        assert run("verify", "ui") == 2

    def test_missing_set_file(self):
        assert run("verify", "ui", "--set", "/nonexistent/s.json") == 2

    def test_state_cap_is_usage_error(self, tmp_path):
        f = tmp_path / "big.json"
        crt0_set(13, 25).save(str(f))   # 325^12 assignments, way past the cap
        assert run("verify", "ui", "--set", str(f)) == 2


class TestAlloc:
    def test_cluster_summary(self, capsys):
        assert run("alloc", "--r", "500", "--h", "1") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["G"] == 333337
        assert doc["b1"] == 392 and doc["b2"] == 271
        assert doc["min_cochannel_m"] >= 1000.0
        assert doc["plan"]["G"] == 333337

    def test_cell_allocation(self, capsys):
        assert run("alloc", "--r", "1.94", "--h", "1", "--cell", "2,1") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["index"] == "0"      # (2,1) generates the sublattice
        assert doc["cell"] == [2, 1]

    def test_missing_flags(self):
        assert run("alloc", "--r", "500") == 2


class TestParams:
    def test_prop1(self, capsys):
        assert run("params", "prop1", "--m", "3", "--g", "7",
                   "--delta", "0") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["frame_slots"] == 42
        assert (doc["n"], doc["p"], doc["k"]) == (6, 7, 3)

    def test_prop2(self, capsys):
        assert run("params", "prop2", "--m", "5", "--g", "37") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["frame_slots"] == 544
        assert (doc["n"], doc["p"], doc["k"]) == (16, 17, 4)

    def test_prop1_needs_delta(self):
        assert run("params", "prop1", "--m", "3", "--g", "7") == 2

    def test_infeasible(self):
        assert run("params", "prop1", "--m", "499", "--g", "7",
                   "--delta", "0") == 2


class TestSim:
    def test_holds_and_reruns_identically(self, tmp_path, scenario_file):
        out1, out2 = str(tmp_path / "runA"), str(tmp_path / "runB")
        assert run("sim", "--config", scenario_file, "--seed", "5",
                   "--out", out1) == 0
        assert run("sim", "--config", scenario_file, "--seed", "5",
                   "--out", out2) == 0
        for suffix in (".report.json", ".log.csv"):
            a = (tmp_path / ("runA" + suffix)).read_bytes()
            b = (tmp_path / ("runB" + suffix)).read_bytes()
            assert a == b
        report = json.loads((tmp_path / "runA.report.json").read_text())
        assert report["verdict"] == "holds"
        assert report["frame_offset_audit"] is True
        side = json.loads((tmp_path / "runA.manifest.json").read_text())
        assert side["outputs"] == [out1 + ".report.json", out1 + ".log.csv"]

    def test_violation_exit_code(self, tmp_path):
        cfg = {
            "tau_s": 1e-3, "L": 2, "F": 3, "delta_c_slots": 0,
            "R_m": 100.0, "h_m": 1.0, "M": 2, "slot_synchronized": True,
            "sequences": {"construction": "tdma", "G": 2, "delta": 0},
            "users": [
                {"id": "a", "x": 0, "y": 0, "label": "t0", "offset_s": 0},
                {"id": "b", "x": 10, "y": 0, "label": "t0", "offset_s": 0},
            ],
        }
        path = tmp_path / "clash.json"
        path.write_text(json.dumps(cfg))
        assert run("sim", "--config", str(path), "--seed", "1") == 1

    def test_generates_seed_when_missing(self, scenario_file, capsys):
        assert run("sim", "--config", scenario_file) == 0
        assert "generated seed:" in capsys.readouterr().err

    def test_missing_config_flag(self):
        assert run("sim") == 2

    def test_nonexistent_config(self):
        assert run("sim", "--config", "/nonexistent/cfg.json") == 2

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert run("sim", "--config", str(path)) == 2


class TestCompare:
    def test_json_table(self, capsys):
        assert run("compare", "--m", "3", "--g", "7", "--delta", "0") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["winner"] == "tdma"
        assert len(doc["rows"]) == 3

    def test_csv_format(self, tmp_path):
        out = tmp_path / "table.csv"
        assert run("compare", "--m", "5", "--g", "37", "--delta", "2",
                   "--format", "csv", "--out", str(out)) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "scheme,frame_slots,meets_floor,params"
        assert len(lines) == 4
        assert lines[1].startswith("tdma,111,")

    def test_missing_flags(self):
        assert run("compare", "--m", "3") == 2


class TestEntryPoints:
    def test_console_script(self):
        proc = subprocess.run(["protoseq", "params", "prop2", "--m", "3",
                               "--g", "7"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["frame_slots"] == 84

    def test_module_invocation(self):
        proc = subprocess.run([sys.executable, "-m", "protoseq.cli",
                               "alloc", "--r", "1.94", "--h", "1"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["G"] == 7
