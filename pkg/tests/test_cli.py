"""CLI subcommands: outputs, formats, determinism, figures, exit codes."""

from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from contextlib import redirect_stdout

import pytest

from dmspec.cli import main


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def write_config(tmp_path, obj, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


BERNOULLI_CFG = {"type": "step", "breaks": [0.0, 0.5], "values": [5.0, 0.0],
                 "command": {"max_period": 4}}
COSINE_CFG = {"type": "trigpoly", "const": 0.0, "cos": [1.0], "sin": [],
              "command": {"max_period": 4}}


class TestBands:
    def test_json_structure(self, tmp_path):
        cfg = write_config(tmp_path, BERNOULLI_CFG)
        code, out = run_cli(["bands", "--config", cfg, "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["merged"]["max_period_used"] == 4
        assert payload["orbits"][0]["period"] == 1
        assert payload["orbits"][0]["bands"][0] == pytest.approx([3.0, 7.0], abs=1e-8)

    def test_csv_matches_json_values(self, tmp_path):
        cfg = write_config(tmp_path, BERNOULLI_CFG)
        _, json_out = run_cli(["bands", "--config", cfg, "--format", "json"])
        _, csv_out = run_cli(["bands", "--config", cfg, "--format", "csv"])
        payload = json.loads(json_out)
        rows = list(csv.DictReader(io.StringIO(csv_out)))
        json_orbit_bands = [
            (o["period"], tuple(b)) for o in payload["orbits"] for b in o["bands"]
        ]
        csv_orbit_bands = [
            (int(r["period"]), (float(r["lo"]), float(r["hi"])))
            for r in rows if r["source"] == "orbit"
        ]
        assert csv_orbit_bands == json_orbit_bands

    def test_deterministic_bytes(self, tmp_path):
        cfg = write_config(tmp_path, COSINE_CFG)
        _, a = run_cli(["bands", "--config", cfg])
        _, b = run_cli(["bands", "--config", cfg])
        assert a == b

    def test_svg_emitted(self, tmp_path):
        cfg = write_config(tmp_path, COSINE_CFG)
        plot = tmp_path / "bands.svg"
        code, _ = run_cli(["bands", "--config", cfg, "--plot", str(plot)])
        assert code == 0
        root = ET.parse(plot).getroot()
        assert root.tag.endswith("svg")
        assert len(list(root.iter())) > 5


class TestSpectrumAndGaps:
    def test_spectrum_round_trip(self, tmp_path):
        from dmspec import SpectrumApprox, bernoulli, union_spectrum

        cfg = write_config(tmp_path, BERNOULLI_CFG)
        code, out = run_cli(["spectrum", "--config", cfg, "--format", "json"])
        assert code == 0
        re_ingested = SpectrumApprox.from_json(json.loads(out))
        direct = union_spectrum(bernoulli(5.0), 4)
        assert [(b.lo, b.hi) for b in re_ingested.bands] == \
            [(b.lo, b.hi) for b in direct.bands]

    def test_gaps_report(self, tmp_path):
        cfg = write_config(tmp_path, BERNOULLI_CFG)
        code, out = run_cli(["gaps", "--config", cfg, "--format", "json"])
        assert code == 0
        gaps = json.loads(out)["gaps"]
        assert any(g["lo"] < 2.5 < g["hi"] for g in gaps)

    def test_default_config_is_free(self):
        code, out = run_cli(["spectrum", "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["bands"][0] == pytest.approx([-2.0, 2.0], abs=1e-8)


class TestIds:
    def test_table_and_plot(self, tmp_path):
        cfg = write_config(tmp_path, {
            "type": "trigpoly", "const": 0.0, "cos": [], "sin": [],
            "command": {"max_period": 2, "N": 64, "M": 4, "grid_points": 101},
        })
        out_path = tmp_path / "ids.csv"
        plot = tmp_path / "ids.svg"
        code, _ = run_cli(["ids", "--config", cfg, "--format", "csv",
                           "--out", str(out_path), "--plot", str(plot)])
        assert code == 0
        rows = list(csv.DictReader(out_path.open()))
        assert len(rows) == 101
        ks = [float(r["k"]) for r in rows]
        assert ks == sorted(ks)
        assert ks[0] == 0.0 and ks[-1] == 1.0
        assert ET.parse(plot).getroot().tag.endswith("svg")

    def test_csv_json_values_identical(self, tmp_path):
        cfg = write_config(tmp_path, {
            "type": "trigpoly", "const": 0.0, "cos": [1.0], "sin": [],
            "command": {"max_period": 2, "N": 64, "M": 4, "grid_points": 51},
        })
        _, json_out = run_cli(["ids", "--config", cfg, "--format", "json"])
        _, csv_out = run_cli(["ids", "--config", cfg, "--format", "csv"])
        payload = json.loads(json_out)
        rows = list(csv.DictReader(io.StringIO(csv_out)))
        # 17 significant digits round-trip doubles exactly
        assert [float(r["E"]) for r in rows] == payload["energies"]
        assert [float(r["k"]) for r in rows] == payload["k"]

    def test_seed_flag_overrides(self, tmp_path):
        cfg = write_config(tmp_path, {
            "type": "trigpoly", "const": 0.0, "cos": [1.0], "sin": [],
            "command": {"max_period": 2, "N": 64, "M": 4, "grid_points": 51,
                        "seed": 1},
        })
        _, a = run_cli(["ids", "--config", cfg])
        _, b = run_cli(["ids", "--config", cfg, "--seed", "2"])
        assert json.loads(a)["seed"] == 1
        assert json.loads(b)["seed"] == 2


class TestRotation:
    def test_free_default_config(self):
        code, out = run_cli(["rotation", "--energies", "3.0,-3.0", "--format", "json"])
        assert code == 0
        rows = json.loads(out)["rotation"]
        assert rows[0]["verdict"] == "integer" and rows[0]["integer"] == 0
        assert rows[1]["verdict"] == "integer" and rows[1]["integer"] == 1

    def test_inside_spectrum_flagged(self):
        code, out = run_cli(["rotation", "--energies", "0.0", "--format", "json"])
        assert code == 0
        assert json.loads(out)["rotation"][0]["verdict"] == "not_hyperbolic"

    def test_requires_energies(self):
        code, _ = run_cli(["rotation"])
        assert code == 2


class TestVerify:
    def test_small_scale_free_config(self, tmp_path):
        cfg = write_config(tmp_path, {
            "type": "trigpoly", "const": 0.0, "cos": [], "sin": [],
            "command": {"max_period": 4, "shrink_periods": [2, 3, 4],
                        "N": 64, "M": 8, "grid_points": 201, "steps": 300,
                        "omega_samples": 4, "oracle_max_period": 4},
        })
        code, out = run_cli(["verify", "--config", cfg, "--format", "json"])
        payload = json.loads(out)
        assert payload["all_passed"], [c for c in payload["checks"] if not c["passed"]]
        assert code == 0

    def test_gapless_step_function_fails_disconnection(self, tmp_path):
        # a constant step function is flagged discontinuous but has no gap,
        # so the disconnection branch reports failure
        cfg = write_config(tmp_path, {
            "type": "step", "breaks": [0.0], "values": [0.0],
            "command": {"max_period": 3, "N": 64, "M": 8, "grid_points": 101,
                        "steps": 200, "omega_samples": 4, "oracle_max_period": 3},
        })
        code, out = run_cli(["verify", "--config", cfg, "--format", "json"])
        assert code == 1
        payload = json.loads(out)
        failed = [c["name"] for c in payload["checks"] if not c["passed"]]
        assert "disconnection_and_gap_label" in failed


class TestErrors:
    def test_missing_config_file(self):
        code, _ = run_cli(["bands", "--config", "/nonexistent/zzz.json"])
        assert code == 2

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        code, _ = run_cli(["bands", "--config", str(path)])
        assert code == 2

    def test_unknown_sampling_type(self, tmp_path):
        cfg = write_config(tmp_path, {"type": "mystery"})
        code, _ = run_cli(["bands", "--config", cfg])
        assert code == 2
