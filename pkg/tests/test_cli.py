import json

import numpy as np
import pytest

from vsolitons import NormingVector, SolitonData, SpectralPoint, one_soliton_field
from vsolitons.cli import main, parse_run_config
from vsolitons.config import (
    dataset_digest,
    halfline_to_json,
    parse_boundary,
    parse_halfline,
    parse_soliton_data,
    soliton_data_to_json,
)
from vsolitons.errors import ConfigError
from vsolitons.mirror import solve_mirror_norming
from vsolitons.soldata import Mixed
from vsolitons.verification import FieldGrid


ONE_SOLITON = {
    "n": 2,
    "solitons": [{"u": 0.0, "v": 1.0, "beta": [[1, 0], [0, 0]]}],
}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestConfigParsing:
    def test_soliton_data_roundtrip(self):
        data = parse_soliton_data(ONE_SOLITON)
        assert data.N == 1 and data.n == 2
        assert soliton_data_to_json(data) == {
            "n": 2,
            "solitons": [{"u": 0.0, "v": 1.0, "beta": [[1.0, 0.0], [0.0, 0.0]]}],
        }

    def test_location_precise_errors(self):
        with pytest.raises(ConfigError, match=r"data\.solitons\[0\]\.beta"):
            parse_soliton_data({"n": 2, "solitons": [{"u": 0, "v": 1, "beta": [[1, 0]]}]})
        with pytest.raises(ConfigError, match=r"data\.n"):
            parse_soliton_data({"n": -1, "solitons": []})
        with pytest.raises(ConfigError, match="lower half plane"):
            parse_soliton_data(
                {"n": 1, "solitons": [{"u": 0, "v": -1, "beta": [[1, 0]]}]}
            )

    def test_boundary_kinds(self):
        assert parse_boundary({"kind": "robin", "alpha": 0.5}).alpha == 0.5
        assert parse_boundary({"kind": "mixed", "signs": [1, -1]}).signs == (1, -1)
        with pytest.raises(ConfigError, match="boundary.kind"):
            parse_boundary({"kind": "dirichlet"})

    def test_halfline_roundtrip(self):
        real = SolitonData(
            2, ((SpectralPoint(0.8, 1.0), NormingVector([1.0, 0.4j])),)
        )
        hl = solve_mirror_norming(real, Mixed((1, -1)))
        doc = halfline_to_json(hl)
        back = parse_halfline(doc)
        assert back.N == 1
        assert np.allclose(
            back.mirror_data.points[0][1].beta, hl.mirror_data.points[0][1].beta
        )

    def test_halfline_rejects_corrupted_norming(self):
        real = SolitonData(
            2, ((SpectralPoint(0.8, 1.0), NormingVector([1.0, 0.4j])),)
        )
        hl = solve_mirror_norming(real, Mixed((1, -1)))
        doc = halfline_to_json(hl)
        doc["solitons"][1]["beta"][0][0] += 1e-2
        with pytest.raises(ConfigError, match="constraint"):
            parse_halfline(doc)

    def test_seed_required_with_samples(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_run_config({"mode": "verify", "suite": {"name": "ybe", "samples": 5}})

    def test_unknown_mode(self):
        with pytest.raises(ConfigError, match="mode"):
            parse_run_config({"mode": "meditate"})


class TestExitCodes:
    def test_verify_pass_is_zero(self, tmp_path):
        cfg = write_config(
            tmp_path, {"suite": {"name": "ybe", "samples": 20, "seed": 7, "n": 2}}
        )
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0

    def test_malformed_config_is_one(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["verify", "--config", str(path)]) == 1

    def test_unknown_suite_is_one(self, tmp_path):
        cfg = write_config(tmp_path, {"suite": {"name": "nope", "samples": 1, "seed": 1}})
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1

    def test_imaginary_axis_mirror_is_one(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"data": ONE_SOLITON, "boundary": {"kind": "robin", "alpha": 1.0}},
        )
        assert main(["mirror", "--config", cfg, "--out", str(tmp_path / "o")]) == 1

    def test_failed_check_is_two(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "suite": {
                    "name": "ybe",
                    "samples": 5,
                    "seed": 7,
                    "n": 2,
                    "tolerances": {"algebraic": 1e-18},
                }
            },
        )
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestSimulateMode:
    def test_csv_matches_closed_form(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "data": ONE_SOLITON,
                "grid": {"x0": -2.0, "x1": 2.0, "t0": -0.5, "t1": 0.5, "nx": 9, "nt": 5},
            },
        )
        out = tmp_path / "o"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "grid.csv").read_text().strip().split("\n")
        assert lines[0] == "x,t,re_1,im_1,re_2,im_2"
        assert len(lines) == 1 + 9 * 5
        pt = SpectralPoint(0.0, 1.0)
        nv = NormingVector([1.0, 0.0])
        # rows are ordered t-major, x-minor
        row = lines[1 + 2 * 9 + 3].split(",")  # t index 2, x index 3
        x, t = float(row[0]), float(row[1])
        val = one_soliton_field(pt, nv, x, t)
        assert float(row[2]) == pytest.approx(val[0].real, abs=1e-12)
        assert float(row[3]) == pytest.approx(val[0].imag, abs=1e-12)

    def test_zero_tail_grid_export_shape(self, tmp_path):
        grid = FieldGrid(0, 1, 0, 1, 5, 5, np.zeros((5, 5, 2), complex))
        from vsolitons.cli import export_grid

        export_grid(grid, tmp_path / "g.csv")
        lines = (tmp_path / "g.csv").read_text().strip().split("\n")
        assert len(lines) == 26
        assert set(lines[1].split(",")[2:]) == {"0.0"}

    def test_manifest_contains_digest(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "data": ONE_SOLITON,
                "grid": {"x0": -1, "x1": 1, "t0": -1, "t1": 1, "nx": 5, "nt": 5},
            },
        )
        out = tmp_path / "o"
        main(["simulate", "--config", cfg, "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        data = parse_soliton_data(ONE_SOLITON)
        assert manifest["dataset_digest"] == dataset_digest(soliton_data_to_json(data))
        assert manifest["tool"] == "vsolitons"


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, tmp_path):
        doc = {
            "data": ONE_SOLITON,
            "grid": {"x0": -2, "x1": 2, "t0": -0.5, "t1": 0.5, "nx": 9, "nt": 5},
        }
        cfg = write_config(tmp_path, doc)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["simulate", "--config", cfg, "--out", str(out1)])
        main(["simulate", "--config", cfg, "--out", str(out2)])
        for name in ("report.json", "grid.csv", "manifest.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_suite_reports_identical(self, tmp_path):
        cfg = write_config(
            tmp_path, {"suite": {"name": "reversibility", "samples": 30, "seed": 11, "n": 3}}
        )
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["verify", "--config", cfg, "--out", str(out1)])
        main(["verify", "--config", cfg, "--out", str(out2)])
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()

    def test_different_seed_changes_residuals(self, tmp_path):
        base = {"suite": {"name": "ybe", "samples": 10, "n": 2}}
        cfg = write_config(tmp_path, base)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["verify", "--config", cfg, "--seed", "1", "--out", str(out1)])
        main(["verify", "--config", cfg, "--seed", "2", "--out", str(out2)])
        r1 = json.loads((out1 / "report.json").read_text())["checks"][0]["residual"]
        r2 = json.loads((out2 / "report.json").read_text())["checks"][0]["residual"]
        assert r1 != r2


class TestSuites:
    def test_empty_suite_report(self, tmp_path):
        cfg = write_config(
            tmp_path, {"suite": {"name": "ybe", "samples": 0, "seed": 0}}
        )
        out = tmp_path / "o"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["checks"] == []
        assert report["passed"] is True

    def test_reflection_equation_suite(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "boundary": {"kind": "mixed", "signs": [1, -1]},
                "suite": {"name": "reflection-equation", "samples": 25, "seed": 3, "n": 2},
            },
        )
        out = tmp_path / "o"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert [c["name"] for c in report["checks"]] == ["reflection-equation[given]"]
        assert report["checks"][0]["residual"] <= 1e-10

    def test_permutation_suite(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"suite": {"name": "permutation", "samples": 2, "seed": 5, "N": 3, "n": 2}},
        )
        out = tmp_path / "o"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0

    def test_transfer_mode_records_experiment(self, tmp_path):
        cfg = write_config(tmp_path, {"suite": {"samples": 1, "seed": 2}})
        out = tmp_path / "o"
        assert main(["transfer", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        names = [c["name"] for c in report["checks"]]
        assert "transfer-commutator[identity-boundary]" in names
        assert "transfer-commutator[scalar]" in names
        info = [c for c in report["checks"] if c["informational"]]
        assert info and all(c["passed"] is None for c in info)

    def test_collide_mode(self, tmp_path):
        doc = {
            "data": {
                "n": 2,
                "solitons": [
                    {"u": -0.5, "v": 1.0, "beta": [[1, 0], [0.5, 0.5]]},
                    {"u": 0.5, "v": 1.2, "beta": [[0.3, -0.2], [1, 0]]},
                ],
            }
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "o"
        assert main(["collide", "--config", cfg, "--out", str(out)]) == 0
        doc = json.loads((out / "collide.json").read_text())
        assert set(doc) == {"in", "out"}

    def test_reflect_mode(self, tmp_path):
        doc = {
            "data": {
                "n": 2,
                "solitons": [{"u": 0.8, "v": 1.0, "beta": [[1, 0], [0.4, 0.0]]}],
            },
            "boundary": {"kind": "mixed", "signs": [1, -1]},
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "o"
        assert main(["reflect", "--config", cfg, "--out", str(out)]) == 0
        rec = json.loads((out / "reflect.json").read_text())["reflections"][0]
        assert rec["reflected_k"] == [-0.4, 0.5]

    def test_mirror_mode_writes_halfline(self, tmp_path):
        doc = {
            "data": {
                "n": 2,
                "solitons": [{"u": 0.8, "v": 1.0, "beta": [[1, 0], [0.4, 0.0]]}],
            },
            "boundary": {"kind": "robin", "alpha": 0.7},
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "o"
        assert main(["mirror", "--config", cfg, "--out", str(out)]) == 0
        hl = parse_halfline(json.loads((out / "halfline.json").read_text()))
        assert hl.N == 1
