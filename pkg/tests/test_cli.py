import json
import math

import numpy as np
import pytest

from cslab.cli import (
    EXIT_BLOWUP,
    EXIT_CONFIG,
    EXIT_OK,
    ExperimentConfig,
    complex_from_json,
    complex_to_json,
    main,
)


def write_config(path, **overrides):
    base = {
        "datum": {"resonant": True, "theta": 0.0, "m": 0, "p": {"re": 0.5, "im": 0.0}},
        "engine": "all",
        "truncation": 64,
        "oracle_truncation": 48,
        "dt": 1e-3,
        "time_grid": {"t_start": 0.0, "t_end": 0.4, "stride": 0.1},
        "s_list": [1.0],
        "seed": 0,
        "output_dir": str(path.parent / "out"),
    }
    base.update(overrides)
    path.write_text(json.dumps(base))
    return base


class TestConfig:
    def test_roundtrip_identity(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        write_config(
            cfg_path,
            datum={
                "resonant": False,
                "theta": 0.3,
                "m": 1,
                "p": {"re": 0.3, "im": -0.4},
                "a": {"re": 2.0 / 3.0, "im": 0.0},
                "c": {"re": 1.0, "im": 0.0},
            },
            tolerances={"mass_defect": 1e-10},
        )
        cfg = ExperimentConfig.from_dict(json.loads(cfg_path.read_text()))
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_complex_codec(self):
        z = 0.25 - 1.75j
        assert complex_from_json(complex_to_json(z)) == z
        assert complex_from_json(0.5) == 0.5

    def test_unknown_engine_rejected(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, engine="magic")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG

    def test_invalid_json(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG


class TestSimulate:
    def test_all_engines_emit_files(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg)
        assert main(["simulate", "--config", str(cfg)]) == EXIT_OK
        out = tmp_path / "out"
        for name in ("closed_form.csv", "explicit.csv", "oracle.csv", "cross_engine_summary.json"):
            assert (out / name).exists()
        header = (out / "closed_form.csv").read_text().splitlines()[0].split(",")
        assert header[0] == "t"
        summary = json.loads((out / "cross_engine_summary.json").read_text())
        assert summary["closed_vs_explicit_max_coeff"] < 1e-10
        assert summary["refinement_ok"] is True
        # deliberately small truncation in this plumbing test; the physics
        # gates run at full resolution in the acceptance suite
        assert all(row["oracle_vs_closed_rel_l2"] < 1e-3 for row in summary["oracle"])

    def test_csv_seventeen_significant_digits(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, engine="explicit")
        main(["simulate", "--config", str(cfg)])
        lines = (tmp_path / "out" / "explicit.csv").read_text().splitlines()
        first_value = lines[1].split(",")[1]
        assert float(first_value) > 0.0
        assert len(first_value.replace(".", "").replace("-", "").lstrip("0")) >= 15

    def test_closed_form_requires_resonant(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(
            cfg,
            engine="closed_form",
            datum={
                "resonant": False,
                "theta": 0.0,
                "m": 0,
                "p": {"re": 0.5, "im": 0.0},
                "a": {"re": 2.0 / 3.0, "im": 0.0},
                "c": {"re": 1.0, "im": 0.0},
            },
        )
        assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG

    def test_closed_form_requires_grid_inside_lifespan(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, engine="closed_form", time_grid={"t_start": 0.0, "t_end": 2.0, "stride": 0.5})
        assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG

    def test_empty_grid(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, time_grid={"t_start": 0.0, "t_end": 1.0, "stride": -0.1})
        assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG

    def test_coarse_step_aborts_as_blowup(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, engine="oracle", dt=0.1, time_grid={"t_start": 0.0, "t_end": 1.1, "stride": 0.1})
        assert main(["simulate", "--config", str(cfg)]) == EXIT_BLOWUP

    def test_deterministic_outputs(self, tmp_path):
        cfg1 = tmp_path / "c1.json"
        cfg2 = tmp_path / "c2.json"
        write_config(cfg1, output_dir=str(tmp_path / "out1"))
        write_config(cfg2, output_dir=str(tmp_path / "out2"))
        main(["simulate", "--config", str(cfg1)])
        main(["simulate", "--config", str(cfg2)])
        for name in ("closed_form.csv", "explicit.csv", "oracle.csv", "cross_engine_summary.json"):
            a = (tmp_path / "out1" / name).read_bytes()
            b = (tmp_path / "out2" / name).read_bytes()
            assert a == b


class TestBlowup:
    def test_report_contents(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, truncation=256, output_dir=str(tmp_path / "out"))
        assert main(["blowup", "--config", str(cfg)]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "blowup_report.json").read_text())
        assert report["analytic"]["blowup_time"] == pytest.approx(3.0 * math.pi / 8.0, abs=1e-14)
        assert report["analytic"]["curvature_constant"] == pytest.approx(0.384, abs=1e-15)
        assert report["analytic"]["mass_defect"] == 1.0
        assert report["measured"]["mass_defect"] == pytest.approx(1.0, abs=1e-12)
        assert all(c["pass"] for c in report["checks"])

    def test_p08_constants(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(
            cfg,
            truncation=256,
            datum={"resonant": True, "theta": 0.0, "m": 0, "p": {"re": 0.8, "im": 0.0}},
            output_dir=str(tmp_path / "out"),
        )
        assert main(["blowup", "--config", str(cfg)]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "blowup_report.json").read_text())
        assert report["analytic"]["blowup_time"] == pytest.approx(math.pi * 0.36 / 3.2, abs=1e-14)
        assert report["analytic"]["curvature_constant"] == pytest.approx(0.9216 / 1.64**3, abs=1e-14)

    def test_shift_invariance(self, tmp_path):
        # the shifted datum reports the same lifespan, curvature, and defect
        reports = {}
        for m in (0, 2):
            cfg = tmp_path / f"c{m}.json"
            write_config(
                cfg,
                truncation=256,
                datum={"resonant": True, "theta": 0.0, "m": m, "p": {"re": 0.5, "im": 0.0}},
                output_dir=str(tmp_path / f"out{m}"),
            )
            assert main(["blowup", "--config", str(cfg)]) == EXIT_OK
            reports[m] = json.loads((tmp_path / f"out{m}" / "blowup_report.json").read_text())
        for key in ("blowup_time", "curvature_constant", "mass_defect"):
            assert reports[0]["analytic"][key] == reports[2]["analytic"][key]
        assert reports[2]["measured"]["mass_defect"] == pytest.approx(1.0, abs=1e-12)

    def test_nonresonant_rejected(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(
            cfg,
            datum={
                "resonant": False,
                "theta": 0.0,
                "m": 0,
                "p": {"re": 0.5, "im": 0.0},
                "a": {"re": 2.0 / 3.0, "im": 0.0},
                "c": {"re": 1.0, "im": 0.0},
            },
        )
        assert main(["blowup", "--config", str(cfg)]) == EXIT_CONFIG


class TestStability:
    def test_resonant_report(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, truncation=128, output_dir=str(tmp_path / "out"))
        assert main(["stability", "--config", str(cfg)]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "stability_report.json").read_text())
        assert report["classification"] == "resonant"
        assert report["resonance_times_physical"][0] == pytest.approx(3.0 * math.pi / 8.0, abs=1e-12)
        assert report["measured_first_touch"] == pytest.approx(3.0 * math.pi / 8.0, abs=1e-8)
        assert report["min_abs_x"] < 1e-8
        assert report["decay"]["final"] == pytest.approx(1.0, abs=1e-4)

    def test_nonresonant_report(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(
            cfg,
            truncation=128,
            datum={
                "resonant": False,
                "theta": 0.0,
                "m": 0,
                "p": {"re": 0.5, "im": 0.0},
                "a": {"re": 2.0 / 3.0, "im": 0.0},
                "c": {"re": 1.0, "im": 0.0},
            },
            output_dir=str(tmp_path / "out"),
        )
        assert main(["stability", "--config", str(cfg)]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "stability_report.json").read_text())
        assert report["classification"] == "nonresonant"
        assert report["q0"] < 1.0
        assert report["min_abs_x"] == pytest.approx(1.0, abs=1e-9)
        assert report["decay"]["decayed_below_1e-6"] is True

    def test_sweep(self, tmp_path):
        cfg = tmp_path / "c.json"
        write_config(cfg, truncation=128, output_dir=str(tmp_path / "out"))
        assert main(["stability", "--config", str(cfg), "--sweep", "10"]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "stability_sweep.json").read_text())
        assert report["samples"] == 10
        assert report["misclassifications"] == 0
        assert len(report["rows"]) == 10
