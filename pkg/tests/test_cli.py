import json

import pytest

from vibroident.cli import main

MINI_PROGRAM = {
    "kind": "stepped",
    "name": "mini_x",
    "dof_excited": "X",
    "force_points": [
        {"id": "hw1", "location": [-7.0, -3.0, 1.5], "direction": [0.9659258262890683, 0.25881904510252074, 0.0], "amplitude_n": 336000.0},
        {"id": "hw2", "location": [-7.0, 3.0, 1.5], "direction": [0.9659258262890683, -0.25881904510252074, 0.0], "amplitude_n": 336000.0},
        {"id": "he1", "location": [7.0, -3.0, 1.5], "direction": [0.9659258262890683, -0.25881904510252074, 0.0], "amplitude_n": 336000.0},
        {"id": "he2", "location": [7.0, 3.0, 1.5], "direction": [0.9659258262890683, 0.25881904510252074, 0.0], "amplitude_n": 336000.0},
    ],
    "stepped": {"frequencies": [1.5, 3.0, 7.0, 9.0, 10.0], "duration_per_step": 10.0, "rest_gap": 3.0},
}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    prog = root / "mini_program.json"
    prog.write_text(json.dumps(MINI_PROGRAM))
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps({"program": str(prog), "seed": 11}))
    return root


@pytest.fixture(scope="module")
def simulated(workdir):
    out = workdir / "sim"
    assert main(["simulate", "-c", str(workdir / "cfg.json"), "-o", str(out)]) == 0
    return out


class TestSimulate:
    def test_outputs_exist_and_manifest_modes(self, simulated):
        manifest = json.loads((simulated / "manifest.json").read_text())
        assert len(manifest["modes"]) == 6
        assert (simulated / "response.csv").stat().st_size > 0
        assert (simulated / "force.csv").stat().st_size > 0
        assert manifest["seed"] == 11

    def test_determinism_byte_identical(self, workdir, simulated):
        out2 = workdir / "sim2"
        assert main(["simulate", "-c", str(workdir / "cfg.json"), "-o", str(out2)]) == 0
        for name in ("response.csv", "force.csv", "manifest.json"):
            assert (out2 / name).read_bytes() == (simulated / name).read_bytes()

    def test_env_seed_override(self, workdir, monkeypatch):
        monkeypatch.setenv("VIBROIDENT_SEED", "99")
        out = workdir / "sim_env"
        assert main(["simulate", "-c", str(workdir / "cfg.json"), "-o", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 99

    def test_program_above_nyquist_refused(self, workdir):
        prog = dict(MINI_PROGRAM)
        prog["stepped"] = {"frequencies": [45.0], "duration_per_step": 5.0, "rest_gap": 1.0}
        p = workdir / "fast_program.json"
        p.write_text(json.dumps(prog))
        cfg = workdir / "fast_cfg.json"
        cfg.write_text(json.dumps({"program": str(p)}))
        assert main(["simulate", "-c", str(cfg), "-o", str(workdir / "nope")]) == 4

    def test_bad_config_exit_code(self, workdir):
        bad = workdir / "bad.json"
        bad.write_text("{not json")
        assert main(["simulate", "-c", str(bad), "-o", str(workdir / "x")]) == 2

    def test_missing_model_path(self, workdir):
        cfg = workdir / "missing_model.json"
        cfg.write_text(json.dumps({"model": "nope.json"}))
        assert main(["simulate", "-c", str(cfg), "-o", str(workdir / "x")]) == 2


@pytest.fixture(scope="module")
def analyzed(workdir, simulated):
    out = workdir / "ana"
    rc = main([
        "analyze", "-c", str(workdir / "cfg.json"),
        "--response", str(simulated / "response.csv"),
        "--force", str(simulated / "force.csv"),
        "-o", str(out),
    ])
    assert rc == 0
    return out


class TestAnalyze:
    def test_outputs(self, analyzed):
        for name in ("frc.csv", "frc_rigid.csv", "rbm.csv", "contribution.csv", "damping.json"):
            assert (analyzed / name).exists()
        doc = json.loads((analyzed / "damping.json").read_text())
        assert doc["dof_excited"] == "X"
        assert 0 < doc["xi_lo"] <= doc["xi_hi"] < 1
        assert doc["fn_hz"] > 0

    def test_figures_are_svg(self, analyzed):
        import xml.dom.minidom

        figs = sorted(analyzed.glob("*.svg"))
        assert figs
        for f in figs:
            xml.dom.minidom.parse(str(f))

    def test_rbm_csv_has_12_columns(self, analyzed):
        header = (analyzed / "rbm.csv").read_text().splitlines()[0].split(",")
        assert len(header) == 13   # f_hz + 6 magnitudes + 6 phases
        assert header[0] == "f_hz"

    def test_determinism(self, workdir, simulated, analyzed):
        out2 = workdir / "ana2"
        rc = main([
            "analyze", "-c", str(workdir / "cfg.json"),
            "--response", str(simulated / "response.csv"),
            "--force", str(simulated / "force.csv"),
            "-o", str(out2),
        ])
        assert rc == 0
        for f in sorted(analyzed.iterdir()):
            assert (out2 / f.name).read_bytes() == f.read_bytes(), f.name

    def test_empty_response_is_parse_error(self, workdir, simulated):
        empty = workdir / "empty.csv"
        empty.write_text("")
        rc = main([
            "analyze", "-c", str(workdir / "cfg.json"),
            "--response", str(empty),
            "--force", str(simulated / "force.csv"),
            "-o", str(workdir / "nope2"),
        ])
        assert rc == 3


class TestLinearity:
    def test_identical_curves(self, workdir, analyzed, capsys):
        rc = main(["linearity", str(analyzed / "frc.csv"), str(analyzed / "frc.csv")])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["rms_mm"] == 0.0
        assert doc["shared_points"] > 0


class TestVs:
    CSV = (
        "depth_m,qt_kpa,fs_kpa,sigma_v_kpa,ic\n"
        "1.0,500,20,18,2.0\n"
        "2.0,900,0,36,2.1\n"
    )

    def test_profile_with_gap_row_exits_zero(self, workdir, capsys):
        cpt = workdir / "cpt.csv"
        cpt.write_text(self.CSV)
        rc = main(["vs", str(cpt)])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert lines[2].endswith(",1")   # gap-flagged row, not a failure

    def test_output_file(self, workdir):
        cpt = workdir / "cpt.csv"
        cpt.write_text(self.CSV)
        out = workdir / "vs.csv"
        assert main(["vs", str(cpt), "-o", str(out)]) == 0
        assert out.read_text().startswith("depth_m,")

    def test_parse_error_exit(self, workdir):
        bad = workdir / "bad_cpt.csv"
        bad.write_text("a,b\n1,2\n")
        assert main(["vs", str(bad)]) == 3
