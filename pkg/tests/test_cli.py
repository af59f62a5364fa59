"""Command-line driver: config handling, artifacts, exit codes."""

import numpy as np
import pytest

from momscat.cli import JobConfig, _read_config_file, compare_runs, main
from momscat.postproc import FarFieldPattern, write_pattern_csv

from conftest import CONFIGS, MESHES


@pytest.fixture(scope="module")
def cube_run(tmp_path_factory):
    """One full EFIE run on the small cube; several tests share it."""
    out = tmp_path_factory.mktemp("cube") / "cube_efie"
    rc = main([
        "--mesh", str(MESHES / "cube.off"),
        "--freq", "1e9",
        "--out", str(out),
        "--log-convergence",
    ])
    return rc, out


def test_run_exit_code_and_artifacts(cube_run):
    rc, out = cube_run
    assert rc == 0
    assert out.with_suffix(".csv").exists()
    assert out.parent.joinpath(out.name + "_report.txt").exists()
    assert out.parent.joinpath(out.name + "_convergence.csv").exists()


def test_full_cut_row_contract(cube_run):
    _, out = cube_run
    lines = out.with_suffix(".csv").read_text().splitlines()
    # default cut theta=90 at step 1: both endpoints included
    assert lines[0] == "theta_deg,phi_deg,sigma_dbsm,etheta_re,etheta_im,ephi_re,ephi_im"
    assert len(lines) == 1 + 361


def test_report_contents(cube_run):
    _, out = cube_run
    report = out.parent.joinpath(out.name + "_report.txt").read_text()
    assert "unknowns: 72" in report
    assert "basis functions: 72" in report
    assert "formulation: efie" in report
    assert "converged: True" in report
    assert "resolved config:" in report
    # the echo lists the resolved values, sorted by key
    assert "freq=1000000000.0" in report
    assert report.index("cut=") < report.index("freq=") < report.index("mesh=")


def test_convergence_log_shape(cube_run):
    _, out = cube_run
    lines = out.parent.joinpath(out.name + "_convergence.csv").read_text().splitlines()
    assert lines[0] == "iter,residual"
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[1]) == pytest.approx(1.0)
    assert float(lines[-1].split(",")[1]) <= 1e-4


def test_runs_are_deterministic(cube_run, tmp_path):
    _, out = cube_run
    rc = main([
        "--mesh", str(MESHES / "cube.off"),
        "--freq", "1e9",
        "--out", str(tmp_path / "again"),
    ])
    assert rc == 0
    assert (tmp_path / "again.csv").read_bytes() == out.with_suffix(".csv").read_bytes()


def test_combined_source_doubles_unknowns(tmp_path):
    rc = main([
        "--mesh", str(MESHES / "cube.off"),
        "--freq", "1e9",
        "--formulation", "csie",
        "--step", "5",
        "--out", str(tmp_path / "cube_csie"),
    ])
    assert rc == 0
    report = (tmp_path / "cube_csie_report.txt").read_text()
    assert "basis functions: 72" in report
    assert "unknowns: 144" in report


def test_gmsh_input(tmp_path):
    rc = main([
        "--mesh", str(MESHES / "wedge.msh"),
        "--format", "gmsh22",
        "--freq", "299792458",
        "--step", "5",
        "--out", str(tmp_path / "wedge"),
    ])
    assert rc == 0
    assert len((tmp_path / "wedge.csv").read_text().splitlines()) == 1 + 73


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment line\n"
        "mesh = m.off   # trailing comment\n"
        "freq = 1e9\n"
        "cfie-beta = 0.1\n"
        "restart=30\n"
        "log_convergence = true\n"
        "\n"
    )
    values = _read_config_file(str(cfg))
    assert values == {
        "mesh": "m.off",
        "freq": 1e9,
        "cfie_beta": 0.1,
        "restart": 30,
        "log_convergence": True,
    }


def test_config_unknown_key_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mesh = m.off\nbogus = 1\n")
    with pytest.raises(ValueError, match=r"bad\.cfg:2.*bogus"):
        _read_config_file(str(cfg))
    rc = main(["--config", str(cfg), "--freq", "1e9"])
    assert rc == 2
    assert "bogus" in capsys.readouterr().err


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"mesh = {MESHES / 'cube.off'}\n"
        "freq = 1e9\n"
        "formulation = efie\n"
        "step = 5\n"
        f"out = {tmp_path / 'conf'}\n"
    )
    rc = main(["--config", str(cfg), "--formulation", "mfie"])
    assert rc == 0
    report = (tmp_path / "conf_report.txt").read_text()
    assert "formulation: mfie" in report
    assert "formulation=mfie" in report


def test_missing_required_inputs(capsys):
    assert main([]) == 2
    assert "mesh" in capsys.readouterr().err
    assert main(["--mesh", str(MESHES / "cube.off")]) == 2
    assert "freq" in capsys.readouterr().err


def test_missing_mesh_file(capsys, tmp_path):
    assert main(["--mesh", str(tmp_path / "nope.off"), "--freq", "1e9"]) == 2
    assert "error:" in capsys.readouterr().err


def test_invalid_formulation_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["--mesh", "m.off", "--freq", "1e9", "--formulation", "bogus"])
    assert exc.value.code == 2


def test_job_config_validation():
    with pytest.raises(ValueError, match="freq"):
        JobConfig(mesh="m.off", freq=0.0)
    with pytest.raises(ValueError, match="formulation"):
        JobConfig(mesh="m.off", freq=1.0, formulation="nope")
    echo = JobConfig(mesh="m.off", freq=1.0).echo()
    assert "reference=" not in echo  # None values are omitted
    keys = [line.split("=", 1)[0] for line in echo.splitlines()]
    assert keys == sorted(keys)


def test_nonconvergent_run_exits_three_with_artifacts(tmp_path, caplog):
    # restart length one cripples GMRES on the wedge: residual stalls far
    # above tolerance, but the pattern and report must still be written
    rc = main([
        "--mesh", str(MESHES / "wedge.off"),
        "--freq", "299792458",
        "--tol", "1e-10",
        "--restart", "1",
        "--step", "30",
        "--out", str(tmp_path / "stall"),
    ])
    assert rc == 3
    assert (tmp_path / "stall.csv").exists()
    report = (tmp_path / "stall_report.txt").read_text()
    assert "converged: False" in report


def test_compare_self_hits_floor(cube_run, tmp_path, capsys):
    _, out = cube_run
    csv = str(out.with_suffix(".csv"))
    max_t, max_p = compare_runs(csv, csv, str(tmp_path / "self_error.csv"))
    assert max_t == -300.0 and max_p == -300.0
    rows = (tmp_path / "self_error.csv").read_text().splitlines()
    assert rows[0] == "theta_deg,phi_deg,eps_theta_db,eps_phi_db"
    assert len(rows) == 1 + 361
    rc = main(["compare", csv, csv, "--out", str(tmp_path / "self2.csv")])
    assert rc == 0
    assert "max eps_theta: -300.00 dB" in capsys.readouterr().out


def test_compare_default_output_name(cube_run, tmp_path):
    _, out = cube_run
    src = out.with_suffix(".csv")
    cand = tmp_path / "cand.csv"
    cand.write_bytes(src.read_bytes())
    compare_runs(str(src), str(cand))
    assert (tmp_path / "cand_error.csv").exists()


def test_compare_grid_mismatch(tmp_path, capsys):
    n1, n2 = 10, 12
    for name, n in (("a.csv", n1), ("b.csv", n2)):
        pat = FarFieldPattern(np.linspace(0, 180, n), np.zeros(n),
                              np.ones(n, complex), np.zeros(n, complex))
        write_pattern_csv(tmp_path / name, pat)
    with pytest.raises(ValueError, match="do not match"):
        compare_runs(str(tmp_path / "a.csv"), str(tmp_path / "b.csv"))
    rc = main(["compare", str(tmp_path / "a.csv"), str(tmp_path / "b.csv")])
    assert rc == 2
    assert "do not match" in capsys.readouterr().err


def test_repo_config_files_are_wellformed():
    # every committed config parses, references an existing mesh
    # (relative to the repository root), and builds a valid job
    configs = sorted(CONFIGS.glob("*.cfg"))
    assert len(configs) == 10
    root = CONFIGS.parent.parent
    for path in configs:
        values = _read_config_file(str(path))
        assert "mesh" in values and "freq" in values, path.name
        assert (root / values["mesh"]).exists(), path.name
        JobConfig(**values)
