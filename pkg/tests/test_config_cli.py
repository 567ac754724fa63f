import subprocess
import sys

import pytest

from eplab import outputs
from eplab.cli import main
from eplab.config import (
    PRESETS, RunConfig, build_config, dump_config, env_overrides, load_config, read_pairs,
)
from eplab.errors import ConfigurationError, MissingArtifactError
from eplab.experiments import parse_sweep, plotdata, run_experiment, run_sweep, write_sweep

CHEAP = {"grid.n": "128", "time.t_end": "0.2", "time.output_stride": "5"}


def test_read_pairs_and_types():
    pairs = read_pairs("model.K = 0.5\n# comment\ngrid.n=512  # inline\ninit.preset = constant\n")
    assert pairs == {"model.k": "0.5", "grid.n": "512", "init.preset": "constant"}
    cfg = build_config({**pairs, "solver.dealias": "yes", "time.snapshot_times": "0, 1.5"})
    assert cfg.scenario.K == 0.5 and cfg.scenario.n == 512
    assert cfg.scenario.dealias is True
    assert cfg.scenario.snapshot_times == (0.0, 1.5)


def test_unknown_and_bad_keys():
    with pytest.raises(ConfigurationError, match="model.kk"):
        build_config({"model.kk": "1"})
    with pytest.raises(ConfigurationError, match="grid.n"):
        build_config({"grid.n": "many"})
    with pytest.raises(ConfigurationError):
        build_config({"grid.n": "100"})
    with pytest.raises(ConfigurationError):
        load_config(preset="nope")


def test_env_override(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("model.K = 0.5\ntime.t_end = 1\n")
    env = {"EPLAB_MODEL_K": "0.25", "EPLAB_UNRELATED": "x"}
    assert env_overrides(env) == {"model.k": "0.25"}
    cfg = load_config(path, environ=env, extra={"time.dt": "0.02"})
    assert cfg.scenario.K == 0.25 and cfg.scenario.t_end == 1.0 and cfg.scenario.dt == 0.02


def test_dump_round_trip():
    for name in PRESETS:
        cfg = load_config(preset=name, environ={})
        assert build_config(read_pairs(dump_config(cfg))) == cfg
    assert build_config(read_pairs(dump_config(RunConfig()))) == RunConfig()


def test_presets_match_table_rows():
    a = load_config(preset="table1-a", environ={}).scenario
    assert (a.rho_a, a.rho_b, a.K) == (0.7, 3.0, 0.0)
    c3 = load_config(preset="table2-comparison3-k05", environ={}).scenario
    assert (c3.rho_preset, c3.u_preset, c3.K) == ("one_plus_sech", "sech", 0.5)


def test_summary_reproducible(tmp_path):
    cfg = build_config({**PRESETS["table1-a"], **CHEAP})
    run_experiment(cfg, tmp_path / "one")
    run_experiment(cfg, tmp_path / "two")
    for name in (outputs.SUMMARY_FILE, outputs.DIAGNOSTICS_FILE, outputs.SERIES_FILE,
                 outputs.SNAPSHOT_FILE, outputs.CONFIG_FILE):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()
    diag = outputs.read_csv(tmp_path / "one" / outputs.DIAGNOSTICS_FILE)
    assert list(diag) == ["t", "H", "max_rho", "min_rho", "max_abs_u", "max_abs_ux",
                          "max_abs_rhox", "max_abs_phi", "max_abs_phix", "R", "S", "F_plus",
                          "G_plus", "flags"]
    snap = outputs.read_csv(tmp_path / "one" / outputs.SNAPSHOT_FILE)
    assert list(snap) == ["t", "x", "rho", "u", "phi"]
    assert build_config(read_pairs((tmp_path / "one" / outputs.CONFIG_FILE).read_text())) == cfg


def test_sweep_shuffled_order(tmp_path):
    base, axes = parse_sweep("grid.n = 128\ntime.t_end = 0.1\nsweep.init.a = 0.3, 0.5, 0.7\n"
                             "sweep.model.K = 0, 0.5\n")
    assert [k for k, _ in axes] == ["init.a", "model.k"]
    rows = run_sweep(base, axes)
    shuffled = run_sweep(base, axes, order=[4, 1, 5, 0, 3, 2])
    write_sweep(tmp_path / "a.csv", rows, axes)
    write_sweep(tmp_path / "b.csv", shuffled, axes)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert len(rows) == 6 and all(r["termination"] == "completed" for r in rows)


def test_sweep_bad_cell_recorded():
    base, axes = parse_sweep("grid.n = 128\ntime.t_end = 0.1\n"
                             "sweep.init.preset = constant, custom_table\n")
    rows = run_sweep(base, axes)
    assert rows[0]["termination"] == "completed" and rows[0]["error"] == ""
    assert rows[1]["termination"] == "error"
    assert "init.table" in rows[1]["error"]


def test_sweep_rejects_bad_axis():
    with pytest.raises(ConfigurationError):
        parse_sweep("sweep.model.K = -1\n")
    with pytest.raises(ConfigurationError, match="init.preset"):
        parse_sweep("sweep.init.preset = constant, bogus\n")


def test_sweep_contrast(tmp_path):
    sweep_file = tmp_path / "sweep.cfg"
    sweep_file.write_text("init.b = 3\ntime.t_end = 3\nsweep.init.a = 0.3, 0.7\n")
    assert main(["sweep", str(sweep_file), "--out-dir", str(tmp_path)]) == 0
    rows = outputs.read_csv(tmp_path / "sweep.csv")
    assert rows["termination"] == ["completed", "blowup_detected"]
    assert 2.0 <= rows["T_star"][1] <= 2.6


def test_cli_run_and_plotdata(tmp_path, capsys):
    run_dir = tmp_path / "run"
    args = ["run", "--preset", "table1-a", "--out-dir", str(run_dir)]
    for k, v in CHEAP.items():
        args += ["--set", f"{k}={v}"]
    assert main(args) == 0
    assert "termination=completed" in capsys.readouterr().out
    assert main(["plotdata", str(run_dir), "--kind", "fig2", "--svg",
                 "--out-dir", str(tmp_path)]) == 0
    fig = outputs.read_csv(tmp_path / "fig2.csv")
    assert list(fig) == ["t", "rho_origin", "minus_ux_origin"]
    assert (tmp_path / "fig2.svg").read_text().startswith("<svg")
    assert main(["plotdata", str(run_dir), str(run_dir), "--kind", "fig4",
                 "--out-dir", str(tmp_path)]) == 0
    assert set(outputs.read_csv(tmp_path / "waterfall.csv")["run"]) == {0.0, 1.0}


def test_cli_criteria(capsys):
    assert main(["criteria", "--preset", "table1-a"]) == 0
    out = capsys.readouterr().out
    assert '"holds": true' in out and '"H0": 0.0875' in out


def test_cli_errors(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["plotdata", str(empty), "--kind", "fig2"]) == 1
    with pytest.raises(MissingArtifactError):
        plotdata([str(empty)], "fig2", tmp_path)
    assert main(["run", "--preset", "table1-a", "--set", "grid.n=100"]) == 2
    assert main(["run", "--preset", "table1-a", "--set", "oops"]) == 2
    assert main(["run"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["odelab", "--a", "-1"])
    assert info.value.code == 2
    assert "must be positive" in capsys.readouterr().err


def test_cli_odelab(capsys):
    assert main(["odelab", "--t-end", "50"]) == 0
    out = capsys.readouterr().out
    assert '"pass": true' in out and '"has_zero": false' in out
    assert main(["odelab", "--mode", "equation", "--a", "1", "--b", "0.3333333333333333"]) == 0
    out = capsys.readouterr().out
    assert '"first_zero_over_pi": 0.66666666' in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eplab", "plotdata", "--kind", "fig2"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "no run directories" in proc.stderr
