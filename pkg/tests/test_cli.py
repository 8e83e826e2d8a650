"""Command-line surface: subcommand outputs, artifact formats, config
precedence, exit-code contract."""

import json

import pytest

from adiafact.cli import RunConfig, main
from adiafact.compiler import compiled_problem_from_dict, reference_problem
from adiafact.errors import ConfigError


def run_cli(*argv):
    return main(list(argv))


def read_lines(path):
    return path.read_text().splitlines()


# --------------------------------------------------------------------- run

def test_run_builtin_decodes_the_factors(tmp_path, capsys):
    assert run_cli("run", "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "minimum ground-subspace fidelity = 0.987185596738" in out
    assert ("dominant final populations: |011> 0.498869197819, "
            "|100> 0.498869197819") in out
    assert "factors verified: 291311 = 523 x 557" in out
    assert "WARNING" not in out
    assert "wrote trajectory.csv, stages.csv" in out

    trajectory = read_lines(tmp_path / "trajectory.csv")
    assert trajectory[0] == "# min_ground_fidelity = 0.987185596738"
    assert trajectory[1].startswith("# columns: step,s,pop_|000>,")
    assert len(trajectory) == 103  # summary + columns + 101 records
    assert trajectory[2] == "0,0,0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125,1,-3"
    assert len(read_lines(tmp_path / "stages.csv")) == 12


def test_run_artifacts_are_byte_stable(tmp_path, capsys):
    for sub in ("a", "b"):
        assert run_cli("run", "--out", str(tmp_path / sub), "--no-timestamp") == 0
    capsys.readouterr()
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() == \
        (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_run_timestamp_header_is_on_by_default(tmp_path, capsys):
    assert run_cli("run", "--out", str(tmp_path)) == 0
    capsys.readouterr()
    first = read_lines(tmp_path / "trajectory.csv")[0]
    assert first.startswith("# generated 20")


def test_run_structured_format(tmp_path, capsys):
    assert run_cli("run", "--out", str(tmp_path), "--format", "structured",
                   "--no-timestamp") == 0
    capsys.readouterr()
    payload = json.loads((tmp_path / "trajectory.json").read_text())
    assert "generated" not in payload
    assert payload["columns"][0:2] == ["step", "s"]
    assert len(payload["rows"]) == 101
    assert payload["rows"][0][0] == 0
    assert payload["summary"]["min_ground_fidelity"] == 0.987185596738
    assert (tmp_path / "stages.json").exists()


def test_run_generic_instance(tmp_path, capsys):
    assert run_cli("run", "--n", "35", "--m-bits", "1", "--n-bits", "1",
                   "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "factors verified: 35 = 5 x 7" in out
    assert "dominant final populations: |01> 0.393756532115, |10> 0.393756532115" in out


def test_run_quench_fails_verification(tmp_path, capsys):
    assert run_cli("run", "--steps", "1", "--out", str(tmp_path)) == 4
    captured = capsys.readouterr()
    assert "minimum ground-subspace fidelity = 0.5" in captured.out
    assert "WARNING" not in captured.out  # exactly at the floor, not below
    assert "dominant final populations: |000> 0.125" in captured.out
    assert captured.err.startswith("error: decoded factors")


def test_run_sixteen_qubit_instance_hits_the_dense_cap(tmp_path, capsys):
    code = run_cli("run", "--n", "291311", "--m-bits", "8", "--n-bits", "8",
                   "--out", str(tmp_path))
    assert code == 2
    assert "dense-matrix cap" in capsys.readouterr().err


# ----------------------------------------------------------------- compile

def test_compile_builtin_prints_the_operator(tmp_path, capsys):
    assert run_cli("compile", "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "variables: q1->qubit 1, q2->qubit 2, q5->qubit 3" in out
    assert "  Z1 Z2: 0.6" in out
    assert "  Z1 Z3: 2" in out
    assert "  Z2 Z3: -2.45" in out
    assert "dropped constant: 5.05" in out
    assert "ground penalty value: 0" in out
    assert "  q1=0 q2=1 q5=1  ->  523 x 557" in out
    assert "  q1=1 q2=0 q5=0  ->  557 x 523" in out
    assert "wrote compiled.json, ising.csv" in out

    restored = compiled_problem_from_dict(
        json.loads((tmp_path / "compiled.json").read_text())
    )
    assert restored == reference_problem()

    ising = read_lines(tmp_path / "ising.csv")
    assert ising[0] == "# offset = 5.05"
    assert ising[2:] == ["J,1,2,0.6", "J,1,3,2", "J,2,3,-2.45"]


def test_compile_generic_higher_order_skips_ising(tmp_path, capsys):
    assert run_cli("compile", "--n", "143", "--m-bits", "2", "--n-bits", "2",
                   "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "ising export skipped: compiled operator has terms beyond 2-local" in out
    assert "->  11 x 13" in out
    assert not (tmp_path / "ising.csv").exists()
    assert (tmp_path / "compiled.json").exists()


def test_compile_unsatisfiable_instance_exits_3(tmp_path, capsys):
    code = run_cli("compile", "--n", "15", "--m-bits", "1", "--n-bits", "1",
                   "--out", str(tmp_path))
    assert code == 3
    err = capsys.readouterr().err
    assert err.startswith("error: no bit assignment factors N=15")
    assert "minimum penalty 100" in err


def test_compile_custom_weights(tmp_path, capsys):
    assert run_cli("compile", "--weights", "1,1,1", "--out", str(tmp_path),
                   "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "  Z1 Z2: 0.5" in out
    assert "  Z2 Z3: -0.5" in out
    assert "dropped constant: 1.5" in out


# ------------------------------------------------------------------ pulses

def test_pulses_table_and_checks(tmp_path, capsys):
    assert run_cli("pulses", "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "total duration = 0.0200933115654 s" in out
    deviation_line = next(
        line for line in out.splitlines()
        if line.startswith("max step-equivalence deviation = ")
    )
    assert float(deviation_line.rsplit("= ", 1)[1]) <= 1e-12

    pulses = read_lines(tmp_path / "pulses.csv")
    assert "# total_duration_s = 0.0200933115654" in pulses
    assert "# J12_hz = 48" in pulses
    assert "# J23_hz = -196" in pulses
    assert "# J13_hz = 160" in pulses
    data = [line for line in pulses if not line.startswith("#")]
    assert len(data) == 100
    assert data[0] == "1,0.01,3960,3.9788735773e-06"
    assert data[-1].startswith("100,1,0,")


# ---------------------------------------------------------------- spectrum

def test_spectrum_grid_and_endpoints(tmp_path, capsys):
    assert run_cli("spectrum", "--grid", "11", "--out", str(tmp_path),
                   "--no-timestamp") == 0
    assert "wrote spectrum.csv (11 grid points, 8 levels)" in capsys.readouterr().out
    rows = [line for line in read_lines(tmp_path / "spectrum.csv")
            if not line.startswith("#")]
    assert len(rows) == 11
    assert rows[0] == "0,-3,-1,-1,-1,1,1,1,3"
    assert rows[-1].startswith("1,-5.05,-5.05,")


def test_spectrum_rejects_tiny_grids(tmp_path, capsys):
    assert run_cli("spectrum", "--grid", "1", "--out", str(tmp_path)) == 2
    assert "grid" in capsys.readouterr().err


# ------------------------------------------------------------------- noise

def test_noise_sweep_summary(tmp_path, capsys):
    assert run_cli("noise", "--samples", "50", "--out", str(tmp_path),
                   "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert ("intrinsic final-fidelity std = 0.00052104264016 "
            "(mean 0.99864992017, 50 samples)") in out
    lines = read_lines(tmp_path / "noise.csv")
    assert "# mode = intrinsic" in lines
    assert "# samples = 50" in lines
    assert "# relative_sigma = 0.05" in lines
    assert "# seed = 42" in lines
    assert "# clamped_draws = 0" in lines
    data = [line for line in lines if not line.startswith("#")]
    assert len(data) == 101
    assert data[0] == "0,0,1,0"


# ----------------------------------------------------------------- trotter

def test_trotter_default_pulse_with_comparison(tmp_path, capsys):
    assert run_cli("trotter", "--samples", "50", "--compare",
                   "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "noiseless minimum sub-step fidelity = 0.297008647695" in out
    assert ("trotter[pulse] final-fidelity std = 0.206014178128 "
            "(mean 0.680190963365, 50 samples)") in out
    assert "intrinsic final-fidelity std = 0.00052104264016" in out
    assert ("intrinsic mode is more robust than trotter[pulse] "
            "under identical noise") in out
    assert "wrote trotter_trace.csv, trotter_noise.csv" in out

    trace = [line for line in read_lines(tmp_path / "trotter_trace.csv")
             if not line.startswith("#")]
    assert len(trace) == 400  # 100 steps x 4 sub-records
    assert trace[0].startswith("1,0.01,pulse_y_neg,")
    assert trace[3].startswith("1,0.01,coupling,")
    noise_lines = read_lines(tmp_path / "trotter_noise.csv")
    assert "# mode = trotter-pulse" in noise_lines


def test_trotter_plain_splitting(tmp_path, capsys):
    assert run_cli("trotter", "--samples", "50", "--splitting", "plain",
                   "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "noiseless minimum sub-step fidelity = 0.982176457392" in out
    assert "trotter[plain] final-fidelity std = 0.000524813522373" in out
    trace = [line for line in read_lines(tmp_path / "trotter_trace.csv")
             if not line.startswith("#")]
    assert len(trace) == 200  # 100 steps x 2 sub-records
    assert trace[0].startswith("1,0.01,transverse,")
    assert "# mode = trotter-plain" in read_lines(tmp_path / "trotter_noise.csv")


# ------------------------------------------------------------------ oracle

def test_oracle_builtin(tmp_path, capsys):
    assert run_cli("oracle", "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "minimum penalty = 0 over 3 variables" in out
    assert "2 ground assignment(s)" in out
    assert "  q1=0 q2=1 q5=1  ->  523 x 557" in out
    assert "  q1=1 q2=0 q5=0  ->  557 x 523" in out
    rows = [line for line in read_lines(tmp_path / "ground.csv")
            if not line.startswith("#")]
    assert rows == ["0,1,1,0,523,557", "1,0,0,0,557,523"]


def test_oracle_generic_and_unsatisfiable(tmp_path, capsys):
    assert run_cli("oracle", "--n", "143", "--m-bits", "2", "--n-bits", "2",
                   "--out", str(tmp_path), "--no-timestamp") == 0
    out = capsys.readouterr().out
    assert "->  11 x 13" in out
    assert "->  13 x 11" in out

    assert run_cli("oracle", "--n", "15", "--m-bits", "1", "--n-bits", "1",
                   "--out", str(tmp_path)) == 3
    assert "error: no bit assignment factors N=15" in capsys.readouterr().err


# ----------------------------------------------------------- configuration

def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "settings.json"
    config.write_text(json.dumps({"steps": 50, "tau": 0.1, "out": str(tmp_path)}))
    # --steps beats the file; tau and out come from the file
    assert run_cli("pulses", "--config", str(config), "--steps", "25",
                   "--no-timestamp") == 0
    capsys.readouterr()
    data = [line for line in read_lines(tmp_path / "pulses.csv")
            if not line.startswith("#")]
    assert len(data) == 25
    assert data[0].split(",")[1] == "0.04"  # s_1 = 1/25


def test_config_file_validation(tmp_path, capsys):
    bad_key = tmp_path / "bad.json"
    bad_key.write_text(json.dumps({"step_count": 10}))
    assert run_cli("run", "--config", str(bad_key)) == 2
    assert "unknown config keys" in capsys.readouterr().err

    not_json = tmp_path / "broken.json"
    not_json.write_text("{steps: 10")
    assert run_cli("run", "--config", str(not_json)) == 2
    assert "not valid JSON" in capsys.readouterr().err

    assert run_cli("run", "--config", str(tmp_path / "missing.json")) == 2
    assert "cannot read config file" in capsys.readouterr().err


def test_config_weights_forms(tmp_path, capsys):
    config = tmp_path / "weights.json"
    config.write_text(json.dumps({"weights": [1, 1, 1], "out": str(tmp_path)}))
    assert run_cli("compile", "--config", str(config), "--no-timestamp") == 0
    assert "dropped constant: 1.5" in capsys.readouterr().out

    assert run_cli("compile", "--weights", "1,a,1", "--out", str(tmp_path)) == 2
    assert "cannot parse weights" in capsys.readouterr().err


def test_generic_flags_must_come_together(tmp_path, capsys):
    assert run_cli("run", "--m-bits", "2", "--out", str(tmp_path)) == 2
    assert "need --n, --m-bits and --n-bits" in capsys.readouterr().err


def test_invalid_numeric_settings_exit_2(tmp_path, capsys):
    assert run_cli("run", "--steps", "0", "--out", str(tmp_path)) == 2
    assert "step count" in capsys.readouterr().err
    assert run_cli("noise", "--samples", "1", "--out", str(tmp_path)) == 2
    assert "at least 2" in capsys.readouterr().err
    assert run_cli("noise", "--sigma", "-0.5", "--out", str(tmp_path)) == 2
    capsys.readouterr()


def test_run_config_defaults_and_validation():
    config = RunConfig()
    assert config.is_builtin
    assert (config.steps, config.tau, config.sigma) == (100, 0.05, 0.05)
    assert (config.samples, config.seed, config.splitting) == (500, 42, "pulse")
    with pytest.raises(ConfigError):
        RunConfig(format="yaml")
    with pytest.raises(ConfigError):
        RunConfig(splitting="suzuki")
    assert not RunConfig(n=35, m_bits=1, n_bits=1).is_builtin
    assert RunConfig(n=291311).is_builtin
