import json
import os

import numpy as np
import pytest

from phasekit.cli import main
from phasekit.config import (RunConfig, build_bn_initial, build_family,
                             build_nsk_initial, build_params, guard_rails,
                             parse_config)
from phasekit.errors import ConfigError
from phasekit.io import read_diagnostics

MINIMAL = """
[grid]
n = 64

[time]
dt = 5e-4
t_end = 0.01
snapshot_every = 5
"""

POLY_SMOOTH = MINIMAL + """
[physics]
mu = 0.1
kappa = 0.02
gamma = 1.0

[eos]
type = polytropic
a = 1.0
beta = 2.0

[init]
profile = constant
rho0 = 1.2
"""


def test_minimal_config_fills_defaults():
    config = parse_config(MINIMAL)
    assert config["grid"]["n"] == 64
    assert config["physics"]["mu"] == 0.1
    assert config["eos"]["type"] == "van_der_waals"
    assert config["harness"]["n_list"] == [2, 4]


def test_unknown_key_rejected_with_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("[physics]\nmu = 0.1\nviscosity = 2\n", path="run.cfg")
    assert "run.cfg:3" in str(exc.value)
    assert "viscosity" in str(exc.value)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("[fluid]\nmu = 1\n")
    assert "[fluid]" in str(exc.value)


def test_negative_gamma_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("[physics]\ngamma = -1\n")
    assert "gamma" in str(exc.value)


def test_nonincreasing_n_list_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config("[harness]\nn_list = 8, 4\n")
    assert "strictly increasing" in str(exc.value)


def test_bad_value_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("[grid]\nn = sixty-four\n", path="x.cfg")
    assert "x.cfg:2" in str(exc.value)


def test_round_trip_through_dict():
    config = parse_config(POLY_SMOOTH)
    clone = RunConfig.from_dict(json.loads(json.dumps(config.to_dict())))
    assert clone == config


def test_guard_rails_from_m0():
    config = parse_config("[bounds]\nm0 = 2.0\n")
    lo, hi = guard_rails(config)
    assert lo == 0.25 and hi == 4.0


def test_builders(tmp_path):
    config = parse_config(POLY_SMOOTH)
    params = build_params(config)
    assert params.eos.to_dict()["type"] == "polytropic"
    state = build_nsk_initial(config, params)
    assert np.allclose(state.rho, 1.2)
    bn_state = build_bn_initial(config, params)
    assert np.allclose(bn_state.alpha_p, 1.0)
    family = build_family(parse_config(POLY_SMOOTH + "[grid]\nn = 256\n"))
    assert family.n_list == (2, 4)


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_config_error_exit_code(tmp_path):
    path = write_cfg(tmp_path, "[physics]\ngamma = -1\n")
    assert main(["check-eos", "--config", path]) == 2
    assert main(["check-eos", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_check_eos_accepts_and_rejects(tmp_path, capsys):
    good = write_cfg(tmp_path, """
[eos]
type = van_der_waals
A = 1.0
B = 1.0
R = 1.0
T_star = 0.2

[physics]
gamma = 2.0

[bounds]
m0 = 1.0
""", "good.cfg")
    assert main(["check-eos", "--config", good]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["admissible"] is True

    bad = write_cfg(tmp_path, """
[eos]
type = van_der_waals
A = 1.0
B = 1.0
R = 1.0
T_star = 0.2

[physics]
gamma = 0.0

[bounds]
m0 = 1.0
""", "bad.cfg")
    assert main(["check-eos", "--config", bad]) == 3
    report = json.loads(capsys.readouterr().out)
    assert report["admissible"] is False
    b1, b2 = report["spinodal"]
    assert b1 < 0.3 < b2


def test_cli_simulate_nsk_outputs(tmp_path):
    cfg = write_cfg(tmp_path, POLY_SMOOTH)
    out = str(tmp_path / "run")
    assert main(["simulate-nsk", "--config", cfg, "--out", out]) == 0
    snaps = sorted(f for f in os.listdir(out) if f.startswith("snapshot"))
    assert snaps and snaps[0] == "snapshot_00000.csv"
    header = open(os.path.join(out, snaps[0])).readline().strip()
    assert header == "x,rho,u,c"
    records = read_diagnostics(os.path.join(out, "diagnostics.csv"))
    assert len(records) == 21  # one per step plus the initial record
    meta = json.loads(open(os.path.join(out, "meta.json")).read())
    assert RunConfig.from_dict(meta["config"]) == parse_config(POLY_SMOOTH)
    assert meta["kind"] == "nsk"

    # diagnose reads the diagnostics back
    assert main(["diagnose", "--run", out]) == 0


def test_cli_simulate_bn_outputs(tmp_path):
    cfg = write_cfg(tmp_path, POLY_SMOOTH + """
[bn]
from_profile = false
alpha_p = 0.4
rho_p = 1.5
rho_m = 0.7
""")
    out = str(tmp_path / "bnrun")
    assert main(["simulate-bn", "--config", cfg, "--out", out]) == 0
    header = open(os.path.join(out, "snapshot_00000.csv")).readline().strip()
    assert header == "x,alpha_p,alpha_m,rho_p,rho_m,u,c"


def test_cli_bounds_failure_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, POLY_SMOOTH + """
[bounds]
m0 = 0.55
""")
    # rails (1/1.1, 1.1) around rho0 = 1.2 fail immediately
    out = str(tmp_path / "run")
    assert main(["simulate-nsk", "--config", cfg, "--out", out]) == 4


def homogenize_cfg(tmp_path):
    return write_cfg(tmp_path, """
[physics]
mu = 0.1
kappa = 0.1
gamma = 2.0

[eos]
type = van_der_waals
A = 1.0
B = 3.0
R = 1.0
T_star = 0.2

[grid]
n = 128

[time]
dt = 4e-4
t_end = 0.02
snapshot_every = 10

[bounds]
m0 = 1.4

[init]
profile = two_value
v_minus = 0.8
v_plus = 1.6
theta = 0.5
delta = 0.1
n_osc = 1

[harness]
n_list = 1, 2

[output]
directory = fam_out
""")


def test_cli_homogenize_deterministic(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("PHASEKIT_THREADS", "1")
    cfg = homogenize_cfg(tmp_path)
    assert main(["homogenize", "--config", cfg, "--out", "fam1"]) == 0
    assert main(["homogenize", "--config", cfg, "--out", "fam2"]) == 0
    csv1 = open(tmp_path / "fam1" / "convergence.csv", "rb").read()
    csv2 = open(tmp_path / "fam2" / "convergence.csv", "rb").read()
    assert csv1 == csv2
    assert (tmp_path / "fam1" / "member_n1" / "distances.csv").exists()
    assert (tmp_path / "fam1" / "bn" / "diagnostics.csv").exists()
    for rel in ("member_n1/measures.csv", "bn/measures.csv"):
        header = open(tmp_path / "fam1" / rel).readline().strip()
        assert header.startswith("t,1*xi^0,1*xi^1")
    header = open(tmp_path / "fam1" / "convergence.csv").readline()
    assert header.startswith("n,sup_t_measure_dist,sup_t_u_err,dist_t")


def test_cli_homogenize_parallel_matches_serial(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = homogenize_cfg(tmp_path)
    monkeypatch.setenv("PHASEKIT_THREADS", "1")
    assert main(["homogenize", "--config", cfg, "--out", "serial"]) == 0
    monkeypatch.setenv("PHASEKIT_THREADS", "2")
    assert main(["homogenize", "--config", cfg, "--out", "parallel"]) == 0
    assert (open(tmp_path / "serial" / "convergence.csv", "rb").read()
            == open(tmp_path / "parallel" / "convergence.csv", "rb").read())
