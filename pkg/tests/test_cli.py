"""CLI tests: config parsing, subcommands, exit codes, output files and
byte stability."""

import math
from pathlib import Path

import numpy as np
import pytest

from tllcd import cli
from tllcd.cli import (
    EXIT_CONFIG,
    EXIT_INSTABILITY,
    experimental_sound_velocity,
    main,
    parse_config,
    run_validation_suite,
)
from tllcd.errors import ConfigError

GOOD_CONFIG = """
# reference contact ramp, small for test speed
family = contact
g2_end = 1.0
g4_end = 0.5
t_f = 6.0
L = 20.0
n_modes = 2
record_points = 41
cd = on
"""


def write_config(tmp_path, text=GOOD_CONFIG, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_config_defaults_and_values():
    cfg = parse_config(GOOD_CONFIG)
    assert cfg.g2_end == 1.0
    assert cfg.n_modes == 2
    assert cfg.schedule == "poly5"  # default
    assert cfg.v_F == 1.0


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("bogus = 1\n")


def test_parse_config_rejects_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("t_f = 1\nt_f = 2\n")


def test_parse_config_rejects_bad_value():
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("t_f = fast\n")


def test_parse_config_rejects_malformed_line():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just some words\n")


def test_parse_config_rejects_unstable_endpoint():
    from tllcd.errors import LuttingerInstabilityError

    with pytest.raises(LuttingerInstabilityError):
        parse_config(f"g2_end = {2 * math.pi + 1:.3f}\nt_f = 1.0\n")


def test_simulate_outputs(tmp_path):
    out = tmp_path / "out"
    rc = main(["simulate", "--config", write_config(tmp_path), "--out", str(out)])
    assert rc == 0
    modes = (out / "modes.csv").read_text()
    agg = (out / "aggregate.csv").read_text()
    manifest = (out / "manifest.txt").read_text()
    assert modes.startswith("t,p,n_bare,n_qp,fidelity,pair_energy,residual,epsilon_cd,chi")
    assert agg.startswith("t,total_residual,total_energy,v_s,K,chi,min_margin")
    # 2 modes x 41 records + header
    assert len(modes.splitlines()) == 2 * 41 + 1
    assert "status = ok" in manifest
    assert "stability.pass = True" in manifest


def test_simulate_byte_stable(tmp_path):
    cfg = write_config(tmp_path)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    for name in ("modes.csv", "aggregate.csv", "manifest.txt"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_simulate_cd_override(tmp_path):
    out = tmp_path / "out"
    rc = main(
        ["simulate", "--config", write_config(tmp_path), "--out", str(out), "--cd", "off"]
    )
    assert rc == 0
    assert "config.cd = off" in (out / "manifest.txt").read_text()


def test_exit_code_config_error(tmp_path):
    bad = write_config(tmp_path, "nonsense = 1\n", name="bad.cfg")
    assert main(["simulate", "--config", bad, "--out", str(tmp_path / "x")]) == EXIT_CONFIG


def test_exit_code_missing_config(tmp_path):
    assert (
        main(["simulate", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)])
        == EXIT_CONFIG
    )


def test_exit_code_instability_and_manifest(tmp_path):
    # endpoints are stable but the drive is far too fast: CD spectrum fails
    cfg = write_config(tmp_path, GOOD_CONFIG.replace("t_f = 6.0", "t_f = 0.01"))
    out = tmp_path / "out"
    rc = main(["simulate", "--config", cfg, "--out", str(out)])
    assert rc == EXIT_INSTABILITY
    manifest = (out / "manifest.txt").read_text()
    assert "status = failed" in manifest
    assert "failure =" in manifest


def test_stability_subcommand_experimental(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "L = 50\nunits = experimental\nsound_velocity = 2.04\n",
    )
    assert main(["stability", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "t_min = 3.901 ms" in out
    assert "t_upper = 39.009 ms" in out


def test_stability_subcommand_protocol(tmp_path, capsys):
    assert main(["stability", "--config", write_config(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "pass = True" in out
    assert "t_min_closed_form" in out


def test_stability_needs_input(tmp_path):
    cfg = write_config(tmp_path, "L = 50\n")
    assert main(["stability", "--config", cfg]) == EXIT_CONFIG


def test_sweep_subcommand(tmp_path):
    out = tmp_path / "out"
    cfg = write_config(
        tmp_path,
        GOOD_CONFIG.replace("cd = on", "cd = off") + "tf_list = 4.0,8.0\n",
        name="sweep.cfg",
    )
    rc = main(["sweep", "--config", cfg, "--out", str(out)])
    assert rc == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "t_f,final_residual,final_fidelity,stability_pass"
    assert len(lines) == 3
    res4 = float(lines[1].split(",")[1])
    res8 = float(lines[2].split(",")[1])
    assert res8 < res4


def test_validate_subcommand(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "all validation checks passed" in out
    assert "FAIL" not in out


def test_validation_suite_counts_failures():
    assert run_validation_suite(verbose=False) == 0


def test_experimental_sound_velocity():
    # Rb-87 gas: a_s = 5.2 nm, m = 1.44e-25 kg, omega_perp = 2 pi x 1.4 kHz,
    # n_1D = 70 / um
    v_s = experimental_sound_velocity(5.2e-9, 1.44e-25, 2 * math.pi * 1400.0, 70e6)
    assert v_s == pytest.approx(2.04, abs=0.02)
    from tllcd.errors import ContractError

    with pytest.raises(ContractError):
        experimental_sound_velocity(-1.0, 1.44e-25, 1.0, 1.0)


def test_plot_subcommand(tmp_path):
    pytest.importorskip("matplotlib")
    out = tmp_path / "out"
    assert main(["simulate", "--config", write_config(tmp_path), "--out", str(out)]) == 0
    assert main(["plot", "--out", str(out)]) == 0
    assert (out / "parameters.svg").exists()
    assert (out / "residual.svg").exists()
