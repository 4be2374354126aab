"""Configuration parsing, run orchestration, result serialization and plot
emission for the tll-cd-sim command.

Config files are flat ``key = value`` text with '#' comments; unknown keys
are rejected.  All outputs (CSV, manifest) are byte-stable for identical
inputs.  Exit codes: 0 ok, 2 config, 3 instability, 4 integration,
5 validation.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, dynamics, fock, su11
from .control import Schedule, ScheduleKind
from .errors import (
    CDInstabilityError,
    ConfigError,
    ContractError,
    IntegrationError,
    LuttingerInstabilityError,
)
from .model import CouplingFamily, CouplingSpec, luttinger_params
from .protocol import DriveProtocol, stability_margin

HBAR_SI = 1.0545718e-34  # J s

EXIT_CONFIG = 2
EXIT_INSTABILITY = 3
EXIT_INTEGRATION = 4
EXIT_VALIDATION = 5

_DEFAULTS = {
    "family": "contact",
    "g2_start": 0.0,
    "g2_end": 0.0,
    "g4_start": 0.0,
    "g4_end": 0.0,
    "R0": 0.0,
    "table": "",
    "schedule": "poly5",
    "t_f": 0.0,
    "L": 100.0,
    "n_modes": 128,
    "cd": "on",
    "v_F": 1.0,
    "record_points": 201,
    "rtol": 1e-10,
    "atol": 1e-12,
    "units": "natural",
    "emit_plots": "false",
    "sound_velocity": 0.0,
    "tf_list": "",
}

_CONVERT = {
    "family": str,
    "schedule": str,
    "cd": str,
    "units": str,
    "emit_plots": str,
    "table": str,
    "tf_list": str,
    "n_modes": int,
    "record_points": int,
}


@dataclass
class RunConfig:
    family: str
    g2_start: float
    g2_end: float
    g4_start: float
    g4_end: float
    R0: float
    table: str
    schedule: str
    t_f: float
    L: float
    n_modes: int
    cd: str
    v_F: float
    record_points: int
    rtol: float
    atol: float
    units: str
    emit_plots: str
    sound_velocity: float
    tf_list: str

    def coupling(self) -> CouplingSpec:
        table = None
        if self.table:
            rows = []
            for chunk in self.table.split(";"):
                parts = chunk.split(":")
                if len(parts) != 3:
                    raise ConfigError(f"bad table row '{chunk}' (want p:g2:g4)")
                rows.append(tuple(float(x) for x in parts))
            table = tuple(rows)
        return CouplingSpec(
            family=CouplingFamily(self.family),
            g2_start=self.g2_start,
            g2_end=self.g2_end,
            g4_start=self.g4_start,
            g4_end=self.g4_end,
            R0=self.R0,
            table=table,
        )

    def protocol(self) -> DriveProtocol:
        if self.t_f <= 0:
            raise ConfigError("t_f must be positive for this command")
        return DriveProtocol(
            coupling=self.coupling(),
            schedule=Schedule(kind=ScheduleKind(self.schedule)),
            t_f=self.t_f,
            L=self.L,
            n_modes=self.n_modes,
            cd_enabled=self.cd == "on",
            v_F=self.v_F,
        )

    def tf_values(self):
        if not self.tf_list:
            return []
        return [float(x) for x in self.tf_list.split(",")]


def parse_config(text: str) -> RunConfig:
    """Parse and validate a flat key=value config; defaults filled in."""
    values = dict(_DEFAULTS)
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw}'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        seen.add(key)
        conv = _CONVERT.get(key, float)
        try:
            values[key] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for '{key}': {exc}") from exc

    cfg = RunConfig(**values)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    if cfg.family not in {f.value for f in CouplingFamily}:
        raise ConfigError(f"unknown coupling family '{cfg.family}'")
    if cfg.schedule not in {k.value for k in ScheduleKind if k != ScheduleKind.CUSTOM_SAMPLES}:
        raise ConfigError(f"unknown schedule '{cfg.schedule}'")
    if cfg.cd not in ("on", "off"):
        raise ConfigError("cd must be 'on' or 'off'")
    if cfg.units not in ("natural", "experimental"):
        raise ConfigError("units must be 'natural' or 'experimental'")
    if cfg.emit_plots not in ("true", "false"):
        raise ConfigError("emit_plots must be 'true' or 'false'")
    # endpoint Luttinger stability; full dense pre-check happens at run time
    for progress in (0.0, 0.5, 1.0):
        coupling = cfg.coupling()
        g2, g4 = coupling.values(2 * math.pi / cfg.L, progress)
        luttinger_params(g2, g4, cfg.v_F)


def serialize_config(cfg: RunConfig) -> str:
    lines = [f"{f.name} = {_fmt(getattr(cfg, f.name))}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_outputs(result, cfg: RunConfig, out_dir, mode_errors=()) -> dict:
    """Write per-mode CSV, aggregate CSV and the manifest; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "modes": out / "modes.csv",
        "aggregate": out / "aggregate.csv",
        "manifest": out / "manifest.txt",
    }

    buf = io.StringIO()
    buf.write("t,p,n_bare,n_qp,fidelity,pair_energy,residual,epsilon_cd,chi\n")
    if result is not None:
        for traj in result.trajectories:
            for rec in traj.records:
                buf.write(
                    ",".join(
                        _fmt(x)
                        for x in (
                            rec.t,
                            rec.p,
                            rec.occupation_bare,
                            rec.occupation_quasiparticle,
                            rec.fidelity_instantaneous_gs,
                            rec.pair_energy,
                            rec.residual_energy,
                            rec.epsilon_cd,
                            rec.chi,
                        )
                    )
                    + "\n"
                )
    paths["modes"].write_text(buf.getvalue())

    buf = io.StringIO()
    buf.write("t,total_residual,total_energy,v_s,K,chi,min_margin\n")
    if result is not None:
        proto = result.protocol
        p_min = proto.momenta()[0]
        for i, t in enumerate(result.times):
            chi = 0.5 * proto.kdot_over_k(p_min, t)
            buf.write(
                ",".join(
                    _fmt(x)
                    for x in (
                        t,
                        result.total_residual[i],
                        result.total_energy[i],
                        result.v_s[i],
                        result.K[i],
                        chi,
                        result.min_margin,
                    )
                )
                + "\n"
            )
    paths["aggregate"].write_text(buf.getvalue())

    write_manifest(paths["manifest"], cfg, result, mode_errors)
    return paths


def write_manifest(path, cfg: RunConfig, result, mode_errors=(), failure=None) -> None:
    """Key-value manifest, written even on failure (with the cause).

    Wall time is deliberately not recorded: output files are byte-stable.
    """
    lines = [f"version = {__version__}", f"status = {'failed' if failure else 'ok'}"]
    if failure:
        lines.append(f"failure = {failure}")
    for f in fields(cfg):
        lines.append(f"config.{f.name} = {_fmt(getattr(cfg, f.name))}")
    if cfg.t_f > 0:
        try:
            report = stability_margin(cfg.protocol())
            lines.append(f"stability.margin = {_fmt(report.margin)}")
            lines.append(f"stability.pass = {report.passed}")
            if report.bound_tf is not None:
                lines.append(f"stability.t_min = {_fmt(report.bound_tf)}")
            lines.append(f"stability.t_adiabatic = {_fmt(report.t_adiabatic)}")
        except ContractError as exc:
            lines.append(f"stability.error = {exc}")
    if cfg.units == "experimental":
        lines.append("units.length = um")
        lines.append("units.time = ms")
        lines.append("units.velocity = um/ms")
    for err in mode_errors:
        lines.append(f"mode_error = {err}")
    Path(path).write_text("\n".join(lines) + "\n")


def experimental_sound_velocity(a_s, m, omega_perp, n_1d) -> float:
    """Sound velocity in um/ms from 1D gas parameters (SI inputs).

    v_s = sqrt(g_1D n_1D / m) with
    g_1D = hbar omega_perp a_s (2 + 3 a_s n_1D)/(1 + 2 a_s n_1D).
    """
    if min(a_s, m, omega_perp, n_1d) <= 0:
        raise ContractError("gas parameters must be positive")
    g_1d = HBAR_SI * omega_perp * a_s * (2 + 3 * a_s * n_1d) / (1 + 2 * a_s * n_1d)
    v_s_si = math.sqrt(g_1d * n_1d / m)  # m/s
    return v_s_si * 1e3  # um/ms


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "cd", None):
        cfg.cd = args.cd
    if getattr(args, "tf", None) is not None:
        cfg.t_f = args.tf
    if getattr(args, "modes", None) is not None:
        cfg.n_modes = args.modes
    return cfg


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    out_dir = Path(args.out or "tllcd-out")
    try:
        result = dynamics.run_simulation(
            cfg.protocol(),
            rtol=cfg.rtol,
            atol=cfg.atol,
            record_points=cfg.record_points,
        )
    except (LuttingerInstabilityError, CDInstabilityError, ContractError) as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(out_dir / "manifest.txt", cfg, None, failure=str(exc))
        raise
    except IntegrationError as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(out_dir / "manifest.txt", cfg, None, failure=str(exc))
        raise
    paths = write_outputs(result, cfg, out_dir)
    if cfg.emit_plots == "true":
        cmd_plot(argparse.Namespace(out=str(out_dir)))
    print(f"wrote {paths['modes']}, {paths['aggregate']}, {paths['manifest']}")
    return 0


def cmd_stability(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    unit = " ms" if cfg.units == "experimental" else ""
    if cfg.sound_velocity > 0:
        # dimensional estimate |v_sdot/v_s^2| ~ 1/(t_f v_s)
        t_min = cfg.L / (2 * math.pi * cfg.sound_velocity)
        print(f"t_min = {t_min:.3f}{unit}")
        print(f"t_upper = {10 * t_min:.3f}{unit}")
    if cfg.t_f > 0:
        report = stability_margin(cfg.protocol())
        print(f"margin = {report.margin:.6g}")
        print(f"pass = {report.passed}")
        if report.bound_tf is not None:
            print(f"t_min_closed_form = {report.bound_tf:.6g}{unit}")
        print(f"t_adiabatic = {report.t_adiabatic:.6g}{unit}")
        print(f"max_adiabaticity = {report.max_adiabaticity:.6g}")
    if cfg.sound_velocity <= 0 and cfg.t_f <= 0:
        raise ConfigError("stability needs either sound_velocity or t_f")
    return 0


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    tf_values = cfg.tf_values()
    if args.tf_list:
        tf_values = [float(x) for x in args.tf_list.split(",")]
    if not tf_values:
        raise ConfigError("sweep needs tf_list in config or --tf-list")
    if cfg.t_f <= 0:
        cfg.t_f = tf_values[0]
    rows = dynamics.sweep_tf(
        cfg.protocol(),
        tf_values,
        rtol=cfg.rtol,
        atol=cfg.atol,
        record_points=cfg.record_points,
    )
    out = Path(args.out or "tllcd-out")
    out.mkdir(parents=True, exist_ok=True)
    lines = ["t_f,final_residual,final_fidelity,stability_pass"]
    for row in rows:
        lines.append(
            f"{_fmt(row.t_f)},{_fmt(row.final_residual)},"
            f"{_fmt(row.final_fidelity)},{row.stability_pass}"
        )
        print(lines[-1])
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return 0


def cmd_validate(args) -> int:
    failures = run_validation_suite(verbose=True)
    if failures:
        print(f"{failures} validation check(s) failed")
        return EXIT_VALIDATION
    print("all validation checks passed")
    return 0


def run_validation_suite(verbose: bool = False) -> int:
    """Oracle cross-checks: Gaussian formulas and integrator conventions
    against the truncated-Fock reference.  Returns the failure count."""
    from .model import PairCoefficients

    checks = []

    def check(name, ok):
        checks.append((name, ok))
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}")

    for eta in (-0.8, -0.2, 0.4, 1.1):
        gauss = su11.squeeze_from_angle(eta)
        obs = su11.vacuum_observables(gauss)
        ref = fock.gaussian_state(gauss, 120)
        check(
            f"occupation closed form vs Fock sum (eta={eta})",
            abs(obs.occupation - ref.occupation()) < 1e-8,
        )
        check(
            f"pair correlator closed form vs Fock sum (eta={eta})",
            abs(obs.pair_correlator - ref.pair_correlator()) < 1e-8,
        )

    a = su11.squeeze_from_angle(0.3)
    b = su11.squeeze_from_angle(0.7)
    fock_ov = abs(fock.gaussian_state(a, 120).overlap(fock.gaussian_state(b, 120)))
    check(
        "overlap closed form vs Fock inner product",
        abs(su11.state_overlap(a, b) - fock_ov) < 1e-10,
    )

    # annihilation condition: coefficient of |m, m+1> in
    # [cosh(eta) b(p) - sinh(eta) b†(-p)] applied to the state must vanish
    eta = 0.5
    st = fock.tmsv_amplitudes(eta, 100)
    root = np.sqrt(np.arange(1, 101))
    killed = root * (
        math.cosh(eta) * st.amplitudes[1:] - math.sinh(eta) * st.amplitudes[:-1]
    )
    check("tmsv annihilation condition", float(np.linalg.norm(killed)) < 1e-10)

    # integrator conventions vs oracle on a small contact protocol
    proto = DriveProtocol(
        coupling=CouplingSpec(
            family=CouplingFamily.CONTACT, g2_end=1.0, g4_end=0.5
        ),
        schedule=Schedule(kind=ScheduleKind.POLY5),
        t_f=6.0,
        L=20.0,
        n_modes=1,
        cd_enabled=True,
    )
    for cd in (True, False):
        pr = proto.with_cd(cd)
        p = pr.momenta()[0]
        traj = dynamics.evolve_pair(p, pr, record_points=41)
        states = fock.evolve_fock(
            fock.vacuum_state(120),
            lambda t: pr.pair_generator(p, t),
            pr.t_f,
            t_eval=traj.times,
        )
        ov = abs(states[-1].overlap(fock.gaussian_state(traj.maps[-1], 120)))
        check(
            f"integrator vs Fock oracle (cd={'on' if cd else 'off'})",
            ov >= 1 - 1e-8 and states[-1].cutoff_safe,
        )

    # pair ground energy vs dense eigenvalue
    coeffs = PairCoefficients(omega=2.0, g=1.0, chi=0.0)
    H = fock.pair_hamiltonian_matrix(coeffs, 200)
    ground = float(np.linalg.eigvalsh(H)[0])
    check("pair ground eigenvalue = epsilon", abs(ground - math.sqrt(3.0)) < 1e-9)

    return sum(1 for _, ok in checks if not ok)


def cmd_plot(args) -> int:
    try:
        import matplotlib

        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover
        raise ConfigError("plotting requires matplotlib") from exc

    out = Path(args.out or "tllcd-out")
    agg_path = out / "aggregate.csv"
    if agg_path.exists():
        data = np.genfromtxt(agg_path, delimiter=",", names=True)
        fig, axes = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
        axes[0].plot(data["t"], data["K"], label="K(t)")
        axes[0].plot(data["t"], data["v_s"], label="v_s(t)")
        axes[0].legend()
        axes[1].plot(data["t"], data["chi"], label="chi(t)")
        axes[1].set_xlabel("t")
        axes[1].legend()
        fig.savefig(out / "parameters.svg")
        plt.close(fig)

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(data["t"], data["total_residual"])
        ax.set_xlabel("t")
        ax.set_ylabel("total residual energy")
        fig.savefig(out / "residual.svg")
        plt.close(fig)

    sweep_path = out / "sweep.csv"
    if sweep_path.exists():
        rows = np.genfromtxt(sweep_path, delimiter=",", names=True, dtype=None, encoding="utf-8")
        fig, ax = plt.subplots(figsize=(6, 4))
        tf = np.atleast_1d(rows["t_f"])
        res = np.atleast_1d(rows["final_residual"])
        ax.loglog(tf, np.maximum(res, 1e-18), "o-")
        ax.set_xlabel("t_f")
        ax.set_ylabel("final residual energy")
        fig.savefig(out / "sweep.svg")
        plt.close(fig)
    print(f"plots written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tll-cd-sim",
        description="Counterdiabatic driving of the Tomonaga-Luttinger liquid",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, config_required=True):
        if config_required:
            sp.add_argument("--config", required=True, help="path to key=value config")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--cd", choices=["on", "off"])
        sp.add_argument("--tf", type=float)
        sp.add_argument("--modes", type=int)

    sp = sub.add_parser("simulate", help="full run: CSV outputs + manifest")
    add_common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("stability", help="stability criteria and speed window")
    add_common(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("sweep", help="sweep over final times")
    add_common(sp)
    sp.add_argument("--tf-list", help="comma-separated t_f values")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="oracle cross-check suite")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("plot", help="SVG panels from a run directory")
    sp.add_argument("--out", help="run directory containing the CSVs")
    sp.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LuttingerInstabilityError, CDInstabilityError) as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except ContractError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
