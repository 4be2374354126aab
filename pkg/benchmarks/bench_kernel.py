"""Benchmark the compiled integration kernel against the scipy fallback.

Runs the reference contact ramp (poly5, g2: 0 -> 1, g4: 0 -> 0.5, L = 100)
for a range of mode counts with both backends, checks they agree, and
prints per-backend wall times.

Usage: python3 benchmarks/bench_kernel.py [--modes 16,64,128] [--repeats 3]
"""

import argparse
import os
import time

import numpy as np


def build_protocol(n_modes):
    from tllcd.control import Schedule, ScheduleKind
    from tllcd.model import CouplingFamily, CouplingSpec
    from tllcd.protocol import DriveProtocol, closed_form_bound

    proto = DriveProtocol(
        coupling=CouplingSpec(
            family=CouplingFamily.CONTACT, g2_end=1.0, g4_end=0.5
        ),
        schedule=Schedule(ScheduleKind.POLY5),
        t_f=1.0,
        L=100.0,
        n_modes=n_modes,
        cd_enabled=True,
    )
    return proto.with_tf(2.0 * closed_form_bound(proto))


def run_once(proto):
    from tllcd.dynamics import run_simulation

    start = time.perf_counter()
    result = run_simulation(proto)
    elapsed = time.perf_counter() - start
    final = np.array(
        [[t.maps[-1].u, t.maps[-1].v] for t in result.trajectories]
    )
    return elapsed, final


def bench(n_modes, repeats):
    from tllcd import _backend

    proto = build_protocol(n_modes)
    rows = {}
    for label, force in (("kernel", None), ("python", "1")):
        if label == "kernel" and not _backend.HAVE_KERNEL:
            print("compiled kernel not built; skipping kernel timings")
            continue
        if force is None:
            os.environ.pop("TLLCD_FORCE_PYTHON", None)
        else:
            os.environ["TLLCD_FORCE_PYTHON"] = force
        times = []
        for _ in range(repeats):
            elapsed, final = run_once(proto)
            times.append(elapsed)
        rows[label] = (min(times), final)
    os.environ.pop("TLLCD_FORCE_PYTHON", None)

    line = f"modes={n_modes:4d}"
    for label, (best, _) in rows.items():
        line += f"  {label}: {best * 1e3:8.1f} ms"
    if len(rows) == 2:
        dev = np.max(np.abs(rows["kernel"][1] - rows["python"][1]))
        line += f"  speedup: {rows['python'][0] / rows['kernel'][0]:5.1f}x"
        line += f"  max |delta(u,v)|: {dev:.2e}"
        assert dev < 1e-7, "backends disagree"
    print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", default="16,64,128")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    for n in (int(x) for x in args.modes.split(",")):
        bench(n, args.repeats)


if __name__ == "__main__":
    main()
