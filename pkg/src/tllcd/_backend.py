"""Integration backend selection.

The hot loop is the per-mode adaptive Runge-Kutta on the Bogoliubov
coefficients.  A compiled kernel (Cython) covers the common case of contact
and Lorentzian couplings with poly5/linear schedules; everything else, and
builds without a compiler, fall back to scipy's DOP853.  Set
TLLCD_FORCE_PYTHON=1 to force the fallback (used by the benchmark).

Both backends integrate the same system:

    du/dt = +i omega u - (i g + chi) v
    dv/dt = -i omega v + (i g - chi) u

which conserves |u|^2 - |v|^2 and whose sign conventions are pinned by the
Fock oracle equivalence tests.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.integrate import solve_ivp

from .control import ScheduleKind
from .errors import IntegrationError
from .model import CouplingFamily

try:
    from . import _kernel

    HAVE_KERNEL = True
except ImportError:  # pragma: no cover - depends on build environment
    _kernel = None
    HAVE_KERNEL = False

_SCHEDULE_CODE = {ScheduleKind.POLY5: 0, ScheduleKind.LINEAR: 1}
_FAMILY_CODE = {CouplingFamily.CONTACT: 0, CouplingFamily.LORENTZIAN: 1}


def kernel_enabled() -> bool:
    return HAVE_KERNEL and not os.environ.get("TLLCD_FORCE_PYTHON")


def kernel_applicable(protocol) -> bool:
    return (
        protocol.schedule.kind in _SCHEDULE_CODE
        and protocol.coupling.family in _FAMILY_CODE
    )


def integrate_pair(protocol, p, t_eval, rtol, atol, u0, v0):
    """(u, v) complex arrays on the output grid t_eval."""
    if kernel_enabled() and kernel_applicable(protocol):
        return _integrate_kernel(protocol, p, t_eval, rtol, atol, u0, v0)
    return _integrate_python(protocol, p, t_eval, rtol, atol, u0, v0)


def _integrate_kernel(protocol, p, t_eval, rtol, atol, u0, v0):
    c = protocol.coupling
    out = _kernel.integrate_pair(
        float(p),
        float(protocol.v_F),
        float(c.g2_start),
        float(c.g2_end),
        float(c.g4_start),
        float(c.g4_end),
        float(c.R0),
        float(protocol.t_f),
        _FAMILY_CODE[c.family],
        _SCHEDULE_CODE[protocol.schedule.kind],
        1 if protocol.cd_enabled else 0,
        np.asarray(t_eval, dtype=np.float64),
        float(rtol),
        float(atol),
        complex(u0),
        complex(v0),
    )
    if out is None:
        raise IntegrationError("kernel step-size underflow", t=None)
    return out


def _integrate_python(protocol, p, t_eval, rtol, atol, u0, v0):
    def rhs(t, y):
        coeff = protocol.pair_generator(p, t)
        u = y[0] + 1j * y[1]
        v = y[2] + 1j * y[3]
        du = 1j * coeff.omega * u - (1j * coeff.g + coeff.chi) * v
        dv = -1j * coeff.omega * v + (1j * coeff.g - coeff.chi) * u
        return [du.real, du.imag, dv.real, dv.imag]

    y0 = [u0.real, u0.imag, v0.real, v0.imag]
    sol = solve_ivp(
        rhs,
        (float(t_eval[0]), float(t_eval[-1])),
        y0,
        method="DOP853",
        t_eval=np.asarray(t_eval, dtype=np.float64),
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationError(f"pair integration failed: {sol.message}")
    u = sol.y[0] + 1j * sol.y[1]
    v = sol.y[2] + 1j * sol.y[3]
    return u, v
