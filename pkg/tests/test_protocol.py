"""Protocol-level tests: per-(p, t) evaluation, speed-window criteria and
the closed-form bound."""

import math

import numpy as np
import pytest

from tllcd.control import Schedule, ScheduleKind
from tllcd.errors import CDInstabilityError, ContractError
from tllcd.model import TWO_PI, CouplingFamily, CouplingSpec
from tllcd.protocol import (
    DriveProtocol,
    adiabaticity_parameter,
    check_cd_spectrum,
    closed_form_bound,
    stability_margin,
)


def reference_protocol(t_f=9.498860966469166, n_modes=4, L=100.0, cd=True):
    return DriveProtocol(
        coupling=CouplingSpec(
            family=CouplingFamily.CONTACT,
            g2_start=0.0,
            g2_end=1.0,
            g4_start=0.0,
            g4_end=0.5,
        ),
        schedule=Schedule(ScheduleKind.POLY5),
        t_f=t_f,
        L=L,
        n_modes=n_modes,
        cd_enabled=cd,
    )


def test_protocol_validation():
    with pytest.raises(ContractError):
        reference_protocol(t_f=-1.0)
    with pytest.raises(ContractError):
        reference_protocol(n_modes=0)


def test_momenta_grid():
    proto = reference_protocol(n_modes=3)
    assert np.allclose(proto.momenta(), TWO_PI * np.array([1, 2, 3]) / 100.0)


def test_couplings_chain_rule():
    proto = reference_protocol()
    t = 0.37 * proto.t_f
    g2, g4, dg2, dg4 = proto.couplings(0.1, t)
    h = 1e-6
    g2p, g4p, _, _ = proto.couplings(0.1, t + h)
    g2m, g4m, _, _ = proto.couplings(0.1, t - h)
    assert dg2 == pytest.approx((g2p - g2m) / (2 * h), abs=1e-7)
    assert dg4 == pytest.approx((g4p - g4m) / (2 * h), abs=1e-7)


def test_chi_zero_without_cd():
    proto = reference_protocol(cd=False)
    assert proto.chi(0.1, 0.5 * proto.t_f) == 0.0
    assert reference_protocol().chi(0.1, 0.5 * proto.t_f) != 0.0


def test_chi_matches_finite_difference_of_lnsqrtk():
    proto = reference_protocol()
    p = proto.momenta()[0]
    t = 0.41 * proto.t_f
    h = 1e-6
    fd = (
        math.log(proto.luttinger(p, t + h).K) - math.log(proto.luttinger(p, t - h).K)
    ) / (4 * h)
    assert proto.chi(p, t) == pytest.approx(fd, abs=1e-8)


def test_sound_velocity_rate_finite_difference():
    proto = reference_protocol()
    p = proto.momenta()[0]
    t = 0.6 * proto.t_f
    h = 1e-6
    fd = (proto.luttinger(p, t + h).v_s - proto.luttinger(p, t - h).v_s) / (2 * h)
    assert proto.sound_velocity_rate(p, t) == pytest.approx(fd, abs=1e-8)


def test_controlled_equals_bare_frequencies():
    proto = reference_protocol()
    p = proto.momenta()[1]
    t = 0.5 * proto.t_f
    cc = proto.controlled(p, t)
    omega, g = proto.pair_frequencies(p, t)
    assert cc.omega_cd == pytest.approx(omega, rel=1e-12)
    assert cc.g_cd == pytest.approx(g, rel=1e-12)
    assert cc.chi == pytest.approx(proto.chi(p, t), abs=1e-14)


def test_closed_form_bound_frozen():
    # L |Delta g2| max P' / (2 pi v_F)^2 with max P' = 1.875
    proto = reference_protocol()
    assert closed_form_bound(proto) == pytest.approx(4.749430483234583, abs=1e-12)


def test_closed_form_bound_none_for_table():
    proto = DriveProtocol(
        coupling=CouplingSpec(
            family=CouplingFamily.CUSTOM_TABLE,
            table=((0.0, 0.0, 0.0), (1.0, 1.0, 0.5)),
        ),
        schedule=Schedule(ScheduleKind.POLY5),
        t_f=5.0,
        L=100.0,
        n_modes=2,
    )
    assert closed_form_bound(proto) is None


def test_stability_margin_reference_run():
    report = stability_margin(reference_protocol())
    assert report.passed
    assert report.margin > 0.0
    assert report.bound_tf == pytest.approx(4.749430483234583, abs=1e-12)


def test_stability_fails_for_fast_drive():
    report = stability_margin(reference_protocol(t_f=0.05))
    assert not report.passed
    assert report.margin < 0.0


def test_adiabaticity_identity_at_slowest_mode():
    # parameter at p = 2 pi / L equals L/(2 pi) |v_sdot| / v_s^2
    proto = reference_protocol()
    p = TWO_PI / proto.L
    t = 0.5 * proto.t_f
    lp = proto.luttinger(p, t)
    expect = proto.L / TWO_PI * abs(proto.sound_velocity_rate(p, t)) / lp.v_s**2
    assert adiabaticity_parameter(proto, p, t) == pytest.approx(expect, rel=1e-12)


def test_adiabatic_time_scales_with_tf():
    slow = stability_margin(reference_protocol(t_f=20.0))
    # max adiabaticity ~ 1/t_f, so t_adiabatic is t_f-independent
    fast = stability_margin(reference_protocol(t_f=10.0))
    assert slow.t_adiabatic == pytest.approx(fast.t_adiabatic, rel=1e-2)


def test_check_cd_spectrum():
    check_cd_spectrum(reference_protocol(), n_time=31)
    with pytest.raises(CDInstabilityError):
        check_cd_spectrum(reference_protocol(t_f=0.05), n_time=31)


def test_validate_rejects_unstable_coupling():
    proto = DriveProtocol(
        coupling=CouplingSpec(g2_start=0.0, g2_end=TWO_PI + 0.5),
        schedule=Schedule(ScheduleKind.POLY5),
        t_f=5.0,
        L=100.0,
        n_modes=2,
    )
    with pytest.raises(ContractError, match="luttinger-instability"):
        proto.validate(n_time=51)


def test_with_tf_and_with_cd():
    proto = reference_protocol()
    assert proto.with_tf(3.0).t_f == 3.0
    assert not proto.with_cd(False).cd_enabled
    # original untouched (frozen dataclass)
    assert proto.cd_enabled and proto.t_f != 3.0
