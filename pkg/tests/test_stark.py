import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starkshuttle import constants as const
from starkshuttle.errors import ValidationError
from starkshuttle.motion import CA40
from starkshuttle.stark import (
    be9_hyperfine_qubit,
    ca40_sd_qubit,
    decoherence_error,
    decoherence_ratio,
    decoherence_report,
    delta_chi,
    dephasing,
    first_order_amplitude,
    min_phase,
    phase_coefficient,
    qubit_preset,
    second_order_amplitude,
    threshold_time,
)
from starkshuttle.trajectory import (
    ion_from_well,
    make_optimal_trajectory,
    make_quintic_trajectory,
    make_ramped_trajectory,
    rowe_well,
    zeta,
)

CA = ca40_sd_qubit()
BE = be9_hyperfine_qubit()
OMEGA = 2 * math.pi * 2.9e6


def test_presets():
    assert qubit_preset("ca40-sd").state_f.level == "3d2D5/2"
    with pytest.raises(ValidationError):
        qubit_preset("nope")


def test_phase_identity():
    tr = make_ramped_trajectory(1e-4, 2e-8, 1e-9)
    d = dephasing(tr, CA)
    assert d.phi == CA.species.mass**2 / const.hbar * d.delta_chi * d.zeta_used


def test_stationary_ion_no_phase():
    assert dephasing(make_optimal_trajectory(0.0, 1e-8), CA).phi == 0.0
    assert min_phase(CA, 0.0, 1e-8) == 0.0


def test_min_phase_equals_cubic_dephasing():
    L, T = 1e-4, 1.46e-8
    assert min_phase(CA, L, T) == pytest.approx(dephasing(make_optimal_trajectory(L, T), CA).phi, rel=1e-12)
    assert abs(min_phase(CA, L, T)) == pytest.approx(math.pi / 100, rel=0.01)


def test_phase_linear_in_zeta():
    L, T = 1e-4, 1e-6
    trajs = [
        make_optimal_trajectory(L, T),
        make_quintic_trajectory(L, T),
        ion_from_well(rowe_well(L, T, OMEGA)),
    ]
    ratios = [dephasing(t, CA).phi / zeta(t).zeta for t in trajs]
    assert np.ptp(ratios) <= 1e-12 * abs(ratios[0])


def test_min_phase_is_a_lower_bound():
    L, T = 1e-4, 1e-6
    floor = abs(min_phase(CA, L, T))
    for tr in (
        make_quintic_trajectory(L, T),
        make_ramped_trajectory(L, T, 0.05 * T),
        ion_from_well(rowe_well(L, T, OMEGA)),
    ):
        assert abs(dephasing(tr, CA).phi) >= floor


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1e-2), st.floats(1e-10, 1e-5), st.floats(1e-4, 1.0))
def test_threshold_round_trip(L, T, budget):
    t_min = threshold_time(CA, L, budget)
    assert abs(min_phase(CA, L, t_min)) == pytest.approx(budget, rel=1e-9)
    assert min_phase(CA, 2 * L, 3 * T) == pytest.approx(min_phase(CA, L, T) * 4 / 27, rel=1e-12)


def test_threshold_monotone():
    assert threshold_time(CA, 2e-4) > threshold_time(CA, 1e-4)
    assert threshold_time(CA, 1e-4, 0.1) < threshold_time(CA, 1e-4, 0.01)


def test_threshold_infinite_when_no_differential_shift():
    zero = be9_hyperfine_qubit(offset_scale=0.0)
    assert delta_chi(zero) == 0.0
    assert threshold_time(zero, 1e-4) == math.inf


def test_threshold_validation():
    with pytest.raises(ValidationError):
        threshold_time(CA, 1e-4, 0.0)
    with pytest.raises(ValidationError):
        min_phase(CA, 1e-4, 0.0)


def test_be_delta_chi_linear_in_offsets():
    vals = [delta_chi(be9_hyperfine_qubit(offset_scale=s)) for s in (0.0, 0.5, 1.0)]
    assert vals[0] == 0.0
    assert vals[1] == pytest.approx(vals[2] / 2, rel=0.01)


def test_be_suppressed_relative_to_ca():
    assert 1e-9 < abs(phase_coefficient(BE)) / abs(phase_coefficient(CA)) < 1e-6


# leakage


def test_first_order_boundary_closed_form():
    tr = make_optimal_trajectory(1.0, 1.0)
    w = 1e3
    # unit prefactor: m V / (e hbar) = 1
    unit = type("S", (), {"mass": const.e * const.hbar, "charge": const.e})()
    fa = first_order_amplitude(tr, 1.0, w, unit)
    expected = 6.0 * abs(1 + np.exp(1j * w)) / w
    assert abs(fa.boundary) == pytest.approx(expected, rel=1e-12)
    # q''(T) = -q''(0): the endpoint terms add at w T = 2k pi and cancel at (2k+1) pi
    even = first_order_amplitude(tr, 1.0, 1000 * math.pi, unit)
    assert abs(even.boundary) == pytest.approx(12 / (1000 * math.pi), rel=1e-9)
    odd = first_order_amplitude(tr, 1.0, 999 * math.pi, unit)
    assert abs(odd.boundary) < 1e-12 * abs(even.boundary)
    # integration by parts leaves -(1/(i w)) int q3 e^{iwt}, with third derivative q3 = -12 here
    assert abs(fa.remainder) == pytest.approx(12 * abs(np.exp(1j * w) - 1) / w**2, rel=1e-9)


def test_first_order_zero_frequency_rejected():
    with pytest.raises(ValidationError):
        first_order_amplitude(make_optimal_trajectory(1.0, 1.0), 1.0, 0.0, CA40)


def test_quintic_boundary_vanishes():
    fa = first_order_amplitude(make_quintic_trajectory(1e-4, 1e-8), 1e-29, 4e15, CA40)
    cubic = first_order_amplitude(make_optimal_trajectory(1e-4, 1e-8), 1e-29, 4e15, CA40)
    assert abs(fa.boundary) < 1e-12 * abs(cubic.boundary)
    assert abs(fa.full) < abs(cubic.boundary) * 1e-6


def test_ramped_full_integral_suppressed():
    L, T, w = 1e-4, 1e-8, 4e15
    ramp = first_order_amplitude(make_ramped_trajectory(L, T, 0.05 * T), 1e-29, w, CA40)
    cubic = first_order_amplitude(make_optimal_trajectory(L, T), 1e-29, w, CA40)
    assert abs(ramp.boundary) < 1e-12 * abs(cubic.boundary)
    assert abs(ramp.full) <= abs(cubic.boundary) / (w * T)


def test_sampled_oscillatory_integral_matches_exact():
    from starkshuttle.trajectory import make_sampled_trajectory

    tr = make_optimal_trajectory(1.0, 1.0)
    t = np.linspace(0, 1, 4001)
    s = make_sampled_trajectory(t, tr.q(t), tr.qdot(t), tr.qddot(t))
    a = first_order_amplitude(tr, 1.0, 300.0, CA40).full
    b = first_order_amplitude(s, 1.0, 300.0, CA40).full
    assert b == pytest.approx(a, rel=1e-9)


def test_second_order_same_state_is_phi():
    tr = make_optimal_trajectory(1e-4, 1e-8)
    phi = dephasing(tr, CA).phi
    assert second_order_amplitude(tr, CA) == pytest.approx(abs(phi), rel=1e-9)
    assert second_order_amplitude(make_optimal_trajectory(0.0, 1e-8), CA) == 0.0


def test_second_order_between_states():
    tr = make_optimal_trajectory(1e-4, 1e-8)
    # the two Be qubit states share no intermediate sublevel pathway with equal nuclear projection
    assert second_order_amplitude(tr, BE, target=BE.state_f) == 0.0
    self_term = second_order_amplitude(tr, BE, target=BE.state_i, source=BE.state_i)
    assert self_term == pytest.approx(abs(dephasing(tr, BE).phi), rel=1e-9)


def test_decoherence_error():
    assert decoherence_error(0.0) == 0.0
    assert decoherence_error(math.pi / 100) == pytest.approx(9.87e-4, rel=1e-3)
    assert decoherence_error(2.0) == 1.0


def test_decoherence_report_structure():
    r = decoherence_report(make_optimal_trajectory(1e-4, 1e-8), CA)
    assert r.channels
    assert 0 <= r.error_estimate <= 1
    assert r.first_order_amplitude <= r.first_order_total
    assert r.ratio == pytest.approx(r.first_order_amplitude / r.second_order_amplitude)
    assert r.compact_estimate == pytest.approx(
        const.hbar * const.e * 1e-8 / (10 * CA40.mass * max(abs(c.coupling) for c in r.channels) * 1e-4)
    )


def test_decoherence_ratio_scaling_and_quintic():
    L, T = 1e-4, 1e-8
    cubic = decoherence_ratio(make_optimal_trajectory(L, T), CA)
    assert decoherence_ratio(make_quintic_trajectory(L, T), CA) < 1e-3 * cubic
    # first order ~ T^-2 bound, second order ~ T^-3: compare the endpoint envelopes
    r1 = decoherence_report(make_optimal_trajectory(L, T), CA)
    r10 = decoherence_report(make_optimal_trajectory(L, 10 * T), CA)
    assert r10.second_order_amplitude == pytest.approx(r1.second_order_amplitude / 1000, rel=1e-9)
    bound1 = max(12 * L / T**2 * CA40.mass * abs(c.coupling) / (const.e * const.hbar * c.omega) for c in r1.channels)
    bound10 = max(12 * L / (10 * T) ** 2 * CA40.mass * abs(c.coupling) / (const.e * const.hbar * c.omega) for c in r10.channels)
    assert bound10 / r10.second_order_amplitude > bound1 / r1.second_order_amplitude
