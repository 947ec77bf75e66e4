import math

import numpy as np
import pytest

from starkshuttle.errors import TruncationError, ValidationError
from starkshuttle.motion import (
    CA40,
    IonSpecies,
    coherent_evolution,
    coherent_state,
    field_profile,
    fock_oracle,
)
from starkshuttle.trajectory import constant_well, make_optimal_trajectory, optimal_well, rowe_well

OMEGA = 2 * math.pi * 2.9e6


def _scaled_well(widths, wT, kind=optimal_well):
    L = widths * CA40.ground_state_width(OMEGA)
    return kind(L, wT / OMEGA, OMEGA)


def test_species_validation():
    with pytest.raises(ValidationError):
        IonSpecies("x", -1.0)


def test_ground_state_width_ca():
    from scipy.constants import hbar

    assert CA40.ground_state_width(OMEGA) == pytest.approx(math.sqrt(hbar / (CA40.mass * OMEGA)), rel=1e-15)
    assert 9e-9 < CA40.ground_state_width(OMEGA) < 1e-8


def test_optimal_well_leaves_no_quanta():
    res = coherent_evolution(_scaled_well(3, 10), CA40)
    assert res.residual_quanta < 1e-20
    assert res.u[0] == 0


def test_rowe_well_leaves_quanta_at_short_times():
    res = coherent_evolution(_scaled_well(3, 10, rowe_well), CA40)
    assert res.residual_quanta > 1e-4


def test_constant_well_trivial():
    res = coherent_evolution(constant_well(0.0, 1e-6, OMEGA), CA40)
    assert np.all(res.alpha == 0)
    assert np.all(res.global_phase == 0)


def test_too_few_samples_rejected():
    with pytest.raises(ValidationError):
        coherent_evolution(_scaled_well(3, 100), CA40, n_samples=50)


def test_field_profile_peak():
    tr = make_optimal_trajectory(1e-4, 1e-8)
    fp = field_profile(tr, CA40)
    assert fp.peak == pytest.approx(CA40.mass / CA40.charge * 6e-4 / 1e-16, rel=1e-9)


def test_coherent_state_normalised():
    v = coherent_state(1.5 + 0.5j, 60)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_fock_oracle_certifies_coherent_state():
    fr = fock_oracle(_scaled_well(3, 10), CA40, dim=64)
    assert fr.fidelity >= 1 - 1e-6
    assert fr.leakage < 1e-8
    assert fr.max_norm_error < 1e-10
    L = 3 * CA40.ground_state_width(OMEGA)
    q = make_optimal_trajectory(L, 10 / OMEGA).q(fr.t)
    assert np.max(np.abs(fr.mean_x - q)) < 1e-4 * L


def test_fock_oracle_rowe_matches_closed_form():
    fr = fock_oracle(_scaled_well(2, 8, rowe_well), CA40, dim=48)
    assert fr.fidelity >= 1 - 1e-6


def test_fock_oracle_truncation():
    with pytest.raises(TruncationError) as exc:
        fock_oracle(_scaled_well(20, 5, rowe_well), CA40, dim=16)
    assert exc.value.required_dim > 16
