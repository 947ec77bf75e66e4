"""Stark dephasing and leakage of a transported qubit.

The relative phase between the two qubit states is
``phi = (m^2 / hbar) (chi_i - chi_f) zeta[q]``: an atomic factor times a purely
kinematic one.  Leakage out of the qubit is estimated from the first two
orders of the Dyson series in the interaction picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import constants as const
from .atomic import (
    Polarization,
    StateDecomposition,
    StateTerm,
    couplings,
    ground_hyperfine,
    load_model,
    susceptibility,
)
from .errors import ValidationError
from .motion import BE9, CA40, IonSpecies
from .trajectory import zeta

DEFAULT_BUDGET = math.pi / 100

# 9Be+ ground state: nuclear spin, hyperfine constant (Hz), electron g-factor,
# nuclear g-factor in Bohr magnetons for H = A I.J + mu_B B (g_J J_z + g_I I_z)
BE9_GROUND = dict(I=Fraction(3, 2), A_hz=-625.008837e6, g_J=2.00226206, g_I=1.17749 / 1.5 * const.mu_N / const.mu_B)
BE9_FIELD_TESLA = 0.01194


@dataclass(frozen=True, eq=False)
class QubitDefinition:
    species: IonSpecies
    model: object
    state_i: StateDecomposition
    state_f: StateDecomposition
    description: str = ""
    polarization: Polarization = Polarization.TRANSVERSE

    def __post_init__(self):
        for st in (self.state_i, self.state_f):
            if st.level not in self.model.levels:
                raise ValidationError(f"qubit state level {st.level!r} not in model {self.model.name!r}")
        if self.state_i == self.state_f:
            raise ValidationError("qubit states must be distinct")


@dataclass(frozen=True)
class DephasingResult:
    phi: float
    delta_chi: float
    zeta_used: float
    chi_i: float
    chi_f: float
    mass: float


@dataclass(frozen=True)
class FirstOrderAmplitude:
    boundary: complex
    full: Optional[complex]

    @property
    def remainder(self):
        return None if self.full is None else self.full - self.boundary


@dataclass(frozen=True)
class LeakageChannel:
    source: str
    level: str
    M: Fraction
    mi: Optional[Fraction]
    coupling: float
    omega: float
    amplitude: FirstOrderAmplitude


@dataclass(frozen=True)
class DecoherenceReport:
    channels: tuple
    first_order_amplitude: float
    first_order_total: float
    second_order_amplitude: float
    ratio: Optional[float]
    ratio_total: Optional[float]
    error_estimate: float
    phi: float
    compact_estimate: Optional[float]


# qubit presets


def ca40_sd_qubit(polarization=Polarization.TRANSVERSE, directory=None):
    """``|S1/2, -1/2>`` and ``|D5/2, -1/2>`` of 40Ca+."""
    model = load_model("ca_ii", directory)
    return QubitDefinition(
        CA40,
        model,
        StateDecomposition.single("4s2S1/2", Fraction(-1, 2), name="S1/2,-1/2"),
        StateDecomposition.single("3d2D5/2", Fraction(-1, 2), name="D5/2,-1/2"),
        "40Ca+ optical qubit S1/2(-1/2) / D5/2(-1/2)",
        Polarization(polarization),
    )


def be9_states(B=BE9_FIELD_TESLA, offset_scale=1.0):
    """``|2,0>_F`` and ``|1,1>_F`` as nuclear x electron-spin products.

    Amplitudes are the zero-field couplings; energy offsets come from the
    ground-state hyperfine + Zeeman Hamiltonian at field ``B``, scaled by
    ``offset_scale``.
    """
    h = Fraction(1, 2)
    levels = ground_hyperfine(B_tesla=B, **BE9_GROUND)
    s = 1 / math.sqrt(2)
    f20 = (StateTerm(s, h, -h), StateTerm(s, -h, h))
    f11 = (StateTerm(math.sqrt(3) / 2, -h, Fraction(3, 2)), StateTerm(-0.5, h, h))
    e20 = levels[(2, 0)][0] * offset_scale
    e11 = levels[(1, 1)][0] * offset_scale
    return (
        StateDecomposition("2s2S1/2", f20, e20, name="F=2,mF=0"),
        StateDecomposition("2s2S1/2", f11, e11, name="F=1,mF=1"),
    )


def be9_hyperfine_qubit(B=BE9_FIELD_TESLA, offset_scale=1.0, polarization=Polarization.TRANSVERSE, directory=None):
    model = load_model("be_ii", directory)
    si, sf = be9_states(B, offset_scale)
    return QubitDefinition(
        BE9, model, si, sf, f"9Be+ hyperfine qubit |2,0>/|1,1> at B={B} T", Polarization(polarization)
    )


PRESETS = {"ca40-sd": ca40_sd_qubit, "be9-hyperfine": be9_hyperfine_qubit}


def qubit_preset(name, **kwargs):
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown qubit preset {name!r}; known: {sorted(PRESETS)}") from None
    return factory(**kwargs)


# dephasing


def chis(qubit):
    chi_i = susceptibility(qubit.state_i, qubit.model, qubit.polarization).chi
    chi_f = susceptibility(qubit.state_f, qubit.model, qubit.polarization).chi
    return chi_i, chi_f


def delta_chi(qubit):
    """``chi_i - chi_f`` in m^2/J; differences at rounding level are returned as 0."""
    return _difference(*chis(qubit))


def _difference(chi_i, chi_f):
    d = chi_i - chi_f
    if abs(d) <= 64 * np.finfo(float).eps * max(abs(chi_i), abs(chi_f)):
        return 0.0
    return d


def dephasing(traj, qubit, *, rtol=1e-9):
    """Relative Stark phase acquired along ``traj``."""
    chi_i, chi_f = chis(qubit)
    z = zeta(traj, rtol=rtol).zeta
    m = qubit.species.mass
    dchi = _difference(chi_i, chi_f)
    return DephasingResult(m * m / const.hbar * dchi * z, dchi, z, chi_i, chi_f, m)


def phase_coefficient(qubit):
    """``phi_min T^3 / L^2`` in SI units (signed)."""
    m = qubit.species.mass
    return 12.0 * m * m / const.hbar * delta_chi(qubit)


def min_phase(qubit, L, T):
    """Smallest phase over all transports of length ``L`` in time ``T``."""
    if not T > 0 or not L >= 0:
        raise ValidationError("need L >= 0 and T > 0")
    return phase_coefficient(qubit) * L * L / T**3


def threshold_time(qubit, L, phi_budget=DEFAULT_BUDGET):
    """Shortest ``T`` keeping ``|min_phase|`` within ``phi_budget``; ``inf`` if the phase vanishes."""
    if not phi_budget > 0 or not L > 0:
        raise ValidationError("need phi_budget > 0 and L > 0")
    coef = abs(phase_coefficient(qubit))
    if coef == 0.0:
        return math.inf
    return (coef * L * L / phi_budget) ** (1.0 / 3.0)


def decoherence_error(phi):
    """Leakage probability of order ``phi^2``, clamped to [0, 1]."""
    return min(1.0, float(phi) ** 2)


# leakage amplitudes


def _oscillatory_acc_integral(traj, omega):
    """``int_0^T qddot(t) exp(i omega t) dt``."""
    if traj.is_analytic:
        return complex(traj.acceleration.oscillatory_integral(omega))
    s = traj.samples
    t, a = s.t, s.qddot
    # Filon: qddot linear on each panel, exponential integrated exactly
    h = np.diff(t)
    e0 = np.exp(1j * omega * t[:-1])
    e1 = np.exp(1j * omega * t[1:])
    iw = 1j * omega
    slope = np.diff(a) / h
    part = (a[1:] * e1 - a[:-1] * e0) / iw - slope * (e1 - e0) / iw**2
    return complex(np.sum(part))


def first_order_amplitude(traj, coupling, omega_rn, species, *, full=True):
    """First-order leakage amplitude into a state coupled by ``coupling`` (C m).

    ``coupling`` is ``V_rn = -e <r|x|n>``.  The boundary term from integrating by
    parts is always returned; ``full=True`` adds the exact oscillatory integral.
    """
    if omega_rn == 0:
        raise ValidationError("transition frequency must be non-zero")
    pref = -1j * species.mass * coupling / (species.charge * const.hbar)
    a0, aT = float(traj.qddot(0.0)), float(traj.qddot(traj.T))
    boundary = -1j / omega_rn * (aT * np.exp(1j * omega_rn * traj.T) - a0)
    whole = _oscillatory_acc_integral(traj, omega_rn) if full else None
    return FirstOrderAmplitude(pref * boundary, None if whole is None else pref * whole)


def _intermediates(state, qubit):
    """``[(level, (M, mi), <r|x|state>, E_r - E_state in J)]``."""
    model = qubit.model
    k = model.levels[state.level]
    e_state = (k.energy_cm1 + state.offset_cm1) * const.CM1_TO_J
    out = []
    for other, _, _ in model.lines.connected(state.level):
        e_r = model.levels[other].energy_joule
        for key, amp in couplings(state, other, model, qubit.polarization).items():
            if amp != 0:
                out.append((other, key, amp, e_r - e_state))
    return out


def second_order_amplitude(traj, qubit, target=None, source=None, *, rtol=1e-9):
    """Magnitude of the second-order Dyson term from ``source`` to ``target``.

    With the integral approximated by ``zeta / omega``, the term is
    ``(m^2/hbar) |sum_r' <target|x|r'><r'|x|source> / (E_source - E_r')| zeta``.
    For ``target`` equal to ``source`` (the default) only the part that differs
    between the two qubit states is observable, which is ``|phi|``.
    """
    source = qubit.state_i if source is None else source
    z = zeta(traj, rtol=rtol).zeta
    m = qubit.species.mass
    if target is None or target == source:
        return abs(m * m / const.hbar * delta_chi(qubit) * z)
    into_target = {(lv, key): amp for lv, key, amp, _ in _intermediates(target, qubit)}
    total = 0j
    for lv, key, amp, gap in _intermediates(source, qubit):
        if (lv, key) in into_target:
            total += np.conj(into_target[(lv, key)]) * amp / (-gap)
    return float(m * m / const.hbar * abs(total) * z)


def decoherence_report(traj, qubit, *, rtol=1e-9):
    """First- and second-order leakage estimates and their ratio.

    ``first_order_amplitude`` is the largest single-channel boundary term,
    the term-by-term quantity set against the second-order term in ``ratio``.
    ``first_order_total`` is the larger over the two qubit states of
    ``sqrt(sum_r |eps_r|^2)``; ``ratio_total`` uses it instead.
    """
    sp = qubit.species
    channels = []
    per_source = {}
    vmax = 0.0
    for label, state in (("i", qubit.state_i), ("f", qubit.state_f)):
        total = 0.0
        for lv, (M, mi), amp, gap in _intermediates(state, qubit):
            V = -sp.charge * abs(amp)
            omega = gap / const.hbar
            fa = first_order_amplitude(traj, V, omega, sp)
            channels.append(LeakageChannel(label, lv, M, mi, V, omega, fa))
            total += abs(fa.boundary) ** 2
            vmax = max(vmax, abs(V))
        per_source[label] = math.sqrt(total)
    first = max((abs(c.amplitude.boundary) for c in channels), default=0.0)
    total = max(per_source.values())
    phi = dephasing(traj, qubit, rtol=rtol).phi
    second = abs(phi)
    ratio = first / second if second > 0 else None
    ratio_total = total / second if second > 0 else None
    compact = None
    if vmax > 0 and traj.L > 0:
        compact = const.hbar * sp.charge * traj.T / (10 * sp.mass * vmax * traj.L)
    error = min(1.0, decoherence_error(phi) + sum(abs(c.amplitude.boundary) ** 2 for c in channels))
    return DecoherenceReport(tuple(channels), first, total, second, ratio, ratio_total, error, phi, compact)


def decoherence_ratio(traj, qubit, *, rtol=1e-9):
    return decoherence_report(traj, qubit, rtol=rtol).ratio
