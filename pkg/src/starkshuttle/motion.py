"""Motional state of an ion carried by a moving harmonic well.

A ground-state ion stays in a coherent state ``|alpha(t)>`` for any well
program ``s(t)``.  :func:`coherent_evolution` evaluates that closed form;
:func:`fock_oracle` integrates the Schrodinger equation in a truncated number
basis to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from . import constants as const
from .errors import TruncationError, ValidationError
from .trajectory import MIN_SAMPLES_PER_PERIOD, ion_from_well


@dataclass(frozen=True)
class IonSpecies:
    name: str
    mass: float
    charge: float = const.e

    def __post_init__(self):
        if not self.mass > 0:
            raise ValidationError(f"ion mass must be positive, got {self.mass}")
        if not self.charge > 0:
            raise ValidationError(f"ion charge must be positive, got {self.charge}")

    def ground_state_width(self, omega):
        """``sqrt(hbar / (m omega))``."""
        return math.sqrt(const.hbar / (self.mass * omega))


# singly ionised: atomic mass minus one electron
CA40 = IonSpecies("40Ca+", 39.962590863 * const.amu - const.m_e)
BE9 = IonSpecies("9Be+", 9.0121831 * const.amu - const.m_e)


@dataclass(frozen=True, eq=False)
class CoherentMotionResult:
    t: np.ndarray
    alpha: np.ndarray
    u: np.ndarray
    global_phase: np.ndarray
    residual_quanta: float

    def position(self, species, omega):
        """``<x>(t)`` implied by ``alpha``."""
        return self.alpha.real * math.sqrt(2 * const.hbar / (species.mass * omega))


@dataclass(frozen=True, eq=False)
class FieldProfile:
    t: np.ndarray
    xi: np.ndarray
    peak: float


def _grid(T, omega, n_samples):
    periods = omega * T / (2 * math.pi)
    needed = int(math.ceil(MIN_SAMPLES_PER_PERIOD * periods)) + 1
    if n_samples is None:
        n_samples = max(needed, 257)
    elif n_samples < needed:
        raise ValidationError(
            f"{n_samples} samples resolve fewer than {MIN_SAMPLES_PER_PERIOD} points per trap period "
            f"(need at least {needed})"
        )
    return np.linspace(0.0, T, n_samples)


def coherent_evolution(well, species, n_samples=None):
    """Closed-form coherent amplitude for a ground-state ion in ``well``.

    Returns ``alpha(t)``, the interaction-picture displacement ``u(t)``, the
    real overall phase and the quanta left relative to the final well centre.
    """
    w = well.omega
    t = _grid(well.T, w, n_samples)
    beta = math.sqrt(species.mass * w / (2 * const.hbar))
    traj = ion_from_well(well)
    q, qd = traj.q(t), traj.qdot(t)
    s = well.profile(t) if well.is_analytic else np.interp(t, well.t, well.values)
    alpha = beta * (q + 1j * qd / w)

    # C = exp(-iwt) J with J the jump-inclusive convolution; u drops the jump at t=0
    C = (s - q) - 1j * qd / w
    J = np.exp(1j * w * t) * C
    u = -beta * (J - well.start_value())
    if well.is_analytic:
        sdot = well.profile.deriv()(t)
    else:
        sdot = np.gradient(s, t)
    # Phi = (1/2) int (u udot* - u* udot) = i int Im(u udot*); report the real angle
    udot = -beta * sdot * np.exp(1j * w * t)
    integrand = np.imag(u * np.conj(udot))
    phase = cumulative_trapezoid(integrand, t, initial=0.0)
    residual = abs(alpha[-1] - beta * well.L) ** 2
    return CoherentMotionResult(t, alpha, u, phase, float(residual))


def field_profile(traj, species, n_samples=2001):
    """Electric field ``(m / e) qddot`` the ion experiences."""
    t, _, _, acc = traj.grid(n_samples)
    xi = species.mass / species.charge * acc
    return FieldProfile(t, xi, float(np.max(np.abs(xi))) if xi.size else 0.0)


@dataclass(frozen=True, eq=False)
class FockResult:
    state: np.ndarray
    fidelity: float
    leakage: float
    alpha_predicted: complex
    t: np.ndarray
    mean_x: np.ndarray
    max_norm_error: float
    dim: int


def coherent_state(alpha, dim):
    n = np.arange(dim)
    if alpha == 0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    logmag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def _required_dim(alpha_max):
    a2 = alpha_max**2
    return int(math.ceil(a2 + 6 * alpha_max)) + 8


def fock_oracle(well, species, dim=64, dt=None, *, leakage_tol=1e-8):
    """Integrate the moving-well Hamiltonian in a ``dim``-state number basis.

    Works in units hbar = m = omega = 1.  Each step exponentiates the
    Hamiltonian frozen at the step midpoint, which is exactly unitary and
    second-order accurate.  ``dt`` is in seconds (default one 200th of a trap
    period).  Raises :class:`TruncationError` when the predicted amplitude
    does not fit in the basis or the top two states end up populated above
    ``leakage_tol``.
    """
    w = well.omega
    x0 = species.ground_state_width(w)
    cm = coherent_evolution(well, species)
    amax = float(np.max(np.abs(cm.alpha)))
    if amax**2 + 6 * amax >= dim:
        raise TruncationError(
            f"dim={dim} too small for |alpha| up to {amax:.3g}", required_dim=_required_dim(amax)
        )
    T = well.T * w
    step = (2 * math.pi / 200) if dt is None else dt * w
    nsteps = max(1, int(math.ceil(T / step)))
    h = T / nsteps

    n = np.arange(dim)
    off_x = np.sqrt(n[1:] / 2.0)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    ts = np.linspace(0.0, T, nsteps + 1)
    mean_x = np.empty(nsteps + 1)
    mean_x[0] = 0.0
    max_norm_err = 0.0
    for k in range(nsteps):
        s = float(well.s(np.array([(ts[k] + 0.5 * h) / w]))[0]) / x0
        # H = n + 1/2 - s x + s^2/2, tridiagonal in the number basis
        lam, V = eigh_tridiagonal(n + 0.5 + 0.5 * s * s, -s * off_x)
        psi = V @ (np.exp(-1j * lam * h) * (V.T @ psi))
        max_norm_err = max(max_norm_err, abs(np.linalg.norm(psi) - 1.0))
        # <x> = (a + a^dag)/sqrt(2) = 2 Re sum conj(psi_n) sqrt((n+1)/2) psi_{n+1}
        mean_x[k + 1] = 2.0 * np.real(np.vdot(psi[:-1], off_x * psi[1:]))
    leakage = float(np.sum(np.abs(psi[-2:]) ** 2))
    if leakage > leakage_tol:
        raise TruncationError(
            f"population {leakage:.2e} in the top two basis states exceeds {leakage_tol:g}",
            achieved=leakage,
            required_dim=max(2 * dim, _required_dim(amax)),
        )
    a_pred = complex(cm.alpha[-1])
    fid = float(abs(np.vdot(coherent_state(a_pred, dim), psi)) ** 2)
    return FockResult(psi, fid, leakage, a_pred, ts / w, mean_x * x0, max_norm_err, dim)
