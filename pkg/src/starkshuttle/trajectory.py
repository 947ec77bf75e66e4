"""Ion and well trajectories for straight-line transport, and the functional
``zeta = int_0^T qddot(t)**2 dt`` that sets the size of the Stark phase.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .expoly import ExpPoly, Piecewise
from .quadrature import gauss_legendre, panels_for, sampled_integral

MIN_SAMPLES_PER_PERIOD = 40


class TrajectoryKind(str, enum.Enum):
    OPTIMAL_CUBIC = "cubic"
    QUINTIC = "quintic"
    RAMPED_CUBIC = "ramped"
    FROM_WELL = "from_well"
    SAMPLED = "sampled"
    CUSTOM = "custom"


class WellKind(str, enum.Enum):
    OPTIMAL = "optimal"
    ROWE = "rowe"
    CONSTANT = "constant"
    FROM_ION = "from_ion"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class Samples:
    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    qddot: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Centre-of-mass path ``q(t)`` of the ion over ``[0, T]``.

    Analytic kinds carry exact piecewise representations of ``q``, ``qdot``
    and ``qddot``; the sampled kind carries a grid with ``qddot`` stored
    explicitly.
    """

    kind: TrajectoryKind
    L: float
    T: float
    tau: Optional[float] = None
    position: Optional[Piecewise] = None
    velocity: Optional[Piecewise] = None
    acceleration: Optional[Piecewise] = None
    samples: Optional[Samples] = None

    @property
    def is_analytic(self):
        return self.acceleration is not None

    def _interp(self, values, t):
        return np.interp(t, self.samples.t, values)

    def q(self, t):
        if self.is_analytic:
            return self.position(t)
        return self._interp(self.samples.q, t)

    def qdot(self, t):
        if self.is_analytic:
            return self.velocity(t)
        return self._interp(self.samples.qdot, t)

    def qddot(self, t):
        if self.is_analytic:
            return self.acceleration(t)
        return self._interp(self.samples.qddot, t)

    def grid(self, n=1001):
        """``(t, q, qdot, qddot)`` on ``n`` uniform points (the stored grid for sampled kinds)."""
        if not self.is_analytic:
            s = self.samples
            return s.t, s.q, s.qdot, s.qddot
        t = np.linspace(0.0, self.T, n)
        return t, self.q(t), self.qdot(t), self.qddot(t)

    def reversed(self):
        """The time-reversed transport ``L - q(T - t)``."""
        if self.is_analytic:
            return Trajectory(
                self.kind,
                self.L,
                self.T,
                self.tau,
                position=(self.L - self.position.reflect()),
                velocity=self.velocity.reflect(),
                acceleration=-self.acceleration.reflect(),
            )
        s = self.samples
        t = self.T - s.t[::-1]
        return Trajectory(
            self.kind,
            self.L,
            self.T,
            samples=Samples(t, self.L - s.q[::-1], s.qdot[::-1].copy(), -s.qddot[::-1]),
        )


@dataclass(frozen=True, eq=False)
class WellProgram:
    """Centre ``s(t)`` of the harmonic well with angular frequency ``omega``.

    ``s`` is 0 before the transport and ``L`` after it; jumps at ``t = 0``
    and ``t = T`` are allowed.
    """

    kind: WellKind
    L: float
    T: float
    omega: float
    profile: Optional[Piecewise] = None
    t: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @property
    def is_analytic(self):
        return self.profile is not None

    def s(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_analytic:
            inside = self.profile(np.clip(t, 0.0, self.T))
        else:
            inside = np.interp(t, self.t, self.values)
        return np.where(t < 0.0, 0.0, np.where(t > self.T, self.L, inside))

    def start_value(self):
        """``s(0+)``."""
        return float(self.profile(0.0)) if self.is_analytic else float(self.values[0])


@dataclass(frozen=True)
class ZetaResult:
    zeta: float
    normalized: Optional[float]
    quadrature_error_estimate: float


def _check_LT(L, T):
    if not (T > 0 and math.isfinite(T)):
        raise ValidationError(f"time of flight must be positive, got T={T}")
    if not (L >= 0 and math.isfinite(L)):
        raise ValidationError(f"displacement must be non-negative, got L={L}")


def _from_position(kind, L, T, position, tau=None):
    velocity = position.deriv()
    return Trajectory(kind, float(L), float(T), tau, position, velocity, velocity.deriv())


def make_optimal_trajectory(L, T):
    """Cubic ``L (3 t^2/T^2 - 2 t^3/T^3)``, the minimiser of ``zeta``."""
    _check_LT(L, T)
    q = ExpPoly.poly([0.0, 0.0, 3 * L / T**2, -2 * L / T**3])
    return _from_position(TrajectoryKind.OPTIMAL_CUBIC, L, T, Piecewise([0.0, T], [q]))


def make_quintic_trajectory(L, T):
    """Quintic ``L (10 t^3/T^3 - 15 t^4/T^4 + 6 t^5/T^5)``; zero end accelerations."""
    _check_LT(L, T)
    q = ExpPoly.poly([0.0, 0.0, 0.0, 10 * L / T**3, -15 * L / T**4, 6 * L / T**5])
    return _from_position(TrajectoryKind.QUINTIC, L, T, Piecewise([0.0, T], [q]))


def make_ramped_trajectory(L, T, tau):
    """Cubic whose acceleration is switched on and off over ``tau``.

    ``qddot = k * a0(t) * w(t)`` with ``a0`` the cubic's acceleration and ``w``
    a raised-cosine window rising over ``[0, tau]`` and falling over
    ``[T - tau, T]``.  ``a0`` is odd about ``T/2`` and ``w`` even, so the net
    velocity change is zero; ``k`` restores ``q(T) = L``.
    """
    _check_LT(L, T)
    if not (0 < tau < T / 2):
        raise ValidationError(f"ramp time must satisfy 0 < tau < T/2, got tau={tau}, T={T}")
    A = 6.0 * L / T**2
    nu = math.pi / tau
    mid = T - 2 * tau

    def a0(t0):
        # A (1 - 2 t / T) in the local variable of a piece starting at t0
        return ExpPoly.poly([A * (1 - 2 * t0 / T), -2 * A / T])

    rise = a0(0.0) * (0.5 - ExpPoly.cosine(nu, 0.5))
    flat = a0(tau)
    fall = a0(T - tau) * (0.5 + ExpPoly.cosine(nu, 0.5))
    acc = Piecewise([0.0, tau, tau + mid, T], [rise, flat, fall]).real()
    vel = acc.antideriv(0.0)
    pos = vel.antideriv(0.0)
    end = float(pos(T))
    k = L / end if end != 0 else 1.0
    return Trajectory(TrajectoryKind.RAMPED_CUBIC, float(L), float(T), float(tau), pos * k, vel * k, acc * k)


def make_piecewise_trajectory(position, L=None):
    """Trajectory from an exact :class:`Piecewise` position on ``[0, T]``."""
    T = float(position.breaks[-1])
    if position.breaks[0] != 0.0:
        raise ValidationError("position must start at t=0")
    final = float(position(T)) if L is None else float(L)
    _check_LT(abs(final), T)
    return _from_position(TrajectoryKind.CUSTOM, final, T, position)


def make_sampled_trajectory(t, q, qdot, qddot, L=None):
    """Trajectory from a grid; ``T`` is ``t[-1]`` and ``L`` defaults to ``q[-1]``."""
    t = np.asarray(t, dtype=float)
    arrays = [np.asarray(a, dtype=float) for a in (q, qdot, qddot)]
    if t.ndim != 1 or t.size < 3:
        raise ValidationError("sampled trajectory needs at least 3 grid points")
    if any(a.shape != t.shape for a in arrays):
        raise ValidationError("sample arrays must match the time grid")
    if np.any(np.diff(t) <= 0):
        raise ValidationError("time grid must be strictly increasing")
    if t[0] != 0.0:
        raise ValidationError("time grid must start at t=0")
    final = float(arrays[0][-1]) if L is None else float(L)
    return Trajectory(TrajectoryKind.SAMPLED, final, float(t[-1]), samples=Samples(t, *arrays))


def zeta(traj, *, rtol=1e-9, order=16):
    """``int_0^T qddot^2 dt`` with an a-posteriori error estimate.

    Analytic trajectories use composite Gauss-Legendre per piece; sampled ones
    use Simpson's rule with a half-grid Richardson estimate.  Raises
    ``ConvergenceError`` if the estimate exceeds ``rtol``.
    """
    from .errors import ConvergenceError

    if traj.is_analytic:
        acc = traj.acceleration
        total = 0.0
        err = 0.0
        scale = (abs(traj.L) / traj.T**2) ** 2 * traj.T
        for k, piece in enumerate(acc.pieces):
            a, b = acc.breaks[k], acc.breaks[k + 1]
            width = b - a

            def f(t, piece=piece, a=a):
                return piece(t - a).real ** 2

            value, e = gauss_legendre(
                f,
                a,
                b,
                order=order,
                panels=panels_for(piece.max_frequency, width),
                rtol=rtol,
                atol=rtol * scale * 1e-3,
            )
            total += value
            err += e
    else:
        s = traj.samples
        total, err = sampled_integral(s.t, s.qddot**2)
        if err > rtol * abs(total) and err > 0:
            raise ConvergenceError(
                f"sampled zeta quadrature error {err:.3e} exceeds rtol={rtol:g} (relative {err / abs(total):.3e})",
                achieved=err,
            )
    normalized = total * traj.T**3 / traj.L**2 if traj.L > 0 else None
    return ZetaResult(total, normalized, err)


def zeta_exact(traj):
    """Closed-form ``zeta`` for analytic trajectories (product then exact integral)."""
    acc = traj.acceleration
    return float((acc * acc).integral().real)


# well programs


def _check_omega(omega):
    if not (omega > 0 and math.isfinite(omega)):
        raise ValidationError(f"trap frequency must be positive, got omega={omega}")


def well_from_ion(traj, omega):
    """Well centre ``s = q + qddot / omega^2`` that drives the ion along ``traj``."""
    _check_omega(omega)
    if traj.is_analytic:
        profile = traj.position + traj.acceleration * (1.0 / omega**2)
        return WellProgram(WellKind.FROM_ION, traj.L, traj.T, float(omega), profile=profile)
    s = traj.samples
    return WellProgram(
        WellKind.FROM_ION, traj.L, traj.T, float(omega), t=s.t.copy(), values=s.q + s.qddot / omega**2
    )


def optimal_well(L, T, omega):
    w = well_from_ion(make_optimal_trajectory(L, T), omega)
    return WellProgram(WellKind.OPTIMAL, w.L, w.T, w.omega, profile=w.profile)


def rowe_well(L, T, omega):
    """``s = L sin^2(pi t / 2T)``."""
    _check_LT(L, T)
    _check_omega(omega)
    profile = ExpPoly.const(0.5 * L) - ExpPoly.cosine(math.pi / T, 0.5 * L)
    return WellProgram(WellKind.ROWE, float(L), float(T), float(omega), profile=Piecewise([0.0, T], [profile]).real())


def constant_well(L, T, omega, value=None):
    """Well held at ``value`` (default ``L``) during ``(0, T)``: a sudden jump at t=0."""
    _check_LT(L, T)
    _check_omega(omega)
    v = L if value is None else value
    return WellProgram(WellKind.CONSTANT, float(L), float(T), float(omega), profile=Piecewise([0.0, T], [ExpPoly.const(v)]))


def sampled_well(t, s, omega, L=None):
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    _check_omega(omega)
    if t.ndim != 1 or t.size < 3 or s.shape != t.shape:
        raise ValidationError("sampled well needs matching 1-d grids of at least 3 points")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValidationError("well grid must start at 0 and be strictly increasing")
    final = float(s[-1]) if L is None else float(L)
    return WellProgram(WellKind.SAMPLED, final, float(t[-1]), float(omega), t=t, values=s)


def _convolution(well):
    """``C(t) = exp(-i w t) [s(0+) + int_0+^t sdot(t1) exp(i w t1) dt1]`` as a Piecewise.

    The jump of ``s`` at ``t = 0`` (and at any interior break) enters as a
    step contribution; the ion starts at rest at the origin.
    """
    w = well.omega
    prof = well.profile
    integrand = prof.deriv().times_exp(w)
    jumps = np.concatenate([[prof.pieces[0](0.0)], prof.jumps()])
    pieces = []
    value = 0j
    for k, (piece, width) in enumerate(zip(integrand.pieces, integrand.widths)):
        value += jumps[k] * np.exp(1j * w * prof.breaks[k])
        F = piece.antideriv(value)
        pieces.append(F)
        value = complex(F(width))
    J = Piecewise(prof.breaks, pieces)
    return J.times_exp(-w)


def ion_from_well(well, *, min_samples_per_period=MIN_SAMPLES_PER_PERIOD):
    """Ion path driven by a well program, from the moving-oscillator solution
    ``q = s - int_0^t sdot(t1) cos(w (t - t1)) dt1``.

    Analytic wells give an exact ``FROM_WELL`` trajectory.  Sampled wells use a
    Filon rule (``s`` piecewise linear, oscillatory factor integrated exactly)
    and must resolve each trap period with ``min_samples_per_period`` points.
    """
    w = well.omega
    if well.is_analytic:
        C = _convolution(well)
        pos = well.profile - C.real()
        vel = C.imag() * (-w)
        acc = C.real() * (w * w)
        return Trajectory(TrajectoryKind.FROM_WELL, well.L, well.T, position=pos, velocity=vel, acceleration=acc)

    t, s = well.t, well.values
    dt = np.diff(t)
    period = 2 * math.pi / w
    if dt.max() > period / min_samples_per_period:
        raise ValidationError(
            f"well grid too coarse: {period / dt.max():.1f} samples per trap period, "
            f"need at least {min_samples_per_period}"
        )
    phase = np.exp(1j * w * t)
    slope = np.diff(s) / dt
    panel = slope * (phase[1:] - phase[:-1]) / (1j * w)
    J = s[0] + np.concatenate([[0.0], np.cumsum(panel)])
    C = J / phase
    return make_sampled_trajectory(t, s - C.real, -w * C.imag, w * w * C.real, L=well.L)
