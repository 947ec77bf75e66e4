"""Exact piecewise exponential-polynomial functions.

Every analytic trajectory and well program in the package is a sum of terms
``P(tau) * exp(1j * nu * tau)`` on each interval, with ``tau`` measured from the
left end of the interval.  That class is closed under differentiation,
integration, products and multiplication by ``exp(1j * omega * t)``, which is
all the moving-well convolution and the oscillatory decoherence integrals need.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as P


def _trim(c):
    c = np.asarray(c, dtype=complex)
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1].copy()


class ExpPoly:
    """``f(tau) = sum_nu P_nu(tau) exp(1j nu tau)`` on a single interval.

    ``terms`` maps the angular frequency ``nu`` to ascending polynomial
    coefficients.  Values are complex; real functions carry conjugate pairs.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        for nu, coef in (terms or {}).items():
            coef = _trim(coef)
            nu = float(nu)
            if nu in out:
                out[nu] = _trim(P.polyadd(out[nu], coef))
            else:
                out[nu] = coef
        self.terms = {nu: c for nu, c in out.items() if np.any(c != 0)}

    @classmethod
    def poly(cls, coef):
        return cls({0.0: coef})

    @classmethod
    def const(cls, value):
        return cls({0.0: [value]})

    @classmethod
    def cosine(cls, nu, amplitude=1.0, phase=0.0):
        """``amplitude * cos(nu * tau + phase)``."""
        half = 0.5 * amplitude
        return cls({nu: [half * np.exp(1j * phase)], -nu: [half * np.exp(-1j * phase)]})

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = np.zeros(tau.shape, dtype=complex)
        for nu, coef in self.terms.items():
            val = P.polyval(tau, coef)
            out = out + (val if nu == 0.0 else val * np.exp(1j * nu * tau))
        return out

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.const(other)
        terms = {nu: c.copy() for nu, c in self.terms.items()}
        for nu, c in other.terms.items():
            terms[nu] = P.polyadd(terms[nu], c) if nu in terms else c
        return ExpPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({nu: -c for nu, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return ExpPoly({nu: c * other for nu, c in self.terms.items()})
        terms = {}
        for nu1, c1 in self.terms.items():
            for nu2, c2 in other.terms.items():
                nu = nu1 + nu2
                prod = P.polymul(c1, c2)
                terms[nu] = P.polyadd(terms[nu], prod) if nu in terms else prod
        return ExpPoly(terms)

    __rmul__ = __mul__

    def conj(self):
        return ExpPoly({-nu: np.conj(c) for nu, c in self.terms.items()})

    def real(self):
        return (self + self.conj()) * 0.5

    def imag(self):
        return (self - self.conj()) * (-0.5j)

    def shift_frequency(self, omega):
        """Multiply by ``exp(1j * omega * tau)``."""
        return ExpPoly({nu + omega: c for nu, c in self.terms.items()})

    def deriv(self):
        terms = {}
        for nu, c in self.terms.items():
            d = P.polyder(c) if c.size > 1 else np.zeros(1, dtype=complex)
            if nu != 0.0:
                d = P.polyadd(d, 1j * nu * c)
            terms[nu] = d
        return ExpPoly(terms)

    def _antideriv_raw(self):
        terms = {}
        for nu, c in self.terms.items():
            if nu == 0.0:
                terms[0.0] = P.polyint(c)
                continue
            acc = np.zeros(1, dtype=complex)
            dk = c
            inv = 1.0 / (1j * nu)
            fac = inv
            for k in range(c.size):
                acc = P.polyadd(acc, ((-1) ** k) * fac * dk)
                dk = P.polyder(dk) if dk.size > 1 else np.zeros(1, dtype=complex)
                fac = fac * inv
            terms[nu] = acc
        return ExpPoly(terms)

    def antideriv(self, value_at_zero=0.0):
        """Antiderivative ``F`` with ``F(0) = value_at_zero``."""
        raw = self._antideriv_raw()
        offset = value_at_zero - complex(raw(0.0))
        return raw + offset

    def integral(self, width):
        raw = self._antideriv_raw()
        return complex(raw(width) - raw(0.0))

    def reflect(self, width):
        """``g(u) = f(width - u)``."""
        terms = {}
        for nu, c in self.terms.items():
            # P(width - u) via Taylor coefficients around width
            comp = np.zeros(c.size, dtype=complex)
            dk = c
            for k in range(c.size):
                comp[k] = P.polyval(width, dk) * ((-1) ** k) / math.factorial(k)
                dk = P.polyder(dk) if dk.size > 1 else np.zeros(1, dtype=complex)
            terms[-nu] = comp * np.exp(1j * nu * width)
        return ExpPoly(terms)

    @property
    def max_frequency(self):
        return max((abs(nu) for nu in self.terms), default=0.0)

    def __repr__(self):
        return f"ExpPoly({self.terms!r})"


class Piecewise:
    """Piecewise :class:`ExpPoly` on consecutive intervals ``breaks[k]..breaks[k+1]``."""

    __slots__ = ("breaks", "pieces")

    def __init__(self, breaks, pieces):
        breaks = np.asarray(breaks, dtype=float)
        if breaks.ndim != 1 or breaks.size != len(pieces) + 1:
            raise ValueError("need len(pieces) + 1 breakpoints")
        if np.any(np.diff(breaks) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        self.breaks = breaks
        self.pieces = tuple(pieces)

    @property
    def widths(self):
        return np.diff(self.breaks)

    def _index(self, t):
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def evaluate(self, t):
        """Complex values; points outside the support use the nearest piece."""
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        idx = self._index(flat)
        out = np.empty(flat.shape, dtype=complex)
        for k, piece in enumerate(self.pieces):
            sel = idx == k
            if np.any(sel):
                out[sel] = piece(flat[sel] - self.breaks[k])
        return out.reshape(t.shape)

    def __call__(self, t):
        return self.evaluate(t).real

    def _map(self, fn):
        return Piecewise(self.breaks, [fn(p) for p in self.pieces])

    def _zip(self, other, fn):
        if not np.array_equal(self.breaks, other.breaks):
            raise ValueError("piecewise functions have different breakpoints")
        return Piecewise(self.breaks, [fn(a, b) for a, b in zip(self.pieces, other.pieces)])

    def __add__(self, other):
        if isinstance(other, Piecewise):
            return self._zip(other, lambda a, b: a + b)
        return self._map(lambda a: a + other)

    __radd__ = __add__

    def __neg__(self):
        return self._map(lambda a: -a)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Piecewise):
            return self._zip(other, lambda a, b: a * b)
        return self._map(lambda a: a * other)

    __rmul__ = __mul__

    def real(self):
        return self._map(ExpPoly.real)

    def imag(self):
        return self._map(ExpPoly.imag)

    def deriv(self):
        return self._map(ExpPoly.deriv)

    def antideriv(self, initial=0.0):
        """Continuous antiderivative equal to ``initial`` at the left end."""
        out = []
        value = complex(initial)
        for piece, w in zip(self.pieces, self.widths):
            F = piece.antideriv(value)
            out.append(F)
            value = complex(F(w))
        return Piecewise(self.breaks, out)

    def times_exp(self, omega):
        """Multiply by ``exp(1j * omega * t)`` in global time."""
        return Piecewise(
            self.breaks,
            [p.shift_frequency(omega) * np.exp(1j * omega * t0) for p, t0 in zip(self.pieces, self.breaks[:-1])],
        )

    def integral(self):
        return sum(p.integral(w) for p, w in zip(self.pieces, self.widths))

    def oscillatory_integral(self, omega):
        """Exact ``int f(t) exp(1j omega t) dt`` over the support."""
        return self.times_exp(omega).integral()

    def reflect(self):
        """``g(t) = f(a + b - t)`` on the same support ``[a, b]``."""
        a, b = self.breaks[0], self.breaks[-1]
        new_breaks = (a + b - self.breaks)[::-1]
        pieces = [p.reflect(w) for p, w in zip(self.pieces, self.widths)][::-1]
        return Piecewise(new_breaks, pieces)

    def jumps(self):
        """Value discontinuities at interior breakpoints (right minus left)."""
        out = []
        for k in range(1, len(self.pieces)):
            left = complex(self.pieces[k - 1](self.widths[k - 1]))
            right = complex(self.pieces[k](0.0))
            out.append(right - left)
        return np.array(out)

    @property
    def max_frequency(self):
        return max(p.max_frequency for p in self.pieces)
