"""Composite Gauss-Legendre and sample-based quadrature with error estimates."""

import math

import numpy as np
from scipy.integrate import simpson

from .errors import ConvergenceError


def gauss_legendre(f, a, b, *, order=16, panels=4, rtol=1e-9, atol=0.0, max_panels=1 << 18):
    """Integrate ``f`` over ``[a, b]`` on uniform panels, halving until converged.

    The error estimate is ``|I(2n) - I(n)|``, which bounds the error of the
    coarser sum and is therefore conservative for the returned finer one.
    Returns ``(value, error_estimate)``.
    """
    x, w = np.polynomial.legendre.leggauss(order)

    def composite(n):
        edges = np.linspace(a, b, n + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = mid[:, None] + half[:, None] * x[None, :]
        vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
        return float(np.sum(half * (vals @ w)))

    n = max(1, int(panels))
    coarse = composite(n)
    while True:
        fine = composite(2 * n)
        err = abs(fine - coarse)
        if err <= max(rtol * abs(fine), atol):
            return fine, err
        n *= 2
        if 2 * n > max_panels:
            raise ConvergenceError(
                f"Gauss-Legendre did not converge on [{a}, {b}]: error estimate {err:.3e}",
                achieved=err,
            )
        coarse = fine


def sampled_integral(t, y):
    """Simpson integral of samples with a Richardson estimate from the half grid."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    fine = float(simpson(y, x=t))
    idx = np.arange(0, t.size, 2)
    if idx[-1] != t.size - 1:
        idx = np.append(idx, t.size - 1)
    coarse = float(simpson(y[idx], x=t[idx]))
    return fine, abs(fine - coarse) / 15.0


def panels_for(max_frequency, width, per_period=2, minimum=4):
    """Initial panel count resolving the fastest oscillation."""
    periods = max_frequency * width / (2 * math.pi)
    return max(minimum, int(math.ceil(per_period * periods)))
