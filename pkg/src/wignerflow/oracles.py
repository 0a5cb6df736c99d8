"""Independent reference computations used to validate the fast paths.

Nothing here shares code with :mod:`wignerflow.wigner` or the block
exponentials in :mod:`wignerflow.fock`: Wigner functions come from direct
trapezoid quadrature of the Wigner transform over position wave functions,
and beam-splitter amplitudes from the binomial expansion of the transformed
creation operators.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import trapezoid

__all__ = [
    "hermite_functions",
    "quadrature_kernel",
    "quadrature_kernels",
    "binomial_beam_splitter",
    "traced_moment_4d",
]


def hermite_functions(n_max, x):
    """Position wave functions <x|n>, n = 0..n_max, shape (n_max + 1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def _y_samples(y_max, dy):
    n = int(round(2 * y_max / dy))
    return np.linspace(-y_max, y_max, n + 1)


def quadrature_kernels(n_max, x, p, y_max=16.0, dy=0.01):
    """Wigner functions of |m><n| for all m, n <= n_max by direct quadrature.

    Evaluates (1/2pi) int dy <x - y/2|m><n|x + y/2> exp(i p y) with the
    trapezoid rule; returns shape (n_max+1, n_max+1) + x.shape.
    """
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    shape = x.shape
    xf, pf = x.ravel(), p.ravel()
    y = _y_samples(y_max, dy)
    out = np.empty((n_max + 1, n_max + 1, xf.size), dtype=complex)
    for i in range(xf.size):
        left = hermite_functions(n_max, xf[i] - 0.5 * y)
        right = hermite_functions(n_max, xf[i] + 0.5 * y)
        osc = np.exp(1j * pf[i] * y)
        integrand = left[:, None, :] * right[None, :, :] * osc
        out[:, :, i] = trapezoid(integrand, y, axis=-1) / (2 * math.pi)
    return out.reshape((n_max + 1, n_max + 1) + shape)


def quadrature_kernel(m, n, x, p, **kw):
    return quadrature_kernels(max(m, n), x, p, **kw)[m, n]


def binomial_beam_splitter(m, n, tau):
    """Output amplitudes of B|m, n> from a^dag -> t a^dag + r b^dag,
    b^dag -> -r a^dag + t b^dag.  Returns a dict {(m', n'): amplitude}."""
    half = 0.5 * math.pi * tau
    r, t = math.sin(half), math.cos(half)
    poly = {}
    for j in range(m + 1):
        cj = math.comb(m, j) * t**j * r ** (m - j)  # (t a)^j (r b)^(m-j)
        for k in range(n + 1):
            ck = math.comb(n, k) * (-r) ** k * t ** (n - k)  # (-r a)^k (t b)^(n-k)
            key = (j + k, m - j + n - k)
            poly[key] = poly.get(key, 0.0) + cj * ck
    norm = math.sqrt(math.factorial(m) * math.factorial(n))
    return {
        key: val * math.sqrt(math.factorial(key[0]) * math.factorial(key[1])) / norm
        for key, val in poly.items()
    }


def traced_moment_4d(c, traced, grid, quadrature, **kw):
    """Integrate q_traced * W_ab over the traced mode's plane on ``grid``.

    The two-mode Wigner function is built on the full grid x grid
    four-dimensional lattice from quadrature kernels and integrated with
    the trapezoid rule.  Returns an array on ``grid`` for the kept mode.
    """
    c = np.asarray(c, dtype=complex)
    d = c.shape[0]
    X, P = grid.mesh()
    K = quadrature_kernels(d - 1, X, P, **kw)  # (d, d, nx, np)
    # W_ab[i, j, k, l] = sum c[m, n] conj(c[m', n']) K[m, m'](a-point) K[n, n'](b-point)
    coef = np.einsum("mn,MN->mMnN", c, c.conj())
    flat = K.reshape(d * d, -1)
    w_ab = (flat.T @ coef.reshape(d * d, d * d) @ flat).real
    w_ab = w_ab.reshape(grid.shape + grid.shape)
    weight = X if quadrature == "x" else P
    if traced == "a":
        integrand = weight[:, :, None, None] * w_ab
        inner = trapezoid(integrand, dx=grid.dp, axis=1)
        return trapezoid(inner, dx=grid.dx, axis=0)
    integrand = weight[None, None, :, :] * w_ab
    inner = trapezoid(integrand, dx=grid.dp, axis=3)
    return trapezoid(inner, dx=grid.dx, axis=2)
