"""Wigner functions of truncated Fock-basis operators on phase-space grids.

The kernel K[m, n](x, p) is the Wigner function of |m><n| (its Weyl symbol
divided by 2 pi), so an operator O evaluates to sum_{m,n} O[m, n] K[m, n].
For m >= n, with u = x + i p and s = x**2 + p**2,

    K[m, n] = (-1)**n / pi * sqrt(n!/m!) * (sqrt(2) conj(u))**(m-n)
              * exp(-s) * L_n^(m-n)(2 s)

and K[n, m] = conj(K[m, n]).  Laguerre values come from a normalized
three-term recurrence and the power/factorial prefactor is formed in log
space, which keeps cutoffs of a few hundred free of overflow.

Every kernel factorizes into a radial part depending only on s and the
phase factor exp(-i k phi), k = m - n.  Radial parts are evaluated once per
distinct value of s on the grid (symmetric grids have roughly eight grid
points per distinct s) and the angular sum is done by Horner's rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import gammaln

from .fock import DensityOperator

__all__ = [
    "PhaseSpaceGrid",
    "ScalarField",
    "KernelTable",
    "kernel_table",
    "kernel",
    "weyl_field",
    "weyl_fields",
    "wigner",
    "marginal",
    "default_grid",
]

WIGNER = "wigner-distribution"
WEYL = "weyl-symbol"
DIVERGENCE = "divergence"
RESIDUAL = "residual"
MEANINGS = (WIGNER, WEYL, DIVERGENCE, RESIDUAL)

HERMITIAN_TOL = 1e-10
_CHUNK = 16384


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform rectangular lattice over [x_min, x_max] x [p_min, p_max].

    Arrays sampled on the grid are indexed ``[i, j]`` for the point
    ``(x[i], p[j])``.
    """

    x_min: float = -6.0
    x_max: float = 6.0
    p_min: float = -6.0
    p_max: float = 6.0
    nx: int = 241
    np_: int = 241

    def __post_init__(self):
        for name in ("x_min", "x_max", "p_min", "p_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("nx", "np_"):
            val = getattr(self, name)
            if int(val) != val:
                raise ValueError(f"{name} must be an integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        if self.nx < 2 or self.np_ < 2:
            raise ValueError("grid needs at least two points per axis")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid extents must be increasing")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.np_ - 1)

    @property
    def shape(self):
        return (self.nx, self.np_)

    @property
    def x(self) -> np.ndarray:
        # Offsets from the centre keep symmetric grids exactly symmetric.
        centre = 0.5 * (self.x_min + self.x_max)
        return centre + (np.arange(self.nx) - 0.5 * (self.nx - 1)) * self.dx

    @property
    def p(self) -> np.ndarray:
        centre = 0.5 * (self.p_min + self.p_max)
        return centre + (np.arange(self.np_) - 0.5 * (self.np_ - 1)) * self.dp

    def mesh(self):
        return np.meshgrid(self.x, self.p, indexing="ij")

    def refined(self, factor=2):
        """Same window with the spacing divided by ``factor``."""
        return PhaseSpaceGrid(
            self.x_min, self.x_max, self.p_min, self.p_max,
            (self.nx - 1) * factor + 1, (self.np_ - 1) * factor + 1,
        )

    def contains(self, x, p) -> bool:
        return self.x_min <= x <= self.x_max and self.p_min <= p <= self.p_max

    def to_dict(self):
        return {
            "x_min": self.x_min, "x_max": self.x_max,
            "p_min": self.p_min, "p_max": self.p_max,
            "nx": self.nx, "np": self.np_,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "np" in d:
            d["np_"] = d.pop("np")
        return cls(**d)


def default_grid():
    return PhaseSpaceGrid()


@dataclass(frozen=True)
class ScalarField:
    grid: PhaseSpaceGrid
    values: np.ndarray
    meaning: str = WEYL
    tau: float | None = None
    mode: str | None = None

    def __post_init__(self):
        if self.meaning not in MEANINGS:
            raise ValueError(f"unknown field meaning {self.meaning!r}")
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, dx=self.grid.dp, axis=1), dx=self.grid.dx))

    def at_origin(self) -> float:
        """Value at the grid node nearest (0, 0)."""
        i = int(np.argmin(np.abs(self.grid.x)))
        j = int(np.argmin(np.abs(self.grid.p)))
        return float(self.values[i, j])


def _prefactor(k, s):
    """(2 s)**(k/2) / sqrt(k!) * exp(-s), formed in log space."""
    if k == 0:
        return np.exp(-s)
    out = np.zeros_like(s)
    pos = s > 0
    sp = s[pos]
    out[pos] = np.exp(0.5 * k * np.log(2.0 * sp) - 0.5 * gammaln(k + 1) - sp)
    return out


def _radial_rows(k, n_max, s):
    """Radial kernel parts R[n] for K[n + k, n], n = 0..n_max.

    Returns an array of shape (n_max + 1,) + s.shape.
    """
    s = np.asarray(s, dtype=float)
    rows = np.empty((n_max + 1,) + s.shape)
    if n_max < 0:
        return rows
    x2 = 2.0 * s
    h_prev = np.ones_like(s)
    rows[0] = h_prev
    if n_max >= 1:
        h = (1.0 + k - x2) / math.sqrt(k + 1.0)
        rows[1] = h
        for n in range(1, n_max):
            h_next = ((2 * n + k + 1 - x2) * h - math.sqrt(n * (n + k)) * h_prev) / math.sqrt(
                (n + 1) * (n + k + 1)
            )
            rows[n + 1] = h_next
            h_prev, h = h, h_next
    sign = np.where(np.arange(n_max + 1) % 2 == 0, 1.0, -1.0) / math.pi
    rows *= sign.reshape((-1,) + (1,) * s.ndim)
    rows *= _prefactor(k, s)
    return rows


def kernel(m, n, x, p):
    """Wigner function of the Fock-basis operator |m><n| at (x, p).

    ``x`` and ``p`` may be scalars or broadcastable arrays.
    """
    if int(m) != m or int(n) != n or m < 0 or n < 0:
        raise ValueError(f"Fock indices must be non-negative integers, got ({m}, {n})")
    m, n = int(m), int(n)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    hi, lo = max(m, n), min(m, n)
    k = hi - lo
    s = x * x + p * p
    radial = _radial_rows(k, lo, s)[lo]
    if k:
        r = np.sqrt(s)
        with np.errstate(invalid="ignore", divide="ignore"):
            phase = np.where(r > 0, (x - 1j * p) / np.where(r > 0, r, 1.0), 1.0)
        val = radial * phase**k
    else:
        val = radial.astype(complex)
    if m < n:
        val = np.conj(val)
    return val[()] if val.ndim == 0 else val


class KernelTable:
    """Kernels K[m, n] for m, n <= n_max sampled on one grid.

    Radial parts are kept in memory when they fit into ``budget_bytes``;
    otherwise they are recomputed on every evaluation.  Instances are
    read-only after construction.
    """

    def __init__(self, grid, n_max, budget_bytes=100 * 2**20):
        if int(n_max) != n_max or n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {n_max!r}")
        self.grid = grid
        self.n_max = int(n_max)
        X, P = grid.mesh()
        s = (X * X + P * P).ravel()
        self.s_unique, self.inverse = np.unique(s, return_inverse=True)
        r = np.sqrt(s)
        safe = np.where(r > 0, r, 1.0)
        self.phase = np.where(r > 0, (X.ravel() - 1j * P.ravel()) / safe, 1.0)
        dim = self.n_max + 1
        n_entries = dim * (dim + 1) // 2 * self.s_unique.size
        self.cached = n_entries * 8 <= budget_bytes
        self._radial = None
        if self.cached:
            self._radial = [self._compute_radial(k) for k in range(dim)]
            for arr in self._radial:
                arr.setflags(write=False)

    @property
    def dim(self):
        return self.n_max + 1

    def _compute_radial(self, k, chunk=None):
        s = self.s_unique if chunk is None else self.s_unique[chunk]
        return _radial_rows(k, self.n_max - k, s)

    def radial(self, k, chunk=None):
        if self._radial is not None:
            arr = self._radial[k]
            return arr if chunk is None else arr[:, chunk]
        return self._compute_radial(k, chunk)

    def kernel(self, m, n):
        """K[m, n] on the grid as a complex (nx, np) array."""
        if not (0 <= m <= self.n_max and 0 <= n <= self.n_max):
            raise IndexError(f"({m}, {n}) outside cutoff {self.n_max}")
        hi, lo = max(m, n), min(m, n)
        k = hi - lo
        vals = self.radial(k)[lo][self.inverse] * self.phase**k
        if m < n:
            vals = np.conj(vals)
        return vals.reshape(self.grid.shape)

    def evaluate(self, ops):
        """Real Wigner transforms of a stack of Hermitian matrices.

        ``ops`` has shape (F, d, d) with d <= n_max + 1; returns (F, nx, np).
        """
        ops = np.asarray(ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        nf, d, _ = ops.shape
        if d > self.dim:
            raise ValueError(f"operator dimension {d} exceeds kernel cutoff {self.n_max}")
        nu = self.s_unique.size
        chunks = [slice(i, min(i + _CHUNK, nu)) for i in range(0, nu, _CHUNK)]
        acc = np.zeros((nf, self.phase.size), dtype=complex)
        result = None
        for k in range(d - 1, -1, -1):
            n_rows = d - k
            coef = np.stack([np.diagonal(op, offset=-k) for op in ops])  # op[n + k, n]
            if not np.any(coef):
                a_k = None
            else:
                a_k = np.empty((nf, nu), dtype=complex)
                for ch in chunks:
                    rad = self.radial(k, ch)[:n_rows]
                    a_k[:, ch] = coef.real @ rad + 1j * (coef.imag @ rad)
            if k == 0:
                # acc = sum_{k>=1} A_k z**(k-1)
                base = np.zeros((nf, self.phase.size)) if a_k is None else a_k.real[:, self.inverse]
                result = base + 2.0 * np.real(acc * self.phase)
            else:
                acc *= self.phase
                if a_k is not None:
                    acc += a_k[:, self.inverse]
        return result.reshape((nf,) + self.grid.shape)


@lru_cache(maxsize=8)
def kernel_table(grid, n_max):
    """Shared kernel table per (grid, cutoff); grids compare by value."""
    return KernelTable(grid, n_max)


def _as_matrix(op):
    if isinstance(op, DensityOperator):
        return op.rho
    return np.asarray(op, dtype=complex)


def weyl_fields(ops, grid):
    """Evaluate several Hermitian operators on ``grid`` in one pass.

    Sharing the pass matters because the Laguerre recurrences dominate the
    cost and depend only on the grid and the cutoff.
    """
    mats = [_as_matrix(op) for op in ops]
    dim = max(m.shape[0] for m in mats)
    stack = np.zeros((len(mats), dim, dim), dtype=complex)
    for i, m in enumerate(mats):
        err = float(np.max(np.abs(m - m.conj().T), initial=0.0))
        if err > HERMITIAN_TOL:
            raise ValueError(f"operator {i} is not Hermitian (error {err:.3g})")
        stack[i, : m.shape[0], : m.shape[0]] = m
    return kernel_table(grid, dim - 1).evaluate(stack)


def weyl_field(op, grid, meaning=WEYL, tau=None, mode=None):
    """Wigner transform of a Hermitian operator as a :class:`ScalarField`.

    Raises
    ------
    ValueError
        If ``op`` deviates from Hermiticity by more than 1e-10.
    """
    values = weyl_fields([op], grid)[0]
    return ScalarField(grid, values, meaning, tau, mode)


def wigner(rho, grid, tau=None, mode=None):
    """Wigner distribution of a density matrix."""
    return weyl_field(rho, grid, WIGNER, tau, mode)


def marginal(field, axis):
    """Integrate out the conjugate variable: axis 'x' gives P(x), 'p' gives P(p)."""
    if field.meaning != WIGNER:
        raise ValueError("marginals are defined for Wigner distributions only")
    g = field.grid
    if axis == "x":
        return trapezoid(field.values, dx=g.dp, axis=1)
    if axis == "p":
        return trapezoid(field.values, dx=g.dx, axis=0)
    raise ValueError(f"axis must be 'x' or 'p', got {axis!r}")
