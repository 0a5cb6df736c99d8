"""Truncated Fock-basis states and exact beam-splitter evolution.

Conventions used throughout the package: hbar = 1, x = (a + a^dag)/sqrt(2),
p = (a - a^dag)/(i sqrt(2)).  A coherent state |alpha> is centred at
(x, p) = (sqrt(2) Re alpha, sqrt(2) Im alpha).

The mixer parameter ``tau`` in [0, 1] sets the reflection amplitude
r = sin(pi tau / 2) and transmission amplitude t = cos(pi tau / 2).  The
beam-splitter unitary is B = exp[(pi tau / 2)(a b^dag - a^dag b)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln
from scipy.stats import poisson

__all__ = [
    "DEFAULT_LEAKAGE_BOUND",
    "TruncationError",
    "FockVector",
    "TwoModeAmplitudes",
    "DensityOperator",
    "mixer_amplitudes",
    "reflectivity_to_tau",
    "tau_to_reflectivity",
    "make_fock",
    "make_coherent",
    "make_squeezed_vacuum",
    "product_state",
    "apply_beam_splitter",
    "beam_splitter_block",
    "reduce",
    "traced_moment",
    "quadrature_matrices",
    "mean_quadratures",
]

DEFAULT_LEAKAGE_BOUND = 1e-8
MODES = ("a", "b")


class TruncationError(ValueError):
    """A state cannot be represented below the configured leakage bound."""

    def __init__(self, message, leakage=None, required_cutoff=None):
        super().__init__(message)
        self.leakage = leakage
        self.required_cutoff = required_cutoff


@dataclass(frozen=True)
class FockVector:
    """Normalized single-mode pure state in the basis |0>, ..., |n_max>.

    ``leakage`` is the probability the untruncated state carries above
    ``n_max``; the stored amplitudes are renormalized.
    """

    amplitudes: np.ndarray
    leakage: float = 0.0
    label: str = ""

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-D array")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"FockVector not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.dim), np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class TwoModeAmplitudes:
    """Two-mode pure state c[m, n] = <m|_a <n|_b |psi>.

    Both axes have length ``n_total + 1`` and every amplitude with
    m + n > n_total vanishes, so each total-photon-number block
    N = 0..n_total is complete and beam-splitter evolution is exact.
    """

    c: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"amplitude matrix must be square, got {c.shape}")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"TwoModeAmplitudes not normalized (norm={norm!r})")
        m, n = np.indices(c.shape)
        if np.any(c[m + n > c.shape[0] - 1] != 0):
            raise ValueError("amplitudes above the total photon number cutoff")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n_total(self) -> int:
        return self.c.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.c))

    def block(self, n: int) -> np.ndarray:
        """Amplitudes c[m, N - m] for m = 0..N."""
        m = np.arange(n + 1)
        return self.c[m, n - m]


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian matrix in a truncated Fock basis (reduced state or traced moment)."""

    rho: np.ndarray
    hermitian_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"operator must be a square matrix, got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T), initial=0.0))

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_error <= self.hermitian_tol

    def trace(self) -> complex:
        return complex(np.trace(self.rho))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.rho, self.rho)))

    def eigenvalues(self) -> np.ndarray:
        h = 0.5 * (self.rho + self.rho.conj().T)
        return np.linalg.eigvalsh(h)

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho)).copy()

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.dim), self.populations()))

    def entropy(self) -> float:
        """Von Neumann entropy in nats."""
        lam = self.eigenvalues()
        lam = lam[lam > 1e-15]
        return float(-np.sum(lam * np.log(lam)))

    def check_state(self, trace_tol=1e-10, eig_tol=1e-10):
        """Raise ``ValueError`` unless this is a valid density matrix."""
        if not self.hermitian:
            raise ValueError(f"not Hermitian (error {self.hermiticity_error:.3g})")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} differs from 1")
        lam_min = self.eigenvalues()[0]
        if lam_min < -eig_tol:
            raise ValueError(f"negative eigenvalue {lam_min:.3g}")
        return self


def _check_tau(tau):
    tau = float(tau)
    if not (0.0 <= tau <= 1.0) or math.isnan(tau):
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    return tau


def mixer_amplitudes(tau):
    """Return (r, t) = (sin(pi tau/2), cos(pi tau/2))."""
    tau = _check_tau(tau)
    half = 0.5 * math.pi * tau
    return math.sin(half), math.cos(half)


def reflectivity_to_tau(reflectivity):
    """Intensity reflectivity R = r**2 to mixer parameter tau = (2/pi) asin(sqrt(R))."""
    reflectivity = float(reflectivity)
    if not 0.0 <= reflectivity <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {reflectivity!r}")
    return 2.0 / math.pi * math.asin(math.sqrt(reflectivity))


def tau_to_reflectivity(tau):
    r, _ = mixer_amplitudes(tau)
    return r * r


def _check_cutoff(cutoff):
    if int(cutoff) != cutoff or cutoff < 0:
        raise ValueError(f"cutoff must be a non-negative integer, got {cutoff!r}")
    return int(cutoff)


def make_fock(n, cutoff):
    """Number state |n> in a basis truncated at ``cutoff``."""
    cutoff = _check_cutoff(cutoff)
    if int(n) != n or n < 0:
        raise ValueError(f"photon number must be a non-negative integer, got {n!r}")
    if n > cutoff:
        raise TruncationError(
            f"|{n}> not representable with cutoff {cutoff}", leakage=1.0, required_cutoff=int(n)
        )
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[int(n)] = 1.0
    return FockVector(amps, 0.0, label=f"|{int(n)}>")


def _required_cutoff(tail, bound, start):
    n = start
    while tail(n) > bound:
        n += max(1, n // 8)
    return n


def make_coherent(alpha, cutoff, leakage_bound=DEFAULT_LEAKAGE_BOUND):
    """Coherent state exp(alpha a^dag - alpha* a)|0>, truncated and renormalized.

    Raises
    ------
    TruncationError
        If the Poisson tail above ``cutoff`` exceeds ``leakage_bound``.
    """
    cutoff = _check_cutoff(cutoff)
    alpha = complex(alpha)
    mean = abs(alpha) ** 2
    leakage = float(poisson.sf(cutoff, mean)) if mean > 0 else 0.0
    if leakage > leakage_bound:
        need = _required_cutoff(lambda n: poisson.sf(n, mean), leakage_bound, cutoff)
        raise TruncationError(
            f"coherent state alpha={alpha} leaks {leakage:.3g} above cutoff {cutoff}; "
            f"use cutoff >= {need}",
            leakage=leakage,
            required_cutoff=need,
        )
    n = np.arange(cutoff + 1)
    if mean == 0:
        amps = (n == 0).astype(complex)
    else:
        log_mag = -0.5 * mean + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        amps = np.exp(log_mag + 1j * n * np.angle(alpha))
    amps /= np.linalg.norm(amps)
    return FockVector(amps, leakage, label=f"|alpha={alpha:.6g}>")


def _squeezed_log_probs(z, kmax):
    k = np.arange(kmax + 1)
    t = math.tanh(z)
    return (
        gammaln(2 * k + 1)
        - 2 * gammaln(k + 1)
        - 2 * k * math.log(2.0)
        + 2 * k * math.log(t)
        - math.log(math.cosh(z))
    )


def _squeezed_tail(z, cutoff):
    if z == 0:
        return 0.0
    kmax = cutoff // 2
    head = math.fsum(np.exp(_squeezed_log_probs(z, kmax)))
    return max(0.0, 1.0 - head)


def make_squeezed_vacuum(z, theta, cutoff, leakage_bound=DEFAULT_LEAKAGE_BOUND):
    """Squeezed vacuum exp[(zeta* a^2 - zeta a^dag^2)/2]|0> with zeta = z e^{i theta}.

    Only even photon numbers are populated.  For theta = 0 the x quadrature is
    squeezed (variance e^{-2z}/2).
    """
    cutoff = _check_cutoff(cutoff)
    z = float(z)
    if z < 0:
        raise ValueError(f"squeezing magnitude must be >= 0, got {z!r}")
    leakage = _squeezed_tail(z, cutoff)
    if leakage > leakage_bound:
        need = _required_cutoff(lambda n: _squeezed_tail(z, n), leakage_bound, cutoff)
        raise TruncationError(
            f"squeezed vacuum z={z} leaks {leakage:.3g} above cutoff {cutoff}; "
            f"use cutoff >= {need}",
            leakage=leakage,
            required_cutoff=need,
        )
    amps = np.zeros(cutoff + 1, dtype=complex)
    if z == 0:
        amps[0] = 1.0
    else:
        k = np.arange(cutoff // 2 + 1)
        log_mag = 0.5 * _squeezed_log_probs(z, cutoff // 2)
        phase = np.exp(1j * k * (theta + math.pi))  # (-e^{i theta})^k
        amps[2 * k] = np.exp(log_mag) * phase
    amps /= np.linalg.norm(amps)
    return FockVector(amps, leakage, label=f"|z={z:g},theta={theta:g}>")


def product_state(a, b, n_total=None):
    """Two-mode product |a>|b>, embedded in the space m + n <= n_total.

    By default ``n_total = a.cutoff + b.cutoff`` so nothing is dropped.  A
    smaller value discards the high-photon-number blocks and records their
    probability as leakage.
    """
    full = a.cutoff + b.cutoff
    if n_total is None:
        n_total = full
    n_total = _check_cutoff(n_total)
    c = np.zeros((n_total + 1, n_total + 1), dtype=complex)
    ma = min(a.dim, n_total + 1)
    mb = min(b.dim, n_total + 1)
    c[:ma, :mb] = np.outer(a.amplitudes[:ma], b.amplitudes[:mb])
    m, n = np.indices(c.shape)
    c[m + n > n_total] = 0.0
    kept = np.linalg.norm(c)
    dropped = max(0.0, 1.0 - kept**2)
    if kept == 0:
        raise TruncationError("product state has no weight below n_total", leakage=1.0)
    c /= kept
    leakage = 1.0 - (1.0 - a.leakage) * (1.0 - b.leakage) * (1.0 - dropped)
    return TwoModeAmplitudes(c, leakage)


@lru_cache(maxsize=1024)
def _block_eigensystem(n):
    # i*G_N = U T U^dag with U = diag((-i)^m) and T real symmetric tridiagonal,
    # G_N the restriction of (a b^dag - a^dag b) to the block m + n = N.
    m = np.arange(1, n + 1)
    off = np.sqrt(m * (n - m + 1.0))
    if n == 0:
        return np.zeros(1), np.ones((1, 1))
    lam, vec = eigh_tridiagonal(np.zeros(n + 1), off)
    exact = np.arange(-n, n + 1, 2, dtype=float)
    if np.max(np.abs(lam - exact)) > 1e-8 * max(1, n):
        raise RuntimeError(f"unexpected generator spectrum in block {n}")
    lam = exact
    vec.setflags(write=False)
    return lam, vec


def beam_splitter_block(n, tau):
    """Unitary matrix of B(pi tau) on the block span{|m, n-m>, m = 0..n}."""
    tau = _check_tau(tau)
    lam, vec = _block_eigensystem(int(n))
    angle = 0.5 * math.pi * tau
    u = (-1j) ** np.arange(n + 1)
    rot = (vec * np.exp(-1j * angle * lam)) @ vec.T
    return (u[:, None] * rot) * u.conj()[None, :]


def apply_beam_splitter(psi, tau):
    """Evolve a two-mode state through the variable beam splitter."""
    tau = _check_tau(tau)
    if tau == 0.0:
        return psi
    out = np.zeros_like(psi.c)
    for n in range(psi.n_total + 1):
        m = np.arange(n + 1)
        v = psi.c[m, n - m]
        if not np.any(v):
            continue
        out[m, n - m] = beam_splitter_block(n, tau) @ v
    return TwoModeAmplitudes(out, psi.leakage)


@lru_cache(maxsize=64)
def quadrature_matrices(dim):
    """Matrices <m'|x|m> and <m'|p|m> truncated to ``dim`` levels."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    x = (a + a.T) / math.sqrt(2.0)
    p = (a - a.T) / (1j * math.sqrt(2.0))
    x.setflags(write=False)
    p.setflags(write=False)
    return x, p


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    return mode


def reduce(psi, keep):
    """Reduced density matrix of mode ``keep`` ('a' or 'b')."""
    c = psi.c
    if _check_mode(keep) == "b":
        rho = c.T @ c.conj()
    else:
        rho = c @ c.conj().T
    return DensityOperator(rho)


def traced_moment(psi, traced, quadrature):
    """Operator Tr_traced{q_traced rho} acting on the other mode.

    Its Wigner function equals the phase-space integral of q times the
    two-mode Wigner function over the traced mode.
    """
    _check_mode(traced)
    if quadrature not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    xq, pq = quadrature_matrices(psi.dim)
    q = xq if quadrature == "x" else pq
    c = psi.c
    if traced == "a":
        op = (q @ c).T @ c.conj()
    else:
        op = c @ q.T @ c.conj().T
    return DensityOperator(op)


def mean_quadratures(state, mode=None):
    """<x>, <p> of a FockVector, or of one mode of a TwoModeAmplitudes."""
    if isinstance(state, FockVector):
        xq, pq = quadrature_matrices(state.dim)
        v = state.amplitudes
        return float(np.real(v.conj() @ xq @ v)), float(np.real(v.conj() @ pq @ v))
    rho = reduce(state, mode).rho
    xq, pq = quadrature_matrices(rho.shape[0])
    return float(np.real(np.trace(xq @ rho))), float(np.real(np.trace(pq @ rho)))
