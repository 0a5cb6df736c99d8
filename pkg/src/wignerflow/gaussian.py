"""Closed-form moments, Wigner functions and currents for Gaussian inputs.

Phase-space ordering is (x_a, p_a, x_b, p_b).  The beam splitter is the
linear symplectic map rotating (x_a, x_b) and (p_a, p_b) by the same angle
pi tau / 2, so Gaussian states stay Gaussian and this module provides an
independent route to the quantities computed in the Fock basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .current import HALF_PI, VectorField
from .wigner import WIGNER, ScalarField

__all__ = [
    "GaussianMoments",
    "symplectic_form",
    "single_mode_coherent",
    "single_mode_squeezed",
    "product_moments",
    "beam_splitter_symplectic",
    "evolve_moments",
    "reduced_block",
    "reduced_wigner",
    "reduced_current",
    "reduced_purity",
]

_SLICES = {"a": slice(0, 2), "b": slice(2, 4)}


def symplectic_form(n_modes=2):
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


@dataclass(frozen=True)
class GaussianMoments:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(4)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (4, 4):
            raise ValueError(f"covariance must be 4x4, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise ValueError("covariance is not positive definite")
        nu = symplectic_eigenvalues(cov)
        if nu.min() < 0.5 - 1e-10:
            raise ValueError(f"uncertainty principle violated (symplectic eigenvalue {nu.min():.6g})")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)


def symplectic_eigenvalues(cov):
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    return np.sort(np.abs(ev))[::2]


def single_mode_coherent(alpha):
    """(mean, cov) of |alpha>: centred at sqrt(2) (Re alpha, Im alpha)."""
    alpha = complex(alpha)
    return np.array([math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag]), 0.5 * np.eye(2)


def single_mode_squeezed(z, theta):
    """(mean, cov) of the squeezed vacuum with zeta = z exp(i theta).

    The quadrature along angle theta/2 has variance exp(-2 z)/2.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    rot = np.array([[c, -s], [s, c]])
    cov = 0.5 * rot @ np.diag([math.exp(-2 * z), math.exp(2 * z)]) @ rot.T
    return np.zeros(2), cov


def product_moments(a, b):
    """Joint moments of an unentangled pair of single-mode Gaussians."""
    (ma, ca), (mb, cb) = a, b
    cov = np.zeros((4, 4))
    cov[:2, :2] = ca
    cov[2:, 2:] = cb
    return GaussianMoments(np.concatenate([ma, mb]), cov)


def beam_splitter_symplectic(tau):
    half = 0.5 * math.pi * float(tau)
    c, s = math.cos(half), math.sin(half)
    return np.array(
        [
            [c, 0.0, -s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, s, 0.0, c],
        ]
    )


def evolve_moments(g, tau):
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    S = beam_splitter_symplectic(tau)
    return GaussianMoments(S @ g.mean, S @ g.cov @ S.T)


def reduced_block(g, mode):
    sl = _SLICES[mode]
    return g.mean[sl], g.cov[sl, sl]


def _gaussian_on_grid(mean, cov, grid):
    X, P = grid.mesh()
    d = np.stack([X - mean[0], P - mean[1]], axis=-1)
    inv = np.linalg.inv(cov)
    quad = np.einsum("...i,ij,...j->...", d, inv, d)
    return np.exp(-0.5 * quad) / (2 * math.pi * math.sqrt(np.linalg.det(cov))), d, inv


def reduced_wigner(g, mode, grid, tau=None):
    mean, cov = reduced_block(g, mode)
    w, _, _ = _gaussian_on_grid(mean, cov, grid)
    return ScalarField(grid, w, WIGNER, tau, mode)


def reduced_current(g, mode, grid, tau=None):
    """J = sign (pi/2) E[(x_o, p_o) | kept point] W, sign + for b and - for a.

    The conditional mean of the partner's quadratures is affine in the kept
    mode's phase-space point: m_o + C Sigma^-1 (xi - m_k), with C the
    cross-covariance between partner and kept mode.
    """
    other = "a" if mode == "b" else "b"
    sign = HALF_PI if mode == "b" else -HALF_PI
    mean_k, cov_k = reduced_block(g, mode)
    mean_o = g.mean[_SLICES[other]]
    cross = g.cov[_SLICES[other], _SLICES[mode]]
    w, d, inv = _gaussian_on_grid(mean_k, cov_k, grid)
    cond = mean_o + np.einsum("ij,jk,...k->...i", cross, inv, d)
    return VectorField(grid, sign * cond[..., 0] * w, sign * cond[..., 1] * w, mode, tau)


def reduced_purity(g, mode):
    _, cov = reduced_block(g, mode)
    return 1.0 / (2.0 * math.sqrt(np.linalg.det(cov)))
