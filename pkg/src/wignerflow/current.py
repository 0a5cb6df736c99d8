"""Traced Wigner currents of the two beam-splitter modes.

For H = (pi/2)(x_a p_b - p_a x_b) the current of mode b after tracing out
mode a is

    J_b(x_b, p_b) = +(pi/2) * (int x_a W_ab, int p_a W_ab)   (over a's plane)

and J_a carries the opposite sign with the roles of a and b exchanged.  The
integrals are the Wigner functions of Tr_a{x_a rho} and Tr_a{p_a rho}, which
are evaluated exactly in the truncated Fock basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .fock import reduce, traced_moment
from .wigner import DIVERGENCE, RESIDUAL, WIGNER, PhaseSpaceGrid, ScalarField, weyl_fields

__all__ = [
    "VectorField",
    "VelocityField",
    "ContinuityResidual",
    "RadialProfile",
    "InversionReport",
    "current_operators",
    "current",
    "wigner_and_current",
    "divergence",
    "continuity_residual",
    "velocity",
    "zero_cells",
    "closed_contour",
    "radial_component",
    "tangential_component",
    "radial_profile",
    "inversion_detect",
]

HALF_PI = 0.5 * math.pi
DEFAULT_W_THRESHOLD = 1e-4  # relative to max |W|
DEFAULT_J_FLOOR = 1e-3  # relative to max |J|


@dataclass(frozen=True)
class VectorField:
    grid: PhaseSpaceGrid
    jx: np.ndarray
    jp: np.ndarray
    mode: str | None = None
    tau: float | None = None

    def __post_init__(self):
        for name in ("jx", "jp"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.grid.shape:
                raise ValueError(f"{name} shape {arr.shape} does not match grid {self.grid.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)

    def magnitude(self):
        return np.hypot(self.jx, self.jp)

    def scaled(self, factor):
        return VectorField(self.grid, factor * self.jx, factor * self.jp, self.mode, self.tau)


@dataclass(frozen=True)
class VelocityField:
    """w = J / W on the nodes where |W| >= threshold (``valid``).

    ``singular_cells`` lists (i, j) indices of grid cells spanned by nodes
    i, i+1 and j, j+1 that contain a zero of W while |J| exceeds ``j_floor``.
    """

    grid: PhaseSpaceGrid
    wx: np.ndarray
    wp: np.ndarray
    valid: np.ndarray
    threshold: float
    j_floor: float
    singular_cells: np.ndarray = field(repr=False)
    mode: str | None = None
    tau: float | None = None

    def singular_mask(self):
        mask = np.zeros((self.grid.nx - 1, self.grid.np_ - 1), dtype=bool)
        if len(self.singular_cells):
            mask[self.singular_cells[:, 0], self.singular_cells[:, 1]] = True
        return mask


@dataclass(frozen=True)
class ContinuityResidual:
    field: ScalarField
    max_abs: float
    l2: float
    rate_scale: float
    tau: float
    dtau: float
    mode: str


def current_operators(psi, mode):
    """Operators whose Wigner functions give (J_x, J_p) of ``mode``."""
    if mode == "b":
        sign, traced = HALF_PI, "a"
    elif mode == "a":
        sign, traced = -HALF_PI, "b"
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    ox = traced_moment(psi, traced, "x").rho
    op = traced_moment(psi, traced, "p").rho
    return sign * ox, sign * op


def current(psi, mode, grid, tau=None):
    """Traced Wigner current of ``mode`` for the (already evolved) state ``psi``."""
    jx, jp = weyl_fields(current_operators(psi, mode), grid)
    return VectorField(grid, jx, jp, mode, tau)


def wigner_and_current(psi, mode, grid, tau=None):
    """Reduced Wigner distribution and current of ``mode`` in one kernel pass."""
    rho = reduce(psi, mode).rho
    ox, op = current_operators(psi, mode)
    w, jx, jp = weyl_fields([rho, ox, op], grid)
    return ScalarField(grid, w, WIGNER, tau, mode), VectorField(grid, jx, jp, mode, tau)


def divergence(field):
    """Second-order finite-difference divergence (one-sided second order at edges)."""
    g = field.grid
    if g.nx < 3 or g.np_ < 3:
        raise ValueError("divergence needs at least three points per axis")
    div = np.gradient(field.jx, g.dx, axis=0, edge_order=2)
    div += np.gradient(field.jp, g.dp, axis=1, edge_order=2)
    return ScalarField(g, div, DIVERGENCE, field.tau, field.mode)


def continuity_residual(psi_fn, mode, grid, tau, dtau):
    """Pointwise residual dW/dtau + div J of the mode's continuity equation.

    ``psi_fn`` maps tau to the evolved two-mode state.  dW/dtau is a central
    difference over [tau - dtau, tau + dtau].
    """
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    if tau - dtau < 0 or tau + dtau > 1:
        raise ValueError(f"tau +- dtau = [{tau - dtau}, {tau + dtau}] leaves [0, 1]")
    psi_lo, psi_mid, psi_hi = psi_fn(tau - dtau), psi_fn(tau), psi_fn(tau + dtau)
    ox, op = current_operators(psi_mid, mode)
    w_lo, w_hi, jx, jp = weyl_fields(
        [reduce(psi_lo, mode).rho, reduce(psi_hi, mode).rho, ox, op], grid
    )
    rate = (w_hi - w_lo) / (2.0 * dtau)
    div = divergence(VectorField(grid, jx, jp, mode, tau)).values
    res = rate + div
    l2 = math.sqrt(float(np.sum(res * res)) * grid.dx * grid.dp)
    return ContinuityResidual(
        ScalarField(grid, res, RESIDUAL, tau, mode),
        float(np.max(np.abs(res))),
        l2,
        float(np.max(np.abs(rate))),
        float(tau),
        float(dtau),
        mode,
    )


def _cell_corners(a):
    return np.stack([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])


def zero_cells(w_field, j_field, w_threshold, j_floor):
    """Cells containing a zero of W (sign change or a corner below
    ``w_threshold``) whose mean corner |J| exceeds ``j_floor``."""
    wc = _cell_corners(w_field.values)
    has_zero = (wc.min(axis=0) <= 0) & (wc.max(axis=0) >= 0)
    has_zero |= np.abs(wc).min(axis=0) < w_threshold
    jmag = _cell_corners(j_field.magnitude()).mean(axis=0)
    return has_zero & (jmag > j_floor)


def closed_contour(cells):
    """True if the flagged cells enclose a region not touching the grid edge."""
    cells = np.asarray(cells, dtype=bool)
    if not cells.any():
        return False
    labels, count = ndimage.label(~cells)
    if count == 0:
        return False
    edge = np.unique(
        np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    )
    inner = set(range(1, count + 1)) - set(edge.tolist())
    return bool(inner)


def velocity(field, w_field, threshold=None, j_floor=None):
    """Phase-space velocity w = J / W, masked where |W| < threshold.

    ``threshold`` and ``j_floor`` are absolute; by default they are 1e-4 of
    max |W| and 1e-3 of max |J| respectively.
    """
    if field.grid != w_field.grid:
        raise ValueError("current and Wigner field live on different grids")
    w = w_field.values
    if threshold is None:
        threshold = DEFAULT_W_THRESHOLD * float(np.max(np.abs(w)))
    jmag = field.magnitude()
    if j_floor is None:
        j_floor = max(DEFAULT_J_FLOOR * float(np.max(jmag)), 1e-12)
    valid = np.abs(w) >= threshold
    safe = np.where(valid, w, 1.0)
    wx = np.where(valid, field.jx / safe, np.nan)
    wp = np.where(valid, field.jp / safe, np.nan)
    cells = np.argwhere(zero_cells(w_field, field, threshold, j_floor))
    return VelocityField(
        field.grid, wx, wp, valid, float(threshold), float(j_floor), cells, field.mode, field.tau
    )


def _polar(grid, center):
    X, P = grid.mesh()
    dx, dp = X - center[0], P - center[1]
    r = np.hypot(dx, dp)
    safe = np.where(r > 0, r, 1.0)
    return r, dx / safe, dp / safe


def _components(field):
    if isinstance(field, VelocityField):
        return field.wx, field.wp, field.valid
    return field.jx, field.jp, np.ones(field.grid.shape, dtype=bool)


def radial_component(field, center=(0.0, 0.0)):
    vx, vp, _ = _components(field)
    r, ux, up = _polar(field.grid, center)
    return np.where(r > 0, vx * ux + vp * up, 0.0)


def tangential_component(field, center=(0.0, 0.0)):
    vx, vp, _ = _components(field)
    r, ux, up = _polar(field.grid, center)
    return np.where(r > 0, vp * ux - vx * up, 0.0)


@dataclass(frozen=True)
class RadialProfile:
    """Angular averages in radial bins.

    ``r_times_abs`` is R |v_r|(R); for a classically incompressible radial
    flow it would be constant.
    """

    radius: np.ndarray
    mean_radial: np.ndarray
    r_times_abs: np.ndarray
    counts: np.ndarray
    asymmetry: float
    symmetric: bool
    note: str = ""


def _rotation_gap(vr, valid, grid, center):
    """max |v_r - v_r rotated by 90 degrees| when the grid maps onto itself."""
    square = grid.nx == grid.np_ and math.isclose(grid.dx, grid.dp, rel_tol=1e-12)
    centred = np.allclose(center, (0.5 * (grid.x_min + grid.x_max), 0.5 * (grid.p_min + grid.p_max)))
    if not (square and centred):
        return 0.0
    both = valid & np.rot90(valid)
    return float(np.max(np.abs(vr - np.rot90(vr))[both], initial=0.0))


def radial_profile(field, center=(0.0, 0.0), bin_width=None, r_max=None, symmetry_tol=1e-6):
    """Angular average of the radial component of a current or velocity field.

    ``asymmetry`` is the largest tangential component, or the largest change
    of the radial component under a 90 degree rotation about ``center`` when
    the grid maps onto itself, relative to the largest radial value.  Above
    ``symmetry_tol`` the profile is annotated, not rejected.
    """
    g = field.grid
    vx, vp, valid = _components(field)
    r, ux, up = _polar(g, center)
    vr = np.where(r > 0, vx * ux + vp * up, 0.0)
    vt = np.where(r > 0, vp * ux - vx * up, 0.0)
    if bin_width is None:
        bin_width = max(g.dx, g.dp)
    if r_max is None:
        r_max = min(center[0] - g.x_min, g.x_max - center[0], center[1] - g.p_min, g.p_max - center[1])
    edges = np.arange(0.0, r_max + 0.5 * bin_width, bin_width)
    keep = valid & (r > 0) & (r < edges[-1])
    idx = np.digitize(r[keep], edges) - 1
    nb = edges.size - 1
    vals = vr[keep]
    counts = np.bincount(idx, minlength=nb)[:nb]
    sums = np.bincount(idx, weights=vals, minlength=nb)[:nb]
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = sums / counts
    centres = 0.5 * (edges[:-1] + edges[1:])
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale > 0:
        gap = max(float(np.max(np.abs(vt[keep]))), _rotation_gap(np.where(valid, vr, 0.0), valid, g, center))
        asym = gap / scale
    else:
        asym = 0.0
    symmetric = asym <= symmetry_tol
    note = "" if symmetric else f"field not rotationally symmetric (asymmetry {asym:.3g})"
    return RadialProfile(centres, mean, centres * np.abs(mean), counts, asym, symmetric, note)


@dataclass(frozen=True)
class InversionReport:
    """Fraction of negative-W nodes whose current opposes the dominant flow.

    The dominant direction is the W-weighted mean of the unit current vector
    over the W > 0 region; this is a diagnostic construction of this
    package, not a standard quantity.
    """

    dominant_direction: tuple | None
    coherence: float
    n_negative: int
    n_considered: int
    n_inverted: int
    fraction: float | None
    inconclusive: bool

    def as_dict(self):
        return {
            "dominant_direction": self.dominant_direction,
            "coherence": self.coherence,
            "n_negative": self.n_negative,
            "n_considered": self.n_considered,
            "n_inverted": self.n_inverted,
            "fraction": self.fraction,
            "inconclusive": self.inconclusive,
        }


def inversion_detect(j, w, negative_tol=1e-6, j_floor=1e-6, min_coherence=1e-3):
    """Report current inversion inside the negative region of W.

    Nodes count as negative when W < -negative_tol * max|W|; currents below
    j_floor * max|J| are ignored.  The report is inconclusive when the unit
    currents on the positive region average to less than ``min_coherence``.
    """
    if j.grid != w.grid:
        raise ValueError("current and Wigner field live on different grids")
    wv = w.values
    jmag = j.magnitude()
    jmax = float(np.max(jmag))
    moving = jmag > j_floor * jmax if jmax > 0 else np.zeros_like(jmag, dtype=bool)
    safe = np.where(moving, jmag, 1.0)
    ux, up = j.jx / safe, j.jp / safe
    pos = (wv > 0) & moving
    weight = float(np.sum(wv[pos]))
    dominant, coherence = None, 0.0
    if weight > 0:
        vx = float(np.sum(wv[pos] * ux[pos]))
        vp = float(np.sum(wv[pos] * up[pos]))
        norm = math.hypot(vx, vp)
        coherence = norm / weight
        if norm > 0:
            dominant = (vx / norm, vp / norm)
    neg = wv < -negative_tol * float(np.max(np.abs(wv)))
    n_neg = int(np.count_nonzero(neg))
    considered = neg & moving
    n_cons = int(np.count_nonzero(considered))
    inconclusive = dominant is None or coherence < min_coherence
    n_inv, frac = 0, None
    if dominant is not None and n_cons:
        dots = ux[considered] * dominant[0] + up[considered] * dominant[1]
        n_inv = int(np.count_nonzero(dots < 0))
        frac = n_inv / n_cons
    return InversionReport(dominant, coherence, n_neg, n_cons, n_inv, frac, inconclusive)
