"""Field lines of a Wigner current at fixed tau ("quantum phase portraits").

Field lines are integral curves of J at one instant.  They are not
trajectories and nothing here transports probability along them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FieldLine", "BilinearField", "integrate_line", "seed_lattice", "portrait"]

BOUNDARY = "boundary"
STAGNATION = "stagnation"
MAX_STEPS = "max-steps"
SINGULAR = "singular-cell"

DEFAULT_MAX_STEPS = 4096
DEFAULT_FLOOR = 1e-9  # relative to max |J|
ZERO_FIELD = 1e-14  # absolute; below this max |J| is roundoff


@dataclass(frozen=True)
class FieldLine:
    """Polyline through ``seed``; ``speeds`` holds |J| at each vertex."""

    vertices: np.ndarray
    speeds: np.ndarray
    seed: tuple
    reason_backward: str
    reason_forward: str

    def __len__(self):
        return len(self.vertices)

    def to_dict(self):
        return {
            "seed": [float(self.seed[0]), float(self.seed[1])],
            "termination": {"backward": self.reason_backward, "forward": self.reason_forward},
            "vertices": self.vertices.tolist(),
            "speeds": self.speeds.tolist(),
        }


class BilinearField:
    """Bilinear interpolation of (J_x, J_p) inside the grid window."""

    def __init__(self, field):
        self.grid = field.grid
        # nested lists: scalar indexing is far cheaper than on ndarrays
        self.jx = field.jx.tolist()
        self.jp = field.jp.tolist()
        self.x0 = float(self.grid.x[0])
        self.p0 = float(self.grid.p[0])
        self._dx, self._dp = self.grid.dx, self.grid.dp
        self._imax, self._jmax = self.grid.nx - 2, self.grid.np_ - 2

    def _locate(self, x, p):
        fx = (x - self.x0) / self._dx
        fp = (p - self.p0) / self._dp
        i = min(max(math.floor(fx), 0), self._imax)
        j = min(max(math.floor(fp), 0), self._jmax)
        return i, j, fx - i, fp - j

    def cell(self, x, p):
        i, j, _, _ = self._locate(x, p)
        return i, j

    def __call__(self, x, p):
        i, j, tx, tp = self._locate(x, p)
        w00 = (1 - tx) * (1 - tp)
        w10 = tx * (1 - tp)
        w01 = (1 - tx) * tp
        w11 = tx * tp
        x0, x1 = self.jx[i], self.jx[i + 1]
        p0, p1 = self.jp[i], self.jp[i + 1]
        vx = w00 * x0[j] + w10 * x1[j] + w01 * x0[j + 1] + w11 * x1[j + 1]
        vp = w00 * p0[j] + w10 * p1[j] + w01 * p0[j + 1] + w11 * p1[j + 1]
        return vx, vp


def _trace(interp, seed, direction, step, max_steps, floor, singular):
    g = interp.grid

    def unit(x, p):
        vx, vp = interp(x, p)
        speed = math.hypot(vx, vp)
        if speed <= floor:
            return None
        return direction * vx / speed, direction * vp / speed

    pts = [seed]
    x, p = seed
    prev = None
    for _ in range(max_steps):
        k1 = unit(x, p)
        if k1 is None:
            return pts, STAGNATION
        # a reversal means the line stepped across a zero of J (a sink ring
        # or point) and would otherwise oscillate there until the step cap
        if prev is not None and k1[0] * prev[0] + k1[1] * prev[1] < 0:
            return pts, STAGNATION
        prev = k1
        k2 = unit(x + 0.5 * step * k1[0], p + 0.5 * step * k1[1])
        if k2 is None:
            return pts, STAGNATION
        k3 = unit(x + 0.5 * step * k2[0], p + 0.5 * step * k2[1])
        if k3 is None:
            return pts, STAGNATION
        k4 = unit(x + step * k3[0], p + step * k3[1])
        if k4 is None:
            return pts, STAGNATION
        ddx = step / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        ddp = step / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        # stages pointing opposite ways cancel: a zero of J lies within the step
        if math.hypot(ddx, ddp) < 0.5 * step:
            return pts, STAGNATION
        x += ddx
        p += ddp
        if not g.contains(x, p):
            return pts, BOUNDARY
        if singular is not None and singular[interp.cell(x, p)]:
            return pts, SINGULAR
        pts.append((x, p))
    return pts, MAX_STEPS


def integrate_line(field, seed, step=None, max_steps=DEFAULT_MAX_STEPS, floor=None, singular=None):
    """Fixed-step RK4 field line of ``field`` through ``seed``, both directions.

    Parameters
    ----------
    step : float, optional
        Arc-length step; defaults to min(dx, dp) / 4.
    floor : float, optional
        Absolute stagnation speed; defaults to 1e-9 max |J|.  A step that
        reverses the direction of travel, or whose RK4 stages cancel to less
        than half a step, also ends the line as stagnation.
    singular : bool array of shape (nx - 1, np - 1), optional
        Cells at which integration stops (e.g. ``VelocityField.singular_mask()``).
    """
    g = field.grid
    x0, p0 = float(seed[0]), float(seed[1])
    if not g.contains(x0, p0):
        raise ValueError(f"seed {seed} lies outside the grid")
    if step is None:
        step = 0.25 * min(g.dx, g.dp)
    if floor is None:
        floor = DEFAULT_FLOOR * float(np.max(field.magnitude()))
    interp = BilinearField(field)
    back, why_back = _trace(interp, (x0, p0), -1.0, step, max_steps, floor, singular)
    fwd, why_fwd = _trace(interp, (x0, p0), 1.0, step, max_steps, floor, singular)
    verts = np.array(back[:0:-1] + fwd, dtype=float)
    speeds = np.array([math.hypot(*interp(x, p)) for x, p in verts])
    return FieldLine(verts, speeds, (x0, p0), why_back, why_fwd)


def seed_lattice(grid, density, field=None, floor=None):
    """``density`` x ``density`` seeds at the centres of an even partition of the window.

    With ``field`` given, seeds where the interpolated |J| is at or below
    ``floor`` (default 1e-9 max |J|) are dropped.
    """
    if int(density) != density or density < 1:
        raise ValueError(f"density must be a positive integer, got {density!r}")
    density = int(density)
    xs = grid.x_min + (np.arange(density) + 0.5) * (grid.x_max - grid.x_min) / density
    ps = grid.p_min + (np.arange(density) + 0.5) * (grid.p_max - grid.p_min) / density
    seeds = [(float(x), float(p)) for x in xs for p in ps]
    if field is None:
        return seeds
    interp = BilinearField(field)
    if floor is None:
        floor = DEFAULT_FLOOR * float(np.max(field.magnitude()))
    return [s for s in seeds if math.hypot(*interp(*s)) > floor]


def portrait(field, density=8, n_lines=16, floor_rel=1e-2, singular=None, max_steps=DEFAULT_MAX_STEPS):
    """A few field lines seeded where the current is strong.

    Seeds are taken in order of decreasing |J| and skipped when an earlier
    line already passes within one grid spacing.  A field whose largest
    magnitude is at roundoff level (<= 1e-14) has no portrait.
    """
    jmax = float(np.max(field.magnitude()))
    if jmax <= ZERO_FIELD:
        return []
    interp = BilinearField(field)
    seeds = seed_lattice(field.grid, density, field, floor_rel * jmax)
    seeds.sort(key=lambda s: (-math.hypot(*interp(*s)), s))
    spacing = max(field.grid.dx, field.grid.dp)
    lines = []
    for s in seeds:
        if len(lines) >= n_lines:
            break
        if any(np.min(np.hypot(l.vertices[:, 0] - s[0], l.vertices[:, 1] - s[1])) < spacing for l in lines):
            continue
        lines.append(integrate_line(field, s, max_steps=max_steps, singular=singular))
    return lines
