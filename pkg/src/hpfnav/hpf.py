"""Harmonic potential field over an occupancy boundary grid.

The free region gets a discrete Laplace solution with Dirichlet data:
obstacle and frame cells are pinned at potential 1, the target cell at 0.
Because harmonic functions take their extrema on the boundary, the interior
has no local minima, so following the negative gradient from any free cell
connected to the target always runs downhill to it.  Free components with no
target in them settle at the constant 1 and are detected as flat, which is
how an unreachable goal shows up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FREE = 0
OBSTACLE = 1
TARGET = 2


@dataclass
class BoundaryGrid:
    """Cell labels (FREE / OBSTACLE / TARGET) plus the target cell."""

    labels: np.ndarray
    target: tuple

    def __post_init__(self):
        lab = np.ascontiguousarray(self.labels, dtype=np.int8)
        if lab.ndim != 2:
            raise ValueError("labels must be 2-D")
        tx, ty = self.target
        if lab[ty, tx] != TARGET:
            raise ValueError("target cell (%d, %d) is not labeled TARGET" % (tx, ty))
        border = np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]])
        if np.any(border == FREE):
            raise ValueError("boundary grid must have a closed obstacle frame")
        self.labels = lab

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


@dataclass
class PotentialField:
    """Solved potential plus solver diagnostics."""

    phi: np.ndarray
    sweeps: int
    residual: float
    converged: bool


@dataclass
class GradientField:
    """Normalized descent directions; flat cells carry an exact zero vector."""

    vx: np.ndarray
    vy: np.ndarray
    flat: np.ndarray
    labels: np.ndarray
    target: tuple

    @property
    def width(self) -> int:
        return self.vx.shape[1]

    @property
    def height(self) -> int:
        return self.vx.shape[0]


def build_boundary(edges, target, dilation: int = 1) -> BoundaryGrid:
    """Turn an edge map into boundary labels.

    Edge cells are dilated by a Chebyshev radius (square element) to pad the
    contour, the outer frame is closed off, and the target cell is pinned.
    """
    cells = np.asarray(edges.cells if hasattr(edges, "cells") else edges, dtype=bool)
    n, m = cells.shape
    if dilation < 0:
        raise ValueError("dilation must be >= 0")
    obst = cells.copy()
    for dy in range(-dilation, dilation + 1):
        for dx in range(-dilation, dilation + 1):
            if dx == 0 and dy == 0:
                continue
            src_y = slice(max(0, -dy), min(n, n - dy))
            src_x = slice(max(0, -dx), min(m, m - dx))
            dst_y = slice(max(0, dy), min(n, n + dy))
            dst_x = slice(max(0, dx), min(m, m + dx))
            obst[dst_y, dst_x] |= cells[src_y, src_x]
    obst[0, :] = obst[-1, :] = True
    obst[:, 0] = obst[:, -1] = True
    tx, ty = target
    if not (0 <= tx < m and 0 <= ty < n):
        raise ValueError("target (%s, %s) outside the grid" % (tx, ty))
    if obst[ty, tx]:
        raise ValueError("target (%d, %d) lies on a (dilated) obstacle cell" % (tx, ty))
    labels = np.where(obst, np.int8(OBSTACLE), np.int8(FREE))
    labels[ty, tx] = TARGET
    return BoundaryGrid(labels, (tx, ty))


def relax(
    boundary: BoundaryGrid,
    omega_sor: float = 1.8,
    tolerance: float = 1e-10,
    max_sweeps: int | None = None,
    initial: np.ndarray | None = None,
) -> PotentialField:
    """Solve the Dirichlet problem by red-black SOR.

    Fixed cells hold 1 (obstacles) or 0 (target); each sweep applies
    phi <- phi + omega * (mean of 4 neighbors - phi) to the free cells,
    first on one checkerboard color, then the other.  Free cells start at 1
    (or at `initial` for warm starts), so a free component that contains no
    target never moves off the constant 1 and comes out exactly flat.

    Stops when the residual max|mean4 - phi| over free cells drops to
    `tolerance`, or after `max_sweeps` (default 20 * max(side)) sweeps;
    hitting the cap is reported via `converged`, it is not an error.
    """
    if not 0 < omega_sor < 2:
        raise ValueError("omega_sor must lie in (0, 2)")
    labels = boundary.labels
    n, m = labels.shape
    if max_sweeps is None:
        max_sweeps = 20 * max(m, n)

    free = labels == FREE
    phi = np.ones((n, m), dtype=float)
    if initial is not None:
        phi[free] = np.asarray(initial, dtype=float)[free]
    phi[labels == TARGET] = 0.0

    core = (slice(1, -1), slice(1, -1))
    yy, xx = np.mgrid[1 : n - 1, 1 : m - 1]
    parity = (xx + yy) % 2 == 0
    free_core = free[core]
    red = (parity & free_core) * omega_sor
    black = (~parity & free_core) * omega_sor

    def neighbor_mean():
        s = phi[:-2, 1:-1] + phi[2:, 1:-1]
        s += phi[1:-1, :-2]
        s += phi[1:-1, 2:]
        s *= 0.25
        return s

    phi_core = phi[core]
    sweeps = 0
    residual = math.inf
    for sweeps in range(1, max_sweeps + 1):
        for mask in (red, black):
            d = neighbor_mean()
            d -= phi_core
            d *= mask
            phi_core += d
        d = neighbor_mean()
        d -= phi_core
        np.abs(d, out=d)
        residual = float(np.max(d * free_core)) if free_core.any() else 0.0
        if residual <= tolerance:
            break
    return PotentialField(phi, sweeps, residual, residual <= tolerance)


def gradient(field: PotentialField, boundary: BoundaryGrid, eps_flat: float = 1e-12) -> GradientField:
    """Unit descent directions -grad(phi)/|grad(phi)|.

    Central differences on free cells; next to a fixed cell the difference
    is one-sided over the free pair so pinned values never enter.  Cells
    whose raw gradient magnitude is below eps_flat (and all fixed cells)
    get an exact zero vector and the flat flag.
    """
    phi = field.phi
    labels = boundary.labels
    fixed = labels != FREE
    n, m = labels.shape
    dx = np.zeros((n, m))
    dy = np.zeros((n, m))

    def axis_diff(out, lo_sl, hi_sl, core_sl):
        lo_fix = fixed[lo_sl]
        hi_fix = fixed[hi_sl]
        p_lo, p_hi, p_c = phi[lo_sl], phi[hi_sl], phi[core_sl]
        d = np.where(
            ~lo_fix & ~hi_fix,
            0.5 * (p_hi - p_lo),
            np.where(lo_fix & ~hi_fix, p_hi - p_c, np.where(~lo_fix & hi_fix, p_c - p_lo, 0.0)),
        )
        out[core_sl] = d

    axis_diff(dx, (slice(1, -1), slice(0, -2)), (slice(1, -1), slice(2, None)), (slice(1, -1), slice(1, -1)))
    axis_diff(dy, (slice(0, -2), slice(1, -1)), (slice(2, None), slice(1, -1)), (slice(1, -1), slice(1, -1)))
    dx[fixed] = 0.0
    dy[fixed] = 0.0

    mag = np.hypot(dx, dy)
    flat = fixed | (mag < eps_flat)
    with np.errstate(invalid="ignore", divide="ignore"):
        vx = np.where(flat, 0.0, -dx / mag)
        vy = np.where(flat, 0.0, -dy / mag)
    return GradientField(vx, vy, flat, labels, boundary.target)


def descend(grad: GradientField, start, max_steps: int | None = None):
    """Follow unit gradient hops from a cell center toward the target.

    Returns (points, reason) where points are continuous pixel coordinates
    (the first is the start cell center) and reason is one of "reached"
    (within 1.5 cells of the target center), "flat", or "exhausted".
    """
    sx, sy = start
    labels = grad.labels
    if labels[sy, sx] == OBSTACLE:
        raise ValueError("descend start (%d, %d) is an obstacle cell" % (sx, sy))
    if max_steps is None:
        max_steps = 10 * (grad.width + grad.height)
    tx, ty = grad.target
    tcx, tcy = tx + 0.5, ty + 0.5
    vx, vy, flat = grad.vx, grad.vy, grad.flat
    px, py = sx + 0.5, sy + 0.5
    points = [(px, py)]
    reason = "exhausted"
    for _ in range(max_steps):
        if math.hypot(px - tcx, py - tcy) <= 1.5:
            reason = "reached"
            break
        cx, cy = int(px), int(py)
        if flat[cy, cx]:
            reason = "flat"
            break
        px += float(vx[cy, cx])
        py += float(vy[cy, cx])
        points.append((px, py))
    else:
        if math.hypot(px - tcx, py - tcy) <= 1.5:
            reason = "reached"
    return points, reason


def is_reachable(grad: GradientField, cell) -> bool:
    """False only when the cell and its whole 4-neighborhood are flat."""
    cx, cy = cell
    if grad.labels[cy, cx] != FREE:
        raise ValueError("reachability is defined for FREE cells")
    if not grad.flat[cy, cx]:
        return True
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        x, y = cx + dx, cy + dy
        if 0 <= x < grad.width and 0 <= y < grad.height and not grad.flat[y, x]:
            return True
    return False


def save_grid_csv(grid: np.ndarray, path) -> None:
    """Dump a float grid as CSV for offline inspection."""
    np.savetxt(path, np.asarray(grid), delimiter=",", fmt="%.17g")
