"""Fast-marching baseline planner and the template-matching cost model.

This is the comparison pipeline: a first-order fast-marching solve of the
eikonal equation (unit speed in free space) gives an arrival-time field,
steepest descent on that field yields an explicit path, and tracking then
needs a linear scan of the whole path every control sample to find the
nearest point.  The potential-field pipeline replaces that scan with
delta_L additions, which is where its per-sample speedup comes from.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from .hpf import OBSTACLE, BoundaryGrid
from .workspace import WorldPose

SQRT2 = math.sqrt(2.0)


def fm_arrival(boundary: BoundaryGrid) -> np.ndarray:
    """Arrival times from the target over the free region.

    First-order upwind update on a unit grid.  The 8 cells around the
    target are seeded with their exact Euclidean distances, which removes
    most of the rarefaction error the scheme otherwise commits right at
    the source.  Obstacle cells and unreachable free cells stay at +inf.
    """
    labels = boundary.labels
    n, m = labels.shape
    blocked = labels == OBSTACLE
    T = np.full((n, m), np.inf)
    tx, ty = boundary.target
    T[ty, tx] = 0.0
    heap = [(0.0, ty, tx)]
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            y, x = ty + dy, tx + dx
            if 0 <= y < n and 0 <= x < m and not blocked[y, x]:
                T[y, x] = math.hypot(dx, dy)
                heap.append((T[y, x], y, x))
    heapq.heapify(heap)
    done = np.zeros((n, m), dtype=bool)
    Tl = T  # local alias; the grid is updated in place
    while heap:
        t, y, x = heapq.heappop(heap)
        if done[y, x] or t > Tl[y, x]:
            continue
        done[y, x] = True
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            yy, xx = y + dy, x + dx
            if not (0 <= yy < n and 0 <= xx < m) or blocked[yy, xx] or done[yy, xx]:
                continue
            a = min(
                Tl[yy, xx - 1] if xx > 0 else math.inf,
                Tl[yy, xx + 1] if xx < m - 1 else math.inf,
            )
            b = min(
                Tl[yy - 1, xx] if yy > 0 else math.inf,
                Tl[yy + 1, xx] if yy < n - 1 else math.inf,
            )
            if a > b:
                a, b = b, a
            if b - a >= 1.0 or b == math.inf:
                t_new = a + 1.0
            else:
                t_new = 0.5 * (a + b + math.sqrt(2.0 - (a - b) ** 2))
            if t_new < Tl[yy, xx]:
                Tl[yy, xx] = t_new
                heapq.heappush(heap, (t_new, yy, xx))
    return T


def _descent_dir(T: np.ndarray, ix: int, iy: int):
    """Unit downhill direction of T at a cell, one-sided where neighbors are inf."""
    n, m = T.shape
    c = T[iy, ix]
    if not math.isfinite(c):
        # the continuous step clipped an obstacle corner; head for the
        # cheapest finite neighbor instead of differentiating
        best = None
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                x2, y2 = ix + dx, iy + dy
                if (dx or dy) and 0 <= x2 < m and 0 <= y2 < n and math.isfinite(T[y2, x2]):
                    if best is None or T[y2, x2] < best[0]:
                        best = (T[y2, x2], dx, dy)
        if best is None:
            return 0.0, 0.0
        mag = math.hypot(best[1], best[2])
        return best[1] / mag, best[2] / mag

    def diff(lo, hi):
        lo_ok = math.isfinite(lo)
        hi_ok = math.isfinite(hi)
        if lo_ok and hi_ok:
            return 0.5 * (hi - lo)
        if hi_ok:
            return hi - c
        if lo_ok:
            return c - lo
        return 0.0

    gx = diff(T[iy, ix - 1] if ix > 0 else math.inf, T[iy, ix + 1] if ix < m - 1 else math.inf)
    gy = diff(T[iy - 1, ix] if iy > 0 else math.inf, T[iy + 1, ix] if iy < n - 1 else math.inf)
    mag = math.hypot(gx, gy)
    if mag == 0.0:
        return 0.0, 0.0
    return -gx / mag, -gy / mag


def fm_path(T: np.ndarray, start, gd: float, step: float = 0.5) -> np.ndarray:
    """Steepest-descent polyline from a start cell to the target, in meters.

    Steps are `step` pixels long (default half a cell), so consecutive
    points are never more than 1.5 * G_D apart.
    """
    sx, sy = start
    if not math.isfinite(T[sy, sx]):
        raise ValueError("start cell (%d, %d) is unreachable (infinite arrival time)" % (sx, sy))
    ty, tx = np.unravel_index(int(np.argmin(T)), T.shape)
    tcx, tcy = tx + 0.5, ty + 0.5
    px, py = sx + 0.5, sy + 0.5
    points = [(px, py)]
    n, m = T.shape
    max_steps = int(40 * (n + m) / step)
    for _ in range(max_steps):
        if math.hypot(px - tcx, py - tcy) <= 1.5:
            break
        ix = min(max(int(px), 0), m - 1)
        iy = min(max(int(py), 0), n - 1)
        dx, dy = _descent_dir(T, ix, iy)
        if dx == 0.0 and dy == 0.0:
            raise RuntimeError("descent stalled at (%g, %g)" % (px, py))
        px += step * dx
        py += step * dy
        points.append((px, py))
    else:
        raise RuntimeError("descent did not reach the target in %d steps" % max_steps)
    points.append((tcx, tcy))
    return np.asarray(points) * gd


def path_reference(path: np.ndarray, pose: WorldPose, d_0: float):
    """Reference point a set arc distance ahead of the nearest path point.

    Every path point is examined to find the nearest one (that scan is the
    per-sample cost this baseline pays), then the first point at least d_0
    further along the path is returned, or the last point when the path
    ends sooner.  Returns ((x, y), points_examined).
    """
    path = np.asarray(path)
    if len(path) == 0:
        raise ValueError("empty reference path")
    d = np.hypot(path[:, 0] - pose.x, path[:, 1] - pose.y)
    nearest = int(np.argmin(d))
    examined = len(path)
    acc = 0.0
    idx = nearest
    for j in range(nearest + 1, len(path)):
        acc += float(np.hypot(*(path[j] - path[j - 1])))
        idx = j
        if acc >= d_0:
            break
    else:
        idx = len(path) - 1
    return (float(path[idx, 0]), float(path[idx, 1])), examined


def cost_ratio(m: int, n: int, template_side: int, kernel_side: int):
    """Per-frame cost of template matching vs edge detection, and their ratio.

    C_TM = (m - t)(n - t) t^2 positions times window size for a t x t
    template over an m x n image; C_ED likewise for a k x k kernel.
    """
    t, k = template_side, kernel_side
    if not (0 < t < min(m, n) and 0 < k < min(m, n)):
        raise ValueError("template and kernel must fit inside the image")
    c_tm = (m - t) * (n - t) * t * t
    c_ed = (m - k) * (n - k) * k * k
    return c_tm, c_ed, c_tm / c_ed


def speedup(n_p: int, delta_l: int) -> float:
    """Per-sample work ratio of path scanning vs delta_L gradient hops."""
    if n_p < 1 or delta_l < 1:
        raise ValueError("n_p and delta_l must be >= 1")
    return n_p / delta_l
