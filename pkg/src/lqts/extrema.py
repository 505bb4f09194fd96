"""Local extrema of sampled curves."""

from __future__ import annotations

import numpy as np


def parabolic_vertex(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex of the parabola through samples ``i - 1, i, i + 1``.

    Falls back to the sample itself when the three points are collinear.
    """
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a == 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    c = y1 - a * x1**2 - b * x1
    xv = float(np.clip(xv, x0, x2))
    return xv, float(a * xv**2 + b * xv + c)


def local_extrema(x, y, refine: bool = True) -> list[tuple[float, float, str]]:
    """Interior local maxima and minima of ``y(x)`` as ``(x, y, kind)``.

    Plateaus are reported once, at their first sample. With ``refine`` the
    location is moved to the vertex of the local parabola.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # collapse exact plateaus so a flat top counts as one extremum
    keep = np.concatenate([[True], np.diff(y) != 0])
    idx = np.flatnonzero(keep)
    yy = y[idx]
    out = []
    for k in range(1, len(idx) - 1):
        left, mid, right = yy[k - 1], yy[k], yy[k + 1]
        if mid > left and mid > right:
            kind = "max"
        elif mid < left and mid < right:
            kind = "min"
        else:
            continue
        i = idx[k]
        if refine and 0 < i < len(x) - 1:
            xv, yv = parabolic_vertex(x, y, i)
        else:
            xv, yv = float(x[i]), float(y[i])
        out.append((xv, yv, kind))
    return out


def grid_extremum(x, y, kind: str = "max") -> tuple[int, bool]:
    """Index of the global max (or min) sample and whether it sits on the grid boundary."""
    y = np.asarray(y)
    i = int(np.argmax(y) if kind == "max" else np.argmin(y))
    return i, i in (0, len(y) - 1)


def nearest_local_extremum(x, y, target: float, kind: str = "min") -> tuple[int, bool]:
    """Interior grid-local extremum closest to ``target``.

    Returns ``(index, flagged)``. When no interior extremum exists the
    global extremum is returned and flagged (it then sits on the boundary
    or on a monotone stretch).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mid, left, right = y[1:-1], y[:-2], y[2:]
    if kind == "max":
        hits = np.flatnonzero((mid > left) & (mid >= right)) + 1
    else:
        hits = np.flatnonzero((mid < left) & (mid <= right)) + 1
    if hits.size == 0:
        i, _ = grid_extremum(x, y, kind)
        return i, True
    return int(hits[np.argmin(np.abs(x[hits] - target))]), False
