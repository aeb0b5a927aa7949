"""Polyline geometry helpers used by the simulator and planner.

All polylines are float64 arrays of shape (P, 2) in meters. Arc lengths are
measured along the polyline from its first vertex.
"""

from __future__ import annotations

import numpy as np


def polyline_length(points: np.ndarray) -> float:
    """Total arc length of a polyline."""
    if len(points) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def cumulative_arclength(points: np.ndarray) -> np.ndarray:
    """Arc length at each vertex, starting at 0."""
    if len(points) == 0:
        return np.zeros(0)
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def point_at_arclength(points: np.ndarray, s: float) -> np.ndarray:
    """Point on the polyline at arc length ``s`` (clamped to the ends)."""
    cum = cumulative_arclength(points)
    s = float(np.clip(s, 0.0, cum[-1]))
    i = int(np.searchsorted(cum, s, side="right") - 1)
    i = min(i, len(points) - 2) if len(points) > 1 else 0
    if len(points) == 1:
        return points[0].copy()
    seg_len = cum[i + 1] - cum[i]
    t = 0.0 if seg_len <= 0 else (s - cum[i]) / seg_len
    return points[i] + t * (points[i + 1] - points[i])


def heading_at_arclength(points: np.ndarray, s: float) -> float:
    """Tangent heading (radians, CCW from +x) at arc length ``s``."""
    cum = cumulative_arclength(points)
    s = float(np.clip(s, 0.0, cum[-1]))
    i = int(np.searchsorted(cum, s, side="right") - 1)
    i = int(np.clip(i, 0, len(points) - 2))
    d = points[i + 1] - points[i]
    return float(np.arctan2(d[1], d[0]))


def resample_polyline(points: np.ndarray, spacing: float) -> np.ndarray:
    """Resample at fixed ``spacing``, excluding the start vertex.

    A polyline of length L yields points at s = spacing, 2*spacing, ...,
    including the endpoint when L is an exact multiple of the spacing.
    """
    total = polyline_length(points)
    n = int(np.floor(total / spacing + 1e-9))
    if n == 0:
        return np.zeros((0, 2))
    cum = cumulative_arclength(points)
    targets = spacing * np.arange(1, n + 1)
    out = np.empty((n, 2))
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(points) - 2)
    seg_len = cum[idx + 1] - cum[idx]
    t = np.where(seg_len > 0, (targets - cum[idx]) / np.maximum(seg_len, 1e-12), 0.0)
    out = points[idx] + t[:, None] * (points[idx + 1] - points[idx])
    return out


def segment_distances(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from point ``p`` to each segment (a[i], b[i])."""
    ab = b - a
    ap = p[None, :] - a
    denom = np.maximum(np.sum(ab * ab, axis=1), 1e-12)
    t = np.clip(np.sum(ap * ab, axis=1) / denom, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(p[None, :] - closest, axis=1)


def project_to_polyline(
    points: np.ndarray,
    cum: np.ndarray,
    p: np.ndarray,
    s_lo: float = -np.inf,
    s_hi: float = np.inf,
) -> tuple[float, float]:
    """Project ``p`` onto the polyline, restricted to arc window [s_lo, s_hi].

    Returns (arc length of the closest point, signed lateral offset). The
    offset is positive when ``p`` lies to the left of the travel direction.
    """
    a, b = points[:-1], points[1:]
    ab = b - a
    seg_len = cum[1:] - cum[:-1]
    mask = (cum[1:] >= s_lo) & (cum[:-1] <= s_hi)
    if not mask.any():
        mask = np.ones(len(a), dtype=bool)
    ai, bi, abi = a[mask], b[mask], ab[mask]
    denom = np.maximum(np.sum(abi * abi, axis=1), 1e-12)
    t = np.clip(np.sum((p[None, :] - ai) * abi, axis=1) / denom, 0.0, 1.0)
    closest = ai + t[:, None] * abi
    d2 = np.sum((p[None, :] - closest) ** 2, axis=1)
    k = int(np.argmin(d2))
    seg_idx = np.nonzero(mask)[0][k]
    s = float(cum[seg_idx] + t[k] * seg_len[seg_idx])
    tangent = ab[seg_idx] / max(np.linalg.norm(ab[seg_idx]), 1e-12)
    rel = p - closest[k]
    lateral = float(tangent[0] * rel[1] - tangent[1] * rel[0])
    return s, lateral


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    return float((theta + np.pi) % (2.0 * np.pi) - np.pi)


def quad_bezier(p0: np.ndarray, p1: np.ndarray, p2: np.ndarray, n: int) -> np.ndarray:
    """Quadratic Bezier sampled at n+1 parameter values including endpoints."""
    t = np.linspace(0.0, 1.0, n + 1)[:, None]
    return (1 - t) ** 2 * p0 + 2 * (1 - t) * t * p1 + t**2 * p2
