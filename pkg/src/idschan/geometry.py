"""Angle conventions and axis-aligned geometry primitives used by the tracer."""

from __future__ import annotations

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s


def wrap_azimuth_deg(angle):
    """Wrap an angle in degrees into the half-open interval (-180, 180]."""
    a = np.asarray(angle, dtype=float)
    out = (a + 180.0) % 360.0 - 180.0
    out = np.where(out == -180.0, 180.0, out)
    return float(out) if out.ndim == 0 else out


def fold_elevation_deg(angle):
    """Fold an angle in degrees into [-90, 90], reflecting at the poles."""
    a = np.asarray(angle, dtype=float)
    w = (a + 180.0) % 360.0 - 180.0
    out = np.where(w > 90.0, 180.0 - w, w)
    out = np.where(w < -90.0, -180.0 - w, out)
    return float(out) if out.ndim == 0 else out


def spherical_angles_deg(vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Azimuth/elevation in degrees of direction vectors (..., 3).

    Azimuth is atan2(y, x) in (-180, 180]; elevation is asin(z/r) in [-90, 90].
    """
    v = np.asarray(vec, dtype=float)
    r = np.linalg.norm(v, axis=-1)
    az = np.degrees(np.arctan2(v[..., 1], v[..., 0]))
    az = np.where(az <= -180.0, 180.0, az)
    with np.errstate(invalid="ignore", divide="ignore"):
        el = np.degrees(np.arcsin(np.clip(v[..., 2] / r, -1.0, 1.0)))
    return az, el


def mirror_point(point: np.ndarray, axis: int, plane_coord: float) -> np.ndarray:
    """Mirror a 3-vector across the axis-aligned plane x[axis] = plane_coord."""
    out = np.array(point, dtype=float)
    out[axis] = 2.0 * plane_coord - out[axis]
    return out


def segments_hit_boxes(
    p0: np.ndarray,
    p1: np.ndarray,
    box_min: np.ndarray,
    box_max: np.ndarray,
    eps: float = 1e-9,
) -> np.ndarray:
    """Whether each segment p0[i]->p1[i] passes through any of the boxes.

    Slab test on the open parameter interval (eps, 1 - eps); endpoints that
    merely touch a box surface do not count as a hit. Shapes: p0/p1 (S, 3),
    box_min/box_max (M, 3); returns bool (S,).
    """
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    if box_min.size == 0:
        return np.zeros(p0.shape[0], dtype=bool)
    d = p1 - p0
    # Avoid 0/0 while keeping the sign semantics of the slab test.
    d_safe = np.where(np.abs(d) < 1e-300, 1e-300, d)
    with np.errstate(divide="ignore", over="ignore"):
        t1 = (box_min[None, :, :] - p0[:, None, :]) / d_safe[:, None, :]
        t2 = (box_max[None, :, :] - p0[:, None, :]) / d_safe[:, None, :]
    tmin = np.minimum(t1, t2).max(axis=2)
    tmax = np.maximum(t1, t2).min(axis=2)
    hit = (tmax >= tmin) & (tmax > eps) & (tmin < 1.0 - eps)
    return hit.any(axis=1)


def point_in_box(point, box_min, box_max) -> bool:
    """Closed-interval containment test (touching the surface counts)."""
    p = np.asarray(point, dtype=float)
    return bool(np.all(p >= np.asarray(box_min)) and np.all(p <= np.asarray(box_max)))
