"""Hot numeric kernels with two interchangeable implementations.

Every kernel exists as a numba @njit version and a pure-numpy version that
compute the same result. The active path is chosen at import time from the
MECADRIVE_NUMBA environment variable ("0"/"false"/"off" disables numba) and
can be switched at runtime with set_backend(), which the kernel benchmark
uses to compare both. Formulas here mirror the scalar reference ops
(geometry._pose_step, motor.motor_step); keep them in sync.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap(args[0]) if args and callable(args[0]) else wrap


def _env_wants_numba() -> bool:
    flag = os.environ.get("MECADRIVE_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


_backend = "numba" if (NUMBA_AVAILABLE and _env_wants_numba()) else "numpy"

POSE_EULER_EPS = 1e-9  # |omega|*dt below this: arc == chord to machine precision


def active_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Switch kernel implementations ("numba" or "numpy") at runtime."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not importable in this environment")
    _backend = name


# ---------------------------------------------------------------------------
# point-in-polygon (even-odd crossing rule)

def _points_in_polygon_np(px, py, poly_x, poly_y):
    inside = np.zeros(px.shape, dtype=np.bool_)
    n = poly_x.shape[0]
    j = n - 1
    for i in range(n):
        xi, yi = poly_x[i], poly_y[i]
        xj, yj = poly_x[j], poly_y[j]
        crosses = (yi > py) != (yj > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = (xj - xi) * (py - yi) / (yj - yi) + xi
        inside ^= crosses & (px < x_at)
        j = i
    return inside


@njit(cache=True, error_model="numpy")
def _points_in_polygon_nb(px, py, poly_x, poly_y):  # pragma: no cover - jitted
    m = px.shape[0]
    n = poly_x.shape[0]
    inside = np.zeros(m, dtype=np.bool_)
    for k in range(m):
        x, y = px[k], py[k]
        hit = False
        j = n - 1
        for i in range(n):
            xi, yi = poly_x[i], poly_y[i]
            xj, yj = poly_x[j], poly_y[j]
            if (yi > y) != (yj > y):
                x_at = (xj - xi) * (y - yi) / (yj - yi) + xi
                if x < x_at:
                    hit = not hit
            j = i
        inside[k] = hit
    return inside


def points_in_polygon(px: np.ndarray, py: np.ndarray,
                      polygon: np.ndarray) -> np.ndarray:
    """Even-odd test of points against a closed polygon (N,2 vertex array)."""
    px = np.ascontiguousarray(px, dtype=np.float64).ravel()
    py = np.ascontiguousarray(py, dtype=np.float64).ravel()
    poly = np.asarray(polygon, dtype=np.float64)
    poly_x = np.ascontiguousarray(poly[:, 0])
    poly_y = np.ascontiguousarray(poly[:, 1])
    if _backend == "numba":
        return _points_in_polygon_nb(px, py, poly_x, poly_y)
    return _points_in_polygon_np(px, py, poly_x, poly_y)


# ---------------------------------------------------------------------------
# polyline band membership (lane markings, dash-aware)

def _polyline_hits_np(px, py, sx0, sy0, sx1, sy1, s_off, half_width,
                      dashed, dash_len, gap_len):
    n_seg = sx0.shape[0]
    d2 = np.empty((n_seg, px.shape[0]))
    s_at = np.empty((n_seg, px.shape[0]))
    for i in range(n_seg):
        ex = sx1[i] - sx0[i]
        ey = sy1[i] - sy0[i]
        length = math.sqrt(ex * ex + ey * ey)
        ux, uy = ex / length, ey / length
        t = (px - sx0[i]) * ux + (py - sy0[i]) * uy
        t = np.minimum(np.maximum(t, 0.0), length)
        dx = px - (sx0[i] + t * ux)
        dy = py - (sy0[i] + t * uy)
        d2[i] = dx * dx + dy * dy
        s_at[i] = s_off[i] + t
    best = np.argmin(d2, axis=0)
    cols = np.arange(px.shape[0])
    best_d2 = d2[best, cols]
    best_s = s_at[best, cols]
    hits = best_d2 <= half_width * half_width
    if dashed:
        period = dash_len + gap_len
        hits &= (best_s % period) < dash_len
    return hits


@njit(cache=True, error_model="numpy")
def _polyline_hits_nb(px, py, sx0, sy0, sx1, sy1, s_off, half_width,
                      dashed, dash_len, gap_len):  # pragma: no cover - jitted
    m = px.shape[0]
    n_seg = sx0.shape[0]
    hits = np.zeros(m, dtype=np.bool_)
    hw2 = half_width * half_width
    period = dash_len + gap_len
    for k in range(m):
        best_d2 = np.inf
        best_s = 0.0
        for i in range(n_seg):
            ex = sx1[i] - sx0[i]
            ey = sy1[i] - sy0[i]
            length = math.sqrt(ex * ex + ey * ey)
            ux, uy = ex / length, ey / length
            t = (px[k] - sx0[i]) * ux + (py[k] - sy0[i]) * uy
            t = min(max(t, 0.0), length)
            dx = px[k] - (sx0[i] + t * ux)
            dy = py[k] - (sy0[i] + t * uy)
            d2 = dx * dx + dy * dy
            if d2 < best_d2:
                best_d2 = d2
                best_s = s_off[i] + t
        ok = best_d2 <= hw2
        if ok and dashed:
            ok = (best_s % period) < dash_len
        hits[k] = ok
    return hits


def polyline_hits(px: np.ndarray, py: np.ndarray, points: np.ndarray,
                  width: float, dashed: bool = False,
                  dash_len: float = 0.04, gap_len: float = 0.03) -> np.ndarray:
    """Points within width/2 of a polyline. For dashed lines the arc-length
    position of the nearest projection selects dash vs gap."""
    px = np.ascontiguousarray(px, dtype=np.float64).ravel()
    py = np.ascontiguousarray(py, dtype=np.float64).ravel()
    pts = np.asarray(points, dtype=np.float64)
    sx0 = np.ascontiguousarray(pts[:-1, 0])
    sy0 = np.ascontiguousarray(pts[:-1, 1])
    sx1 = np.ascontiguousarray(pts[1:, 0])
    sy1 = np.ascontiguousarray(pts[1:, 1])
    seg_len = np.hypot(sx1 - sx0, sy1 - sy0)
    if np.any(seg_len <= 0):
        raise ValueError("polyline has zero-length segment")
    s_off = np.concatenate(([0.0], np.cumsum(seg_len)[:-1]))
    args = (px, py, sx0, sy0, sx1, sy1, s_off, float(width) / 2.0,
            bool(dashed), float(dash_len), float(gap_len))
    if _backend == "numba":
        return _polyline_hits_nb(*args)
    return _polyline_hits_np(*args)


# ---------------------------------------------------------------------------
# ray vs axis-aligned box (billboard actors), slab method

def _ray_box_np(ox, oy, oz, dx, dy, dz, b):
    x0, x1, y0, y1, z0, z1 = b
    with np.errstate(divide="ignore", invalid="ignore"):
        tx0 = (x0 - ox) / dx
        tx1 = (x1 - ox) / dx
        ty0 = (y0 - oy) / dy
        ty1 = (y1 - oy) / dy
        tz0 = (z0 - oz) / dz
        tz1 = (z1 - oz) / dz
    tmin = np.maximum(np.maximum(np.minimum(tx0, tx1), np.minimum(ty0, ty1)),
                      np.minimum(tz0, tz1))
    tmax = np.minimum(np.minimum(np.maximum(tx0, tx1), np.maximum(ty0, ty1)),
                      np.maximum(tz0, tz1))
    return (tmax >= tmin) & (tmax > 0.0)


@njit(cache=True, error_model="numpy")
def _ray_box_nb(ox, oy, oz, dx, dy, dz, b):  # pragma: no cover - jitted
    x0, x1, y0, y1, z0, z1 = b[0], b[1], b[2], b[3], b[4], b[5]
    m = dx.shape[0]
    hits = np.zeros(m, dtype=np.bool_)
    for k in range(m):
        tx0 = (x0 - ox) / dx[k]
        tx1 = (x1 - ox) / dx[k]
        ty0 = (y0 - oy) / dy[k]
        ty1 = (y1 - oy) / dy[k]
        tz0 = (z0 - oz) / dz[k]
        tz1 = (z1 - oz) / dz[k]
        tmin = max(max(min(tx0, tx1), min(ty0, ty1)), min(tz0, tz1))
        tmax = min(min(max(tx0, tx1), max(ty0, ty1)), max(tz0, tz1))
        hits[k] = (tmax >= tmin) and (tmax > 0.0)
    return hits


def ray_box_hits(origin: tuple[float, float, float],
                 dx: np.ndarray, dy: np.ndarray, dz: np.ndarray,
                 box: tuple[float, float, float, float, float, float]) -> np.ndarray:
    """Which rays from a common origin intersect an axis-aligned box."""
    dx = np.ascontiguousarray(dx, dtype=np.float64).ravel()
    dy = np.ascontiguousarray(dy, dtype=np.float64).ravel()
    dz = np.ascontiguousarray(dz, dtype=np.float64).ravel()
    b = np.asarray(box, dtype=np.float64)
    ox, oy, oz = (float(v) for v in origin)
    if _backend == "numba":
        return _ray_box_nb(ox, oy, oz, dx, dy, dz, b)
    return _ray_box_np(ox, oy, oz, dx, dy, dz, b)


# ---------------------------------------------------------------------------
# batched motor-plant + pose stepping (the 1 ms physics inner loop)

def _advance_plant_np(x, y, th, omegas, thetas, duties, n_steps, dt,
                      alpha, gain, tau, wheel_radius, lw_sum):
    poses = np.empty((n_steps, 3))
    one_minus = tau * (1.0 - alpha)
    for k in range(n_steps):
        for i in range(4):
            omega_ss = gain * duties[i]
            dev = omegas[i] - omega_ss
            omegas[i] = omega_ss + dev * alpha
            thetas[i] = thetas[i] + omega_ss * dt + dev * one_minus
        vx = wheel_radius * (omegas[0] + omegas[1] + omegas[2] + omegas[3]) / 4.0
        vy = wheel_radius * (-omegas[0] + omegas[1] + omegas[2] - omegas[3]) / 4.0
        om = wheel_radius * (-omegas[0] + omegas[1] - omegas[2] + omegas[3]) / (4.0 * lw_sum)
        if abs(om) * dt < POSE_EULER_EPS:
            c, s = math.cos(th), math.sin(th)
            x = x + (vx * c - vy * s) * dt
            y = y + (vx * s + vy * c) * dt
            th = th + om * dt
        else:
            th1 = th + om * dt
            ds = math.sin(th1) - math.sin(th)
            dc = math.cos(th1) - math.cos(th)
            x = x + (vx * ds + vy * dc) / om
            y = y + (-vx * dc + vy * ds) / om
            th = th1
        poses[k, 0] = x
        poses[k, 1] = y
        poses[k, 2] = th
    return x, y, th, poses


_advance_plant_nb = njit(cache=True, error_model="numpy")(_advance_plant_np)


def advance_plant(x: float, y: float, th: float,
                  omegas: np.ndarray, thetas: np.ndarray, duties: np.ndarray,
                  n_steps: int, dt: float, gain: float, tau: float,
                  wheel_radius: float, lw_sum: float):
    """Advance 4 motors and the vehicle pose by n_steps physics substeps with
    duties held constant. Mutates omegas/thetas in place; returns the final
    pose and the per-step pose trace."""
    alpha = math.exp(-dt / tau)
    fn = _advance_plant_nb if _backend == "numba" else _advance_plant_np
    return fn(float(x), float(y), float(th), omegas, thetas, duties,
              int(n_steps), float(dt), alpha, float(gain), float(tau),
              float(wheel_radius), float(lw_sum))


def warmup() -> None:
    """Trigger jit compilation of every kernel (no-op on the numpy path)."""
    if _backend != "numba":
        return
    pts = np.array([0.5], dtype=np.float64)
    poly_x = np.array([0.0, 1.0, 1.0, 0.0])
    poly_y = np.array([0.0, 0.0, 1.0, 1.0])
    _points_in_polygon_nb(pts, pts, poly_x, poly_y)
    seg = np.array([0.0]), np.array([0.0]), np.array([1.0]), np.array([0.0])
    _polyline_hits_nb(pts, pts, *seg, np.array([0.0]), 0.1, True, 0.04, 0.03)
    _ray_box_nb(0.0, 0.0, 1.0, pts, pts, -pts,
                np.array([0.0, 1.0, 0.0, 1.0, 0.0, 1.0]))
    _advance_plant_nb(0.0, 0.0, 0.0, np.zeros(4), np.zeros(4), np.zeros(4),
                      1, 1e-3, math.exp(-1e-3 / 0.2), 20.0, 0.2, 0.04, 0.15)
