"""Fixed-step integration of the planar and angular flows.

Controls are piecewise constant. Each segment is integrated with classical
RK4 on a uniform grid whose step divides the segment length; a step-doubling
estimate of the local error is checked before integrating and
:class:`StepTooLarge` is raised when it exceeds ``ERROR_LIMIT``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .angular import ROTATIONAL, classify_case, pqr, projective_distance
from .mat2 import Mat2, Vec2

DEFAULT_DT = 1e-3
ERROR_LIMIT = 1e-3
# number of directions sampled by the angular error monitor
_MONITOR_ANGLES = 64


class StepTooLarge(ValueError):
    """The step-doubling error estimate exceeds the configured limit."""


@dataclass(frozen=True)
class ControlSchedule:
    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        segs = tuple((float(d), float(u)) for d, u in self.segments)
        if not segs:
            raise ValueError("a schedule needs at least one segment")
        for d, u in segs:
            if not (math.isfinite(d) and d > 0):
                raise ValueError(f"segment durations must be positive and finite, got {d}")
            if not math.isfinite(u):
                raise ValueError(f"control values must be finite, got {u}")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, u: float, duration: float) -> "ControlSchedule":
        return cls(((duration, u),))

    @classmethod
    def parse(cls, text: str) -> "ControlSchedule":
        """Parse ``"dur:u,dur:u,..."``."""
        segments = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            parts = item.split(":")
            if len(parts) != 2:
                raise ValueError(f"bad schedule segment {item!r}, expected dur:u")
            try:
                segments.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(f"bad schedule segment {item!r}, expected numbers") from None
        return cls(tuple(segments))

    @property
    def total_duration(self) -> float:
        return math.fsum(d for d, _ in self.segments)

    def fitted(self, t_end: float) -> "ControlSchedule":
        """Cut at ``t_end``, or hold the last control until ``t_end``."""
        if not (math.isfinite(t_end) and t_end > 0):
            raise ValueError(f"final time must be positive, got {t_end}")
        out, elapsed = [], 0.0
        for d, u in self.segments:
            if elapsed + d >= t_end:
                out.append((t_end - elapsed, u))
                break
            out.append((d, u))
            elapsed += d
        else:
            if t_end - elapsed > 0:
                out.append((t_end - elapsed, self.segments[-1][1]))
        # drop a rounding-sized stub at the end
        out = [s for s in out if s[0] > 1e-15 * t_end] or [(t_end, self.segments[0][1])]
        return ControlSchedule(tuple(out))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 2) for planar, (n,) unwrapped angles for angular
    controls: np.ndarray
    kind: str
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.times)


def _segment_grid(duration: float, dt: float) -> tuple[int, float]:
    n = max(1, math.ceil(duration / dt - 1e-9))
    return n, duration / n


def _check_dt(dt: float):
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")


def planar_step_error(m: Mat2, h: float) -> float:
    """Relative local error estimate of one RK4 step of size ``h``."""
    arr = m.to_array()
    full = _kernels.rk4_step_matrix(arr, h)
    half = _kernels.rk4_step_matrix(arr, 0.5 * h)
    return float(np.linalg.norm(full - half @ half, 2)) / 15.0


def _angular_step(P, Q, R, th, h):
    def f(x):
        return 0.5 * (P * np.cos(2.0 * x) + Q * np.sin(2.0 * x) + R)

    k1 = f(th)
    k2 = f(th + 0.5 * h * k1)
    k3 = f(th + 0.5 * h * k2)
    k4 = f(th + h * k3)
    return th + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def angular_step_error(P: float, Q: float, R: float, h: float) -> float:
    """Worst step-doubling estimate over a grid of starting angles."""
    th = np.pi * np.arange(_MONITOR_ANGLES) / _MONITOR_ANGLES
    full = _angular_step(P, Q, R, th, h)
    half = _angular_step(P, Q, R, _angular_step(P, Q, R, th, 0.5 * h), 0.5 * h)
    return float(np.max(np.abs(full - half))) / 15.0


def integrate_planar(a: Mat2, b: Mat2, schedule: ControlSchedule, x0: Vec2,
                     dt: float = DEFAULT_DT) -> Trajectory:
    _check_dt(dt)
    if x0.is_zero():
        raise ValueError("x0 must be nonzero")
    times, states, controls = [np.zeros(1)], [np.array([[x0.x1, x0.x2]])], [np.array([schedule.segments[0][1]])]
    t0, x = 0.0, np.array([x0.x1, x0.x2])
    truncated = False
    for duration, u in schedule.segments:
        m = a + b * u
        n, h = _segment_grid(duration, dt)
        err = planar_step_error(m, h)
        if err > ERROR_LIMIT:
            raise StepTooLarge(f"step {h:g} at u={u:g} has local error estimate {err:.3g}")
        seg, done = _kernels.planar_rk4(m.to_array(), x, h, n)
        # the kernel returns done + 1 rows
        seg = seg[: done + 1]
        times.append(t0 + h * np.arange(1, done + 1))
        states.append(seg[1:])
        controls.append(np.full(done, u))
        if done < n:
            truncated = True
            break
        t0 += duration
        x = seg[-1].copy()
    return Trajectory(np.concatenate(times), np.vstack(states), np.concatenate(controls),
                      "planar", truncated)


def integrate_angular(a: Mat2, b: Mat2, schedule: ControlSchedule, theta0: float,
                      dt: float = DEFAULT_DT) -> Trajectory:
    """Angular flow with an unwrapped (cumulative) angle."""
    _check_dt(dt)
    times, thetas, controls = [np.zeros(1)], [np.array([float(theta0)])], [np.array([schedule.segments[0][1]])]
    t0, th = 0.0, float(theta0)
    for duration, u in schedule.segments:
        c = pqr(a, b, u)
        n, h = _segment_grid(duration, dt)
        err = angular_step_error(c.P, c.Q, c.R, h)
        if err > ERROR_LIMIT:
            raise StepTooLarge(f"step {h:g} at u={u:g} has local error estimate {err:.3g}")
        seg = _kernels.angular_rk4(c.P, c.Q, c.R, th, h, n)
        times.append(t0 + h * np.arange(1, n + 1))
        thetas.append(seg[1:])
        controls.append(np.full(n, u))
        t0 += duration
        th = float(seg[-1])
    return Trajectory(np.concatenate(times), np.concatenate(thetas), np.concatenate(controls),
                      "angular")


def consistency_planar_vs_angular(a: Mat2, b: Mat2, schedule: ControlSchedule, x0: Vec2,
                                  dt: float = DEFAULT_DT) -> float:
    """Largest projective distance between the two flows along the schedule."""
    planar = integrate_planar(a, b, schedule, x0, dt)
    angular = integrate_angular(a, b, schedule, math.atan2(x0.x2, x0.x1), dt)
    n = len(planar)
    phi = np.arctan2(planar.states[:, 1], planar.states[:, 0])
    d = np.mod(phi - angular.states[:n], np.pi)
    return float(np.max(np.minimum(d, np.pi - d)))


def reach_angle(a: Mat2, b: Mat2, u: float, theta0: float, theta1: float,
                eps: float | None = None) -> float | None:
    """First time the constant-``u`` angular flow carries ``theta0`` to ``theta1`` (mod pi).

    Only defined when ``Delta(u) < 0``; otherwise ``None``. With
    ``tan(phi) = ((R - P) tan(theta) + Q) / omega`` the flow is ``phi' = omega / 2``.
    """
    c = pqr(a, b, u)
    if classify_case(c, eps).tag != ROTATIONAL:
        return None
    omega = math.sqrt(c.R * c.R - c.P * c.P - c.Q * c.Q)
    k = c.R - c.P

    def phase(theta):
        return math.atan2(k * math.sin(theta) + c.Q * math.cos(theta), omega * math.cos(theta))

    if projective_distance(theta0, theta1) == 0.0:
        return 0.0
    dphi = (phase(theta1) - phase(theta0)) % math.pi
    return 2.0 * dphi / omega
