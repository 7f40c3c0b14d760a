"""Error statistics over estimate/truth series: length, endpoint, shape.

Shape error compares the bend/plane angles recovered from the two endpoints
via the constant-curvature closed form; the plane difference is weighted by
sin(bend_true) so a near-straight arc (indeterminate plane) contributes only
its bend error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .geometry import cc_angles_from_endpoint


@dataclass(frozen=True)
class SeriesStats:
    """Mean / population std / max of a nonnegative error series."""

    mean: float
    std: float
    max: float


def _stats(errors: np.ndarray) -> SeriesStats:
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise InvalidArgument("cannot summarize an empty error series")
    return SeriesStats(float(errors.mean()), float(errors.std()), float(errors.max()))


def length_error_stats(est, truth) -> SeriesStats:
    """Statistics of the absolute length error |est - truth| (mm)."""
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise InvalidArgument(f"series lengths differ: {est.shape} vs {truth.shape}")
    return _stats(np.abs(est - truth))


def endpoint_error(p_est, p_true) -> float:
    """Euclidean distance between estimated and true endpoints (mm)."""
    return float(np.linalg.norm(np.asarray(p_est, dtype=float) - np.asarray(p_true, dtype=float)))


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]; exact no-op for angles already in range."""
    if -math.pi < a <= math.pi:
        return a
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def shape_error_components(p_est, p_true) -> tuple[float, float]:
    """(bend difference, wrapped plane difference) in radians."""
    th_e, ph_e = cc_angles_from_endpoint(p_est)
    th_t, ph_t = cc_angles_from_endpoint(p_true)
    return th_e - th_t, wrap_angle(ph_e - ph_t)


def shape_error(p_est, p_true) -> float:
    """Combined bend/plane angle error in degrees.

    sqrt(dtheta^2 + (sin(theta_true)*dphi)^2); the sin weight removes the
    plane term as the true arc straightens.
    """
    dth, dph = shape_error_components(p_est, p_true)
    th_t, _ = cc_angles_from_endpoint(p_true)
    return math.degrees(math.hypot(dth, math.sin(th_t) * dph))


def endpoint_error_stats(p_est, p_true) -> SeriesStats:
    """Statistics of per-frame endpoint errors over aligned (N, 3) series."""
    p_est = np.asarray(p_est, dtype=float)
    p_true = np.asarray(p_true, dtype=float)
    if p_est.shape != p_true.shape:
        raise InvalidArgument("endpoint series shapes differ")
    return _stats(np.linalg.norm(p_est - p_true, axis=1))


def shape_error_stats(p_est, p_true) -> SeriesStats:
    """Statistics of per-frame shape errors (degrees) over aligned series."""
    p_est = np.asarray(p_est, dtype=float)
    p_true = np.asarray(p_true, dtype=float)
    if p_est.shape != p_true.shape:
        raise InvalidArgument("endpoint series shapes differ")
    return _stats([shape_error(e, t) for e, t in zip(p_est, p_true)])


@dataclass(frozen=True)
class MetricsReport:
    """One table row set: error statistics for one (task, method) series."""

    task: str
    method: str
    length: SeriesStats | None = None
    endpoint: SeriesStats | None = None
    shape: SeriesStats | None = None


REPORT_HEADER = "task,method,metric,mean,std,max"


def write_report(reports, sink) -> None:
    """Emit report rows as CSV: task, method, metric, mean, std, max."""
    own = isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__")
    f = open(sink, "w", encoding="utf-8", newline="\n") if own else sink
    try:
        f.write(REPORT_HEADER + "\n")
        for rep in reports:
            for metric, stats in (
                ("length_mm", rep.length),
                ("endpoint_mm", rep.endpoint),
                ("shape_deg", rep.shape),
            ):
                if stats is None:
                    continue
                f.write(
                    f"{rep.task},{rep.method},{metric},"
                    f"{stats.mean:.17g},{stats.std:.17g},{stats.max:.17g}\n"
                )
    finally:
        if own:
            f.close()
