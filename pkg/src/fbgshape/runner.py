"""Experiment loop shared by the CLI subcommands.

run_simulation synthesizes frames plus ground truth; run_estimation drives
the sensing stack (matcher -> filter, plus the dead-reckoning baseline) over
frames from either source.  Estimation consumes only the frames and the
configuration — never the truth — so replaying recorded frames reproduces
the estimate file byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import estimator, length_sensor, metrics, simulator
from .config import RunSetup
from .errors import FrameParseError
from .fiber import FiberFrame, iround, write_frames
from .geometry import SectionArc, Transform, reconstruct_shape


@dataclass(frozen=True)
class TruthRecord:
    t: float
    q: np.ndarray
    l_true: float
    kappa_r: float
    phi_r: float
    endpoint: np.ndarray


@dataclass(frozen=True)
class EstimateRecord:
    t: float
    mu: int
    l_e: float
    residual: float
    valid: bool
    l_hat: float
    jac: np.ndarray
    endpoint: np.ndarray
    l_baseline: float
    endpoint_baseline: np.ndarray


@dataclass(frozen=True)
class EstimationResult:
    records: list
    states: list  # FilterState after every initialized step, for diagnostics


def n_steps(setup: RunSetup) -> int:
    return iround(setup.traj.run_duration() / setup.filt.dt)


def run_simulation(setup: RunSetup) -> tuple[list, list]:
    """Synthesize (frames, truth records) for the configured run."""
    dt = setup.filt.dt
    rng = np.random.default_rng(setup.noise.seed)
    truth = simulator.make_truth(setup.g, setup.l0, setup.traj)
    frames, truths = [], []
    for i in range(n_steps(setup)):
        t = i * dt
        frames.append(
            simulator.synth_frame(truth, setup.fiber, setup.channel, setup.noise, setup.events, t, rng)
        )
        truths.append(
            TruthRecord(
                t=t, q=truth.q.copy(), l_true=truth.l_true,
                kappa_r=truth.kappa_r, phi_r=truth.phi_r,
                endpoint=simulator.truth_endpoint(truth),
            )
        )
        truth = simulator.robot_step(truth, setup.traj, t, dt)
    return frames, truths


def length_to_index(l_hat: float, setup: RunSetup) -> int:
    """Invert the sensor datum: starting index implied by a length estimate."""
    mu0, ldat = setup.datum
    mu_hat = mu0 + iround((ldat - l_hat) / setup.fiber.lam)
    return min(max(mu_hat, 0), setup.fiber.m - 1)


def shape_endpoint(frame: FiberFrame, mu_start: int, setup: RunSetup) -> np.ndarray:
    """Distal endpoint chained from the sections beyond the starting index.

    Uses the frame's sensed curvatures/twists; the bend-plane twist sits on
    the first robot section, so the origin must not overshoot it.  Callers
    anchor at the matcher's index while it is valid (it is exact on clean
    frames) and fall back to the filtered length across rejections.
    """
    if mu_start >= setup.fiber.m - 1:
        return np.zeros(3)
    arcs = [
        SectionArc(frame.curvatures[s], frame.twists[s], setup.fiber.ds)
        for s in range(mu_start + 1, setup.fiber.m)
    ]
    return reconstruct_shape(arcs, Transform.identity())[-1].translation


def run_estimation(frames, setup: RunSetup) -> EstimationResult:
    """Drive matcher + filter + baseline over a frame sequence."""
    if not frames:
        raise FrameParseError("no frames to estimate over")
    cfg = setup.filt
    prev_valid = None
    state = None
    l_base = float("nan")
    q_prev = None
    records, states = [], []
    nan3 = np.full(3, np.nan)
    for frame in frames:
        meas = length_sensor.match_channel_index(frame, setup.channel, prev_valid, setup.datum)
        if meas.valid:
            prev_valid = meas
        q_now = simulator.commanded_actuation(setup.traj, setup.l0, setup.g, frame.t)
        if state is None:
            if meas.valid:
                state = estimator.init_state(meas, cfg)
                l_base = meas.l_e
                states.append(state)
        else:
            dq = q_now - q_prev
            state = estimator.step(state, dq, meas, cfg)
            l_base = estimator.baseline_integrate(l_base, setup.baseline_jac, dq)
            states.append(state)
        q_prev = q_now
        if state is None:
            records.append(
                EstimateRecord(
                    t=frame.t, mu=meas.mu, l_e=meas.l_e, residual=meas.residual,
                    valid=meas.valid, l_hat=float("nan"), jac=np.full(cfg.n, np.nan),
                    endpoint=nan3, l_baseline=float("nan"), endpoint_baseline=nan3,
                )
            )
            continue
        mu_shape = meas.mu if meas.valid else length_to_index(state.length, setup)
        records.append(
            EstimateRecord(
                t=frame.t, mu=meas.mu, l_e=meas.l_e, residual=meas.residual,
                valid=meas.valid, l_hat=state.length, jac=state.jac.copy(),
                endpoint=shape_endpoint(frame, mu_shape, setup),
                l_baseline=l_base,
                endpoint_baseline=shape_endpoint(frame, length_to_index(l_base, setup), setup),
            )
        )
    return EstimationResult(records=records, states=states)


def build_reports(est: EstimationResult, truths, label: str) -> list:
    """Tables-style statistics for the filter and the model-based baseline."""
    idx = [i for i, r in enumerate(est.records) if np.isfinite(r.l_hat)]
    l_true = np.array([truths[i].l_true for i in idx])
    p_true = np.array([truths[i].endpoint for i in idx])
    out = []
    for method, l_attr, p_attr in (
        ("model_based", "l_baseline", "endpoint_baseline"),
        ("filter", "l_hat", "endpoint"),
    ):
        l_est = np.array([getattr(est.records[i], l_attr) for i in idx])
        p_est = np.array([getattr(est.records[i], p_attr) for i in idx])
        out.append(
            metrics.MetricsReport(
                task=label,
                method=method,
                length=metrics.length_error_stats(l_est, l_true),
                endpoint=metrics.endpoint_error_stats(p_est, p_true),
                shape=metrics.shape_error_stats(p_est, p_true),
            )
        )
    return out


def _fmt(v) -> str:
    return f"{v:.17g}"


def write_truth_csv(truths, path) -> None:
    n = len(truths[0].q) if truths else 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        qcols = ",".join(f"q_{i}" for i in range(n))
        f.write(f"t,{qcols},l_true,kappa_r,phi_r,end_x,end_y,end_z\n")
        for r in truths:
            vals = [r.t, *r.q, r.l_true, r.kappa_r, r.phi_r, *r.endpoint]
            f.write(",".join(_fmt(v) for v in vals) + "\n")


def write_estimate_csv(records, path) -> None:
    n = len(records[0].jac) if records else 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        jcols = ",".join(f"jac_{i}" for i in range(n))
        f.write(
            f"t,mu,l_e,residual,valid,l_hat,{jcols},end_x,end_y,end_z,"
            "l_baseline,bl_end_x,bl_end_y,bl_end_z\n"
        )
        for r in records:
            vals = [
                _fmt(r.t), str(r.mu), _fmt(r.l_e), _fmt(r.residual), str(int(r.valid)),
                _fmt(r.l_hat), *(_fmt(v) for v in r.jac), *(_fmt(v) for v in r.endpoint),
                _fmt(r.l_baseline), *(_fmt(v) for v in r.endpoint_baseline),
            ]
            f.write(",".join(vals) + "\n")


def write_length_series_csv(est: EstimationResult, truths, path) -> None:
    """Length-vs-time curves: truth, model-based baseline, filter."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("t,l_true,l_model_based,l_filter\n")
        for r, tr in zip(est.records, truths):
            f.write(",".join(_fmt(v) for v in (r.t, tr.l_true, r.l_baseline, r.l_hat)) + "\n")


def write_endpoint_error_series_csv(est: EstimationResult, truths, path) -> None:
    """Endpoint-error-vs-time curves for both methods."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("t,err_model_based,err_filter\n")
        for r, tr in zip(est.records, truths):
            eb = metrics.endpoint_error(r.endpoint_baseline, tr.endpoint)
            ef = metrics.endpoint_error(r.endpoint, tr.endpoint)
            f.write(",".join(_fmt(v) for v in (r.t, eb, ef)) + "\n")


def write_run_outputs(out_dir, frames, truths, est: EstimationResult, reports) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_frames(frames, out_dir / "frames.csv")
    write_truth_csv(truths, out_dir / "truth.csv")
    write_estimate_csv(est.records, out_dir / "estimate.csv")
    write_length_series_csv(est, truths, out_dir / "length_series.csv")
    write_endpoint_error_series_csv(est, truths, out_dir / "endpoint_error_series.csv")
    metrics.write_report(reports, out_dir / "report.csv")
