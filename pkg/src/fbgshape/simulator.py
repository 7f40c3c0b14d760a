"""Synthetic ground truth: an extensible constant-curvature robot on a fiber.

The robot is a single constant-curvature segment whose length is linear in
the actuator positions, l = l0 + g . q.  As it compresses, the fiber slides
proximally through the base channel, so the channel window moves distally
along the fiber: with the fiber's distal end fixed to the robot tip, the
window ends at index mu = M-1 - round(l/lam) and the sections beyond it lie
on the robot.  Frames are synthesized from that layout plus disturbance
bumps and iid Gaussian sensor noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument, InvalidState
from .fiber import ChannelConfig, FiberConfig, FiberFrame, iround
from .geometry import cc_arc_endpoint

PROFILES = ("triangle", "hold_extend_hold")


@dataclass(frozen=True)
class TrajectorySpec:
    """Stroke protocol plus the deflection schedule.

    triangle: compress by `stroke` at `velocity`, then extend back, repeating.
    hold_extend_hold: hold l0, ramp up by `stroke` centered in `duration`, hold.
    bend_schedule: piecewise-constant (t_from, kappa, phi) rows, first row at 0.
    jac_drift_amp/period: optional slow sinusoidal drift of the true length
    sensitivities (emulates unmodeled elastic effects).
    """

    velocity: float
    stroke: float
    profile: str = "triangle"
    duration: float | None = None
    bend_schedule: tuple = ((0.0, 0.0, 0.0),)
    jac_drift_amp: float = 0.0
    jac_drift_period: float = 60.0

    def __post_init__(self):
        if self.velocity <= 0.0:
            raise InvalidArgument(f"velocity must be > 0, got {self.velocity}")
        if self.stroke <= 0.0:
            raise InvalidArgument(f"stroke must be > 0, got {self.stroke}")
        if self.profile not in PROFILES:
            raise InvalidArgument(f"profile must be one of {PROFILES}")
        sched = tuple(tuple(float(v) for v in row) for row in self.bend_schedule)
        if not sched or sched[0][0] > 0.0 or any(len(r) != 3 for r in sched):
            raise InvalidArgument("bend_schedule needs (t_from, kappa, phi) rows from t=0")
        object.__setattr__(self, "bend_schedule", sched)

    @property
    def period(self) -> float:
        """One full stretch/compress cycle of the triangle profile."""
        return 2.0 * self.stroke / self.velocity

    def run_duration(self) -> float:
        return self.duration if self.duration is not None else self.period

    def bend_at(self, t: float) -> tuple[float, float]:
        kappa, phi = 0.0, 0.0
        for t_from, k, p in self.bend_schedule:
            if t_from <= t:
                kappa, phi = k, p
        return kappa, phi


def reference_length(traj: TrajectorySpec, l0: float, t: float) -> float:
    """Commanded robot length at time t (exact, not integrated)."""
    if traj.profile == "triangle":
        half = traj.stroke / traj.velocity
        k = math.floor(t / half)
        phase = t - k * half
        if k % 2 == 0:
            return l0 - traj.velocity * phase
        return l0 - traj.stroke + traj.velocity * phase
    # hold_extend_hold: ramp centered in the run
    ramp = traj.stroke / traj.velocity
    t_on = max(0.0, (traj.run_duration() - ramp) / 2.0)
    if t < t_on:
        return l0
    if t < t_on + ramp:
        return l0 + traj.velocity * (t - t_on)
    return l0 + traj.stroke


def commanded_actuation(traj: TrajectorySpec, l0: float, g, t: float) -> np.ndarray:
    """Equal-drive actuator plan tracking the commanded length at time t.

    Exact in t (no integration), so independently computed actuation
    sequences agree bitwise — replay relies on this.
    """
    g = np.asarray(g, dtype=float)
    return np.full(len(g), (reference_length(traj, l0, t) - l0) / float(g.sum()))


@dataclass(frozen=True)
class DisturbanceEvent:
    """Additive curvature bump over a fixed section range while active."""

    t_start: float
    t_end: float
    lo: int
    hi: int
    dkappa: float

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise InvalidArgument("disturbance needs t_start < t_end")
        if self.lo < 0 or self.hi < self.lo:
            raise InvalidArgument("disturbance needs 0 <= lo <= hi")

    def active(self, t: float) -> bool:
        return self.t_start <= t < self.t_end


@dataclass(frozen=True)
class NoiseSpec:
    """Per-section iid Gaussian noise levels and the run seed."""

    sigma_kappa: float = 0.0
    sigma_tau: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_kappa < 0.0 or self.sigma_tau < 0.0:
            raise InvalidArgument("noise sigmas must be >= 0")


@dataclass(frozen=True)
class RobotTruth:
    """Ground-truth robot state: actuation, length, bend, true sensitivities."""

    q: np.ndarray
    qdot: np.ndarray
    l_true: float
    kappa_r: float
    phi_r: float
    g: np.ndarray
    l0: float
    g0: np.ndarray = field(default=None)  # nominal (undrifted) sensitivities

    def __post_init__(self):
        if self.g0 is None:
            object.__setattr__(self, "g0", np.array(self.g, dtype=float))


def make_truth(g, l0: float, traj: TrajectorySpec | None = None) -> RobotTruth:
    """Initial truth at q = 0; bend taken from the schedule at t = 0."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or len(g) < 1 or g.sum() == 0.0:
        raise InvalidArgument("true sensitivities g must be a vector with nonzero sum")
    kappa_r, phi_r = traj.bend_at(0.0) if traj is not None else (0.0, 0.0)
    n = len(g)
    return RobotTruth(
        q=np.zeros(n), qdot=np.zeros(n), l_true=l0,
        kappa_r=kappa_r, phi_r=phi_r, g=g.copy(), l0=l0, g0=g.copy(),
    )


def robot_step(truth: RobotTruth, traj: TrajectorySpec, t: float, dt: float) -> RobotTruth:
    """Advance the truth from t to t+dt.

    All actuators are driven equally to track the commanded length; using the
    step-averaged velocity makes stroke reversals exact regardless of dt.
    """
    if t < 0.0 or dt <= 0.0:
        raise InvalidArgument("need t >= 0 and dt > 0")
    q = commanded_actuation(traj, truth.l0, truth.g0, t + dt)
    qdot = (q - truth.q) / dt
    if traj.jac_drift_amp != 0.0:
        g = truth.g0 * (1.0 + traj.jac_drift_amp * math.sin(2.0 * math.pi * (t + dt) / traj.jac_drift_period))
    else:
        g = truth.g0
    kappa_r, phi_r = traj.bend_at(t + dt)
    l_true = truth.l0 + float(g @ q)
    return replace(truth, q=q, qdot=qdot, l_true=l_true, g=g, kappa_r=kappa_r, phi_r=phi_r)


def true_start_index(l_true: float, fc: FiberConfig, cc: ChannelConfig) -> int:
    """Index of the channel's distal end for a given robot length.

    The robot occupies round(l_true/lam) distal sections; the channel window
    must fit proximally of them.
    """
    if not (0.0 < l_true <= cc.l_max):
        raise InvalidState(f"robot length {l_true:.3f} mm outside (0, {cc.l_max:.3f}]")
    n_rob = iround(l_true / fc.lam)
    mu = fc.m - 1 - n_rob
    if mu < cc.n_sections:
        raise InvalidState(
            f"robot too long for the fiber: window would start at {mu} < {cc.n_sections}"
        )
    if n_rob < 1:
        raise InvalidState(f"robot length {l_true:.3f} mm spans no fiber section")
    return mu


def sensor_datum(fc: FiberConfig) -> tuple[int, float]:
    """Length-sensor calibration pair matching the simulator's fiber layout.

    At index M-1 the robot length is zero; each index step is one resolution.
    """
    return fc.m - 1, 0.0


def synth_frame(
    truth: RobotTruth,
    fc: FiberConfig,
    cc: ChannelConfig,
    noise: NoiseSpec,
    events,
    t: float,
    rng: np.random.Generator,
) -> FiberFrame:
    """Synthesize the per-section curvatures/twists the sensing stack sees.

    Layout: zeros proximally (slack fiber), the channel plateau at kappa_c,
    then the robot sections at the current bend, with the bend-plane twist on
    the first robot section.  Active disturbances add their curvature bump,
    then iid Gaussian noise is applied.
    """
    mu = true_start_index(truth.l_true, fc, cc)
    curv = np.zeros(fc.m)
    twists = np.zeros(fc.m)
    curv[mu - cc.n_sections : mu + 1] = cc.kappa_c
    curv[mu + 1 :] = truth.kappa_r
    twists[mu + 1] = truth.phi_r
    for ev in events:
        if ev.hi >= fc.m:
            raise InvalidArgument(f"disturbance range [{ev.lo}, {ev.hi}] leaves the fiber")
        if ev.active(t):
            curv[ev.lo : ev.hi + 1] += ev.dkappa
    if noise.sigma_kappa > 0.0:
        curv = curv + rng.normal(0.0, noise.sigma_kappa, fc.m)
    if noise.sigma_tau > 0.0:
        twists = twists + rng.normal(0.0, noise.sigma_tau, fc.m)
    return FiberFrame(t=t, curvatures=curv, twists=twists)


def truth_endpoint(truth: RobotTruth) -> np.ndarray:
    """Ground-truth distal endpoint in the robot base frame."""
    return cc_arc_endpoint(truth.kappa_r, truth.phi_r, truth.l_true)
