"""Model-free Kalman filter for joint length and length-Jacobian estimation.

State x = [l, jac, delta] of size 2n+1: robot length (mm), the n length
sensitivities mapping actuator displacement to length change, and their slow
drift rates.  Window-matched lengths arrive only when the matched index
changes (the sensor quantizes at the fiber resolution), so the filter runs in
two modes: predict+update on a fresh valid measurement, predict-only
otherwise.  Between measurements the length evolves as the exact discrete
integral of jac . dq, which keeps the estimate temporally continuous.

baseline_integrate is the uncalibrated comparison method: dead-reckoning the
length with a fixed sensitivity vector.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgument, NumericalDegeneracy
from .length_sensor import LengthMeasurement


@dataclass(frozen=True)
class FilterConfig:
    """Dimensions, sampling time and noise covariances of the filter.

    q: (2n+1)x(2n+1) process noise; y: scalar measurement variance (mm^2);
    p0: initial covariance; jac0: initial length-sensitivity vector.
    joseph switches the covariance update to the symmetric Joseph form.
    """

    n: int
    dt: float
    q: np.ndarray
    y: float
    p0: np.ndarray
    jac0: np.ndarray
    joseph: bool = False

    def __post_init__(self):
        d = 2 * self.n + 1
        q = np.asarray(self.q, dtype=float)
        p0 = np.asarray(self.p0, dtype=float)
        jac0 = np.asarray(self.jac0, dtype=float)
        if self.n < 1:
            raise InvalidArgument(f"need at least one actuator, got n={self.n}")
        if self.dt <= 0.0:
            raise InvalidArgument(f"sampling time must be > 0, got {self.dt}")
        if q.shape != (d, d) or p0.shape != (d, d) or jac0.shape != (self.n,):
            raise InvalidArgument("covariance/jacobian shapes do not match n")
        if self.y <= 0.0:
            raise InvalidArgument(f"measurement variance must be > 0, got {self.y}")
        for name, mat in (("q", q), ("p0", p0)):
            if np.abs(mat - mat.T).max() > 1e-9:
                raise InvalidArgument(f"{name} must be symmetric")
            if np.linalg.eigvalsh(mat).min() < -1e-9:
                raise InvalidArgument(f"{name} must be positive semidefinite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "jac0", jac0)

    @classmethod
    def default(cls, n: int, dt: float, lam: float, jac0, **overrides) -> "FilterConfig":
        """Noise defaults sized to the lam-quantized measurement."""
        jac0 = np.asarray(jac0, dtype=float)
        q = np.diag(
            np.concatenate(([1e-4], np.full(n, 1e-6), np.full(n, 1e-8)))
        )
        p0 = np.diag(
            np.concatenate(
                (
                    [lam**2],
                    np.full(n, 0.25 * float(jac0 @ jac0)),
                    np.full(n, 1e-4),
                )
            )
        )
        y = (lam / 2.0) ** 2
        kwargs = dict(n=n, dt=dt, q=q, y=y, p0=p0, jac0=jac0)
        kwargs.update(overrides)
        return cls(**kwargs)


@dataclass(frozen=True)
class FilterState:
    """Estimate x = [l, jac, delta] with covariance p at time t.

    last_mu remembers the starting index of the last accepted measurement;
    a repeat of the same index carries no new information.
    """

    x: np.ndarray
    p: np.ndarray
    t: float
    last_mu: int | None = None

    @property
    def n(self) -> int:
        return (len(self.x) - 1) // 2

    @property
    def length(self) -> float:
        return float(self.x[0])

    @property
    def jac(self) -> np.ndarray:
        return self.x[1 : self.n + 1]

    @property
    def delta(self) -> np.ndarray:
        return self.x[self.n + 1 :]


def init_state(meas: LengthMeasurement, cfg: FilterConfig) -> FilterState:
    """Seed the filter from the first valid sensor measurement."""
    if not meas.valid:
        raise InvalidArgument("cannot initialize the filter from an invalid measurement")
    x = np.concatenate(([meas.l_e], cfg.jac0, np.zeros(cfg.n)))
    return FilterState(x=x, p=cfg.p0.copy(), t=meas.t, last_mu=meas.mu)


def build_transition(dq, dt: float, n: int) -> np.ndarray:
    """State transition for one sampling step.

    Row 0 adds jac . dq to the length; the jac block integrates its drift
    rates over dt; the drift block is constant.  dq is the actuator
    displacement over the step (velocity times dt).
    """
    dq = np.asarray(dq, dtype=float)
    if dq.shape != (n,) or not np.isfinite(dq).all():
        raise InvalidArgument(f"dq must be a finite vector of length {n}")
    d = 2 * n + 1
    a = np.eye(d)
    a[0, 1 : n + 1] = dq
    a[1 : n + 1, n + 1 :] = dt * np.eye(n)
    return a


def _symmetrize(p: np.ndarray) -> np.ndarray:
    return (p + p.T) / 2.0


def predict(state: FilterState, dq, cfg: FilterConfig) -> FilterState:
    """Propagate state and covariance one step; advances t by dt."""
    a = build_transition(dq, cfg.dt, cfg.n)
    x = a @ state.x
    p = _symmetrize(a @ state.p @ a.T + cfg.q)
    return replace(state, x=x, p=p, t=state.t + cfg.dt)


def update(state: FilterState, z: float, cfg: FilterConfig) -> FilterState:
    """Scalar measurement update of the length component."""
    if not np.isfinite(z):
        raise InvalidArgument(f"measurement must be finite, got {z}")
    d = 2 * cfg.n + 1
    # H = [1, 0 ... 0]: the innovation variance is a scalar.
    s = state.p[0, 0] + cfg.y
    if s <= 0.0:
        raise NumericalDegeneracy(f"innovation variance {s} <= 0")
    k = state.p[:, 0] / s
    x = state.x + k * (z - state.x[0])
    if cfg.joseph:
        ikh = np.eye(d)
        ikh[:, 0] -= k
        p = ikh @ state.p @ ikh.T + cfg.y * np.outer(k, k)
    else:
        p = state.p - np.outer(k, state.p[0, :])
    return replace(state, x=x, p=_symmetrize(p))


def step(state: FilterState, dq, meas: LengthMeasurement | None, cfg: FilterConfig) -> FilterState:
    """One filter iteration.

    Mode 1 (fresh index: measurement valid and mu != last_mu): predict then
    update with the measured length.  Mode 2 (anything else): predict only,
    coasting on the calibrated model.
    """
    fresh = meas is not None and meas.valid and meas.mu != state.last_mu
    out = predict(state, dq, cfg)
    if fresh:
        out = replace(update(out, meas.l_e, cfg), last_mu=meas.mu)
    return out


def baseline_integrate(length: float, jac, dq) -> float:
    """Dead-reckoned length update with a fixed sensitivity vector."""
    jac = np.asarray(jac, dtype=float)
    dq = np.asarray(dq, dtype=float)
    if jac.shape != dq.shape:
        raise InvalidArgument("jac and dq must have matching shapes")
    return float(length + jac @ dq)


def covariance_health(state: FilterState) -> tuple[float, float]:
    """(max asymmetry, min eigenvalue) of the covariance, for diagnostics."""
    asym = float(np.abs(state.p - state.p.T).max())
    eig = float(np.linalg.eigvalsh(_symmetrize(state.p)).min())
    return asym, eig
