"""Channel-window matching: locate the fiber sections inside the rigid channel.

The window of n_sections+1 consecutive curvatures whose sum best matches the
channel's constant curvature marks the channel's distal end (starting index
mu); the robot's effective length follows from mu through a linear datum.
Deflections of the robot to a similar curvature can produce spurious minima,
so matches far from the last accepted index are rejected rather than used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import GeometryError, InvalidArgument
from .fiber import ChannelConfig, FiberFrame

# The paper-convention datum: index 0 corresponds to the full robot length.
# The simulation pipeline calibrates its own (mu0, l0) pair instead.


@dataclass(frozen=True)
class LengthMeasurement:
    """One matcher output: starting index, effective length, and validity.

    l_e is NaN when the match was rejected (valid=False); invalidity is a
    data state for the filter's predict-only mode, not an error.
    """

    mu: int
    l_e: float
    residual: float
    valid: bool
    t: float


def matching_cost(curvatures, mu: int, channel: ChannelConfig) -> float:
    """|sum of the window ending at mu minus kappa_c * (n_sections+1)|."""
    curvatures = np.asarray(curvatures, dtype=float)
    lo = mu - channel.n_sections
    if lo < 0 or mu >= len(curvatures):
        raise InvalidArgument(
            f"window [{lo}, {mu}] out of range for {len(curvatures)} sections"
        )
    return float(abs(curvatures[lo : mu + 1].sum() - channel.kappa_c * channel.window))


def admissible_range(m: int, channel: ChannelConfig) -> range:
    """Starting indexes whose full window lies inside the fiber."""
    return range(channel.n_sections, m)


def effective_length(
    mu: int, channel: ChannelConfig, datum: tuple[int, float] | None = None
) -> float:
    """Effective robot length from the starting index.

    l_e = l0 - lam_per_section * (mu - mu0) for the calibration datum
    (mu0, l0); the default datum (0, l_max) reproduces the convention that
    index zero marks the fully extended robot.
    """
    mu0, l0 = datum if datum is not None else (0, channel.l_max)
    l_e = l0 - channel.lam * (mu - mu0)
    if l_e < 0.0:
        raise GeometryError(
            f"effective length {l_e:.3f} mm < 0 for mu={mu}; datum miscalibrated"
        )
    return l_e


def match_channel_index(
    frame: FiberFrame,
    channel: ChannelConfig,
    prev: LengthMeasurement | None = None,
    datum: tuple[int, float] | None = None,
) -> LengthMeasurement:
    """Locate the channel window in one frame and convert it to a length.

    The best-matching window wins; exact cost ties break toward prev.mu and
    then toward the smallest index.  The measurement is invalid when the
    residual exceeds eps_match, the index jumped more than mu_jump_max
    sections from prev (callers should pass the last *valid* measurement), or
    the implied length is negative under the datum.  Never raises: invalidity
    is a data state the filter coasts through.
    """
    costs = kernels.window_costs(
        np.ascontiguousarray(frame.curvatures), channel.window, channel.kappa_c
    )
    if len(costs) == 0:
        raise InvalidArgument("frame has fewer sections than the channel window")
    first = channel.n_sections  # mu of costs[0]
    best = float(costs.min())
    ties = np.flatnonzero(costs == best)
    if prev is not None and len(ties) > 1:
        mu = first + int(min(ties, key=lambda j: (abs(first + j - prev.mu), j)))
    else:
        mu = first + int(ties[0])

    valid = best <= channel.eps_match
    if prev is not None and abs(mu - prev.mu) > channel.mu_jump_max:
        valid = False
    l_e = float("nan")
    if valid:
        try:
            l_e = effective_length(mu, channel, datum)
        except GeometryError:
            valid = False
    return LengthMeasurement(mu=mu, l_e=l_e, residual=best, valid=valid, t=frame.t)
