"""Fiber/channel configuration, per-frame sensing data, and frame file I/O.

The fiber carries M equal sections of arc length lam (the spatial
resolution).  A rigid channel of constant curvature kappa_c and bend angle
beta_c sits at the robot base; the fiber slides through it, so the channel
occupies a window of n_sections+1 consecutive sections whose position along
the fiber encodes the robot length.  Total fiber length: l_max + l_c = M*lam.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import FrameParseError, GeometryError, InvalidArgument


def iround(x: float) -> int:
    """Round half away from zero toward +inf; deterministic across platforms."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class FiberConfig:
    """Fiber discretization: section count M and spatial resolution (mm)."""

    m: int
    lam: float

    def __post_init__(self):
        if self.m < 2:
            raise GeometryError(f"need at least 2 fiber sections, got {self.m}")
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise GeometryError(f"spatial resolution must be > 0, got {self.lam}")

    @property
    def ds(self) -> float:
        """Section arc length; equal to the spatial resolution."""
        return self.lam

    @property
    def total_length(self) -> float:
        return self.m * self.lam


@dataclass(frozen=True)
class ChannelConfig:
    """Rigid curved channel at the robot base plus matcher thresholds.

    kappa_c      channel curvature (1/mm)
    beta_c       channel bend angle (rad)
    length       channel arc length l_c = beta_c / kappa_c (mm)
    n_sections   fiber sections spanned by the channel (window is n_sections+1)
    l_max        maximum robot length, M*lam - length (mm)
    lam          fiber spatial resolution (mm), copied from the fiber config
    eps_match    matching-residual acceptance threshold
    mu_jump_max  max index jump vs. the last valid match before rejection
    """

    kappa_c: float
    beta_c: float
    length: float
    n_sections: int
    l_max: float
    lam: float
    eps_match: float
    mu_jump_max: int

    @classmethod
    def from_fiber(
        cls,
        fiber: FiberConfig,
        kappa_c: float,
        beta_c: float,
        eps_match: float | None = None,
        mu_jump_max: int = 3,
    ) -> "ChannelConfig":
        """Derive the dependent channel fields from curvature and bend angle."""
        if kappa_c <= 0.0:
            raise GeometryError(f"channel curvature must be > 0, got {kappa_c}")
        length = beta_c / kappa_c
        n_sections = iround(length / fiber.lam)
        l_max = fiber.total_length - length
        if eps_match is None:
            eps_match = 0.25 * kappa_c * (n_sections + 1)
        return cls(kappa_c, beta_c, length, n_sections, l_max, fiber.lam, eps_match, mu_jump_max)

    @property
    def window(self) -> int:
        """Sections summed by the matcher: indices mu-n_sections .. mu."""
        return self.n_sections + 1


def validate_geometry(fiber: FiberConfig, channel: ChannelConfig) -> None:
    """Check the fiber/channel length budget and channel invariants.

    Raises GeometryError naming the violated relation; the length constraint
    l_max + l_c = M*lam is enforced to within one spatial resolution.
    """
    if channel.kappa_c <= 0.0:
        raise GeometryError(f"kappa_c must be > 0, got {channel.kappa_c}")
    if not (0.0 < channel.beta_c <= math.pi):
        raise GeometryError(f"beta_c must be in (0, pi], got {channel.beta_c}")
    if channel.n_sections < 2:
        raise GeometryError(
            f"channel must span at least 2 sections, got {channel.n_sections}"
        )
    if channel.l_max <= 0.0:
        raise GeometryError(f"l_max must be > 0, got {channel.l_max}")
    budget = abs(channel.l_max + channel.length - fiber.total_length)
    if budget > fiber.lam:
        raise GeometryError(
            "length budget violated: |l_max + l_c - M*lam| = "
            f"{budget:.6g} exceeds lam = {fiber.lam:.6g}"
        )
    if channel.n_sections >= fiber.m:
        raise GeometryError("channel cannot span the whole fiber")
    if channel.lam != fiber.lam:
        raise GeometryError(
            f"channel pitch {channel.lam} disagrees with fiber resolution {fiber.lam}"
        )
    if channel.eps_match <= 0.0:
        raise GeometryError(f"eps_match must be > 0, got {channel.eps_match}")
    if channel.mu_jump_max < 1:
        raise GeometryError(f"mu_jump_max must be >= 1, got {channel.mu_jump_max}")


def perturbed(channel: ChannelConfig, **fields) -> ChannelConfig:
    """Copy a channel config with selected fields overridden (test hook)."""
    return replace(channel, **fields)


@dataclass(frozen=True)
class FiberFrame:
    """One timestamped sample of per-section curvatures (1/mm) and twists (rad)."""

    t: float
    curvatures: np.ndarray
    twists: np.ndarray

    def __post_init__(self):
        k = np.ascontiguousarray(self.curvatures, dtype=float)
        tw = np.ascontiguousarray(self.twists, dtype=float)
        if k.ndim != 1 or tw.shape != k.shape:
            raise InvalidArgument("curvatures and twists must be equal-length 1-D arrays")
        if not (np.isfinite(k).all() and np.isfinite(tw).all() and math.isfinite(self.t)):
            raise InvalidArgument("frame entries must be finite")
        object.__setattr__(self, "curvatures", k)
        object.__setattr__(self, "twists", tw)

    @property
    def m(self) -> int:
        return len(self.curvatures)


def _frame_header(m: int) -> list[str]:
    return ["t"] + [f"kappa_{i}" for i in range(m)] + [f"tau_{i}" for i in range(m)]


def write_frames(frames, sink) -> None:
    """Write frames as CSV, one frame per row; numbers keep 17 significant digits."""
    frames = list(frames)
    own = isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__")
    f = open(sink, "w", encoding="utf-8", newline="\n") if own else sink
    try:
        m = frames[0].m if frames else 0
        f.write(",".join(_frame_header(m)) + "\n")
        for fr in frames:
            if fr.m != m:
                raise InvalidArgument("all frames in one file must share M")
            vals = [fr.t, *fr.curvatures, *fr.twists]
            f.write(",".join(f"{v:.17g}" for v in vals) + "\n")
    finally:
        if own:
            f.close()


def read_frames(source) -> list[FiberFrame]:
    """Read frames written by write_frames; raises FrameParseError with line numbers."""
    own = isinstance(source, (str, bytes)) or hasattr(source, "__fspath__")
    f = open(source, "r", encoding="utf-8") if own else source
    try:
        header = f.readline()
        if not header:
            raise FrameParseError("empty file, expected a header row", line=1)
        cols = header.rstrip("\n").split(",")
        if len(cols) < 1 or cols[0] != "t" or (len(cols) - 1) % 2 != 0:
            raise FrameParseError(f"malformed header with {len(cols)} columns", line=1)
        m = (len(cols) - 1) // 2
        if cols != _frame_header(m):
            raise FrameParseError("header does not match the frame schema", line=1)
        frames = []
        for lineno, raw in enumerate(f, start=2):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split(",")
            if len(parts) != 1 + 2 * m:
                raise FrameParseError(
                    f"expected {1 + 2 * m} columns, found {len(parts)}", line=lineno
                )
            try:
                vals = np.array([float(p) for p in parts])
            except ValueError as exc:
                raise FrameParseError(str(exc), line=lineno) from exc
            frames.append(FiberFrame(vals[0], vals[1 : 1 + m], vals[1 + m :]))
        return frames
    finally:
        if own:
            f.close()
