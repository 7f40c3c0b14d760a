"""Run configuration: flat key=value text with [section] headers.

Unknown sections or keys are hard errors so tuning-study typos fail fast;
every message names the offending key and line.  All keys have Task-1-style
defaults, so an empty file is a valid noise-on free-space run.

Sections and keys (vectors are space-separated):

  [fiber]        m, lambda
  [channel]      kappa_c, beta_c_deg, eps_match, mu_jump_max
  [filter]       n, dt, y, q_l, q_jac, q_delta, p0_l, p0_jac, p0_delta,
                 jac0 (n floats), joseph
  [trajectory]   profile, velocity, stroke, duration,
                 bend1..bendN (t kappa phi_deg), jac_drift_amp, jac_drift_period
  [noise]        sigma_kappa, sigma_tau, seed
  [disturbances] event1..eventN (t_start t_end lo hi dkappa)
  [run]          label, l0, g (n floats), baseline_jac_scale, velocities
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, GeometryError
from .estimator import FilterConfig
from .fiber import ChannelConfig, FiberConfig, validate_geometry
from .simulator import DisturbanceEvent, NoiseSpec, TrajectorySpec, sensor_datum

_SECTIONS = {
    "fiber": {"m", "lambda"},
    "channel": {"kappa_c", "beta_c_deg", "eps_match", "mu_jump_max"},
    "filter": {"n", "dt", "y", "q_l", "q_jac", "q_delta", "p0_l", "p0_jac", "p0_delta", "jac0", "joseph"},
    "trajectory": {"profile", "velocity", "stroke", "duration", "jac_drift_amp", "jac_drift_period"},
    "noise": {"sigma_kappa", "sigma_tau", "seed"},
    "disturbances": set(),
    "run": {"label", "l0", "g", "baseline_jac_scale", "velocities"},
}
_BEND_KEY = re.compile(r"bend\d+$")
_EVENT_KEY = re.compile(r"event\d+$")


@dataclass(frozen=True)
class RunSetup:
    """Everything a run needs, validated and cross-checked."""

    fiber: FiberConfig
    channel: ChannelConfig
    filt: FilterConfig
    traj: TrajectorySpec
    noise: NoiseSpec
    events: tuple
    g: np.ndarray
    l0: float
    baseline_jac: np.ndarray
    label: str
    velocities: tuple
    datum: tuple


def parse_config_text(text: str) -> dict:
    """Parse into {section: {key: (value_string, line)}}, strictly."""
    out: dict = {name: {} for name in _SECTIONS}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", key=name, line=lineno)
            section = name
            continue
        if "=" not in line:
            raise ConfigError("expected key = value", line=lineno)
        if section is None:
            raise ConfigError("key outside any [section]", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        allowed = _SECTIONS[section]
        if section == "trajectory" and _BEND_KEY.match(key):
            pass
        elif section == "disturbances" and _EVENT_KEY.match(key):
            pass
        elif key not in allowed:
            raise ConfigError(f"unknown key in [{section}]", key=key, line=lineno)
        if key in out[section]:
            raise ConfigError(f"duplicate key in [{section}]", key=key, line=lineno)
        out[section][key] = (value, lineno)
    return out


class _Section:
    """Typed accessors over one parsed section, with error locations."""

    def __init__(self, name: str, values: dict):
        self.name = name
        self.values = values

    def _raw(self, key):
        return self.values.get(key)

    def _conv(self, key, default, fn, kind):
        raw = self._raw(key)
        if raw is None:
            return default
        value, line = raw
        try:
            return fn(value)
        except ValueError:
            raise ConfigError(f"expected {kind}", key=key, line=line) from None

    def get_float(self, key, default=None):
        return self._conv(key, default, float, "a number")

    def get_int(self, key, default=None):
        return self._conv(key, default, int, "an integer")

    def get_bool(self, key, default=False):
        def parse(v):
            lv = v.lower()
            if lv in ("true", "1", "yes", "on"):
                return True
            if lv in ("false", "0", "no", "off"):
                return False
            raise ValueError(v)

        return self._conv(key, default, parse, "a boolean")

    def get_str(self, key, default=None):
        raw = self._raw(key)
        return default if raw is None else raw[0]

    def get_vector(self, key, default=None):
        def parse(v):
            return np.array([float(p) for p in v.split()])

        return self._conv(key, default, parse, "space-separated numbers")

    def line_of(self, key):
        raw = self._raw(key)
        return raw[1] if raw else None


def build_setup(parsed: dict, seed_override: int | None = None) -> RunSetup:
    """Materialize configs from parsed text, applying defaults and validation."""
    fib = _Section("fiber", parsed["fiber"])
    cha = _Section("channel", parsed["channel"])
    fil = _Section("filter", parsed["filter"])
    trj = _Section("trajectory", parsed["trajectory"])
    noi = _Section("noise", parsed["noise"])
    run = _Section("run", parsed["run"])

    m = fib.get_int("m", 45)
    lam = fib.get_float("lambda", 3.3)
    if lam <= 0.0:
        raise ConfigError("lambda must be > 0", key="lambda", line=fib.line_of("lambda"))
    try:
        fiber = FiberConfig(m=m, lam=lam)
        channel = ChannelConfig.from_fiber(
            fiber,
            kappa_c=cha.get_float("kappa_c", 1.0 / 30.0),
            beta_c=math.radians(cha.get_float("beta_c_deg", 60.0)),
            eps_match=cha.get_float("eps_match"),
            mu_jump_max=cha.get_int("mu_jump_max", 3),
        )
        validate_geometry(fiber, channel)
    except GeometryError as exc:
        raise ConfigError(str(exc), key=f"[fiber]/[channel]") from exc

    g = run.get_vector("g", np.array([0.4, 0.35, 0.45]))
    n = fil.get_int("n", len(g))
    if n != len(g):
        raise ConfigError(
            f"filter n = {n} disagrees with len(g) = {len(g)}", key="n", line=fil.line_of("n")
        )
    scale = run.get_float("baseline_jac_scale", 1.2)
    baseline_jac = g * scale
    jac0 = fil.get_vector("jac0", baseline_jac)
    if len(jac0) != n:
        raise ConfigError(f"jac0 needs {n} entries", key="jac0", line=fil.line_of("jac0"))

    dt = fil.get_float("dt", 0.05)
    overrides = {}
    if any(fil._raw(k) for k in ("q_l", "q_jac", "q_delta")):
        overrides["q"] = np.diag(
            np.concatenate(
                (
                    [fil.get_float("q_l", 1e-4)],
                    np.full(n, fil.get_float("q_jac", 1e-6)),
                    np.full(n, fil.get_float("q_delta", 1e-8)),
                )
            )
        )
    if any(fil._raw(k) for k in ("p0_l", "p0_jac", "p0_delta")):
        overrides["p0"] = np.diag(
            np.concatenate(
                (
                    [fil.get_float("p0_l", lam**2)],
                    np.full(n, fil.get_float("p0_jac", 0.25 * float(jac0 @ jac0))),
                    np.full(n, fil.get_float("p0_delta", 1e-4)),
                )
            )
        )
    if fil._raw("y"):
        overrides["y"] = fil.get_float("y")
    filt = FilterConfig.default(
        n=n, dt=dt, lam=lam, jac0=jac0, joseph=fil.get_bool("joseph", False), **overrides
    )

    bends = []
    for key, (value, line) in sorted(parsed["trajectory"].items()):
        if not _BEND_KEY.match(key):
            continue
        parts = value.split()
        if len(parts) != 3:
            raise ConfigError("bend rows are: t kappa phi_deg", key=key, line=line)
        t_from, kappa, phi_deg = (float(p) for p in parts)
        bends.append((t_from, kappa, math.radians(phi_deg)))
    bends.sort()
    if not bends:
        bends = [(0.0, 0.0, 0.0)]

    traj = TrajectorySpec(
        velocity=trj.get_float("velocity", 3.0),
        stroke=trj.get_float("stroke", 30.0),
        profile=trj.get_str("profile", "triangle"),
        duration=trj.get_float("duration"),
        bend_schedule=tuple(bends),
        jac_drift_amp=trj.get_float("jac_drift_amp", 0.0),
        jac_drift_period=trj.get_float("jac_drift_period", 60.0),
    )

    noise = NoiseSpec(
        sigma_kappa=noi.get_float("sigma_kappa", 0.05 * channel.kappa_c),
        sigma_tau=noi.get_float("sigma_tau", 0.01),
        seed=noi.get_int("seed", 0),
    )
    if seed_override is not None:
        noise = replace(noise, seed=seed_override)

    events = []
    for key, (value, line) in sorted(parsed["disturbances"].items()):
        parts = value.split()
        if len(parts) != 5:
            raise ConfigError("event rows are: t_start t_end lo hi dkappa", key=key, line=line)
        events.append(
            DisturbanceEvent(
                t_start=float(parts[0]),
                t_end=float(parts[1]),
                lo=int(parts[2]),
                hi=int(parts[3]),
                dkappa=float(parts[4]),
            )
        )

    l0 = run.get_float("l0", 33 * lam)
    velocities = run.get_vector("velocities", np.array([traj.velocity]))

    return RunSetup(
        fiber=fiber,
        channel=channel,
        filt=filt,
        traj=traj,
        noise=noise,
        events=tuple(events),
        g=g,
        l0=l0,
        baseline_jac=baseline_jac,
        label=run.get_str("label", "run"),
        velocities=tuple(float(v) for v in velocities),
        datum=sensor_datum(fiber),
    )


def load_config(path, seed_override: int | None = None) -> RunSetup:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return build_setup(parse_config_text(text), seed_override=seed_override)
