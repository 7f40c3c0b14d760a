"""SE(3) primitives and constant-curvature arc geometry.

Each fiber section is a circular arc: bend angle theta = kappa * ds about the
local y axis after a twist tau about the local z axis.  Chaining the section
transforms from a base pose reconstructs the sensed shape; the closed-form
single-arc endpoint serves as the exact reference for uniform-curvature
chains and for truth/metrics conversions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import DegenerateInput, InvalidArgument

# Bend angles below this use the series form of the arc translation
# (1/kappa is singular at kappa = 0).
SMALL_BEND_ANGLE = 1e-6

# Re-orthonormalize a composed rotation when max |R^T R - I| exceeds this.
ORTHONORMALITY_TOL = 1e-9


@dataclass(frozen=True)
class Transform:
    """Rigid transform: 3x3 rotation plus translation in mm."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        p = np.asarray(self.translation, dtype=float)
        if r.shape != (3, 3) or p.shape != (3,):
            raise InvalidArgument(f"bad transform shapes {r.shape}, {p.shape}")
        if not (np.isfinite(r).all() and np.isfinite(p).all()):
            raise InvalidArgument("transform entries must be finite")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", p)

    @staticmethod
    def identity() -> "Transform":
        return Transform(np.eye(3), np.zeros(3))


@dataclass(frozen=True)
class SectionArc:
    """One fiber section: curvature (1/mm), twist (rad), arc length (mm)."""

    kappa: float
    tau: float
    ds: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.tau) and math.isfinite(self.ds)):
            raise InvalidArgument("section arc parameters must be finite")
        if self.ds <= 0.0:
            raise InvalidArgument(f"arc length must be > 0, got {self.ds}")


def orthonormality_defect(r: np.ndarray) -> float:
    """Max-norm deviation of R^T R from the identity."""
    return float(np.abs(r.T @ r - np.eye(3)).max())


def orthonormalize(r: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the rows of a near-orthonormal rotation matrix."""
    a, b, c = r[0], r[1], r[2]
    a = a / np.linalg.norm(a)
    b = b - (a @ b) * a
    b = b / np.linalg.norm(b)
    c = c - (a @ c) * a - (b @ c) * b
    c = c / np.linalg.norm(c)
    return np.array([a, b, c])


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def section_transform(arc: SectionArc) -> Transform:
    """Local-frame transform of one constant-curvature section.

    Rotation is Rot(z, tau) @ Rot(y, theta) with theta = kappa * ds; the
    translation is the in-plane arc chord, continuous through kappa = 0 via
    the series limit [kappa*ds^2/2, 0, ds].
    """
    r, p = kernels.section_pose(arc.kappa, arc.tau, arc.ds)
    return Transform(r, p)


def compose(a: Transform, b: Transform) -> Transform:
    """Homogeneous composition a then b, guarding against rotation drift."""
    r = a.rotation @ b.rotation
    p = a.translation + a.rotation @ b.translation
    if orthonormality_defect(r) > ORTHONORMALITY_TOL:
        r = orthonormalize(r)
    return Transform(r, p)


def inverse(t: Transform) -> Transform:
    return Transform(t.rotation.T, -(t.rotation.T @ t.translation))


def reconstruct_shape(arcs, base: Transform | None = None) -> list[Transform]:
    """Global pose of every section end, chained left to right from `base`.

    All arcs must share the same arc length (the fiber's spatial resolution).
    """
    arcs = list(arcs)
    if not arcs:
        raise InvalidArgument("cannot reconstruct shape from an empty arc sequence")
    ds = arcs[0].ds
    if any(a.ds != ds for a in arcs):
        raise InvalidArgument("all sections must share one arc length")
    if base is None:
        base = Transform.identity()
    kappas = np.array([a.kappa for a in arcs])
    taus = np.array([a.tau for a in arcs])
    rs, ps = kernels.chain_poses(
        kappas, taus, ds, np.ascontiguousarray(base.rotation), np.ascontiguousarray(base.translation)
    )
    return [Transform(rs[i], ps[i]) for i in range(len(arcs))]


def cc_arc_endpoint(kappa: float, phi: float, length: float) -> np.ndarray:
    """Endpoint of a single constant-curvature arc.

    The arc bends by kappa * length in the plane at azimuth phi about z;
    kappa -> 0 tends to the straight segment [0, 0, length].
    """
    if length < 0.0:
        raise InvalidArgument(f"arc length must be >= 0, got {length}")
    theta = kappa * length
    if abs(theta) < SMALL_BEND_ANGLE:
        x = kappa * length * length * 0.5
        z = length
    else:
        rho = 1.0 / kappa
        x = rho * (1.0 - math.cos(theta))
        z = rho * math.sin(theta)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([c * x, s * x, z])


def cc_angles_from_endpoint(p) -> tuple[float, float]:
    """(bend, plane) angles of the constant-curvature arc reaching endpoint p.

    bend = 2*atan2(hypot(px, py), pz); plane = atan2(py, px), taken as 0 for
    a straight arc where the bend plane is indeterminate.
    """
    p = np.asarray(p, dtype=float)
    r = math.hypot(p[0], p[1])
    if r == 0.0 and p[2] == 0.0:
        raise DegenerateInput("zero endpoint has no bend/plane angles")
    theta = 2.0 * math.atan2(r, p[2])
    phi = math.atan2(p[1], p[0]) if r > 0.0 else 0.0
    return theta, phi
