"""Pure-numpy kernel fallback.

Same contract as the compiled module fbgshape._kernels_cy; the backend module
picks whichever is importable.  Keep the arithmetic here in the same order as
the Cython version so the two backends agree to roundoff.
"""
import numpy as np

# Below this bend angle (rad) the arc translation uses its 2nd-order series;
# 1/kappa is singular at zero curvature.
SMALL_BEND_ANGLE = 1e-6


def section_pose(kappa, tau, ds):
    """Local pose of one constant-curvature section.

    Returns (R, p): R = Rot(z, tau) @ Rot(y, kappa*ds), p the in-plane arc
    chord [rho*(1-cos), 0, rho*sin] with the series limit near zero bend.
    """
    theta = kappa * ds
    ct, st = np.cos(theta), np.sin(theta)
    ctau, stau = np.cos(tau), np.sin(tau)
    if abs(theta) < SMALL_BEND_ANGLE:
        x = kappa * ds * ds * 0.5
        z = ds
    else:
        rho = 1.0 / kappa
        x = rho * (1.0 - ct)
        z = rho * st
    r = np.array(
        [
            [ctau * ct, -stau, ctau * st],
            [stau * ct, ctau, stau * st],
            [-st, 0.0, ct],
        ]
    )
    p = np.array([x, 0.0, z])
    return r, p


def chain_poses(kappas, taus, ds, r0, p0):
    """Accumulate section poses left to right from the base pose (r0, p0).

    Returns (R, P) with R.shape == (n, 3, 3), P.shape == (n, 3): the global
    pose after each section.
    """
    n = len(kappas)
    rs = np.empty((n, 3, 3))
    ps = np.empty((n, 3))
    r_acc = np.array(r0, dtype=float)
    p_acc = np.array(p0, dtype=float)
    for i in range(n):
        r_loc, p_loc = section_pose(kappas[i], taus[i], ds)
        p_acc = p_acc + r_acc @ p_loc
        r_acc = r_acc @ r_loc
        rs[i] = r_acc
        ps[i] = p_acc
    return rs, ps


def window_costs(kappas, window, kappa_c):
    """Matching cost of every complete window of `window` consecutive sections.

    costs[j] = |sum(kappas[j : j+window]) - kappa_c*window|; window ending at
    index mu corresponds to j = mu - window + 1.
    """
    kappas = np.asarray(kappas, dtype=float)
    prefix = np.empty(len(kappas) + 1)
    prefix[0] = 0.0
    np.cumsum(kappas, out=prefix[1:])
    target = kappa_c * window
    return np.abs(prefix[window:] - prefix[:-window] - target)
