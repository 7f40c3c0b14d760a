"""Cross-check the compiled kernels against the numpy fallback."""
import numpy as np
import pytest

from fbgshape import _kernels_py

backends = {"python": _kernels_py}
try:
    from fbgshape import _kernels_cy

    backends["cython"] = _kernels_cy
except ImportError:
    pass

both = pytest.mark.skipif(len(backends) < 2, reason="compiled kernels not built")


@pytest.fixture
def cases(rng):
    kappas = rng.uniform(-0.05, 0.05, 45)
    kappas[::7] = 0.0  # hit the small-angle branch
    taus = rng.uniform(-1.0, 1.0, 45)
    return kappas, taus


@pytest.mark.parametrize("name", sorted(backends))
def test_section_pose_matches_formula(name, cases):
    k = backends[name]
    r, p = k.section_pose(1.0 / 30.0, 0.4, 3.3)
    theta = 3.3 / 30.0
    want_r = np.array(
        [
            [np.cos(0.4) * np.cos(theta), -np.sin(0.4), np.cos(0.4) * np.sin(theta)],
            [np.sin(0.4) * np.cos(theta), np.cos(0.4), np.sin(0.4) * np.sin(theta)],
            [-np.sin(theta), 0.0, np.cos(theta)],
        ]
    )
    want_p = np.array([30.0 * (1.0 - np.cos(theta)), 0.0, 30.0 * np.sin(theta)])
    assert np.allclose(r, want_r, atol=1e-15)
    assert np.allclose(p, want_p, atol=1e-13)


@pytest.mark.parametrize("name", sorted(backends))
def test_chain_of_one_equals_section(name, cases):
    k = backends[name]
    r0 = np.ascontiguousarray(np.eye(3))
    p0 = np.zeros(3)
    rs, ps = k.chain_poses(np.array([0.01]), np.array([0.3]), 3.3, r0, p0)
    r, p = k.section_pose(0.01, 0.3, 3.3)
    assert np.allclose(rs[0], r, atol=1e-15)
    assert np.allclose(ps[0], p, atol=1e-15)


@pytest.mark.parametrize("name", sorted(backends))
def test_window_costs_against_bruteforce(name, cases, rng):
    k = backends[name]
    kappas = rng.uniform(0.0, 0.05, 45)
    window, kappa_c = 11, 1.0 / 30.0
    costs = k.window_costs(np.ascontiguousarray(kappas), window, kappa_c)
    assert len(costs) == 45 - window + 1
    for j in range(len(costs)):
        want = abs(kappas[j : j + window].sum() - kappa_c * window)
        assert abs(costs[j] - want) < 1e-12


@both
def test_backends_agree(cases):
    kappas, taus = cases
    py, cy = backends["python"], backends["cython"]
    r0 = np.ascontiguousarray(np.eye(3))
    p0 = np.zeros(3)
    rs_p, ps_p = py.chain_poses(kappas, taus, 3.3, r0, p0)
    rs_c, ps_c = cy.chain_poses(kappas, taus, 3.3, r0, p0)
    assert np.allclose(rs_p, rs_c, atol=1e-13)
    assert np.allclose(ps_p, ps_c, atol=1e-12)
    c_p = py.window_costs(np.abs(kappas), 11, 1.0 / 30.0)
    c_c = cy.window_costs(np.abs(kappas), 11, 1.0 / 30.0)
    assert np.array_equal(c_p, c_c)


@both
def test_small_angle_thresholds_agree():
    assert backends["python"].SMALL_BEND_ANGLE == backends["cython"].SMALL_BEND_ANGLE
