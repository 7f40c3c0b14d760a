import math

import numpy as np
import pytest

from fbgshape.errors import InvalidArgument, InvalidState
from fbgshape.fiber import ChannelConfig, FiberConfig, iround
from fbgshape.geometry import SectionArc, cc_arc_endpoint, reconstruct_shape
from fbgshape.length_sensor import match_channel_index
from fbgshape.simulator import (
    DisturbanceEvent,
    NoiseSpec,
    TrajectorySpec,
    commanded_actuation,
    make_truth,
    reference_length,
    robot_step,
    sensor_datum,
    synth_frame,
    true_start_index,
    truth_endpoint,
)

G = np.array([0.4, 0.35, 0.45])
L0 = 108.9


@pytest.fixture
def fiber():
    return FiberConfig(m=45, lam=3.3)


@pytest.fixture
def channel(fiber):
    return ChannelConfig.from_fiber(fiber, kappa_c=1.0 / 30.0, beta_c=math.pi / 3.0)


def drive(traj, steps, dt=0.05):
    truth = make_truth(G, L0, traj)
    history = [truth]
    for i in range(steps):
        truth = robot_step(truth, traj, i * dt, dt)
        history.append(truth)
    return history


def test_step_length_change_at_nominal_rate():
    traj = TrajectorySpec(velocity=3.0, stroke=30.0)
    history = drive(traj, 100)
    dl = np.diff([h.l_true for h in history])
    assert np.allclose(np.abs(dl), 0.15, atol=1e-12)


def test_triangle_returns_to_start_after_one_period():
    traj = TrajectorySpec(velocity=3.0, stroke=30.0)
    steps = iround(traj.period / 0.05)
    history = drive(traj, steps)
    assert abs(history[-1].l_true - L0) < 1e-9
    assert min(h.l_true for h in history) >= L0 - 30.0 - 1e-9


def test_hold_profile_keeps_truth_invariant():
    traj = TrajectorySpec(velocity=3.0, stroke=15.0, profile="hold_extend_hold", duration=40.0)
    history = drive(traj, 100)  # first 5 s sit inside the leading hold
    for h in history:
        assert h.l_true == L0
        assert np.array_equal(h.q, np.zeros(3))


def test_hold_extend_hold_reaches_stroke():
    traj = TrajectorySpec(velocity=3.0, stroke=15.0, profile="hold_extend_hold", duration=40.0)
    assert reference_length(traj, 90.0, 0.0) == 90.0
    assert reference_length(traj, 90.0, 20.0) == pytest.approx(97.5)
    assert reference_length(traj, 90.0, 39.9) == 105.0


def test_commanded_actuation_matches_robot_step():
    traj = TrajectorySpec(velocity=6.0, stroke=30.0)
    history = drive(traj, 60)
    for i, h in enumerate(history):
        assert np.array_equal(h.q, commanded_actuation(traj, L0, G, i * 0.05)) or i == 0


def test_true_start_index_quantization(fiber, channel):
    assert true_start_index(108.9, fiber, channel) == 11
    assert true_start_index(108.9 - 5 * 3.3, fiber, channel) == 16
    with pytest.raises(InvalidState):
        true_start_index(0.0, fiber, channel)
    with pytest.raises(InvalidState):
        true_start_index(130.0, fiber, channel)
    with pytest.raises(InvalidState):
        true_start_index(116.0, fiber, channel)  # window would leave the fiber


def test_synth_frame_layout_and_recovery(fiber, channel):
    rng = np.random.default_rng(0)
    truth = make_truth(G, L0)
    frame = synth_frame(truth, fiber, channel, NoiseSpec(), (), 0.0, rng)
    mu = true_start_index(L0, fiber, channel)
    assert np.array_equal(frame.curvatures[mu - 10 : mu + 1], np.full(11, channel.kappa_c))
    assert np.array_equal(frame.curvatures[: mu - 10], np.zeros(mu - 10))
    assert np.array_equal(frame.curvatures[mu + 1 :], np.zeros(fiber.m - mu - 1))
    meas = match_channel_index(frame, channel, datum=sensor_datum(fiber))
    assert meas.mu == mu and meas.valid


def test_compression_by_multiple_resolutions_shifts_index(fiber, channel):
    rng = np.random.default_rng(0)
    base = make_truth(G, L0)
    mu0 = true_start_index(base.l_true, fiber, channel)
    for k in (1, 2, 5):
        truth = make_truth(G, L0 - k * fiber.lam)
        frame = synth_frame(truth, fiber, channel, NoiseSpec(), (), 0.0, rng)
        meas = match_channel_index(frame, channel, datum=sensor_datum(fiber))
        assert meas.mu == mu0 + k


def test_synth_frame_deterministic(fiber, channel):
    truth = make_truth(G, 100.0)
    noise = NoiseSpec(sigma_kappa=0.002, sigma_tau=0.01, seed=5)
    a = synth_frame(truth, fiber, channel, noise, (), 0.0, np.random.default_rng(5))
    b = synth_frame(truth, fiber, channel, noise, (), 0.0, np.random.default_rng(5))
    assert np.array_equal(a.curvatures, b.curvatures)
    assert np.array_equal(a.twists, b.twists)


@pytest.mark.parametrize("kappa_r", [1.0 / 80.0, 1.0 / 30.0])
def test_ground_truth_consistency(fiber, channel, kappa_r):
    # reconstructing the robot sections reaches the closed-form endpoint up to
    # index quantization
    rng = np.random.default_rng(0)
    phi = math.radians(30.0)
    for l_true in np.linspace(78.9, 108.9, 61):
        truth = make_truth(G, float(l_true))
        truth = type(truth)(
            q=truth.q, qdot=truth.qdot, l_true=float(l_true), kappa_r=kappa_r,
            phi_r=phi, g=truth.g, l0=truth.l0, g0=truth.g0,
        )
        frame = synth_frame(truth, fiber, channel, NoiseSpec(), (), 0.0, rng)
        mu = true_start_index(float(l_true), fiber, channel)
        arcs = [
            SectionArc(frame.curvatures[s], frame.twists[s], fiber.ds)
            for s in range(mu + 1, fiber.m)
        ]
        endpoint = reconstruct_shape(arcs)[-1].translation
        want = truth_endpoint(truth)
        assert np.linalg.norm(endpoint - want) <= fiber.lam * kappa_r * l_true + 1e-6


def test_disturbance_locality(fiber, channel):
    # events strictly outside the channel window leave the matched index alone
    rng = np.random.default_rng(0)
    ev = DisturbanceEvent(t_start=0.0, t_end=1.0, lo=30, hi=40, dkappa=0.015)
    for l_true in np.linspace(98.9, 108.9, 21):
        truth = make_truth(G, float(l_true))
        clean = synth_frame(truth, fiber, channel, NoiseSpec(), (), 0.5, rng)
        bumped = synth_frame(truth, fiber, channel, NoiseSpec(), (ev,), 0.5, rng)
        datum = sensor_datum(fiber)
        assert match_channel_index(bumped, channel, datum=datum).mu == \
            match_channel_index(clean, channel, datum=datum).mu


def test_disturbance_validation(fiber, channel):
    with pytest.raises(InvalidArgument):
        DisturbanceEvent(t_start=1.0, t_end=0.5, lo=0, hi=4, dkappa=0.1)
    with pytest.raises(InvalidArgument):
        DisturbanceEvent(t_start=0.0, t_end=1.0, lo=5, hi=2, dkappa=0.1)
    bad = DisturbanceEvent(t_start=0.0, t_end=1.0, lo=40, hi=50, dkappa=0.1)
    with pytest.raises(InvalidArgument):
        synth_frame(make_truth(G, 100.0), fiber, channel, NoiseSpec(), (bad,), 0.5,
                    np.random.default_rng(0))


def test_jacobian_drift_option():
    traj = TrajectorySpec(velocity=3.0, stroke=30.0, jac_drift_amp=0.05, jac_drift_period=10.0)
    history = drive(traj, 100)
    drifted = [h for h in history if not np.array_equal(h.g, h.g0)]
    assert drifted
    for h in history:
        assert abs(h.l_true - (h.l0 + h.g @ h.q)) < 1e-12


def test_trajectory_validation():
    with pytest.raises(InvalidArgument):
        TrajectorySpec(velocity=0.0, stroke=30.0)
    with pytest.raises(InvalidArgument):
        TrajectorySpec(velocity=3.0, stroke=-1.0)
    with pytest.raises(InvalidArgument):
        TrajectorySpec(velocity=3.0, stroke=30.0, profile="sawtooth")
    with pytest.raises(InvalidArgument):
        TrajectorySpec(velocity=3.0, stroke=30.0, bend_schedule=((1.0, 0.0, 0.0),))


def test_truth_endpoint_matches_closed_form():
    truth = make_truth(G, 100.0)
    truth = type(truth)(
        q=truth.q, qdot=truth.qdot, l_true=100.0, kappa_r=0.01, phi_r=0.5,
        g=truth.g, l0=truth.l0, g0=truth.g0,
    )
    assert np.array_equal(truth_endpoint(truth), cc_arc_endpoint(0.01, 0.5, 100.0))
