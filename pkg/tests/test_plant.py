import math

import numpy as np
import pytest

from hpfnav.controller import Command
from hpfnav.hpf import OBSTACLE, TARGET, BoundaryGrid, build_boundary
from hpfnav.plant import collides, observe, step
from hpfnav.workspace import CameraConfig, WorldPose


def test_step_straight():
    p = step(WorldPose(0.0, 0.0, 0.0), Command(0.2, 0.0), 1.0)
    assert (p.x, p.y) == pytest.approx((0.2, 0.0))
    assert p.theta == 0.0


def test_step_pure_spin():
    p = step(WorldPose(0.3, 0.4, 0.0), Command(0.0, math.pi), 1.0)
    assert (p.x, p.y) == pytest.approx((0.3, 0.4), abs=1e-15)
    assert p.theta == pytest.approx(math.pi)


def test_step_full_circle():
    pose = WorldPose(1.0, 1.0, 0.7)
    p = step(pose, Command(0.25, 2 * math.pi), 1.0)
    assert (p.x, p.y) == pytest.approx((1.0, 1.0), abs=1e-12)
    assert p.theta == pytest.approx(0.7)


def test_step_y_down_turn_direction():
    # positive omega turns from +x toward +y, which is downward on the image
    p = step(WorldPose(0.0, 0.0, 0.0), Command(0.1, 1.0), 0.5)
    assert p.y > 0


def test_step_substep_invariance():
    cmd = Command(0.1, 0.5)
    coarse = step(WorldPose(0.0, 0.0, 0.2), cmd, 1.0)
    fine = WorldPose(0.0, 0.0, 0.2)
    for _ in range(100):
        fine = step(fine, cmd, 0.01)
    assert (fine.x, fine.y, fine.theta) == pytest.approx(
        (coarse.x, coarse.y, coarse.theta), abs=1e-12
    )


def test_step_matches_euler_in_the_limit():
    cmd = Command(0.15, -0.8)
    exact = step(WorldPose(0.0, 0.0, 0.1), cmd, 1.0)
    x, y, th = 0.0, 0.0, 0.1
    dt = 1e-4
    for _ in range(10000):
        x += cmd.v * math.cos(th) * dt
        y += cmd.v * math.sin(th) * dt
        th += cmd.omega * dt
    assert (exact.x, exact.y) == pytest.approx((x, y), abs=1e-3)


def test_observe_identity_without_quantization():
    pose = WorldPose(1.2345, 0.9876, 0.321)
    obs = observe(pose, CameraConfig(quantize=False), 0.0125, 320, 240)
    assert (obs.x, obs.y, obs.theta) == (pose.x, pose.y, pose.theta)


def test_observe_snaps_to_cell_center():
    obs = observe(WorldPose(0.013, 0.013, 0.5), CameraConfig(), 0.0125, 320, 240)
    assert (obs.x, obs.y) == pytest.approx((0.01875, 0.01875))
    assert obs.theta == 0.5  # heading is not quantized


def test_observe_quantization_error_bound():
    rng = np.random.default_rng(0)
    gd = 0.0125
    for _ in range(500):
        pose = WorldPose(rng.uniform(0, 4), rng.uniform(0, 3), rng.uniform(-3, 3))
        obs = observe(pose, CameraConfig(), gd, 320, 240)
        err = math.hypot(obs.x - pose.x, obs.y - pose.y)
        assert err <= gd * math.sqrt(2) / 2 + 1e-12


def test_observe_out_of_frame():
    with pytest.raises(ValueError):
        observe(WorldPose(4.2, 1.0, 0.0), CameraConfig(), 0.0125, 320, 240)


def test_collides():
    edges = np.zeros((24, 32), bool)
    edges[10, 16] = True
    bg = build_boundary(edges, (28, 20), dilation=1)
    gd = 0.1
    assert collides(WorldPose(16.5 * gd, 10.5 * gd, 0.0), bg, gd)   # edge cell
    assert collides(WorldPose(15.5 * gd, 9.5 * gd, 0.0), bg, gd)    # dilated ring
    assert not collides(WorldPose(5.5 * gd, 5.5 * gd, 0.0), bg, gd)
    # target cell is not a collision
    assert not collides(WorldPose(28.5 * gd, 20.5 * gd, 0.0), bg, gd)
