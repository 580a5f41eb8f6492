import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amronet.engine import EventLog, SimConfig, run
from amronet.forces import (ForceWorld, boundary_force, boundary_forces, expected_density,
                            force_connect, force_cover, force_dssa, integrate)
from amronet.geometry import Point2, Rect, WorldMap
from amronet.scenario import ForceParams, ScenarioSpec
from amronet.self_spreading import init_scenario

coords = st.floats(-5, 5, allow_nan=False)


def test_cover_force_examples():
    assert np.linalg.norm(force_cover((0, 0), (1, 0))) == pytest.approx(1.0)
    assert np.linalg.norm(force_cover((0, 0), (0.5, 0))) == pytest.approx(4.0)
    assert force_cover((0, 0), (1, 0)) == pytest.approx((-1, 0))
    assert force_cover((0, 0), (1, 0), literal_signs=True) == pytest.approx((1, 0))
    f = force_cover((1, 1), (1, 1), max_force=50, rng=random.Random(2))
    assert np.linalg.norm(f) == pytest.approx(50)


def test_connect_force_examples():
    assert force_connect((0, 0), (0.5, 0), 2, 1.0) == pytest.approx((0, 0))
    f = force_connect((0, 0), (0.5, 0), 1, 1.0)
    assert f == pytest.approx((4, 0))
    assert np.linalg.norm(force_connect((0, 0), (1.0, 0), 1, 1.0, max_force=77)) == pytest.approx(77)
    assert np.linalg.norm(force_connect((0, 0), (0.999999, 0), 1, 1.0)) == pytest.approx(100)


def test_dssa_examples():
    mu2 = expected_density(30, 0.5, 36.0)
    assert mu2 == pytest.approx(0.6545, abs=1e-4)
    f = force_dssa((0, 0), (0.5, 0), 2, mu2, 1.0)
    assert np.linalg.norm(f) == pytest.approx(1.5279, abs=1e-3)
    assert f[0] < 0
    g = force_dssa((0, 0), (1.5, 0), 2, mu2, 1.0)
    assert g == pytest.approx(-f)
    assert force_dssa((0, 0), (1.0, 0), 2, mu2, 1.0) == pytest.approx((0, 0))


@settings(max_examples=200, deadline=None)
@given(coords, coords, coords, coords)
def test_antisymmetry(ax, ay, bx, by):
    if (ax, ay) == (bx, by):
        return
    assert force_cover((ax, ay), (bx, by)) == pytest.approx(-force_cover((bx, by), (ax, ay)))
    assert force_dssa((ax, ay), (bx, by), 3, 0.7, 1.0) == pytest.approx(
        -force_dssa((bx, by), (ax, ay), 3, 0.7, 1.0))


def test_forces_finite_under_random_inputs():
    rng = np.random.default_rng(0)
    pts = rng.normal(scale=1e-3, size=(20_000, 4))
    pts[::7, 2:] = pts[::7, :2]  # some exact coincidences
    for a, b in zip(pts[:, :2], pts[:, 2:]):
        for f in (force_cover(a, b), force_connect(a, b, 1, 1e-3), force_dssa(a, b, 2, 0.6, 1.0)):
            assert np.isfinite(f).all() and np.linalg.norm(f) <= 100 + 1e-9


def test_boundary_force_vectorised_agrees():
    w = WorldMap(Rect(-3, -3, 3, 3), (Rect(-1, -1, 0, 0), Rect(1, 1, 2, 2)))
    pts = np.random.default_rng(1).uniform(-3, 3, size=(500, 2))
    ref = np.array([boundary_force(w, p, 0.5) for p in pts])
    assert np.allclose(boundary_forces(w, pts, 0.5), ref)
    assert boundary_force(w, (0.0, 1.0), 0.5) == pytest.approx((0, 0))
    assert boundary_force(w, (-2.8, 0.5), 0.5)[0] == pytest.approx(25.0)


def test_integrator_identity_and_cap():
    p = ForceParams()
    v, d = integrate(np.zeros((3, 2)), np.zeros((3, 2)), 0.1, p, 0.01)
    assert not d.any()
    v, d = integrate(np.zeros((1, 2)), np.array([[1e4, 0]]), 0.1, p, 0.01)
    assert np.hypot(*d[0]) == pytest.approx(0.01)


def force_spec(algo, n=30, seed=0, world=None, **cfg):
    cfg.setdefault("max_steps", 3000)
    return ScenarioSpec(world=world or WorldMap(Rect(-3, -3, 3, 3)),
                        base_stations=(Point2(0, 0),), algorithm=algo, n_routers=n,
                        config=SimConfig(r_c=1.0, seed=seed, coverage_target=1.0, **cfg),
                        seeds=(seed,))


def test_dssa_two_nodes_reach_spacing():
    w = WorldMap(Rect(-10, -10, 10, 10))
    spec = force_spec("dssa", n=1, world=w, max_steps=4000)
    world = ForceWorld(spec, EventLog())
    world.bases = np.array([[0.0, 0.0]])
    world.pos = np.array([[0.5, 0.0]])
    for s in range(1, 4000):
        world.step(s)
    assert 0.95 <= np.hypot(*world.pos[0]) <= 1.05


def test_symmetric_ring_has_no_net_force():
    spec = force_spec("potential", n=4)
    world = ForceWorld(spec, EventLog())
    world.pos = np.array([[0.6, 0], [-0.6, 0], [0, 0.6], [0, -0.6]])
    f = world.net_forces()
    assert np.allclose(f.sum(axis=0), 0.0, atol=1e-9)


def test_initial_positions_shared_with_self_spreading():
    spec = force_spec("potential", seed=4)
    world = ForceWorld(spec, EventLog())
    routers, _, _ = init_scenario(spec.world, spec.base_stations, 30, 1.0, 1.0, 4)
    assert np.allclose(world.pos, [tuple(r.pose.position) for r in routers])


@pytest.mark.parametrize("algo", ["potential", "dssa"])
def test_force_runs_spread_and_stay_in_free_space(algo):
    w = WorldMap(Rect(-3, -3, 3, 3), (Rect(1, 1, 2, 2),))
    holder = {}
    _, rec = run(force_spec(algo, world=w), observer=lambda wd, s: holder.__setitem__("w", wd))
    world = holder["w"]
    assert rec.final.coverage > 3 * rec.rows[0].coverage
    for p in world.pos:
        assert -3 <= p[0] <= 3 and -3 <= p[1] <= 3
        assert not (1 < p[0] < 2 and 1 < p[1] < 2)
