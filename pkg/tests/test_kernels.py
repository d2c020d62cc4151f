import numpy as np
import pytest

from moeblab import _kernels as kn
from moeblab import complexity as cx
from moeblab import dynamics as dy


@pytest.fixture()
def circle_block(rng):
    return rng.random((12, 40))     # (steps, points)


def numpy_reference_circle(xs):
    p = xs.shape[1]
    out = np.zeros((p, p))
    for row in xs:
        d = np.abs(row[:, None] - row[None, :])
        d = np.minimum(d, 1.0 - d)
        out += np.triu(d, 1)
    return out


def test_circle_kernel_against_reference(circle_block):
    dsum = np.zeros((40, 40))
    kn.accumulate_circle(circle_block, dsum)
    assert np.allclose(dsum, numpy_reference_circle(circle_block), atol=1e-12)
    assert np.allclose(np.tril(dsum), 0.0)      # upper triangle only


def test_torus_kernel_against_reference(rng):
    xs = rng.random((9, 25))
    ys = rng.random((9, 25))
    dsum = np.zeros((25, 25))
    kn.accumulate_torus(xs, ys, dsum)
    ref = np.zeros((25, 25))
    for rx, ry in zip(xs, ys):
        dx = np.abs(rx[:, None] - rx[None, :])
        dx = np.minimum(dx, 1.0 - dx)
        dy_ = np.abs(ry[:, None] - ry[None, :])
        dy_ = np.minimum(dy_, 1.0 - dy_)
        ref += np.triu(np.maximum(dx, dy_), 1)
    assert np.allclose(dsum, ref, atol=1e-12)


def test_fallbacks_match_numba(monkeypatch, rng):
    if not kn.HAVE_NUMBA:
        pytest.skip("numba unavailable; fallbacks are already the only path")
    xs = rng.random((7, 30))
    ys = rng.random((7, 30))
    fast_c = np.zeros((30, 30))
    fast_t = np.zeros((30, 30))
    kn.accumulate_circle(xs, fast_c)
    kn.accumulate_torus(xs, ys, fast_t)
    monkeypatch.setattr(kn, "HAVE_NUMBA", False)
    slow_c = np.zeros((30, 30))
    slow_t = np.zeros((30, 30))
    kn.accumulate_circle(xs, slow_c)
    kn.accumulate_torus(xs, ys, slow_t)
    assert np.allclose(fast_c, slow_c, atol=1e-12)
    assert np.allclose(fast_t, slow_t, atol=1e-12)


def test_assignment_fallback_matches_numba(monkeypatch, rng):
    if not kn.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    coords = rng.random(220)
    ctraj = rng.random((5, 20))
    j_fast, d_fast = kn.assign_nearest_circle(coords, ctraj, 200)
    monkeypatch.setattr(kn, "HAVE_NUMBA", False)
    j_slow, d_slow = kn.assign_nearest_circle(coords, ctraj, 200)
    assert np.array_equal(j_fast, j_slow)
    assert np.allclose(d_fast, d_slow, atol=1e-12)


def test_rotation_fast_path_matches_scalar():
    rot = dy.make_system({"kind": "rotation", "alpha": "golden"})
    cloud = cx.sample_cloud(rot, 15, seed=8)
    lst = rot.states_list(cloud.states)
    for n, mat in cx._iter_dbar(cloud, [1, 5, 13]):
        for i in range(15):
            for j in range(i + 1, 15):
                expect = cx.dbar_distance(rot, lst[i], lst[j], n)
                assert mat[i, j] == pytest.approx(expect, abs=1e-10)
