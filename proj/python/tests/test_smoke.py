import math

import numpy as np
import pytest

import cqsphere as cq

E = np.eye(4)
D4_MAPS = [[(0, 1, 0.8)], [(0, 2, 0.5)]]


def test_distance_and_combine():
    assert cq.distance(E[0], E[1]) == pytest.approx(math.pi / 2)
    mid = cq.geodesic_combine(0.5, E[0], E[1])
    assert np.allclose(mid, [math.sqrt(0.5), math.sqrt(0.5), 0, 0])


def test_antipodal_raises():
    with pytest.raises(cq.Error):
        cq.geodesic_combine(0.5, E[0], -E[0])


def test_project_cap_closed_form():
    rho = math.pi / 6
    x = np.array([1.0, 0, 0, 1.0]) / math.sqrt(2)
    p, sweeps, certified = cq.project(E[3], rho, np.zeros((0, 4)), x)
    assert cq.distance(p, E[3]) == pytest.approx(rho, abs=1e-12)
    assert certified
    assert cq.distance(p, x) == pytest.approx(math.pi / 4 - rho, abs=1e-12)


def test_project_matches_grid_oracle():
    pole = np.array([0.0, 0, 1])
    normals = np.array([[1.0, 0.3, 0]])
    x = np.array([-0.4, 0.2, 0.9])
    x /= np.linalg.norm(x)
    p, _, _ = cq.project(pole, math.pi / 5, normals, x)
    q = cq.brute_project(pole, math.pi / 5, normals, x)
    assert cq.distance(p, q) < 1e-3


def test_w_fixes_common_fixed_point():
    assert np.allclose(cq.apply_w(D4_MAPS, [0.5, 0.5], E[3]), E[3])
    basis = cq.common_fixed_basis(D4_MAPS, 4)
    assert basis.shape == (4, 1)
    assert abs(abs(basis[3, 0]) - 1) < 1e-12


def test_shrinking_run_converges():
    x1 = cq.random_point_in_cap(E[3], math.pi / 5, 1)
    out = cq.run(E[3], math.pi / 5, D4_MAPS, [0.5, 0.5], x1, method="shrinking")
    assert out["stop_reason"] == "converged"
    assert out["fejer_audit"]
    assert cq.distance(out["final_point"], E[3]) < 1e-5
    trace = out["trace"]
    assert trace["residuals"].shape == (out["iterations"], 2)


def test_cq_run_respects_cap():
    x1 = cq.random_point_in_cap(E[3], math.pi / 5, 2)
    out = cq.run(E[3], math.pi / 5, D4_MAPS, [0.5, 0.5], x1, method="cq", max_iter=50)
    assert out["stop_reason"] == "iteration-cap"
    assert np.all(np.diff(out["trace"]["dist_x1_xn"]) >= -1e-10)
