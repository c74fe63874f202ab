import numpy as np
import pytest

from submaj.sdp import max_slack


def test_scalar_lp():
    # max t s.t. 1 - z >= t, z >= t  ->  t = 1/2
    C = [np.array([[1.0]]), np.array([[0.0]])]
    F = [np.array([[[-1.0]]]), np.array([[[1.0]]])]
    res = max_slack(C, F)
    assert res.converged
    assert res.t == pytest.approx(0.5, abs=1e-8)
    assert res.z[0] == pytest.approx(0.5, abs=1e-6)
    assert res.upper >= res.t - 1e-9


def test_matrix_block():
    # max lambda_min([[1, z], [z, 1]]) is attained at z = 0 with value 1
    C = [np.eye(2)]
    F = [np.array([[[0.0, 1.0], [1.0, 0.0]]])]
    res = max_slack(C, F)
    assert res.t == pytest.approx(1.0, abs=1e-8)
    assert abs(res.z[0]) < 1e-6


def test_no_variables():
    res = max_slack([np.diag([3.0, -2.0])], [np.zeros((0, 2, 2))])
    assert res.t == pytest.approx(-2.0, abs=1e-8)


def test_certified_bound_is_lower_bound(rng):
    # random feasible LMI: t from the solver never exceeds a brute-force evaluation at z
    n, m = 3, 2
    C = [np.eye(n)]
    F = [np.stack([(lambda g: g + g.T)(rng.normal(size=(n, n))) for _ in range(m)])]
    res = max_slack(C, F)
    S = C[0] + np.tensordot(res.z, F[0], axes=1)
    assert np.linalg.eigvalsh(S).min() >= res.t - 1e-8
