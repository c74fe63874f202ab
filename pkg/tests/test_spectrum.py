import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from submaj import spectrum as sp
from submaj.families import FamilyPair, FiniteMeasure, add, classical_pair, mul, scalar_pair
from submaj.means import MeanProgram
from submaj.sampling import random_classical_pair, random_quantum_pair, random_substochastic

seeds = st.integers(0, 2**32 - 1)
u = scalar_pair(2.0, 1.0)
one = scalar_pair(1.0, 1.0)


def _points(P):
    return sp.classical_points(P.X, P.Y, sp.DEFAULT_ALPHAS, 4)


def test_normalization_on_u_and_one():
    for f in _points(u):
        expect = 2.0 if f.tropical else 2.0 ** f.alpha
        assert sp.evaluate(f, u) == pytest.approx(expect)
        assert sp.evaluate(f, one) == pytest.approx(1.0)


def test_hand_value():
    P = classical_pair([0.5, 0.5], [[0.25, 1.0], [0.75, 1.0]], Y=["a", "b"])
    f = sp.SpectralPoint.classical(2.0, "x0", {"a": 0.5, "b": 0.5})
    # q_mean = sqrt(q_a q_b) = (0.5, sqrt(.75)); value = sum p^2 / q_mean
    expect = 0.25 / 0.5 + 0.25 / math.sqrt(0.75)
    assert sp.evaluate(f, P) == pytest.approx(expect)
    t = sp.SpectralPoint.classical(math.inf, "x0", {"a": 0.5, "b": 0.5})
    assert sp.evaluate(t, P) == pytest.approx(1.0)


@given(seeds)
def test_homomorphism_properties(seed):
    rng = np.random.default_rng(seed)
    P = random_classical_pair(rng, nx=2, ny=2)
    Q = random_classical_pair(rng, nx=2, ny=2)
    for f in _points(P)[::5]:
        fp, fq = sp.evaluate(f, P), sp.evaluate(f, Q)
        s = sp.evaluate(f, add(P, Q))
        m = sp.evaluate(f, mul(P, Q))
        if f.tropical:
            assert s == pytest.approx(max(fp, fq), rel=1e-9)
        else:
            assert s == pytest.approx(fp + fq, rel=1e-9)
        assert m == pytest.approx(fp * fq, rel=1e-9)


@given(seeds)
def test_monotone_under_substochastic(seed):
    rng = np.random.default_rng(seed)
    P = random_classical_pair(rng, d=3, nx=2, ny=2)
    T = random_substochastic(rng, 3, 3)
    p = np.column_stack([np.diag(P.rho[x]).real for x in P.X])
    q = np.column_stack([np.diag(P.sigma[y]).real for y in P.Y])
    Q = classical_pair(T @ p, T @ q)
    res = sp.sweep_decide_asymptotic_commuting(P, Q, gamma_res=4)
    assert res.verdict == sp.GE


def test_classical_table_matches_pointwise(rng):
    P = random_classical_pair(rng, d=3, nx=2, ny=3)
    from submaj.families import classical_vectors

    p, q = classical_vectors(P)
    gammas = sp.simplex_grid(P.Y, 3)
    W = np.array([[g.as_dict().get(y, 0.0) for y in P.Y] for g in gammas])
    table = sp.classical_log_table(p, q, sp.DEFAULT_ALPHAS, W)
    for ia, a in enumerate(sp.DEFAULT_ALPHAS):
        for ix, x in enumerate(P.X):
            for ig, g in enumerate(gammas):
                v = sp.evaluate(sp.SpectralPoint.classical(a, x, g), P)
                assert table[ia, ix, ig] == pytest.approx(math.log(v), abs=1e-10)


def test_commuting_sigma_route_matches_classical(rng):
    # rho non-diagonal, sigma diagonal: the commuting route must agree with a direct computation
    rho = np.array([[0.6, 0.2], [0.2, 0.4]])
    P = FamilyPair.build({"x": rho}, {"a": np.diag([1.0, 2.0]), "b": np.diag([2.0, 0.5])})
    f = sp.SpectralPoint.classical(2.0, "x", {"a": 0.5, "b": 0.5})
    mean = np.diag([math.sqrt(2.0), 1.0])
    from submaj.divergences import sandwiched_quasientropy

    assert sp.evaluate(f, P) == pytest.approx(sandwiched_quasientropy(rho, mean, 2.0))
    # the equivalent mean program gives the same value since the sigmas commute
    g = sp.SpectralPoint.mean(2.0, "x", MeanProgram.geo(MeanProgram.load("a"), MeanProgram.load("b"), 0.5))
    assert sp.evaluate(g, P) == pytest.approx(sp.evaluate(f, P))


def test_grids():
    assert len(sp.simplex_grid(["a", "b"], 8)) == 9
    assert len(sp.simplex_grid(["a", "b", "c"], 4)) == 15
    big = sp.simplex_grid(list("abcde"), 8)
    assert len(big) == 5 + 1 + 10
    assert all(g.is_probability() for g in big)
    assert sp.alpha_grid("1,2,inf") == (1.0, 2.0, math.inf)
    with pytest.raises(ValueError):
        sp.alpha_grid("0.5")


def test_rel_margin():
    assert sp.rel_margin_from_logs(math.log(2), math.log(1)) == pytest.approx(0.5)
    assert sp.rel_margin_from_logs(math.log(1), math.log(2)) == pytest.approx(-0.5)
    assert sp.rel_margin_from_logs(-math.inf, -math.inf) == 0.0
    assert sp.rel_margin_from_logs(1000.0, 1000.0) == 0.0


def test_sweep_verdicts_and_csv():
    res = sp.sweep_decide(u, one)
    assert res.verdict == sp.GE and not res.violations
    res = sp.sweep_decide(one, u)
    assert res.verdict == sp.LT
    lines = res.to_csv().strip().splitlines()
    assert lines[0] == ",".join(sp.CSV_HEADER)
    assert len(lines) == 1 + len(res.rows)
    assert res.to_csv(only_violations=True).count("\n") == 1 + len(res.violations)
    near = sp.sweep_decide(one, scalar_pair(1.0 + 2e-7, 1.0), alphas=(1.0, 2.0))
    assert near.verdict == sp.INCONCLUSIVE


def test_quantum_sweep(rng):
    P = random_quantum_pair(rng, 2, nx=1, ny=2, trace=1.0)
    res = sp.sweep_decide(P, P, depth=1)
    assert res.verdict == sp.GE and res.necessary_only
    assert all(r.point.quantum for r in res.rows)


def test_deterministic_with_threads(monkeypatch, rng):
    P = random_quantum_pair(rng, 2, nx=2, ny=2)
    Q = random_quantum_pair(rng, 2, nx=2, ny=2)
    monkeypatch.setenv("SUBMAJ_THREADS", "1")
    a = sp.sweep_decide(P, Q, depth=1).to_csv()
    monkeypatch.setenv("SUBMAJ_THREADS", "4")
    b = sp.sweep_decide(P, Q, depth=1).to_csv()
    assert a == b


def test_catalytic_and_find_violation():
    status, _ = sp.check_catalytic_sufficient(u, scalar_pair(1.5, 1.0))
    assert status == sp.STRICT_ALL_SAMPLED
    status, _ = sp.check_catalytic_sufficient(u, u)
    assert status == sp.NOT_STRICT
    assert sp.find_violation(u, one) is None
    point, fp, fq = sp.find_violation(one, u)
    assert fp < fq


@pytest.mark.parametrize("alpha", [1.0, 2.0, math.inf])
def test_joint_convexity(alpha):
    f = sp.SpectralPoint.classical(alpha, "x", FiniteMeasure.from_dict({"a": 0.3, "b": 0.7}))
    assert sp.joint_convexity_test(f, trials=300).ok


def test_point_validation():
    with pytest.raises(Exception):
        sp.SpectralPoint.classical(2.0, "x", {"a": 0.5})
    f = sp.SpectralPoint.classical(2.0, "zz", {"0": 1.0})
    with pytest.raises(Exception):
        sp.evaluate(f, one)
