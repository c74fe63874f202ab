import math

import numpy as np
import pytest

from submaj import applications as ap
from submaj.divergences import sandwiched_divergence
from submaj.errors import DomainError
from submaj.spectrum import LT, sweep_decide


def test_gibbs_operator():
    g = ap.gibbs_operator(np.diag([0.0, 1.0]), 1.0)
    np.testing.assert_allclose(np.diag(g).real, np.array([1.0, math.exp(-1)]) / (1 + math.exp(-1)))
    assert np.trace(ap.gibbs_operator(np.diag([0.0, 1.0]), 1.0, normalized=False)).real == pytest.approx(
        1 + math.exp(-1))


def test_thermal_system_validation():
    with pytest.raises(DomainError):
        ap.ThermalSystem(np.diag([0.0, 1.0]), 1.0, np.eye(2))
    with pytest.raises(DomainError):
        ap.ThermalSystem(np.diag([0.0, 1.0]), -1.0, np.eye(2) / 2)


def test_evolution_is_unitary_conjugation():
    plus = np.full((2, 2), 0.5)
    s = ap.ThermalSystem(np.diag([0.0, 1.0]), 1.0, plus)
    # after time pi the relative phase is -1, giving |-><-|
    np.testing.assert_allclose(s.evolve(math.pi), np.array([[0.5, -0.5], [-0.5, 0.5]]), atol=1e-12)


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_monotone_matches_diagonal_oracle(eps):
    h, tau, initial, _ = ap.faist_states(1.0, eps)
    val = ap.thermal_monotone(ap.ThermalSystem(h, 1.0, initial), 2.0, 0.5, math.pi)
    assert val == pytest.approx(ap.faist_initial_oracle(1.0, eps), abs=1e-10)


def test_monotone_gamma_one_is_plain_divergence():
    h, tau, initial, _ = ap.faist_states(1.0, 0.1)
    s = ap.ThermalSystem(h, 1.0, initial)
    assert ap.thermal_monotone(s, 2.0, 1.0, 0.0) == pytest.approx(sandwiched_divergence(initial, tau, 2.0))
    assert ap.thermal_monotone(s.with_state(np.diag([1.0, 0.0])), 2.0, 0.5, math.pi) == math.inf


def test_oracle_limit():
    assert ap.faist_limit(1.0) == pytest.approx(0.5 * math.log2(1 + math.e))
    assert ap.faist_initial_oracle(1.0, 1e-8) == pytest.approx(ap.faist_limit(1.0), abs=1e-6)


def test_faist_report():
    rep = ap.run_faist_example(1.0, [1e-2, 1e-3], feasibility=False)
    assert rep.target_exceeds_initial and rep.target_increasing
    assert rep.slope > 0
    data = rep.to_json()
    assert [r["epsilon"] for r in data["rows"]] == [1e-2, 1e-3]


def test_faist_feasibility_split():
    assert ap.faist_feasibility(1.0, 1e-2, covariant=False).status == "Feasible"
    assert ap.faist_feasibility(1.0, 1e-2, covariant=True).status == "Infeasible"


def test_thermal_orbit_pair_sweep_detects_obstruction():
    h, _, initial, target = ap.faist_states(1.0, 1e-2)
    P = ap.thermal_orbit_pair(h, 1.0, initial, n_points=4)
    Q = ap.thermal_orbit_pair(h, 1.0, target, n_points=4)
    assert P.X == ("t0", "t1", "t2", "t3", "gibbs")
    assert sweep_decide(P, Q, depth=1).verdict == LT


def test_same_orbit_exponent_equals_rate():
    for r in (0.0, 0.5, 1.0, 2.0):
        assert ap.strong_converse_exponent(ap.same_orbit_query(r)) == pytest.approx(r, abs=1e-12)


def test_reference_frames_lower_exponent_towards_unrestricted():
    vals = [ap.reference_frame_exponent(ap.cyclic_reference_query(1.5, k)) for k in (0.0, 1.0, 10.0, 1e3)]
    # more reference systems lift the symmetry restriction
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    unres = ap.unrestricted_exponent(1.5, np.diag([0.6, 0.3, 0.1]), np.diag([0.2, 0.3, 0.5]))
    assert vals[0] > unres
    assert abs(unres - vals[-1]) < 0.05


def test_unrestricted_exponent_commuting_oracle():
    # brute-force grid over alpha for a commuting pair
    rho, sigma = np.diag([0.9, 0.1]), np.diag([0.5, 0.5])
    r = 1.0
    grid = np.linspace(1.0001, 60, 20000)
    p, q = np.array([0.9, 0.1]), np.array([0.5, 0.5])
    brute = max((a - 1) / a * (r - math.log2(np.sum(p ** a * q ** (1 - a))) / (a - 1)) for a in grid)
    assert ap.unrestricted_exponent(r, rho, sigma) == pytest.approx(max(0.0, brute), abs=1e-4)


def test_exponent_query_validation():
    with pytest.raises(DomainError):
        ap.cyclic_reference_query(1.0, 1.0, omega=np.eye(3) / 3)
    with pytest.raises(DomainError):
        ap.ExponentQuery(-1.0, np.eye(2) / 2, np.eye(2) / 2, [np.eye(2)])


def test_approx_joint_transform_check():
    fine = ap.approx_joint_transform_check({"a": [0.9, 0.1], "b": [0.1, 0.9]},
                                           {"a": [0.6, 0.4], "b": [0.4, 0.6]})
    assert fine.status == ap.CONDITIONS_HOLD
    bad = ap.approx_joint_transform_check({"a": [0.6, 0.4], "b": [0.4, 0.6]},
                                          {"a": [0.99, 0.01], "b": [0.01, 0.99]})
    assert bad.status == ap.VIOLATED
    point, fp, fq = bad.witness
    assert fp < fq
    with pytest.raises(DomainError):
        ap.approx_joint_transform_check({"a": [0.5, 0.6]}, {"a": [0.5, 0.5]})
