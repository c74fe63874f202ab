import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from submaj.divergences import (classical_renyi_divergence, max_divergence, sandwiched_divergence,
                                sandwiched_geometric_divergence, sandwiched_quasientropy, thompson_metric)
from submaj.errors import AlphaOutOfRange, DomainError, GammaOutOfRange
from submaj.sampling import apply_kraus, random_density, random_kraus, random_unitary

ALPHAS = [1.0, 1.5, 2.0, 3.0, math.inf]
seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_commuting_reduces_to_classical(alpha):
    p = np.array([0.5, 0.3, 0.2])
    q = np.array([0.2, 0.2, 0.6])
    got = sandwiched_divergence(np.diag(p), np.diag(q), alpha)
    assert got == pytest.approx(classical_renyi_divergence(p, q, alpha), abs=1e-12)


def test_hand_values():
    # D_2(p||q) = log2 sum p^2/q
    p, q = np.array([0.5, 0.5]), np.array([0.25, 0.75])
    assert classical_renyi_divergence(p, q, 2.0) == pytest.approx(math.log2(4 / 3))
    assert classical_renyi_divergence(p, q, math.inf) == pytest.approx(1.0)
    assert classical_renyi_divergence(p, q, 1.0) == pytest.approx(0.5 * math.log2(2) + 0.5 * math.log2(2 / 3))


def test_quasientropy_alpha_one_is_trace(rng):
    rho = 2.0 * random_density(rng, 3)
    assert sandwiched_quasientropy(rho, random_density(rng, 3), 1.0) == pytest.approx(2.0)


@given(seeds, st.integers(1, 4))
def test_identical_states_zero(seed, d):
    rho = random_density(np.random.default_rng(seed), d)
    for a in ALPHAS:
        assert abs(sandwiched_divergence(rho, rho, a)) < 1e-9


@given(seeds)
def test_monotone_in_alpha(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(rng, 3), random_density(rng, 3)
    vals = [sandwiched_divergence(rho, sigma, a) for a in ALPHAS]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


@given(seeds, st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf]))
def test_data_processing(seed, alpha):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(rng, 3), random_density(rng, 3)
    ks = random_kraus(rng, 3, 2, n_kraus=3)
    before = sandwiched_divergence(rho, sigma, alpha)
    after = sandwiched_divergence(apply_kraus(ks, rho), apply_kraus(ks, sigma), alpha)
    assert after <= before + 1e-7


@given(seeds)
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho, sigma, u = random_density(rng, 3), random_density(rng, 3), random_unitary(rng, 3)
    a = sandwiched_divergence(rho, sigma, 2.0)
    b = sandwiched_divergence(u @ rho @ u.conj().T, u @ sigma @ u.conj().T, 2.0)
    assert a == pytest.approx(b, abs=1e-9)


@given(seeds, st.sampled_from([1.5, 2.0, 3.0]))
def test_geometric_divergence_gamma_zero(seed, alpha):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(rng, 2), random_density(rng, 2)
    assert sandwiched_geometric_divergence(rho, sigma, alpha, 0.0) == pytest.approx(
        sandwiched_divergence(rho, sigma, alpha), abs=1e-9)


@given(seeds, st.sampled_from([0.25, 0.5, 0.75]))
def test_geometric_divergence_data_processing(seed, gamma):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(rng, 3), random_density(rng, 3)
    ks = random_kraus(rng, 3, 3, n_kraus=2)
    before = sandwiched_geometric_divergence(rho, sigma, 2.0, gamma)
    after = sandwiched_geometric_divergence(apply_kraus(ks, rho), apply_kraus(ks, sigma), 2.0, gamma)
    assert after <= before + 1e-7


def test_geometric_divergence_commuting():
    # for commuting inputs the mean is sigma^(1-g) rho^g, so D_{a,g} = D_a classically
    p, q = np.array([0.7, 0.3]), np.array([0.4, 0.6])
    got = sandwiched_geometric_divergence(np.diag(p), np.diag(q), 2.0, 0.5)
    assert got == pytest.approx(classical_renyi_divergence(p, q, 2.0), abs=1e-12)


def test_max_divergence_and_thompson():
    a, b = np.diag([1.0, 4.0]), np.diag([2.0, 1.0])
    assert max_divergence(a, b) == pytest.approx(2.0)
    assert max_divergence(b, a) == pytest.approx(1.0)
    assert thompson_metric(a, b) == thompson_metric(b, a) == pytest.approx(2.0)


def test_domain_errors():
    rho = np.eye(2) / 2
    with pytest.raises(AlphaOutOfRange):
        sandwiched_divergence(rho, rho, 0.5)
    with pytest.raises(GammaOutOfRange):
        sandwiched_geometric_divergence(rho, rho, 2.0, 1.0)
    with pytest.raises(DomainError):
        sandwiched_divergence(rho, np.diag([1.0, 0.0]), 2.0)
    assert sandwiched_geometric_divergence(np.diag([1.0, 0.0]), rho, 2.0, 0.5) == math.inf
