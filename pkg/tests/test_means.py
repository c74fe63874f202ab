import numpy as np
import pytest
from hypothesis import given, strategies as st

from submaj.errors import DomainError, MalformedProgram, NotCommuting
from submaj.families import FiniteMeasure
from submaj.means import MeanProgram, commuting_log_mean, enumerate_programs, geometric_mean
from submaj.sampling import apply_kraus, random_kraus, random_pd, random_unitary

seeds = st.integers(0, 2**32 - 1)
weights = st.floats(0.0, 1.0)


def test_commuting_closed_form():
    a, b = np.diag([1.0, 4.0]), np.diag([9.0, 1.0])
    np.testing.assert_allclose(geometric_mean(a, b, 0.5), np.diag([3.0, 2.0]), atol=1e-12)
    np.testing.assert_allclose(geometric_mean(a, b, 0.25), np.diag([9 ** 0.25, 4 ** 0.75]), atol=1e-12)


@given(seeds, weights)
def test_endpoints_and_symmetry(seed, g):
    rng = np.random.default_rng(seed)
    a, b = random_pd(rng, 3), random_pd(rng, 3)
    np.testing.assert_allclose(geometric_mean(a, b, 0.0), a, atol=1e-10)
    np.testing.assert_allclose(geometric_mean(a, b, 1.0), b, atol=1e-9)
    np.testing.assert_allclose(geometric_mean(a, b, g), geometric_mean(b, a, 1 - g), atol=1e-8)


@given(seeds)
def test_riccati_characterization(seed):
    # A #_{1/2} B is the positive solution of X A^-1 X = B
    rng = np.random.default_rng(seed)
    a, b = random_pd(rng, 3), random_pd(rng, 3)
    x = geometric_mean(a, b, 0.5)
    np.testing.assert_allclose(x @ np.linalg.inv(a) @ x, b, atol=1e-8)


@given(seeds, weights)
def test_transformer_and_homogeneity(seed, g):
    rng = np.random.default_rng(seed)
    a, b = random_pd(rng, 2), random_pd(rng, 2)
    u = random_unitary(rng, 2)
    m = geometric_mean(a, b, g)
    np.testing.assert_allclose(geometric_mean(u @ a @ u.conj().T, u @ b @ u.conj().T, g),
                               u @ m @ u.conj().T, atol=1e-9)
    np.testing.assert_allclose(geometric_mean(2 * a, 3 * b, g), 2 ** (1 - g) * 3 ** g * m, atol=1e-9)


@given(seeds, weights)
def test_monotone_and_superadditive_under_channels(seed, g):
    rng = np.random.default_rng(seed)
    a, b = random_pd(rng, 3), random_pd(rng, 3)
    ks = random_kraus(rng, 3, 2, n_kraus=2)
    lhs = geometric_mean(apply_kraus(ks, a), apply_kraus(ks, b), g)
    rhs = apply_kraus(ks, geometric_mean(a, b, g))
    assert np.linalg.eigvalsh(lhs - rhs).min() > -1e-8
    # monotone in the second argument
    assert np.linalg.eigvalsh(geometric_mean(a, b + np.eye(3), g) - geometric_mean(a, b, g)).min() > -1e-9


def test_domain():
    with pytest.raises(DomainError):
        geometric_mean(np.eye(2), np.eye(2), 1.5)
    with pytest.raises(DomainError):
        geometric_mean(np.diag([1.0, 0.0]), np.eye(2), 0.5)


def test_program_roundtrip_and_weights():
    p = MeanProgram.geo(MeanProgram.geo(MeanProgram.load("a"), MeanProgram.load("b"), 0.5),
                        MeanProgram.load("c"), 0.25)
    q = MeanProgram.from_json(p.to_json())
    assert q == p
    assert p.labels() == {"a", "b", "c"}
    w = p.effective_weights()
    assert w == pytest.approx({"a": 0.375, "b": 0.375, "c": 0.25})
    sigma = {"a": np.diag([1.0, 2.0]), "b": np.diag([3.0, 1.0]), "c": np.diag([2.0, 2.0])}
    expect = np.exp(sum(w[k] * np.log(np.diag(sigma[k])) for k in w))
    np.testing.assert_allclose(np.diag(p.evaluate(sigma)).real, expect, atol=1e-12)
    with pytest.raises(MalformedProgram):
        MeanProgram.from_json([{"op": "bogus"}])


def test_enumerate_programs():
    progs = enumerate_programs(["a", "b", "c"], depth=2, gammas=(0.5,))
    # 3 loads, 6 ordered pairs, 6 * 1 remaining label * 2 sides
    assert len(progs) == 3 + 6 + 12
    assert len(set(p.describe() for p in progs)) == len(progs)
    assert len(enumerate_programs(["a", "b", "c"], depth=2, max_programs=5)) == 5


def test_commuting_log_mean():
    sigma = {"a": np.diag([1.0, 4.0]), "b": np.diag([4.0, 1.0])}
    out = commuting_log_mean(sigma, FiniteMeasure.uniform(["a", "b"]))
    np.testing.assert_allclose(out, 2 * np.eye(2), atol=1e-12)
    with pytest.raises(NotCommuting):
        commuting_log_mean({"a": np.eye(2) + np.array([[0, .5], [.5, 0]]), "b": np.diag([1.0, 2.0])},
                           {"a": 0.5, "b": 0.5})
