import os
import subprocess
import sys

import numpy as np
from hypothesis import given, strategies as st

from submaj import sampling as sm
from submaj.feasibility import choi_from_kraus, choi_out_trace

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 4))
def test_states_and_unitaries(seed, d):
    rng = np.random.default_rng(seed)
    rho = sm.random_density(rng, d)
    assert abs(np.trace(rho).real - 1) < 1e-12 and np.linalg.eigvalsh(rho).min() > 0
    u = sm.random_unitary(rng, d)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


@given(seeds, st.floats(0.1, 1.0))
def test_kraus_contraction(seed, c):
    rng = np.random.default_rng(seed)
    ks = sm.random_kraus(rng, 2, 3, n_kraus=2, contraction=c)
    np.testing.assert_allclose(choi_out_trace(choi_from_kraus(ks), 2, 3), c * np.eye(2), atol=1e-12)


@given(seeds)
def test_substochastic(seed):
    t = sm.random_substochastic(np.random.default_rng(seed), 3, 4)
    assert np.all(t > 0) and np.all(t.sum(axis=0) <= 1 + 1e-12)


def test_stinespring_channel_preserves_trace(rng):
    ch = sm.random_stinespring_channel(rng, 2, 3)
    out = ch(sm.random_density(rng, 2))
    assert abs(np.trace(out).real - 1) < 1e-12 and np.linalg.eigvalsh(out).min() > -1e-12


def test_seeded_reproducibility():
    a = sm.random_classical_pair(sm.rng_from(7))
    b = sm.random_classical_pair(sm.rng_from(7))
    assert a.X == b.X and all(np.array_equal(a.rho[x], b.rho[x]) for x in a.X)


def test_decision_identical_on_python_backend():
    code = ("import numpy as np, submaj\n"
            "from submaj.sampling import random_quantum_pair\n"
            "rng = np.random.default_rng(3)\n"
            "P = random_quantum_pair(rng, 2, 2, 2); Q = random_quantum_pair(rng, 2, 2, 2)\n"
            "r = submaj.decide_submajorization(P, Q, explain=False)\n"
            "print(submaj.BACKEND, r.status, repr(r.slack))\n")
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, SUBMAJ_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, status, slack = res.stdout.split()
        outs[backend] = (status, float(slack))
    assert "python" in outs
    statuses = {s for s, _ in outs.values()}
    slacks = [v for _, v in outs.values()]
    assert len(statuses) == 1
    assert max(slacks) - min(slacks) < 1e-8
