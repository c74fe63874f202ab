import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from submaj import linalg as la
from submaj._jacobi_py import jacobi_eigh as py_eigh
from submaj.errors import DimensionMismatch, DomainError, NotHermitian, NotUnitary
from submaj.sampling import random_hermitian, random_pd, random_unitary

try:
    from submaj._jacobi_ext import jacobi_eigh as ext_eigh
except ImportError:  # pragma: no cover
    ext_eigh = None

KERNELS = [pytest.param(py_eigh, id="python"),
           pytest.param(ext_eigh, id="cython",
                        marks=pytest.mark.skipif(ext_eigh is None, reason="extension not built"))]


@pytest.mark.parametrize("kernel", KERNELS)
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_jacobi_matches_numpy(kernel, n, rng):
    a = random_hermitian(rng, n)
    w, v, _ = kernel(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(a @ v, v * w, atol=1e-12)


@pytest.mark.parametrize("kernel", KERNELS)
def test_jacobi_degenerate_and_zero(kernel):
    w, v, sweeps = kernel(np.zeros((3, 3)))
    assert sweeps == 0 and np.all(w == 0)
    a = np.diag([2.0, 2.0, -1.0]).astype(complex)
    w, v, _ = kernel(a)
    np.testing.assert_allclose(w, [-1, 2, 2], atol=1e-14)


@pytest.mark.skipif(ext_eigh is None, reason="extension not built")
def test_backends_agree_to_rounding(rng):
    for n in (2, 4, 6):
        a = random_hermitian(rng, n)
        w1, _, s1 = py_eigh(a)
        w2, _, s2 = ext_eigh(a)
        np.testing.assert_allclose(w1, w2, atol=1e-13)
        assert s1 == s2


def test_pure_python_switch():
    env = dict(os.environ, SUBMAJ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import submaj; print(submaj.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_mat_functions_roundtrip(n, seed):
    rng = np.random.default_rng(seed)
    a = random_pd(rng, n)
    np.testing.assert_allclose(la.mexp(la.mlog(a)), a, atol=1e-10)
    s = la.msqrt(a)
    np.testing.assert_allclose(s @ s, a, atol=1e-10)
    np.testing.assert_allclose(la.minv(a) @ a, np.eye(n), atol=1e-9)
    np.testing.assert_allclose(la.mpow(a, 0.3) @ la.mpow(a, 0.7), a, atol=1e-10)


def test_unitary_invariance_of_functions(rng):
    a = random_pd(rng, 4)
    u = random_unitary(rng, 4)
    np.testing.assert_allclose(la.mpow(u @ a @ u.conj().T, 0.4), u @ la.mpow(a, 0.4) @ u.conj().T, atol=1e-10)


def test_loewner_and_psd():
    a = np.diag([2.0, 1.0])
    b = np.diag([1.0, 1.0])
    assert la.loewner_geq(a, b)
    assert not la.loewner_geq(b, a)
    assert la.is_psd(np.diag([0.0, 1.0])) and not la.is_pd(np.diag([0.0, 1.0]))
    with pytest.raises(DomainError):
        la.mlog(np.diag([-1.0, 1.0]))


def test_kron_dsum_partial_trace(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
    ab = la.kron(a, b)
    np.testing.assert_allclose(la.partial_trace(ab, (2, 3), traced=1), a * np.trace(b), atol=1e-12)
    np.testing.assert_allclose(la.partial_trace(ab, (2, 3), traced=0), b * np.trace(a), atol=1e-12)
    d = la.dsum(a, b)
    assert d.shape == (5, 5) and np.allclose(d[:2, :2], a) and np.allclose(d[2:, 2:], b)
    with pytest.raises(DimensionMismatch):
        la.partial_trace(ab, (3, 3))


def test_input_validation():
    with pytest.raises(NotHermitian):
        la.as_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotUnitary):
        la.check_unitary(np.diag([1.0, 2.0]))


def test_joint_diagonalize(rng):
    u = random_unitary(rng, 3)
    mats = [u @ np.diag(d) @ u.conj().T for d in ([1, 1, 2], [3, 4, 4], [0.5, 1, 1.5])]
    v, diags = la.joint_diagonalize(mats)
    for m, d in zip(mats, diags):
        np.testing.assert_allclose(v @ np.diag(d) @ v.conj().T, m, atol=1e-10)
    with pytest.raises(DomainError):
        la.joint_diagonalize([np.diag([1.0, 2.0]), np.array([[0, 1], [1, 0]])])
