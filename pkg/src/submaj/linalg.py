"""Dense Hermitian linear algebra on top of the cyclic Jacobi kernel.

Matrices are plain ``numpy`` complex arrays. The eigensolver backend is the
compiled extension when it is importable and the pure-Python kernel
otherwise; setting ``SUBMAJ_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionMismatch, DomainError, NotHermitian, NotUnitary

TOL_HERMITIAN = 1e-10
TOL_PSD = 1e-9

if os.environ.get("SUBMAJ_PURE_PYTHON", "") not in ("", "0"):
    from ._jacobi_py import jacobi_eigh as _jacobi_eigh

    BACKEND = "python"
else:
    try:
        from ._jacobi_ext import jacobi_eigh as _jacobi_eigh

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from ._jacobi_py import jacobi_eigh as _jacobi_eigh

        BACKEND = "python"


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_hermitian(a, tol: float = TOL_HERMITIAN) -> np.ndarray:
    """Return ``a`` as a square complex array after checking Hermiticity.

    The symmetric part is returned, so later code never sees the
    sub-tolerance skew component.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    skew = np.max(np.abs(a - a.conj().T))
    if skew > tol * max(1.0, float(np.max(np.abs(a)))):
        raise NotHermitian(f"matrix is not Hermitian (max |A - A*| = {skew:.3e})")
    return 0.5 * (a + a.conj().T)


def eig(a, tol: float = TOL_HERMITIAN) -> EigenDecomposition:
    """Eigendecomposition ``A = U diag(w) U*`` with ascending ``w``."""
    a = as_hermitian(a, tol)
    w, v, _ = _jacobi_eigh(a)
    return EigenDecomposition(w, v)


def eigvalsh(a) -> np.ndarray:
    return eig(a).eigenvalues


def _reassemble(w, v):
    return (v * w) @ v.conj().T


def mat_fn(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply the scalar function ``f`` to the spectrum of ``a``.

    ``f`` receives the eigenvalue array; a non-finite image raises
    :class:`DomainError`.
    """
    w, v = eig(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=np.float64)
    if not np.all(np.isfinite(fw)):
        raise DomainError("function undefined on the spectrum")
    return _reassemble(fw, v)


def _clamped_spectrum(a, tol_psd):
    w, v = eig(a)
    if w[0] < -tol_psd:
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return np.clip(w, 0.0, None), v


def _positive_spectrum(a, tol_psd):
    w, v = eig(a)
    if w[0] <= tol_psd:
        raise DomainError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    return w, v


def mpow(a, p: float, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Matrix power. Nonnegative exponents accept PSD input (eigenvalues in
    ``[-tol_psd, 0]`` are clamped to 0); negative exponents need ``a > tol_psd``."""
    if p == 0:
        return np.eye(np.shape(a)[0], dtype=np.complex128)
    if p > 0:
        w, v = _clamped_spectrum(a, tol_psd)
    else:
        w, v = _positive_spectrum(a, tol_psd)
    return _reassemble(w ** p, v)


def msqrt(a, tol_psd: float = TOL_PSD) -> np.ndarray:
    w, v = _clamped_spectrum(a, tol_psd)
    return _reassemble(np.sqrt(w), v)


def minv(a, tol_psd: float = TOL_PSD) -> np.ndarray:
    w, v = _positive_spectrum(a, tol_psd)
    return _reassemble(1.0 / w, v)


def mlog(a, tol_psd: float = TOL_PSD) -> np.ndarray:
    w, v = _positive_spectrum(a, tol_psd)
    return _reassemble(np.log(w), v)


def mexp(a) -> np.ndarray:
    w, v = eig(a)
    return _reassemble(np.exp(w), v)


def min_eig(a) -> float:
    return float(eig(a).eigenvalues[0])


def loewner_geq(a, b, tol: float = 0.0) -> bool:
    """``A >= B`` in the Loewner order, up to ``tol`` on the smallest eigenvalue."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return min_eig(a - b) >= -tol


def is_psd(a, tol: float = TOL_PSD) -> bool:
    return min_eig(a) >= -tol


def is_pd(a, tol: float = TOL_PSD) -> bool:
    return min_eig(a) > tol


def op_norm(a) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    w = eig(a).eigenvalues
    return float(max(abs(w[0]), abs(w[-1])))


def kron(*mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, np.asarray(m, dtype=np.complex128))
    return out


def dsum(*mats) -> np.ndarray:
    """Block-diagonal direct sum; zero-dimensional summands are skipped."""
    mats = [np.asarray(m, dtype=np.complex128).reshape(np.shape(m)[0], np.shape(m)[0])
            for m in mats]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out


def partial_trace(a, dims: tuple[int, int], traced: int = 1) -> np.ndarray:
    """Trace out factor ``traced`` (0 or 1) of an operator on ``C^d0 (x) C^d1``."""
    d0, d1 = dims
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (d0 * d1, d0 * d1):
        raise DimensionMismatch(f"shape {a.shape} does not match dims {dims}")
    a4 = a.reshape(d0, d1, d0, d1)
    if traced == 1:
        return np.einsum("iaja->ij", a4)
    if traced == 0:
        return np.einsum("aiaj->ij", a4)
    raise ValueError("traced must be 0 or 1")


def commutator_norm(a, b) -> float:
    """Operator norm of ``[A, B]`` for Hermitian ``A``, ``B``."""
    c = np.asarray(a) @ np.asarray(b) - np.asarray(b) @ np.asarray(a)
    # i[A, B] is Hermitian
    return op_norm(1j * c)


def check_unitary(u, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise NotUnitary(f"matrix is not unitary (max |U*U - I| = {err:.3e})")
    return u


# fixed irrational weights make the generic combination deterministic
_JOINT_WEIGHTS_STEP = (np.sqrt(5.0) - 1.0) / 2.0


def joint_diagonalize(mats, tol: float = 1e-8):
    """Common eigenbasis of pairwise commuting Hermitian matrices.

    Returns ``(U, diags)`` where ``diags[k]`` is the diagonal of
    ``U* mats[k] U``. Raises :class:`DomainError` if the residual
    off-diagonal part exceeds ``tol`` times the matrix scale, which happens
    when the inputs do not commute.
    """
    mats = [as_hermitian(m) for m in mats]
    n = mats[0].shape[0]
    scales = [max(1.0, float(np.max(np.abs(m)))) for m in mats]
    combo = np.zeros((n, n), dtype=np.complex128)
    for k, m in enumerate(mats):
        weight = 1.0 + ((k + 1) * _JOINT_WEIGHTS_STEP) % 1.0
        combo += (weight / scales[k]) * m
    u = eig(combo).eigenvectors
    diags = []
    for m, sc in zip(mats, scales):
        rotated = u.conj().T @ m @ u
        d = rotated.diagonal().real.copy()
        off = np.max(np.abs(rotated - np.diag(d))) if n > 1 else 0.0
        if off > tol * sc:
            raise DomainError(f"matrices are not jointly diagonalizable (residual {off:.3e})")
        diags.append(d)
    return u, diags
