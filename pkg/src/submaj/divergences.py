"""Sandwiched Renyi quantities, max-divergence, Thompson metric, and the
sandwiched-geometric two-parameter family.

Divergences are reported in bits and are not normalized by ``Tr rho``:
they act on subnormalized operators so that the semiring monotones stay
homogeneous.
"""
from __future__ import annotations

import math

import numpy as np

from . import linalg as la
from .errors import AlphaOutOfRange, DomainError, GammaOutOfRange
from .means import geometric_mean

LN2 = math.log(2.0)


def _check_alpha(alpha):
    if not alpha >= 1.0:
        raise AlphaOutOfRange(f"alpha must be >= 1, got {alpha}")


def sandwiched_quasientropy(rho, sigma, alpha: float) -> float:
    """``Q_alpha(rho||sigma) = Tr (sigma^s rho sigma^s)^alpha`` with ``s = (1-alpha)/(2 alpha)``.

    At ``alpha = 1`` this is ``Tr rho``.
    """
    _check_alpha(alpha)
    rho = la.as_hermitian(rho)
    sigma = la.as_hermitian(sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"shapes {rho.shape} and {sigma.shape} differ")
    w, v = la.eig(sigma)
    if w[0] <= la.TOL_PSD:
        raise DomainError(f"sigma is not positive definite (min eigenvalue {w[0]:.3e})")
    if alpha == 1.0:
        return float(np.trace(rho).real)
    if math.isinf(alpha):
        raise AlphaOutOfRange("use max_divergence for alpha = inf")
    s = (1.0 - alpha) / (2.0 * alpha)
    sig_s = (v * w ** s) @ v.conj().T
    inner = sig_s @ rho @ sig_s
    lam = la.eig(inner).eigenvalues
    if lam[0] < -la.TOL_PSD * max(1.0, lam[-1]):
        raise DomainError(f"rho is not positive semidefinite (min eigenvalue {lam[0]:.3e})")
    lam = np.clip(lam, 0.0, None)
    return float(np.sum(lam ** alpha))


def _umegaki(rho, sigma):
    rho = la.as_hermitian(rho)
    wr, vr = la.eig(rho)
    if wr[0] < -la.TOL_PSD:
        raise DomainError("rho is not positive semidefinite")
    wr = np.clip(wr, 0.0, None)
    log_sigma = la.mlog(sigma)
    with np.errstate(divide="ignore", invalid="ignore"):
        xlogx = np.where(wr > 0, wr * np.log(np.where(wr > 0, wr, 1.0)), 0.0)
    cross = float(np.real(np.trace(rho @ log_sigma)))
    return (float(np.sum(xlogx)) - cross) / LN2


def sandwiched_divergence(rho, sigma, alpha: float) -> float:
    """Sandwiched Renyi divergence ``log2(Q_alpha) / (alpha - 1)`` in bits.

    ``alpha = 1`` gives the Umegaki relative entropy and ``alpha = inf`` the
    max-divergence (the two limits).
    """
    _check_alpha(alpha)
    if math.isinf(alpha):
        return max_divergence(rho, sigma)
    if alpha == 1.0:
        return _umegaki(rho, sigma)
    q = sandwiched_quasientropy(rho, sigma, alpha)
    if q <= 0.0:
        return -math.inf
    return math.log2(q) / (alpha - 1.0)


def max_divergence(rho, sigma) -> float:
    """``log2 || sigma^-1/2 rho sigma^-1/2 ||_inf``."""
    rho = la.as_hermitian(rho)
    s_mhalf = la.mpow(sigma, -0.5)
    top = float(la.eig(s_mhalf @ rho @ s_mhalf).eigenvalues[-1])
    if top <= 0.0:
        return -math.inf
    return math.log2(top)


def thompson_metric(rho, sigma) -> float:
    for m, name in ((rho, "rho"), (sigma, "sigma")):
        if not la.is_pd(m):
            raise DomainError(f"{name} is not positive definite")
    return max(max_divergence(rho, sigma), max_divergence(sigma, rho))


def sandwiched_geometric_divergence(rho, sigma, alpha: float, gamma: float) -> float:
    """Two-parameter divergence ``D_{alpha,gamma}`` in bits.

    Defined as ``D_{alpha'}(rho || sigma #_gamma rho) / (1 - gamma)`` with
    ``alpha' = (alpha - gamma) / (1 - gamma)``. Only ``gamma < 1`` is
    supported. Returns ``inf`` when ``rho`` is singular.
    """
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"alpha must be > 1, got {alpha}")
    if not 0.0 <= gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1), got {gamma}")
    rho = la.as_hermitian(rho)
    if not la.is_pd(sigma):
        raise DomainError("sigma is not positive definite")
    wr = la.eig(rho).eigenvalues
    if wr[0] < -la.TOL_PSD:
        raise DomainError("rho is not positive semidefinite")
    if wr[0] <= la.TOL_PSD:
        return math.inf
    mean = geometric_mean(sigma, rho, gamma)
    alpha_eff = (alpha - gamma) / (1.0 - gamma)
    return sandwiched_divergence(rho, mean, alpha_eff) / (1.0 - gamma)


def classical_renyi_divergence(p, q, alpha: float) -> float:
    """``log2(sum p^alpha q^(1-alpha)) / (alpha - 1)`` for positive vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if math.isinf(alpha):
        return math.log2(float(np.max(p / q)))
    if alpha == 1.0:
        mask = p > 0
        return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))
    return math.log2(float(np.sum(p ** alpha * q ** (1.0 - alpha)))) / (alpha - 1.0)
