"""Small dense primal-dual interior-point solver for max-slack LMIs.

Solves::

    maximize    t
    subject to  C_b + sum_k z_k F_b[k] - t I  >= 0   for every block b

over real ``z`` and ``t``. The dual iterates are kept strictly feasible, so
the returned ``t`` is always a certified lower bound on the optimum and
``z`` the matching strictly feasible point. The primal objective gives
the upper bound. The method is the HKM direction with Mehrotra
predictor-corrector steps on Hermitian (possibly complex) blocks.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import SolverStall

log = logging.getLogger(__name__)


@dataclass
class MaxSlackResult:
    t: float
    upper: float
    z: np.ndarray
    iterations: int
    converged: bool
    gap: float
    primal_infeasibility: float


def _herm(a):
    return 0.5 * (a + a.conj().swapaxes(-1, -2))


def _inner(xs, ss):
    return float(sum(np.real(np.vdot(x, s)) for x, s in zip(xs, ss)))


def _chol_inv(s):
    try:
        c = sla.cho_factor(s, lower=True)
        return sla.cho_solve(c, np.eye(s.shape[0], dtype=s.dtype))
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(s)
        w = np.maximum(w, 1e-300)
        return (v / w) @ v.conj().T


def _max_step(x, dx):
    """Largest ``a`` with ``x + a dx >= 0`` (``inf`` if unbounded)."""
    try:
        lo = np.linalg.cholesky(x)
        li = sla.solve_triangular(lo, np.eye(x.shape[0], dtype=x.dtype), lower=True)
        m = li @ dx @ li.conj().T
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(x)
        w = np.maximum(w, 1e-300)
        r = v / np.sqrt(w)
        m = r.conj().T @ dx @ r
    lam = np.linalg.eigvalsh(_herm(m))[0]
    if lam >= 0:
        return np.inf
    return -1.0 / lam


def max_slack(C, F, tol: float = 1e-9, max_iter: int = 120, step_fraction: float = 0.98) -> MaxSlackResult:
    """Solve the max-slack LMI described in the module docstring.

    Parameters
    ----------
    C : list of (n_b, n_b) arrays
        Constant Hermitian blocks.
    F : list of (m, n_b, n_b) arrays
        Hermitian coefficient blocks, one stack per block, sharing ``m``.
    tol : float
        Relative gap and primal infeasibility target.
    """
    C = [_herm(np.asarray(c, dtype=np.complex128)) for c in C]
    m = F[0].shape[0] if len(F) else 0
    # standard dual form: S = C - sum_i y_i A_i with y = (z, t)
    A = []
    for c, f in zip(C, F):
        nb = c.shape[0]
        blk = np.empty((m + 1, nb, nb), dtype=np.complex128)
        blk[:m] = -_herm(np.asarray(f, dtype=np.complex128))
        blk[m] = np.eye(nb)
        A.append(blk)
    mm = m + 1
    b = np.zeros(mm)
    b[m] = 1.0
    ntot = sum(c.shape[0] for c in C)

    def a_op(xs):
        out = np.zeros(mm)
        for ab, x in zip(A, xs):
            out += np.real(np.tensordot(ab.conj(), x, axes=([1, 2], [0, 1])))
        return out

    def a_adj(y):
        return [np.tensordot(y, ab, axes=1) for ab in A]

    lam_min = min(np.linalg.eigvalsh(c)[0] for c in C)
    scale = max(1.0, max(np.max(np.abs(c)) for c in C))
    y = np.zeros(mm)
    y[m] = lam_min - scale
    S = [c - y[m] * np.eye(c.shape[0]) for c in C]
    X = [np.eye(c.shape[0], dtype=np.complex128) / ntot for c in C]
    cnorm = max(np.linalg.norm(c) for c in C)

    def step(X, y, S, rp, Rd, mu):
        Z = [_chol_inv(s) for s in S]
        M = np.zeros((mm, mm))
        for ab, x, z in zip(A, X, Z):
            W = x @ ab @ z
            M += np.real(ab.reshape(mm, -1).conj() @ W.reshape(mm, -1).T).T
        M = 0.5 * (M + M.T)
        try:
            fac = sla.cho_factor(M)
            solve = lambda h: sla.cho_solve(fac, h)  # noqa: E731
        except np.linalg.LinAlgError:
            Mp = np.linalg.pinv(M, rcond=1e-14)
            solve = lambda h: Mp @ h  # noqa: E731

        def direction(R):
            h = rp - a_op([(r - x @ rd) @ z for r, x, rd, z in zip(R, X, Rd, Z)])
            dy = solve(h)
            dS = [_herm(rd - g) for rd, g in zip(Rd, a_adj(dy))]
            dX = [_herm((r - x @ ds) @ z) for r, x, ds, z in zip(R, X, dS, Z)]
            return dX, dy, dS

        def lengths(dX, dS):
            ap = min(1.0, step_fraction * min(_max_step(x, d) for x, d in zip(X, dX)))
            ad = min(1.0, step_fraction * min(_max_step(s, d) for s, d in zip(S, dS)))
            return ap, ad

        # Mehrotra predictor
        XS = [x @ s for x, s in zip(X, S)]
        dXa, _, dSa = direction([-xs for xs in XS])
        ap, ad = lengths(dXa, dSa)
        mu_aff = _inner([x + ap * d for x, d in zip(X, dXa)], [s + ad * d for s, d in zip(S, dSa)]) / ntot
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0
        # corrector
        R = [sigma * mu * np.eye(x.shape[0]) - xs - dxa @ dsa for x, xs, dxa, dsa in zip(X, XS, dXa, dSa)]
        dX, dy, dS = direction(R)
        ap, ad = lengths(dX, dS)
        X = [_herm(x + ap * d) for x, d in zip(X, dX)]
        y = y + ad * dy
        # recompute S from y so dual feasibility does not drift
        S = [_herm(c - g) for c, g in zip(C, a_adj(y))]
        for blk in (*X, *S):
            if not np.all(np.isfinite(blk)):
                raise FloatingPointError("non-finite iterate")
        return X, y, S

    converged = False
    it = 0
    pinf = rel_gap = np.inf
    good = None  # last iterate meeting the loose acceptance test
    last_dobj, flat = -np.inf, 0
    for it in range(1, max_iter + 1):
        rp = b - a_op(X)
        Rd = [c - s - g for c, s, g in zip(C, S, a_adj(y))]
        mu = _inner(X, S) / ntot
        pobj = _inner(C, X)
        dobj = float(y[m])
        pinf = np.linalg.norm(rp) / (1.0 + np.linalg.norm(b))
        dinf = max(np.linalg.norm(r) for r in Rd) / (1.0 + cnorm)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        log.debug("iter %d: t=%.12g pobj=%.12g mu=%.3e pinf=%.3e", it, dobj, pobj, mu, pinf)
        if rel_gap < tol and pinf < tol and dinf < tol:
            converged = True
            break
        if rel_gap < 1e-7 and pinf < 1e-7:
            good = (X, y, S, rel_gap, pinf)
        # the dual bound has stopped moving: further steps only lose accuracy
        flat = flat + 1 if dobj - last_dobj <= 1e-13 * (1.0 + abs(dobj)) else 0
        last_dobj = dobj
        if flat >= 3 and good is not None:
            break
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                X, y, S = step(X, y, S, rp, Rd, mu)
        except (np.linalg.LinAlgError, FloatingPointError, OverflowError):
            log.debug("numerical breakdown at iteration %d", it)
            break

    if not converged and good is not None:
        X, y, S, rel_gap, pinf = good

    # certified lower bound: smallest eigenvalue of the slack at the final y
    shift = min(np.linalg.eigvalsh(s)[0] for s in S)
    t_cert = float(y[m] + min(0.0, shift))
    upper = _inner(C, X) if pinf < 1e-6 else np.inf
    if not converged and good is None:
        raise SolverStall(f"interior-point method stalled after {it} iterations "
                          f"(gap {rel_gap:.2e}, primal infeasibility {pinf:.2e})")
    return MaxSlackResult(t=t_cert, upper=float(upper), z=y[:m].copy(), iterations=it,
                          converged=converged, gap=float(rel_gap), primal_infeasibility=float(pinf))
