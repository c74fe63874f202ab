"""Deciding relative submajorization by conic feasibility over Choi operators.

Convention: a map ``T`` from ``dim_in`` to ``dim_out`` is stored through its
Choi operator ``J`` on ``C^dim_in (x) C^dim_out`` and acts as
``T_J(A) = Tr_in[J (A^T (x) I)]`` with the transpose taken in the
computational basis. ``T`` is completely positive iff ``J >= 0`` and
trace-nonincreasing iff ``Tr_out J <= I``.

Every decision solves the max-slack problem: maximize ``t`` such that all
required operator inequalities hold with ``t I`` to spare. The sign of the
optimum ``t*`` decides the question.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import linalg as la
from .errors import DimensionCap, LengthMismatch, NotClassical
from .families import FamilyPair, classical_vectors, is_classical, validate_labels
from .sdp import max_slack

TOL_FEAS = 1e-7
MAX_CHOI_DIM = 64
TOL_VERIFY = 1e-6

FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"
MARGINAL = "Marginal"

EXIT_CODES = {FEASIBLE: 0, INFEASIBLE: 1, MARGINAL: 2}


def classify(slack: float, tol_feas: float = TOL_FEAS) -> str:
    if slack >= -tol_feas:
        return FEASIBLE
    if slack < -10.0 * tol_feas:
        return INFEASIBLE
    return MARGINAL


# ---------------------------------------------------------------- Choi algebra

def choi_apply(J, a, dim_in: int, dim_out: int) -> np.ndarray:
    """``T_J(A) = Tr_in[J (A^T (x) I)]``."""
    j4 = np.asarray(J).reshape(dim_in, dim_out, dim_in, dim_out)
    return np.einsum("iajb,ij->ab", j4, np.asarray(a, dtype=np.complex128))


def choi_out_trace(J, dim_in: int, dim_out: int) -> np.ndarray:
    return np.einsum("iaja->ij", np.asarray(J).reshape(dim_in, dim_out, dim_in, dim_out))


def identity_choi(d: int) -> np.ndarray:
    """Unnormalized maximally entangled operator, the Choi operator of the identity map."""
    v = np.eye(d, dtype=np.complex128).reshape(d * d)
    return np.outer(v, v)


def choi_from_kraus(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Choi operator of ``A -> sum_k K A K*`` in the ``T_J`` convention."""
    kraus = [np.asarray(k, dtype=np.complex128) for k in kraus]
    dout, din = kraus[0].shape
    J = np.zeros((din * dout, din * dout), dtype=np.complex128)
    for k in kraus:
        # column i of k is the image of |i>
        v = k.T.reshape(din * dout)
        J += np.outer(v, v.conj())
    return J


def choi_from_stochastic(T) -> np.ndarray:
    """Choi operator of the classical map ``diag(p) -> diag(T p)``."""
    T = np.asarray(T, dtype=float)
    dout, din = T.shape
    diag = T.T.reshape(din * dout)
    return np.diag(diag).astype(np.complex128)


def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal basis of ``n x n`` Hermitian matrices for ``Re Tr(A B)``."""
    out = np.zeros((n * n, n, n), dtype=np.complex128)
    k = 0
    for i in range(n):
        out[k, i, i] = 1.0
        k += 1
    r = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            out[k, i, j] = out[k, j, i] = r
            k += 1
            out[k, i, j] = -1j * r
            out[k, j, i] = 1j * r
            k += 1
    return out


@dataclass
class ChoiOperator:
    """Candidate map ``T`` given by its Choi operator ``J``."""

    dim_in: int
    dim_out: int
    J: np.ndarray
    trace_preserving: bool = False
    constraints: tuple = ()

    def apply(self, a) -> np.ndarray:
        return choi_apply(self.J, a, self.dim_in, self.dim_out)

    def out_trace(self) -> np.ndarray:
        return choi_out_trace(self.J, self.dim_in, self.dim_out)

    def check(self, P: FamilyPair, Q: FamilyPair, tol: float = TOL_VERIFY, exact: bool = False,
              gibbs=None) -> list:
        """Independent Loewner checks of the certificate; returns failure messages."""
        fails = []
        if la.min_eig(self.J) < -tol:
            fails.append(f"Choi operator not PSD (min eigenvalue {la.min_eig(self.J):.3e})")
        tr = self.out_trace()
        eye = np.eye(self.dim_in)
        if self.trace_preserving:
            if np.max(np.abs(tr - eye)) > tol:
                fails.append("map is not trace preserving")
        elif la.min_eig(eye - tr) < -tol:
            fails.append("map is not trace nonincreasing")
        for x in P.X:
            img = self.apply(P.rho[x])
            if la.min_eig(img - Q.rho[x]) < -tol:
                fails.append(f"T(rho({x})) >= rho'({x}) fails")
            if exact and la.min_eig(Q.rho[x] - img) < -tol:
                fails.append(f"T(rho({x})) <= rho'({x}) fails")
        for y in P.Y:
            img = self.apply(P.sigma[y])
            if la.min_eig(Q.sigma[y] - img) < -tol:
                fails.append(f"T(sigma({y})) <= sigma'({y}) fails")
        if gibbs is not None:
            g_in, g_out = gibbs
            if np.max(np.abs(self.apply(g_in) - g_out)) > tol:
                fails.append("map does not preserve the Gibbs state")
        for K in self.constraints:
            if np.max(np.abs(self.J @ K - K @ self.J)) > tol * max(1.0, np.max(np.abs(K))):
                fails.append("equivariance constraint violated")
        return fails

    def verify(self, P, Q, tol: float = TOL_VERIFY, exact: bool = False, gibbs=None) -> bool:
        return not self.check(P, Q, tol=tol, exact=exact, gibbs=gibbs)

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {"dim_in": self.dim_in, "dim_out": self.dim_out,
                "trace_preserving": self.trace_preserving, "J": matrix_to_json(self.J)}


@dataclass
class FeasibilityReport:
    status: str
    slack: float
    certificate: ChoiOperator | None = None
    violated_monotone: object = None
    witness_values: tuple | None = None
    upper_bound: float = math.inf
    iterations: int = 0
    method: str = "sdp"
    notes: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        out = {"status": self.status, "slack": self.slack, "method": self.method,
               "iterations": self.iterations}
        if math.isfinite(self.upper_bound):
            out["upper_bound"] = self.upper_bound
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.violated_monotone is not None:
            out["violated_monotone"] = self.violated_monotone.describe()
            if self.witness_values is not None:
                out["witness_values"] = {"f_P": self.witness_values[0], "f_Q": self.witness_values[1]}
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


# --------------------------------------------------------------- equivariance

def equivariance_constraints_from_group(rep_in: Sequence, rep_out: Sequence) -> list:
    """Generators ``conj(U_g) (x) V_g`` whose commutant is the equivariant Choi operators.

    Elements acting trivially on both sides are dropped.
    """
    if len(rep_in) != len(rep_out):
        raise LengthMismatch(f"{len(rep_in)} input and {len(rep_out)} output representatives")
    out = []
    for u, v in zip(rep_in, rep_out):
        u = la.check_unitary(u)
        v = la.check_unitary(v)
        K = np.kron(u.conj(), v)
        if np.max(np.abs(K - np.eye(K.shape[0]))) < 1e-12:
            continue
        out.append(K)
    return out


def u1_constraint(h_in, h_out) -> list:
    """Lie-algebra form of time-translation covariance: ``[J, -conj(H) (x) I + I (x) H'] = 0``."""
    h_in = la.as_hermitian(h_in)
    h_out = la.as_hermitian(h_out)
    K = -np.kron(h_in.conj(), np.eye(h_out.shape[0])) + np.kron(np.eye(h_in.shape[0]), h_out)
    return [K]


def average_map(choi: ChoiOperator, rep_in: Sequence, rep_out: Sequence) -> ChoiOperator:
    """Group average ``|G|^-1 sum_g V_g T(U_g* . U_g) V_g*`` of a map, as a Choi operator."""
    if len(rep_in) != len(rep_out):
        raise LengthMismatch(f"{len(rep_in)} input and {len(rep_out)} output representatives")
    J = np.zeros_like(choi.J, dtype=np.complex128)
    for u, v in zip(rep_in, rep_out):
        K = np.kron(np.asarray(u).conj(), np.asarray(v))
        J += K @ choi.J @ K.conj().T
    J /= len(rep_in)
    J = 0.5 * (J + J.conj().T)
    gens = equivariance_constraints_from_group(rep_in, rep_out)
    return ChoiOperator(choi.dim_in, choi.dim_out, J, choi.trace_preserving, tuple(gens))


# ------------------------------------------------------------------- SDP path

def _check_pairs(P: FamilyPair, Q: FamilyPair, max_dim: int):
    validate_labels(P, Q)
    if P.dim == 0 or Q.dim == 0:
        raise DimensionCap("feasibility needs positive dimensions on both sides")
    if P.dim * Q.dim > max_dim:
        raise DimensionCap(f"Choi dimension {P.dim * Q.dim} exceeds the cap {max_dim}")


def _affine_rows(basis_maps: np.ndarray, target: np.ndarray):
    """Real rows expressing ``sum_k x_k basis_maps[k] == target`` entrywise."""
    m = basis_maps.shape[0]
    flat = basis_maps.reshape(m, -1)
    A = np.concatenate([flat.real.T, flat.imag.T], axis=0)
    t = np.asarray(target, dtype=np.complex128).reshape(-1)
    return A, np.concatenate([t.real, t.imag])


def solve_choi_program(P: FamilyPair, Q: FamilyPair, *, trace_preserving: bool = False,
                       exact: bool = False, gibbs=None, constraints: Sequence = (),
                       tol_feas: float = TOL_FEAS, max_dim: int = MAX_CHOI_DIM,
                       explain: bool = True) -> FeasibilityReport:
    """Core max-slack Choi program shared by all quantum decision functions."""
    _check_pairs(P, Q, max_dim)
    din, dout = P.dim, Q.dim
    n = din * dout
    B = hermitian_basis(n)
    nb = B.shape[0]
    B4 = B.reshape(nb, din, dout, din, dout)

    def images(a):
        return np.einsum("kiajb,ij->kab", B4, np.asarray(a, dtype=np.complex128))

    consts, coeffs = [], []

    def add_block(c, f):
        consts.append(np.asarray(c, dtype=np.complex128))
        coeffs.append(f)

    add_block(np.zeros((n, n)), B)
    tr_out = np.einsum("kiaja->kij", B4)
    eq_rows, eq_rhs = [], []
    if trace_preserving:
        A, r = _affine_rows(tr_out, np.eye(din))
        eq_rows.append(A)
        eq_rhs.append(r)
    else:
        add_block(np.eye(din), -tr_out)
    for x in P.X:
        img = images(P.rho[x])
        add_block(-Q.rho[x], img)
        if exact:
            add_block(Q.rho[x], -img)
    for y in P.Y:
        add_block(Q.sigma[y], -images(P.sigma[y]))
    if gibbs is not None:
        g_in, g_out = gibbs
        img = images(g_in)
        add_block(-np.asarray(g_out), img)
        add_block(np.asarray(g_out), -img)
    for K in constraints:
        K = np.asarray(K, dtype=np.complex128)
        comm = B @ K - K @ B
        A, r = _affine_rows(comm, np.zeros((n, n)))
        eq_rows.append(A)
        eq_rhs.append(r)

    notes = []
    if eq_rows:
        A = np.concatenate(eq_rows, axis=0)
        rhs = np.concatenate(eq_rhs)
        x0, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        resid = np.linalg.norm(A @ x0 - rhs)
        if resid > 1e-9 * (1.0 + np.linalg.norm(rhs)):
            notes.append(f"affine constraints are inconsistent (residual {resid:.3e})")
            return FeasibilityReport(INFEASIBLE, -math.inf, notes=notes)
        _, s, vt = np.linalg.svd(A)
        rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
        N = vt[rank:].T
    else:
        x0 = np.zeros(nb)
        N = np.eye(nb)

    C_red = [c + np.tensordot(x0, f, axes=1) for c, f in zip(consts, coeffs)]
    if N.shape[1] == 0:
        t = min(la.min_eig(c) for c in C_red)
        xopt = x0
        res_iter, upper = 0, t
    else:
        F_red = [np.tensordot(N.T, f, axes=1) for f in coeffs]
        res = max_slack(C_red, F_red)
        t = res.t
        xopt = x0 + N @ res.z
        res_iter, upper = res.iterations, res.upper
    J = np.tensordot(xopt, B, axes=1)
    J = 0.5 * (J + J.conj().T)
    status = classify(t, tol_feas)
    cert = None
    if status != INFEASIBLE:
        cert = ChoiOperator(din, dout, J, trace_preserving, tuple(np.asarray(k) for k in constraints))
        if status == FEASIBLE:
            fails = cert.check(P, Q, exact=exact, gibbs=gibbs)
            if fails:
                notes.extend(fails)
    report = FeasibilityReport(status, float(t), cert, upper_bound=float(upper), iterations=res_iter,
                               notes=notes)
    if status == INFEASIBLE and explain:
        _attach_witness(report, P, Q)
    return report


def _attach_witness(report: FeasibilityReport, P: FamilyPair, Q: FamilyPair):
    from .spectrum import find_violation

    try:
        hit = find_violation(P, Q)
    except Exception as exc:  # explanation is best effort only
        report.notes.append(f"no spectral witness: {exc}")
        return
    if hit is None:
        report.notes.append("no violated spectral point on the coarse grid")
        return
    point, fp, fq = hit
    report.violated_monotone = point
    report.witness_values = (fp, fq)


def decide_submajorization(P: FamilyPair, Q: FamilyPair, trace_preserving: bool = False,
                           equivariance: Sequence = (), tol_feas: float = TOL_FEAS,
                           max_dim: int = MAX_CHOI_DIM, explain: bool = True) -> FeasibilityReport:
    """Decide ``P >= Q``: a CP trace-nonincreasing ``T`` with ``T(rho) >= rho'`` and ``T(sigma) <= sigma'``.

    ``equivariance`` is a list of generators ``K`` imposing ``[J, K] = 0``,
    as produced by :func:`equivariance_constraints_from_group` or
    :func:`u1_constraint`.
    """
    return solve_choi_program(P, Q, trace_preserving=trace_preserving, constraints=equivariance,
                              tol_feas=tol_feas, max_dim=max_dim, explain=explain)


def decide_exact_transform(P: FamilyPair, Q: FamilyPair, trace_preserving: bool = True,
                           gibbs_state=None, equivariance: Sequence = (),
                           tol_feas: float = TOL_FEAS, max_dim: int = MAX_CHOI_DIM,
                           explain: bool = True) -> FeasibilityReport:
    """Decide whether some map sends each ``rho(x)`` exactly to ``rho'(x)``.

    The ``sigma`` inequalities are kept. ``gibbs_state`` is either one
    operator (same on both sides) or a pair ``(tau_in, tau_out)``, and adds
    ``T(tau_in) = tau_out``.
    """
    gibbs = None
    if gibbs_state is not None:
        if isinstance(gibbs_state, tuple):
            gibbs = (la.as_hermitian(gibbs_state[0]), la.as_hermitian(gibbs_state[1]))
        else:
            g = la.as_hermitian(gibbs_state)
            gibbs = (g, g)
    return solve_choi_program(P, Q, trace_preserving=trace_preserving, exact=True, gibbs=gibbs,
                              constraints=equivariance, tol_feas=tol_feas, max_dim=max_dim,
                              explain=explain)


# -------------------------------------------------------------------- LP path

def classical_lp(p, q, p2, q2):
    """Max-slack LP over real matrices ``T`` (``d' x d``).

    Maximizes ``t`` with ``T >= t``, ``1 - colsum(T) >= t``, ``T p - p' >= t``
    and ``q' - T q >= t`` componentwise. Returns ``(t, T)``.
    """
    p, q, p2, q2 = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (p, q, p2, q2))
    d, d2 = p.shape[0], p2.shape[0]
    nv = d2 * d + 1
    rows, rhs = [], []

    def var(i, j):
        return i * d + j

    for i in range(d2):
        for j in range(d):
            r = np.zeros(nv)
            r[var(i, j)] = -1.0
            r[-1] = 1.0
            rows.append(r)
            rhs.append(0.0)
    for j in range(d):
        r = np.zeros(nv)
        for i in range(d2):
            r[var(i, j)] = 1.0
        r[-1] = 1.0
        rows.append(r)
        rhs.append(1.0)
    for col in range(p.shape[1]):
        for i in range(d2):
            r = np.zeros(nv)
            r[i * d:(i + 1) * d] = -p[:, col]
            r[-1] = 1.0
            rows.append(r)
            rhs.append(-p2[i, col])
    for col in range(q.shape[1]):
        for i in range(d2):
            r = np.zeros(nv)
            r[i * d:(i + 1) * d] = q[:, col]
            r[-1] = 1.0
            rows.append(r)
            rhs.append(q2[i, col])
    c = np.zeros(nv)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=[(None, None)] * nv,
                  method="highs")
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return float(res.x[-1]), res.x[:-1].reshape(d2, d)


def decide_submajorization_classical(P: FamilyPair, Q: FamilyPair, tol_feas: float = TOL_FEAS,
                                     explain: bool = True) -> FeasibilityReport:
    """Substochastic-matrix version of :func:`decide_submajorization` for classical pairs."""
    validate_labels(P, Q)
    for name, R in (("P", P), ("Q", Q)):
        if not is_classical(R):
            raise NotClassical(f"{name} is not a classical pair")
    p, q = classical_vectors(P)
    p2, q2 = classical_vectors(Q)
    t, T = classical_lp(p, q, p2, q2)
    status = classify(t, tol_feas)
    report = FeasibilityReport(status, t, method="lp")
    if status != INFEASIBLE:
        # certificate acts on the eigenbases in which P and Q are diagonal
        report.certificate = ChoiOperator(P.dim, Q.dim, choi_from_stochastic(np.clip(T, 0.0, None)))
        report.notes.append("certificate is expressed in the joint eigenbases of P and Q")
    elif explain:
        _attach_witness(report, P, Q)
    return report
