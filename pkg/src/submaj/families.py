"""The semiring of pairs of operator families over finite index sets.

A :class:`FamilyPair` holds ``rho: X -> PD(H)`` and ``sigma: Y -> PD(H)``.
Sum and product are the pointwise direct sum and tensor product; the
power universal element is the scalar pair ``u = (2, 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, DomainError, LabelMismatch, NotClassical


@dataclass(frozen=True)
class FiniteMeasure:
    """Finitely supported nonnegative weights over labels."""

    items: tuple = ()

    @classmethod
    def from_dict(cls, weights: Mapping[str, float]) -> "FiniteMeasure":
        items = tuple((str(k), float(v)) for k, v in weights.items() if float(v) != 0.0)
        for _, w in items:
            if w < 0 or not math.isfinite(w):
                raise ValueError(f"measure weights must be nonnegative, got {w}")
        return cls(items)

    @classmethod
    def delta(cls, label) -> "FiniteMeasure":
        return cls(((str(label), 1.0),))

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "FiniteMeasure":
        w = 1.0 / len(labels)
        return cls(tuple((str(lab), w) for lab in labels))

    def as_dict(self) -> dict:
        return dict(self.items)

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self.items)

    @property
    def mass(self) -> float:
        return math.fsum(w for _, w in self.items)

    def is_probability(self, tol: float = 1e-12) -> bool:
        return abs(self.mass - 1.0) <= tol

    def pushforward(self, relabel: Mapping[str, str]) -> "FiniteMeasure":
        out: dict = {}
        for k, w in self.items:
            out[relabel[k]] = out.get(relabel[k], 0.0) + w
        return FiniteMeasure.from_dict(out)

    def describe(self) -> str:
        return "{" + ",".join(f"{k}:{w:.6g}" for k, w in self.items) + "}"


def _check_pd(mat, what):
    w = la.eig(mat).eigenvalues
    if w[0] <= la.TOL_PSD:
        raise DomainError(f"{what} is not positive definite (min eigenvalue {w[0]:.3e})")


@dataclass(frozen=True, eq=False)
class FamilyPair:
    """Pair of families ``(rho, sigma)`` on a common ``dim``-dimensional space.

    ``dim == 0`` is the semiring zero; its matrices are ``0 x 0`` arrays.
    """

    dim: int
    X: tuple
    Y: tuple
    rho: Mapping[str, np.ndarray] = field(repr=False)
    sigma: Mapping[str, np.ndarray] = field(repr=False)

    @classmethod
    def build(cls, rho: Mapping, sigma: Mapping, validate: bool = True) -> "FamilyPair":
        """Create a pair from label -> matrix mappings (insertion order is kept)."""
        if not rho or not sigma:
            raise LabelMismatch("label sets must be nonempty")
        X = tuple(str(k) for k in rho)
        Y = tuple(str(k) for k in sigma)
        rho_m = {str(k): np.asarray(v, dtype=np.complex128) for k, v in rho.items()}
        sigma_m = {str(k): np.asarray(v, dtype=np.complex128) for k, v in sigma.items()}
        for m in (*rho_m.values(), *sigma_m.values()):
            if m.ndim == 0:
                raise DimensionMismatch("matrices must be two-dimensional")
        shapes = {m.shape for m in (*rho_m.values(), *sigma_m.values())}
        if len(shapes) != 1:
            raise DimensionMismatch(f"family members have differing shapes {sorted(shapes)}")
        dim = shapes.pop()[0]
        if dim > 0:
            rho_m = {k: la.as_hermitian(v) for k, v in rho_m.items()}
            sigma_m = {k: la.as_hermitian(v) for k, v in sigma_m.items()}
            if validate:
                for k, v in rho_m.items():
                    _check_pd(v, f"rho({k})")
                for k, v in sigma_m.items():
                    _check_pd(v, f"sigma({k})")
        return cls(dim, X, Y, rho_m, sigma_m)

    def members(self) -> list:
        return [*self.rho.values(), *self.sigma.values()]

    def same_labels(self, other: "FamilyPair") -> bool:
        return self.X == other.X and self.Y == other.Y

    def map(self, fn, validate: bool = False) -> "FamilyPair":
        """Apply ``fn`` to every member (e.g. a channel)."""
        return FamilyPair.build({k: fn(v) for k, v in self.rho.items()},
                                {k: fn(v) for k, v in self.sigma.items()}, validate=validate)

    def scaled(self, rho_factor: float = 1.0, sigma_factor: float = 1.0) -> "FamilyPair":
        return FamilyPair(self.dim, self.X, self.Y,
                          {k: rho_factor * v for k, v in self.rho.items()},
                          {k: sigma_factor * v for k, v in self.sigma.items()})

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)


def _require_same_labels(P, Q):
    if not P.same_labels(Q):
        raise LabelMismatch(f"label sets differ: {P.X}/{P.Y} vs {Q.X}/{Q.Y}")


def add(P: FamilyPair, Q: FamilyPair) -> FamilyPair:
    """Pointwise direct sum."""
    _require_same_labels(P, Q)
    rho = {x: la.dsum(P.rho[x], Q.rho[x]) for x in P.X}
    sigma = {y: la.dsum(P.sigma[y], Q.sigma[y]) for y in P.Y}
    return FamilyPair(P.dim + Q.dim, P.X, P.Y, rho, sigma)


def mul(P: FamilyPair, Q: FamilyPair) -> FamilyPair:
    """Pointwise tensor product."""
    _require_same_labels(P, Q)
    rho = {x: np.kron(P.rho[x], Q.rho[x]) for x in P.X}
    sigma = {y: np.kron(P.sigma[y], Q.sigma[y]) for y in P.Y}
    return FamilyPair(P.dim * Q.dim, P.X, P.Y, rho, sigma)


def power(P: FamilyPair, n: int) -> FamilyPair:
    out = one(P.X, P.Y)
    for _ in range(n):
        out = mul(out, P)
    return out


def scalar_pair(r: float, s: float, X: Iterable = ("0",), Y: Iterable = ("0",)) -> FamilyPair:
    """One-dimensional pair with constant families ``rho = r``, ``sigma = s``."""
    X = tuple(str(x) for x in X)
    Y = tuple(str(y) for y in Y)
    return FamilyPair.build({x: [[r]] for x in X}, {y: [[s]] for y in Y})


def zero(X: Iterable = ("0",), Y: Iterable = ("0",)) -> FamilyPair:
    X = tuple(str(x) for x in X)
    Y = tuple(str(y) for y in Y)
    empty = np.zeros((0, 0), dtype=np.complex128)
    return FamilyPair(0, X, Y, {x: empty for x in X}, {y: empty for y in Y})


def one(X: Iterable = ("0",), Y: Iterable = ("0",)) -> FamilyPair:
    return scalar_pair(1.0, 1.0, X, Y)


def power_universal(k: int = 1, X: Iterable = ("0",), Y: Iterable = ("0",)) -> FamilyPair:
    """``u^k = (2^k, 1)``."""
    if k < 0:
        raise ValueError("k must be a natural number")
    return scalar_pair(float(2 ** k), 1.0, X, Y)


def power_universal_witness(P: FamilyPair):
    """Exponent ``k`` and the two trace-nonincreasing maps witnessing
    ``u^k >= P`` and ``u^k P >= 1``.

    Returns ``(k, c_trace, c_embed)``: the first map is
    ``A -> c_trace Tr A`` (into dimension 1), the second is
    ``a -> c_embed a I_d / d`` (from dimension 1).
    """
    if P.dim == 0:
        raise ValueError("the zero element has no witness")
    d = P.dim
    max_tr_sigma = max(float(np.trace(s).real) for s in P.sigma.values())
    min_tr_rho = min(float(np.trace(r).real) for r in P.rho.values())
    c_trace = min(1.0, 1.0 / max_tr_sigma)
    k1 = max(0, math.ceil(math.log2(1.0 / (c_trace * min_tr_rho)) + 1e-12))

    min_eig_sigma = min(la.min_eig(s) for s in P.sigma.values())
    max_eig_rho = max(float(la.eig(r).eigenvalues[-1]) for r in P.rho.values())
    c_embed = min(1.0, d * min_eig_sigma)
    k2 = max(0, math.ceil(math.log2(d * max_eig_rho / c_embed) + 1e-12))
    return max(k1, k2), c_trace, c_embed


def pinch(rho, sigma_ref, tol: float = 1e-9) -> np.ndarray:
    """Pinching of ``rho`` by the eigenprojections of ``sigma_ref``.

    Eigenvalues of ``sigma_ref`` closer than ``tol`` (relative to the
    spectral scale) are treated as one eigenspace.
    """
    rho = la.as_hermitian(rho)
    w, v = la.eig(sigma_ref)
    scale = max(1.0, float(np.max(np.abs(w))))
    out = np.zeros_like(rho)
    start = 0
    n = len(w)
    for i in range(1, n + 1):
        if i == n or w[i] - w[i - 1] > tol * scale:
            block = v[:, start:i]
            proj = block @ block.conj().T
            out += proj @ rho @ proj
            start = i
    return 0.5 * (out + out.conj().T)


def spectrum_size(sigma_ref, tol: float = 1e-9) -> int:
    """Number of distinct eigenvalues (the pinching-inequality constant)."""
    w = la.eig(sigma_ref).eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))))
    return 1 + int(np.sum(np.diff(w) > tol * scale))


def max_commutator(mats) -> tuple:
    """Largest pairwise commutator norm and the index pair attaining it."""
    worst, pair = 0.0, None
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = la.commutator_norm(mats[i], mats[j])
            if c > worst:
                worst, pair = c, (i, j)
    return worst, pair


def is_classical(P: FamilyPair, tol: float = 1e-8) -> bool:
    if P.dim <= 1:
        return True
    worst, _ = max_commutator(_distinct(P.members()))
    return worst <= tol


def _distinct(mats):
    out = []
    for m in mats:
        if not any(m is o for o in out):
            out.append(m)
    return out


def classical_vectors(P: FamilyPair, tol: float = 1e-8):
    """Simultaneous-eigenbasis diagonals of a classical pair.

    Returns ``(p, q)`` with ``p[:, i]`` the diagonal of ``rho(X[i])`` and
    ``q[:, j]`` that of ``sigma(Y[j])``.
    """
    if P.dim == 0:
        return np.zeros((0, len(P.X))), np.zeros((0, len(P.Y)))
    if not is_classical(P, tol):
        raise NotClassical("pair contains noncommuting members")
    try:
        _, diags = la.joint_diagonalize(P.members(), tol=max(tol, 1e-8))
    except DomainError as exc:
        raise NotClassical(str(exc)) from exc
    nx = len(P.X)
    p = np.column_stack(diags[:nx])
    q = np.column_stack(diags[nx:])
    return p, q


def classical_pair(p, q, X=None, Y=None) -> FamilyPair:
    """Diagonal pair from arrays ``p`` (d x |X|) and ``q`` (d x |Y|)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p = p.reshape(-1, 1) if p.ndim == 1 else p
    q = q.reshape(-1, 1) if q.ndim == 1 else q
    X = tuple(X) if X is not None else tuple(f"x{i}" for i in range(p.shape[1]))
    Y = tuple(Y) if Y is not None else tuple(f"y{j}" for j in range(q.shape[1]))
    if p.shape[0] != q.shape[0]:
        raise DimensionMismatch("p and q must have the same number of rows")
    return FamilyPair.build({x: np.diag(p[:, i]) for i, x in enumerate(X)},
                            {y: np.diag(q[:, j]) for j, y in enumerate(Y)})


def orbit_family(rep: Sequence, rho0, sigma0, labels: Sequence[str] | None = None) -> FamilyPair:
    """Orbit pair ``rho(g) = U_g rho0 U_g*``, ``sigma(g) = U_g sigma0 U_g*``."""
    unitaries = [la.check_unitary(u) for u in rep]
    labels = tuple(labels) if labels is not None else tuple(f"g{i}" for i in range(len(unitaries)))
    if len(labels) != len(unitaries):
        raise DimensionMismatch("one label per group element is required")
    rho0 = la.as_hermitian(rho0)
    sigma0 = la.as_hermitian(sigma0)
    rho = {g: u @ rho0 @ u.conj().T for g, u in zip(labels, unitaries)}
    sigma = {g: u @ sigma0 @ u.conj().T for g, u in zip(labels, unitaries)}
    return FamilyPair.build(rho, sigma)


def time_translation_rep(hamiltonian, n_points: int = 16, period: float = 2 * math.pi):
    """Unitaries ``exp(-i t H)`` on the grid ``t = period k / n_points``.

    Returns ``(times, unitaries)``.
    """
    w, v = la.eig(hamiltonian)
    times = [period * k / n_points for k in range(n_points)]
    reps = [(v * np.exp(-1j * t * w)) @ v.conj().T for t in times]
    return times, reps


def perturb(rho, epsilon: float, tau) -> np.ndarray:
    """``(1 - eps) rho + eps tau``, used to make states full rank."""
    return (1.0 - epsilon) * np.asarray(rho, dtype=np.complex128) + epsilon * np.asarray(tau, dtype=np.complex128)


def validate_labels(P: FamilyPair, Q: FamilyPair):
    _require_same_labels(P, Q)


__all__ = [
    "FamilyPair", "FiniteMeasure", "add", "mul", "power", "scalar_pair", "zero", "one",
    "power_universal", "power_universal_witness", "pinch", "spectrum_size", "is_classical",
    "classical_vectors", "classical_pair", "orbit_family", "time_translation_rep", "perturb",
    "max_commutator",
]
