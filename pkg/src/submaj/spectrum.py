"""Spectral points (monotone homomorphisms) and sweep-based decisions.

A spectral point is described by a :class:`SpectralPoint`. Real points of
order ``alpha`` are homogeneous of degree ``alpha`` in ``rho``; tropical
points are the ``alpha = inf`` rows and satisfy ``f(u) = 2``.

Sweeps compare ``f(P)`` and ``f(Q)`` over a finite grid of points. Margins
are relative: ``(f(P) - f(Q)) / max(f(P), f(Q))``, computed in log space.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from . import linalg as la
from .divergences import sandwiched_quasientropy
from .errors import AlphaOutOfRange, DomainError, MalformedProgram, NotClassical, NotCommuting
from .families import FamilyPair, FiniteMeasure, classical_vectors, is_classical, validate_labels
from .means import MeanProgram, commuting_log_mean, enumerate_programs

REAL_CLASSICAL = "RealClassical"
TROPICAL_CLASSICAL = "TropicalClassical"
REAL_QUANTUM = "RealQuantum"
TROPICAL_QUANTUM = "TropicalQuantum"
KINDS = (REAL_CLASSICAL, TROPICAL_CLASSICAL, REAL_QUANTUM, TROPICAL_QUANTUM)

DEFAULT_ALPHAS = (1.0, 1.25, 1.5, 2.0, 3.0, 5.0, math.inf)
DEFAULT_GAMMA_RES = 8
DEFAULT_PROGRAM_GAMMAS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_DEPTH = 2
DEFAULT_MAX_PROGRAMS = 400
TOL_SWEEP = 1e-7

GE = "GE"
LT = "LT"
INCONCLUSIVE = "Inconclusive"
STRICT_ALL_SAMPLED = "StrictAllSampled"
NOT_STRICT = "NotStrict"


@dataclass(frozen=True)
class SpectralPoint:
    """Parameters ``(kind, alpha, x, gamma | program)`` of a spectral point."""

    kind: str
    x: str
    alpha: float = math.inf
    gamma: FiniteMeasure | None = None
    program: MeanProgram | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.tropical:
            object.__setattr__(self, "alpha", math.inf)
        elif not (self.alpha >= 1.0 and math.isfinite(self.alpha)):
            raise AlphaOutOfRange(f"real points need 1 <= alpha < inf, got {self.alpha}")
        if self.kind in (REAL_CLASSICAL, TROPICAL_CLASSICAL):
            if self.gamma is None:
                raise DomainError("classical points need a measure gamma")
            if not self.gamma.is_probability(1e-9):
                raise DomainError(f"gamma must be a probability measure (mass {self.gamma.mass})")
        elif self.program is None:
            raise MalformedProgram("quantum points need a mean program")

    @property
    def tropical(self) -> bool:
        return self.kind in (TROPICAL_CLASSICAL, TROPICAL_QUANTUM)

    @property
    def quantum(self) -> bool:
        return self.kind in (REAL_QUANTUM, TROPICAL_QUANTUM)

    @classmethod
    def classical(cls, alpha: float, x, gamma) -> "SpectralPoint":
        if not isinstance(gamma, FiniteMeasure):
            gamma = FiniteMeasure.from_dict(gamma)
        kind = TROPICAL_CLASSICAL if math.isinf(alpha) else REAL_CLASSICAL
        return cls(kind, str(x), alpha, gamma=gamma)

    @classmethod
    def mean(cls, alpha: float, x, program: MeanProgram) -> "SpectralPoint":
        kind = TROPICAL_QUANTUM if math.isinf(alpha) else REAL_QUANTUM
        return cls(kind, str(x), alpha, program=program)

    def parameter(self) -> str:
        return self.gamma.describe() if self.program is None else self.program.describe()

    def describe(self) -> str:
        a = "inf" if self.tropical else f"{self.alpha:g}"
        return f"{self.kind}(alpha={a}, x={self.x}, {self.parameter()})"


# ------------------------------------------------------------------ evaluation

def _weights(gamma: FiniteMeasure, labels: Sequence[str]) -> np.ndarray:
    w = gamma.as_dict()
    unknown = set(w) - set(labels)
    if unknown:
        raise MalformedProgram(f"gamma charges labels {sorted(unknown)} outside the family")
    return np.array([w.get(y, 0.0) for y in labels])


def _x_index(P: FamilyPair, x: str) -> int:
    try:
        return P.X.index(x)
    except ValueError:
        raise MalformedProgram(f"label {x!r} is not in X = {P.X}") from None


def _classical_value(f: SpectralPoint, P: FamilyPair) -> float:
    if P.dim == 0:
        return 0.0
    p, q = classical_vectors(P)
    pc = p[:, _x_index(P, f.x)]
    g = np.log(q) @ _weights(f.gamma, P.Y)
    if f.tropical:
        return float(np.max(pc * np.exp(-g)))
    return float(np.sum(pc ** f.alpha * np.exp((1.0 - f.alpha) * g)))


def eval_real_classical(f: SpectralPoint, P: FamilyPair) -> float:
    """``sum_i p_i(x)^alpha exp[(1 - alpha) sum_y gamma(y) ln q_i(y)]`` on a classical pair."""
    if f.kind != REAL_CLASSICAL:
        raise ValueError("expected a real classical point")
    if not is_classical(P):
        raise NotClassical("pair is not classical")
    return _classical_value(f, P)


def eval_tropical_classical(f: SpectralPoint, P: FamilyPair) -> float:
    """``max_i p_i(x) exp[-sum_y gamma(y) ln q_i(y)]`` on a classical pair."""
    if f.kind != TROPICAL_CLASSICAL:
        raise ValueError("expected a tropical classical point")
    if not is_classical(P):
        raise NotClassical("pair is not classical")
    return _classical_value(f, P)


def _operator_value(alpha: float, rho, mean) -> float:
    if math.isinf(alpha):
        m_mhalf = la.mpow(mean, -0.5)
        return float(la.eig(m_mhalf @ rho @ m_mhalf).eigenvalues[-1])
    return sandwiched_quasientropy(rho, mean, alpha)


def eval_commuting_sigma(f: SpectralPoint, P: FamilyPair) -> float:
    """Classical-kind point on a pair whose ``sigma`` family commutes.

    Real: ``Q_alpha(rho(x) || exp sum gamma ln sigma)``; tropical: the largest
    eigenvalue of ``rho^1/2 (exp sum gamma ln sigma)^-1 rho^1/2``.
    """
    if f.quantum:
        raise ValueError("expected a classical-kind point")
    if P.dim == 0:
        return 0.0
    _x_index(P, f.x)
    mean = commuting_log_mean(P.sigma, f.gamma)
    return _operator_value(f.alpha, P.rho[f.x], mean)


def eval_quantum_mean(f: SpectralPoint, P: FamilyPair) -> float:
    """``Q_alpha(rho(x) || M(sigma))``, or ``||M^-1/2 rho(x) M^-1/2||`` for tropical points."""
    if not f.quantum:
        raise ValueError("expected a quantum point")
    if P.dim == 0:
        return 0.0
    _x_index(P, f.x)
    mean = f.program.evaluate(P.sigma)
    return _operator_value(f.alpha, P.rho[f.x], mean)


def evaluate(f: SpectralPoint, P: FamilyPair) -> float:
    """Evaluate any spectral point, picking the cheapest valid route."""
    if f.quantum:
        return eval_quantum_mean(f, P)
    if is_classical(P):
        return _classical_value(f, P)
    return eval_commuting_sigma(f, P)


# ------------------------------------------------------------------------ grids

def simplex_grid(labels: Sequence[str], resolution: int = DEFAULT_GAMMA_RES) -> list:
    """Probability measures on ``labels`` with weights in ``(1/resolution) Z``.

    Beyond four labels the full grid is replaced by the vertices, the
    uniform measure and the pairwise midpoints.
    """
    labels = list(labels)
    n = len(labels)
    if n <= 4:
        out = []
        for comp in itertools.product(range(resolution + 1), repeat=n - 1):
            s = sum(comp)
            if s > resolution:
                continue
            ws = [c / resolution for c in comp] + [(resolution - s) / resolution]
            out.append(FiniteMeasure.from_dict(dict(zip(labels, ws))))
        return out
    out = [FiniteMeasure.delta(y) for y in labels]
    out.append(FiniteMeasure.uniform(labels))
    for a, b in itertools.combinations(labels, 2):
        out.append(FiniteMeasure.from_dict({a: 0.5, b: 0.5}))
    return out


def alpha_grid(spec: str | Sequence[float] | None = None) -> tuple:
    """Parse a comma-separated alpha list (``inf`` allowed) or pass through a sequence."""
    if spec is None:
        return DEFAULT_ALPHAS
    if isinstance(spec, str):
        vals = [float(s) for s in spec.split(",") if s.strip()]
    else:
        vals = [float(a) for a in spec]
    for a in vals:
        if not a >= 1.0:
            raise AlphaOutOfRange(f"alpha must be >= 1, got {a}")
    return tuple(vals)


def classical_points(X, Y, alphas=DEFAULT_ALPHAS, gamma_res: int = DEFAULT_GAMMA_RES) -> list:
    gammas = simplex_grid(Y, gamma_res)
    return [SpectralPoint.classical(a, x, g) for a in alphas for x in X for g in gammas]


def quantum_points(X, Y, alphas=DEFAULT_ALPHAS, depth: int = DEFAULT_DEPTH,
                   gammas=DEFAULT_PROGRAM_GAMMAS, max_programs: int | None = DEFAULT_MAX_PROGRAMS) -> list:
    progs = enumerate_programs(list(Y), depth=depth, gammas=gammas, max_programs=max_programs)
    return [SpectralPoint.mean(a, x, m) for m in progs for a in alphas for x in X]


# ---------------------------------------------------------------- comparisons

@dataclass(frozen=True)
class Row:
    point: SpectralPoint
    f_P: float
    f_Q: float
    margin: float

    def key(self):
        return (self.point.kind, self.point.alpha, self.point.x, self.point.parameter())

    def csv_fields(self) -> list:
        return [self.point.kind, _fmt(self.point.alpha), self.point.x, self.point.parameter(),
                _fmt(self.f_P), _fmt(self.f_Q), _fmt(self.margin)]


CSV_HEADER = ["kind", "alpha", "x", "gamma_or_program", "f_P", "f_Q", "margin"]


def _fmt(v: float) -> str:
    return "inf" if v == math.inf else format(float(v), ".17g")


def rel_margin_from_logs(lp: float, lq: float) -> float:
    """``(e^lp - e^lq) / max(e^lp, e^lq)`` without overflow."""
    if lp == -math.inf and lq == -math.inf:
        return 0.0
    if lp >= lq:
        return -math.expm1(lq - lp)
    return math.expm1(lp - lq)


def _safe_log(v: float) -> float:
    return math.log(v) if v > 0 else -math.inf


@dataclass
class SweepResult:
    verdict: str
    rows: list
    tol: float
    grid: dict = field(default_factory=dict)
    necessary_only: bool = False

    @property
    def violations(self) -> list:
        return [r for r in self.rows if r.margin < -self.tol]

    @property
    def worst(self) -> Row | None:
        return min(self.rows, key=lambda r: r.margin) if self.rows else None

    def to_csv(self, only_violations: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in (self.violations if only_violations else self.rows):
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def summary(self) -> dict:
        out = {"verdict": self.verdict, "points": len(self.rows), "violations": len(self.violations),
               "tol": self.tol, "grid": self.grid, "necessary_only": self.necessary_only,
               "grid_relative": True}
        if self.worst is not None:
            out["worst"] = {"point": self.worst.point.describe(), "f_P": self.worst.f_P,
                            "f_Q": self.worst.f_Q, "margin": self.worst.margin}
        return out


def _verdict(rows, tol):
    if not rows:
        return GE
    worst = min(r.margin for r in rows)
    if worst >= -tol:
        return GE
    if worst < -10.0 * tol:
        return LT
    return INCONCLUSIVE


def classical_log_table(p, q, alphas, weights) -> np.ndarray:
    """Log values of every classical point on a classical pair, vectorized.

    ``p`` is ``d x |X|``, ``q`` is ``d x |Y|`` and ``weights`` is
    ``n_gamma x |Y|``. Returns an array of shape ``(len(alphas), |X|, n_gamma)``.
    """
    p = np.asarray(p, dtype=float)
    if p.shape[0] == 0:
        return np.full((len(alphas), p.shape[1], len(weights)), -math.inf)
    with np.errstate(divide="ignore"):
        lp = np.log(p)
    g = np.log(q) @ np.asarray(weights, dtype=float).T  # d x n_gamma
    out = np.empty((len(alphas), p.shape[1], g.shape[1]))
    for k, a in enumerate(alphas):
        if math.isinf(a):
            out[k] = np.max(lp[:, :, None] - g[:, None, :], axis=0)
        elif a == 1.0:
            out[k] = logsumexp(lp, axis=0)[:, None]
        else:
            out[k] = logsumexp(a * lp[:, :, None] + (1.0 - a) * g[:, None, :], axis=0)
    return out


def _classical_rows(P, Q, alphas, gamma_res):
    gammas = simplex_grid(P.Y, gamma_res)
    W = np.array([_weights(g, P.Y) for g in gammas])
    lP = classical_log_table(*classical_vectors(P), alphas, W)
    lQ = classical_log_table(*classical_vectors(Q), alphas, W)
    rows = []
    for k, a in enumerate(alphas):
        for i, x in enumerate(P.X):
            for j, g in enumerate(gammas):
                lp, lq = float(lP[k, i, j]), float(lQ[k, i, j])
                rows.append(Row(SpectralPoint.classical(a, x, g), math.exp(lp), math.exp(lq),
                                rel_margin_from_logs(lp, lq)))
    return rows


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SUBMAJ_THREADS", "1")))
    except ValueError:
        return 1


def _compare_points(points, P, Q, evaluator, means_P=None, means_Q=None) -> list:
    """Evaluate ``points`` on both pairs; rows come back sorted deterministically."""

    def work(chunk):
        out = []
        for f in chunk:
            fp = evaluator(f, P, means_P)
            fq = evaluator(f, Q, means_Q)
            out.append(Row(f, fp, fq, rel_margin_from_logs(_safe_log(fp), _safe_log(fq))))
        return out

    n = _workers()
    if n == 1 or len(points) < 64:
        rows = work(points)
    else:
        chunks = [points[i::n] for i in range(n)]
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = [r for part in pool.map(work, chunks) for r in part]
    rows.sort(key=lambda r: (r.point.kind, r.point.alpha, r.point.x, r.point.parameter()))
    return rows


def _mean_cache_eval(kind_gamma: bool):
    def ev(f, P, cache):
        if P.dim == 0:
            return 0.0
        key = f.gamma if kind_gamma else f.program
        mean = cache.get(key) if cache is not None else None
        if mean is None:
            mean = commuting_log_mean(P.sigma, f.gamma) if kind_gamma else f.program.evaluate(P.sigma)
            if cache is not None:
                cache[key] = mean
        return _operator_value(f.alpha, P.rho[f.x], mean)

    return ev


def _commuting_check(P: FamilyPair, name: str, tol: float = 1e-8):
    from .families import max_commutator

    mats = list(P.sigma.values())
    worst, pair = max_commutator(mats)
    if worst > tol:
        labels = (P.Y[pair[0]], P.Y[pair[1]])
        raise NotCommuting(f"sigma family of {name} does not commute: sigma({labels[0]}) and "
                           f"sigma({labels[1]}) have ||[.,.]|| = {worst:.3e}", pair=labels, norm=worst)


def sweep_decide_asymptotic_commuting(P: FamilyPair, Q: FamilyPair, alphas=DEFAULT_ALPHAS,
                                      gamma_res: int = DEFAULT_GAMMA_RES,
                                      tol: float = TOL_SWEEP) -> SweepResult:
    """Compare ``P`` and ``Q`` on every classical-kind grid point.

    Requires each ``sigma`` family to commute. ``GE`` means no sampled point
    is violated beyond ``tol`` (relative), ``LT`` that some point is violated
    by more than ``10 tol``.
    """
    validate_labels(P, Q)
    alphas = alpha_grid(alphas)
    _commuting_check(P, "P")
    _commuting_check(Q, "Q")
    if is_classical(P) and is_classical(Q):
        rows = _classical_rows(P, Q, alphas, gamma_res)
    else:
        points = classical_points(P.X, P.Y, alphas, gamma_res)
        rows = _compare_points(points, P, Q, _mean_cache_eval(True), {}, {})
    rows.sort(key=lambda r: (r.point.kind, r.point.alpha, r.point.x, r.point.parameter()))
    grid = {"alphas": [_fmt(a) for a in alphas], "gamma_resolution": gamma_res}
    return SweepResult(_verdict(rows, tol), rows, tol, grid)


def sweep_decide_quantum(P: FamilyPair, Q: FamilyPair, alphas=DEFAULT_ALPHAS,
                         depth: int = DEFAULT_DEPTH, gammas=DEFAULT_PROGRAM_GAMMAS,
                         max_programs: int | None = DEFAULT_MAX_PROGRAMS,
                         tol: float = TOL_SWEEP) -> SweepResult:
    """Compare ``P`` and ``Q`` on mean-program points.

    Valid for any ``sigma`` families. Since the enumerated programs need not
    exhaust the spectrum, ``GE`` here is a necessary condition only.
    """
    validate_labels(P, Q)
    alphas = alpha_grid(alphas)
    points = quantum_points(P.X, P.Y, alphas, depth, gammas, max_programs)
    rows = _compare_points(points, P, Q, _mean_cache_eval(False), {}, {})
    grid = {"alphas": [_fmt(a) for a in alphas], "depth": depth, "program_gammas": list(gammas),
            "max_programs": max_programs}
    return SweepResult(_verdict(rows, tol), rows, tol, grid, necessary_only=True)


def _sigma_commutes(P: FamilyPair, tol: float = 1e-8) -> bool:
    try:
        _commuting_check(P, "", tol)
    except NotCommuting:
        return False
    return True


def sweep_decide(P: FamilyPair, Q: FamilyPair, alphas=DEFAULT_ALPHAS,
                 gamma_res: int = DEFAULT_GAMMA_RES, depth: int = DEFAULT_DEPTH,
                 max_programs: int | None = DEFAULT_MAX_PROGRAMS, tol: float = TOL_SWEEP) -> SweepResult:
    """Commuting sweep when both ``sigma`` families commute, mean-program sweep otherwise."""
    if _sigma_commutes(P) and _sigma_commutes(Q):
        return sweep_decide_asymptotic_commuting(P, Q, alphas, gamma_res, tol)
    return sweep_decide_quantum(P, Q, alphas, depth, max_programs=max_programs, tol=tol)


def check_catalytic_sufficient(P: FamilyPair, Q: FamilyPair, alphas=DEFAULT_ALPHAS,
                               gamma_res: int = DEFAULT_GAMMA_RES, margin: float = 1e-9):
    """``StrictAllSampled`` if ``f(P) > f(Q)`` with relative room ``margin`` at every sampled point.

    Returns ``(status, sweep)``. Only the sampled part of the spectrum is
    checked, so this is evidence for the sufficient condition, not a proof.
    """
    res = sweep_decide(P, Q, alphas, gamma_res)
    strict = all(r.margin > margin for r in res.rows)
    return (STRICT_ALL_SAMPLED if strict else NOT_STRICT), res


def find_violation(P: FamilyPair, Q: FamilyPair, tol: float = TOL_SWEEP):
    """Most violated point of a coarse sweep, as ``(point, f_P, f_Q)``, or ``None``."""
    if _sigma_commutes(P) and _sigma_commutes(Q):
        res = sweep_decide_asymptotic_commuting(P, Q, DEFAULT_ALPHAS, 4, tol)
    else:
        res = sweep_decide_quantum(P, Q, DEFAULT_ALPHAS, depth=1, max_programs=200, tol=tol)
    worst = res.worst
    if worst is None or worst.margin >= -tol:
        return None
    return worst.point, worst.f_P, worst.f_Q


# ------------------------------------------------------------ joint convexity

@dataclass
class ConvexityReport:
    point: SpectralPoint
    trials: int
    violations: int
    worst_excess: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def joint_convexity_test(f: SpectralPoint, trials: int = 1000, dim: int = 3, tol: float = 1e-9,
                         seed: int = 0) -> ConvexityReport:
    """Sample mixtures of random classical pairs and check joint (quasi-)convexity of ``f``.

    Real points must satisfy ``f(tA + (1-t)B) <= t f(A) + (1-t) f(B)``;
    tropical points ``f(tA + (1-t)B) <= max(f(A), f(B))``. Excess is measured
    relative to the right-hand side.
    """
    if f.quantum:
        raise ValueError("joint convexity is tested on classical points")
    rng = np.random.default_rng(seed)
    Y = list(f.gamma.support)
    w = np.array([f.gamma.as_dict()[y] for y in Y])
    a = f.alpha

    def value(p, q):
        g = np.log(q) @ w
        if math.isinf(a):
            return float(np.max(p * np.exp(-g)))
        return float(np.sum(p ** a * np.exp((1.0 - a) * g)))

    bad, worst = 0, -math.inf
    for _ in range(trials):
        p1, p2 = rng.uniform(0.01, 1.0, size=(2, dim))
        q1, q2 = rng.uniform(0.01, 1.0, size=(2, dim, len(Y)))
        t = rng.uniform()
        lhs = value(t * p1 + (1 - t) * p2, t * q1 + (1 - t) * q2)
        if math.isinf(a):
            rhs = max(value(p1, q1), value(p2, q2))
        else:
            rhs = t * value(p1, q1) + (1 - t) * value(p2, q2)
        excess = (lhs - rhs) / rhs
        worst = max(worst, excess)
        if excess > tol:
            bad += 1
    return ConvexityReport(f, trials, bad, worst)
