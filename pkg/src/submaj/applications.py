"""Thermodynamic and hypothesis-testing drivers.

* Second-law monotones for time-translation covariant Gibbs-preserving maps
  and the two-level example where a Gibbs-preserving map succeeds but every
  covariant one fails.
* Strong converse exponents of group-invariant hypothesis tests, with and
  without reference frames.
* Asymptotic joint transformations of classical families in the Thompson
  metric sense.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import linalg as la
from .divergences import sandwiched_divergence
from .errors import DomainError
from .families import FamilyPair, classical_pair
from .feasibility import FeasibilityReport, decide_exact_transform, u1_constraint
from .means import commuting_log_mean, geometric_mean
from .spectrum import GE, LT, simplex_grid, sweep_decide_asymptotic_commuting

EXPONENT_ALPHAS = tuple(1.0 + 2.0 ** -k for k in range(1, 7)) + (2.0, 3.0, 5.0, 10.0, math.inf)
CONDITIONS_HOLD = "ConditionsHold"
VIOLATED = "Violated"


# ------------------------------------------------------------------- thermal

def gibbs_operator(h, beta: float, normalized: bool = True) -> np.ndarray:
    """``exp(-beta H)``, divided by its trace when ``normalized``."""
    g = la.mexp(-beta * la.as_hermitian(h))
    if normalized:
        g = g / np.trace(g).real
    return g


@dataclass
class ThermalSystem:
    """Hamiltonian ``H``, inverse temperature ``beta`` and a density matrix ``state``."""

    H: np.ndarray
    beta: float
    state: np.ndarray

    def __post_init__(self):
        self.H = la.as_hermitian(self.H)
        self.state = la.as_hermitian(self.state)
        if self.H.shape != self.state.shape:
            raise DomainError("Hamiltonian and state have different dimensions")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if abs(np.trace(self.state).real - 1.0) > 1e-9:
            raise DomainError(f"state has trace {np.trace(self.state).real}, expected 1")
        if not la.is_psd(self.state):
            raise DomainError("state is not positive semidefinite")

    def gibbs(self, normalized: bool = True) -> np.ndarray:
        return gibbs_operator(self.H, self.beta, normalized)

    def evolve(self, t: float) -> np.ndarray:
        """``exp(-itH) rho exp(itH)``."""
        w, v = la.eig(self.H)
        u = (v * np.exp(-1j * t * w)) @ v.conj().T
        return u @ self.state @ u.conj().T

    def with_state(self, state) -> "ThermalSystem":
        return ThermalSystem(self.H, self.beta, state)


def thermal_monotone(sys: ThermalSystem, alpha: float, gamma_weight: float, t: float,
                     use_normalized_gibbs: bool = True) -> float:
    """``D_alpha(rho || (e^{-itH} rho e^{itH}) #_gamma G)`` in bits.

    ``G`` is ``exp(-beta H)`` or its normalization. Returns ``inf`` for a
    rank-deficient state (unless ``gamma_weight == 1``, where the reference
    is ``G`` itself).
    """
    g = sys.gibbs(use_normalized_gibbs)
    if gamma_weight == 1.0:
        return sandwiched_divergence(sys.state, g, alpha)
    if not la.is_pd(sys.state):
        return math.inf
    ref = geometric_mean(sys.evolve(t), g, gamma_weight)
    return sandwiched_divergence(sys.state, ref, alpha)


def faist_states(beta: float, epsilon: float):
    """Perturbed endpoints ``(1-eps)|1><1| + eps tau`` and ``(1-eps)|+><+| + eps tau`` for ``H = |1><1|``."""
    h = np.diag([0.0, 1.0])
    tau = gibbs_operator(h, beta)
    excited = np.diag([0.0, 1.0]).astype(complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    return h, tau, (1 - epsilon) * excited + epsilon * tau, (1 - epsilon) * plus + epsilon * tau


def faist_initial_oracle(beta: float, epsilon: float) -> float:
    """Closed form of the monotone (alpha=2, gamma=1/2, t=pi) on the diagonal initial state.

    The state commutes with ``H``, so the reference mean is
    ``rho^1/2 tau^1/2`` and the quasientropy is ``sum rho_i^3/2 tau_i^-1/2``.
    """
    z = 1.0 + math.exp(-beta)
    tau = np.array([1.0, math.exp(-beta)]) / z
    rho = epsilon * tau + np.array([0.0, 1.0 - epsilon])
    return math.log2(float(np.sum(rho ** 1.5 / np.sqrt(tau))))


def faist_limit(beta: float) -> float:
    """Small-epsilon limit ``log2(1 + e^beta) / 2`` of the initial value."""
    return 0.5 * math.log2(1.0 + math.exp(beta))


@dataclass
class FaistRow:
    epsilon: float
    initial: float
    target: float
    oracle: float
    gibbs_preserving: FeasibilityReport | None = None
    covariant: FeasibilityReport | None = None


@dataclass
class FaistReport:
    beta: float
    limit: float
    rows: list = field(default_factory=list)

    @property
    def target_exceeds_initial(self) -> bool:
        return all(r.target > r.initial for r in self.rows)

    @property
    def target_increasing(self) -> bool:
        ordered = sorted(self.rows, key=lambda r: -r.epsilon)
        return all(b.target > a.target for a, b in zip(ordered, ordered[1:]))

    @property
    def slope(self) -> float:
        """Least-squares slope of the target value against ``log2(1/eps)``."""
        if len(self.rows) < 2:
            return math.nan
        xs = [math.log2(1.0 / r.epsilon) for r in self.rows]
        return float(np.polyfit(xs, [r.target for r in self.rows], 1)[0])

    def to_json(self) -> dict:
        rows = []
        for r in self.rows:
            d = {"epsilon": r.epsilon, "initial": r.initial, "target": r.target, "oracle": r.oracle}
            if r.gibbs_preserving is not None:
                d["gibbs_preserving"] = {"status": r.gibbs_preserving.status,
                                         "slack": r.gibbs_preserving.slack}
            if r.covariant is not None:
                d["covariant"] = {"status": r.covariant.status, "slack": r.covariant.slack}
            rows.append(d)
        return {"beta": self.beta, "limit": self.limit, "rows": rows,
                "target_exceeds_initial": self.target_exceeds_initial,
                "target_increasing": self.target_increasing, "slope": self.slope}


def faist_pairs(beta: float, epsilon: float):
    """Pairs ``({x: rho}, {gibbs: tau})`` for the initial and target states."""
    h, tau, r0, r1 = faist_states(beta, epsilon)
    P = FamilyPair.build({"x": r0}, {"gibbs": tau})
    Q = FamilyPair.build({"x": r1}, {"gibbs": tau})
    return h, tau, P, Q


def faist_feasibility(beta: float, epsilon: float, covariant: bool,
                      tol_feas: float = 1e-7) -> FeasibilityReport:
    """Trace-preserving, Gibbs-preserving exact transformation, optionally time-translation covariant."""
    h, tau, P, Q = faist_pairs(beta, epsilon)
    cons = u1_constraint(h, h) if covariant else ()
    return decide_exact_transform(P, Q, trace_preserving=True, gibbs_state=tau, equivariance=cons,
                                  tol_feas=tol_feas, explain=False)


def run_faist_example(beta: float = 1.0, epsilon_list: Sequence[float] = (1e-2, 1e-3, 1e-4),
                      feasibility: bool = True, alpha: float = 2.0, gamma_weight: float = 0.5,
                      t: float = math.pi) -> FaistReport:
    """Monotone values and feasibility split for each ``epsilon``."""
    report = FaistReport(beta, faist_limit(beta))
    for eps in epsilon_list:
        if not 0.0 < eps < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
        h, _, r0, r1 = faist_states(beta, eps)
        init = thermal_monotone(ThermalSystem(h, beta, r0), alpha, gamma_weight, t)
        targ = thermal_monotone(ThermalSystem(h, beta, r1), alpha, gamma_weight, t)
        row = FaistRow(eps, init, targ, faist_initial_oracle(beta, eps))
        if feasibility:
            row.gibbs_preserving = faist_feasibility(beta, eps, covariant=False)
            row.covariant = faist_feasibility(beta, eps, covariant=True)
        report.rows.append(row)
    return report


def thermal_orbit_pair(h, beta: float, state, n_points: int = 16, normalized: bool = True) -> FamilyPair:
    """Pair ``(rho, rho)`` on labels ``t0..t{N-1}, gibbs`` encoding covariant Gibbs-preserving maps.

    ``rho(tk)`` is the state evolved for time ``2 pi k / N`` and
    ``rho(gibbs)`` the Gibbs operator.
    """
    from .families import time_translation_rep

    _, reps = time_translation_rep(h, n_points)
    state = la.as_hermitian(state)
    fam = {f"t{k}": u @ state @ u.conj().T for k, u in enumerate(reps)}
    fam["gibbs"] = gibbs_operator(h, beta, normalized)
    return FamilyPair.build(fam, dict(fam))


# ------------------------------------------------------------------ exponents

@dataclass
class ExponentQuery:
    """Data for group-invariant hypothesis testing with optional reference frames.

    ``group`` acts on the tested system; ``group_ref`` (defaulting to
    ``group``) acts on the reference frame state ``omega``.
    """

    r: float
    rho0: np.ndarray
    sigma0: np.ndarray
    group: Sequence
    kappa: float = 0.0
    omega: np.ndarray | None = None
    group_ref: Sequence | None = None

    def __post_init__(self):
        if not self.r >= 0:
            raise DomainError(f"r must be nonnegative, got {self.r}")
        if not self.kappa >= 0:
            raise DomainError(f"kappa must be nonnegative, got {self.kappa}")
        self.rho0 = la.as_hermitian(self.rho0)
        self.sigma0 = la.as_hermitian(self.sigma0)
        self.group = [la.check_unitary(u) for u in self.group]
        if self.group_ref is None:
            self.group_ref = self.group
        else:
            self.group_ref = [la.check_unitary(u) for u in self.group_ref]
        if len(self.group_ref) != len(self.group):
            raise DomainError("group and group_ref must list the same elements")
        if self.kappa > 0:
            if self.omega is None:
                raise DomainError("kappa > 0 needs a reference state omega")
            self.omega = la.as_hermitian(self.omega)
            if not la.is_pd(self.omega):
                raise DomainError("omega must have full support")
            self.check_trivial_stabilizer()

    def check_trivial_stabilizer(self, tol: float = 1e-8):
        fixed = [k for k, u in enumerate(self.group_ref)
                 if np.max(np.abs(u @ self.omega @ u.conj().T - self.omega)) <= tol]
        if len(fixed) != 1:
            raise DomainError(f"omega must have trivial stabilizer; it is fixed by elements {fixed}")
        return fixed[0]

    def labels(self) -> list:
        return [f"g{k}" for k in range(len(self.group))]


@dataclass
class ExponentResult:
    value: float
    alpha: float
    gamma: object
    grid_value: float

    def to_json(self) -> dict:
        return {"value": self.value, "grid_sup": self.grid_value,
                "alpha": "inf" if self.alpha == math.inf else self.alpha,
                "gamma": self.gamma.describe() if self.gamma is not None else None}


def _orbit_sigma(group, state, labels):
    return {g: u @ state @ u.conj().T for g, u in zip(labels, group)}


def exponent_details(query: ExponentQuery, alphas: Sequence[float] = EXPONENT_ALPHAS,
                     gamma_res: int = 8, kappa: float | None = None) -> ExponentResult:
    """Grid supremum of ``(a-1)/a [r - D_a(rho0||L_gamma) - kappa D_a(Omega||L'_gamma)]``.

    ``L_gamma`` and ``L'_gamma`` are the log-means of the orbits of
    ``sigma0`` and ``Omega`` with a shared ``gamma``. The ``alpha -> 1``
    end of the range contributes the value 0, which is included.
    """
    kappa = query.kappa if kappa is None else kappa
    labels = query.labels()
    sig = _orbit_sigma(query.group, query.sigma0, labels)
    om = _orbit_sigma(query.group_ref, query.omega, labels) if kappa > 0 else None
    best = (-math.inf, None, None)
    for gamma in simplex_grid(labels, gamma_res):
        ref = commuting_log_mean(sig, gamma)
        ref_om = commuting_log_mean(om, gamma) if om is not None else None
        for a in alphas:
            if not a > 1.0:
                continue
            d = sandwiched_divergence(query.rho0, ref, a)
            if ref_om is not None:
                d += kappa * sandwiched_divergence(query.omega, ref_om, a)
            factor = 1.0 if math.isinf(a) else (a - 1.0) / a
            val = factor * (query.r - d)
            if val > best[0]:
                best = (val, a, gamma)
    grid = best[0]
    return ExponentResult(max(0.0, grid), best[1], best[2], grid)


def strong_converse_exponent(query: ExponentQuery, alphas: Sequence[float] = EXPONENT_ALPHAS,
                             gamma_res: int = 8) -> float:
    """Group-invariant strong converse exponent (no reference frame); a grid lower bound."""
    return exponent_details(query, alphas, gamma_res, kappa=0.0).value


def reference_frame_exponent(query: ExponentQuery, alphas: Sequence[float] = EXPONENT_ALPHAS,
                             gamma_res: int = 8) -> float:
    """``R*(r, kappa)`` on the grid, with ``kappa`` reference frames per sample."""
    return exponent_details(query, alphas, gamma_res).value


def unrestricted_exponent(r: float, rho0, sigma0) -> float:
    """``sup_{alpha > 1} (alpha-1)/alpha [r - D_alpha(rho0||sigma0)]`` by scalar optimization.

    The substitution ``alpha = 1/(1-s)``, ``s in (0, 1)``, turns the
    prefactor into ``s``; the ``alpha = inf`` end is checked separately.
    """
    def neg(s):
        a = 1.0 / (1.0 - s)
        return -s * (r - sandwiched_divergence(rho0, sigma0, a))

    res = minimize_scalar(neg, bounds=(1e-9, 1.0 - 1e-6), method="bounded",
                          options={"xatol": 1e-10})
    candidates = [0.0, -float(res.fun), r - sandwiched_divergence(rho0, sigma0, math.inf)]
    return max(candidates)


# -------------------------------------------------- approximate transformations

@dataclass
class ApproxCheck:
    status: str
    witness: object = None
    sweep: object = None


def approx_joint_transform_check(p: Mapping[str, Sequence[float]], p_target: Mapping[str, Sequence[float]],
                                 alphas: Sequence[float] = (1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0),
                                 gamma_res: int = 8, tol: float = 1e-7) -> ApproxCheck:
    """Check the spectral condition for asymptotic joint transformations ``p -> p_target``.

    ``p`` and ``p_target`` map the labels of ``X`` to probability vectors
    (lengths may differ between the two). Every ``x``, ``alpha`` in the grid
    and ``gamma`` in the simplex grid on ``X`` is tested. ``Violated``
    carries the most violated point with its two values.
    """
    X = list(p)
    if list(p_target) != X:
        raise DomainError("both families must use the same labels in the same order")
    P_arr = np.column_stack([np.asarray(p[x], dtype=float) for x in X])
    Q_arr = np.column_stack([np.asarray(p_target[x], dtype=float) for x in X])
    for arr in (P_arr, Q_arr):
        if np.any(arr <= 0):
            raise DomainError("probability vectors must be strictly positive")
        if np.max(np.abs(arr.sum(axis=0) - 1.0)) > 1e-9:
            raise DomainError("columns must be probability vectors")
    P = classical_pair(P_arr, P_arr, X, X)
    Q = classical_pair(Q_arr, Q_arr, X, X)
    res = sweep_decide_asymptotic_commuting(P, Q, alphas, gamma_res, tol)
    if res.verdict == GE:
        return ApproxCheck(CONDITIONS_HOLD, None, res)
    w = res.worst
    status = VIOLATED if res.verdict == LT else "Inconclusive"
    return ApproxCheck(status, (w.point, w.f_P, w.f_Q), res)


def same_orbit_query(r: float, p: float = 0.7) -> ExponentQuery:
    """``Z2 = {I, X}`` instance with ``sigma0 = X rho0 X``, where ``R*(r, 0) = r``."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    rho0 = np.diag([p, 1 - p]).astype(complex)
    return ExponentQuery(r, rho0, x @ rho0 @ x, [np.eye(2), x])


def cyclic_reference_query(r: float, kappa: float, rho0=None, sigma0=None, omega=None) -> ExponentQuery:
    """``Z3`` cyclic shifts on ``C^3`` with diagonal states and a trivial-stabilizer ``Omega``."""
    shift = np.roll(np.eye(3), 1, axis=0).astype(complex)
    group = [np.linalg.matrix_power(shift, k) for k in range(3)]
    rho0 = np.diag([0.6, 0.3, 0.1]) if rho0 is None else rho0
    sigma0 = np.diag([0.2, 0.3, 0.5]) if sigma0 is None else sigma0
    omega = np.diag([0.5, 0.3, 0.2]) if omega is None else omega
    return ExponentQuery(r, rho0, sigma0, group, kappa, omega)


__all__ = [
    "ThermalSystem", "thermal_monotone", "run_faist_example", "faist_initial_oracle", "faist_limit",
    "faist_states", "faist_pairs", "faist_feasibility", "thermal_orbit_pair", "gibbs_operator",
    "ExponentQuery", "ExponentResult", "exponent_details", "strong_converse_exponent",
    "reference_frame_exponent", "unrestricted_exponent", "approx_joint_transform_check",
    "same_orbit_query", "cyclic_reference_query", "CONDITIONS_HOLD", "VIOLATED",
]
