"""Self-contained numerical checks, run by ``submaj selftest`` and the acceptance tests.

Each ``check_*`` function returns a :class:`CheckResult`; none of them
raises on a failed check.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg as la
from .applications import (ThermalSystem, cyclic_reference_query, exponent_details, faist_feasibility,
                           faist_initial_oracle, faist_limit, faist_states, run_faist_example,
                           same_orbit_query, strong_converse_exponent, thermal_monotone,
                           unrestricted_exponent)
from .divergences import classical_renyi_divergence, sandwiched_divergence, sandwiched_geometric_divergence
from .feasibility import (FEASIBLE, INFEASIBLE, MARGINAL, decide_submajorization,
                          decide_submajorization_classical)
from .families import FamilyPair, classical_pair, classical_vectors, power_universal
from .means import MeanProgram
from .sampling import (apply_kraus, random_classical_pair, random_kraus, random_pd, random_quantum_pair,
                       random_stinespring_channel, random_substochastic, random_unitary)
from .spectrum import DEFAULT_ALPHAS, classical_log_table, simplex_grid, sweep_decide


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} [{self.seconds:.2f}s]"


def _timed(name: str, fn: Callable[[], tuple]) -> CheckResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t0)


# ------------------------------------------------------------ thermal example

def check_thermal_value(beta: float = 1.0) -> CheckResult:
    def run():
        h = np.diag([0.0, 1.0])
        errs, vals = [], {}
        for eps in (1e-3, 1e-4):
            _, _, r0, _ = faist_states(beta, eps)
            v = thermal_monotone(ThermalSystem(h, beta, r0), 2.0, 0.5, math.pi)
            errs.append(abs(v - faist_initial_oracle(beta, eps)))
            vals[eps] = v
        limit = faist_limit(beta)
        ok = (max(errs) <= 1e-10 and abs(limit - 0.5 * math.log2(1 + math.e)) < 1e-15
              and abs(vals[1e-3] - limit) <= 0.02 and abs(vals[1e-4] - limit) <= 0.002)
        return ok, (f"limit {limit:.6f}; eps=1e-3 -> {vals[1e-3]:.6f}, eps=1e-4 -> {vals[1e-4]:.6f}; "
                    f"oracle error {max(errs):.1e}")

    return _timed("thermal monotone value", run)


def check_thermal_divergence(beta: float = 1.0) -> CheckResult:
    def run():
        rep = run_faist_example(beta, (1e-2, 1e-3, 1e-4), feasibility=False)
        ok = rep.target_increasing and rep.target_exceeds_initial and rep.slope > 0
        targets = ", ".join(f"{r.target:.4f}" for r in rep.rows)
        return ok, f"targets [{targets}] vs initial <= {max(r.initial for r in rep.rows):.4f}; slope {rep.slope:.4f}"

    return _timed("thermal monotone divergence", run)


def check_feasibility_split(beta: float = 1.0, epsilon: float = 1e-2, tol_feas: float = 1e-7) -> CheckResult:
    def run():
        gp = faist_feasibility(beta, epsilon, covariant=False, tol_feas=tol_feas)
        cov = faist_feasibility(beta, epsilon, covariant=True, tol_feas=tol_feas)
        ok = gp.status == FEASIBLE and cov.status == INFEASIBLE and not gp.notes
        return ok, (f"Gibbs-preserving {gp.status} (t*={gp.slack:.2e}), "
                    f"covariant {cov.status} (t*={cov.slack:.3f})")

    return _timed("Gibbs-preserving vs covariant feasibility", run)


# --------------------------------------------------------------- spectrum axioms

def _tables(p, q, labels_y, alphas, gamma_res):
    W = np.array([[g.as_dict().get(y, 0.0) for y in labels_y] for g in simplex_grid(labels_y, gamma_res)])
    return classical_log_table(p, q, alphas, W)


def check_spectrum_axioms(n_pairs: int = 200, n_maps: int = 50, seed: int = 0, tol: float = 1e-7,
                          gamma_res: int = 8) -> CheckResult:
    """Additivity, multiplicativity, monotonicity and normalization of classical points."""

    def run():
        rng = np.random.default_rng(seed)
        alphas = DEFAULT_ALPHAS
        trop = [k for k, a in enumerate(alphas) if math.isinf(a)]
        real = [k for k, a in enumerate(alphas) if not math.isinf(a)]
        worst = {"add": 0.0, "mul": 0.0, "mono": 0.0, "unit": 0.0}
        for _ in range(n_pairs):
            P = random_classical_pair(rng)
            nx, ny = len(P.X), len(P.Y)
            R = random_classical_pair(rng, nx=nx, ny=ny)
            lP = _tables(*classical_vectors(P), P.Y, alphas, gamma_res)
            lR = _tables(*classical_vectors(R), R.Y, alphas, gamma_res)
            lsum = _tables(*classical_vectors(P + R), P.Y, alphas, gamma_res)
            lprod = _tables(*classical_vectors(P * R), P.Y, alphas, gamma_res)
            expect_sum = np.empty_like(lP)
            expect_sum[real] = np.logaddexp(lP[real], lR[real])
            expect_sum[trop] = np.maximum(lP[trop], lR[trop])
            worst["add"] = max(worst["add"], float(np.max(np.abs(lsum - expect_sum))))
            worst["mul"] = max(worst["mul"], float(np.max(np.abs(lprod - (lP + lR)))))
            p, q = classical_vectors(P)
            for _ in range(n_maps):
                T = random_substochastic(rng, int(rng.integers(1, 5)), p.shape[0])
                lQ = _tables(T @ p, T @ q, P.Y, alphas, gamma_res)
                worst["mono"] = max(worst["mono"], float(np.max(lQ - lP)))
            u = power_universal(1, P.X, P.Y)
            lu = _tables(*classical_vectors(u), u.Y, alphas, gamma_res)
            expect_u = np.array([math.log(2.0) if math.isinf(a) else a * math.log(2.0) for a in alphas])
            worst["unit"] = max(worst["unit"], float(np.max(np.abs(lu - expect_u[:, None, None]))))
        ok = all(v <= tol for v in worst.values())
        detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        return ok, f"{n_pairs} pairs x {n_maps} maps, worst relative deviations: {detail}"

    return _timed("spectrum axioms", run)


# ------------------------------------------------------------------ mean axioms

def random_program(rng, labels) -> MeanProgram:
    """Random nested binary mean of depth at most 2 over ``labels``."""
    def leaf():
        return MeanProgram.load(labels[int(rng.integers(len(labels)))])

    shape = int(rng.integers(3))
    if shape == 0:
        return leaf()
    inner = MeanProgram.geo(leaf(), leaf(), float(rng.uniform()))
    if shape == 1:
        return inner
    if rng.uniform() < 0.5:
        return MeanProgram.geo(inner, leaf(), float(rng.uniform()))
    return MeanProgram.geo(leaf(), inner, float(rng.uniform()))


def _family(rng, labels, d):
    return {y: random_pd(rng, d) for y in labels}


def check_mean_axioms(n: int = 100, seed: int = 0, tol: float = 1e-7) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        labels = ["a", "b", "c"]
        fails = {}

        def record(name, bad):
            fails[name] = fails.get(name, 0) + int(bad)

        def close(a, b):
            return np.max(np.abs(a - b)) <= tol * max(1.0, float(np.max(np.abs(b))))

        def geq(a, b):
            return la.min_eig(a - b) >= -tol * max(1.0, la.op_norm(b))

        for _ in range(n):
            d1, d2 = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            M = random_program(rng, labels)
            s, s2 = _family(rng, labels, d1), _family(rng, labels, d1)
            t = _family(rng, labels, d2)
            ev = M.evaluate(s)
            record("direct sum", not close(M.evaluate({y: la.dsum(s[y], t[y]) for y in labels}),
                                           la.dsum(ev, M.evaluate(t))))
            record("tensor", not close(M.evaluate({y: la.kron(s[y], t[y]) for y in labels}),
                                       la.kron(ev, M.evaluate(t))))
            lam = float(rng.uniform(0.1, 10.0))
            record("homogeneity", not close(M.evaluate({y: lam * s[y] for y in labels}), lam * ev))
            bigger = {y: s[y] + random_pd(rng, d1, 0.0) * rng.uniform() for y in labels}
            record("monotonicity", not geq(M.evaluate(bigger), ev))
            w = float(rng.uniform())
            mix = {y: w * s[y] + (1 - w) * s2[y] for y in labels}
            record("concavity", not geq(M.evaluate(mix), w * ev + (1 - w) * M.evaluate(s2)))
            U = random_unitary(rng, d1)
            rot = M.evaluate({y: U @ s[y] @ U.conj().T for y in labels})
            record("unitary equivariance", not close(rot, U @ ev @ U.conj().T))
            ks = random_kraus(rng, d1, d2, n_kraus=d1 * d2)
            record("CPTP superadditivity",
                   not geq(M.evaluate({y: apply_kraus(ks, s[y]) for y in labels}), apply_kraus(ks, ev)))
        ok = all(v == 0 for v in fails.values())
        return ok, f"{n} instances per axiom; failures: " + ", ".join(f"{k} {v}" for k, v in fails.items())

    return _timed("mean axioms", run)


# --------------------------------------------------------------------- DPI

def check_dpi(n: int = 200, seed: int = 0, tol: float = 1e-7) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        worst_dpi, worst_g0, worst_cl = -math.inf, 0.0, 0.0
        for _ in range(n):
            phi = random_stinespring_channel(rng, 2, 2)
            rho = random_pd(rng, 2, trace=float(rng.uniform(0.3, 1.0)))
            sigma = random_pd(rng, 2, trace=1.0)
            prho, psig = phi(rho), phi(sigma)
            for a in (1.5, 2.0, 3.0):
                worst_dpi = max(worst_dpi, sandwiched_divergence(prho, psig, a) - sandwiched_divergence(rho, sigma, a))
                for g in (0.25, 0.5, 0.75):
                    worst_dpi = max(worst_dpi, sandwiched_geometric_divergence(prho, psig, a, g)
                                    - sandwiched_geometric_divergence(rho, sigma, a, g))
                worst_g0 = max(worst_g0, abs(sandwiched_geometric_divergence(rho, sigma, a, 0.0)
                                             - sandwiched_divergence(rho, sigma, a)))
                p, q = rng.uniform(0.05, 1.0, size=(2, 3))
                for g in (0.25, 0.5, 0.75):
                    worst_cl = max(worst_cl, abs(sandwiched_geometric_divergence(np.diag(p), np.diag(q), a, g)
                                                 - classical_renyi_divergence(p, q, a)))
        ok = worst_dpi <= tol and worst_g0 <= 1e-9 and worst_cl <= 1e-9
        return ok, (f"{n} triples: worst DPI excess {worst_dpi:.1e}, gamma=0 gap {worst_g0:.1e}, "
                    f"commuting gap {worst_cl:.1e}")

    return _timed("data processing", run)


# --------------------------------------------------------- LP vs SDP agreement

def random_diagonal_instance(rng):
    """Classical pair ``P`` and a target built from a substochastic image with random rescaling."""
    d, d2 = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    nx, ny = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    p = rng.uniform(0.05, 1.0, size=(d, nx))
    q = rng.uniform(0.05, 1.0, size=(d, ny))
    if rng.uniform() < 0.8:
        T = random_substochastic(rng, d2, d)
        p2 = T @ p * rng.uniform(0.7, 1.3, size=(1, nx))
        q2 = T @ q * rng.uniform(0.7, 1.3, size=(1, ny))
    else:
        p2 = rng.uniform(0.05, 1.0, size=(d2, nx))
        q2 = rng.uniform(0.05, 1.0, size=(d2, ny))
    return classical_pair(p, q), classical_pair(p2, q2)


def check_lp_sdp_agreement(n: int = 200, seed: int = 0, tol_feas: float = 1e-7) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        counts = {FEASIBLE: 0, INFEASIBLE: 0, MARGINAL: 0}
        disagree = 0
        for _ in range(n):
            P, Q = random_diagonal_instance(rng)
            s = decide_submajorization(P, Q, tol_feas=tol_feas, explain=False)
            c = decide_submajorization_classical(P, Q, tol_feas=tol_feas, explain=False)
            if MARGINAL in (s.status, c.status):
                counts[MARGINAL] += 1
                continue
            counts[s.status] += 1
            disagree += int(s.status != c.status)
        ok = disagree == 0 and counts[MARGINAL] < 0.05 * n
        return ok, (f"{n} instances: {counts[FEASIBLE]} feasible, {counts[INFEASIBLE]} infeasible, "
                    f"{counts[MARGINAL]} marginal, {disagree} disagreements")

    return _timed("LP/SDP agreement", run)


# ------------------------------------------------------------ necessity chain

def random_feasible_instance(rng):
    """``P`` and ``Q = ((1-d) T(rho), T(sigma) + d I)`` for a random trace-nonincreasing ``T``."""
    d, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    nx, ny = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    if rng.uniform() < 0.3:
        P = random_classical_pair(rng, d, nx, ny)
        T = random_substochastic(rng, d2, d)
        p, q = classical_vectors(P)
        delta = 0.02
        return P, classical_pair((1 - delta) * T @ p, T @ q + delta)
    P = random_quantum_pair(rng, d, nx, ny)
    ks = random_kraus(rng, d, d2, n_kraus=d * d2, contraction=float(rng.uniform(0.6, 1.0)))
    delta = 0.02
    Q = FamilyPair.build({x: (1 - delta) * apply_kraus(ks, P.rho[x]) for x in P.X},
                         {y: apply_kraus(ks, P.sigma[y]) + delta * np.eye(d2) for y in P.Y})
    return P, Q


def check_necessity(n: int = 100, seed: int = 0, tol: float = 1e-6) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        feasible, worst, points = 0, math.inf, 0
        attempts = 0
        while feasible < n and attempts < 3 * n:
            attempts += 1
            P, Q = random_feasible_instance(rng)
            if decide_submajorization(P, Q, explain=False).status != FEASIBLE:
                continue
            feasible += 1
            res = sweep_decide(P, Q, gamma_res=4, depth=1, max_programs=None)
            points += len(res.rows)
            worst = min(worst, res.worst.margin)
        ok = feasible == n and worst >= -tol
        return ok, f"{feasible}/{attempts} feasible instances, {points} point comparisons, worst margin {worst:.1e}"

    return _timed("necessity of spectral conditions", run)


# ------------------------------------------------------------------- exponents

def check_exponent_limits(r: float = 1.5, kappa: float = 1e3, tol: float = 0.05) -> CheckResult:
    def run():
        q = cyclic_reference_query(r, kappa)
        ref = exponent_details(q).value
        unres = unrestricted_exponent(r, q.rho0, q.sigma0)
        same = [(rr, strong_converse_exponent(same_orbit_query(rr))) for rr in (0.25, 1.0, 2.0)]
        same_err = max(abs(v - rr) for rr, v in same)
        ok = abs(ref - unres) <= tol and same_err <= 1e-12
        return ok, (f"kappa={kappa:g}: {ref:.4f} vs unrestricted {unres:.4f}; "
                    f"same orbit max |R*(r,0) - r| = {same_err:.1e}")

    return _timed("exponent limits", run)


CHECKS = (
    ("1", check_thermal_value),
    ("2", check_thermal_divergence),
    ("3", check_feasibility_split),
    ("4", check_spectrum_axioms),
    ("5", check_mean_axioms),
    ("6", check_dpi),
    ("7", check_lp_sdp_agreement),
    ("8", check_necessity),
    ("9", check_exponent_limits),
)

_SEEDED = {"4", "5", "6", "7", "8"}


def run_selftest(seed: int = 0, report: Callable[[str], None] | None = None) -> list:
    """Run every check; ``report`` receives one line per check as it finishes."""
    results = []
    for key, fn in CHECKS:
        res = fn(seed=seed) if key in _SEEDED else fn()
        res.name = f"[{key}] {res.name}"
        results.append(res)
        if report is not None:
            report(res.line())
    return results


__all__ = ["CheckResult", "run_selftest", "CHECKS", "random_program", "random_diagonal_instance",
           "random_feasible_instance"]
