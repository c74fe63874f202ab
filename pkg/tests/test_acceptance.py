"""Acceptance criteria 1-10, each at its stated tolerance and time budget.

Every test logs one ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""
import math
import os
import subprocess
import sys
import time

import pytest

from submaj import selftest
from submaj.applications import (ThermalSystem, faist_initial_oracle, faist_limit, faist_states,
                                 thermal_monotone)


def _report(log, number, passed, detail):
    log(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
    assert passed, detail


def _check(log, number, result, budget=None):
    passed = result.passed and (budget is None or result.seconds < budget)
    timing = f" [{result.seconds:.2f}s" + (f" < {budget:g}s]" if budget else "]")
    _report(log, number, passed, result.detail + timing)


def test_criterion_01_thermal_value(acceptance_log):
    t0 = time.perf_counter()
    limit = faist_limit(1.0)
    assert limit == pytest.approx(0.5 * math.log2(1.0 + math.e), abs=1e-15)
    errs, oracle_err = {}, 0.0
    for eps in (1e-3, 1e-4):
        h, _, initial, _ = faist_states(1.0, eps)
        val = thermal_monotone(ThermalSystem(h, 1.0, initial), 2.0, 0.5, math.pi)
        oracle_err = max(oracle_err, abs(val - faist_initial_oracle(1.0, eps)))
        errs[eps] = abs(val - limit)
    dt = time.perf_counter() - t0
    ok = oracle_err < 1e-10 and errs[1e-3] < 0.02 and errs[1e-4] < 0.002 and dt < 1.0
    _report(acceptance_log, 1, ok,
            f"limit {limit:.6f}; |err| {errs[1e-3]:.2e} at 1e-3 (< 0.02), {errs[1e-4]:.2e} at 1e-4 "
            f"(< 0.002); oracle error {oracle_err:.1e} [{dt:.2f}s < 1s]")


def test_criterion_02_thermal_divergence(acceptance_log):
    _check(acceptance_log, 2, selftest.check_thermal_divergence(), budget=1.0)


def test_criterion_03_feasibility_split(acceptance_log):
    _check(acceptance_log, 3, selftest.check_feasibility_split(), budget=30.0)


def test_criterion_04_spectrum_axioms(acceptance_log):
    _check(acceptance_log, 4, selftest.check_spectrum_axioms(n_pairs=200, n_maps=50, seed=0))


def test_criterion_05_mean_axioms(acceptance_log):
    _check(acceptance_log, 5, selftest.check_mean_axioms(n=100, seed=0))


def test_criterion_06_data_processing(acceptance_log):
    _check(acceptance_log, 6, selftest.check_dpi(n=200, seed=0))


def test_criterion_07_lp_sdp_agreement(acceptance_log):
    _check(acceptance_log, 7, selftest.check_lp_sdp_agreement(n=200, seed=0))


def test_criterion_08_necessity(acceptance_log):
    _check(acceptance_log, 8, selftest.check_necessity(n=100, seed=0))


def test_criterion_09_exponent_limits(acceptance_log):
    _check(acceptance_log, 9, selftest.check_exponent_limits(r=1.5, kappa=1e3, tol=0.05))


def test_criterion_10_selftest_cli(acceptance_log):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "submaj.cli", "selftest", "--seed", "0"],
                          capture_output=True, text=True, timeout=300, env=dict(os.environ))
    dt = time.perf_counter() - t0
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith(("PASS", "FAIL"))]
    ok = proc.returncode == 0 and len(lines) == 9 and all(ln.startswith("PASS") for ln in lines) and dt < 300
    _report(acceptance_log, 10, ok, f"submaj selftest exit {proc.returncode}, "
            f"{sum(ln.startswith('PASS') for ln in lines)}/9 checks passed [{dt:.1f}s < 300s]")
