"""
Acceptance criteria, one test per criterion at its stated tolerance and
runtime limit.

Each criterion prints a single ``CRITERION k: PASS|FAIL ...`` line; the
lines are collected into the pytest terminal summary.  Run this module
directly (``python3 tests/test_acceptance.py``) for the lines alone.
"""

from __future__ import annotations

import json
import math
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from stripwindow import cli
from stripwindow.coefficients import (DEFAULT_EPS_GRID, mu_from_integral, mu_quadrature, mu_report,
                                      verify_decay_law, verify_eigenfunction_convergence,
                                      verify_popov, verify_quadratic_law)
from stripwindow.fdoracle import fd_gap_extrapolated
from stripwindow.geometry import Parity
from stripwindow.invariants import invariant_suite
from stripwindow.resonance import AccuracyWarning, edge_fit, threshold_resonance
from stripwindow.spectrum import eigenvalues_in_sector, full_spectrum
from stripwindow.thresholds import bracket, find_threshold

try:
    from conftest import record_criterion
except ImportError:  # run as a script
    def record_criterion(line):
        print(line)


def _timed(fn):
    t0 = time.perf_counter()
    passed, detail = fn()
    return passed, detail, time.perf_counter() - t0


def _run(k: int, fn, limit: float) -> bool:
    passed, detail, elapsed = _timed(fn)
    in_time = elapsed <= limit
    ok = bool(passed) and in_time
    record_criterion(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}; "
                     f"runtime {elapsed:.1f}s (limit {limit:.0f}s{'' if in_time else ', exceeded'})")
    return ok


# -- criteria ---------------------------------------------------------------

def criterion_thresholds():
    parts = []
    ok = True
    for n in range(1, 5):
        rec = find_threshold(n, 128, tol=1e-6, check=True)
        lo, hi = bracket(n)
        inside = lo < rec.a_n < hi
        stable = rec.drift <= 1e-6
        ok &= inside and stable
        parts.append(f"a_{n}={rec.a_n:.7f} in ({lo:.4f},{hi:.4f}) drift {rec.drift:.1e}")
    return ok, "; ".join(parts)


def criterion_emergence():
    parts = []
    ok = True
    for n in (1, 2, 3):
        a_n = find_threshold(n, 128, check=False).a_n
        below = full_spectrum(a_n - 0.05, 128)
        above = full_spectrum(a_n + 0.05, 128)
        alternate = all(p.parity is (Parity.EVEN if i % 2 == 0 else Parity.ODD)
                        for res in (below, above) for i, p in enumerate(res.points))
        emerged = above.points[-1].parity is (Parity.EVEN if n % 2 == 0 else Parity.ODD)
        ok &= above.count - below.count == 1 and alternate and emerged
        parts.append(f"n={n}: {below.count}->{above.count}")
    return ok, "counts " + ", ".join(parts) + ", parities alternate"


def criterion_quadratic():
    parts = []
    ok = True
    for n in (1, 2):
        mu = mu_report(n).mu_integral
        rep = verify_quadratic_law(n, DEFAULT_EPS_GRID, 128, mu=mu)
        ok &= rep.checks["slope"] and rep.checks["mu"]
        parts.append(f"n={n}: slope {rep.extras['loglog_slope']:.3f} (2.00+-0.05), "
                     f"mu_fit {rep.extras['mu_fit']:.5f} vs {mu:.5f} "
                     f"({100 * rep.extras['mu_rel_diff']:.2f}%, limit 2%)")
    return ok, "; ".join(parts)


def criterion_two_formulas():
    parts = []
    ok = True
    for n in (1, 2):
        rep = mu_report(n)
        ok &= rep.rel_diff <= 0.02
        parts.append(f"n={n}: mu_int {rep.mu_integral:.6f} mu_alpha {rep.mu_alpha:.6f} "
                     f"({100 * rep.rel_diff:.2f}%)")
    field = threshold_resonance(1, 512)
    windows = [np.linspace(0.02 * math.pi, 0.15 * math.pi, 8), np.linspace(0.05 * math.pi, 0.25 * math.pi, 8)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        alphas = [edge_fit(field, radii=w).alpha for w in windows]
    drift = abs(alphas[0] - alphas[1]) / abs(alphas[1])
    ok &= drift <= 0.02
    parts.append(f"window stability {100 * drift:.2f}% (limit 2%)")
    return ok, "; ".join(parts)


def criterion_mu_quadrature():
    field = threshold_resonance(1, 512)
    semi = mu_from_integral(field)
    brute = mu_quadrature(field)
    rel = abs(semi - brute) / semi
    return rel <= 1e-4, f"semi-analytic {semi:.8f} vs quadrature {brute:.8f}, rel {rel:.1e} (limit 1e-4)"


def criterion_popov():
    rep = verify_popov()
    r = rep.extras["ratio"]
    dev = rep.extras["deviation"]
    detail = (", ".join(f"r({a})={x:.5f}" for a, x in zip(rep.extras["a"], r))
              + f"; |r-1| {['%.4f' % v for v in dev]} strictly decreasing: {rep.checks['deviation_decreasing']}"
              + f"; |r(0.2)-1| <= 0.25: {rep.checks['limit']}")
    return rep.passed, detail


ORACLE_CASES = ((1.0, Parity.EVEN), (2.0, Parity.EVEN), (2.5, Parity.ODD))


def criterion_fd_oracle():
    parts = []
    ok = True
    for a, parity in ORACLE_CASES:
        mm = eigenvalues_in_sector(a, parity, 128)[0].gap
        fd = fd_gap_extrapolated(a, parity).gap
        rel = abs(fd - mm) / mm
        ok &= rel <= 1e-3
        parts.append(f"(a={a}, {parity.value}) rel {rel:.1e}")
    return ok, "; ".join(parts) + " (limit 1e-3)"


def criterion_decay_and_eigenfunction():
    mu = mu_report(1).mu_integral
    decay = verify_decay_law(1, DEFAULT_EPS_GRID, 128, mu=mu)
    conv = verify_eigenfunction_convergence(1, DEFAULT_EPS_GRID)
    ratio = conv.extras["ratio"]
    detail = (f"intercept {decay.coefficients[0]:.5f} vs mu_1 {mu:.5f} "
              f"({100 * decay.extras['mu_rel_diff']:.2f}%, limit 2%); "
              f"||db||/eps in [{min(ratio):.4f}, {max(ratio):.4f}], C={conv.coefficients[0]:.4f}")
    return decay.checks["intercept"] and conv.passed, detail


def criterion_invariants():
    reports = invariant_suite()
    detail = ", ".join(f"{name} {'ok' if rep.passed else 'FAILED'}" for name, rep in reports.items())
    mismatch = reports["interface_continuity"].extras["relative_mismatch"]
    return all(r.passed for r in reports.values()), detail + f" (interface {mismatch:.1e})"


def criterion_determinism():
    invocations = [
        ["thresholds", "--max-n", "1", "--format", "json"],
        ["spectrum", "--a", "1.5", "--modes", "64", "--format", "json"],
        ["field", "--n", "1", "--nx1", "20", "--nx2", "8"],
    ]
    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        for i, argv in enumerate(invocations):
            outs = []
            for rep in range(2):
                path = Path(tmp) / f"run{i}_{rep}.out"
                ok &= cli.main(argv + ["--out", str(path)]) == 0
                man = json.loads(Path(f"{path}.manifest.json").read_text())
                cli.validate(man, "manifest")
                man.pop("timestamp")
                man["outputs"] = []
                outs.append((path.read_bytes(), man))
            ok &= outs[0][0] == outs[1][0] and outs[0][1] == outs[1][1]
            if "json" in argv:
                cli.validate(json.loads(outs[0][0]), "table")
    return ok, f"{len(invocations)} commands byte-identical, manifests equal modulo timestamp, schemas valid"


CRITERIA = {
    1: (criterion_thresholds, 60),
    2: (criterion_emergence, 120),
    3: (criterion_quadratic, 120),
    4: (criterion_two_formulas, 60),
    5: (criterion_mu_quadrature, 60),
    6: (criterion_popov, 30),
    7: (criterion_fd_oracle, 300),
    8: (criterion_decay_and_eigenfunction, 120),
    9: (criterion_invariants, 60),
    10: (criterion_determinism, 10),
}


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    fn, limit = CRITERIA[k]
    assert _run(k, fn, limit)


if __name__ == "__main__":
    results = [_run(k, *CRITERIA[k]) for k in sorted(CRITERIA)]
    print(f"{sum(results)}/{len(results)} criteria pass")
