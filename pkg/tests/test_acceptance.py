"""Acceptance criteria 1-10.  Each test records one PASS/FAIL line, printed in
the terminal summary.  Run directly with ``python tests/test_acceptance.py``
for the lines alone."""

import os
import subprocess
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from _acceptance_log import record  # noqa: E402

from zsf.arithmetic import lambda_, lambda_odd_dihedral, length_set, pair_search, rho, witness_pair  # noqa: E402
from zsf.atoms import large_davenport  # noqa: E402
from zsf.group import dicyclic, dihedral  # noqa: E402
from zsf.verify import (  # noqa: E402
    check_dgm_bound,
    random_dgm_draws,
    verify_characterization,
    verify_smooth_structure,
)

JOBS = int(os.environ.get("ZSF_TEST_JOBS", "1"))


def _check(number, checks, started):
    """``checks`` is a list of (label, ok); records and asserts."""
    bad = [label for label, ok in checks if not ok]
    elapsed = time.perf_counter() - started
    detail = f"{len(checks) - len(bad)}/{len(checks)} checks in {elapsed:.1f}s"
    if bad:
        detail += "; failed: " + ", ".join(bad)
    record(number, not bad, detail)
    assert not bad, detail


def test_criterion_01_davenport_values():
    t0 = time.perf_counter()
    expected = [(dihedral(3), 6), (dihedral(5), 10), (dihedral(4), 6), (dihedral(6), 9), (dicyclic(2), 6), (dicyclic(3), 9)]
    checks = []
    for G, value in expected:
        D, witness = large_davenport(G, jobs=JOBS)
        checks.append((f"D({G.label()})={D}", D == value and len(witness) == value))
    _check(1, checks, t0)


def _characterization(number, cases):
    t0 = time.perf_counter()
    checks = []
    for G, st in cases:
        rep = verify_characterization(G, st, jobs=JOBS)
        checks.append((f"{st} on {G.label()} ({rep.family_size} vs {rep.census_size})", rep.equal))
    _check(number, checks, t0)


def test_criterion_02_thm41():
    _characterization(2, [(dihedral(3), "thm4.1"), (dihedral(5), "thm4.1")])


def test_criterion_03_thm42():
    _characterization(3, [(dihedral(4), "thm4.2"), (dihedral(6), "thm4.2")])


def test_criterion_04_thm43():
    _characterization(4, [(dicyclic(2), "thm4.3"), (dicyclic(3), "thm4.3")])


def test_criterion_05_reflection_props():
    t0 = time.perf_counter()
    checks = []
    for G, st in [(dihedral(4), "prop3.2"), (dihedral(6), "prop3.2"), (dicyclic(2), "prop3.3"), (dicyclic(3), "prop3.3")]:
        rep = verify_characterization(G, st, jobs=JOBS)
        checks.append((f"{st} families on {G.label()}", not rep.missing and not rep.extra))
        checks.append((f"{st} no longer atoms on {G.label()}", rep.longer_free))
    _check(5, checks, t0)


def test_criterion_06_cyclic_structure():
    t0 = time.perf_counter()
    checks = []
    for n in range(3, 13):
        rep = verify_smooth_structure(n)
        checks.append((f"C_{n} ({rep.examined} sequences, {len(rep.violations)} violations)", rep.ok))
    _check(6, checks, t0)


def test_criterion_07_dgm_fuzz():
    t0 = time.perf_counter()
    violations = 0
    draws = 0
    for S, n in random_dgm_draws(10_000, seed=20240601, max_order=16, max_len=8):
        draws += 1
        if not check_dgm_bound(S, n).holds:
            violations += 1
    _check(7, [(f"{draws} draws, {violations} violations", violations == 0 and draws == 10_000)], t0)


def test_criterion_08_rho_lambda():
    t0 = time.perf_counter()
    checks = []
    D6, D8, Q8 = dihedral(3), dihedral(4), dicyclic(2)

    r = rho(D6, 3)
    L = length_set(r.witness.seq)
    checks.append(("rho_3(D_6)=9", r.exact == 9))
    checks.append(("L(UVW) over D_6 contains {3, 9}", {3, 9} <= L.lengths and r.witness.check()))
    for G in (Q8, D8):
        r = rho(G, 3)
        L = length_set(r.witness.seq)
        checks.append((f"rho_3({G.label()})=8", r.exact == 8 and r.lower == 8 and r.upper == 8))
        checks.append((f"witness over {G.label()} contains {{3, 8}}", {3, 8} <= L.lengths and r.witness.check()))

    table_ok = all(lambda_(D6, k).exact == lambda_odd_dihedral(3, k) for k in range(1, 19))
    checks.append(("lambda_k(D_6) table k in [1, 18]", table_ok))

    for G, D in [(D6, 6), (dihedral(5), 10), (D8, 6), (dihedral(6), 9), (Q8, 6), (dicyclic(3), 9)]:
        ok = all(lambda_(G, l * D).exact == 2 * l for l in (1, 2, 3))
        checks.append((f"lambda_(lD)=2l on {G.label()}", ok))
    _check(8, checks, t0)


def test_criterion_09_two_and_j():
    t0 = time.perf_counter()
    checks = []
    for G, D in [(dihedral(3), 6), (dicyclic(2), 6)]:
        for j in range(2, D + 1):
            w = witness_pair(G, j)
            checks.append((f"{{2,{j}}} in L over {G.label()}", {2, j} <= length_set(w.seq).lengths and w.check()))
        res = pair_search(G, D + 1, 2 * D, prune=False, jobs=JOBS)
        checks.append((f"no {{2,{D + 1}}} with |B|<={2 * D} over {G.label()} ({res.computed} pairs)",
                       not res.found and res.computed == res.sequences > 0))
    _check(9, checks, t0)


def test_criterion_10_property_suites():
    t0 = time.perf_counter()
    here = os.path.dirname(os.path.abspath(__file__))
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", os.path.join(here, "test_properties.py")],
        capture_output=True, text=True, cwd=os.path.dirname(here),
    )
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    _check(10, [(f"property suites: {summary}", proc.returncode == 0)], t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
