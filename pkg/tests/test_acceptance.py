"""Acceptance criteria 1-8, each reported as one pass/fail line.

The lines are printed as the tests run (visible with ``-s``) and repeated in
the pytest terminal summary.
"""

import random
import time
from fractions import Fraction

import pytest

from qbdst.certificate import verify
from qbdst.errors import InvariantError
from qbdst.generators import (from_set_cover, random_corpus, random_quasi_bipartite_m,
                              set_cover_corpus)
from qbdst.instance import shortest_dist
from qbdst.oracle import brute_force_opt, brute_force_set_cover, exact_opt
from qbdst.solver import solve

import conftest
from conftest import rational_slots, tamper

SEED = 2024
N_RANDOM, N_SETCOVER = 200, 50


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE[n] = line
    print(line)
    return ok


@pytest.fixture(scope="module")
def corpus():
    insts = list(random_corpus(N_RANDOM, SEED, max_nodes=24, max_terminals=6, max_cost=20))
    insts += [from_set_cover(sc) for sc in set_cover_corpus(N_SETCOVER, SEED + 1)]
    return insts


@pytest.fixture(scope="module")
def runs(corpus):
    start = time.perf_counter()
    out = [(inst, solve(inst), exact_opt(inst).opt_cost) for inst in corpus]
    return out, time.perf_counter() - start


def test_criterion_1_sandwich(corpus, runs):
    results, elapsed = runs
    assert all(inst.n <= 24 and inst.k <= 6 for inst in corpus[:N_RANDOM])
    assert all(a.cost <= 20 and a.cost.denominator == 1 for i in corpus for a in i.arcs)
    bad = [idx for idx, (inst, res, opt) in enumerate(results)
           if not res.dual_lower_bound <= opt <= res.total_cost <= res.harmonic_bound]
    ok = not bad and elapsed < 60
    report(1, ok, f"{N_RANDOM} random + {N_SETCOVER} set-cover instances, "
                  f"{len(bad)} sandwich violations, {elapsed:.1f}s (< 60s)")
    assert not bad, bad
    assert elapsed < 60


def test_criterion_2_phase_bound(runs):
    results, _ = runs
    phases, bad = 0, []
    for idx, (inst, res, _) in enumerate(results):
        for p in res.certificate.phases:
            phases += 1
            ell_next = p.ell - len(p.absorbed)
            if inst.cost_of(p.added_arcs) > 2 * p.delta * (p.ell - ell_next):
                bad.append((idx, p))
    report(2, not bad, f"{phases} phases checked, {len(bad)} exceed 2*delta*(ell-ell')")
    assert not bad


def test_criterion_3_checked_mode(corpus, runs):
    results, _ = runs
    violations = []
    for idx, (inst, (_, plain, _)) in enumerate(zip(corpus, results)):
        try:
            checked = solve(inst, checked=True)
        except InvariantError as exc:
            violations.append(f"#{idx}: {exc}")
            continue
        if checked != plain:
            violations.append(f"#{idx}: checked run differs from plain run")
    report(3, not violations, f"{len(corpus)} instances solved with every-event checks, "
                              f"{len(violations)} violations")
    assert not violations, violations[:5]


def test_criterion_4_certificates(runs):
    results, _ = runs
    failed = [idx for idx, (inst, res, _) in enumerate(results) if not verify(inst, res).ok]
    rng = random.Random(SEED)
    pool = [(inst, res.certificate) for inst, res, _ in results if res.certificate.phases]
    missed = []
    for trial in range(100):
        inst, cert = rng.choice(pool)
        slot = rng.choice(rational_slots(cert))
        eps = Fraction(rng.choice([-1, 1]), 1000)
        if verify(inst, tamper(cert, slot, eps)).ok:
            missed.append((trial, slot, eps))
    ok = not failed and not missed
    report(4, ok, f"{len(results) - len(failed)}/{len(results)} fresh certificates verify, "
                  f"{100 - len(missed)}/100 tampered certificates rejected")
    assert not failed
    assert not missed, missed


def test_criterion_5_single_terminal():
    insts = list(random_corpus(50, SEED + 5, max_nodes=24, max_terminals=1, max_cost=20))
    assert all(inst.k == 1 for inst in insts)
    bad = [idx for idx, inst in enumerate(insts)
           if solve(inst).total_cost != shortest_dist(inst, {inst.root}, inst.terminals[0])[0]]
    report(5, not bad, f"50 single-terminal instances, {len(bad)} differ from shortest path")
    assert not bad


def test_criterion_6_set_cover_opt():
    systems = list(set_cover_corpus(30, SEED + 6, max_universe=8, max_sets=6))
    bad = [idx for idx, sc in enumerate(systems)
           if exact_opt(from_set_cover(sc)).opt_cost != brute_force_set_cover(sc)]
    report(6, not bad, f"30 set systems, {len(bad)} mismatches against brute-force cover")
    assert not bad


def test_criterion_7_oracle_cross_check():
    rng = random.Random(SEED + 7)
    insts = []
    while len(insts) < 100:
        k, s, m = rng.randint(1, 4), rng.randint(0, 5), rng.randint(4, 14)
        inst = random_quasi_bipartite_m(k, s, m, (0, 20), rng.getrandbits(64))
        if inst.m <= 18:
            insts.append(inst)
    bad = [idx for idx, inst in enumerate(insts)
           if exact_opt(inst).opt_cost != brute_force_opt(inst, m_limit=18).opt_cost]
    report(7, not bad, f"100 instances with m <= 18, {len(bad)} oracle disagreements")
    assert not bad


def test_criterion_8_determinism_and_speed(corpus, runs):
    results, _ = runs
    drift = [idx for idx, (inst, res, _) in enumerate(results[:60]) if solve(inst) != res]
    big = random_quasi_bipartite_m(100, 4899, 50000, (1, 20), seed=42)
    assert (big.n, big.m) == (5000, 50000)
    start = time.perf_counter()
    first = solve(big)
    elapsed = time.perf_counter() - start
    same = solve(big) == first
    ok = not drift and same and elapsed < 30
    report(8, ok, f"repeat runs identical: {not drift and same}; n=5000 m=50000 solved in "
                  f"{elapsed:.1f}s (< 30s), cost {first.total_cost}, {first.phase_count} phases")
    assert not drift and same
    assert elapsed < 30
