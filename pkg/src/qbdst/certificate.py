"""Dual certificates and their stand-alone verifier.

A certificate stores, for every phase, the time each node entered each moat.
Because moats only ever gain nodes, the dual mass a phase puts on arc ``uv``
has the closed form ``sum_i max(0, min(delta, entry_i(u)) - entry_i(v))`` (a
missing entry counts as ``delta``), so feasibility, the dual value and the
cost accounting can all be re-checked from the certificate and the instance
alone. Nothing here imports the solver or the moat engine.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .instance import reachable_from
from .report import Report

VERSION = 1


@dataclass(frozen=True)
class PhaseRecord:
    ell: int
    delta: Fraction
    heads: tuple
    entry_times: tuple  # per head: {node: entry time}
    tight_arc: int
    body_index: int
    absorbed: tuple
    added_arcs: tuple
    merge_arcs: tuple = ()


@dataclass(frozen=True)
class DualCertificate:
    instance_digest: str
    k: int
    initial_merge_arcs: tuple
    phases: tuple
    solution_arcs: tuple
    claimed_cost: Fraction
    lower_bound: Fraction
    bound: Fraction


def dual_lower_bound(cert):
    """Largest phase dual value ``ell * delta``; 0 without phases."""
    return max((p.ell * p.delta for p in cert.phases), default=Fraction(0))


def _harmonic(k):
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def _phase_loads(inst, phase):
    """Closed-form dual mass per arc for one phase (arcs with zero mass omitted)."""
    delta = phase.delta
    loads = {}
    for members in phase.entry_times:
        for v, ev in members.items():
            if ev >= delta:
                continue
            for e in inst.in_arcs[v]:
                eu = members.get(inst.arcs[e].tail, delta)
                top = min(eu, delta)
                if top > ev:
                    loads[e] = loads.get(e, Fraction(0)) + (top - ev)
    return loads


def _growth_witnessed(inst, head, members):
    """Members not justified by a chain of tight arcs back to the head."""
    if members.get(head) != 0:
        return set(members)
    ok = {head}
    queue = deque([head])
    while queue:
        y = queue.popleft()
        for e in inst.in_arcs[y]:
            a = inst.arcs[e]
            x = a.tail
            if x in members and x not in ok and members[x] == members[y] + a.cost:
                ok.add(x)
                queue.append(x)
    return set(members) - ok


def _structure_problems(inst, cert):
    m, n = inst.m, inst.n
    problems = []

    def arcs_ok(ids, what):
        if any(not 0 <= e < m for e in ids):
            problems.append(f"{what}: arc id out of range")

    arcs_ok(cert.initial_merge_arcs, "initial merge")
    arcs_ok(cert.solution_arcs, "solution")
    for p, ph in enumerate(cert.phases):
        arcs_ok(ph.added_arcs, f"phase {p} added")
        arcs_ok(ph.merge_arcs, f"phase {p} merge")
        arcs_ok([ph.tight_arc], f"phase {p} tight arc")
        if len(ph.heads) != len(ph.entry_times):
            problems.append(f"phase {p}: heads and entry maps differ in length")
        for members in ph.entry_times:
            if any(not 0 <= v < n for v in members):
                problems.append(f"phase {p}: node id out of range")
        if any(not 0 <= h < n for h in ph.heads):
            problems.append(f"phase {p}: head out of range")
    return problems


def verify(inst, cert):
    """Check a certificate (or a SolveResult carrying one) against ``inst``."""
    cert = getattr(cert, "certificate", cert)
    report = Report()
    same = cert.instance_digest == inst.digest() and cert.k == inst.k
    report.add("instance", same, "" if same else "certificate was issued for another instance")
    problems = _structure_problems(inst, cert)
    report.add("structure", not problems, "; ".join(problems))
    if problems:
        return report
    arcs = inst.arcs

    # (a) every phase's dual is feasible, and its terminating arc is exactly tight
    over, loose, bad_times = [], [], []
    for p, ph in enumerate(cert.phases):
        for i, members in enumerate(ph.entry_times, start=1):
            if any(t < 0 or t > ph.delta for t in members.values()):
                bad_times.append(f"phase {p} moat {i}")
        loads = _phase_loads(inst, ph)
        over += [f"phase {p} arc {e + 1}: {load} > {arcs[e].cost}"
                 for e, load in sorted(loads.items()) if load > arcs[e].cost]
        tight = loads.get(ph.tight_arc, Fraction(0))
        if tight != arcs[ph.tight_arc].cost:
            loose.append(f"phase {p}: arc {ph.tight_arc + 1} carries {tight}, "
                         f"costs {arcs[ph.tight_arc].cost}")
    report.add("dual_feasibility", not over and not bad_times, "; ".join(bad_times + over))
    report.add("tight_arc", not loose, "; ".join(loose))

    unjustified = []
    for p, ph in enumerate(cert.phases):
        for i, (h, members) in enumerate(zip(ph.heads, ph.entry_times), start=1):
            stray = _growth_witnessed(inst, h, members)
            if stray:
                unjustified.append(f"phase {p} moat {i}: "
                                   + ", ".join(str(v + 1) for v in sorted(stray)))
    report.add("moat_growth", not unjustified, "; ".join(unjustified))

    # (b) no dual variable on a set containing the root
    rooted = [f"phase {p}" for p, ph in enumerate(cert.phases)
              if any(inst.root in members for members in ph.entry_times)]
    report.add("root_excluded", not rooted, ", ".join(rooted))

    # (c) phase dual value is ell * delta over ell distinct terminal heads
    value_problems = []
    for p, ph in enumerate(cert.phases):
        heads = ph.heads
        if len(heads) != ph.ell or len(set(heads)) != ph.ell:
            value_problems.append(f"phase {p}: {len(heads)} heads for ell={ph.ell}")
        if any(h not in inst.terminal_set for h in heads):
            value_problems.append(f"phase {p}: a head is not a terminal")
        value = sum((ph.delta - members.get(h, ph.delta)
                     for h, members in zip(heads, ph.entry_times)), Fraction(0))
        if value != ph.ell * ph.delta or ph.delta < 0:
            value_problems.append(f"phase {p}: dual value {value} != {ph.ell}*{ph.delta}")
    report.add("dual_value", not value_problems, "; ".join(value_problems))

    # (d) per-phase purchase cost and the shrinking component count
    cost_problems = []
    bought = set(cert.initial_merge_arcs)
    zero_problems = [e for e in cert.initial_merge_arcs if arcs[e].cost != 0]
    ell_prev = cert.k
    for p, ph in enumerate(cert.phases):
        J = set(ph.absorbed)
        ell_next = ph.ell - len(J)
        if not J or not J <= set(range(1, ph.ell + 1)) or len(J) != len(ph.absorbed):
            cost_problems.append(f"phase {p}: bad absorbed set")
        if not 0 <= ph.body_index <= ph.ell or ph.body_index in J:
            cost_problems.append(f"phase {p}: bad body index")
        if ph.ell < 1 or ph.ell > ell_prev:
            cost_problems.append(f"phase {p}: ell={ph.ell} after {ell_prev}")
        if ph.tight_arc not in ph.added_arcs:
            cost_problems.append(f"phase {p}: terminating arc not bought")
        if bought & set(ph.added_arcs):
            cost_problems.append(f"phase {p}: re-buys arcs")
        added = sum((arcs[e].cost for e in set(ph.added_arcs)), Fraction(0))
        limit = 2 * ph.delta * (ph.ell - ell_next)
        if added > limit:
            cost_problems.append(f"phase {p}: bought {added} > 2*delta*(ell-ell') = {limit}")
        bought |= set(ph.added_arcs)
        zero_problems += [e for e in ph.merge_arcs if arcs[e].cost != 0]
        bought |= set(ph.merge_arcs)
        ell_prev = ell_next
    if zero_problems:
        cost_problems.append("merge arcs with positive cost: "
                             + ", ".join(str(e + 1) for e in sorted(set(zero_problems))))
    report.add("phase_cost", not cost_problems, "; ".join(cost_problems))

    # bookkeeping: arcs, cost and the reported bounds recomputed from scratch
    acct = []
    if bought != set(cert.solution_arcs):
        acct.append("solution arcs differ from the arcs bought across phases")
    true_cost = inst.cost_of(set(cert.solution_arcs))
    if true_cost != cert.claimed_cost:
        acct.append(f"claimed cost {cert.claimed_cost} != recomputed {true_cost}")
    lb = dual_lower_bound(cert)
    bound = 2 * _harmonic(inst.k) * lb
    if cert.lower_bound != lb:
        acct.append(f"claimed lower bound {cert.lower_bound} != {lb}")
    if cert.bound != bound:
        acct.append(f"claimed bound {cert.bound} != {bound}")
    report.add("accounting", not acct, "; ".join(acct))

    # (e) the solution connects the root to every terminal
    seen = reachable_from(inst, [inst.root], set(cert.solution_arcs))
    lost = [t for t in inst.terminals if t not in seen]
    report.add("feasibility", not lost,
               ", ".join(f"terminal {t + 1} unreachable" for t in lost))

    # (f) the approximation guarantee against the certified lower bound
    report.add("ratio", true_cost <= bound and cert.claimed_cost <= bound,
               f"cost {true_cost} vs 2*H_k*LB {bound}")
    return report


# -- JSON ----------------------------------------------------------------------

def _q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _unq(s):
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    return Fraction(s)


def to_json(cert):
    """Plain-JSON form: rationals as ``"num/den"``, node and arc ids 1-based."""
    ids = lambda xs: [e + 1 for e in xs]  # noqa: E731
    return {
        "version": VERSION,
        "instance_digest": cert.instance_digest,
        "k": cert.k,
        "initial_merge_arcs": ids(cert.initial_merge_arcs),
        "phases": [
            {
                "ell": ph.ell,
                "delta": _q(ph.delta),
                "heads": ids(ph.heads),
                "entry_times": [{str(v + 1): _q(t) for v, t in sorted(m.items())}
                                for m in ph.entry_times],
                "tight_arc": ph.tight_arc + 1,
                "body_index": ph.body_index,
                "absorbed": list(ph.absorbed),
                "added_arcs": ids(ph.added_arcs),
                "merge_arcs": ids(ph.merge_arcs),
            }
            for ph in cert.phases
        ],
        "solution_arcs": ids(cert.solution_arcs),
        "claimed_cost": _q(cert.claimed_cost),
        "lower_bound": _q(cert.lower_bound),
        "bound": _q(cert.bound),
    }


def from_json(data):
    if data.get("version") != VERSION:
        raise ValueError(f"unsupported certificate version {data.get('version')!r}")
    ids = lambda xs: tuple(int(e) - 1 for e in xs)  # noqa: E731
    phases = tuple(
        PhaseRecord(
            ell=int(ph["ell"]),
            delta=_unq(ph["delta"]),
            heads=ids(ph["heads"]),
            entry_times=tuple({int(v) - 1: _unq(t) for v, t in m.items()}
                              for m in ph["entry_times"]),
            tight_arc=int(ph["tight_arc"]) - 1,
            body_index=int(ph["body_index"]),
            absorbed=tuple(int(i) for i in ph["absorbed"]),
            added_arcs=ids(ph["added_arcs"]),
            merge_arcs=ids(ph.get("merge_arcs", ())),
        )
        for ph in data["phases"]
    )
    return DualCertificate(
        instance_digest=str(data["instance_digest"]),
        k=int(data["k"]),
        initial_merge_arcs=ids(data["initial_merge_arcs"]),
        phases=phases,
        solution_arcs=ids(data["solution_arcs"]),
        claimed_cost=_unq(data["claimed_cost"]),
        lower_bound=_unq(data["lower_bound"]),
        bound=_unq(data["bound"]),
    )


def dumps(cert):
    return json.dumps(to_json(cert), indent=1)


def loads(text):
    return from_json(json.loads(text))
