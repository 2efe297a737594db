"""Driver: repeat zero-cost closure, one dual growing phase and a merge until
every terminal hangs off the root component."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .augment import build_augmented_tree, build_plan, check_plan
from .certificate import DualCertificate, PhaseRecord
from .errors import InfeasibleInstanceError, InstanceError, InvariantError
from .instance import validate
from .moat import run_phase
from .partial_tree import (check_partial_tree, extract_solution, init_partial_tree,
                           tree_cost, zero_cost_closure, zero_cost_gaps)


def harmonic(k):
    """Exact ``H_k = 1 + 1/2 + ... + 1/k``; ``H_0 = 0``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


@dataclass(frozen=True)
class SolveResult:
    solution_arcs: tuple
    total_cost: Fraction
    dual_lower_bound: Fraction
    harmonic_bound: Fraction
    certificate: DualCertificate
    phase_count: int


@dataclass(frozen=True)
class PhaseStep:
    """Everything one phase touched; yielded by :func:`iterate_phases`."""

    index: int
    before: object
    outcome: object
    plan: object
    merged: object
    after: object


def _require_valid(inst):
    report = validate(inst)
    if report.ok:
        return
    bad = report.failures[0]
    if bad.name == "reachability":
        lost = [t for t in inst.terminals
                if f"terminal {t + 1} unreachable" in bad.detail]
        raise InfeasibleInstanceError(bad.detail, lost)
    kind = "quasi_bipartite_violation" if bad.name == "quasi_bipartite" else "negative_cost"
    raise InstanceError(f"{bad.name}: {bad.detail}", kind=kind)


def _check_tree(inst, pst, phase):
    report = check_partial_tree(inst, pst)
    if not report.ok:
        raise InvariantError("; ".join(f"{c.name}: {c.detail}" for c in report.failures),
                             phase=phase)


def iterate_phases(inst, start, checked=False):
    """Run phases from the closed partial tree ``start`` until no non-root
    component is left, yielding a :class:`PhaseStep` per phase."""
    pst = start
    index = 0
    while pst.ell:
        try:
            outcome = run_phase(inst, pst, checked=checked)
        except InvariantError as exc:
            raise InvariantError(str(exc), phase=index) from exc
        plan = build_plan(inst, pst, outcome)
        problems = check_plan(inst, plan, outcome)
        if problems:
            raise InvariantError("; ".join(problems), phase=index)
        merged = build_augmented_tree(inst, pst, plan, outcome)
        after = zero_cost_closure(inst, merged)
        if checked:
            _check_tree(inst, merged, index)
            _check_tree(inst, after, index)
            if zero_cost_gaps(inst, after):
                raise InvariantError("zero-cost closure left a 0-distance pair", phase=index)
        yield PhaseStep(index, pst, outcome, plan, merged, after)
        pst = after
        index += 1


def solve(inst, checked=False):
    _require_valid(inst)
    k = inst.k
    initial = init_partial_tree(inst)
    pst = zero_cost_closure(inst, initial)
    if checked:
        _check_tree(inst, pst, None)
    initial_merge = tuple(sorted(pst.edges() - initial.edges()))

    records = []
    charged = Fraction(0)
    prev_cost = tree_cost(inst, pst)
    for step in iterate_phases(inst, pst, checked):
        out = step.outcome
        ell, ell_next = out.ell, step.merged.ell
        added = step.merged.edges() - step.before.edges()
        new_cost = tree_cost(inst, step.merged)
        if new_cost - prev_cost != inst.cost_of(added):
            raise InvariantError("tree cost bookkeeping mismatch", phase=step.index)
        if new_cost - prev_cost > (ell - ell_next + 1) * out.stop_time:
            raise InvariantError("merge cost exceeds (|J|+1)*delta", phase=step.index)
        if new_cost - prev_cost > 2 * out.stop_time * (ell - ell_next):
            raise InvariantError("merge cost exceeds 2*delta*(ell-ell')", phase=step.index)
        charged += 2 * out.stop_time * (ell - ell_next)
        merge = step.after.edges() - step.merged.edges()
        records.append(PhaseRecord(
            ell=ell,
            delta=out.stop_time,
            heads=out.heads,
            entry_times=out.moats.entry,
            tight_arc=out.tight_arc,
            body_index=out.body_index,
            absorbed=out.absorbing_set,
            added_arcs=tuple(sorted(added)),
            merge_arcs=tuple(sorted(merge)),
        ))
        prev_cost = tree_cost(inst, step.after)
        pst = step.after

    arcs = tuple(sorted(extract_solution(inst, pst)))
    total = inst.cost_of(arcs)
    lb = max((r.ell * r.delta for r in records), default=Fraction(0))
    bound = 2 * harmonic(k) * lb
    if charged > bound:
        raise InvariantError(f"telescoping sum {charged} exceeds 2*H_k*LB = {bound}")
    if total > bound:
        raise InvariantError(f"cost {total} exceeds 2*H_k*LB = {bound}")
    cert = DualCertificate(
        instance_digest=inst.digest(),
        k=k,
        initial_merge_arcs=initial_merge,
        phases=tuple(records),
        solution_arcs=arcs,
        claimed_cost=total,
        lower_bound=lb,
        bound=bound,
    )
    return SolveResult(arcs, total, lb, bound, cert, len(records))
