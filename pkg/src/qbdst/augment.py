"""Turn a terminated phase into a partial tree with fewer non-root components."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantError
from .partial_tree import Component, PartialSteinerTree
from .instance import reachable_from


@dataclass(frozen=True)
class AugmentPlan:
    """Arcs to buy for one merge.

    ``paths[i]`` is the tight-arc path from the tight arc's head to head
    ``h_i`` for every absorbed moat ``i``, with slack ``slack[i] = delta -
    cost(paths[i])``. ``body_path`` is empty or the single mate arc ``w -> u``;
    ``body_slack = delta - cost(body_path)``.
    """

    paths: dict
    slack: dict
    body_path: tuple
    body_slack: Fraction
    tight_arc: int
    body_index: int
    merged_head: int


def build_plan(inst, pst, outcome):
    e = outcome.tight_arc
    u, v = inst.arcs[e].tail, inst.arcs[e].head
    j = outcome.body_index
    delta = outcome.stop_time
    moats = outcome.moats
    if u in pst.components[j].nodes:
        body_path = ()
    elif moats.virtual.get(u) == j:
        body_path = (moats.mate[u],)
    else:
        raise InvariantError(f"tail {u + 1} of the terminating arc is in no virtual body")
    paths, slack = {}, {}
    for i in outcome.absorbing_set:
        parent = moats.parent[i - 1]
        head = outcome.heads[i - 1]
        path, x = [], v
        while x != head:
            a = parent[x]
            path.append(a)
            x = inst.arcs[a].head
        paths[i] = tuple(path)
        slack[i] = delta - inst.cost_of(path)
    body_slack = delta - inst.cost_of(body_path)
    merged_head = pst.components[j].head
    return AugmentPlan(paths, slack, body_path, body_slack, e, j, merged_head)


def check_plan(inst, plan, outcome):
    """Return a list of failed path-cost / slack conditions (empty when sound)."""
    problems = []
    delta = outcome.stop_time
    entry = outcome.moats.entry
    v = inst.arcs[plan.tight_arc].head
    for i, path in plan.paths.items():
        if inst.cost_of(path) != entry[i - 1][v]:
            problems.append(f"path to moat {i} costs more than the head's entry time")
        if plan.slack[i] < 0:
            problems.append(f"negative slack for moat {i}")
    if plan.body_slack < 0:
        problems.append("mate arc costs more than delta")
    total = plan.body_slack + sum(plan.slack.values(), Fraction(0))
    if total < inst.arcs[plan.tight_arc].cost:
        problems.append(f"slacks sum to {total}, below the tight arc's cost")
    return problems


def build_augmented_tree(inst, pst, plan, outcome):
    j = plan.body_index
    group = (j,) + tuple(outcome.absorbing_set)
    nodes, edges = set(), set()
    used = set(plan.body_path) | {plan.tight_arc}
    for path in plan.paths.values():
        used |= set(path)
    for i in group:
        nodes |= pst.components[i].nodes
        edges |= pst.components[i].edges
    edges |= used
    for a in used:
        nodes.add(inst.arcs[a].tail)
        nodes.add(inst.arcs[a].head)
    merged = Component(frozenset(nodes), plan.merged_head, frozenset(edges))

    stray = nodes - pst.free
    for i in group:
        stray -= pst.components[i].nodes
    if stray:
        raise InvariantError("merge would steal nodes "
                             + ", ".join(str(x + 1) for x in sorted(stray))
                             + " from untouched components")
    lost = merged.nodes - reachable_from(inst, [merged.head], merged.edges)
    if lost:
        raise InvariantError("merged component has nodes unreachable from its head: "
                             + ", ".join(str(x + 1) for x in sorted(lost)))

    absorbed = set(outcome.absorbing_set)
    if j == 0:
        root = merged
        nonroot = tuple(c for i, c in enumerate(pst.nonroot, start=1) if i not in absorbed)
    else:
        root = pst.root
        nonroot = tuple(merged if i == j else c
                        for i, c in enumerate(pst.nonroot, start=1) if i not in absorbed)
    return PartialSteinerTree(root, nonroot, pst.free - nodes)
