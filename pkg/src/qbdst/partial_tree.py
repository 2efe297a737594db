"""Partial Steiner trees: head-rooted components plus free Steiner nodes.

Component 0 is the root component; components ``1..ell`` are the non-root
components, each headed by a terminal. All operations return new values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractError, InvariantError
from .instance import dijkstra, reachable_from, zero_bfs
from .report import Report


@dataclass(frozen=True)
class Component:
    nodes: frozenset
    head: int
    edges: frozenset = frozenset()


@dataclass(frozen=True)
class PartialSteinerTree:
    root: Component
    nonroot: tuple
    free: frozenset

    @property
    def ell(self):
        return len(self.nonroot)

    @property
    def components(self):
        """Root component first, then the non-root components in order."""
        return (self.root,) + self.nonroot

    @property
    def heads(self):
        return tuple(c.head for c in self.nonroot)

    def edges(self):
        out = set()
        for c in self.components:
            out |= c.edges
        return frozenset(out)

    def owner(self):
        """Map node -> component index (0 = root); free nodes are absent."""
        own = {}
        for i, c in enumerate(self.components):
            for v in c.nodes:
                own[v] = i
        return own

    def replace(self, index, comp):
        if index == 0:
            return PartialSteinerTree(comp, self.nonroot, self.free)
        nonroot = list(self.nonroot)
        nonroot[index - 1] = comp
        return PartialSteinerTree(self.root, tuple(nonroot), self.free)


def init_partial_tree(inst):
    root = Component(frozenset([inst.root]), inst.root)
    nonroot = tuple(Component(frozenset([t]), t) for t in inst.terminals)
    return PartialSteinerTree(root, nonroot, frozenset(inst.steiner_nodes))


def tree_cost(inst, pst):
    return inst.cost_of(pst.edges())


def _unreached(inst, comp):
    """Members of ``comp`` not reachable from its head through its own edges."""
    seen = reachable_from(inst, [comp.head], comp.edges)
    return sorted(comp.nodes - seen)


def check_partial_tree(inst, pst):
    """Check the four defining properties; the report lists every violation."""
    report = Report()
    counted = {}
    overlap = set()
    for c in pst.components:
        for v in c.nodes:
            if v in counted:
                overlap.add(v)
            counted[v] = counted.get(v, 0) + 1
    for v in pst.free:
        if v in counted:
            overlap.add(v)
        counted[v] = counted.get(v, 0) + 1
    missing = [v for v in range(inst.n) if v not in counted]
    report.add("partition", not overlap and not missing and len(counted) == inst.n,
               "; ".join(filter(None, [
                   overlap and "overlapping: " + _fmt(overlap),
                   missing and "uncovered: " + _fmt(missing)])))

    non_steiner = [v for v in pst.free if not inst.is_steiner(v)]
    report.add("free_are_steiner", not non_steiner, _fmt(non_steiner))

    head_problems = []
    if pst.root.head != inst.root:
        head_problems.append("root component head is not the root")
    for i, c in enumerate(pst.components):
        if c.head not in c.nodes:
            head_problems.append(f"component {i} head {c.head + 1} not in its node set")
        if i > 0 and c.head not in inst.terminal_set:
            head_problems.append(f"component {i} head {c.head + 1} is not a terminal")
    report.add("heads", not head_problems, "; ".join(head_problems))

    reach_problems = []
    for i, c in enumerate(pst.components):
        stray = [e for e in c.edges
                 if inst.arcs[e].tail not in c.nodes or inst.arcs[e].head not in c.nodes]
        if stray:
            reach_problems.append(f"component {i} has arcs leaving it: "
                                  + ", ".join(str(e + 1) for e in sorted(stray)))
        lost = _unreached(inst, c)
        if lost:
            reach_problems.append(f"component {i}: nodes {_fmt(lost)} unreachable from head")
    report.add("head_reachability", not reach_problems, "; ".join(reach_problems))
    return report


def _fmt(nodes):
    return ", ".join(str(v + 1) for v in sorted(nodes))


def merge_components(pst, into, other, path_arcs, inst):
    """Merge component ``other`` into ``into`` using ``path_arcs`` (which lead from
    ``into`` to the head of ``other``). Free nodes on the path leave the free set."""
    if other == 0:
        raise ContractError("the root component can never be absorbed")
    a, b = pst.components[into], pst.components[other]
    on_path = {inst.arcs[e].tail for e in path_arcs} | {inst.arcs[e].head for e in path_arcs}
    merged = Component(a.nodes | b.nodes | (on_path & pst.free), a.head,
                       a.edges | b.edges | frozenset(path_arcs))
    pst = pst.replace(into, merged)
    nonroot = tuple(c for i, c in enumerate(pst.nonroot, start=1) if i != other)
    return PartialSteinerTree(pst.root, nonroot, pst.free - on_path)


def _zero_merge_step(inst, pst):
    """Find and apply one zero-cost merge, or return None at the fixpoint."""
    owner = pst.owner()
    head_index = {c.head: i for i, c in enumerate(pst.nonroot, start=1)}
    for i, comp in enumerate(pst.components):
        dist, pred = zero_bfs(inst, comp.nodes)
        reached = sorted(head_index[v] for v in dist
                         if v in head_index and head_index[v] != i)
        if not reached:
            continue
        j = reached[0]
        # walk back from h_j; cut at the last node owned by a third component
        path = []
        v = pst.nonroot[j - 1].head
        while v not in comp.nodes:
            e = pred[v]
            tail = inst.arcs[e].tail
            path.append(e)
            if owner.get(tail, j) != j:
                break
            v = tail
        into = owner[inst.arcs[path[-1]].tail]
        path.reverse()
        return merge_components(pst, into, j, path, inst)
    return None


def zero_cost_closure(inst, pst):
    """Merge components joined by 0-cost paths until ``d(B_i, h_j) > 0`` for all
    ``i != j`` with ``j`` non-root. Cost is unchanged."""
    while True:
        nxt = _zero_merge_step(inst, pst)
        if nxt is None:
            return pst
        pst = nxt


def extract_solution(inst, pst, prune=False):
    """Arc set of a tree with no non-root components.

    With ``prune=True`` a shortest-path arborescence inside the solution is
    returned instead, keeping only arcs on root-to-terminal paths.
    """
    if pst.ell:
        raise ContractError(f"tree still has {pst.ell} non-root components")
    arcs = pst.edges()
    seen = reachable_from(inst, [inst.root], arcs)
    lost = [t for t in inst.terminals if t not in seen]
    if lost:
        raise InvariantError(f"terminals {_fmt(lost)} unreachable in the extracted solution")
    if not prune:
        return arcs
    return _prune(inst, arcs)


def _prune(inst, arcs):
    sub = _Restricted(inst, arcs)
    _, pred = dijkstra(sub, [inst.root])
    keep = set()
    for t in inst.terminals:
        v = t
        while v != inst.root and pred[v] not in keep:
            keep.add(pred[v])
            v = inst.arcs[pred[v]].tail
    return frozenset(keep)


class _Restricted:
    """Adjacency view of an instance limited to a subset of arcs."""

    def __init__(self, inst, arc_ids):
        self.arcs = inst.arcs
        out = [[] for _ in range(inst.n)]
        inc = [[] for _ in range(inst.n)]
        for e in sorted(arc_ids):
            out[inst.arcs[e].tail].append(e)
            inc[inst.arcs[e].head].append(e)
        self.out_arcs, self.in_arcs = out, inc


def zero_cost_gaps(inst, pst):
    """Pairs ``(i, j)`` that still have ``d(B_i, h_j) == 0``; empty after closure."""
    bad = []
    for i, comp in enumerate(pst.components):
        dist, _ = zero_bfs(inst, comp.nodes)
        for j, other in enumerate(pst.nonroot, start=1):
            if j != i and other.head in dist:
                bad.append((i, j))
    return bad

