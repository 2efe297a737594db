"""Directed Steiner tree instances: data model, text format, validation and
shortest paths.

Node ids are 0-based internally and 1-based in the text format. All costs are
:class:`fractions.Fraction`; nothing in the package touches floats except the
``INF`` sentinel returned for unreachable targets.
"""

from __future__ import annotations

import hashlib
import heapq
import math
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from .errors import InstanceError, QuasiBipartiteError
from .report import Report

INF = math.inf

ROOT, TERMINAL, STEINER = "root", "terminal", "steiner"

_UNSIGNED = re.compile(r"^(\d+(\.\d+)?|\d+/\d+)$")


class Arc(NamedTuple):
    tail: int
    head: int
    cost: Fraction


def parse_rational(text):
    """Parse an integer, decimal or ``p/q`` literal into an exact Fraction."""
    text = text.strip()
    if text.startswith("-") and _UNSIGNED.match(text[1:]):
        value = Fraction(text)
        if value != 0:
            raise InstanceError(f"negative cost {text!r}", kind="negative_cost")
        return Fraction(0)
    if not _UNSIGNED.match(text):
        raise InstanceError(f"bad numeric literal {text!r}")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise InstanceError(f"zero denominator in {text!r}")
    return Fraction(text)


def format_rational(q):
    """``5`` for integers, ``num/den`` otherwise; ``inf`` for the sentinel."""
    if q == INF:
        return "inf"
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Instance:
    """An immutable DST instance ``(G, c, X, r)``.

    Parallel arcs are allowed and arc order is significant: it is the
    tie-breaking order used by every algorithm downstream.
    """

    n: int
    arcs: tuple
    root: int
    terminals: tuple

    def __post_init__(self):
        arcs = tuple(a if isinstance(a, Arc) else Arc(int(a[0]), int(a[1]), Fraction(a[2]))
                     for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "terminals", tuple(self.terminals))
        if self.n < 1:
            raise InstanceError("instance needs at least one node")
        if not 0 <= self.root < self.n:
            raise InstanceError(f"root {self.root} out of range")
        seen = set()
        for t in self.terminals:
            if not 0 <= t < self.n:
                raise InstanceError(f"terminal {t} out of range")
            if t == self.root:
                raise InstanceError("terminal equals root", kind="terminal_is_root")
            if t in seen:
                raise InstanceError(f"duplicate terminal {t + 1}", kind="duplicate_terminal")
            seen.add(t)
        for idx, a in enumerate(arcs):
            if not (0 <= a.tail < self.n and 0 <= a.head < self.n):
                raise InstanceError(f"arc {idx + 1} has an endpoint out of range")
            if a.tail == a.head:
                raise InstanceError(f"arc {idx + 1} is a self-loop", kind="self_loop")

    @property
    def m(self):
        return len(self.arcs)

    @property
    def k(self):
        return len(self.terminals)

    @cached_property
    def terminal_set(self):
        return frozenset(self.terminals)

    @cached_property
    def roles(self):
        roles = [STEINER] * self.n
        roles[self.root] = ROOT
        for t in self.terminals:
            roles[t] = TERMINAL
        return tuple(roles)

    def is_steiner(self, v):
        return self.roles[v] == STEINER

    @cached_property
    def steiner_nodes(self):
        return tuple(v for v in range(self.n) if self.roles[v] == STEINER)

    @cached_property
    def out_arcs(self):
        out = [[] for _ in range(self.n)]
        for idx, a in enumerate(self.arcs):
            out[a.tail].append(idx)
        return tuple(tuple(x) for x in out)

    @cached_property
    def in_arcs(self):
        inc = [[] for _ in range(self.n)]
        for idx, a in enumerate(self.arcs):
            inc[a.head].append(idx)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def zero_out_arcs(self):
        out = [[] for _ in range(self.n)]
        for idx, a in enumerate(self.arcs):
            if a.cost == 0:
                out[a.tail].append(idx)
        return tuple(tuple(x) for x in out)

    @cached_property
    def zero_in_arcs(self):
        inc = [[] for _ in range(self.n)]
        for idx, a in enumerate(self.arcs):
            if a.cost == 0:
                inc[a.head].append(idx)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def exact_costs(self):
        """Arc costs as ``int`` where integral, else Fraction (faster arithmetic)."""
        return tuple(c.numerator if c.denominator == 1 else c for _, _, c in self.arcs)

    def cost_of(self, arc_ids):
        return sum((self.arcs[e].cost for e in arc_ids), Fraction(0))

    def digest(self):
        """Stable fingerprint of the canonical serialization."""
        return hashlib.sha256(serialize_instance(self).encode("utf-8")).hexdigest()


# -- text format -------------------------------------------------------------

def parse_instance(text):
    """Parse the line-oriented instance format (see README)."""
    n = None
    root = None
    arcs = []
    arc_lines = []
    terminals = []
    term_seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        key = parts[0]
        if n is None and key != "Nodes":
            raise InstanceError("first declaration must be 'Nodes <n>'", line=lineno)
        try:
            if key == "Nodes":
                if n is not None:
                    raise InstanceError("duplicate Nodes declaration", line=lineno)
                _arity(parts, 1, lineno)
                n = _int(parts[1], lineno)
                if n < 1:
                    raise InstanceError("node count must be positive", line=lineno)
            elif key == "A":
                _arity(parts, 3, lineno)
                u, v = _node(parts[1], n, lineno), _node(parts[2], n, lineno)
                if u == v:
                    raise InstanceError("self-loop arc", kind="self_loop", line=lineno)
                arcs.append(Arc(u, v, parse_rational(parts[3])))
                arc_lines.append(lineno)
            elif key == "Root":
                _arity(parts, 1, lineno)
                if root is not None:
                    raise InstanceError("duplicate Root declaration", kind="duplicate_root",
                                        line=lineno)
                root = _node(parts[1], n, lineno)
            elif key == "T":
                _arity(parts, 1, lineno)
                t = _node(parts[1], n, lineno)
                if t in term_seen:
                    raise InstanceError(f"duplicate terminal {t + 1}",
                                        kind="duplicate_terminal", line=lineno)
                term_seen[t] = lineno
                terminals.append(t)
            else:
                raise InstanceError(f"unknown keyword {key!r}", line=lineno)
        except InstanceError as exc:
            if exc.line is None:
                raise InstanceError(str(exc), kind=exc.kind, line=lineno) from None
            raise
    if n is None:
        raise InstanceError("missing 'Nodes' declaration")
    if root is None:
        raise InstanceError("missing 'Root' declaration", kind="missing_root")
    if root in term_seen:
        raise InstanceError("terminal equal to root", kind="terminal_is_root",
                            line=term_seen[root])
    inst = Instance(n, tuple(arcs), root, tuple(terminals))
    for idx, a in enumerate(inst.arcs):
        if inst.is_steiner(a.tail) and inst.is_steiner(a.head):
            raise QuasiBipartiteError(
                f"arc {a.tail + 1}->{a.head + 1} joins two Steiner nodes", line=arc_lines[idx])
    return inst


def _arity(parts, count, lineno):
    if len(parts) != count + 1:
        raise InstanceError(f"'{parts[0]}' expects {count} argument(s)", line=lineno)


def _int(tok, lineno):
    if not tok.isdigit():
        raise InstanceError(f"expected an integer, got {tok!r}", line=lineno)
    return int(tok)


def _node(tok, n, lineno):
    v = _int(tok, lineno)
    if not 1 <= v <= n:
        raise InstanceError(f"node id {v} outside 1..{n}", line=lineno)
    return v - 1


def serialize_instance(inst):
    lines = [f"Nodes {inst.n}"]
    lines += [f"A {a.tail + 1} {a.head + 1} {format_rational(a.cost)}" for a in inst.arcs]
    lines.append(f"Root {inst.root + 1}")
    lines += [f"T {t + 1}" for t in inst.terminals]
    return "\n".join(lines) + "\n"


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- validation --------------------------------------------------------------

def reachable_from(inst, sources, arc_ids=None):
    """Nodes reachable from ``sources`` using only ``arc_ids`` (all arcs if None)."""
    if arc_ids is None:
        adj = inst.out_arcs
    else:
        adj = [[] for _ in range(inst.n)]
        for e in sorted(arc_ids):
            adj[inst.arcs[e].tail].append(e)
    seen = set(sources)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for e in adj[x]:
            y = inst.arcs[e].head
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def validate(inst):
    """Check quasi-bipartiteness, cost signs and terminal reachability."""
    report = Report()
    bad = [i for i, a in enumerate(inst.arcs)
           if inst.is_steiner(a.tail) and inst.is_steiner(a.head)]
    report.add("quasi_bipartite", not bad,
               ", ".join(f"arc {i + 1} ({inst.arcs[i].tail + 1}->{inst.arcs[i].head + 1})"
                         for i in bad))
    neg = [i for i, a in enumerate(inst.arcs) if a.cost < 0]
    report.add("nonnegative_costs", not neg, ", ".join(f"arc {i + 1}" for i in neg))
    seen = reachable_from(inst, [inst.root])
    lost = [t for t in inst.terminals if t not in seen]
    report.add("reachability", not lost,
               ", ".join(f"terminal {t + 1} unreachable from root" for t in lost))
    return report


# -- shortest paths ----------------------------------------------------------

def zero_bfs(inst, sources, reverse=False):
    """Nodes joined to ``sources`` by 0-cost paths, with BFS predecessor arcs.

    The first result is a dict keyed in BFS order (values are hop counts).
    """
    arcs = inst.arcs
    adj = inst.zero_in_arcs if reverse else inst.zero_out_arcs
    pred = {}
    seen = {s: 0 for s in sorted(set(sources))}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for e in adj[x]:
            y = arcs[e].tail if reverse else arcs[e].head
            if y not in seen:
                seen[y] = seen[x] + 1
                pred[y] = e
                queue.append(y)
    return seen, pred


def dijkstra(inst, sources, reverse=False):
    """Multi-source Dijkstra with exact arithmetic.

    Forward mode gives ``d(S, v)`` for every ``v``; reverse mode gives
    ``d(v, S)``. Returns ``(dist, pred)`` where ``pred[v]`` is the arc used to
    reach ``v`` (pointing away from the sources in forward mode, toward them in
    reverse mode).
    """
    arcs = inst.arcs
    adj = inst.in_arcs if reverse else inst.out_arcs
    dist = {}
    pred = {}
    heap = [(Fraction(0), s, -1) for s in sorted(set(sources))]
    heapq.heapify(heap)
    while heap:
        d, x, via = heapq.heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        if via >= 0:
            pred[x] = via
        for e in adj[x]:
            a = arcs[e]
            y = a.tail if reverse else a.head
            if y not in dist:
                heapq.heappush(heap, (d + a.cost, y, e))
    return dist, pred


def shortest_dist(inst, sources, target):
    """Return ``(d(S, target), path)`` with the path as a list of arc ids.

    ``(INF, None)`` when the target is unreachable.
    """
    sources = set(sources)
    if not sources:
        raise ValueError("source set must be non-empty")
    if target in sources:
        return Fraction(0), []
    dist, pred = dijkstra(inst, sources)
    if target not in dist:
        return INF, None
    path = []
    v = target
    while v not in sources:
        e = pred[v]
        path.append(e)
        v = inst.arcs[e].tail
    path.reverse()
    return dist[target], path
