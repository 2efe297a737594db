"""The dual growing procedure.

``ell`` moats, one around each non-root head, grow simultaneously in exact
rational time. Arc ``uv`` is paid at a rate equal to the number of moats it
enters, and the next event is the earliest arc whose payment reaches its cost
(ties by arc index). A tight arc either terminates the phase (its tail lies in
some virtual body ``beta_j`` and its head in a moat other than ``j``) or its
tail is absorbed into the single moat the arc enters.

Moat ``i`` (1-based) belongs to ``pst.nonroot[i - 1]``; body index 0 is the
root component, which never grows a moat.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .errors import ContractError, InvariantError
from .instance import dijkstra, zero_bfs

_ZERO = Fraction(0)


@dataclass(frozen=True)
class MoatState:
    """Snapshot of the moats and virtual bodies.

    ``entry[i - 1]`` maps each member of moat ``i`` to the time it entered;
    ``parent[i - 1]`` maps each non-head member to its tight arc toward the
    head. ``virtual`` maps each virtual node (in ``beta_i - B_i``) to ``i`` and
    ``mate`` maps it to the arc from its mate.
    """

    entry: tuple
    parent: tuple
    virtual: dict
    mate: dict


@dataclass(frozen=True)
class PhaseOutcome:
    stop_time: Fraction
    tight_arc: int
    body_index: int
    absorbing_set: tuple
    moats: MoatState
    ell: int
    heads: tuple
    events: int = 0


class _Engine:
    def __init__(self, inst, pst, checked=False):
        if pst.ell == 0:
            raise ContractError("run_phase needs at least one non-root component")
        self.inst = inst
        self.pst = pst
        self.ell = pst.ell
        self.heads = pst.heads
        self.checked = checked
        self.body_of = pst.owner()  # real bodies; virtual nodes added as absorbed
        self.components = pst.components
        self.virtual = {}
        self.mate = {}
        self.entry = [dict() for _ in range(self.ell)]
        self.parent = [dict() for _ in range(self.ell)]
        self.moats_of = {}  # node -> list of moat indices (1-based) containing it
        # per-arc payment bookkeeping: load, amount paid, time of last settlement
        m = inst.m
        self.cost = inst.exact_costs
        self.load = [0] * m
        self.paid = [0] * m
        self.since = [0] * m
        self.version = [0] * m
        self.heap = []
        self.now = 0
        self.events = 0

    # -- payment bookkeeping -------------------------------------------------
    def _bump(self, e, delta):
        now = self.now
        load = self.load[e]
        if load:
            self.paid[e] = _norm(self.paid[e] + load * (now - self.since[e]))
        self.since[e] = now
        load += delta
        self.load[e] = load
        self.version[e] += 1
        if load > 0:
            slack = self.cost[e] - self.paid[e]
            heapq.heappush(self.heap, (_norm(now + _div(slack, load)), e, self.version[e]))

    def _join(self, i, x, time, via):
        """Put node ``x`` into moat ``i`` and update the loads it affects."""
        arcs = self.inst.arcs
        members = self.entry[i - 1]
        members[x] = time
        if via is not None:
            self.parent[i - 1][x] = via
        self.moats_of.setdefault(x, []).append(i)
        bump = self._bump
        for e in self.inst.in_arcs[x]:
            if arcs[e].tail not in members:
                bump(e, +1)
        for e in self.inst.out_arcs[x]:
            if arcs[e].head in members:
                bump(e, -1)

    # -- main loop -----------------------------------------------------------
    def initialize(self):
        for i, h in enumerate(self.heads, start=1):
            ball, pred = zero_bfs(self.inst, [h], reverse=True)
            for v in ball:  # BFS order: each parent joins before its children
                self._join(i, v, 0, pred.get(v))

    def run(self):
        self.initialize()
        if self.checked:
            self._setup_checks()
            self._check(None)
        inst = self.inst
        limit = inst.n * self.ell + inst.m
        while self.heap:
            time, e, ver = heapq.heappop(self.heap)
            if ver != self.version[e]:
                continue
            if time < self.now:
                raise InvariantError(f"event at {time} precedes current time {self.now}")
            self.now = time
            self.events += 1
            if self.events > limit:
                raise InvariantError(f"event count exceeded n*ell+m = {limit}")
            u, v = inst.arcs[e].tail, inst.arcs[e].head
            j = self._body(u)
            in_v = self.moats_of.get(v, ())
            if j is not None and any(i != j for i in in_v):
                J = tuple(sorted(i for i in in_v if i != j))
                out = PhaseOutcome(Fraction(self.now), e, j, J, self._snapshot(), self.ell,
                                   self.heads, self.events)
                if self.checked:
                    self._check_termination(out)
                return out
            crossing = [i for i in in_v if u not in self.entry[i - 1]]
            if len(crossing) != 1:
                raise InvariantError(f"tight arc {e + 1} enters {len(crossing)} moats")
            i = crossing[0]
            if self.checked:
                self._check_single_crossing(e, i)
            self._join(i, u, self.now, e)
            if j == i and v not in self.components[i].nodes and v not in self.virtual:
                self.virtual[v] = i
                self.mate[v] = e
            if self.checked:
                self._check(e)
        raise InvariantError("moats stopped growing before any terminating arc went tight")

    def _body(self, x):
        j = self.body_of.get(x)
        if j is None:
            j = self.virtual.get(x)
        return j

    def _snapshot(self):
        return MoatState(tuple({v: Fraction(t) for v, t in d.items()} for d in self.entry),
                         tuple(dict(d) for d in self.parent),
                         dict(self.virtual), dict(self.mate))

    # -- checked mode ----------------------------------------------------------
    def _setup_checks(self):
        self.dist = [dijkstra(self.inst, [h], reverse=True)[0] for h in self.heads]

    def _fail(self, msg):
        raise InvariantError(f"t={self.now}: {msg}")

    def _check_single_crossing(self, e, i):
        """A non-terminating tight arc has only ever been paid by moat i."""
        u, v = self.inst.arcs[e].tail, self.inst.arcs[e].head
        for m in range(1, self.ell + 1):
            if m != i and _contribution(self.entry[m - 1], u, v, self.now) != 0:
                self._fail(f"tight arc {e + 1} was also paid by moat {m}")

    def _check(self, fired):
        inst, t = self.inst, self.now
        arcs = inst.arcs
        for i, h in enumerate(self.heads, start=1):
            members = self.entry[i - 1]
            # head inside, root outside
            if members.get(h) != 0:
                self._fail(f"moat {i} lost its head")
            if inst.root in members:
                self._fail(f"moat {i} contains the root")
            # parent chains, entry = distance to head, everything closer is in
            dist = self.dist[i - 1]
            for x, ent in members.items():
                if ent > t:
                    self._fail(f"node {x + 1} entered moat {i} in the future")
                if ent != dist.get(x):
                    self._fail(f"node {x + 1} entered moat {i} at {ent}, distance {dist.get(x)}")
                if x != h:
                    a = arcs[self.parent[i - 1][x]]
                    if a.tail != x or a.head not in members or \
                            members[a.head] + a.cost != ent:
                        self._fail(f"bad parent arc for node {x + 1} in moat {i}")
            for x, d in dist.items():
                if d < t and x not in members:
                    self._fail(f"node {x + 1} at distance {d} < t missing from moat {i}")
        # moats overlap only on free Steiner nodes and never meet another body
        steiner_ok = inst.is_steiner
        for x, ms in self.moats_of.items():
            if len(ms) > 1 and not (steiner_ok(x) and x in self.pst.free):
                self._fail(f"non-free node {x + 1} in moats {ms}")
            b = self._body(x)
            for i in ms:
                if b is not None and b != i:
                    self._fail(f"moat {i} meets body {b} at node {x + 1}")
        # virtual nodes hang off their body by a paid-for mate arc
        for x, i in self.virtual.items():
            if x not in self.pst.free:
                self._fail(f"virtual node {x + 1} is not free")
            a = arcs[self.mate[x]]
            if a.head != x or self.body_of.get(a.tail) != i or a.cost > t:
                self._fail(f"bad mate for virtual node {x + 1}")
        # dual value, closed-form loads within cost; incremental payments agree
        value = _ZERO
        for i in range(1, self.ell + 1):
            value += t - self.entry[i - 1][self.heads[i - 1]]
        if value != self.ell * t:
            self._fail("dual value differs from ell*t")
        for e, a in enumerate(arcs):
            load = sum(_contribution(m, a.tail, a.head, t) for m in self.entry)
            if load > a.cost:
                self._fail(f"arc {e + 1} overpaid: {load} > {a.cost}")
            inc = self.paid[e] + self.load[e] * (t - self.since[e])
            if inc != load:
                self._fail(f"arc {e + 1} payment {inc} disagrees with closed form {load}")

    def _check_termination(self, out):
        e = out.tight_arc
        a = self.inst.arcs[e]
        load = sum(_contribution(m, a.tail, a.head, self.now) for m in self.entry)
        if load != a.cost:
            self._fail(f"terminating arc {e + 1} is not tight")
        if not out.absorbing_set or out.body_index in out.absorbing_set:
            self._fail("bad absorbing set")
        self._check(None)


def _norm(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def _div(a, b):
    if type(a) is int:
        q, r = divmod(a, b)
        return q if r == 0 else Fraction(a, b)
    return _norm(a / b)


def _contribution(members, u, v, t):
    """Payment moat with ``members`` has made to arc ``uv`` up to time ``t``."""
    ev = members.get(v)
    if ev is None or ev >= t:
        return _ZERO
    eu = members.get(u)
    top = t if eu is None or eu > t else eu
    return top - ev if top > ev else _ZERO


def run_phase(inst, pst, checked=False):
    """Grow moats around the heads of ``pst`` until the first terminating tight arc.

    ``pst`` must already be closed under zero-cost merges. With ``checked`` all
    moat invariants are asserted after every event (slow).
    """
    return _Engine(inst, pst, checked).run()


def reconstruct_moat(outcome, head_index, t):
    """Members of moat ``head_index`` (1-based) at time ``t``."""
    if not 1 <= head_index <= outcome.ell:
        raise KeyError(f"no moat with index {head_index}")
    if not 0 <= t <= outcome.stop_time:
        raise ValueError(f"time {t} outside [0, {outcome.stop_time}]")
    return frozenset(v for v, ent in outcome.moats.entry[head_index - 1].items() if ent <= t)


def edge_dual_load(outcome, arc):
    """Total dual mass on ``arc`` (an :class:`Arc`) over the whole phase."""
    return sum((_contribution(m, arc.tail, arc.head, outcome.stop_time)
                for m in outcome.moats.entry), _ZERO)
