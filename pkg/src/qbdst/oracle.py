"""Exact optima for small instances, used as ground truth by the tests."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InfeasibleInstanceError, InvariantError, LimitError
from .instance import reachable_from


@dataclass(frozen=True)
class ExactResult:
    opt_cost: Fraction
    opt_arcs: frozenset


def _scaled_costs(costs):
    """Integer costs and the common scale factor (exact)."""
    scale = 1
    for c in costs:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    return [int(c * scale) for c in costs], scale


def exact_opt(inst, k_limit=12):
    """Terminal-subset dynamic program.

    ``f(T, v)`` is the cheapest arborescence rooted at ``v`` that reaches all of
    ``T``. Each layer first combines splits of ``T`` at a common node, then
    relaxes along graph distances with a reverse Dijkstra pass.
    """
    k = inst.k
    if k > k_limit:
        raise LimitError(f"{k} terminals exceeds the limit of {k_limit}")
    if k == 0:
        return ExactResult(Fraction(0), frozenset())
    w, scale = _scaled_costs([a.cost for a in inst.arcs])
    n, arcs = inst.n, inst.arcs
    inf = float("inf")
    full = (1 << k) - 1
    f = [None] * (full + 1)
    how = [None] * (full + 1)  # per node: ('leaf',) | ('split', sub) | ('arc', e)
    for mask in sorted(range(1, full + 1), key=lambda s: (bin(s).count("1"), s)):
        g = [inf] * n
        choice = [None] * n
        if mask & (mask - 1) == 0:
            t = inst.terminals[mask.bit_length() - 1]
            g[t] = 0
            choice[t] = ("leaf",)
        else:
            low = mask & -mask
            sub = (mask - 1) & mask
            while sub:
                if sub & low:  # each unordered split once
                    fa, fb = f[sub], f[mask ^ sub]
                    for v in range(n):
                        s = fa[v] + fb[v]
                        if s < g[v]:
                            g[v] = s
                            choice[v] = ("split", sub)
                sub = (sub - 1) & mask
        dist = [inf] * n
        heap = [(g[v], v, -1) for v in range(n) if g[v] < inf]
        heapq.heapify(heap)
        while heap:
            d, x, via = heapq.heappop(heap)
            if dist[x] < inf:
                continue
            dist[x] = d
            if via >= 0:
                choice[x] = ("arc", via)
            for e in inst.in_arcs[x]:
                y = arcs[e].tail
                if dist[y] == inf:
                    heapq.heappush(heap, (d + w[e], y, e))
        f[mask], how[mask] = dist, choice
    best = f[full][inst.root]
    if best == inf:
        raise InfeasibleInstanceError("some terminal is unreachable from the root")
    chosen = set()
    stack = [(full, inst.root)]
    while stack:
        mask, v = stack.pop()
        c = how[mask][v]
        if c[0] == "split":
            stack += [(c[1], v), (mask ^ c[1], v)]
        elif c[0] == "arc":
            chosen.add(c[1])
            stack.append((mask, arcs[c[1]].head))
    opt = Fraction(best, scale)
    got = inst.cost_of(chosen)
    if got != opt:
        raise InvariantError(f"reconstructed tree costs {got}, DP value is {opt}")
    return ExactResult(opt, frozenset(chosen))


def brute_force_opt(inst, m_limit=20):
    """Cheapest feasible arc subset by exhaustive enumeration of all ``2^m``."""
    m, n = inst.m, inst.n
    if m > m_limit:
        raise LimitError(f"{m} arcs exceeds the limit of {m_limit}")
    if n > 62:
        raise LimitError("brute force supports at most 62 nodes")
    w, scale = _scaled_costs([a.cost for a in inst.arcs])
    if sum(w) >= 2 ** 62:
        raise LimitError("scaled costs overflow 64-bit integers")
    masks = np.arange(1 << m, dtype=np.int64)
    chosen = [((masks >> e) & 1).astype(bool) for e in range(m)]
    reach = np.full(masks.shape, 1 << inst.root, dtype=np.int64)
    while True:
        before = reach.copy()
        for e, a in enumerate(inst.arcs):
            hit = chosen[e] & (((reach >> a.tail) & 1) == 1)
            reach |= np.where(hit, np.int64(1 << a.head), np.int64(0))
        if np.array_equal(before, reach):
            break
    need = 0
    for t in inst.terminals:
        need |= 1 << t
    feasible = (reach & need) == need
    if not feasible.any():
        raise InfeasibleInstanceError("some terminal is unreachable from the root")
    cost = np.zeros(masks.shape, dtype=np.int64)
    for e in range(m):
        cost += np.where(chosen[e], np.int64(w[e]), np.int64(0))
    cost = np.where(feasible, cost, np.int64(2 ** 62))
    best = int(np.argmin(cost))
    arcs = frozenset(e for e in range(m) if best >> e & 1)
    assert reachable_from(inst, [inst.root], arcs) >= inst.terminal_set
    return ExactResult(Fraction(int(cost[best]), scale), arcs)


def brute_force_set_cover(sc):
    """Cheapest sub-family of ``sc.sets`` covering the universe."""
    universe = frozenset(range(sc.universe_size))
    best = None
    sets = sc.sets
    for mask in range(1 << len(sets)):
        covered = set()
        cost = Fraction(0)
        for i, (elems, c) in enumerate(sets):
            if mask >> i & 1:
                covered |= elems
                cost += c
        if covered >= universe and (best is None or cost < best):
            best = cost
    if best is None:
        raise InfeasibleInstanceError("set system does not cover its universe")
    return best
