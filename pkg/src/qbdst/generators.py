"""Deterministic instance generators.

Randomness comes from SplitMix64 (Steele, Lea & Flood constants), a 64-bit
generator simple enough to reimplement anywhere, so a ``(params, seed)`` pair
names the same instance in every implementation:

* ``below(n)`` is ``next() % n``;
* ``bernoulli(p)`` is ``next() < p * 2**64`` evaluated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InstanceError
from .instance import Arc, Instance, reachable_from

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & _MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n):
        return self.next() % n

    def between(self, lo, hi):
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def bernoulli(self, p):
        p = Fraction(p)
        return self.next() * p.denominator < p.numerator << 64


@dataclass(frozen=True)
class SetCoverInstance:
    universe_size: int
    sets: tuple  # of (frozenset of element indices, Fraction cost)

    def __post_init__(self):
        sets = tuple((frozenset(e), Fraction(c)) for e, c in self.sets)
        object.__setattr__(self, "sets", sets)
        for elems, c in sets:
            if c < 0:
                raise InstanceError("set costs must be non-negative", kind="negative_cost")
            if any(not 0 <= x < self.universe_size for x in elems):
                raise InstanceError("set element outside the universe")


def from_set_cover(sc):
    """Two-layer reduction: root -> one Steiner node per set (the set's cost)
    -> one terminal per element (cost 0)."""
    covered = set().union(*(e for e, _ in sc.sets)) if sc.sets else set()
    missing = sorted(set(range(sc.universe_size)) - covered)
    if missing:
        raise InstanceError(f"elements {missing} are in no set", kind="uncovered_element")
    n_sets = len(sc.sets)
    root = 0
    elem_node = [1 + n_sets + x for x in range(sc.universe_size)]
    arcs = [Arc(root, 1 + i, c) for i, (_, c) in enumerate(sc.sets)]
    for i, (elems, _) in enumerate(sc.sets):
        arcs += [Arc(1 + i, elem_node[x], Fraction(0)) for x in sorted(elems)]
    return Instance(1 + n_sets + sc.universe_size, tuple(arcs), root, tuple(elem_node))


def greedy_hard(n):
    """Singletons ``{e_i}`` of cost ``1/i`` plus the full set at ``1 + 1/n``."""
    if n < 2:
        raise ValueError("greedy_hard needs n >= 2")
    sets = [(frozenset([i]), Fraction(1, i + 1)) for i in range(n)]
    sets.append((frozenset(range(n)), 1 + Fraction(1, n)))
    return SetCoverInstance(n, tuple(sets))


def random_set_cover(universe_size, n_sets, cost_range, seed):
    """Each set takes each element with probability 1/2; uncovered elements are
    then given to a random set."""
    if n_sets < 1 or universe_size < 1:
        raise ValueError("need at least one set and one element")
    rng = SplitMix64(seed)
    lo, hi = cost_range
    members = [set() for _ in range(n_sets)]
    for i in range(n_sets):
        for x in range(universe_size):
            if rng.bernoulli(Fraction(1, 2)):
                members[i].add(x)
    for x in range(universe_size):
        if not any(x in s for s in members):
            members[rng.below(n_sets)].add(x)
    costs = [rng.between(lo, hi) for _ in range(n_sets)]
    return SetCoverInstance(universe_size, tuple(zip(members, costs)))


def _finish(n, arcs, k, hi):
    """Add root->t arcs of maximum cost until every terminal is reachable."""
    inst = Instance(n, tuple(arcs), 0, tuple(range(1, k + 1)))
    seen = reachable_from(inst, [0])
    extra = []
    for t in inst.terminals:
        if t not in seen:
            extra.append(Arc(0, t, Fraction(hi)))
            seen |= reachable_from(inst, [t])
    if extra:
        inst = Instance(n, tuple(arcs) + tuple(extra), 0, inst.terminals)
    return inst


def random_quasi_bipartite(n_terminals, n_steiner, arc_density, cost_range, seed):
    """Random instance with root 1, terminals ``2..k+1`` and Steiner nodes after.

    Every ordered pair ``(u, v)``, ``u != v``, that is not Steiner->Steiner is
    visited in lexicographic order and kept with probability ``arc_density``;
    costs are uniform integers in ``cost_range``.
    """
    density = Fraction(arc_density)
    if not 0 < density <= 1:
        raise ValueError("arc_density must lie in (0, 1]")
    rng = SplitMix64(seed)
    lo, hi = cost_range
    k = n_terminals
    n = 1 + k + n_steiner
    arcs = []
    for u in range(n):
        u_steiner = u > k
        for v in range(n):
            if u == v or (u_steiner and v > k):
                continue
            if rng.bernoulli(density):
                arcs.append(Arc(u, v, Fraction(rng.between(lo, hi))))
    return _finish(n, arcs, k, hi)


def random_quasi_bipartite_m(n_terminals, n_steiner, n_arcs, cost_range, seed):
    """Like :func:`random_quasi_bipartite` but draws exactly ``n_arcs`` arcs
    uniformly (with replacement) from the allowed ordered pairs. Suited to large
    sparse instances where visiting every pair is too slow."""
    rng = SplitMix64(seed)
    lo, hi = cost_range
    k = n_terminals
    a = k + 1  # root and terminals
    n = a + n_steiner
    from_core = a * (n - 1)
    total = from_core + n_steiner * a
    arcs = []
    for _ in range(n_arcs):
        x = rng.below(total)
        if x < from_core:
            u, v = divmod(x, n - 1)
            if v >= u:
                v += 1
        else:
            y, v = divmod(x - from_core, a)
            u = a + y
        arcs.append(Arc(u, v, Fraction(rng.between(lo, hi))))
    return _finish(n, arcs, k, hi)


def random_corpus(count, seed, max_nodes=24, max_terminals=6, max_cost=20):
    """Seeded stream of small random instances for property checks.

    Sizes, densities and cost ranges are themselves drawn from the seed; about
    a third of the instances allow 0-cost arcs.
    """
    rng = SplitMix64(seed)
    for _ in range(count):
        k = rng.between(1, max_terminals)
        n_steiner = rng.between(0, max_nodes - 1 - k)
        density = Fraction(rng.between(1, 6), 10)
        lo = 0 if rng.below(3) == 0 else 1
        yield random_quasi_bipartite(k, n_steiner, density, (lo, max_cost), rng.next())


def set_cover_corpus(count, seed, max_universe=8, max_sets=6, max_cost=20):
    rng = SplitMix64(seed)
    for _ in range(count):
        u = rng.between(1, max_universe)
        s = rng.between(1, max_sets)
        yield random_set_cover(u, s, (rng.between(0, 1), max_cost), rng.next())
