from dataclasses import replace
from fractions import Fraction

import pytest

from qbdst.generators import SetCoverInstance, from_set_cover
from qbdst.instance import Arc, Instance

# node ids in the two-set-cover example built by ``e2``
R, S1, S2, S3, A, B = range(6)


def make(n, arcs, terminals, root=0):
    return Instance(n, tuple(Arc(u, v, Fraction(c)) for u, v, c in arcs), root, tuple(terminals))


@pytest.fixture
def single():
    """r -> t at cost 5."""
    return make(2, [(0, 1, 5)], [1])


@pytest.fixture
def e2():
    """Universe {a, b}; sets {a,b}/3, {a}/1, {b}/1."""
    sc = SetCoverInstance(2, ((frozenset({0, 1}), 3), (frozenset({0}), 1), (frozenset({1}), 1)))
    return from_set_cover(sc)


@pytest.fixture
def chain():
    """r -> t1 -> t2, both arcs cost 1."""
    return make(3, [(0, 1, 1), (1, 2, 1)], [1, 2])


def virtual_case():
    """t1 -0-> s_a -0-> t3 closes into one component headed by t1; t3 sits
    outside t1's moat and buys t3->s, making s virtual for that body."""
    return make(6, [(0, 1, 20), (1, 4, 0), (4, 3, 0), (5, 1, 1), (3, 5, 1),
                    (5, 2, 5), (0, 2, 20)], [1, 2, 3])


def rational_slots(cert):
    """Addresses of every rational stored in a certificate."""
    slots = [("claimed_cost",), ("lower_bound",), ("bound",)]
    for p, ph in enumerate(cert.phases):
        slots.append(("delta", p))
        for i, members in enumerate(ph.entry_times):
            slots += [("entry", p, i, v) for v in sorted(members)]
    return slots


def tamper(cert, slot, eps=Fraction(1, 1000)):
    """Copy of ``cert`` with the rational at ``slot`` shifted by ``eps``."""
    if slot[0] in ("claimed_cost", "lower_bound", "bound"):
        return replace(cert, **{slot[0]: getattr(cert, slot[0]) + eps})
    phases = list(cert.phases)
    ph = phases[slot[1]]
    if slot[0] == "delta":
        phases[slot[1]] = replace(ph, delta=ph.delta + eps)
    else:
        _, p, i, v = slot
        entry = [dict(m) for m in ph.entry_times]
        entry[i][v] += eps
        phases[p] = replace(ph, entry_times=tuple(entry))
    return replace(cert, phases=tuple(phases))


# -- acceptance summary ----------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
