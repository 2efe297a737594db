from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qbdst.errors import ContractError
from qbdst.generators import (SetCoverInstance, from_set_cover, random_corpus,
                              random_quasi_bipartite)
from qbdst.instance import Instance, reachable_from
from qbdst.partial_tree import (Component, PartialSteinerTree, check_partial_tree,
                                extract_solution, init_partial_tree, tree_cost,
                                zero_cost_closure, zero_cost_gaps)
from qbdst.solver import iterate_phases, solve

from conftest import A, B, R, S2, S3, make


def test_init_single(single):
    pst = init_partial_tree(single)
    assert pst.ell == 1
    assert pst.nonroot[0].nodes == {1}
    assert pst.free == frozenset()
    assert tree_cost(single, pst) == 0


def test_init_counts():
    inst = make(8, [(0, v, 1) for v in range(1, 8)], [1, 2, 3, 4])
    pst = init_partial_tree(inst)
    assert pst.ell == 4 and len(pst.free) == 3
    assert check_partial_tree(inst, pst).ok


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_init_costs_nothing(seed):
    inst = random_quasi_bipartite(4, 5, Fraction(1, 3), (0, 9), seed)
    pst = init_partial_tree(inst)
    assert tree_cost(inst, pst) == 0
    assert check_partial_tree(inst, pst).ok


def test_missing_edge_is_reported(e2):
    # root component claims s2 but has no arc reaching it
    pst = init_partial_tree(e2)
    bad = pst.replace(0, Component(frozenset({R, S2}), R))
    bad = PartialSteinerTree(bad.root, bad.nonroot, bad.free - {S2})
    report = check_partial_tree(e2, bad)
    assert not report["head_reachability"].ok
    assert "nodes 3 unreachable" in report["head_reachability"].detail


def test_partition_and_head_violations(e2):
    pst = init_partial_tree(e2)
    doubled = PartialSteinerTree(pst.root, pst.nonroot, pst.free | {A})
    report = check_partial_tree(e2, doubled)
    assert not report["partition"].ok
    assert not report["free_are_steiner"].ok
    wrong_head = pst.replace(1, Component(frozenset({A}), R))
    assert not check_partial_tree(e2, wrong_head)["heads"].ok


def test_closure_without_zero_arcs_is_identity(single):
    pst = init_partial_tree(single)
    assert zero_cost_closure(single, pst) == pst


def test_closure_zero_arc_to_terminal():
    inst = make(2, [(0, 1, 0)], [1])
    pst = zero_cost_closure(inst, init_partial_tree(inst))
    assert pst.ell == 0
    assert pst.root.nodes == {0, 1}
    assert extract_solution(inst, pst) == {0}


def test_closure_merges_exactly_the_free_set():
    # sets {a,b}/0, {b,c}/2, {c}/1: the zero set pulls a and b into the root
    sc = SetCoverInstance(3, ((frozenset({0, 1}), 0), (frozenset({1, 2}), 2),
                              (frozenset({2}), 1)))
    inst = from_set_cover(sc)
    a, b, c = inst.terminals
    pst = zero_cost_closure(inst, init_partial_tree(inst))
    assert pst.root.nodes == {inst.root, 1, a, b}
    assert pst.heads == (c,)
    assert tree_cost(inst, pst) == 0
    assert check_partial_tree(inst, pst).ok
    assert zero_cost_gaps(inst, pst) == []


def test_closure_between_terminal_components():
    # t1 -> s -> t2 at cost 0: t2 joins t1's component, t1 still needs the root
    inst = make(4, [(0, 1, 3), (1, 3, 0), (3, 2, 0)], [1, 2])
    pst = zero_cost_closure(inst, init_partial_tree(inst))
    assert pst.ell == 1
    assert pst.nonroot[0] == Component(frozenset({1, 2, 3}), 1, frozenset({1, 2}))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_closure_reaches_fixpoint(seed):
    inst = random_quasi_bipartite(5, 6, Fraction(1, 4), (0, 3), seed)
    pst = zero_cost_closure(inst, init_partial_tree(inst))
    assert check_partial_tree(inst, pst).ok
    assert zero_cost_gaps(inst, pst) == []
    assert tree_cost(inst, pst) == 0


def test_every_intermediate_tree_is_valid():
    for inst in random_corpus(40, seed=11):
        start = zero_cost_closure(inst, init_partial_tree(inst))
        for step in iterate_phases(inst, start):
            assert check_partial_tree(inst, step.merged).ok
            assert check_partial_tree(inst, step.after).ok


def test_extract_requires_finished_tree(single):
    with pytest.raises(ContractError):
        extract_solution(single, init_partial_tree(single))


def test_extract_without_terminals():
    inst = Instance(2, (), 0, ())
    assert extract_solution(inst, init_partial_tree(inst)) == frozenset()


def test_set_cover_example_final_tree(e2):
    *_, last = iterate_phases(e2, zero_cost_closure(e2, init_partial_tree(e2)))
    tree = last.after
    assert tree_cost(e2, tree) == 2
    ends = {(e2.arcs[e].tail, e2.arcs[e].head) for e in extract_solution(e2, tree)}
    assert ends == {(R, S2), (S2, A), (R, S3), (S3, B)}


def test_pruned_solution_still_feasible():
    for inst in random_corpus(20, seed=5):
        res = solve(inst)
        start = zero_cost_closure(inst, init_partial_tree(inst))
        *_, last = [start, *(s.after for s in iterate_phases(inst, start))]
        pruned = extract_solution(inst, last, prune=True)
        assert pruned <= set(res.solution_arcs)
        assert reachable_from(inst, [inst.root], pruned) >= inst.terminal_set
