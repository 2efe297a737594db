from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from qbdst.errors import InstanceError
from qbdst.generators import (SetCoverInstance, SplitMix64, from_set_cover, greedy_hard,
                              random_corpus, random_quasi_bipartite, random_quasi_bipartite_m,
                              random_set_cover, set_cover_corpus)
from qbdst.instance import parse_instance, serialize_instance, validate

from conftest import A, B, R, S1, S2, S3

DATA = Path(__file__).parent / "data"


def test_splitmix_reference_values():
    # published SplitMix64 outputs for seed 0
    rng = SplitMix64(0)
    assert [rng.next() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_bernoulli_extremes():
    rng = SplitMix64(1)
    assert all(rng.bernoulli(1) for _ in range(50))
    assert not any(rng.bernoulli(0) for _ in range(50))


def test_set_cover_example_layout(e2):
    assert e2.n == 6 and e2.root == R and e2.terminals == (A, B)
    assert [(a.tail, a.head, a.cost) for a in e2.arcs] == [
        (R, S1, 3), (R, S2, 1), (R, S3, 1), (S1, A, 0), (S1, B, 0), (S2, A, 0), (S3, B, 0)]


def test_uncovered_element_rejected():
    with pytest.raises(InstanceError) as info:
        from_set_cover(SetCoverInstance(2, ((frozenset({0}), 1),)))
    assert info.value.kind == "uncovered_element"


def test_greedy_hard_two():
    sc = greedy_hard(2)
    assert sc.sets == ((frozenset({0}), 1), (frozenset({1}), Fraction(1, 2)),
                       (frozenset({0, 1}), Fraction(3, 2)))


def test_greedy_hard_validates():
    assert validate(from_set_cover(greedy_hard(4))).ok


def test_golden_random_instance():
    inst = random_quasi_bipartite(2, 2, 1, (1, 5), seed=1)
    golden = (DATA / "random_k2_s2_d1_c1-5_seed1.txt").read_text()
    assert serialize_instance(inst) == golden
    assert parse_instance(golden) == inst


def test_full_density_has_every_allowed_pair():
    inst = random_quasi_bipartite(3, 4, 1, (1, 5), seed=2)
    pairs = {(a.tail, a.head) for a in inst.arcs}
    n, k = inst.n, 3
    want = {(u, v) for u in range(n) for v in range(n)
            if u != v and not (u > k and v > k)}
    assert pairs == want and inst.m == len(want)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), k=st.integers(1, 6), s=st.integers(0, 10),
       d=st.fractions(Fraction(1, 20), 1))
def test_random_instances_validate(seed, k, s, d):
    assert validate(random_quasi_bipartite(k, s, d, (0, 20), seed)).ok


def test_sparse_generator_validates():
    inst = random_quasi_bipartite_m(10, 200, 1500, (1, 20), seed=5)
    assert inst.n == 211 and inst.m >= 1500
    assert validate(inst).ok


def test_seeded_output_is_reproducible():
    a = [serialize_instance(i) for i in random_corpus(10, seed=3)]
    b = [serialize_instance(i) for i in random_corpus(10, seed=3)]
    assert a == b
    assert list(set_cover_corpus(5, 1)) == list(set_cover_corpus(5, 1))
    assert random_set_cover(4, 3, (1, 5), 9) == random_set_cover(4, 3, (1, 5), 9)


def test_corpus_respects_size_limits():
    for inst in random_corpus(100, seed=0):
        assert inst.n <= 24 and 1 <= inst.k <= 6
        assert all(a.cost <= 20 for a in inst.arcs)


def test_bad_density_rejected():
    with pytest.raises(ValueError):
        random_quasi_bipartite(2, 2, 0, (1, 5), 0)
