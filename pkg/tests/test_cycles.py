from fractions import Fraction

import pytest

from torusgas.cycles import (CycleStructure, enumerate_compositions,
                             enumerate_cycle_types, statistics_sign, unity_check)
from torusgas.errors import DomainError

from reference import brute_force_type_weights


def test_cycle_structure_blocks():
    cs = CycleStructure((2, 1, 3))
    assert cs.p == 3 and cs.N == 6
    assert cs.prefix == (0, 2, 3, 6)
    assert list(cs.block(1)) == [1, 2]
    assert list(cs.block(3)) == [4, 5, 6]
    assert cs.cycle_of(3) == 2 and cs.cycle_of(6) == 3
    with pytest.raises(DomainError):
        cs.cycle_of(7)
    with pytest.raises(DomainError):
        CycleStructure((2, 0))


def test_partition_weights_small_n():
    n1 = dict((cs.lengths, w) for cs, w in enumerate_cycle_types(1))
    assert n1 == {(1,): Fraction(1)}
    n2 = dict((cs.lengths, w) for cs, w in enumerate_cycle_types(2))
    assert n2 == {(2,): Fraction(1, 2), (1, 1): Fraction(1, 2)}
    by_p = {}
    for cs, w in enumerate_cycle_types(3):
        by_p[cs.p] = by_p.get(cs.p, Fraction(0)) + w
    assert by_p == {1: Fraction(1, 3), 2: Fraction(1, 2), 3: Fraction(1, 6)}


def test_partition_weights_match_permutation_classes():
    for N in range(1, 9):
        expected = brute_force_type_weights(N)
        got = dict((cs.lengths, w) for cs, w in enumerate_cycle_types(N))
        assert got == expected


def test_emission_order_is_lexicographic_in_p_then_lengths():
    types = [(cs.p, cs.lengths) for cs, _ in enumerate_cycle_types(6)]
    assert types == sorted(types)
    comps = [(cs.p, cs.lengths) for cs, _ in enumerate_compositions(5)]
    assert comps == sorted(comps)


def test_composition_weights_examples():
    n2 = dict((cs.lengths, w) for cs, w in enumerate_compositions(2))
    assert n2 == {(2,): Fraction(1, 2), (1, 1): Fraction(1, 2)}
    n3 = dict((cs.lengths, w) for cs, w in enumerate_compositions(3))
    assert n3[(1, 2)] == Fraction(1, 6)
    assert n3[(2, 1)] == Fraction(1, 3)
    assert n3[(3,)] == Fraction(1, 3)
    assert n3[(1, 1, 1)] == Fraction(1, 6)
    assert sum(n3.values()) == 1


def test_composition_weights_are_bounded_by_inverse_n():
    for N in (2, 5, 7):
        for cs, w in enumerate_compositions(N):
            assert 0 < w <= Fraction(1, N)


def test_compositions_group_to_partition_weights():
    for N in range(1, 9):
        grouped = {}
        for cs, w in enumerate_compositions(N):
            key = tuple(sorted(cs.lengths, reverse=True))
            grouped[key] = grouped.get(key, Fraction(0)) + w
        partition = dict((cs.lengths, w) for cs, w in enumerate_cycle_types(N))
        assert grouped == partition


def test_unity_exact():
    for N in (1, 6, 12):
        part, comp = unity_check(N)
        assert part == 1 and comp == 1


def test_statistics_sign():
    assert statistics_sign(1, 5, "bose") == 1
    assert statistics_sign(1, 3, "fermi") == 1
    assert statistics_sign(1, 2, "fermi") == -1
    assert statistics_sign(4, 6, "fermi") == 1
    with pytest.raises(DomainError):
        statistics_sign(0, 3, "bose")


def test_enumeration_domain():
    with pytest.raises(DomainError):
        list(enumerate_cycle_types(0))
    with pytest.raises(DomainError):
        list(enumerate_compositions(17))
