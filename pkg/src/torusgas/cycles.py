"""Permutation cycle types of S_N with exact weights and signs.

Two equivalent resolutions of unity index the outer average of the series:
the partition form (one term per cycle type, weight = class size / N!) and
the composition form (one term per ordered tuple of cycle lengths).  All
weights are exact ``fractions.Fraction`` values so the unity checks hold with
zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Tuple

from .errors import DomainError
from .thermal import Statistics

#: Largest particle number accepted by the enumerators.
MAX_N = 16


@dataclass(frozen=True)
class CycleStructure:
    """An ordered tuple of cycle lengths with its block decomposition.

    Cycle l occupies the consecutive particle block
    ``C_l = {N_{l-1}+1, ..., N_l}`` where ``N_l`` is the prefix sum of the
    lengths; particles are numbered from 1.
    """

    lengths: Tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(int(n) for n in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if not lengths or any(n < 1 for n in lengths):
            raise DomainError(f"cycle lengths must be >= 1, got {lengths}")

    @property
    def p(self) -> int:
        return len(self.lengths)

    @property
    def N(self) -> int:
        return sum(self.lengths)

    @property
    def prefix(self) -> Tuple[int, ...]:
        """(N_0, N_1, ..., N_p) with N_0 = 0."""
        out = [0]
        for n in self.lengths:
            out.append(out[-1] + n)
        return tuple(out)

    def block(self, l: int) -> range:
        """Particles of cycle l (1-based l), as a range of 1-based labels."""
        pre = self.prefix
        return range(pre[l - 1] + 1, pre[l] + 1)

    def cycle_of(self, q: int) -> int:
        """Index l of the cycle containing particle q."""
        pre = self.prefix
        if not 1 <= q <= self.N:
            raise DomainError(f"particle {q} outside 1..{self.N}")
        for l in range(1, self.p + 1):
            if q <= pre[l]:
                return l
        raise AssertionError("unreachable")


def _check_n(N: int) -> None:
    if not 1 <= N <= MAX_N:
        raise DomainError(f"N must lie in 1..{MAX_N}, got {N}")


def _partitions(N: int, max_part: int) -> Iterator[List[int]]:
    # non-increasing partitions, largest part first
    if N == 0:
        yield []
        return
    for first in range(min(N, max_part), 0, -1):
        for rest in _partitions(N - first, first):
            yield [first] + rest


def enumerate_cycle_types(N: int) -> Iterator[Tuple[CycleStructure, Fraction]]:
    """Cycle types of S_N with weight (class size) / N!.

    The weight of the type with lengths (n_1 >= ... >= n_p) is
    ``1 / (prod_l n_l * prod_n mult_n!)`` where mult_n counts repeats of n.
    Emitted in lexicographic (p, lengths) order; weights sum to 1 exactly.
    """
    _check_n(N)
    types = sorted((len(part), tuple(part)) for part in _partitions(N, N))
    for _, lengths in types:
        weight = Fraction(1)
        for n in lengths:
            weight /= n
        mult = {}
        for n in lengths:
            mult[n] = mult.get(n, 0) + 1
        for m in mult.values():
            for k in range(2, m + 1):
                weight /= k
        yield CycleStructure(lengths), weight


def enumerate_compositions(N: int) -> Iterator[Tuple[CycleStructure, Fraction]]:
    """Ordered compositions (n_1, ..., n_p) of N with skew weights.

    The weight of a composition is
    ``1 / (N * (N - N_1) * ... * (N - N_{p-1}))`` with N_l the prefix sums;
    summed over all compositions this gives 1 exactly.
    """
    _check_n(N)

    # Weight denominator: product over parts of the remainder before each part.
    def rec(remaining, lengths, denom):
        if remaining == 0:
            yield CycleStructure(tuple(lengths)), Fraction(1, denom)
            return
        for n in range(1, remaining + 1):
            yield from rec(remaining - n, lengths + [n], denom * remaining)

    ordered = sorted(rec(N, [], 1), key=lambda cw: (cw[0].p, cw[0].lengths))
    yield from ordered


def statistics_sign(p: int, N: int, statistics) -> int:
    """+1 for bosons; (-1)^(N-p) for fermions (p cycles out of N particles)."""
    if not 1 <= p <= N:
        raise DomainError(f"need 1 <= p <= N, got p={p}, N={N}")
    if Statistics.coerce(statistics) is Statistics.BOSE:
        return 1
    return -1 if (N - p) % 2 else 1


def unity_check(N: int) -> Tuple[Fraction, Fraction]:
    """Exact weight sums of both resolutions; each must equal 1."""
    partition_sum = sum((w for _, w in enumerate_cycle_types(N)), Fraction(0))
    composition_sum = sum((w for _, w in enumerate_compositions(N)), Fraction(0))
    return partition_sum, composition_sum
