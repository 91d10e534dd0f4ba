"""Momentum-shift profiles of interaction events and their cycle moments.

An interaction event is a triple (pair (j, k), time t in [0, 1], integer
vector z != 0).  Given a cycle structure, every particle q acquires a
piecewise-constant shift profile Z_q(t); each cycle l needs only the mean
shift and the mean square shift to build its Boltzmann factor

    exp(-c_l * variance_l) * sum_z exp(-c_l * (z + mean_l)^2),

with c_l = pi * n_l * lambda_beta^2 / L^2.  The moments are computed two
ways: by exact integration of the profiles (the in-module oracle) and by
closed formulas in the event times; the two must agree.

Times may be floats or ``fractions.Fraction``; all formulas are arithmetic
on the given number type, so rational inputs give exact rational results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .cycles import CycleStructure
from .errors import ConsistencyError, DomainError
from .graphs import AlphaConfig
from .thermal import SystemParams, theta_sum


@dataclass(frozen=True)
class Event:
    """One interaction event of the pair (j, k), j < k."""

    j: int
    k: int
    t: object          # float or Fraction in [0, 1]
    z: Tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.j < self.k:
            raise DomainError(f"event pair needs 1 <= j < k, got ({self.j}, {self.k})")
        z = tuple(int(c) for c in self.z)
        object.__setattr__(self, "z", z)
        if not any(z):
            raise DomainError("event vectors must be nonzero")
        if not 0 <= self.t <= 1:
            raise DomainError(f"event time {self.t} outside [0, 1]")


class EventSet:
    """All events of a configuration, in canonical (j, k, r) order."""

    def __init__(self, events: Iterable[Event], d: int = None):
        events = list(events)
        order = {}
        keyed = []
        for e in events:
            r = order.get((e.j, e.k), 0) + 1
            order[(e.j, e.k)] = r
            keyed.append(((e.j, e.k, r), e))
        keyed.sort(key=lambda item: item[0])
        self.events: Tuple[Event, ...] = tuple(e for _, e in keyed)
        inferred = len(self.events[0].z) if self.events else 1
        self.d = inferred if d is None else int(d)
        if self.events and self.d != inferred:
            raise DomainError(f"events are {inferred}-dimensional, d={d} given")

    @classmethod
    def from_pairs(cls, pairs: Dict[Tuple[int, int], Sequence[Tuple[object, Sequence[int]]]]):
        events = []
        for (j, k), items in pairs.items():
            for t, z in items:
                events.append(Event(j, k, t, tuple(z)))
        return cls(events)

    def alpha_config(self) -> AlphaConfig:
        alpha = {}
        for e in self.events:
            alpha[(e.j, e.k)] = alpha.get((e.j, e.k), 0) + 1
        return AlphaConfig(alpha)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


@dataclass(frozen=True)
class ShiftProfile:
    """Piecewise-constant shift of one particle over [0, 1].

    ``values[i]`` holds on the open interval (breakpoints[i], breakpoints[i+1]).
    """

    q: int
    breakpoints: Tuple
    values: Tuple[Tuple[int, ...], ...]

    def integral(self):
        """Exact integral of the profile (a vector)."""
        d = len(self.values[0]) if self.values else 1
        total = [0] * d
        for i, v in enumerate(self.values):
            w = self.breakpoints[i + 1] - self.breakpoints[i]
            for a in range(d):
                total[a] = total[a] + w * v[a]
        return tuple(total)

    def square_integral(self):
        """Exact integral of |profile|^2 (a scalar)."""
        total = 0
        for i, v in enumerate(self.values):
            w = self.breakpoints[i + 1] - self.breakpoints[i]
            total = total + w * sum(c * c for c in v)
        return total


@dataclass(frozen=True)
class CycleMoments:
    """Mean shift, mean square shift and their variance for one cycle."""

    zbar: Tuple
    z2bar: object
    variance: object


def _zero(d: int) -> List[int]:
    return [0] * d


def shift_at(events: EventSet, cycles: CycleStructure, q: int, t) -> Tuple[int, ...]:
    """The shift vector Z_q(t): a four-sum over events with >=/< indicators.

    Events at exactly t count through the literal convention: the two
    "future" sums use t_e >= t, the two "past" sums use t_e < t.
    """
    l = cycles.cycle_of(q)
    pre = cycles.prefix
    N_lo, N_hi = pre[l - 1], pre[l]
    N = cycles.N
    out = _zero(events.d)
    for e in events:
        if e.t >= t:
            if e.j <= q - 1 and q <= e.k <= N_hi:
                _acc(out, e.z, -1)
            if q <= e.j <= N_hi and N_hi + 1 <= e.k <= N:
                _acc(out, e.z, +1)
        else:
            if e.j <= q and q + 1 <= e.k <= N_hi:
                _acc(out, e.z, -1)
            if q + 1 <= e.j <= N_hi and N_hi + 1 <= e.k <= N:
                _acc(out, e.z, +1)
    return tuple(out)


def _acc(out: List[int], z: Tuple[int, ...], sign: int) -> None:
    for a in range(len(out)):
        out[a] += sign * z[a]


def _z_l1(items, d: int, cycles: CycleStructure, l: int) -> Tuple[int, ...]:
    pre = cycles.prefix
    N_lo, N_hi = pre[l - 1], pre[l]
    out = _zero(d)
    for j, k, _, z in items:
        if j <= N_lo and N_lo + 1 <= k <= N_hi:
            _acc(out, z, -1)
        if N_lo + 1 <= j <= N_hi and k > N_hi:
            _acc(out, z, +1)
    return tuple(out)


def z_l1(events: EventSet, cycles: CycleStructure, l: int) -> Tuple[int, ...]:
    """Constraint value of cycle l: the shift of its first particle at t = 0."""
    if not 1 <= l <= cycles.p:
        raise DomainError(f"cycle index {l} outside 1..{cycles.p}")
    return _z_l1([(e.j, e.k, e.t, e.z) for e in events], events.d, cycles, l)


def shift_profile(events: EventSet, cycles: CycleStructure, q: int) -> ShiftProfile:
    """Piecewise-constant profile of particle q over the event breakpoints."""
    times = sorted({e.t for e in events} | {0, 1})
    if times[0] != 0:
        times.insert(0, 0)
    values = []
    for i in range(len(times) - 1):
        mid = (times[i] + times[i + 1]) / 2
        values.append(shift_at(events, cycles, q, mid))
    return ShiftProfile(q, tuple(times), tuple(values))


def cycle_moments_direct(events: EventSet, cycles: CycleStructure, l: int) -> CycleMoments:
    """Moments by exact piecewise integration of the shift profiles.

    This is the in-module oracle for :func:`cycle_moments_closed`.
    """
    block = cycles.block(l)
    n_l = cycles.lengths[l - 1]
    d = events.d
    mean = [0] * d
    square = 0
    for q in block:
        prof = shift_profile(events, cycles, q)
        intg = prof.integral()
        for a in range(d):
            mean[a] = mean[a] + intg[a]
        square = square + prof.square_integral()
    zbar = tuple(m / n_l for m in mean)
    z2bar = square / n_l
    variance = z2bar - sum(c * c for c in zbar)
    return CycleMoments(zbar, z2bar, variance)


def _closed_moments(items: Sequence[Tuple[int, int, object, Tuple[int, ...]]],
                    d: int, cycles: CycleStructure, l: int) -> CycleMoments:
    """Closed-form moments over flat (j, k, t, z) tuples; see the public op."""
    pre = cycles.prefix
    lo, hi = pre[l - 1], pre[l]
    n_l = cycles.lengths[l - 1]
    X = lo + 1

    mean = [0] * d
    touching = []
    for j, k, t, z in items:
        in_k = lo < k <= hi
        in_j = lo < j <= hi
        if not (in_k or in_j):
            continue
        touching.append((j, k, t, z, in_k, in_j))
        coeff = 0
        if in_j:
            coeff = coeff + (j - X + t)
        if in_k:
            coeff = coeff - (k - X + t)
        if coeff != 0:
            for a in range(d):
                mean[a] = mean[a] + coeff * z[a]
    zbar = tuple(m / n_l for m in mean)

    square = 0
    var_sum = 0
    for j, k, t, z, ek, ej in touching:
        u_k = k + t
        u_j = j + t
        for jp, kp, tp, zp, fk, fj in touching:
            dot = sum(a * b for a, b in zip(z, zp))
            if dot == 0:
                continue
            v_k = kp + tp
            v_j = jp + tp
            coeff = 0
            var_coeff = 0
            if ek and fk:
                coeff = coeff + (min(u_k, v_k) - X)
                var_coeff = var_coeff + (u_k - X) * (v_k - X)
            if ej and fj:
                coeff = coeff + (min(u_j, v_j) - X)
                var_coeff = var_coeff + (u_j - X) * (v_j - X)
            if ek and fj:
                coeff = coeff - (min(u_k, v_j) - X)
                var_coeff = var_coeff - (u_k - X) * (v_j - X)
            if ej and fk:
                coeff = coeff - (min(u_j, v_k) - X)
                var_coeff = var_coeff - (u_j - X) * (v_k - X)
            square = square + coeff * dot
            var_sum = var_sum + (coeff - var_coeff / n_l) * dot
    return CycleMoments(zbar, square / n_l, var_sum / n_l)


def cycle_moments_closed(events: EventSet, cycles: CycleStructure, l: int) -> CycleMoments:
    """Moments from the closed time formulas (no profile integration).

    The mean is linear in the events; the square uses min-coefficients of
    the shifted positions u = (index + time), one of four role combinations
    per ordered event pair.  The variance applies, term by term, the
    replacement  min(u, u') - X  ->  min(u, u') - X - (u - X)(u' - X)/n_l
    with X = N_{l-1} + 1, which subtracts the squared mean exactly.
    """
    items = [(e.j, e.k, e.t, e.z) for e in events]
    return _closed_moments(items, events.d, cycles, l)


class CoefficientCase(enum.Enum):
    """Which endpoints of the two events lie in the cycle block.

    UPPER_INTRA: first event through its upper particle k, second event
    fully inside (pair j' < k').  LOWER_INTRA: first event through its
    lower particle j.  INTRA_LOWER: first event fully inside (pair j < k),
    second event through its lower particle j'.
    """

    UPPER_INTRA = "A_kj'k'"
    LOWER_INTRA = "A_jj'k'"
    INTRA_LOWER = "A_j'jk"


def coefficient_difference(case, indices: Sequence[int], times: Sequence) -> object:
    """Five-branch value of the selected min-coefficient difference table.

    ``indices`` is (k, j', k') for UPPER_INTRA, (j, j', k') for LOWER_INTRA
    and (j, k, j') for INTRA_LOWER; ``times`` is (t, t') for the first and
    second event.  The cycle offset drops from all differences, so no block
    data is needed.
    """
    case = CoefficientCase(case)
    if len(indices) != 3 or len(times) != 2:
        raise DomainError("expected three indices and two times")
    t, tp = times
    if case is CoefficientCase.UPPER_INTRA or case is CoefficientCase.LOWER_INTRA:
        a, jp, kp = indices
        if not jp < kp:
            raise DomainError(f"intra pair needs j' < k', got ({jp}, {kp})")
        if kp < a:
            return kp - jp
        if kp == a:
            return kp - jp + min(t, tp) - tp
        if jp < a < kp:
            return a - jp + t - tp
        if jp == a:
            return t - min(t, tp)
        return 0
    # INTRA_LOWER
    j, k, jp = indices
    if not j < k:
        raise DomainError(f"intra pair needs j < k, got ({j}, {k})")
    if k < jp:
        return k - j
    if k == jp:
        return k - j + min(t, tp) - t
    if j < jp < k:
        return jp - j + tp - t
    if j == jp:
        return tp - min(t, tp)
    return 0


#: Negative variance tolerated as rounding before it is an error.
VARIANCE_SLACK = 1e-12


def cycle_boltzmann_factor(moments: CycleMoments, n_l: int, params: SystemParams,
                           tol: float = None) -> float:
    """Variance damping times the shifted theta sum of one cycle."""
    var = float(moments.variance)
    if var < -VARIANCE_SLACK:
        raise ConsistencyError(f"negative cycle variance {var}")
    var = max(var, 0.0)
    c = params.cycle_gaussian_coefficient(n_l)
    kwargs = {} if tol is None else {"tol": tol}
    return math.exp(-c * var) * theta_sum(c, tuple(float(s) for s in moments.zbar),
                                          params.d, **kwargs)
