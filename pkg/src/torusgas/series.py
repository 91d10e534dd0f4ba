"""Assembly of the truncated partition-function series.

The full value is an average over permutation cycle types of a per-type sum
over interaction-order configurations.  Each configuration contributes a
product of pair weights (-beta/L^d)^a / a!, a constrained sum over event
vectors, and a time integral of per-cycle Boltzmann factors.

Truncation knobs live in :class:`TruncationPolicy`.  Inter-cycle event
vectors are never enumerated and filtered: they are parameterized through
the integer cycle-space basis of the coupling graph, which satisfies every
per-cycle constraint identically.  Configurations whose coupling graph is
not a merger of circles contribute exactly zero and are skipped.

Determinism: configurations are enumerated in lexicographic order over the
flattened pair grid, terms are accumulated in that order, and across-branch
reduction uses compensated summation, so results are bit-stable including
under the optional thread pool (gather in order, then fold).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .cycles import CycleStructure, enumerate_cycle_types, statistics_sign
from .errors import ConfigurationError, ConsistencyError, DomainError
from .graphs import AlphaConfig, build_coupling_graph, is_valid_merger, nullspace_basis
from .potential import DualPotential, dual_l1_bound
from .shifts import _closed_moments, _z_l1, cycle_boltzmann_factor
from .thermal import DEFAULT_THETA_TOL, SystemParams, theta_sum


class NeumaierSum:
    """Compensated accumulator; the result is independent of magnitude order."""

    __slots__ = ("_sum", "_comp")

    def __init__(self):
        self._sum = 0.0
        self._comp = 0.0

    def add(self, value: float) -> None:
        t = self._sum + value
        if abs(self._sum) >= abs(value):
            self._comp += (self._sum - t) + value
        else:
            self._comp += (value - t) + self._sum
        self._sum = t

    @property
    def value(self) -> float:
        return self._sum + self._comp


@dataclass(frozen=True)
class TruncationPolicy:
    """Caps on the infinite sums and the quadrature resolution.

    alpha_max   largest total interaction order kept
    z_radius    sup-norm cutoff of free (intra-cycle) event vectors
    coeff_bound sup-norm cutoff of the cycle-space coefficients that
                parameterize inter-cycle event vectors
    quad_nodes  Gauss-Legendre nodes per event time
    theta_tol   relative accuracy of every theta sum
    """

    alpha_max: int = 2
    z_radius: int = 3
    coeff_bound: int = 3
    quad_nodes: int = 16
    theta_tol: float = DEFAULT_THETA_TOL

    def __post_init__(self):
        if self.alpha_max < 0 or self.z_radius < 0 or self.coeff_bound < 0:
            raise ConfigurationError("policy", "truncation bounds must be >= 0")
        if self.quad_nodes < 1:
            raise ConfigurationError("quad_nodes", "needs at least one node")
        if not 0 < self.theta_tol < 1:
            raise ConfigurationError("theta_tol", "must lie in (0, 1)")


@dataclass
class EvaluationResult:
    """Truncated series value with its per-(p, alpha) decomposition.

    ``breakdown`` maps (cycle count p, total order alpha) to the fully
    weighted partial sum; the entries are float projections of the internal
    accumulators, so they recompose Q up to roundoff of the gross scale.
    """

    Q: float
    breakdown: Dict[Tuple[int, int], float]
    term_count: int
    skipped_invalid_alpha: int
    tail_bound_estimate: float


@lru_cache(maxsize=32)
def _gauss_legendre(n: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (tuple(float(xi + 1.0) / 2.0 for xi in x),
            tuple(float(wi) / 2.0 for wi in w))


def _lattice_cube(radius: int, d: int, include_zero: bool) -> List[Tuple[int, ...]]:
    pts = list(itertools.product(range(-radius, radius + 1), repeat=d))
    if not include_zero:
        zero = (0,) * d
        pts = [p for p in pts if p != zero]
    return pts


def _alpha_assignments(pairs: Sequence[Tuple[int, int]], alpha_max: int
                       ) -> Iterator[Dict[Tuple[int, int], int]]:
    """All order assignments with 1 <= total <= alpha_max, lexicographic."""
    n = len(pairs)

    def rec(i, remaining, current):
        if i == n:
            if remaining < alpha_max:  # at least one event placed
                yield dict(current)
            return
        for a in range(remaining + 1):
            if a:
                current[pairs[i]] = a
            yield from rec(i + 1, remaining - a, current)
            if a:
                del current[pairs[i]]

    yield from rec(0, alpha_max, {})


def _prefactor(params: SystemParams, pot: DualPotential) -> float:
    u0 = pot.u_hat_zero
    return math.exp(-params.beta * u0 * params.N * (params.N - 1)
                    / (2.0 * params.L ** params.d))


def _theta_factors(params: SystemParams, tol: float) -> Dict[int, float]:
    """Centered theta factor per cycle length; shared by every evaluator."""
    return {n: theta_sum(params.cycle_gaussian_coefficient(n), 0.0, params.d, tol=tol)
            for n in range(1, params.N + 1)}


def _exact_type_sums(params: SystemParams, q_values: Dict[int, float]
                     ) -> Dict[int, Fraction]:
    """Per-p exact sums of weight * prod_l q_{n_l} over cycle types.

    Carried in rational arithmetic over the (dyadic) float theta factors so
    that the deep cancellations of the fermionic alternating sum are exact.
    """
    q_frac = {n: Fraction(q) for n, q in q_values.items()}
    sums: Dict[int, Fraction] = {}
    for cycles, weight in enumerate_cycle_types(params.N):
        term = weight
        for n in cycles.lengths:
            term *= q_frac[n]
        sums[cycles.p] = sums.get(cycles.p, Fraction(0)) + term
    return sums


def mean_field_Q(params: SystemParams, pot: DualPotential,
                 theta_tol: float = DEFAULT_THETA_TOL) -> float:
    """The zero-order value: mean-field prefactor times the ideal cycle sum."""
    q_values = _theta_factors(params, theta_tol)
    sums = _exact_type_sums(params, q_values)
    total = Fraction(0)
    for p, s in sorted(sums.items()):
        total += statistics_sign(p, params.N, params.statistics) * s
    return _prefactor(params, pot) * float(total)


def _config_contribution(cycles: CycleStructure, params: SystemParams,
                         pot: DualPotential, policy: TruncationPolicy,
                         alpha: Dict[Tuple[int, int], int]) -> Optional[Tuple[int, float, int]]:
    """(total order, value, term count) of one configuration, or None if its
    coupling graph admits no all-nonzero solution."""
    pairs = sorted(alpha)
    template = [(j, k) for (j, k) in pairs for _ in range(alpha[(j, k)])]
    A = len(template)
    d = params.d
    L = params.L

    cycle_of = {}
    for q in range(1, cycles.N + 1):
        cycle_of[q] = cycles.cycle_of(q)
    intra_idx = [i for i, (j, k) in enumerate(template) if cycle_of[j] == cycle_of[k]]
    inter_idx = [i for i, (j, k) in enumerate(template) if cycle_of[j] != cycle_of[k]]

    graph = build_coupling_graph(AlphaConfig(dict(alpha)), cycles)
    assert [lbl[:2] for *_, lbl in graph.edges] == [template[i] for i in inter_idx], \
        "edge order out of sync with the canonical event order"
    if graph.E and not is_valid_merger(graph):
        return None
    basis = nullspace_basis(graph).vectors if graph.E else ()

    free_cube = _lattice_cube(policy.z_radius, d, include_zero=False)
    coeff_cube = _lattice_cube(policy.coeff_bound, d, include_zero=True)
    nodes, weights = _gauss_legendre(policy.quad_nodes)
    node_tuples = list(itertools.product(range(policy.quad_nodes), repeat=A))
    zero = (0,) * d

    pair_weight = 1.0
    for (j, k) in pairs:
        a = alpha[(j, k)]
        pair_weight *= (-params.beta / L ** d) ** a / math.factorial(a)

    value = 0.0
    terms = 0
    n_basis = len(basis)
    for intra_choice in itertools.product(free_cube, repeat=len(intra_idx)):
        for coeff_choice in itertools.product(coeff_cube, repeat=n_basis):
            vectors: List[Optional[Tuple[int, ...]]] = [None] * A
            for pos, i in enumerate(intra_idx):
                vectors[i] = intra_choice[pos]
            ok = True
            for e_pos, i in enumerate(inter_idx):
                vec = tuple(sum(basis[b][e_pos] * coeff_choice[b][a] for b in range(n_basis))
                            for a in range(d))
                if vec == zero:
                    ok = False
                    break
                vectors[i] = vec
            if not ok:
                continue
            w_u = 1.0
            for i in range(A):
                w_u *= pot.u_hat_lattice(vectors[i], L)
                if w_u == 0.0:
                    break
            if w_u == 0.0:
                continue
            flat0 = [(template[i][0], template[i][1], 0.5, vectors[i]) for i in range(A)]
            for l in range(1, cycles.p + 1):
                if any(_z_l1(flat0, d, cycles, l)):
                    raise ConsistencyError(f"constraint violated for cycle {l}")
            quad = 0.0
            for node in node_tuples:
                w_t = 1.0
                for idx in node:
                    w_t *= weights[idx]
                flat = [(template[i][0], template[i][1], nodes[node[i]], vectors[i])
                        for i in range(A)]
                bracket = 1.0
                for l in range(1, cycles.p + 1):
                    mom = _closed_moments(flat, d, cycles, l)
                    bracket *= cycle_boltzmann_factor(mom, cycles.lengths[l - 1], params,
                                                      tol=policy.theta_tol)
                quad += w_t * bracket
            value += w_u * quad
            terms += 1
    return A, pair_weight * value, terms


def _interaction_contributions(cycles: CycleStructure, params: SystemParams,
                               pot: DualPotential, policy: TruncationPolicy
                               ) -> Iterator[Optional[Tuple[int, float, int]]]:
    if policy.alpha_max > 0 and policy.z_radius == 0:
        raise ConfigurationError("z_radius", "must be positive when alpha_max > 0")
    N = cycles.N
    pairs = [(j, k) for j in range(1, N + 1) for k in range(j + 1, N + 1)]
    for alpha in _alpha_assignments(pairs, policy.alpha_max):
        yield _config_contribution(cycles, params, pot, policy, alpha)


def evaluate_G(cycles: CycleStructure, params: SystemParams, pot: DualPotential,
               policy: TruncationPolicy) -> float:
    """Truncated per-type value: prefactor times (ideal product + corrections)."""
    if cycles.N != params.N:
        raise DomainError(f"cycle lengths sum to {cycles.N}, params have N={params.N}")
    q_values = _theta_factors(params, policy.theta_tol)
    ideal = 1.0
    for n in cycles.lengths:
        ideal *= q_values[n]
    acc = NeumaierSum()
    acc.add(ideal)
    for contrib in _interaction_contributions(cycles, params, pot, policy):
        if contrib is not None:
            acc.add(contrib[1])
    return _prefactor(params, pot) * acc.value


def _tail_factorial_series(x: float, alpha_max: int, terms: int = 60) -> float:
    """sum_{a > alpha_max} x^a / a!, summed directly (no cancellation)."""
    total = 0.0
    term = x ** (alpha_max + 1) / math.factorial(alpha_max + 1)
    for a in range(alpha_max + 1, alpha_max + 1 + terms):
        total += term
        term *= x / (a + 1)
        if term < 1e-300:
            break
    return total


def tail_bound_estimate(params: SystemParams, pot: DualPotential,
                        policy: TruncationPolicy) -> float:
    """Conservative bound on the dropped orders alpha > alpha_max.

    Uses the factorial-series bound with the dual-space l1 sum of the
    potential; the constraint-induced volume suppression of coupled terms
    is deliberately ignored, so this overestimates.  Tabulated potentials
    contribute their complete table content.
    """
    if hasattr(pot, "dual_l1_total"):
        s = pot.dual_l1_total()
    else:
        s = dual_l1_bound(pot, params.L, max(8, 2 * policy.z_radius))
    if s == 0.0:
        return 0.0
    n_pairs = params.N * (params.N - 1) // 2
    x = n_pairs * params.beta * s
    q_values = _theta_factors(params, policy.theta_tol)
    reference = 0.0
    for cycles, weight in enumerate_cycle_types(params.N):
        term = float(weight)
        for n in cycles.lengths:
            term *= q_values[n]
        reference += term
    return _prefactor(params, pot) * _tail_factorial_series(x, policy.alpha_max) * reference


def evaluate_Q(params: SystemParams, pot: DualPotential, policy: TruncationPolicy,
               threads: int = 1) -> EvaluationResult:
    """Average of the per-type values over cycle types, with breakdown.

    The order-zero part is summed exactly (rational arithmetic over the
    float theta factors), which keeps the fermionic cancellation identities
    exact; interaction orders are accumulated with compensated summation in
    a fixed order.
    """
    q_values = _theta_factors(params, policy.theta_tol)
    prefactor = _prefactor(params, pot)
    exact_sums = _exact_type_sums(params, q_values)

    breakdown: Dict[Tuple[int, int], float] = {}
    signed_total = Fraction(0)
    for p, s in sorted(exact_sums.items()):
        sign = statistics_sign(p, params.N, params.statistics)
        signed_total += sign * s
        breakdown[(p, 0)] = prefactor * sign * float(s)

    jobs = []
    if policy.alpha_max > 0:
        if policy.z_radius == 0:
            raise ConfigurationError("z_radius", "must be positive when alpha_max > 0")
        pairs = [(j, k) for j in range(1, params.N + 1)
                 for k in range(j + 1, params.N + 1)]
        for cycles, weight in enumerate_cycle_types(params.N):
            sign = statistics_sign(cycles.p, params.N, params.statistics)
            for alpha in _alpha_assignments(pairs, policy.alpha_max):
                jobs.append((cycles, float(weight) * sign, alpha))

    def run(job):
        cycles, w, alpha = job
        return _config_contribution(cycles, params, pot, policy, alpha)

    if threads > 1 and jobs:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    acc = NeumaierSum()
    acc.add(prefactor * float(signed_total))
    term_count = 0
    skipped = 0
    entry_acc: Dict[Tuple[int, int], NeumaierSum] = {}
    for job, contrib in zip(jobs, results):
        cycles, w, _ = job
        if contrib is None:
            skipped += 1
            continue
        A, value, terms = contrib
        weighted = prefactor * w * value
        acc.add(weighted)
        term_count += terms
        key = (cycles.p, A)
        entry_acc.setdefault(key, NeumaierSum()).add(weighted)
    for key, s in entry_acc.items():
        breakdown[key] = s.value

    return EvaluationResult(
        Q=acc.value,
        breakdown=dict(sorted(breakdown.items())),
        term_count=term_count,
        skipped_invalid_alpha=skipped,
        tail_bound_estimate=tail_bound_estimate(params, pot, policy),
    )
