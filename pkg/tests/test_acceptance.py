"""Acceptance gate: every shipped claim, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one verdict line
per criterion with its runtime.
"""

import itertools
import random
import time
from fractions import Fraction

from torusgas.cycles import CycleStructure, enumerate_compositions, unity_check
from torusgas.graphs import (CouplingGraph, constraint_rank, integer_matrix_rank,
                             is_valid_merger, nullspace_basis)
from torusgas.oracles import (DiscretePolicy, discrete_G2, exact_Q2, ideal_gas_Q,
                              matrix_A_check)
from torusgas.potential import GaussianPotential, ZeroPotential
from torusgas.series import TruncationPolicy, evaluate_G, evaluate_Q
from torusgas.shifts import (CoefficientCase, Event, EventSet, coefficient_difference,
                             cycle_boltzmann_factor, cycle_moments_closed,
                             cycle_moments_direct, z_l1)
from torusgas.thermal import SystemParams

from reference import kernel_has_all_nonzero_vector, vertex_residuals


def verdict(number, name, ok, elapsed, limit=None):
    stamp = "PASS" if ok else "FAIL"
    budget = "" if limit is None else " / limit %gs" % limit
    print("\n[criterion %02d] %s: %s (%.2fs%s)" % (number, name, stamp, elapsed, budget))
    assert ok, f"criterion {number} ({name}) failed"
    if limit is not None:
        assert elapsed < limit, f"criterion {number} exceeded its {limit}s budget"


def test_criterion_01_unity_of_weights():
    start = time.perf_counter()
    ok = True
    for N in range(1, 13):
        part, comp = unity_check(N)
        ok = ok and part == 1 and comp == 1
    verdict(1, "unity of weights, N <= 12, exact", ok,
            time.perf_counter() - start, limit=1.0)


def test_criterion_02_ideal_gas_equivalence():
    start = time.perf_counter()
    policy = TruncationPolicy(alpha_max=0)
    ok = True
    for d in (1, 2):
        for stat in ("bose", "fermi"):
            for ratio in (0.3, 1.0, 3.0):
                for N in range(1, 7):
                    params = SystemParams(N=N, d=d, L=1.0, beta=1.0,
                                          lambda_beta=ratio, statistics=stat)
                    series = evaluate_Q(params, ZeroPotential(d), policy).Q
                    oracle = ideal_gas_Q(params)
                    scale = max(abs(series), abs(oracle))
                    ok = ok and (scale == 0.0
                                 or abs(series - oracle) <= 1e-12 * scale)
    verdict(2, "ideal-gas equivalence at 1e-12 relative", ok,
            time.perf_counter() - start, limit=10.0)


def test_criterion_03_graph_oracle_equivalence():
    start = time.perf_counter()
    checked = 0
    ok = True
    for V in range(1, 6):
        pairs = list(itertools.combinations(range(1, V + 1), 2))
        for E in range(0, 7):
            for combo in itertools.combinations_with_replacement(pairs, E):
                g = CouplingGraph(V, [(a, b, None) for a, b in combo])
                checked += 1
                valid = is_valid_merger(g)
                oracle = kernel_has_all_nonzero_vector(g, bound=3)
                K, m = constraint_rank(g)
                ok = ok and valid == oracle and K == V - m
                ok = ok and K == integer_matrix_rank(g.incidence_matrix())
    ok = ok and checked == 9024
    verdict(3, "graph oracle equivalence on all %d multigraphs" % checked, ok,
            time.perf_counter() - start, limit=60.0)


def test_criterion_04_appendix_examples():
    start = time.perf_counter()
    ok = True
    # two vertices with n parallel edges: solution manifold has dim n - 1
    for n in range(2, 7):
        g = CouplingGraph(2, [(1, 2, None)] * n)
        ok = ok and nullspace_basis(g).dimension == n - 1
    # complete 4-graph: dim 3, and the explicit merged solution solves all
    # four vertex equations with nonzero values
    k4_edges = list(itertools.combinations(range(1, 5), 2))
    g4 = CouplingGraph(4, [(a, b, None) for a, b in k4_edges])
    ok = ok and nullspace_basis(g4).dimension == 3
    for (x, y, z) in ((1, 10, 100), (2, -3, 7), (-5, 1, 9)):
        merged = {0: x, 1: -x + z, 2: -z, 3: x + y, 4: -y, 5: y + z}
        ok = ok and all(v != 0 for v in merged.values())
        residuals = vertex_residuals(k4_edges, merged)
        ok = ok and all(v == 0 for v in residuals.values())
    # triangular-lattice patch, V=6 E=9: incidence rank 5, dim 4
    patch_edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6),
                   (2, 4), (2, 6), (4, 6)]
    patch = CouplingGraph(6, [(a, b, None) for a, b in patch_edges])
    ok = ok and integer_matrix_rank(patch.incidence_matrix()) == 5
    ok = ok and nullspace_basis(patch).dimension == 4
    # complete n-graphs: the explicit construction with free upper-triangle
    # variables solves every vertex equation
    for n in range(3, 7):
        edges = list(itertools.combinations(range(1, n + 1), 2))
        index = {e: i for i, e in enumerate(edges)}
        assignment = {}
        power = 1
        for (j, k) in itertools.combinations(range(1, n), 2):
            power *= 3
            assignment[index[(j, k)]] = power
        for l in range(1, n):
            total = sum(assignment[index[(j, l)]] for j in range(1, l)) \
                - sum(assignment[index[(l, k)]] for k in range(l + 1, n))
            assignment[index[(l, n)]] = total
        ok = ok and all(v != 0 for v in assignment.values())
        residuals = vertex_residuals(edges, assignment)
        ok = ok and all(v == 0 for v in residuals.values())
    verdict(4, "appendix worked examples reproduced exactly", ok,
            time.perf_counter() - start)


def test_criterion_05_moment_closed_forms():
    start = time.perf_counter()
    rng = random.Random(101)
    ok = True
    compositions = {N: [cs for cs, _ in enumerate_compositions(N)]
                    for N in range(1, 6)}
    done = 0
    while done < 1000:
        N = rng.randint(1, 5)
        d = rng.randint(1, 2)
        cyc = rng.choice(compositions[N])
        events = []
        for j in range(1, N + 1):
            for k in range(j + 1, N + 1):
                for _ in range(rng.choice([0, 0, 1, 1, 2])):
                    t = Fraction(rng.randint(1, 719), 720)
                    z = tuple(rng.choice([-2, -1, 1, 2]) for _ in range(d))
                    events.append(Event(j, k, t, z))
        ev = EventSet(events, d=d)
        done += 1
        for l in range(1, cyc.p + 1):
            closed = cycle_moments_closed(ev, cyc, l)
            direct = cycle_moments_direct(ev, cyc, l)
            # exact rational times: the closed forms must match exactly,
            # which is stronger than the 1e-12 relative requirement
            ok = ok and closed.zbar == direct.zbar
            ok = ok and closed.z2bar == direct.z2bar
            ok = ok and closed.variance == direct.variance
    # coefficient case tables against the direct min differences
    for _ in range(10000):
        t = Fraction(rng.randint(0, 720), 720)
        tp = Fraction(rng.randint(0, 720), 720)
        case = rng.choice(list(CoefficientCase))
        if case is CoefficientCase.INTRA_LOWER:
            j = rng.randint(1, 8)
            k = rng.randint(j + 1, 9)
            jp = rng.randint(1, 9)
            expected = min(k + t, jp + tp) - min(j + t, jp + tp)
            got = coefficient_difference(case, (j, k, jp), (t, tp))
        else:
            jp = rng.randint(1, 8)
            kp = rng.randint(jp + 1, 9)
            a = rng.randint(1, 9)
            expected = min(a + t, kp + tp) - min(a + t, jp + tp)
            got = coefficient_difference(case, (a, jp, kp), (t, tp))
        ok = ok and got == expected
    verdict(5, "moment closed forms vs direct integration and case tables", ok,
            time.perf_counter() - start)


def test_criterion_06_variance_zero_characterization():
    start = time.perf_counter()
    rng = random.Random(102)
    ok = True
    compositions = {N: [cs for cs, _ in enumerate_compositions(N)]
                    for N in range(2, 6)}
    for _ in range(200):
        N = rng.randint(2, 5)
        d = rng.randint(1, 2)
        cyc = rng.choice(compositions[N])
        events = []
        for j in range(1, N + 1):
            for k in range(j + 1, N + 1):
                for _ in range(rng.choice([0, 0, 1, 2])):
                    t = 0.05 + 0.9 * rng.random()
                    z = tuple(rng.choice([-2, -1, 1, 2]) for _ in range(d))
                    events.append(Event(j, k, t, z))
        ev = EventSet(events, d=d)
        for l in range(1, cyc.p + 1):
            block = set(cyc.block(l))
            touches = any(e.j in block or e.k in block for e in ev)
            variance = cycle_moments_closed(ev, cyc, l).variance
            ok = ok and ((variance > 1e-13) if touches else (variance == 0))
    verdict(6, "variance vanishes exactly iff no event touches the cycle", ok,
            time.perf_counter() - start)


def test_criterion_07_cycle_order_invariance():
    start = time.perf_counter()
    rng = random.Random(103)

    def bracket_sum(order, lengths_by_cycle, abstract_events, params):
        lengths = tuple(lengths_by_cycle[c] for c in order)
        cyc = CycleStructure(lengths)
        pos = {c: i for i, c in enumerate(order)}
        pre = cyc.prefix
        total = 0.0
        for signs in itertools.product((1, -1), repeat=len(abstract_events)):
            events = []
            for s, (c1, o1, c2, o2, t, z) in zip(signs, abstract_events):
                qa = pre[pos[c1]] + o1 + 1
                qb = pre[pos[c2]] + o2 + 1
                j, k = (qa, qb) if qa < qb else (qb, qa)
                events.append(Event(j, k, t, tuple(s * zi for zi in z)))
            ev = EventSet(events)
            if any(any(z_l1(ev, cyc, l)) for l in range(1, cyc.p + 1)):
                continue
            value = 1.0
            for l in range(1, cyc.p + 1):
                mom = cycle_moments_closed(ev, cyc, l)
                value *= cycle_boltzmann_factor(mom, cyc.lengths[l - 1], params)
            total += value
        return total

    ok = True
    checked = 0
    while checked < 40:
        d = rng.randint(1, 2)
        p = rng.randint(2, 4)
        lengths_by_cycle = {c: rng.randint(1, 2) for c in range(p)}
        N = sum(lengths_by_cycle.values())
        if N > 4:
            continue
        checked += 1
        params = SystemParams(N=N, d=d, L=1.2, beta=0.3, lambda_beta=1.0)
        abstract = []
        for _ in range(rng.randint(1, 3)):
            c1, c2 = rng.sample(range(p), 2)
            abstract.append((c1, rng.randrange(lengths_by_cycle[c1]),
                             c2, rng.randrange(lengths_by_cycle[c2]),
                             rng.random(),
                             tuple(rng.choice([-2, -1, 1, 2]) for _ in range(d))))
        values = [bracket_sum(order, lengths_by_cycle, abstract, params)
                  for order in itertools.permutations(range(p))]
        scale = max(max(abs(v) for v in values), 1e-30)
        ok = ok and (max(values) - min(values)) <= 1e-12 * scale
    verdict(7, "sign-symmetrized bracket invariant under cycle reordering", ok,
            time.perf_counter() - start, limit=30.0)


def test_criterion_08_quadratic_form_matrix_proposition():
    start = time.perf_counter()
    ok = True
    for m in range(2, 51):
        report = matrix_A_check(m)
        ok = ok and report.passed and report.max_eigen_residual < 1e-12
    verdict(8, "inverse and eigenpairs of the time-slice matrix, m <= 50", ok,
            time.perf_counter() - start, limit=5.0)


def test_criterion_09_discrete_to_continuous():
    start = time.perf_counter()
    params = SystemParams(N=2, d=1, L=1.0, beta=0.5, lambda_beta=1.0)
    pot = GaussianPotential(strength=1.0, range=1.0, d=1)
    policy = TruncationPolicy(alpha_max=2, z_radius=3, coeff_bound=3, quad_nodes=32)
    ok = True
    for part in ((2,), (1, 1)):
        cont = evaluate_G(CycleStructure(part), params, pot, policy)
        values = {}
        for m in (8, 16, 32, 64):
            values[m] = discrete_G2(part, params, pot,
                                    DiscretePolicy(m=m, z_cutoff=3, alpha_max=2))
        diffs = [abs(values[m] - cont) for m in (8, 16, 32, 64)]
        ok = ok and all(b < a for a, b in zip(diffs, diffs[1:]))
        increment = abs(values[64] - values[32])
        ok = ok and diffs[-1] <= 3.0 * increment
    verdict(9, "time-sliced evaluator converges onto the continuous one", ok,
            time.perf_counter() - start)


def test_criterion_10_physical_cross_check():
    start = time.perf_counter()
    params = SystemParams(N=2, d=1, L=1.0, beta=0.2, lambda_beta=1.0)
    pot = GaussianPotential(strength=0.4, range=1.0, d=1)
    assert params.beta * pot.u_hat_zero / params.L <= 0.1  # weak coupling
    policy = TruncationPolicy(alpha_max=2, z_radius=3, coeff_bound=3, quad_nodes=24)
    result = evaluate_Q(params, pot, policy)
    exact = exact_Q2(params, pot, 10)
    allowance = max(0.01, result.tail_bound_estimate / abs(exact))
    ok = abs(result.Q - exact) / abs(exact) <= allowance

    # derivative in the coupling strength at zero, central differences on
    # both sides with the same step; the series is truncated at order beta
    h = 0.05
    first_order = TruncationPolicy(alpha_max=1, z_radius=4, coeff_bound=4,
                                   quad_nodes=24)

    def series_at(g):
        return evaluate_Q(params, GaussianPotential(g, 1.0, d=1), first_order).Q

    def exact_at(g):
        return exact_Q2(params, GaussianPotential(g, 1.0, d=1), 10)

    d_series = (series_at(h) - series_at(-h)) / (2 * h)
    d_exact = (exact_at(h) - exact_at(-h)) / (2 * h)
    ok = ok and abs(d_series - d_exact) / abs(d_exact) <= 0.01
    verdict(10, "weak-coupling agreement with exact diagonalization", ok,
            time.perf_counter() - start, limit=300.0)
