"""Brute-force reference computations shared by the test modules.

Everything here is deliberately independent of the package's production
code paths: permutations are enumerated literally, kernels come from exact
row reduction, and integrals are done by generic quadrature.
"""

import itertools
import math
from fractions import Fraction

from torusgas.graphs import rational_kernel_basis


def permutation_cycle_type(perm):
    """Sorted cycle lengths of a permutation given as a tuple of images."""
    n = len(perm)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def brute_force_type_weights(N):
    """Cycle-type weights as (class size) / N! from all N! permutations."""
    counts = {}
    for perm in itertools.permutations(range(N)):
        key = permutation_cycle_type(perm)
        counts[key] = counts.get(key, 0) + 1
    total = math.factorial(N)
    return {key: Fraction(c, total) for key, c in counts.items()}


def brute_force_ideal_gas(N, q, fermi):
    """(1/N!) sum over permutations of sign * prod q[cycle length], exactly.

    ``q`` maps cycle length -> Fraction; returns a Fraction.
    """
    total = Fraction(0)
    for perm in itertools.permutations(range(N)):
        lengths = permutation_cycle_type(perm)
        sign = (-1) ** (N - len(lengths)) if fermi else 1
        term = Fraction(sign)
        for n in lengths:
            term *= q[n]
        total += term
    return total / math.factorial(N)


def kernel_has_all_nonzero_vector(graph, bound=3):
    """Exhaustive oracle: does the integer kernel of the incidence matrix
    contain a vector with every entry nonzero?

    The kernel basis comes from exact rational row reduction (not from the
    production fundamental-cycle construction) and coefficients range over
    [-bound, bound]."""
    if graph.E == 0:
        return True
    basis = rational_kernel_basis(graph.incidence_matrix())
    if not basis:
        return False
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(basis)):
        values = [sum(c * vec[e] for c, vec in zip(combo, basis))
                  for e in range(graph.E)]
        if all(values):
            return True
    return False


def vertex_residuals(edges, assignment):
    """Signed vertex sums of an edge assignment; edges as (a, b) with a < b.

    The value of edge i enters +1 at the smaller vertex and -1 at the
    larger one.  ``assignment`` maps edge index -> scalar or tuple.
    """
    residuals = {}

    def add(vertex, value, sign):
        if isinstance(value, tuple):
            current = residuals.get(vertex, (0,) * len(value))
            residuals[vertex] = tuple(c + sign * v for c, v in zip(current, value))
        else:
            residuals[vertex] = residuals.get(vertex, 0) + sign * value

    for i, (a, b) in enumerate(edges):
        lo, hi = (a, b) if a < b else (b, a)
        add(lo, assignment[i], +1)
        add(hi, assignment[i], -1)
    return residuals
