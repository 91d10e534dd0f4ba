"""Independent reference computations used to verify the series evaluator.

Nothing here shares code paths with :mod:`torusgas.series` beyond the theta
sum primitive: the ideal-gas value comes from the canonical recursion, the
two-particle interacting value from exact diagonalization in the plane-wave
basis, and the discrete-time evaluator re-derives the N = 2 series from the
time-sliced formulas, so agreement is a genuine cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .potential import DualPotential
from .thermal import DEFAULT_THETA_TOL, Statistics, SystemParams, theta_sum, \
    theta_truncation_radius

IDEAL_GAS_MAX_N = 12


def ideal_gas_Q(params: SystemParams, theta_tol: float = DEFAULT_THETA_TOL) -> float:
    """Canonical recursion Q_N = (1/N) sum_k s_k q_k Q_{N-k}.

    q_k is the centered theta factor of a k-cycle and s_k = +1 (Bose) or
    (-1)^(k-1) (Fermi).  The recursion runs in exact rational arithmetic
    over the float theta values, so the fermionic cancellations are exact.
    """
    if params.N > IDEAL_GAS_MAX_N:
        raise DomainError(f"ideal-gas recursion supports N <= {IDEAL_GAS_MAX_N}")
    fermi = params.statistics is Statistics.FERMI
    q = {k: Fraction(theta_sum(params.cycle_gaussian_coefficient(k), 0.0,
                               params.d, tol=theta_tol))
         for k in range(1, params.N + 1)}
    Q: List[Fraction] = [Fraction(1)]
    for n in range(1, params.N + 1):
        total = Fraction(0)
        for k in range(1, n + 1):
            sign = -1 if (fermi and k % 2 == 0) else 1
            total += sign * q[k] * Q[n - k]
        Q.append(total / n)
    return float(Q[params.N])


@dataclass(frozen=True)
class DiscretePolicy:
    """Truncations of the time-sliced two-particle evaluator."""

    m: int
    z_cutoff: int
    alpha_max: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.alpha_max < 0 or self.alpha_max > self.m:
            raise DomainError(f"alpha_max must lie in 0..m, got {self.alpha_max}")
        if self.alpha_max > 0 and self.z_cutoff < 1:
            raise DomainError("z_cutoff must be >= 1 when alpha_max > 0")


def e_hat_m(z, m: int, pot: DualPotential, L: float, beta: float,
            exact: bool = False, grid: int = 4096) -> float:
    """Dual coefficient of one discrete-time Boltzmann factor.

    First-order form delta_{z,0} - (beta/(m L^d)) u_hat(z/L); the dropped
    remainder is O(1/m^2).  With ``exact=True`` the coefficient is computed
    by quadrature of the periodized direct-space potential instead (the
    potential must expose ``u``), which is what the deep Trotter check uses.
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    try:
        zvec = tuple(int(c) for c in z)
    except TypeError:
        zvec = (int(z),)
    if exact:
        return _e_hat_exact(zvec, m, pot, L, beta, grid)
    first = 1.0 if not any(zvec) else 0.0
    return first - beta / (m * L ** pot.d) * pot.u_hat_lattice(zvec, L)


def _periodized_u(pot: DualPotential, points, L: float) -> np.ndarray:
    """u_L at a list of d-tuples, by direct image summation."""
    if not hasattr(pot, "u"):
        raise DomainError("exact mode needs a potential with a direct-space u")
    reach = getattr(pot, "range", L)
    wmax = int(math.ceil(8.0 * reach / L)) + 2
    d = pot.d
    total = np.zeros(len(points))
    for w in itertools.product(range(-wmax, wmax + 1), repeat=d):
        total += np.array([pot.u(tuple(x[a] + L * w[a] for a in range(d)))
                           for x in points])
    return total


@lru_cache(maxsize=8)
def _boltzmann_grid(pot, L: float, beta_over_m: float, grid: int):
    """Real-space grid and exp(-(beta/m) u_L) samples; z-independent."""
    d = pot.d
    n = grid if d == 1 else min(grid, 128)
    ax = np.arange(n) * (L / n)
    points = list(itertools.product(*([ax.tolist()] * d)))
    u_l = _periodized_u(pot, points, L)
    return points, np.exp(-beta_over_m * u_l)


def _e_hat_exact(zvec, m, pot, L, beta, grid) -> float:
    if pot.d > 2:
        raise DomainError("exact e_hat_m is implemented for d <= 2")
    try:
        points, weight = _boltzmann_grid(pot, L, beta / m, grid)
    except TypeError:  # unhashable potential: compute without the cache
        points, weight = _boltzmann_grid.__wrapped__(pot, L, beta / m, grid)
    phase = np.cos((2.0 * math.pi / L)
                   * np.array([sum(zi * x[a] for a, zi in enumerate(zvec))
                               for x in points]))
    return float(np.mean(phase * weight))


def _theta_axis_grid(c: float, shifts: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized 1-d theta sum over an array of axis shifts."""
    R = theta_truncation_radius(c, max(tol * math.exp(max(-0.25 * c, -300.0)), 1e-320))
    reduced = shifts - np.round(shifts)
    zs = np.arange(-R, R + 1, dtype=float)
    expo = -c * (zs[None, :] + reduced[..., None]) ** 2
    return np.exp(np.maximum(expo, -745.0)).sum(axis=-1)


def _theta_vec(c: float, shifts: np.ndarray, d: int, tol: float) -> np.ndarray:
    """theta_sum(c, s, d) for a batch of shift vectors, shape (n, d)."""
    value = np.ones(shifts.shape[0])
    for a in range(d):
        value *= _theta_axis_grid(c, shifts[:, a], tol / d)
    return value


def discrete_G2(partition, params: SystemParams, pot: DualPotential,
                policy: DiscretePolicy, exact_e_hat: bool = False,
                theta_tol: float = DEFAULT_THETA_TOL) -> float:
    """Time-sliced per-type value for N = 2, truncated at ``alpha_max`` events.

    ``partition`` is (2,) for the single two-particle trajectory or (1, 1)
    for two one-particle trajectories; the latter carries the constraint
    that the event vectors sum to zero.  The continuum evaluator is the
    m -> infinity limit of this function at fixed truncations.
    """
    lengths = tuple(int(n) for n in partition)
    if sorted(lengths) not in ([1, 1], [2]):
        raise DomainError(f"partition must be (2,) or (1, 1), got {partition}")
    if params.N != 2:
        raise DomainError("the discrete evaluator is specific to N = 2")
    two_cycle = lengths == (2,)
    d = params.d
    m = policy.m
    c1 = params.cycle_gaussian_coefficient(1)

    cache: Dict[Tuple[int, ...], float] = {}

    def ehat(z):
        z = tuple(z)
        if z not in cache:
            cache[z] = e_hat_m(z, m, pot, params.L, params.beta, exact=exact_e_hat)
        return cache[z]

    e0 = ehat((0,) * d)
    cube = [z for z in itertools.product(range(-policy.z_cutoff, policy.z_cutoff + 1),
                                         repeat=d) if any(z)]
    total = 0.0
    for alpha in range(0, policy.alpha_max + 1):
        if alpha > m:
            break
        if alpha == 0:
            if two_cycle:
                f_empty = theta_sum(2 * c1, 0.0, d, tol=theta_tol)
            else:
                f_empty = theta_sum(c1, 0.0, d, tol=theta_tol) ** 2
            total += e0 ** m * f_empty
            continue
        ts = np.array(list(itertools.combinations(
            [(i + 1) / m for i in range(m)], alpha)))
        order_weight = e0 ** (m - alpha)
        for zs in itertools.product(cube, repeat=alpha):
            if not two_cycle and any(sum(z[a] for z in zs) for a in range(d)):
                continue
            w = order_weight
            for z in zs:
                w *= ehat(z)
            if w == 0.0:
                continue
            total += w * _f_sum(two_cycle, ts, zs, c1, d, theta_tol)
    return total


def _f_sum(two_cycle: bool, ts: np.ndarray, zs: Sequence[Tuple[int, ...]],
           c1: float, d: int, tol: float) -> float:
    """Sum of the partition's f over all ordered time tuples (rows of ts)."""
    alpha = len(zs)
    dots = [[sum(a * b for a, b in zip(zs[r], zs[s])) for s in range(alpha)]
            for r in range(alpha)]
    n_rows = ts.shape[0]
    expo = np.zeros(n_rows)
    if two_cycle:
        const = 0.5 * sum(dots[r][s] for r in range(alpha) for s in range(alpha))
        expo -= c1 * const
        for r in range(alpha):
            for s in range(alpha):
                if dots[r][s]:
                    expo += c1 * np.abs(ts[:, r] - ts[:, s]) * dots[r][s]
        shift = np.array([-0.5 * sum(z[a] for z in zs) for a in range(d)])
        theta = theta_sum(2 * c1, tuple(shift), d, tol=tol)
        return float(np.exp(expo).sum() * theta)
    for r in range(alpha):
        for s in range(alpha):
            if dots[r][s]:
                expo -= 2.0 * c1 * (np.minimum(ts[:, r], ts[:, s])
                                    - ts[:, r] * ts[:, s]) * dots[r][s]
    shifts = np.zeros((n_rows, d))
    for r in range(alpha):
        for a in range(d):
            shifts[:, a] += ts[:, r] * zs[r][a]
    theta = _theta_vec(c1, shifts, d, tol)
    return float((np.exp(expo) * theta * theta).sum())


def _relative_blocks(params: SystemParams, pot: DualPotential, momentum_cutoff: int):
    """Per-parity relative-momentum data: (com_factor, nu_list, beta*H matrix)."""
    d = params.d
    L = params.L
    c1 = params.cycle_gaussian_coefficient(1)
    blocks = []
    for parity in itertools.product((0, 1), repeat=d):
        com = 1.0
        for a in range(d):
            com *= theta_sum(2 * c1, parity[a] / 2.0, 1)
        axes = []
        for a in range(d):
            top = 2 * momentum_cutoff + parity[a]
            axes.append(list(range(-top, top + 1, 2)))
        nus = list(itertools.product(*axes))
        size = len(nus)
        H = np.zeros((size, size))
        for i, nu in enumerate(nus):
            H[i, i] = 0.5 * c1 * sum(x * x for x in nu)
            for jdx, nup in enumerate(nus):
                z = tuple((nu[a] - nup[a]) // 2 for a in range(d))
                H[i, jdx] += params.beta / L ** d * pot.u_hat_lattice(z, L)
        blocks.append((com, nus, H))
    return blocks


def exact_Q2(params: SystemParams, pot: DualPotential, momentum_cutoff: int) -> float:
    """Tr P_+- exp(-beta H) for two particles, by exact diagonalization.

    The center of mass factorizes into parity-resolved theta sums; each
    parity sector leaves one relative-momentum block with kinetic diagonal
    (pi lambda^2 / (2 L^2)) nu^2 and coupling u_hat(((nu - nu')/2)/L)/L^d.
    The basis window is symmetric under nu -> -nu so the exchange projector
    is exact within the truncation.
    """
    if params.N != 2:
        raise DomainError("exact_Q2 requires N = 2")
    if momentum_cutoff < 1:
        raise DomainError("momentum_cutoff must be >= 1")
    fermi = params.statistics is Statistics.FERMI
    total = 0.0
    for com, nus, H in _relative_blocks(params, pot, momentum_cutoff):
        w, V = np.linalg.eigh(H)
        boltz = np.exp(-w)
        tr = float(boltz.sum())
        index = {nu: i for i, nu in enumerate(nus)}
        perm = np.array([index[tuple(-x for x in nu)] for nu in nus])
        M = (V * boltz) @ V.T
        tr_swap = float(M[perm, np.arange(len(nus))].sum())
        sector = 0.5 * (tr - tr_swap) if fermi else 0.5 * (tr + tr_swap)
        total += com * sector
    return total


def exact_q2_convergence(params: SystemParams, pot: DualPotential,
                         cutoffs: Sequence[int]) -> List[Tuple[int, float]]:
    """exact_Q2 at each cutoff, for Cauchy-style convergence diagnostics."""
    return [(c, exact_Q2(params, pot, c)) for c in cutoffs]


def trotter_Q2_sector(params: SystemParams, pot: DualPotential, m: int,
                      momentum_cutoff: int, swap: bool) -> float:
    """Trace of the m-slice Trotter product (T E)^m in one exchange sector.

    E is the exact dual matrix of exp(-(beta/m) u_L); this is the reference
    for the deep check of the discrete evaluator with exact e_hat_m.
    """
    if params.N != 2:
        raise DomainError("trotter_Q2_sector requires N = 2")
    d = params.d
    c1 = params.cycle_gaussian_coefficient(1)
    ehat_cache: Dict[Tuple[int, ...], float] = {}

    def ehat(z):
        if z not in ehat_cache:
            ehat_cache[z] = e_hat_m(z, m, pot, params.L, params.beta, exact=True)
        return ehat_cache[z]

    total = 0.0
    for parity in itertools.product((0, 1), repeat=d):
        com = 1.0
        for a in range(d):
            com *= theta_sum(2 * c1, parity[a] / 2.0, 1)
        axes = []
        for a in range(d):
            top = 2 * momentum_cutoff + parity[a]
            axes.append(list(range(-top, top + 1, 2)))
        nus = list(itertools.product(*axes))
        size = len(nus)
        kin = np.array([math.exp(-0.5 * c1 * sum(x * x for x in nu) / m) for nu in nus])
        E = np.zeros((size, size))
        for i, nu in enumerate(nus):
            for jdx, nup in enumerate(nus):
                z = tuple((nu[a] - nup[a]) // 2 for a in range(d))
                E[i, jdx] = ehat(z)
        slice_matrix = kin[:, None] * E
        prod = np.linalg.matrix_power(slice_matrix, m)
        if swap:
            index = {nu: i for i, nu in enumerate(nus)}
            perm = np.array([index[tuple(-x for x in nu)] for nu in nus])
            total += com * float(prod[perm, np.arange(size)].sum())
        else:
            total += com * float(np.trace(prod))
    return total


@dataclass(frozen=True)
class MatrixACheckReport:
    """Pass/fail per claim about the discrete-time quadratic-form matrix."""

    m: int
    inverse_identity_exact: bool
    eigenpairs_ok: bool
    max_eigen_residual: float
    degeneracy_ok: bool

    @property
    def passed(self) -> bool:
        return self.inverse_identity_exact and self.eigenpairs_ok and self.degeneracy_ok


def _antiperiodic_laplacian(m: int) -> np.ndarray:
    """2 on the diagonal, -1 on neighbors, wrap entries with flipped sign."""
    B = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        B[i, i] = 2
        for step in (1, -1):
            j = i + step
            sign = -1
            if j == m:
                j, sign = 0, 1
            elif j == -1:
                j, sign = m - 1, 1
            B[i, j] += sign
    return B


def matrix_A_check(m: int, residual_tol: float = 1e-12) -> MatrixACheckReport:
    """Verify the inverse and spectrum of A_ij = m/4 - |i - j|/2.

    (a) A * B = I exactly, with B the antiperiodic discrete Laplacian; the
        check multiplies 4A (integer) by B and compares with 4I, which is
        exact rational arithmetic scaled by 4.
    (b) The stated eigenpairs of B: doubly degenerate
        2 (1 - cos((2q-1) pi / m)) with sine/cosine vectors, plus 4 with
        the alternating vector for odd m; residuals below ``residual_tol``.
    (c) The stated eigenvalues are m/2 distinct doubly degenerate values
        for even m, and match B's numerical spectrum as a multiset.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    B = _antiperiodic_laplacian(m)
    fourA = np.array([[m - 2 * abs(i - j) for j in range(m)] for i in range(m)],
                     dtype=np.int64)
    inverse_ok = bool(np.array_equal(fourA @ B, 4 * np.eye(m, dtype=np.int64)))

    Bf = B.astype(float)
    j = np.arange(1, m + 1, dtype=float)
    stated: List[float] = []
    max_residual = 0.0
    for q in range(1, m // 2 + 1):
        angle = (2 * q - 1) * math.pi / m
        lam = 2.0 * (1.0 - math.cos(angle))
        stated += [lam, lam]
        for vec in (np.sin(angle * j), np.cos(angle * j)):
            max_residual = max(max_residual,
                               float(np.max(np.abs(Bf @ vec - lam * vec))))
    if m % 2 == 1:
        vec = (-1.0) ** j
        stated.append(4.0)
        max_residual = max(max_residual,
                           float(np.max(np.abs(Bf @ vec - 4.0 * vec))))
    eigen_ok = max_residual < residual_tol

    spectrum = np.sort(np.linalg.eigvalsh(Bf))
    degeneracy_ok = bool(np.allclose(spectrum, np.sort(stated), atol=1e-10))
    if m % 2 == 0:
        degeneracy_ok = degeneracy_ok and len(set(stated)) == m // 2
    return MatrixACheckReport(m=m, inverse_identity_exact=inverse_ok,
                              eigenpairs_ok=eigen_ok,
                              max_eigen_residual=max_residual,
                              degeneracy_ok=degeneracy_ok)
