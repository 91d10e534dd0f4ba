"""System parameters and Gaussian lattice (theta) sums.

The theta sum ``sum_{z in Z^d} exp(-c (z + s)^2)`` is the only transcendental
building block of the series: every permutation cycle contributes one such
factor, with ``c = pi * n * lambda_beta^2 / L^2`` and a shift ``s`` given by
the mean momentum shift of the cycle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

#: Default relative accuracy target for theta sums.
DEFAULT_THETA_TOL = 1e-14

_LOG_TINY = -736.0  # below exp(_LOG_TINY) doubles underflow to 0


class Statistics(enum.Enum):
    BOSE = "bose"
    FERMI = "fermi"

    @classmethod
    def coerce(cls, value) -> "Statistics":
        if isinstance(value, Statistics):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown statistics {value!r}; expected 'bose' or 'fermi'")


def thermal_wavelength(beta: float, mass: float, hbar: float = 1.0) -> float:
    """Thermal wavelength sqrt(2*pi*hbar^2*beta/mass)."""
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    if mass <= 0:
        raise DomainError(f"mass must be > 0, got {mass}")
    return math.sqrt(2.0 * math.pi * hbar * hbar * beta / mass)


@dataclass(frozen=True)
class SystemParams:
    """Particle number, geometry, temperature and statistics of the gas.

    ``lambda_beta`` may be supplied directly or derived from a mass via
    :meth:`from_mass`; only the ratio ``lambda_beta / L`` enters the series.
    """

    N: int
    d: int
    L: float
    beta: float
    lambda_beta: float
    statistics: Statistics = Statistics.BOSE

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics.coerce(self.statistics))
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if self.d < 1:
            raise DomainError(f"d must be >= 1, got {self.d}")
        if self.L <= 0:
            raise DomainError(f"L must be > 0, got {self.L}")
        if self.beta <= 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if self.lambda_beta <= 0:
            raise DomainError(f"lambda_beta must be > 0, got {self.lambda_beta}")

    @classmethod
    def from_mass(cls, N, d, L, beta, mass, hbar=1.0, statistics=Statistics.BOSE):
        return cls(N=N, d=d, L=L, beta=beta,
                   lambda_beta=thermal_wavelength(beta, mass, hbar),
                   statistics=statistics)

    @property
    def density(self) -> float:
        return self.N / self.L ** self.d

    def cycle_gaussian_coefficient(self, n: int) -> float:
        """Coefficient c = pi * n * lambda_beta^2 / L^2 of the cycle-n theta factor."""
        return math.pi * n * self.lambda_beta ** 2 / self.L ** 2


def theta_truncation_radius(c: float, tol: float, d: int = 1) -> int:
    """Smallest radius R whose tail bound falls below ``tol``.

    The per-axis tail ``sum_{|z|>R} exp(-c z^2)`` (times ``d`` axes) is bounded
    by ``2 d exp(-c R^2) / (1 - exp(-c (2R+1)))``, a geometric-series bound
    valid also for axis shifts within [-1/2, 1/2].
    """
    if c <= 0:
        raise DomainError(f"c must be > 0, got {c}")
    if not 0 < tol < 1:
        raise DomainError(f"tol must lie in (0, 1), got {tol}")
    R = 1
    while True:
        log_lead = -c * R * R
        if log_lead < _LOG_TINY:
            return R
        bound = 2.0 * d * math.exp(log_lead) / -math.expm1(-c * (2 * R + 1))
        if bound < tol:
            return R
        R += 1


def _theta_axis(c: float, s: float, R: int) -> float:
    # s reduced to [-1/2, 1/2]; plain summation, |z| <= R
    s = s - round(s)
    total = 0.0
    for z in range(-R, R + 1):
        u = z + s
        e = -c * u * u
        if e > _LOG_TINY:
            total += math.exp(e)
    return total


def theta_sum(c: float, s=0.0, d: int = 1, tol: float = DEFAULT_THETA_TOL) -> float:
    """Gaussian lattice sum ``sum_{z in Z^d} exp(-c |z + s|^2)``.

    ``s`` may be a scalar (d = 1 or an isotropic shift) or a length-d sequence.
    The sum factorizes exactly over axes, so each axis is summed over the
    symmetric window given by :func:`theta_truncation_radius`; the result is
    accurate to ``tol`` relative.
    """
    if c <= 0:
        raise DomainError(f"theta sum diverges for c <= 0 (got {c})")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    try:
        shifts = [float(x) for x in s]
    except TypeError:
        shifts = [float(s)] * d
    if len(shifts) != d:
        raise DomainError(f"shift has {len(shifts)} components, expected {d}")
    # Each axis value is at least exp(-c/4) once the shift is reduced, so an
    # absolute per-axis tail below tol*exp(-c/4)/d keeps the product within tol.
    log_floor = max(-0.25 * c, _LOG_TINY * 0.5)
    tol_axis = max(tol * math.exp(log_floor) / d, 1e-320)
    R = theta_truncation_radius(c, tol_axis)
    value = 1.0
    for s_i in shifts:
        value *= _theta_axis(c, s_i, R)
    return value
