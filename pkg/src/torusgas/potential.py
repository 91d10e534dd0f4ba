"""Pair potentials represented through their Fourier transform.

The series consumes the interaction exclusively through ``u_hat`` sampled at
dual-lattice points ``z / L``, so that is the form stored here.  The Fourier
convention is ``u_hat(v) = integral exp(-2*pi*i v.x) u(x) dx``; for even
real ``u`` the transform is real and even, which every kind below enforces
by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import DomainError, RangeError


class DualPotential:
    """Interface: a real, even dual-space pair potential."""

    d: int
    decay_exponent: Optional[float]

    def u_hat(self, v) -> float:
        raise NotImplementedError

    def u_hat_lattice(self, z, L: float) -> float:
        """u_hat evaluated at the dual-lattice point z / L (z integer vector)."""
        return self.u_hat(tuple(zi / L for zi in _as_vector(z, self.d)))

    @property
    def u_hat_zero(self) -> float:
        return self.u_hat_lattice((0,) * self.d, 1.0)


def _as_vector(v, d) -> Tuple[float, ...]:
    try:
        vec = tuple(v)
    except TypeError:
        vec = (v,)
    if len(vec) != d:
        raise DomainError(f"vector has {len(vec)} components, expected {d}")
    return vec


@dataclass(frozen=True)
class ZeroPotential(DualPotential):
    """Ideal gas: u_hat identically zero."""

    d: int = 1
    decay_exponent: Optional[float] = None

    def u_hat(self, v) -> float:
        _as_vector(v, self.d)
        return 0.0

    def u_hat_lattice(self, z, L: float) -> float:
        _as_vector(z, self.d)
        return 0.0


@dataclass(frozen=True)
class GaussianPotential(DualPotential):
    """u(x) = g * exp(-pi |x|^2 / a^2), so u_hat(v) = g * a^d * exp(-pi a^2 |v|^2)."""

    strength: float
    range: float
    d: int = 1
    decay_exponent: Optional[float] = None

    def __post_init__(self):
        if self.range <= 0:
            raise DomainError(f"range must be > 0, got {self.range}")

    def u_hat(self, v) -> float:
        vec = _as_vector(v, self.d)
        a2 = self.range * self.range
        return (self.strength * self.range ** self.d
                * math.exp(-math.pi * a2 * sum(x * x for x in vec)))

    def u(self, x) -> float:
        """Direct-space value; used only by verification code."""
        vec = _as_vector(x, self.d)
        return self.strength * math.exp(-math.pi * sum(v * v for v in vec) / self.range ** 2)


class TabulatedPotential(DualPotential):
    """u_hat stored at exact dual-lattice points of a torus of side L.

    Entries are keyed by the integer vector z and give u_hat(z / L).  No
    interpolation is performed: queries off the table raise RangeError.
    Evenness (u_hat(-v) = u_hat(v)) is validated at construction.
    """

    def __init__(self, entries: Dict[tuple, float], L: float, d: Optional[int] = None,
                 decay_exponent: Optional[float] = None):
        if L <= 0:
            raise DomainError(f"L must be > 0, got {L}")
        if not entries:
            raise DomainError("tabulated potential needs at least the z=0 entry")
        keys = list(entries)
        inferred = len(keys[0])
        self.d = int(d) if d is not None else inferred
        self.L = float(L)
        self.decay_exponent = decay_exponent
        table = {}
        for z, value in entries.items():
            z = tuple(int(c) for c in _as_vector(z, self.d))
            table[z] = float(value)
        for z, value in table.items():
            neg = tuple(-c for c in z)
            if neg not in table:
                raise DomainError(f"table misses the mirror point of {z}; u_hat must be even")
            if table[neg] != value:
                raise DomainError(f"table not even at {z}: {value} vs {table[neg]}")
        if (0,) * self.d not in table:
            raise DomainError("table must contain z = 0 (u_hat(0) enters the prefactor)")
        self._table = table

    def u_hat(self, v) -> float:
        vec = _as_vector(v, self.d)
        z = []
        for comp in vec:
            zi = round(comp * self.L)
            if abs(comp * self.L - zi) > 1e-9:
                raise RangeError(f"{vec} is not a dual-lattice point of L={self.L}")
            z.append(int(zi))
        return self.u_hat_lattice(tuple(z), self.L)

    def u_hat_lattice(self, z, L: float) -> float:
        if abs(L - self.L) > 1e-12 * self.L:
            raise RangeError(f"table was built for L={self.L}, queried with L={L}")
        key = tuple(int(c) for c in _as_vector(z, self.d))
        try:
            return self._table[key]
        except KeyError:
            raise RangeError(f"lattice point {key} outside the tabulated window") from None

    @property
    def u_hat_zero(self) -> float:
        return self._table[(0,) * self.d]

    def dual_l1_total(self) -> float:
        """sum over the whole table (z != 0) of |u_hat(z/L)| / L^d."""
        zero = (0,) * self.d
        return sum(abs(v) for z, v in sorted(self._table.items())
                   if z != zero) / self.L ** self.d


def load_potential_table(path, L: float, decay_exponent: Optional[float] = None) -> TabulatedPotential:
    """Read a table of lines "z_1 ... z_d value" into a TabulatedPotential."""
    entries = {}
    d = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2:
                raise DomainError(f"{path}:{lineno}: expected 'z_1 ... z_d value'")
            if d is None:
                d = len(parts) - 1
            elif len(parts) - 1 != d:
                raise DomainError(f"{path}:{lineno}: inconsistent dimension")
            try:
                z = tuple(int(p) for p in parts[:-1])
                value = float(parts[-1])
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
            entries[z] = value
    if not entries:
        raise DomainError(f"{path}: empty potential table")
    return TabulatedPotential(entries, L=L, d=d, decay_exponent=decay_exponent)


def dual_l1_bound(pot: DualPotential, L: float, cutoff: int) -> float:
    """sum over 0 < |z|_inf <= cutoff of |u_hat(z/L)| / L^d.

    Monotone nondecreasing in ``cutoff``; the beta-series tail estimate is
    built from this partial sum.
    """
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    d = pot.d
    total = 0.0
    # Sum shells |z|_inf = r so partial sums are reproducible and monotone.
    for r in range(1, cutoff + 1):
        shell = 0.0
        for z in _cube_shell(r, d):
            shell += abs(pot.u_hat_lattice(z, L))
        total += shell / L ** d
    return total


def _cube_shell(r: int, d: int):
    """Integer vectors with |z|_inf == r, in lexicographic order."""
    def rec(prefix, saturated):
        i = len(prefix)
        if i == d:
            if saturated:
                yield tuple(prefix)
            return
        for c in range(-r, r + 1):
            yield from rec(prefix + [c], saturated or abs(c) == r)
    yield from rec([], False)
