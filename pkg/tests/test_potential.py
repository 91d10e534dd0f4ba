import math
import random

import pytest
from scipy.integrate import quad

from torusgas.errors import DomainError, RangeError
from torusgas.potential import (GaussianPotential, TabulatedPotential, ZeroPotential,
                                dual_l1_bound, load_potential_table)


def test_zero_potential():
    pot = ZeroPotential(d=2)
    assert pot.u_hat((0.3, -0.7)) == 0.0
    assert pot.u_hat_zero == 0.0
    assert dual_l1_bound(pot, 1.0, 5) == 0.0


def test_gaussian_closed_form_values():
    pot = GaussianPotential(strength=2.0, range=1.5, d=1)
    assert pot.u_hat((0.0,)) == pytest.approx(2.0 * 1.5)
    v = 0.8
    assert pot.u_hat((v,)) == pytest.approx(
        2.0 * 1.5 * math.exp(-math.pi * 1.5 ** 2 * v * v), rel=1e-14)


def test_gaussian_evenness_exact():
    pot = GaussianPotential(strength=1.0, range=0.7, d=2)
    for v in ((0.3, -0.4), (1.2, 0.0), (-0.5, -0.5)):
        assert pot.u_hat(v) == pot.u_hat(tuple(-c for c in v))


def test_gaussian_transform_against_quadrature_1d():
    rng = random.Random(4)
    pot = GaussianPotential(strength=0.9, range=1.2, d=1)
    for _ in range(10):
        v = rng.uniform(-2, 2)
        integral, _ = quad(lambda x: math.cos(2 * math.pi * v * x) * pot.u((x,)),
                           -8, 8, limit=200)
        assert pot.u_hat((v,)) == pytest.approx(integral, abs=1e-8)


def test_gaussian_transform_against_quadrature_2d():
    rng = random.Random(5)
    pot = GaussianPotential(strength=1.1, range=0.8, d=2)
    for _ in range(10):
        v = (rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))

        def inner(y):
            val, _ = quad(lambda x: math.cos(2 * math.pi * (v[0] * x + v[1] * y))
                          * pot.u((x, y)), -6, 6, limit=100)
            return val

        integral, _ = quad(inner, -6, 6, limit=100)
        assert pot.u_hat(v) == pytest.approx(integral, abs=1e-8)


def test_dual_l1_bound_example():
    pot = GaussianPotential(strength=1.0, range=1.0, d=1)
    assert dual_l1_bound(pot, 1.0, 1) == pytest.approx(2 * math.exp(-math.pi), rel=1e-14)


def test_dual_l1_bound_monotone_and_convergent():
    pot = GaussianPotential(strength=1.0, range=1.0, d=2)
    values = [dual_l1_bound(pot, 1.0, c) for c in range(1, 8)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] - values[-2] < 1e-12


def test_tabulated_exact_lattice_queries():
    entries = {(0,): 1.0, (1,): 0.5, (-1,): 0.5, (2,): 0.1, (-2,): 0.1}
    pot = TabulatedPotential(entries, L=2.0)
    assert pot.u_hat_lattice((1,), 2.0) == 0.5
    assert pot.u_hat((0.5,)) == 0.5   # v = z/L with z=1
    assert pot.u_hat_zero == 1.0
    with pytest.raises(RangeError):
        pot.u_hat((0.3,))             # not a lattice point
    with pytest.raises(RangeError):
        pot.u_hat_lattice((3,), 2.0)  # outside the table
    with pytest.raises(RangeError):
        pot.u_hat_lattice((1,), 1.0)  # wrong torus size


def test_tabulated_validation():
    with pytest.raises(DomainError):
        TabulatedPotential({(0,): 1.0, (1,): 0.5}, L=1.0)  # missing mirror
    with pytest.raises(DomainError):
        TabulatedPotential({(0,): 1.0, (1,): 0.5, (-1,): 0.4}, L=1.0)  # uneven
    with pytest.raises(DomainError):
        TabulatedPotential({(1,): 0.5, (-1,): 0.5}, L=1.0)  # no origin


def test_load_potential_table(tmp_path):
    path = tmp_path / "pot.txt"
    path.write_text("""
# z value
0 0 1.0
1 0 0.25
-1 0 0.25
0 1 0.25
0 -1 0.25
""")
    pot = load_potential_table(path, L=1.5)
    assert pot.d == 2
    assert pot.u_hat_lattice((1, 0), 1.5) == 0.25
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1.0\n1 0.5\n")
    with pytest.raises(DomainError):
        load_potential_table(bad, L=1.0)   # misses the mirror of z=1


def test_dual_l1_bound_cutoff_validation():
    with pytest.raises(DomainError):
        dual_l1_bound(ZeroPotential(1), 1.0, 0)
