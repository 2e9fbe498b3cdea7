import numpy as np
import pytest

from warpfpca import Grid, clr_inverse


@pytest.fixture
def grid201():
    return Grid.uniform(0.0, 1.0, 201)


@pytest.fixture
def grid101():
    return Grid.uniform(0.0, 1.0, 101)


def random_positive_density(grid, rng, roughness=3):
    """Smooth strictly positive density of mass eta (exp of a random low-order poly)."""
    coeffs = rng.normal(scale=0.8, size=roughness)
    t = (grid.points - grid.a) / grid.eta
    log_f = sum(c * t ** (j + 1) for j, c in enumerate(coeffs))
    return clr_inverse(grid, log_f - np.mean(log_f))


def random_zero_integral_function(grid, rng, roughness=4):
    """Random smooth function with zero quadrature integral."""
    t = (grid.points - grid.a) / grid.eta
    f = sum(rng.normal() * np.sin(np.pi * (j + 1) * t) for j in range(roughness))
    f = f + rng.normal() * t
    return f - (f @ grid.weights) / grid.eta


def exponential_warpings(grid, rng, n, strength=1.5):
    """Smooth random warpings with derivatives bounded away from zero.

    Exponential-family warpings have bounded curvature at the endpoints,
    so finite-difference roundtrips converge at full second order
    (unlike power warpings with exponents below 1).
    """
    a = rng.uniform(-strength, strength, size=n)
    u = (grid.points - grid.a) / grid.eta
    rows = np.vstack([
        (np.expm1(ai * u) / np.expm1(ai)) if abs(ai) > 1e-8 else u for ai in a
    ])
    rows = grid.a + grid.eta * rows
    rows[:, 0], rows[:, -1] = grid.a, grid.b
    return rows
