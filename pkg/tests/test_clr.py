import numpy as np
import pytest

from conftest import random_positive_density

from warpfpca import (
    ClrDomainWarning,
    Grid,
    check_density,
    clr_forward,
    clr_inverse,
    density_inner,
    density_perturb,
    density_power,
    inner_product,
    integrate,
    power_warping,
)


def double_integral_inner(grid, f, g):
    """Independent oracle: (1/2 eta) double integral of log-ratio products."""
    lf = np.log(f)
    lg = np.log(g)
    w = grid.weights
    diff_f = lf[:, None] - lf[None, :]
    diff_g = lg[:, None] - lg[None, :]
    return float(w @ (diff_f * diff_g) @ w) / (2.0 * grid.eta)


class TestClrForward:
    def test_uniform_density_maps_to_zero(self, grid201):
        np.testing.assert_allclose(clr_forward(grid201, np.ones(201)), 0.0, atol=1e-14)

    def test_linear_density_closed_form(self):
        # f = 2t gives log t + 1 since the mean of log(2x) over [0,1] is log 2 - 1;
        # a boundary-refined grid keeps the floored t=0 sample from biasing the mean
        g = Grid.refined(0.0, 1.0, 201)
        _, f = power_warping(g, 2.0)
        with pytest.warns(ClrDomainWarning):
            v = clr_forward(g, f)
        expected = np.log(g.points[1:]) + 1.0
        inner = g.points[1:] > 0.01
        assert np.max(np.abs(v[1:][inner] - expected[inner])) < 1e-2

    def test_zero_integral_for_random_densities(self, grid201):
        rng = np.random.default_rng(0)
        for _ in range(100):
            f = random_positive_density(grid201, rng)
            v = clr_forward(grid201, f)
            assert abs(integrate(grid201, v)) < 1e-8

    def test_floor_warns(self, grid201):
        f = np.ones(201)
        f[0] = 0.0
        f *= grid201.eta / integrate(grid201, f)
        with pytest.warns(ClrDomainWarning):
            clr_forward(grid201, f)


class TestClrInverse:
    def test_zero_maps_to_uniform(self, grid201):
        np.testing.assert_allclose(clr_inverse(grid201, np.zeros(201)), 1.0, atol=1e-14)

    def test_constant_shift_is_identified(self, grid201):
        # proportional densities are the same equivalence class
        np.testing.assert_allclose(clr_inverse(grid201, 3.7 * np.ones(201)), 1.0, atol=1e-12)

    def test_roundtrip_strictly_positive(self, grid201):
        rng = np.random.default_rng(1)
        for _ in range(20):
            f = random_positive_density(grid201, rng)
            back = clr_inverse(grid201, clr_forward(grid201, f))
            assert np.max(np.abs(back - f)) < 1e-6

    def test_total_on_arbitrary_functions(self, grid201):
        # the inverse is defined on the whole function space
        rng = np.random.default_rng(2)
        for _ in range(10):
            v = rng.normal(scale=2.0, size=201)
            check_density(grid201, clr_inverse(grid201, v))

    def test_inverse_on_general_interval(self):
        g = Grid.uniform(-1.0, 2.0, 101)
        f = clr_inverse(g, np.zeros(101))
        np.testing.assert_allclose(f, 1.0, atol=1e-14)
        assert integrate(g, f) == pytest.approx(g.eta)


class TestDensityOperations:
    def test_uniform_is_neutral_for_perturbation(self, grid201):
        rng = np.random.default_rng(3)
        f = random_positive_density(grid201, rng)
        np.testing.assert_allclose(density_perturb(grid201, f, np.ones(201)), f, atol=1e-12)

    def test_powering_identities(self, grid201):
        rng = np.random.default_rng(4)
        f = random_positive_density(grid201, rng)
        np.testing.assert_allclose(density_power(grid201, 1.0, f), f, atol=1e-12)
        np.testing.assert_allclose(density_power(grid201, 0.0, f), 1.0, atol=1e-12)

    def test_linearity_under_clr(self, grid201):
        # perturbation and powering become addition and scaling after the transform
        rng = np.random.default_rng(5)
        f = random_positive_density(grid201, rng)
        g = random_positive_density(grid201, rng)
        lhs = clr_forward(grid201, density_perturb(grid201, f, g))
        rhs = clr_forward(grid201, f) + clr_forward(grid201, g)
        assert np.max(np.abs(lhs - rhs)) < 1e-8
        alpha = -1.3
        lhs = clr_forward(grid201, density_power(grid201, alpha, f))
        rhs = alpha * clr_forward(grid201, f)
        assert np.max(np.abs(lhs - rhs)) < 1e-8

    def test_isometry_against_double_integral_oracle(self, grid201):
        rng = np.random.default_rng(6)
        for _ in range(25):
            f = random_positive_density(grid201, rng)
            g = random_positive_density(grid201, rng)
            oracle = double_integral_inner(grid201, f, g)
            assert density_inner(grid201, f, g) == pytest.approx(oracle, abs=1e-6 * (1 + abs(oracle)))

    def test_inner_matches_transformed_inner(self, grid201):
        rng = np.random.default_rng(7)
        f = random_positive_density(grid201, rng)
        g = random_positive_density(grid201, rng)
        direct = inner_product(grid201, clr_forward(grid201, f), clr_forward(grid201, g))
        assert density_inner(grid201, f, g) == pytest.approx(direct, abs=1e-12)
