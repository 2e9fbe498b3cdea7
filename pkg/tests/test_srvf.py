import numpy as np
import pytest

from warpfpca import (
    DegenerateWarning,
    Grid,
    check_srvf,
    check_warping,
    identity_warping,
    image_diagnostics,
    inner_product,
    norm,
    power_warping,
    srvf_forward,
    srvf_inverse,
    tangent_inverse,
    tangent_project,
)


class TestSrvfForward:
    def test_identity_maps_to_constant_one(self, grid201):
        q = srvf_forward(grid201, identity_warping(grid201))
        np.testing.assert_allclose(q, np.ones(201), atol=1e-9)

    def test_power_warping_closed_form(self, grid201):
        # q(t) = sqrt(k t^(k-1)) for gamma = t^k; the stored density is
        # quadrature-normalized, which perturbs the closed form by the
        # trapezoid error of the mass (about 1e-5 at 201 points)
        k = 3.0
        gamma, density = power_warping(grid201, k)
        q = srvf_forward(grid201, gamma, density=density)
        expected = np.sqrt(k * grid201.points ** (k - 1.0))
        assert np.max(np.abs(q[1:] - expected[1:])) < 5e-5

    @pytest.mark.parametrize("k", [0.4, 1.0, 2.5, 5.0])
    def test_unit_sphere_norm(self, grid201, k):
        q = srvf_forward(grid201, grid201.points**k)
        assert inner_product(grid201, q, q) == pytest.approx(1.0, abs=1e-6)
        check_srvf(grid201, q)

    def test_rejects_negative_values(self, grid201):
        bad = np.ones(201)
        bad[3] = -0.5
        with pytest.raises(ValueError):
            check_srvf(grid201, bad)


class TestTangentProject:
    def test_reference_maps_to_zero(self, grid201):
        mu = np.ones(201)
        proj = tangent_project(grid201, mu, mu)
        assert proj.theta == 0.0
        np.testing.assert_allclose(proj.values, 0.0, atol=1e-12)

    def test_quartic_angle_closed_form(self, grid201):
        # for gamma = t^4 the angle is arccos(2 sqrt(k)/(k+1)) = arccos(0.8)
        gamma, density = power_warping(grid201, 4.0)
        q = srvf_forward(grid201, gamma, density=density)
        proj = tangent_project(grid201, q)
        assert proj.theta == pytest.approx(np.arccos(0.8), abs=1e-3)
        assert norm(grid201, proj.values) == pytest.approx(0.6435, abs=1e-3)

    def test_norm_equals_angle(self, grid201):
        rng = np.random.default_rng(1)
        for k in np.exp(rng.normal(scale=0.5, size=30)):
            q = srvf_forward(grid201, grid201.points**k)
            proj = tangent_project(grid201, q)
            assert norm(grid201, proj.values) == pytest.approx(proj.theta, abs=1e-9)

    def test_orthogonal_to_reference(self, grid201):
        rng = np.random.default_rng(2)
        mu = np.ones(201)
        for k in np.exp(rng.normal(scale=0.5, size=100)):
            q = srvf_forward(grid201, grid201.points**k)
            v = tangent_project(grid201, q, mu).values
            assert abs(inner_product(grid201, v, mu)) < 1e-6

    def test_degenerate_orthogonal_warning(self, grid201):
        # an input orthogonal to the reference sits at the right-angle
        # boundary, where the projection degenerates; nonnegative inputs
        # can only approach this limit, so construct it directly
        mu = np.ones(201)
        q = np.sin(2.0 * np.pi * grid201.points)
        q = q - inner_product(grid201, q, mu) / grid201.eta
        q = q * (np.sqrt(grid201.eta) / norm(grid201, q))
        with pytest.warns(DegenerateWarning):
            tangent_project(grid201, q, mu)


class TestTangentInverse:
    def test_zero_maps_to_reference(self, grid201):
        mu = np.ones(201)
        point = tangent_inverse(grid201, np.zeros(201), mu)
        np.testing.assert_array_equal(point.values, mu)
        assert point.in_positive_orthant

    def test_roundtrip_on_sphere(self, grid201):
        for k in [0.3, 0.8, 1.5, 4.0]:
            q = srvf_forward(grid201, grid201.points**k)
            proj = tangent_project(grid201, q)
            assert proj.theta < np.pi / 2
            back = tangent_inverse(grid201, proj.values)
            assert np.max(np.abs(back.values - q)) < 1e-6

    def test_sphere_norm_for_random_tangents(self, grid201):
        rng = np.random.default_rng(3)
        mu = np.ones(201)
        for _ in range(20):
            raw = rng.normal(size=201)
            raw -= inner_product(grid201, raw, mu) * mu / grid201.eta
            scale = rng.uniform(0.05, 3.1)
            v = scale * raw / norm(grid201, raw)
            s = tangent_inverse(grid201, v, mu).values
            assert inner_product(grid201, s, s) == pytest.approx(1.0, abs=1e-6)


class TestSrvfInverse:
    def test_constant_one_gives_identity(self, grid201):
        gamma = srvf_inverse(grid201, np.ones(201))
        np.testing.assert_allclose(gamma, identity_warping(grid201), atol=1e-12)

    @pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 3.5])
    def test_roundtrip_power_family(self, grid201, k):
        gamma = grid201.points**k
        back = srvf_inverse(grid201, srvf_forward(grid201, gamma))
        h = grid201.points[1] - grid201.points[0]
        assert np.max(np.abs(back - gamma)) < 40.0 * h

    def test_sign_changes_still_give_valid_warping(self, grid201):
        # functions on the full sphere may dip negative; squaring still
        # produces a monotone warping
        s = np.cos(4.0 * np.pi * grid201.points)
        s = s / norm(grid201, s)
        gamma = srvf_inverse(grid201, s)
        check_warping(grid201, gamma)


class TestImageDiagnostics:
    def test_zero_vector_all_ok(self, grid201):
        diag = image_diagnostics(grid201, np.zeros(201))
        assert diag.all_ok and diag.norm_v == 0.0

    def test_projections_always_pass(self, grid201):
        rng = np.random.default_rng(4)
        for k in np.exp(rng.normal(scale=0.6, size=50)):
            q = srvf_forward(grid201, grid201.points**k)
            v = tangent_project(grid201, q).values
            diag = image_diagnostics(grid201, v)
            assert diag.all_ok
            assert diag.norm_v <= np.pi / 2 + 1e-8

    def test_pointwise_violation_detected(self, grid201):
        # a tangent vector dipping below -1/sqrt(eta) cannot be a projection
        v = -2.0 * np.cos(np.pi * grid201.points)
        v -= inner_product(grid201, v, np.ones(201)) / grid201.eta
        diag = image_diagnostics(grid201, v)
        assert not diag.pointwise_ok
        s = tangent_inverse(grid201, v)
        assert not s.in_positive_orthant
        # ... yet the final back-transform is still a valid warping
        check_warping(grid201, srvf_inverse(grid201, s.values))

    def test_flags_consistent_with_fields(self, grid201):
        v = np.zeros(201)
        v[0] = -3.0
        v -= inner_product(grid201, v, np.ones(201)) / grid201.eta
        diag = image_diagnostics(grid201, v)
        assert diag.pointwise_ok == (np.min(v) >= -1.0 / np.sqrt(grid201.eta) - 1e-8)


class TestGeneralInterval:
    def test_machinery_off_unit_interval(self):
        # same identities on [1, 3]: eta = 2, reference is still constant 1
        g = Grid.uniform(1.0, 3.0, 151)
        u = (g.points - g.a) / g.eta
        gamma = g.a + g.eta * u**2
        q = srvf_forward(g, gamma)
        assert inner_product(g, q, q) == pytest.approx(g.eta, rel=1e-6)
        proj = tangent_project(g, q)
        assert norm(g, proj.values) == pytest.approx(proj.theta, abs=1e-9)
        back = srvf_inverse(g, tangent_inverse(g, proj.values).values)
        assert np.max(np.abs(back - gamma)) < 5e-2
