import numpy as np
import pytest

from warpfpca import (
    CLR,
    SRVF,
    TRANSFORMS,
    DegenerateError,
    FunctionalPCA,
    JointAmplitudePhasePCA,
    ParameterError,
    TruncationError,
    check_warping,
    clr_forward,
    compose,
    concatenate_functions,
    density_perturb,
    density_power,
    density_to_warping,
    evaluate_concatenated,
    frechet_mean,
    frechet_variance,
    identity_warping,
    joint_distance,
    make_toy_joint,
    norm,
    optimize_phase_weight,
    select_component_count,
    variance_decomposition,
    warping_to_density,
)


@pytest.fixture(scope="module")
def toy():
    return make_toy_joint(n_samples=20, grid_size=101, seed=42)


@pytest.fixture(scope="module")
def fitted(toy):
    model = JointAmplitudePhasePCA(method=CLR, phase_weight=1.0)
    return model.fit(toy.W, toy.G, toy.grid)


class TestFit:
    def test_weighted_orthonormality(self, fitted):
        grid, vgrid = fitted.grid_, fitted.phase_grid_
        C = fitted.phase_weight_
        kept = min(6, fitted.components_w_.shape[0])
        for i in range(kept):
            for j in range(i, kept):
                ip = (
                    fitted.components_w_[i] * fitted.components_w_[j] @ grid.weights
                    + C**2 * (fitted.components_v_[i] * fitted.components_v_[j] @ vgrid.weights)
                )
                assert ip == pytest.approx(1.0 if i == j else 0.0, abs=1e-6)

    def test_score_covariance_is_diagonal_spectrum(self, fitted):
        scores = fitted.scores_
        cov = scores.T @ scores / scores.shape[0]
        m = min(6, cov.shape[0])
        for i in range(m):
            for j in range(m):
                expected = fitted.eigenvalues_[i] if i == j else 0.0
                assert cov[i, j] == pytest.approx(expected, abs=1e-6)

    def test_identity_warpings_reduce_to_amplitude_fpca(self, toy):
        G = np.tile(identity_warping(toy.grid), (toy.W.shape[0], 1))
        model = JointAmplitudePhasePCA(method=CLR).fit(toy.W, G, toy.grid)
        # phase blocks vanish and eigenvalues match plain amplitude FPCA
        assert np.max(np.abs(model.components_v_[: model.n_components_])) < 1e-6
        uni = FunctionalPCA().fit(toy.W, toy.grid)
        np.testing.assert_allclose(
            model.eigenvalues_[:5], uni.eigenvalues_[:5], atol=1e-10
        )

    def test_identical_amplitudes_scale_by_phase_weight(self, toy):
        W = np.tile(toy.W[0], (toy.W.shape[0], 1))
        C = 2.0
        model = JointAmplitudePhasePCA(method=CLR, phase_weight=C).fit(W, toy.G, toy.grid)
        assert np.max(np.abs(model.components_w_[: model.n_components_])) < 1e-8
        uni = FunctionalPCA().fit(model.V_, model.phase_grid_)
        np.testing.assert_allclose(
            model.eigenvalues_[:5], C**2 * uni.eigenvalues_[:5], rtol=1e-10, atol=1e-12
        )

    def test_requires_two_samples(self, toy):
        from warpfpca import InsufficientDataError

        with pytest.raises(InsufficientDataError):
            JointAmplitudePhasePCA().fit(toy.W[:1], toy.G[:1], toy.grid)

    def test_invalid_weight(self, toy):
        with pytest.raises(ParameterError):
            JointAmplitudePhasePCA(phase_weight=-1.0).fit(toy.W, toy.G, toy.grid)

    @pytest.mark.parametrize("method", TRANSFORMS)
    def test_all_transforms_fit_and_reconstruct(self, toy, method):
        model = JointAmplitudePhasePCA(method=method, n_components=3)
        model.fit(toy.W, toy.G, toy.grid)
        _, G_hat, _ = model.reconstruct()
        check_warping(toy.grid, G_hat)


class TestConcatenation:
    def test_zero_phase_block(self, toy):
        concat = concatenate_functions(toy.grid, toy.W[0], np.zeros(len(toy.grid)), 1.0)
        n = len(toy.grid)
        np.testing.assert_array_equal(concat.values[n:], 0.0)

    def test_seam_value_is_left_closed(self, toy):
        v = clr_forward(toy.grid, warping_to_density(toy.grid, toy.G[0]))
        C = 1.7
        concat = concatenate_functions(toy.grid, toy.W[0], v, C)
        assert evaluate_concatenated(concat, toy.grid.b) == pytest.approx(C * v[0])

    @pytest.mark.parametrize("C", [0.5, 1.0, 2.0])
    def test_stack_equivalence(self, toy, C):
        model = JointAmplitudePhasePCA(method=CLR, phase_weight=C).fit(toy.W, toy.G, toy.grid)
        concat = concatenate_functions(toy.grid, toy.W, model.V_, C)
        plain = FunctionalPCA().fit(
            concat.values, points=concat.positions, weights=concat.weights
        )
        scale = max(model.eigenvalues_[0], 1e-30)
        for nu_joint, nu_concat in zip(model.eigenvalues_, plain.eigenvalues_):
            if nu_joint > 1e-12 * scale:
                assert nu_concat == pytest.approx(nu_joint, rel=1e-8)
            else:
                assert abs(nu_concat - nu_joint) < 1e-12 * scale


class TestComponentSelection:
    def test_worked_example(self):
        assert select_component_count([9.0, 0.9, 0.09, 0.009], 0.95) == 2

    def test_tiny_threshold_selects_one(self):
        assert select_component_count([9.0, 0.9, 0.09], 1e-9) == 1

    def test_all_zero_is_degenerate(self):
        with pytest.raises(DegenerateError):
            select_component_count([0.0, 0.0], 0.95)

    def test_threshold_range(self):
        with pytest.raises(ParameterError):
            select_component_count([1.0], 1.0)

    def test_fitted_selection_meets_threshold(self, fitted):
        ratios = np.cumsum(fitted.eigenvalues_) / fitted.eigenvalues_.sum()
        m = fitted.n_components_
        assert ratios[m - 1] > fitted.variance_threshold
        assert m == 1 or ratios[m - 2] <= fitted.variance_threshold


class TestReconstruction:
    def test_zero_components_give_mean_pair(self, fitted):
        W_hat, G_hat, _ = fitted.reconstruct(n_components=0)
        w_mean, gamma_mean = fitted.frechet_mean()
        np.testing.assert_allclose(W_hat[0], w_mean, atol=1e-12)
        np.testing.assert_allclose(G_hat[0], gamma_mean, atol=1e-12)

    def test_full_rank_recovers_observed_curves(self, toy):
        # smooth warpings: the transform roundtrip is second order, so the
        # full-rank identity holds to combined quadrature tolerance
        from conftest import exponential_warpings

        rng = np.random.default_rng(3)
        G = exponential_warpings(toy.grid, rng, toy.W.shape[0])
        model = JointAmplitudePhasePCA(method=CLR).fit(toy.W, G, toy.grid)
        _, _, X_hat = model.reconstruct(n_components=model._n_kept)
        assert np.max(np.abs(X_hat - model.X_)) < 1e-3

    def test_full_rank_on_power_toy_documented(self, toy):
        # power warpings with exponents below 1 limit the composed
        # roundtrip to O(h^k) near the left endpoint; pin that behavior
        model = JointAmplitudePhasePCA(method=CLR).fit(toy.W, toy.G, toy.grid)
        _, _, X_hat = model.reconstruct(n_components=model._n_kept)
        assert np.max(np.abs(X_hat - toy.X)) < 0.15
        # away from the singular corner the recovery is tight
        interior = toy.grid.points >= 0.1
        assert np.max(np.abs(X_hat[:, interior] - toy.X[:, interior])) < 5e-3

    def test_error_nonincreasing_in_components(self, toy, fitted):
        # the transformed-pair truncation error is exactly monotone; the
        # observed-curve error is monotone down to the discretization
        # floor of the composed reconstruction, where it may jitter
        x_errors, z_errors = [], []
        for m in range(0, 6):
            W_hat, _, X_hat = fitted.reconstruct(n_components=m)
            x_errors.append(np.mean(np.sum((toy.X - X_hat) ** 2 * toy.grid.weights, axis=1)))
            V_hat = fitted.mean_v_ + fitted.scores_[:, :m] @ fitted.components_v_[:m]
            z_errors.append(np.mean(
                np.sum((toy.W - W_hat) ** 2 * toy.grid.weights, axis=1)
                + np.sum((fitted.V_ - V_hat) ** 2 * fitted.phase_grid_.weights, axis=1)
            ))
        assert all(b <= a + 1e-12 for a, b in zip(z_errors, z_errors[1:]))
        assert all(b <= a + 1e-7 for a, b in zip(x_errors, x_errors[1:]))

    def test_arbitrary_scores_give_valid_warpings(self, fitted, toy):
        rng = np.random.default_rng(0)
        wild = rng.normal(scale=5.0, size=(4, 3)) * np.sqrt(fitted.eigenvalues_[:3])
        _, G_hat, _ = fitted.reconstruct(scores=wild, n_components=3)
        check_warping(toy.grid, G_hat)

    def test_truncation_guard(self, fitted):
        with pytest.raises(TruncationError):
            fitted.reconstruct(n_components=fitted._n_kept + 1)

    def test_out_of_sample_scores_match_training(self, fitted, toy):
        np.testing.assert_allclose(
            fitted.transform(toy.W, toy.G), fitted.scores_, atol=1e-8
        )


class TestPhaseWeightOptimization:
    def test_flat_objective_returns_neutral_weight(self, toy):
        G = np.tile(identity_warping(toy.grid), (toy.W.shape[0], 1))
        c = optimize_phase_weight(toy.grid, toy.W, G, n_components=2, method=CLR)
        assert c == 1.0

    def test_optimum_beats_bracket_endpoints(self, toy):
        def mse_at(weight):
            model = JointAmplitudePhasePCA(method=CLR, phase_weight=weight, n_components=2)
            model.fit(toy.W, toy.G, toy.grid)
            _, _, X_hat = model.reconstruct(n_components=2)
            return np.mean(np.sum((toy.X - X_hat) ** 2 * toy.grid.weights, axis=1))

        c = optimize_phase_weight(
            toy.grid, toy.W, toy.G, n_components=2, method=CLR, bounds=(0.1, 10.0)
        )
        assert 0.1 <= c <= 10.0
        assert mse_at(c) <= mse_at(0.1) + 1e-12
        assert mse_at(c) <= mse_at(10.0) + 1e-12

    def test_estimator_integration(self, toy):
        model = JointAmplitudePhasePCA(method=CLR, optimize_weight=True, n_components=2)
        model.fit(toy.W, toy.G, toy.grid)
        assert model.phase_weight_ > 0

    def test_requires_component_count(self, toy):
        model = JointAmplitudePhasePCA(method=CLR, optimize_weight=True)
        with pytest.raises(ParameterError):
            model.fit(toy.W, toy.G, toy.grid)

    def test_deterministic(self, toy):
        args = dict(n_components=2, method=CLR, bounds=(0.05, 20.0))
        c1 = optimize_phase_weight(toy.grid, toy.W, toy.G, **args)
        c2 = optimize_phase_weight(toy.grid, toy.W, toy.G, **args)
        assert c1 == c2


class TestFrechetStatistics:
    def test_single_sample_mean_is_the_sample(self, toy):
        w_mean, gamma_mean = frechet_mean(toy.grid, toy.W[:1], toy.G[:1], method=CLR)
        np.testing.assert_allclose(w_mean, toy.W[0], atol=1e-12)
        assert np.max(np.abs(gamma_mean - toy.G[0])) < 5e-2

    def test_identity_warpings_average_to_identity(self, toy):
        G = np.tile(identity_warping(toy.grid), (4, 1))
        _, gamma_mean = frechet_mean(toy.grid, toy.W[:4], G, method=CLR)
        np.testing.assert_allclose(gamma_mean, identity_warping(toy.grid), atol=1e-10)

    def test_clr_mean_matches_density_operations(self, toy):
        # the phase mean is the density-space average: perturb all
        # densities together, then take the 1/N power
        n = 6
        densities = [warping_to_density(toy.grid, g) for g in toy.G[:n]]
        acc = densities[0]
        for f in densities[1:]:
            acc = density_perturb(toy.grid, acc, f)
        bayes_mean = density_power(toy.grid, 1.0 / n, acc)
        expected = density_to_warping(toy.grid, bayes_mean)
        _, gamma_mean = frechet_mean(toy.grid, toy.W[:n], toy.G[:n], method=CLR)
        assert np.max(np.abs(gamma_mean - expected)) < 1e-8

    def test_variance_of_identical_samples_is_zero(self, toy):
        W = np.tile(toy.W[0], (5, 1))
        G = np.tile(toy.G[0], (5, 1))
        assert frechet_variance(toy.grid, W, G, method=CLR) == pytest.approx(0.0, abs=1e-20)

    def test_variance_equals_eigenvalue_sum(self, fitted):
        assert fitted.frechet_variance() == pytest.approx(
            float(fitted.eigenvalues_.sum()), rel=1e-8
        )

    def test_variance_equals_eigenvalue_sum_for_srvf_and_weights(self, toy):
        for method in (CLR, SRVF):
            for C in (0.5, 2.0):
                model = JointAmplitudePhasePCA(method=method, phase_weight=C)
                model.fit(toy.W, toy.G, toy.grid)
                assert model.frechet_variance() == pytest.approx(
                    float(model.eigenvalues_.sum()), rel=1e-8
                )

    def test_phase_weight_scaling_on_phase_only_data(self, toy):
        W = np.tile(toy.W[0], (toy.G.shape[0], 1))  # no amplitude variation
        v1 = frechet_variance(toy.grid, W, toy.G, method=CLR, phase_weight=1.0)
        v2 = frechet_variance(toy.grid, W, toy.G, method=CLR, phase_weight=2.0)
        assert v2 == pytest.approx(4.0 * v1, rel=1e-12)

    def test_decomposition_identities(self, fitted):
        total = fitted.frechet_variance()
        full = variance_decomposition(fitted.eigenvalues_, fitted.eigenvalues_.size)
        assert full.residual == 0.0 and full.ratio == pytest.approx(1.0)
        part = fitted.variance_decomposition(3)
        assert part.explained + part.residual == pytest.approx(total, rel=1e-8)


class TestMetric:
    def test_axioms_on_random_triples(self, toy):
        rng = np.random.default_rng(1)
        n = toy.W.shape[0]
        V = [clr_forward(toy.grid, warping_to_density(toy.grid, g)) for g in toy.G]
        for _ in range(50):
            i, j, k = rng.integers(0, n, size=3)
            C = float(rng.uniform(0.3, 3.0))
            d = lambda a, b: joint_distance(
                toy.grid, toy.W[a], toy.G[a], toy.W[b], toy.G[b],
                method=CLR, phase_weight=C, v1=V[a], v2=V[b],
            )
            dij, dji, dik, djk = d(i, j), d(j, i), d(i, k), d(j, k)
            assert dij >= 0.0
            assert dij == pytest.approx(dji, abs=1e-10)
            assert dik <= dij + djk + 1e-10
            assert d(i, i) == pytest.approx(0.0, abs=1e-10)

    def test_distance_matches_weighted_norm(self, toy):
        C = 1.5
        v1 = clr_forward(toy.grid, warping_to_density(toy.grid, toy.G[0]))
        v2 = clr_forward(toy.grid, warping_to_density(toy.grid, toy.G[1]))
        expected = np.sqrt(
            norm(toy.grid, toy.W[0] - toy.W[1]) ** 2 + C**2 * norm(toy.grid, v1 - v2) ** 2
        )
        got = joint_distance(
            toy.grid, toy.W[0], toy.G[0], toy.W[1], toy.G[1], method=CLR, phase_weight=C
        )
        assert got == pytest.approx(expected, rel=1e-12)
