"""Joint PCA of amplitude and phase variation.

Each observation is a pair of a registered (aligned) function ``w`` and
a warping function ``gamma``; the warping is first mapped to an
unconstrained function ``v`` by one of the invertible transforms. The
bivariate sample ``(w, v)`` is analyzed under the weighted inner
product ``<z1, z2> = <w1, w2> + C^2 <v1, v2>`` with phase weight
``C > 0``, which is equivalent to plain PCA of the stacked functions
``(w, C v)`` with block quadrature weights.

The induced distance on pairs,

    d(z1, z2) = sqrt(||w1 - w2||^2 + C^2 ||v1 - v2||^2),

makes the metric-space mean and variance of the pairs computable in
closed form: the mean is the pointwise mean with the phase part mapped
back through the inverse transform, and the variance is the integrated
pointwise variance, which equals the sum of all eigenvalues of the
joint decomposition.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import (
    DegenerateError,
    InsufficientDataError,
    OptimizationError,
    ParameterError,
    TruncationError,
)
from .fpca import weighted_pca
from .grids import Grid, check_grid_function
from .transforms import (
    WarpingTransformer,
    canonical_transform,
    image_grid,
    inverse_transform_warping,
    transform_warping,
)
from .warping import check_warping

__all__ = [
    "ConcatenatedFunctions",
    "concatenate_functions",
    "evaluate_concatenated",
    "select_component_count",
    "VarianceDecomposition",
    "variance_decomposition",
    "frechet_mean",
    "frechet_variance",
    "joint_distance",
    "optimize_phase_weight",
    "JointAmplitudePhasePCA",
]


def compose(grid: Grid, w: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Evaluate ``w`` at warped times by monotone linear interpolation."""
    return np.interp(np.asarray(gamma, float), grid.points, np.asarray(w, float))


# ---------------------------------------------------------------------------
# Concatenation (the "glueing" formulation, kept as an equivalence oracle)


class ConcatenatedFunctions(NamedTuple):
    """Amplitude and weighted phase parts glued side by side.

    The phase block is shifted onto ``[b, 2b - a)``; the seam position
    ``b`` therefore appears twice in ``positions`` (end of the amplitude
    block, start of the phase block). ``weights`` are the two blocks'
    trapezoidal weights, so PCA of the rows of ``values`` under these
    weights reproduces the joint decomposition exactly.
    """

    positions: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    seam: float


def concatenate_functions(grid: Grid, w, v, phase_weight: float = 1.0,
                          v_grid: Optional[Grid] = None) -> ConcatenatedFunctions:
    """Glue registered functions and weighted transformed warpings.

    ``w`` and ``v`` may be single functions or row-stacked samples of
    equal shape. The value at the seam follows the left-closed
    convention: the concatenated function at ``b`` is
    ``phase_weight * v(a)``.
    """
    if phase_weight <= 0:
        raise ParameterError(f"phase_weight must be positive, got {phase_weight!r}")
    v_grid = v_grid or grid
    w = check_grid_function(grid, w)
    v = check_grid_function(v_grid, v)
    if w.shape != v.shape:
        raise ValueError(f"shape mismatch between blocks: {w.shape} vs {v.shape}")
    positions = np.concatenate([grid.points, grid.b + (v_grid.points - v_grid.a)])
    values = np.concatenate([w, phase_weight * np.asarray(v, float)], axis=-1)
    weights = np.concatenate([grid.weights, v_grid.weights])
    return ConcatenatedFunctions(positions, values, weights, grid.b)


def evaluate_concatenated(concat: ConcatenatedFunctions, t: float) -> float:
    """Evaluate a single concatenated function, left-closed at the seam."""
    values = concat.values
    if values.ndim != 1:
        raise ValueError("evaluation expects a single concatenated function")
    n = values.size // 2
    if t < concat.seam:
        return float(np.interp(t, concat.positions[:n], values[:n]))
    return float(np.interp(t, concat.positions[n:], values[n:]))


# ---------------------------------------------------------------------------
# Component count selection and variance bookkeeping


def select_component_count(eigenvalues, threshold: float) -> int:
    """Smallest count whose cumulative share strictly exceeds the threshold.

    The denominator is the sum over all supplied eigenvalues.
    """
    if not 0.0 < threshold < 1.0:
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold!r}")
    nus = np.asarray(eigenvalues, dtype=float)
    total = nus.sum()
    if total <= 0.0:
        raise DegenerateError("all eigenvalues are zero; nothing to select")
    ratios = np.cumsum(nus) / total
    return int(np.argmax(ratios > threshold)) + 1


class VarianceDecomposition(NamedTuple):
    explained: float
    residual: float
    ratio: float


def variance_decomposition(eigenvalues, n_components: int) -> VarianceDecomposition:
    """Split total variance into the first ``n_components`` and the rest.

    ``explained + residual`` equals the metric-space variance of the
    sample, and ``ratio`` is the share appearing in the component-count
    selection rule.
    """
    nus = np.asarray(eigenvalues, dtype=float)
    if n_components < 0 or n_components > nus.size:
        raise TruncationError(
            f"n_components must lie in [0, {nus.size}], got {n_components}"
        )
    explained = float(nus[:n_components].sum())
    residual = float(nus[n_components:].sum())
    total = explained + residual
    return VarianceDecomposition(explained, residual, explained / total if total > 0 else 0.0)


# ---------------------------------------------------------------------------
# Metric-space statistics


def frechet_mean(
    grid: Grid,
    W,
    G,
    *,
    method: str = "clr",
    reference=None,
    tail_fraction: float = 0.05,
):
    """Metric-space mean of (registered function, warping) pairs.

    Returns the pointwise mean of the registered functions together with
    the warping obtained by back-transforming the pointwise mean of the
    transformed warpings.
    """
    W = check_grid_function(grid, np.atleast_2d(np.asarray(W, float)))
    G = check_warping(grid, np.atleast_2d(np.asarray(G, float)))
    V = np.vstack([
        transform_warping(grid, g, method, reference=reference, tail_fraction=tail_fraction)
        for g in G
    ])
    gamma_mean = inverse_transform_warping(
        grid, V.mean(axis=0), method, reference=reference, tail_fraction=tail_fraction
    )
    return W.mean(axis=0), gamma_mean


def frechet_variance(
    grid: Grid,
    W,
    G=None,
    *,
    V=None,
    method: str = "clr",
    phase_weight: float = 1.0,
    reference=None,
    tail_fraction: float = 0.05,
) -> float:
    """Metric-space variance: integrated pointwise variances, phase-weighted.

    Variances use divisor N, matching the eigenvalue-sum identity of the
    joint decomposition exactly. Either warpings ``G`` or precomputed
    transformed functions ``V`` may be supplied.
    """
    W = check_grid_function(grid, np.atleast_2d(np.asarray(W, float)))
    if W.shape[0] < 2:
        raise InsufficientDataError("variance needs at least 2 samples")
    if V is None:
        if G is None:
            raise ValueError("provide either warpings G or transformed functions V")
        G = check_warping(grid, np.atleast_2d(np.asarray(G, float)))
        V = np.vstack([
            transform_warping(grid, g, method, reference=reference, tail_fraction=tail_fraction)
            for g in G
        ])
    vgrid = image_grid(grid, method)
    var_w = np.mean((W - W.mean(axis=0)) ** 2, axis=0)
    var_v = np.mean((V - V.mean(axis=0)) ** 2, axis=0)
    return float(var_w @ grid.weights + phase_weight**2 * (var_v @ vgrid.weights))


def joint_distance(
    grid: Grid,
    w1,
    gamma1,
    w2,
    gamma2,
    *,
    method: str = "clr",
    phase_weight: float = 1.0,
    reference=None,
    tail_fraction: float = 0.05,
    v1=None,
    v2=None,
) -> float:
    """Distance between two (registered function, warping) pairs.

    The norm of the difference of the transformed pairs under the
    weighted inner product. Transformed warpings may be passed via
    ``v1``/``v2`` to avoid recomputation.
    """
    if phase_weight <= 0:
        raise ParameterError(f"phase_weight must be positive, got {phase_weight!r}")
    w1 = np.asarray(w1, float)
    w2 = np.asarray(w2, float)
    if v1 is None:
        v1 = transform_warping(grid, gamma1, method, reference=reference, tail_fraction=tail_fraction)
    if v2 is None:
        v2 = transform_warping(grid, gamma2, method, reference=reference, tail_fraction=tail_fraction)
    vgrid = image_grid(grid, method)
    dw = w1 - w2
    dv = np.asarray(v1, float) - np.asarray(v2, float)
    sq = dw**2 @ grid.weights + phase_weight**2 * (dv**2 @ vgrid.weights)
    return float(math.sqrt(max(sq, 0.0)))


# ---------------------------------------------------------------------------
# The joint estimator


class JointAmplitudePhasePCA(BaseEstimator):
    """Weighted bivariate PCA of registered functions and warpings.

    Parameters
    ----------
    method : {"srvf", "clr", "log-hazard", "log-quantile"}, default="clr"
        Transform applied to the warping functions.
    phase_weight : float, default=1.0
        Weight ``C`` of the phase block in the inner product. Ignored
        when ``optimize_weight`` is set.
    optimize_weight : bool, default=False
        Search for the weight minimizing the mean squared reconstruction
        error of the observed curves at ``n_components`` components.
        Requires ``n_components``.
    n_components : int, optional
        Retained component count. When None, the count is selected as
        the smallest one explaining more than ``variance_threshold`` of
        total variance.
    variance_threshold : float, default=0.95
        Share of variance used for automatic component selection.
    tail_fraction : float, default=0.05
        Tail cut of the log-hazard transform.
    reference : array-like, optional
        Reference square-root density for the srvf transform.
    weight_bounds : tuple of float, default=(1e-2, 1e2)
        Search bracket for ``optimize_weight``.

    Attributes
    ----------
    grid_, phase_grid_ : Grid
        Time grid and the grid of the transformed warpings.
    phase_weight_ : float
        Weight actually used (searched or given).
    mean_w_, mean_v_ : np.ndarray
        Bivariate mean components.
    components_w_, components_v_ : np.ndarray of shape (n_kept, n_points)
        Unstacked principal components; each pair has weighted norm 1.
    eigenvalues_ : np.ndarray
        Full descending spectrum of the joint decomposition.
    scores_ : np.ndarray of shape (n_samples, n_kept)
        Training scores under the weighted inner product.
    n_components_ : int
        Selected component count (reporting and default reconstruction).
    W_, G_, V_, X_ : np.ndarray
        Cached training blocks; ``X_`` holds the observed curves
        ``w(gamma(t))`` composed at ingest.
    """

    def __init__(
        self,
        method: str = "clr",
        phase_weight: float = 1.0,
        optimize_weight: bool = False,
        n_components: Optional[int] = None,
        variance_threshold: float = 0.95,
        tail_fraction: float = 0.05,
        reference=None,
        weight_bounds=(1e-2, 1e2),
    ):
        self.method = method
        self.phase_weight = phase_weight
        self.optimize_weight = optimize_weight
        self.n_components = n_components
        self.variance_threshold = variance_threshold
        self.tail_fraction = tail_fraction
        self.reference = reference
        self.weight_bounds = weight_bounds

    # -- fitting ------------------------------------------------------

    def fit(self, W, G, grid: Grid, X=None) -> "JointAmplitudePhasePCA":
        """Fit the joint decomposition.

        Parameters
        ----------
        W : array of shape (n_samples, n_points)
            Registered functions, one per row.
        G : array of shape (n_samples, n_points)
            Warping functions, one per row.
        grid : Grid
            Common grid of both blocks.
        X : array, optional
            Observed curves; composed from ``W`` and ``G`` when omitted.
        """
        canonical_transform(self.method)
        if not 0.0 < self.variance_threshold < 1.0:
            raise ParameterError(
                f"variance_threshold must lie in (0, 1), got {self.variance_threshold!r}"
            )
        W = check_grid_function(grid, W)
        G = check_warping(grid, G)
        if W.ndim != 2 or G.ndim != 2 or W.shape != G.shape:
            raise ValueError("W and G must be 2D arrays of identical shape")
        if W.shape[0] < 2:
            raise InsufficientDataError(f"need at least 2 samples, got {W.shape[0]}")

        self._transformer = WarpingTransformer(
            method=self.method,
            reference=self.reference,
            tail_fraction=self.tail_fraction,
        ).fit(G, grid)
        V = self._transformer.transform(G)
        if X is None:
            X = np.vstack([compose(grid, w, g) for w, g in zip(W, G)])
        else:
            X = check_grid_function(grid, X)

        if self.optimize_weight:
            if self.n_components is None:
                raise ParameterError(
                    "optimize_weight requires a fixed n_components; the weight "
                    "criterion is defined for a given component count"
                )
            weight = optimize_phase_weight(
                grid,
                W,
                G,
                n_components=self.n_components,
                method=self.method,
                bounds=self.weight_bounds,
                reference=self.reference,
                tail_fraction=self.tail_fraction,
                V=V,
                X=X,
            )
        else:
            weight = float(self.phase_weight)
            if weight <= 0:
                raise ParameterError(f"phase_weight must be positive, got {weight!r}")

        self.grid_ = grid
        self.phase_grid_ = image_grid(grid, self.method)
        self.W_, self.G_, self.V_, self.X_ = W, G, V, X
        self.phase_weight_ = weight
        self._decompose(weight)

        if self.n_components is not None:
            if self.n_components > self._n_kept:
                raise TruncationError(
                    f"requested {self.n_components} components but only "
                    f"{self._n_kept} are available"
                )
            self.n_components_ = int(self.n_components)
        else:
            self.n_components_ = min(
                select_component_count(self.eigenvalues_, self.variance_threshold),
                self._n_kept,
            )
        return self

    def _decompose(self, weight: float) -> None:
        grid, vgrid = self.grid_, self.phase_grid_
        stacked = np.concatenate([self.W_, weight * self.V_], axis=1)
        positions = np.concatenate([grid.points, grid.b + (vgrid.points - vgrid.a)])
        block_weights = np.concatenate([grid.weights, vgrid.weights])
        result = weighted_pca(stacked, positions, block_weights)
        n_points = len(grid)
        kept = min(self.W_.shape[0], stacked.shape[1])
        self._n_kept = kept
        self.mean_w_ = result.mean[:n_points]
        self.mean_v_ = result.mean[n_points:] / weight
        self.components_w_ = result.components[:n_points, :kept].T
        self.components_v_ = result.components[n_points:, :kept].T / weight
        self.eigenvalues_ = result.eigenvalues
        self.scores_ = result.scores[:, :kept]
        total = result.eigenvalues.sum()
        self.explained_variance_ratio_ = (
            result.eigenvalues / total if total > 0 else np.zeros_like(result.eigenvalues)
        )

    def _require_fitted(self) -> None:
        if not hasattr(self, "grid_"):
            raise ValueError("model is not fitted; call fit first")

    # -- scoring and reconstruction ------------------------------------

    def transform(self, W, G) -> np.ndarray:
        """Out-of-sample scores under the weighted inner product."""
        self._require_fitted()
        W = check_grid_function(self.grid_, np.atleast_2d(np.asarray(W, float)))
        G = check_warping(self.grid_, np.atleast_2d(np.asarray(G, float)))
        V = self._transformer.transform(G)
        C = self.phase_weight_
        scores_w = ((W - self.mean_w_) * self.grid_.weights) @ self.components_w_.T
        scores_v = ((V - self.mean_v_) * self.phase_grid_.weights) @ self.components_v_.T
        return scores_w + C**2 * scores_v

    def reconstruct(self, scores=None, n_components: Optional[int] = None):
        """Truncated reconstruction of registered, warping, and observed curves.

        Parameters
        ----------
        scores : array, optional
            Score rows; defaults to the training scores.
        n_components : int, optional
            Truncation count; defaults to the selected count. Zero gives
            the mean reconstruction.

        Returns
        -------
        (W_hat, G_hat, X_hat) : tuple of np.ndarray
            Reconstructed registered functions, warpings (always valid),
            and observed curves ``w_hat(gamma_hat(t))``.
        """
        self._require_fitted()
        scores = self.scores_ if scores is None else np.atleast_2d(np.asarray(scores, float))
        m = self.n_components_ if n_components is None else int(n_components)
        if m > self._n_kept:
            raise TruncationError(
                f"requested {m} components but only {self._n_kept} are available"
            )
        if m > scores.shape[1]:
            raise TruncationError(f"got {scores.shape[1]} scores but {m} components requested")
        W_hat = self.mean_w_ + scores[:, :m] @ self.components_w_[:m]
        V_hat = self.mean_v_ + scores[:, :m] @ self.components_v_[:m]
        G_hat = np.vstack([
            inverse_transform_warping(
                self.grid_,
                v,
                self.method,
                reference=getattr(self._transformer, "reference_", None),
                tail_fraction=self.tail_fraction,
            )
            for v in V_hat
        ])
        X_hat = np.vstack([compose(self.grid_, w, g) for w, g in zip(W_hat, G_hat)])
        return W_hat, G_hat, X_hat

    # -- metric-space statistics ---------------------------------------

    def frechet_mean(self):
        """Mean pair of the training sample under the joint metric."""
        self._require_fitted()
        gamma = inverse_transform_warping(
            self.grid_,
            self.V_.mean(axis=0),
            self.method,
            reference=getattr(self._transformer, "reference_", None),
            tail_fraction=self.tail_fraction,
        )
        return self.W_.mean(axis=0), gamma

    def frechet_variance(self) -> float:
        """Total variance of the training sample under the joint metric."""
        self._require_fitted()
        return frechet_variance(
            self.grid_,
            self.W_,
            V=self.V_,
            method=self.method,
            phase_weight=self.phase_weight_,
        )

    def variance_decomposition(self, n_components: Optional[int] = None) -> VarianceDecomposition:
        """Explained/residual variance split at the given truncation."""
        self._require_fitted()
        m = self.n_components_ if n_components is None else int(n_components)
        return variance_decomposition(self.eigenvalues_, m)


# ---------------------------------------------------------------------------
# Phase-weight optimization


def _reconstruction_objective(grid, vgrid, W, V, X, weight, m, method, reference, tail_fraction):
    stacked = np.concatenate([W, weight * V], axis=1)
    positions = np.concatenate([grid.points, grid.b + (vgrid.points - vgrid.a)])
    block_weights = np.concatenate([grid.weights, vgrid.weights])
    result = weighted_pca(stacked, positions, block_weights)
    n_points = len(grid)
    scores = result.scores[:, :m]
    W_hat = result.mean[:n_points] + scores @ result.components[:n_points, :m].T
    V_hat = (result.mean[n_points:] + scores @ result.components[n_points:, :m].T) / weight
    total = 0.0
    for x, w_hat, v_hat in zip(X, W_hat, V_hat):
        gamma_hat = inverse_transform_warping(
            grid, v_hat, method, reference=reference, tail_fraction=tail_fraction
        )
        x_hat = compose(grid, w_hat, gamma_hat)
        total += float((x - x_hat) ** 2 @ grid.weights)
    return total / X.shape[0]


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_phase_weight(
    grid: Grid,
    W,
    G,
    *,
    n_components: int,
    method: str = "clr",
    bounds=(1e-2, 1e2),
    rel_tol: float = 1e-4,
    reference=None,
    tail_fraction: float = 0.05,
    V=None,
    X=None,
) -> float:
    """Phase weight minimizing mean squared reconstruction error.

    Runs a golden-section search over the logarithm of the weight on the
    given bracket, refitting the joint decomposition at each candidate
    and reconstructing the observed curves with ``n_components``
    components. Deterministic for fixed inputs. A flat objective (e.g.
    all warpings equal to the identity) returns the neutral weight 1.

    Raises
    ------
    OptimizationError
        If the objective is non-finite over the whole bracket.
    """
    lo, hi = bounds
    if not 0 < lo < hi:
        raise ParameterError(f"invalid search bracket {bounds!r}")
    method = canonical_transform(method)
    W = check_grid_function(grid, W)
    G = check_warping(grid, G)
    if W.shape[0] < 2:
        raise InsufficientDataError("weight optimization needs at least 2 samples")
    if V is None:
        V = np.vstack([
            transform_warping(grid, g, method, reference=reference, tail_fraction=tail_fraction)
            for g in G
        ])
    if X is None:
        X = np.vstack([compose(grid, w, g) for w, g in zip(W, G)])
    vgrid = image_grid(grid, method)
    m = int(n_components)

    evaluated: dict[float, float] = {}

    def objective(log_c: float) -> float:
        key = round(log_c, 12)
        if key not in evaluated:
            evaluated[key] = _reconstruction_objective(
                grid, vgrid, W, V, X, math.exp(log_c), m, method, reference, tail_fraction
            )
        return evaluated[key]

    a, b = math.log(lo), math.log(hi)
    fa, fb = objective(a), objective(b)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)

    probes = [fa, fb, f1, f2]
    finite = [f for f in probes if math.isfinite(f)]
    if not finite:
        raise OptimizationError("reconstruction error is non-finite over the whole bracket")
    if max(finite) - min(finite) <= 1e-12 * (1.0 + abs(max(finite))):
        # flat objective: the weight is unidentified, return the neutral value
        return 1.0

    while (b - a) > rel_tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)

    best_log, best_val = min(evaluated.items(), key=lambda kv: (kv[1], kv[0]))
    if not math.isfinite(best_val):
        raise OptimizationError("reconstruction error is non-finite at the optimum")
    return math.exp(best_log)
