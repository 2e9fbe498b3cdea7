"""Univariate functional PCA on a shared grid.

The covariance operator is discretized with quadrature weights: with
``W`` the diagonal weight matrix and ``K`` the sample covariance over
grid points, the symmetric eigenproblem of ``W^(1/2) K W^(1/2)`` yields
eigenfunctions that are exactly orthonormal under the quadrature inner
product after back-scaling by ``W^(-1/2)``.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import GridMismatchError, InsufficientDataError, TruncationError
from .grids import Grid, check_grid_function

__all__ = ["FunctionalPCA", "weighted_pca"]

# Covariance uses divisor N (not N - 1) so that the total variance agrees
# exactly with the empirical metric-space variance identities downstream.
_SIGN_MOMENT_ORDERS = 3


class WeightedPCAResult(NamedTuple):
    mean: np.ndarray
    eigenvalues: np.ndarray
    components: np.ndarray  # (n_points, n_points), columns are eigenfunctions
    scores: np.ndarray


def _orient_components(components: np.ndarray, points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Fix eigenfunction signs: first nonzero quadrature moment positive.

    Moments against 1, t, t^2, ... (t rescaled to [0, 1]) are scanned in
    order; the component is flipped if the first moment exceeding a
    roundoff threshold is negative. Falls back to a positive left-end
    value. This makes fitted models deterministic across runs.
    """
    span = points[-1] - points[0]
    tau = (points - points[0]) / span if span > 0 else points
    for m in range(components.shape[1]):
        phi = components[:, m]
        sign = 0.0
        for r in range(_SIGN_MOMENT_ORDERS):
            moment = float(np.sum(weights * tau**r * phi))
            tol = 1e-9 * float(np.sqrt(np.sum(weights * tau ** (2 * r))))
            if abs(moment) > tol:
                sign = moment
                break
        if sign == 0.0:
            sign = phi[0] if phi[0] != 0 else 1.0
        if sign < 0:
            components[:, m] = -phi
    return components


def weighted_pca(X: np.ndarray, points: np.ndarray, weights: np.ndarray) -> WeightedPCAResult:
    """Quadrature-weighted PCA of a sample of discretized functions.

    Parameters
    ----------
    X : ndarray of shape (n_samples, n_points)
        One function per row.
    points : ndarray of shape (n_points,)
        Abscissae, used only for the deterministic sign convention.
    weights : ndarray of shape (n_points,)
        Quadrature weights defining the inner product.

    Returns
    -------
    WeightedPCAResult
        Mean function, the full clipped descending eigenvalue spectrum,
        eigenfunctions (columns, orthonormal under the weights), and the
        full score matrix.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / n
    sqrt_w = np.sqrt(weights)
    sym = (sqrt_w[:, None] * cov) * sqrt_w[None, :]
    eigvals, eigvecs = np.linalg.eigh(sym)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    components = eigvecs[:, order] / sqrt_w[:, None]
    components = _orient_components(components, np.asarray(points, float), weights)
    scores = (centered * weights) @ components
    return WeightedPCAResult(mean, eigvals, components, scores)


class FunctionalPCA(BaseEstimator):
    """Functional principal component analysis of functions on a grid.

    Parameters
    ----------
    n_components : int, optional
        Number of components to keep for scoring and reconstruction.
        Defaults to ``min(n_samples, n_points)``.

    Attributes
    ----------
    grid_ : Grid or None
        Grid supplied at fit time (None when raw weights were given).
    points_, weights_ : np.ndarray
        Abscissae and quadrature weights actually used.
    mean_ : np.ndarray of shape (n_points,)
        Pointwise sample mean.
    eigenvalues_ : np.ndarray of shape (n_points,)
        Full descending spectrum, negatives clipped to zero. Their sum
        equals the integrated pointwise sample variance (divisor N).
    components_ : np.ndarray of shape (n_components_, n_points)
        Kept eigenfunctions, orthonormal under the quadrature inner
        product, with a deterministic sign convention.
    scores_ : np.ndarray of shape (n_samples, n_components_)
        Training scores; each column has zero mean and variance equal to
        the corresponding eigenvalue.
    explained_variance_ratio_ : np.ndarray
        ``eigenvalues_ / eigenvalues_.sum()``.
    """

    def __init__(self, n_components: Optional[int] = None):
        self.n_components = n_components

    def fit(self, X, grid: Optional[Grid] = None, *, points=None, weights=None) -> "FunctionalPCA":
        """Fit on a sample matrix with one function per row.

        Either a :class:`Grid` or explicit ``points`` and ``weights``
        arrays must be provided; the latter form supports concatenated
        functions whose quadrature weights are not trapezoidal.
        """
        if grid is not None:
            X = check_grid_function(grid, X)
            points = grid.points
            weights = grid.weights
        elif points is None or weights is None:
            raise ValueError("provide either grid or both points and weights")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be 2D with one function per row")
        points = np.asarray(points, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if X.shape[1] != points.size or points.size != weights.size:
            raise GridMismatchError(
                f"X has {X.shape[1]} columns but {points.size} points / "
                f"{weights.size} weights were given"
            )
        result = weighted_pca(X, points, weights)
        m = self.n_components or min(X.shape)
        if m > result.components.shape[1]:
            raise TruncationError(
                f"requested {m} components but only {result.components.shape[1]} exist"
            )
        self.grid_ = grid
        self.points_ = points
        self.weights_ = weights
        self.mean_ = result.mean
        self.eigenvalues_ = result.eigenvalues
        self.components_ = result.components[:, :m].T
        self.scores_ = result.scores[:, :m]
        self.n_components_ = m
        total = result.eigenvalues.sum()
        self.explained_variance_ratio_ = (
            result.eigenvalues / total if total > 0 else np.zeros_like(result.eigenvalues)
        )
        return self

    def _require_fitted(self) -> None:
        if not hasattr(self, "mean_"):
            raise ValueError("model is not fitted; call fit first")

    def transform(self, X) -> np.ndarray:
        """Project functions onto the kept components (out-of-sample scores)."""
        self._require_fitted()
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        rows = X[None, :] if single else X
        if rows.shape[1] != self.points_.size:
            raise GridMismatchError(
                f"functions have {rows.shape[1]} values but the model grid has "
                f"{self.points_.size} points"
            )
        scores = ((rows - self.mean_) * self.weights_) @ self.components_.T
        return scores[0] if single else scores

    def fit_transform(self, X, grid: Optional[Grid] = None, **kwargs) -> np.ndarray:
        self.fit(X, grid, **kwargs)
        return self.scores_

    def inverse_transform(self, scores, n_components: Optional[int] = None) -> np.ndarray:
        """Truncated reconstruction: mean plus the weighted component sum.

        ``n_components`` may be any count up to the number of kept
        components; passing more raises :class:`TruncationError`. With
        zero components the mean is returned.
        """
        self._require_fitted()
        scores = np.asarray(scores, dtype=float)
        single = scores.ndim == 1
        rows = scores[None, :] if single else scores
        m = rows.shape[1] if n_components is None else int(n_components)
        if m > self.n_components_:
            raise TruncationError(
                f"requested {m} components but the model keeps {self.n_components_}"
            )
        if m > rows.shape[1]:
            raise TruncationError(f"got {rows.shape[1]} scores but {m} components requested")
        recon = self.mean_ + rows[:, :m] @ self.components_[:m]
        return recon[0] if single else recon
