"""Invertible maps from warping functions to square-integrable functions.

Four families are provided, each a map ``psi`` from densities to
functions plus the composition with differentiation that takes a
warping all the way to an unconstrained function:

* ``"srvf"``: square root of the density, projected onto the tangent
  space of the radius-``sqrt(eta)`` sphere at a reference point.
* ``"clr"``: centred log-ratio of the density; an isometry between the
  Hilbert space of densities and the zero-integral subspace.
* ``"log-hazard"``: log hazard rate, restricted to a subinterval that
  stops short of the right endpoint by a tail fraction.
* ``"log-quantile"``: negative log density evaluated along the quantile
  function, living on a uniform probability grid.

Forward maps take valid warpings (or their densities); inverse maps are
total on their stated domains and always return valid warpings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import (
    ClrDomainWarning,
    DegenerateWarning,
    HazardOverflowError,
    ParameterError,
    QuantileInversionError,
)
from .grids import Grid, check_grid_function, cumulative_integral, inner_product, integrate
from .warping import check_warping, density_to_warping, warping_to_density

__all__ = [
    "SRVF",
    "CLR",
    "LOG_HAZARD",
    "LOG_QUANTILE",
    "TRANSFORMS",
    "DENSITY_FLOOR",
    "TangentProjection",
    "SpherePoint",
    "ImageDiagnostics",
    "srvf_forward",
    "check_srvf",
    "tangent_project",
    "tangent_inverse",
    "srvf_inverse",
    "image_diagnostics",
    "clr_forward",
    "clr_inverse",
    "density_perturb",
    "density_power",
    "density_inner",
    "log_hazard_forward",
    "log_hazard_inverse",
    "log_quantile_forward",
    "log_quantile_inverse",
    "probability_grid",
    "image_grid",
    "transform_warping",
    "inverse_transform_warping",
    "WarpingTransformer",
]

SRVF = "srvf"
CLR = "clr"
LOG_HAZARD = "log-hazard"
LOG_QUANTILE = "log-quantile"
TRANSFORMS = (SRVF, CLR, LOG_HAZARD, LOG_QUANTILE)

# Relative floor applied to density values before logarithms; keeps the
# pipeline total near the degenerate flat-warping boundary.
DENSITY_FLOOR = 1e-10

# Below this angle (radians) the tangent maps switch to their limits.
_SMALL_ANGLE = 1e-8

# Strictness floor on squared sphere points, so integrated warpings are
# strictly increasing.
_SPHERE_FLOOR = 1e-12


def canonical_transform(method: str) -> str:
    """Normalize a transform name, accepting underscore spellings."""
    name = method.strip().lower().replace("_", "-")
    if name not in TRANSFORMS:
        raise ParameterError(f"unknown transform {method!r}; choose from {TRANSFORMS}")
    return name


def _resolve_density(grid: Grid, gamma, density) -> np.ndarray:
    if density is not None:
        return np.asarray(density, dtype=float)
    return warping_to_density(grid, np.asarray(gamma, dtype=float))


# ---------------------------------------------------------------------------
# Square-root velocity family


class TangentProjection(NamedTuple):
    """Tangent-space image of a sphere point, with its arc distance."""

    values: np.ndarray
    theta: float


class SpherePoint(NamedTuple):
    """Point on the radius-``sqrt(eta)`` sphere.

    ``in_positive_orthant`` reports whether all values are nonnegative,
    i.e. whether the point is a valid square-root density.
    """

    values: np.ndarray
    in_positive_orthant: bool


@dataclass(frozen=True)
class ImageDiagnostics:
    """Necessary conditions for membership in the tangent-projection image.

    All three flags true is necessary (not sufficient) for a tangent
    vector to be the projection of some valid square-root density.
    """

    norm_v: float
    theta_bound_ok: bool
    pointwise_ok: bool
    tangency_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.theta_bound_ok and self.pointwise_ok and self.tangency_ok


def default_reference(grid: Grid) -> np.ndarray:
    """Constant square-root density associated with the identity warping."""
    return np.ones(len(grid))


def check_srvf(grid: Grid, values, *, rel_tol: float = 1e-6) -> np.ndarray:
    """Validate a square-root density: nonnegative, squared norm ``eta``."""
    arr = check_grid_function(grid, values)
    if np.any(arr < 0):
        raise ValueError(f"square-root density has negative value at index {int(np.argmin(arr))}")
    sq = inner_product(grid, arr, arr)
    if abs(sq - grid.eta) > rel_tol * grid.eta:
        raise ValueError(
            f"squared norm is {sq!r}, expected {grid.eta!r} (relative tolerance {rel_tol})"
        )
    return arr


def srvf_forward(grid: Grid, gamma=None, *, density=None) -> np.ndarray:
    """Square-root density of a warping: elementwise sqrt of its density.

    Either the warping or a precomputed density may be supplied. The
    output squared quadrature norm equals ``eta`` exactly because the
    density is normalized to mass ``eta``.
    """
    f = _resolve_density(grid, gamma, density)
    return np.sqrt(f)


def tangent_project(grid: Grid, q: np.ndarray, reference: Optional[np.ndarray] = None) -> TangentProjection:
    """Project a square-root density onto the tangent space at a reference.

    The arc distance ``theta`` between ``q`` and the reference is
    ``arccos`` of their normalized inner product (clamped to ``[-1, 1]``
    against quadrature roundoff); the projected vector has norm exactly
    ``theta`` and zero inner product with the reference. Near zero arc
    distance the continuous limit ``(q - reference) / sqrt(eta)`` is
    used.

    A :class:`DegenerateWarning` is emitted when ``theta`` comes within
    1e-8 of ``pi/2``: such points correspond to nearly stepwise-constant
    warpings, where the projection degenerates.
    """
    q = np.asarray(q, dtype=float)
    mu = default_reference(grid) if reference is None else np.asarray(reference, dtype=float)
    cos_theta = np.clip(inner_product(grid, q, mu) / grid.eta, -1.0, 1.0)
    theta = float(np.arccos(cos_theta))
    if abs(theta - np.pi / 2) < _SMALL_ANGLE:
        warnings.warn(
            "projection is nearly orthogonal to the reference; the warping "
            "is close to stepwise constant",
            DegenerateWarning,
            stacklevel=2,
        )
    if theta < _SMALL_ANGLE:
        v = (q - mu) / np.sqrt(grid.eta)
    else:
        v = (theta / (np.sqrt(grid.eta) * np.sin(theta))) * (q - cos_theta * mu)
    return TangentProjection(v, theta)


def tangent_inverse(grid: Grid, v: np.ndarray, reference: Optional[np.ndarray] = None) -> SpherePoint:
    """Map a tangent vector back onto the sphere.

    The image lies on the full sphere of squared norm ``eta``;
    nonnegativity is not guaranteed for arbitrary tangent vectors, and
    the returned flag reports whether it holds. Vectors of norm below
    1e-8 map to the reference itself.
    """
    v = np.asarray(v, dtype=float)
    mu = default_reference(grid) if reference is None else np.asarray(reference, dtype=float)
    nv = np.sqrt(max(inner_product(grid, v, v), 0.0))
    if nv < _SMALL_ANGLE:
        s = mu.copy()
    else:
        s = np.cos(nv) * mu + np.sqrt(grid.eta) * np.sin(nv) * (v / nv)
    return SpherePoint(s, bool(np.min(s) >= 0.0))


def srvf_inverse(grid: Grid, s: np.ndarray) -> np.ndarray:
    """Integrate a sphere point back into a warping function.

    Accepts any function of squared norm ``eta`` (sign changes allowed;
    squaring discards them, so the output is always a valid warping,
    though possibly with atypical structure). The squared values are
    floored at a tiny positive level to keep the result strictly
    increasing.
    """
    if isinstance(s, SpherePoint):
        s = s.values
    s = np.asarray(s, dtype=float)
    f = np.maximum(s * s, _SPHERE_FLOOR)
    return density_to_warping(grid, f)


def image_diagnostics(grid: Grid, v: np.ndarray, reference: Optional[np.ndarray] = None) -> ImageDiagnostics:
    """Evaluate the necessary image-membership bounds for a tangent vector.

    Projections of valid square-root densities satisfy ``norm <= pi/2``
    and ``v(t) >= -eta**-0.5`` everywhere; a vector violating either
    bound cannot be such a projection, and mapping it back to the sphere
    may produce negative values.
    """
    v = np.asarray(v, dtype=float)
    mu = default_reference(grid) if reference is None else np.asarray(reference, dtype=float)
    nv = float(np.sqrt(max(inner_product(grid, v, v), 0.0)))
    tol = 1e-8
    return ImageDiagnostics(
        norm_v=nv,
        theta_bound_ok=bool(nv <= np.pi / 2 + tol),
        pointwise_ok=bool(np.min(v) >= -1.0 / np.sqrt(grid.eta) - tol),
        tangency_ok=bool(abs(inner_product(grid, v, mu)) <= 1e-6),
    )


# ---------------------------------------------------------------------------
# Centred log-ratio family


def _floored_log(grid: Grid, f: np.ndarray, *, warn: bool = True) -> np.ndarray:
    floor = DENSITY_FLOOR * grid.eta
    if warn and np.any(f < floor):
        warnings.warn(
            f"density values below {floor:g} were floored before taking logs",
            ClrDomainWarning,
            stacklevel=3,
        )
    return np.log(np.maximum(f, floor))


def clr_forward(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Centred log-ratio of a density: log values minus their mean level.

    The output integrates to zero, i.e. lies in the zero-integral
    subspace. Density values below ``DENSITY_FLOOR * eta`` are floored
    first and a :class:`ClrDomainWarning` is emitted; such values arise
    near degenerate, locally flat warpings.
    """
    f = np.asarray(f, dtype=float)
    lf = _floored_log(grid, f)
    return lf - integrate(grid, lf) / grid.eta


def clr_inverse(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Map any function back to a density by exponentiation and rescaling.

    Defined on all of the function space restricted to the grid; the
    output is positive with mass exactly ``eta``. Constant shifts of the
    input yield the same density (the inverse identifies the
    equivalence class).
    """
    v = np.asarray(v, dtype=float)
    e = np.exp(v - np.max(v))  # shift-invariant; guards overflow
    return e * (grid.eta / integrate(grid, e))


def density_perturb(grid: Grid, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Perturbation of densities: normalized pointwise product."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    prod = f * g
    total = integrate(grid, prod)
    if total <= 0:
        raise ValueError("perturbation has no mass; densities are disjointly supported")
    return prod * (grid.eta / total)


def density_power(grid: Grid, alpha: float, f: np.ndarray) -> np.ndarray:
    """Powering of a density: normalized pointwise power ``f**alpha``."""
    f = np.asarray(f, dtype=float)
    floor = DENSITY_FLOOR * grid.eta
    powered = np.maximum(f, floor) ** alpha
    return powered * (grid.eta / integrate(grid, powered))


def density_inner(grid: Grid, f: np.ndarray, g: np.ndarray) -> float:
    """Inner product of two densities in their Hilbert-space geometry.

    Computed through the centred log-ratio isometry; the equivalent
    double-integral log-ratio form serves as an independent test oracle.
    """
    return inner_product(grid, clr_forward(grid, f), clr_forward(grid, g))


# ---------------------------------------------------------------------------
# Log-hazard family


def _check_tail_fraction(tail_fraction: float) -> float:
    if not 0.0 < tail_fraction <= 0.5:
        raise ParameterError(
            f"tail_fraction must lie in (0, 0.5], got {tail_fraction!r}"
        )
    return float(tail_fraction)


def _head_mask(grid: Grid, tail_fraction: float) -> np.ndarray:
    cut = grid.b - tail_fraction * grid.eta
    return grid.points <= cut + 1e-12 * grid.eta


def log_hazard_forward(grid: Grid, f: np.ndarray, tail_fraction: float = 0.05) -> np.ndarray:
    """Log hazard rate of the distribution defined by a density.

    The distribution function is the rescaled warping (range ``[0, 1]``)
    and the hazard uses the probability-normalized density. Hazards
    diverge at the right endpoint, so the transform is meaningful only
    up to ``b - tail_fraction * eta``; beyond the cut the output is
    extended by its last value purely for grid alignment, and the
    inverse ignores the extension.
    """
    tail_fraction = _check_tail_fraction(tail_fraction)
    f = np.asarray(f, dtype=float)
    F = cumulative_integral(grid, f) / grid.eta
    mask = _head_mask(grid, tail_fraction)
    survival = np.maximum(1.0 - F, 1e-15)
    rate = (f / grid.eta) / survival
    h = _floored_log(grid, rate, warn=False)
    h[~mask] = h[mask][-1]
    return h


def log_hazard_inverse(grid: Grid, h: np.ndarray, tail_fraction: float = 0.05) -> np.ndarray:
    """Rebuild a density from a log hazard on the head subinterval.

    The survival identity turns the integrated hazard into the
    distribution function on ``[a, b - tail_fraction * eta]``; the
    remaining mass is spread uniformly over the tail, and the result is
    rescaled to total mass ``eta``.

    Raises
    ------
    HazardOverflowError
        If the integrated hazard saturates the distribution function
        (survival underflows) before the cut.
    """
    tail_fraction = _check_tail_fraction(tail_fraction)
    h = np.asarray(h, dtype=float)
    mask = _head_mask(grid, tail_fraction)
    rate = np.exp(np.minimum(h, 700.0))
    cum_hazard = cumulative_integral(grid, np.where(mask, rate, 0.0))
    head_hazard = cum_hazard[mask]
    if head_hazard[-1] > 690.0:
        raise HazardOverflowError(
            "distribution function reaches 1 before the tail cut; "
            "the hazard is too large to invert"
        )
    survival = np.exp(-head_hazard)
    f = np.empty(len(grid))
    f[mask] = grid.eta * rate[mask] * survival
    # uniform weight on the tail: spread the remaining mass evenly
    tail = ~mask
    if tail.any():
        f[tail] = grid.eta * survival[-1] / (grid.b - grid.points[mask][-1])
    return f * (grid.eta / integrate(grid, f))


# ---------------------------------------------------------------------------
# Log-quantile-density family


def probability_grid(n: int) -> Grid:
    """Uniform grid on ``[0, 1]`` used as the image domain of the quantile map."""
    return Grid.uniform(0.0, 1.0, n)


def log_quantile_forward(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Negative log density along the quantile function.

    The distribution function is rescaled to ``[0, 1]`` and inverted by
    monotone linear interpolation onto a uniform probability grid of the
    same length; the output lives on that probability grid.

    Raises
    ------
    QuantileInversionError
        If the distribution function is not strictly increasing at grid
        resolution (the density vanishes on a whole cell).
    """
    f = np.asarray(f, dtype=float)
    F = cumulative_integral(grid, f) / grid.eta
    if np.any(np.diff(F) <= 0):
        bad = int(np.flatnonzero(np.diff(F) <= 0)[0])
        raise QuantileInversionError(
            f"distribution function is flat over the cell starting at index {bad}; "
            "the quantile function is not defined at grid resolution"
        )
    F[0], F[-1] = 0.0, 1.0
    p = np.linspace(0.0, 1.0, len(grid))
    Q = np.interp(p, F, grid.points)
    f_at_Q = np.interp(Q, grid.points, f)
    return -_floored_log(grid, f_at_Q, warn=False)


def _warping_from_log_quantile(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Rebuild the warping whose quantile density is ``exp(u)``."""
    u = np.asarray(u, dtype=float).copy()
    # Endpoint values of the log quantile density diverge wherever the
    # density has a zero; linear extrapolation from the interior is
    # exact for log-linear tails and harmless elsewhere.
    u[0] = 2.0 * u[1] - u[2]
    u[-1] = 2.0 * u[-2] - u[-3]
    qd = np.exp(np.minimum(u, 700.0))
    p = np.linspace(0.0, 1.0, len(grid))
    pgrid = Grid(p)
    Q = cumulative_integral(pgrid, qd)
    if Q[-1] <= 0:
        raise QuantileInversionError("quantile density integrates to zero")
    Q = grid.a + Q * (grid.eta / Q[-1])  # normalize onto [a, b]
    F = np.interp(grid.points, Q, p)
    gamma = grid.a + grid.eta * F
    gamma[0], gamma[-1] = grid.a, grid.b
    return gamma


def log_quantile_inverse(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Rebuild a density from a log quantile density.

    The quantile density ``exp(u)`` is integrated into a quantile
    function, normalized to map ``[0, 1]`` onto ``[a, b]``, inverted to
    a distribution function on the target grid, and differentiated into
    a density of mass ``eta``. The output always satisfies the density
    invariants.
    """
    gamma = _warping_from_log_quantile(grid, u)
    return warping_to_density(grid, gamma)


# ---------------------------------------------------------------------------
# Unified warping-level maps


def image_grid(grid: Grid, method: str) -> Grid:
    """Grid on which transformed functions live.

    The log-quantile transform maps onto a uniform probability grid of
    the same length; the other transforms keep the input grid.
    """
    if canonical_transform(method) == LOG_QUANTILE:
        return probability_grid(len(grid))
    return grid


def transform_warping(
    grid: Grid,
    gamma,
    method: str,
    *,
    reference: Optional[np.ndarray] = None,
    tail_fraction: float = 0.05,
    density: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Map a warping to an unconstrained function under the chosen transform.

    The composition differentiates the warping into its density and
    applies the density-level map. A precomputed (e.g. analytic) density
    may be supplied to bypass finite differencing.
    """
    method = canonical_transform(method)
    f = _resolve_density(grid, gamma, density)
    if method == SRVF:
        return tangent_project(grid, np.sqrt(f), reference).values
    if method == CLR:
        return clr_forward(grid, f)
    if method == LOG_HAZARD:
        return log_hazard_forward(grid, f, tail_fraction)
    return log_quantile_forward(grid, f)


def inverse_transform_warping(
    grid: Grid,
    v: np.ndarray,
    method: str,
    *,
    reference: Optional[np.ndarray] = None,
    tail_fraction: float = 0.05,
) -> np.ndarray:
    """Map a transformed function back to a valid warping.

    Composes the density-level inverse with cumulative integration. The
    output passes warping validation for any finite input in the
    transform's stated domain.
    """
    method = canonical_transform(method)
    if method == SRVF:
        s = tangent_inverse(grid, v, reference)
        return srvf_inverse(grid, s.values)
    if method == CLR:
        return density_to_warping(grid, clr_inverse(grid, v))
    if method == LOG_HAZARD:
        return density_to_warping(grid, log_hazard_inverse(grid, v, tail_fraction))
    return density_to_warping(grid, log_quantile_inverse(grid, v))


class WarpingTransformer(BaseEstimator):
    """Transformer mapping warping functions to unconstrained functions.

    Rows of the input matrix are warping functions sampled on a common
    grid; ``transform`` maps them into the function space of the chosen
    method and ``inverse_transform`` maps arbitrary functions back to
    valid warpings. Follows the fit/transform estimator convention, so
    it composes with standard pipelines.

    Parameters
    ----------
    method : {"srvf", "clr", "log-hazard", "log-quantile"}, default="clr"
        Which transform family to use.
    reference : array-like, optional
        Reference square-root density for the tangent projection
        (``method="srvf"``). Defaults to the constant function
        associated with the identity warping.
    tail_fraction : float, default=0.05
        Tail cut parameter of the log-hazard transform, in ``(0, 0.5]``.
        The default cuts the warping at the 95% quantile.

    Attributes
    ----------
    grid_ : Grid
        Grid supplied at fit time.
    image_grid_ : Grid
        Grid on which transformed functions live.
    reference_ : np.ndarray
        Resolved reference square-root density (srvf method only).
    """

    def __init__(self, method: str = CLR, reference=None, tail_fraction: float = 0.05):
        self.method = method
        self.reference = reference
        self.tail_fraction = tail_fraction

    def fit(self, X, grid: Grid, y=None) -> "WarpingTransformer":
        """Validate parameters and the warping sample; store the grid."""
        method = canonical_transform(self.method)
        _check_tail_fraction(self.tail_fraction)
        check_warping(grid, X)
        self.grid_ = grid
        self.image_grid_ = image_grid(grid, method)
        if method == SRVF:
            mu = (
                default_reference(grid)
                if self.reference is None
                else check_srvf(grid, self.reference)
            )
            self.reference_ = mu
        return self

    def _require_fitted(self) -> None:
        if not hasattr(self, "grid_"):
            raise ParameterError("transformer is not fitted; call fit(X, grid) first")

    def fit_transform(self, X, grid: Grid, y=None) -> np.ndarray:
        return self.fit(X, grid).transform(X)

    def transform(self, X) -> np.ndarray:
        """Transform warpings (rows) into unconstrained functions (rows)."""
        self._require_fitted()
        X = check_warping(self.grid_, X)
        rows = X[None, :] if X.ndim == 1 else X
        out = np.vstack([
            transform_warping(
                self.grid_,
                g,
                self.method,
                reference=getattr(self, "reference_", None),
                tail_fraction=self.tail_fraction,
            )
            for g in rows
        ])
        return out[0] if X.ndim == 1 else out

    def inverse_transform(self, V) -> np.ndarray:
        """Map transformed functions (rows) back to valid warpings (rows)."""
        self._require_fitted()
        V = check_grid_function(self.image_grid_, V)
        rows = V[None, :] if V.ndim == 1 else V
        out = np.vstack([
            inverse_transform_warping(
                self.grid_,
                v,
                self.method,
                reference=getattr(self, "reference_", None),
                tail_fraction=self.tail_fraction,
            )
            for v in rows
        ])
        return out[0] if V.ndim == 1 else out
