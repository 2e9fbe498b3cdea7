"""The space of warping functions and its density representation.

A warping function is an endpoint-pinned, strictly increasing function
of ``[a, b]`` onto itself. Differentiating a warping yields a
nonnegative density integrating to the interval length ``eta``; the
differential map and its inverse (cumulative integration) link the two
representations one-to-one.
"""

from __future__ import annotations

import numpy as np

from .exceptions import EndpointError, MonotonicityError
from .grids import Grid, check_grid_function, cumulative_integral, integrate

__all__ = [
    "check_warping",
    "check_density",
    "warping_to_density",
    "density_to_warping",
    "identity_warping",
]

ENDPOINT_TOL = 1e-10
DENSITY_REL_TOL = 1e-8


def identity_warping(grid: Grid) -> np.ndarray:
    """The identity warping, which leaves time untouched."""
    return grid.points.copy()


def check_warping(grid: Grid, values, *, endpoint_tol: float = ENDPOINT_TOL) -> np.ndarray:
    """Validate warping functions (1D, or 2D with one warping per row).

    Checks, at grid resolution, that each function is pinned to the
    interval endpoints, strictly increasing, and stays inside ``[a, b]``.

    Raises
    ------
    EndpointError
        If ``gamma(a) != a`` or ``gamma(b) != b`` beyond ``endpoint_tol``,
        or values leave ``[a, b]``; the message names the offending row
        and index.
    MonotonicityError
        If consecutive values fail to increase; the message reports the
        offending indices.
    """
    arr = check_grid_function(grid, values)
    rows = arr[None, :] if arr.ndim == 1 else arr
    for i, g in enumerate(rows):
        where = f"warping {i}: " if arr.ndim == 2 else ""
        if abs(g[0] - grid.a) > endpoint_tol:
            raise EndpointError(
                f"{where}value at index 0 is {g[0]!r}, expected {grid.a!r}"
            )
        if abs(g[-1] - grid.b) > endpoint_tol:
            raise EndpointError(
                f"{where}value at index {len(g) - 1} is {g[-1]!r}, expected {grid.b!r}"
            )
        diffs = np.diff(g)
        if np.any(diffs <= 0):
            bad = np.flatnonzero(diffs <= 0)
            raise MonotonicityError(
                f"{where}not strictly increasing at indices {bad[:5].tolist()}"
                + ("..." if bad.size > 5 else "")
            )
        if np.any(g < grid.a - endpoint_tol) or np.any(g > grid.b + endpoint_tol):
            bad = int(np.flatnonzero((g < grid.a - endpoint_tol) | (g > grid.b + endpoint_tol))[0])
            raise EndpointError(f"{where}value at index {bad} leaves [{grid.a}, {grid.b}]")
    return arr


def check_density(grid: Grid, values, *, rel_tol: float = DENSITY_REL_TOL) -> np.ndarray:
    """Validate densities: nonnegative values integrating to ``eta``.

    The class representative of a density is normalized to total mass
    ``eta = b - a``; the integral is checked to relative tolerance
    ``rel_tol``.
    """
    arr = check_grid_function(grid, values)
    rows = arr[None, :] if arr.ndim == 1 else arr
    for i, f in enumerate(rows):
        where = f"density {i}: " if arr.ndim == 2 else ""
        if np.any(f < 0):
            bad = int(np.argmin(f))
            raise ValueError(f"{where}negative value {f[bad]!r} at index {bad}")
        total = integrate(grid, f)
        if abs(total - grid.eta) > rel_tol * grid.eta:
            raise ValueError(
                f"{where}integral is {total!r}, expected {grid.eta!r} "
                f"(relative tolerance {rel_tol})"
            )
    return arr


def warping_to_density(grid: Grid, gamma: np.ndarray) -> np.ndarray:
    """Differentiate a warping function into its density representative.

    Uses central differences at interior points and one-sided
    differences at the endpoints, floors the result at zero, and
    rescales so the quadrature integral is exactly ``eta``. The output
    always satisfies the density invariants.
    """
    gamma = np.asarray(gamma, dtype=float)
    f = np.gradient(gamma, grid.points)
    f = np.maximum(f, 0.0)
    total = integrate(grid, f)
    if total <= 0:
        raise MonotonicityError("warping has no increase anywhere on the grid")
    return f * (grid.eta / total)


def density_to_warping(grid: Grid, density: np.ndarray) -> np.ndarray:
    """Integrate a density back into a warping function.

    Returns ``a + cumulative_integral(density)`` with the right endpoint
    re-pinned exactly. The result is monotone non-decreasing, and
    strictly increasing whenever the density is positive everywhere.
    """
    density = np.asarray(density, dtype=float)
    gamma = grid.a + cumulative_integral(grid, density)
    gamma[0] = grid.a
    gamma[-1] = grid.b
    return gamma
