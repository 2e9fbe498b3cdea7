"""Seedable synthetic warping and amplitude data for tests and demos.

Randomness is drawn from the Philox counter-based bit generator and
turned into variates with fully specified algorithms (Box-Muller
normals, Marsaglia-Tsang gamma rejection), so a fixed seed reproduces
the exact same samples across platforms and library versions.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .grids import Grid, integrate
from .joint import compose

__all__ = [
    "CounterRandom",
    "sample_gamma",
    "power_warping",
    "make_power_warpings",
    "PowerWarpingSample",
    "ToyJointSample",
    "make_toy_joint",
]


class CounterRandom:
    """Uniform and normal variates from a counter-based bit generator.

    Uniforms are ``((raw >> 11) + 1) * 2**-53``, i.e. in ``(0, 1]``;
    normals come from the Box-Muller transform of consecutive uniform
    pairs. Both constructions depend only on the Philox raw stream.
    """

    def __init__(self, seed: int):
        self._bits = np.random.Philox(key=int(seed))
        self._buffer = np.empty(0, dtype=np.uint64)
        self._index = 0
        self._spare_normal: Optional[float] = None

    def uniform(self) -> float:
        if self._index >= self._buffer.size:
            self._buffer = self._bits.random_raw(4096)
            self._index = 0
        raw = int(self._buffer[self._index])
        self._index += 1
        return ((raw >> 11) + 1) * 2.0**-53

    def normal(self) -> float:
        if self._spare_normal is not None:
            z, self._spare_normal = self._spare_normal, None
            return z
        u1, u2 = self.uniform(), self.uniform()
        radius = np.sqrt(-2.0 * np.log(u1))
        self._spare_normal = radius * np.sin(2.0 * np.pi * u2)
        return radius * np.cos(2.0 * np.pi * u2)

    def normals(self, n: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(n)])


def sample_gamma(shape: float, rate: float, size: int, seed: int) -> np.ndarray:
    """Gamma variates by Marsaglia-Tsang rejection on a counter-based stream.

    For shape >= 1: with ``d = shape - 1/3`` and ``c = 1/sqrt(9 d)``,
    accept ``d * (1 + c x)**3`` for standard normal ``x`` when the
    squeeze ``u < 1 - 0.0331 x**4`` or the exact log test holds. For
    shape < 1 the shape is boosted by one and the result multiplied by
    ``u**(1/shape)``. Identical seeds give bitwise identical output.
    """
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    src = CounterRandom(seed)
    boost = shape < 1.0
    d = (shape + 1.0 if boost else shape) - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(int(size))
    for i in range(int(size)):
        while True:
            x = src.normal()
            v = (1.0 + c * x) ** 3
            if v <= 0.0:
                continue
            u = src.uniform()
            if u < 1.0 - 0.0331 * x**4:
                break
            if np.log(u) < 0.5 * x * x + d * (1.0 - v + np.log(v)):
                break
        g = d * v
        if boost:
            g *= src.uniform() ** (1.0 / shape)
        out[i] = g
    return out / rate


def power_warping(grid: Grid, exponent: float):
    """Power warping ``((t - a)/eta)**k`` mapped onto ``[a, b]``, with density.

    The attached density is the analytic derivative evaluated on the
    grid. Where the derivative diverges at an endpoint (``k < 1`` at the
    left end), the endpoint value is replaced by the one making the
    adjacent cell's trapezoidal mass exact, which is the best grid
    representative of the singular density. The density is rescaled so
    its quadrature integral is exactly ``eta``.
    """
    k = float(exponent)
    if k <= 0:
        raise ValueError(f"exponent must be positive, got {k!r}")
    t = grid.points
    u = (t - grid.a) / grid.eta
    gamma = grid.a + grid.eta * u**k
    gamma[0], gamma[-1] = grid.a, grid.b
    if k == 1.0:
        density = np.ones(len(grid))
    else:
        with np.errstate(divide="ignore", over="ignore"):
            density = k * u ** (k - 1.0)
    if not np.isfinite(density[0]):
        density[0] = max(2.0 * (gamma[1] - gamma[0]) / (t[1] - t[0]) - density[1], 0.0)
    if not np.isfinite(density[-1]):
        density[-1] = max(2.0 * (gamma[-1] - gamma[-2]) / (t[-1] - t[-2]) - density[-2], 0.0)
    density *= grid.eta / integrate(grid, density)
    return gamma, density


class PowerWarpingSample(NamedTuple):
    grid: Grid
    warpings: np.ndarray
    densities: np.ndarray
    exponents: np.ndarray


def make_power_warpings(
    n_samples: int = 50,
    grid_size: int = 201,
    *,
    shape: float = 5.0,
    rate: float = 5.0,
    seed: int = 0,
) -> PowerWarpingSample:
    """Random power warpings with gamma-distributed exponents on ``[0, 1]``.

    The exponent distribution has mean ``shape / rate`` (identity
    warping on average for the defaults) and each warping carries its
    analytic density.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    grid = Grid.uniform(0.0, 1.0, grid_size)
    exponents = sample_gamma(shape, rate, n_samples, seed)
    warpings = np.empty((n_samples, grid_size))
    densities = np.empty((n_samples, grid_size))
    for i, k in enumerate(exponents):
        warpings[i], densities[i] = power_warping(grid, k)
    return PowerWarpingSample(grid, warpings, densities, exponents)


class ToyJointSample(NamedTuple):
    grid: Grid
    W: np.ndarray
    G: np.ndarray
    X: np.ndarray
    exponents: np.ndarray
    amplitudes: np.ndarray


def make_toy_joint(
    n_samples: int = 50,
    grid_size: int = 201,
    *,
    shape: float = 5.0,
    rate: float = 5.0,
    amplitude_scale: float = 0.1,
    seed: int = 0,
) -> ToyJointSample:
    """Joint toy data: power warpings plus scaled sine amplitudes.

    Registered functions are ``w_i(t) = (1 + a_i) sin(2 pi t)`` with
    ``a_i`` Gaussian of standard deviation ``amplitude_scale``; observed
    curves ``x_i = w_i(gamma_i(t))`` are composed at generation time.
    Setting ``amplitude_scale=0`` gives phase-only variation; sampling
    with ``shape = rate -> infinity`` (or replacing ``G`` by identity
    rows) gives amplitude-only variation.
    """
    sample = make_power_warpings(
        n_samples, grid_size, shape=shape, rate=rate, seed=seed
    )
    amp_rng = CounterRandom(seed + 1)
    amplitudes = amplitude_scale * amp_rng.normals(n_samples)
    base = np.sin(2.0 * np.pi * sample.grid.points)
    W = (1.0 + amplitudes)[:, None] * base
    X = np.vstack([compose(sample.grid, w, g) for w, g in zip(W, sample.warpings)])
    return ToyJointSample(sample.grid, W, sample.warpings, X, sample.exponents, amplitudes)
