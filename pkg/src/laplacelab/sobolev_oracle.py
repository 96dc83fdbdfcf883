"""Grid-based Fourier check of the RKHS norm formula in dimension 1.

A function is sampled on a uniform periodic grid over [-L, L), its
unitary transform is approximated by the FFT, and the convention norm
∫ (1 + p²/c²) |Ff(p)|² dp is summed over the discrete frequencies.

An interpolant has a kink at every data point. Two close kinks hold a
large share of the derivative energy between them, which a grid only
sees once its spacing is well below their distance; verify_prop_a1
therefore sizes the grid from the closest pair of points.
"""

from dataclasses import dataclass
from math import inf
from typing import Callable, Optional

import numpy as np

from laplacelab.errors import ParameterError, ResolutionError, TruncationError
from laplacelab.geometry import SampleSet
from laplacelab.interpolant import convention_norm, fit_min_norm
from laplacelab.kernel import KernelConfig
from laplacelab.setting import (GRID_DECAY_LENGTHS, GRID_DEFAULT_POINTS,
    GRID_EDGE_FRACTION, GRID_EDGE_TOLERANCE, GRID_MAX_POINTS,
    GRID_POINTS_PER_GAP)

@dataclass(frozen=True, eq=False)
class GridFunction1D:
    """Samples f(-L + j h), j = 0 .. m-1, h = 2L / m."""
    half_width: float
    values: np.ndarray

    @property
    def m(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / self.m

    @property
    def edge_magnitude(self) -> float:
        """Largest |value| in the outer 1% of the grid on either side."""
        width = max(1, int(GRID_EDGE_FRACTION * self.m))
        edges = np.concatenate([self.values[:width], self.values[-width:]])
        return float(np.max(np.abs(edges)))

@dataclass(frozen=True)
class NormRatioReport:
    ratio: float
    fourier_norm: float
    kernel_norm: float
    half_width: float
    m: int
    edge_magnitude: float
    exact_zero: bool
    min_gap: float = inf

def grid_points(half_width: float, m: int) -> np.ndarray:
    return -half_width + 2 * half_width * np.arange(m) / m

def render_on_grid(func: Callable[[np.ndarray], np.ndarray],
        half_width: float, m: int = GRID_DEFAULT_POINTS) -> GridFunction1D:
    """Sample a vectorized evaluator on the grid."""
    if half_width <= 0:
        raise ParameterError(f'half_width must be positive, got {half_width}')
    if m < 2 or m & (m - 1):
        raise ParameterError(f'grid size must be a power of two, got {m}')
    x = grid_points(half_width, m)
    return GridFunction1D(float(half_width),
        np.asarray(func(x.reshape(-1, 1)), dtype=float))

def _power_spectrum(f: GridFunction1D):
    """Frequencies, |Ff(p_k)|² and the frequency spacing."""
    peak = float(np.max(np.abs(f.values))) if f.m else 0.0
    edge = f.edge_magnitude
    if edge > GRID_EDGE_TOLERANCE * peak:
        raise TruncationError(edge, peak)
    h = f.spacing
    spectrum = np.abs(np.fft.fft(f.values)) ** 2 * h ** 2 / (2 * np.pi)
    frequencies = 2 * np.pi * np.fft.fftfreq(f.m, d=h)
    return frequencies, spectrum, 2 * np.pi / (f.m * h)

def l2_norm_sq_1d(f: GridFunction1D) -> float:
    """Plancherel term ∫ |Ff|² dp alone."""
    _, spectrum, step = _power_spectrum(f)
    return float(np.sum(spectrum) * step)

def fourier_convention_norm_1d(f: GridFunction1D, c: float) -> float:
    """∫ (1 + p²/c²) |Ff(p)|² dp from the grid samples.

    Raises:
        TruncationError: f is not negligible at the grid edge.
    """
    if c <= 0:
        raise ParameterError(f'bandwidth must be positive, got {c}')
    frequencies, spectrum, step = _power_spectrum(f)
    return float(np.sum((1 + (frequencies / c) ** 2) * spectrum) * step)

def default_half_width(sample: SampleSet, c: float) -> float:
    """Data extent plus 40 decay lengths of the kernel."""
    extent = float(np.max(np.abs(sample.points))) if sample.n else 0.0
    return max(extent, 1.0) + GRID_DECAY_LENGTHS / c

def min_gap_1d(points) -> float:
    """Smallest distance between two of the points (inf for n < 2)."""
    ordered = np.sort(np.asarray(points, dtype=float).reshape(-1))
    if ordered.size < 2:
        return inf
    return float(np.min(np.diff(ordered)))

def resolving_points(sample: SampleSet, half_width: float) -> int:
    """Smallest power-of-two grid size, at least the default, that puts
    GRID_POINTS_PER_GAP grid steps between the two closest points.

    Raises:
        ResolutionError: even GRID_MAX_POINTS is too coarse.
    """
    gap = min_gap_1d(sample.points)
    m = GRID_DEFAULT_POINTS
    while 2 * half_width / m > gap / GRID_POINTS_PER_GAP:
        if m >= GRID_MAX_POINTS:
            raise ResolutionError(gap, 2 * half_width / GRID_MAX_POINTS)
        m *= 2
    return m

def verify_prop_a1(sample: SampleSet, c: float,
        half_width: Optional[float] = None,
        m: Optional[int] = None) -> NormRatioReport:
    """Compare the grid Fourier norm of f̂ with λ(0) αᵀGα.

    Both sides are the convention norm of the minimum-norm interpolant;
    their ratio is 1 when the Fourier formula of the RKHS norm holds.
    Without an explicit m the grid size comes from resolving_points.

    Raises:
        ResolutionError: the closest pair cannot be resolved.
    """
    if sample.d != 1:
        raise ParameterError('the grid check runs in dimension 1 only')
    width = half_width or default_half_width(sample, c)
    m = m or resolving_points(sample, width)
    cfg = KernelConfig(1, c, 'paper')
    model = fit_min_norm(cfg, sample)
    grid = render_on_grid(model.predict, width, m)
    fourier = fourier_convention_norm_1d(grid, c)
    kernel = convention_norm(model)
    exact_zero = not np.any(sample.targets)
    ratio = 1.0 if exact_zero else fourier / kernel
    return NormRatioReport(ratio, fourier, kernel, width, m,
        grid.edge_magnitude, exact_zero, min_gap_1d(sample.points))
