"""Sampling from the closed unit ball and separation-radius statistics.

The domain is Ω = B̄(0, 1) in odd dimension d with the uniform density.
Every sampler takes a seed (an integer or a numpy SeedSequence) and is a
pure function of its arguments.
"""

from dataclasses import dataclass, field
import logging
from math import ceil
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.special import gammainc

from laplacelab.errors import (DuplicatePointError, ParameterError,
    InvalidInputError)
from laplacelab.setting import (DUPLICATE_REDRAWS, DUPLICATE_THRESHOLD,
    RADII_BLOCK_ROWS)
from laplacelab.utils import (as_points, ball_volume, check_odd_dimension,
    half_integer_gamma, sphere_area)

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]

@dataclass(frozen=True)
class Domain:
    """Closed unit ball with the uniform density ρ = 1 / vol(B_d)."""
    d: int
    radius: float = 1.0
    density_id: str = 'uniform'

    def __post_init__(self):
        check_odd_dimension(self.d)
        if self.radius != 1.0:
            raise ParameterError('only the unit ball is supported')
        if self.density_id != 'uniform':
            raise ParameterError(
                f'unsupported density {self.density_id!r}')

    @property
    def volume(self) -> float:
        return ball_volume(self.d, self.radius)

    @property
    def density(self) -> float:
        return 1.0 / self.volume

@dataclass(frozen=True)
class TargetFunction:
    """Smooth, not identically zero regression function f_0 on Ω.

    Attributes:
        id: const_one, gauss_bump or coord_linear
        evaluator: vectorized map from an (m, d) array to m values
    """
    id: str
    evaluator: Callable[[np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, points) -> np.ndarray:
        return self.evaluator(as_points(points))

    def l2_norm_sq_on_omega(self, d: int) -> float:
        """Return ‖f_0‖²_{L²(Ω)} in closed form."""
        check_odd_dimension(d)
        if self.id == 'const_one':
            return ball_volume(d)
        if self.id == 'coord_linear':
            return ball_volume(d) / (d + 2)
        # ∫_0^1 e^{-a r²} r^{d-1} dr = γ(d/2, a) / (2 a^{d/2})
        a = 2 * GAUSS_BUMP_RATE
        radial = (gammainc(d / 2, a) * half_integer_gamma(d)
            / (2 * a ** (d / 2)))
        return sphere_area(d) * radial

GAUSS_BUMP_RATE = 2.0

TARGETS: Dict[str, TargetFunction] = {
    'const_one': TargetFunction(
        'const_one', lambda x: np.ones(x.shape[0])),
    'gauss_bump': TargetFunction(
        'gauss_bump',
        lambda x: np.exp(-GAUSS_BUMP_RATE * np.sum(x * x, axis=1))),
    'coord_linear': TargetFunction(
        'coord_linear', lambda x: x[:, 0].copy())
}

def find_target(f0: Union[str, TargetFunction]) -> TargetFunction:
    """Return the TargetFunction for an id (or pass one through)."""
    if isinstance(f0, TargetFunction):
        return f0
    if f0 not in TARGETS:
        raise ParameterError(
            f'unknown target {f0!r}; choose from {sorted(TARGETS)}')
    return TARGETS[f0]

@dataclass(frozen=True, eq=False)
class SampleSet:
    """Design points in Ω with labels Y_i = f_0(X_i) + ξ_i."""
    points: np.ndarray
    targets: np.ndarray
    noise: np.ndarray
    f0_id: str
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def with_targets(self, targets: np.ndarray) -> 'SampleSet':
        """Same points and noise, different labels."""
        return SampleSet(self.points, np.asarray(targets, dtype=float),
            self.noise, self.f0_id, self.seed)

@dataclass(frozen=True, eq=False)
class SeparationStats:
    radii: np.ndarray
    include_boundary: bool
    power_averages: Dict[int, float]
    sum_rd: float

@dataclass(frozen=True, eq=False)
class BulkSubset:
    """Middle quantile band of the radii with its realized bounds."""
    indices: np.ndarray
    r_min: float
    r_max: float

def _seed_int(seed: SeedLike) -> Optional[int]:
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        return int(entropy) if isinstance(entropy, (int, np.integer)) else None
    return int(seed)

def sample_uniform_ball(n: int, d: int, seed: SeedLike) -> np.ndarray:
    """Draw n points uniformly from the closed unit ball in R^d.

    Direction is a normalized Gaussian vector and the radius is U^{1/d},
    so P(‖X‖ <= t) = t^d.
    """
    check_odd_dimension(d)
    if n < 0:
        raise ParameterError(f'n must be >= 0, got {n}')
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((n, d))
    radius = rng.random(n) ** (1.0 / d)
    norms = np.linalg.norm(gauss, axis=1)
    norms[norms == 0.0] = 1.0
    return gauss / norms[:, None] * radius[:, None]

def sample_in_balls(centers: np.ndarray, radii: np.ndarray,
        per_ball: int, seed: SeedLike) -> np.ndarray:
    """Uniform points in each ball B(centers[i], radii[i]).

    Returns an array of shape (len(centers), per_ball, d).
    """
    centers = as_points(centers)
    k, d = centers.shape
    unit = sample_uniform_ball(k * per_ball, d, seed).reshape(k, per_ball, d)
    return centers[:, None, :] + unit * np.asarray(radii)[:, None, None]

def attach_labels(points, f0: Union[str, TargetFunction],
        seed: SeedLike) -> SampleSet:
    """Attach Rademacher-noise labels Y_i = f_0(X_i) + ξ_i to points."""
    target = find_target(f0)
    points = as_points(points)
    rng = np.random.default_rng(seed)
    noise = np.where(rng.random(points.shape[0]) < 0.5, -1.0, 1.0)
    clean = target(points) if points.shape[0] else np.zeros(0)
    return SampleSet(points, clean + noise, noise, target.id,
        _seed_int(seed))

def min_pairwise_distance(points: np.ndarray):
    """Return (distance, i, j) of the closest pair, or None if n < 2."""
    if points.shape[0] < 2:
        return None
    distances, indices = cKDTree(points).query(points, k=2)
    i = int(np.argmin(distances[:, 1]))
    return float(distances[i, 1]), i, int(indices[i, 1])

def draw_sample(n: int, d: int, f0: Union[str, TargetFunction],
        seed: int, stream: Tuple[int, ...] = ()) -> SampleSet:
    """Draw a labelled sample, redrawing on duplicate points.

    Points and noise come from independent children of
    SeedSequence(seed, spawn_key=stream), so identical arguments give
    bit-identical samples.
    """
    root = np.random.SeedSequence(seed, spawn_key=stream)
    for attempt in range(DUPLICATE_REDRAWS + 1):
        point_seed, noise_seed = root.spawn(2)
        points = sample_uniform_ball(n, d, point_seed)
        closest = min_pairwise_distance(points)
        if closest is None or closest[0] > DUPLICATE_THRESHOLD:
            sample = attach_labels(points, f0, noise_seed)
            return SampleSet(sample.points, sample.targets, sample.noise,
                sample.f0_id, seed)
        logger.warning('duplicate points %d and %d in draw %d, redrawing',
            closest[1], closest[2], attempt)
    raise DuplicatePointError((closest[1], closest[2]), closest[0])

def _check_duplicates(nearest: np.ndarray, partner: np.ndarray):
    close = np.flatnonzero(nearest <= DUPLICATE_THRESHOLD)
    if close.size:
        i = int(close[0])
        raise DuplicatePointError((i, int(partner[i])), float(nearest[i]))

def separation_radii(points, include_boundary: bool = True,
        method: str = 'exact') -> np.ndarray:
    """Return r_i = min(min_{j≠i} ‖X_i - X_j‖, dist(X_i, ∂Ω)).

    Args:
        points: (n, d) array inside the unit ball
        include_boundary: take the boundary distance 1 - ‖X_i‖ into the
            minimum; off gives the pure nearest-neighbour distance
        method: 'exact' (blocked O(n²) scan) or 'kdtree'

    Raises:
        DuplicatePointError: two points closer than 1e-12.
    """
    points = as_points(points)
    n = points.shape[0]
    if method not in ('exact', 'kdtree'):
        raise ParameterError(f'unknown method {method!r}')
    if n < 2 and not include_boundary:
        raise ParameterError(
            'nearest-neighbour radii need at least two points')
    nearest = np.full(n, np.inf)
    partner = np.full(n, -1)
    if n >= 2 and method == 'exact':
        for start in range(0, n, RADII_BLOCK_ROWS):
            stop = min(start + RADII_BLOCK_ROWS, n)
            block = cdist(points[start:stop], points)
            rows = np.arange(stop - start)
            block[rows, start + rows] = np.inf
            partner[start:stop] = np.argmin(block, axis=1)
            nearest[start:stop] = block[rows, partner[start:stop]]
    elif n >= 2:
        distances, indices = cKDTree(points).query(points, k=2)
        nearest = distances[:, 1]
        partner = indices[:, 1]
    _check_duplicates(nearest, partner)
    if include_boundary:
        boundary = 1.0 - np.linalg.norm(points, axis=1)
        if np.any(boundary < 0):
            raise InvalidInputError('points lie outside the unit ball')
        return np.minimum(nearest, boundary)
    return nearest

def power_average(radii, k: float) -> float:
    """Return (1/n) Σ r_i^k."""
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or np.any(radii <= 0):
        raise ParameterError('power averages need positive radii')
    if k < -1:
        raise ParameterError(f'k must be >= -1, got {k}')
    return float(np.mean(radii ** k))

def separation_stats(points, include_boundary: bool = True) -> SeparationStats:
    """Radii plus the power averages for k in {-1, 1, ..., d}."""
    points = as_points(points)
    d = points.shape[1]
    radii = separation_radii(points, include_boundary)
    averages = {k: power_average(radii, k) for k in [-1] + list(range(1, d + 1))}
    return SeparationStats(radii, include_boundary, averages,
        float(np.sum(radii ** d)))

def bulk_subset(radii, alpha: float) -> BulkSubset:
    """Keep the radii inside the symmetric quantile band of mass alpha.

    (1 - alpha)/2 of the sorted radii is trimmed from each tail; ties with
    the band edges stay in, so at least ceil(alpha n) indices remain.
    """
    if not 0 < alpha < 1:
        raise ParameterError(f'alpha must be in (0, 1), got {alpha}')
    radii = np.asarray(radii, dtype=float)
    n = radii.size
    if n == 0:
        raise ParameterError('bulk subset of an empty radii vector')
    ordered = np.sort(radii)
    trim = (n - ceil(alpha * n)) // 2
    low, high = ordered[trim], ordered[n - 1 - trim]
    indices = np.flatnonzero((radii >= low) & (radii <= high))
    return BulkSubset(indices, float(low), float(high))
