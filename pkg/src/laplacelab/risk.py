"""Monte Carlo risk and L² norm estimators and lower-bound diagnostics.

Estimators accept any evaluator: a callable mapping an (m, d) array to m
values (fitted Interpolant, WitnessInterpolant, TargetFunction or a
plain function). Every estimator is a pure function of its seed.
"""

from dataclasses import dataclass
from math import sqrt
from typing import Callable, Optional, Sequence, Union

import numpy as np

from laplacelab.errors import ParameterError
from laplacelab.geometry import (Domain, SampleSet, SeparationStats,
    TargetFunction, find_target, sample_in_balls, sample_uniform_ball)
from laplacelab.bump import build_witness, witness_convention_norm
from laplacelab.interpolant import Interpolant, convention_norm
from laplacelab.kernel import KernelConfig
from laplacelab.utils import ball_volume

Evaluator = Callable[[np.ndarray], np.ndarray]
MEASURES = ('population', 'lebesgue')

@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo mean with its standard error."""
    mean: float
    std_error: float
    m: int
    seed: int
    measure: str

@dataclass(frozen=True)
class Certificate:
    """Hölder-type lower-bound diagnostic with unit constants."""
    value: float
    clipped: float
    norm_bound: float
    index_count: int

def zero_function(points: np.ndarray) -> np.ndarray:
    return np.zeros(np.asarray(points).shape[0])

def residual(model: Evaluator, f0: Union[str, TargetFunction]) -> Evaluator:
    """x -> model(x) - f_0(x)."""
    target = find_target(f0)

    def difference(points: np.ndarray) -> np.ndarray:
        return model(points) - target(points)
    return difference

def _estimate(values: np.ndarray, scale: float, seed: int,
        measure: str) -> RiskEstimate:
    m = values.size
    mean = float(np.mean(values))
    std_error = float(np.std(values, ddof=1) / sqrt(m))
    return RiskEstimate(scale * mean, scale * std_error, m, seed, measure)

def _check_m(m: int):
    if m < 2:
        raise ParameterError(f'need at least 2 Monte Carlo points, got {m}')

def mc_l2_risk(model: Evaluator, f0: Union[str, TargetFunction],
        domain: Domain, m: int, seed: int) -> RiskEstimate:
    """E_{X~P} (f̂(X) - f_0(X))² under the uniform density on Ω."""
    _check_m(m)
    points = sample_uniform_ball(m, domain.d, seed)
    squared = residual(model, f0)(points) ** 2
    return _estimate(squared, 1.0, seed, 'population')

def mc_l2_norm_sq(func: Evaluator, domain: Domain, m: int,
        seed: int) -> RiskEstimate:
    """‖f‖²_{L²(Ω)} = vol(Ω) E_{X~Unif(Ω)} f(X)²."""
    _check_m(m)
    points = sample_uniform_ball(m, domain.d, seed)
    values = np.asarray(func(points), dtype=float) ** 2
    return _estimate(values, domain.volume, seed, 'lebesgue')

def local_residual_mass(model: Evaluator, f0: Union[str, TargetFunction],
        sample: SampleSet, radii, beta: float, quad_per_ball: int,
        seed: int) -> float:
    """Σ_i ∫_{B(X_i, β r_i / 2)} (f̂ - f_0)² by Monte Carlo per ball.

    With boundary-inclusive radii the balls are disjoint and inside Ω, so
    this lower-bounds ‖f̂ - f_0‖²_{L²(Ω)} up to sampling error.
    """
    if not 0 < beta < 1:
        raise ParameterError(f'beta must be in (0, 1), got {beta}')
    if quad_per_ball < 1:
        raise ParameterError('quad_per_ball must be positive')
    radii = np.asarray(radii, dtype=float)
    ball_radii = beta * radii / 2
    points = sample_in_balls(sample.points, ball_radii, quad_per_ball, seed)
    d = sample.d
    flat = points.reshape(-1, d)
    squared = (residual(model, f0)(flat) ** 2).reshape(sample.n, quad_per_ball)
    volumes = np.array([ball_volume(d, r) for r in ball_radii])
    return float(np.sum(volumes * squared.mean(axis=1)))

def target_norm_proxy(sample: SampleSet, radii, cfg: KernelConfig,
        alpha: float = 0.4) -> float:
    """Convention norm of the witness through the noiseless labels f_0(X_i)."""
    target = find_target(sample.f0_id)
    clean = sample.with_targets(target(sample.points))
    return witness_convention_norm(build_witness(clean, radii, alpha), cfg)

def holder_certificate(model: Interpolant, sample: SampleSet,
        stats: SeparationStats, indices: Sequence[int], cfg: KernelConfig,
        f0_norm_proxy: Optional[float] = None) -> Certificate:
    """Lower-bound diagnostic for ‖f̂ - f_0‖²_{L²(Ω)}.

    With f = f̂ - f_0, f(X_i) = ξ_i and every unspecified constant set to 1:

        (min_I r^{-d-1} · S / (max_I r^{-d-1} + c^{d+1} ⟨f⟩))^d · S,
        S = Σ_I r_i^d f(X_i)²,

    where ⟨f⟩ <= 2⟨f̂⟩ + 2⟨f_0 proxy⟩. Not a calibrated bound: only trends
    across (n, c) are meaningful.
    """
    indices = np.asarray(indices, dtype=int)
    if indices.size == 0:
        raise ParameterError('certificate needs a nonempty index set')
    if model.ridge:
        raise ParameterError('certificate is defined for ridge 0 fits')
    d = cfg.d
    radii = stats.radii[indices]
    weighted = float(np.sum(radii ** d * sample.noise[indices] ** 2))
    inverse = radii ** (-d - 1.0)
    if f0_norm_proxy is None:
        f0_norm_proxy = target_norm_proxy(sample, stats.radii, cfg)
    norm_bound = 2 * convention_norm(model) + 2 * f0_norm_proxy
    ratio = (inverse.min() * weighted
        / (inverse.max() + cfg.c ** (d + 1) * norm_bound))
    value = float(ratio ** d * weighted)
    return Certificate(value, min(1.0, value), norm_bound, int(indices.size))
