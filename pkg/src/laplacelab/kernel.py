"""Laplace kernel K_c(x, x') = c^d e^{-c‖x - x'‖} and its spectrum.

Two scale conventions are supported: 'paper' carries the prefactor c^d,
'unit' drops it. Solvers work in unit scale; the prefactor is kept as a
log-prefactor and applied only where a norm convention needs it.
"""

from dataclasses import dataclass
from math import exp, log
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from laplacelab.errors import InvalidInputError, ParameterError
from laplacelab.utils import (as_points, binomial_row, check_odd_dimension,
    lambda_zero, sobolev_order)

SCALES = ('paper', 'unit')

@dataclass(frozen=True)
class KernelConfig:
    """Dimension, bandwidth and scale convention of the kernel."""
    d: int
    c: float
    scale: str = 'paper'

    def __post_init__(self):
        check_odd_dimension(self.d)
        if not np.isfinite(self.c) or self.c <= 0:
            raise ParameterError(f'bandwidth must be positive, got {self.c}')
        if self.scale not in SCALES:
            raise ParameterError(
                f'scale must be one of {SCALES}, got {self.scale!r}')

    @property
    def log_prefactor(self) -> float:
        """log of the kernel value at x = x'."""
        return self.d * log(self.c) if self.scale == 'paper' else 0.0

    def unit(self) -> 'KernelConfig':
        return KernelConfig(self.d, self.c, 'unit')

    def paper(self) -> 'KernelConfig':
        return KernelConfig(self.d, self.c, 'paper')

@dataclass(frozen=True)
class SobolevWeights:
    """Weights binom((d+1)/2, i) c^{-2i} and the normalizer λ(0)."""
    weights: Tuple[float, ...]
    lambda0: float

def _point(x, d: int) -> np.ndarray:
    array = np.asarray(x, dtype=float).reshape(-1)
    if array.size != d:
        raise InvalidInputError(f'expected a point of dimension {d}')
    if not np.all(np.isfinite(array)):
        raise InvalidInputError('kernel input is not finite')
    return array

def eval_kernel(cfg: KernelConfig, x, y) -> float:
    """Kernel value at one pair of points."""
    distance = float(np.linalg.norm(_point(x, cfg.d) - _point(y, cfg.d)))
    return exp(cfg.log_prefactor - cfg.c * distance)

def gram(cfg: KernelConfig, points, other: Optional[np.ndarray] = None
        ) -> np.ndarray:
    """Kernel matrix between points and other (points itself if None).

    The square case is symmetrized exactly.
    """
    points = as_points(points, cfg.d)
    if other is None:
        distances = cdist(points, points)
        distances = 0.5 * (distances + distances.T)
    else:
        distances = cdist(points, as_points(other, cfg.d))
    return np.exp(cfg.log_prefactor - cfg.c * distances)

def lambda_eig(cfg: KernelConfig, p_norm: float) -> float:
    """Fourier eigenvalue λ(p) = λ(0) / (1 + ‖p‖²/c²)^{(d+1)/2}.

    This is ∫ K_c(x, 0) e^{-ip·x} dx; unit scale divides by c^d.
    """
    if p_norm < 0:
        raise ParameterError(f'p_norm must be >= 0, got {p_norm}')
    base = lambda_zero(cfg.d) / (1 + (p_norm / cfg.c) ** 2) ** sobolev_order(cfg.d)
    if cfg.scale == 'unit':
        return base * exp(-cfg.d * log(cfg.c))
    return base

def sobolev_weights(cfg: KernelConfig) -> SobolevWeights:
    """Return the convention-norm weights for this kernel."""
    row = binomial_row(sobolev_order(cfg.d))
    weights = tuple(b * cfg.c ** (-2 * i) for i, b in enumerate(row))
    return SobolevWeights(weights, lambda_zero(cfg.d))
