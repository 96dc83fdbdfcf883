"""This module stores the exceptions raised by laplacelab."""

from typing import Optional, Tuple

__all__ = ['LaplaceLabError', 'InvalidDimensionError', 'InvalidInputError',
    'ParameterError', 'DuplicatePointError', 'IllConditionedError',
    'QuadratureError', 'TruncationError', 'ResolutionError', 'SinkError',
    'SummaryError', 'UsageError']

class LaplaceLabError(Exception):
    """Base class for every error raised by this package."""

class InvalidDimensionError(LaplaceLabError, ValueError):
    """Dimension is even, zero or negative."""

    def __init__(self, d: int):
        super().__init__(f'dimension must be an odd integer >= 1, got {d!r}')
        self.d = d

class InvalidInputError(LaplaceLabError, ValueError):
    """Input array contains non-finite values or has the wrong shape."""

class ParameterError(LaplaceLabError, ValueError):
    """A scalar parameter is outside its admissible range."""

class DuplicatePointError(LaplaceLabError, ValueError):
    """Two design points are closer than the duplicate threshold."""

    def __init__(self, pair: Tuple[int, int], distance: float):
        super().__init__(
            f'points {pair[0]} and {pair[1]} are duplicates '
            f'(distance {distance:.3e})')
        self.pair = pair
        self.distance = distance

class IllConditionedError(LaplaceLabError):
    """Gram system could not be factorized within the jitter budget."""

    def __init__(self, condition_estimate: float, jitter_tried: float):
        super().__init__(
            f'Gram matrix not positive definite after jitter '
            f'{jitter_tried:.3e} (condition estimate {condition_estimate:.3e})')
        self.condition_estimate = condition_estimate
        self.jitter_tried = jitter_tried

class QuadratureError(LaplaceLabError):
    """Numerical integral did not converge or diverges analytically."""

class TruncationError(LaplaceLabError):
    """Grid function is not negligible at the edge of its window."""

    def __init__(self, edge_magnitude: float, peak: float):
        super().__init__(
            f'grid edge magnitude {edge_magnitude:.3e} exceeds 1e-8 of the '
            f'peak {peak:.3e}; enlarge the half-width')
        self.edge_magnitude = edge_magnitude
        self.peak = peak

class ResolutionError(LaplaceLabError):
    """Closest pair of points is too tight for the largest allowed grid."""

    def __init__(self, min_gap: float, finest_spacing: float):
        super().__init__(
            f'closest points are {min_gap:.3e} apart but the finest grid '
            f'spacing is {finest_spacing:.3e}')
        self.min_gap = min_gap
        self.finest_spacing = finest_spacing

class SinkError(LaplaceLabError, OSError):
    """Result sink cannot be written."""

    def __init__(self, path: str, reason: Optional[str] = None):
        message = f'cannot write results to {path}'
        if reason:
            message = f'{message}: {reason}'
        super().__init__(message)
        self.path = path

class SummaryError(LaplaceLabError, ValueError):
    """Records do not cover what a summary or plot needs."""

class UsageError(LaplaceLabError, ValueError):
    """Bad command-line flag, grid key or grid value."""
