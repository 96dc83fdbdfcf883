from math import comb, factorial, pi, sqrt
from typing import Sequence

import numpy as np

from laplacelab.errors import InvalidDimensionError, InvalidInputError

def check_odd_dimension(d: int) -> int:
    """Return d if it is an odd integer >= 1, raise otherwise."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise InvalidDimensionError(d)
    if d < 1 or d % 2 == 0:
        raise InvalidDimensionError(d)
    return int(d)

def half_integer_gamma(twice_x: int) -> float:
    """Return Γ(twice_x / 2) for a positive integer twice_x.

    Integers go through the factorial, half-integers through the
    recurrence Γ(x + 1) = xΓ(x) started at Γ(1/2) = √π.
    """
    if twice_x < 1:
        raise ValueError(f'twice_x must be positive, got {twice_x}')
    if twice_x % 2 == 0:
        return float(factorial(twice_x // 2 - 1))
    value: float = sqrt(pi)
    x = 0.5
    while 2 * x < twice_x:
        value *= x
        x += 1.0
    return value

def ball_volume(d: int, radius: float = 1.0) -> float:
    """Lebesgue volume of the d-dimensional ball."""
    return pi ** (d / 2) / half_integer_gamma(d + 2) * radius ** d

def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d (2 points when d = 1)."""
    return 2 * pi ** (d / 2) / half_integer_gamma(d)

def lambda_zero(d: int) -> float:
    """2^d π^{(d-1)/2} Γ((d+1)/2), the Fourier eigenvalue at p = 0."""
    return 2 ** d * pi ** ((d - 1) / 2) * half_integer_gamma(d + 1)

def sobolev_order(d: int) -> int:
    """(d + 1) / 2, the Sobolev order matched by the Laplace kernel."""
    return (d + 1) // 2

def binomial_row(m: int) -> Sequence[int]:
    return [comb(m, i) for i in range(m + 1)]

def as_points(points, d: int = None) -> np.ndarray:
    """Return points as a finite float (n, d) array.

    A 1-D input is read as n points in one dimension when d is 1 or
    omitted, and as a single point otherwise.
    """
    array = np.asarray(points, dtype=float)
    if array.ndim == 0:
        array = array.reshape(1, 1)
    elif array.ndim == 1:
        if d is None or d == 1:
            array = array.reshape(-1, 1)
        else:
            array = array.reshape(1, -1)
    if array.ndim != 2:
        raise InvalidInputError(f'points must be 2-D, got shape {array.shape}')
    if d is not None and array.shape[1] != d:
        raise InvalidInputError(
            f'points have dimension {array.shape[1]}, expected {d}')
    if not np.all(np.isfinite(array)):
        raise InvalidInputError('points contain non-finite values')
    return array

def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    log_x = np.log(np.asarray(xs, dtype=float))
    log_y = np.log(np.asarray(ys, dtype=float))
    slope, _ = np.polyfit(log_x, log_y, 1)
    return float(slope)