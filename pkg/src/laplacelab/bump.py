"""Bump functions and the disjoint-bump witness interpolant g_α.

η is radial with η = 1 on ‖x‖ <= 1/4 and η = 0 on ‖x‖ >= 1/2. Two
transitions are provided:

- 'paper': e^{1 - 1/(2 - 4‖x‖)}. Continuous, but the radial derivative
  jumps from 0 to -4 at ‖x‖ = 1/4, so ⟨η⟩_k is finite only for k <= 1.
- 'smooth': 1 - S(4‖x‖ - 1) with S the order-4 smootherstep polynomial,
  four times continuously differentiable, so ⟨η⟩_k is finite for k <= 4.

Sobolev moments ⟨η⟩_k = ∫ |Fη(p)|² ‖p‖^{2k} dp use the unitary Fourier
transform (Plancherel constant 1). They are computed in the spatial
domain through ⟨η⟩_{2j} = ‖Δ^j η‖² and ⟨η⟩_{2j+1} = ‖∇Δ^j η‖²;
fourier_side_moment integrates the radial transform directly and serves
as the independent check.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import comb, exp, pi
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.special import jv

from laplacelab.errors import ParameterError, QuadratureError
from laplacelab.geometry import SampleSet
from laplacelab.kernel import KernelConfig
from laplacelab.setting import BUMP_MAX_DIM, QUADRATURE_RTOL, SMOOTHSTEP_ORDER
from laplacelab.utils import (as_points, check_odd_dimension,
    half_integer_gamma, sobolev_order, sphere_area)

SHAPES = ('paper', 'smooth')
PLATEAU = 0.25
SUPPORT = 0.5

def default_shape(d: int) -> str:
    """Shape whose moments up to (d+1)/2 are finite."""
    return 'paper' if d == 1 else 'smooth'

@lru_cache(maxsize=None)
def smootherstep(order: int) -> Polynomial:
    """S(t) rising from 0 to 1 on [0, 1] with `order` flat derivatives at both ends."""
    terms = Polynomial([0.0])
    t = Polynomial([0.0, 1.0])
    for j in range(order + 1):
        terms += comb(order + j, j) * comb(2 * order + 1, order - j) * (-t) ** j
    return t ** (order + 1) * terms

def _paper_transition(r: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', over='ignore'):
        return np.exp(1.0 - 1.0 / (2.0 - 4.0 * r))

def eta_radial(r, shape: str = 'paper') -> np.ndarray:
    """η as a function of the radius ‖x‖."""
    if shape not in SHAPES:
        raise ParameterError(f'shape must be one of {SHAPES}, got {shape!r}')
    r = np.asarray(r, dtype=float)
    values = np.zeros_like(r)
    values[r <= PLATEAU] = 1.0
    annulus = (r > PLATEAU) & (r < SUPPORT)
    if shape == 'paper':
        values[annulus] = _paper_transition(r[annulus])
    else:
        values[annulus] = 1.0 - smootherstep(SMOOTHSTEP_ORDER)(
            4.0 * r[annulus] - 1.0)
    return values

def _checked_quad(func: Callable[[float], float], a: float, b: float) -> float:
    value, error = quad(func, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
    if error > QUADRATURE_RTOL * max(abs(value), 1e-300):
        raise QuadratureError(
            f'quadrature on [{a}, {b}] did not converge '
            f'(value {value:.6e}, error {error:.1e})')
    return value

# Radial functions on the annulus are kept as P(t) / r^M with t = 4r - 1,
# so that derivatives and Laplacians stay exact.
_T_PLUS_ONE = Polynomial([1.0, 1.0])

def _radial_derivative(term: Tuple[Polynomial, int]) -> Tuple[Polynomial, int]:
    # d/dr [P(t) r^{-M}] = (4 r P'(t) - M P(t)) r^{-M-1},  4r = t + 1
    poly, power = term
    return poly.deriv() * _T_PLUS_ONE - power * poly, power + 1

def _radial_laplacian(term: Tuple[Polynomial, int], d: int
        ) -> Tuple[Polynomial, int]:
    # Δf = f'' + (d - 1) f' / r for radial f
    first, power = _radial_derivative(term)
    second, _ = _radial_derivative((first, power))
    return second + (d - 1) * first, power + 1

def _annulus_integral(term: Tuple[Polynomial, int], d: int) -> float:
    """∫ over the annulus of (P(t) / r^M)² dx, t = 4r - 1."""
    poly, power = term
    exponent = d - 1 - 2 * power

    def integrand(t: float) -> float:
        return poly(t) ** 2 * ((t + 1.0) / 4.0) ** exponent / 4.0

    return sphere_area(d) * _checked_quad(integrand, 0.0, 1.0)

def _plateau_volume(d: int) -> float:
    return sphere_area(d) * PLATEAU ** d / d

def _smooth_moment(d: int, k: int) -> float:
    if k > SMOOTHSTEP_ORDER:
        raise QuadratureError(
            f'<eta>_{k} diverges for the smooth bump (C^{SMOOTHSTEP_ORDER})')
    # h(r) = 1 - S(t) on the annulus
    term = (1.0 - smootherstep(SMOOTHSTEP_ORDER), 0)
    for _ in range(k // 2):
        term = _radial_laplacian(term, d)
    if k % 2:
        term = _radial_derivative(term)
    value = _annulus_integral(term, d)
    if k == 0:
        value += _plateau_volume(d)
    return value

def _paper_moment(d: int, k: int) -> float:
    if k >= 2:
        raise QuadratureError(
            f'<eta>_{k} diverges for the paper bump: its radial derivative '
            'jumps at |x| = 1/4')
    area = sphere_area(d)
    if k == 0:
        def integrand(r: float) -> float:
            return exp(2.0 - 2.0 / (2.0 - 4.0 * r)) * r ** (d - 1)
        return _plateau_volume(d) + area * _checked_quad(integrand, PLATEAU,
            SUPPORT)

    def integrand(r: float) -> float:
        slope = exp(1.0 - 1.0 / (2.0 - 4.0 * r)) * 4.0 / (2.0 - 4.0 * r) ** 2
        return slope ** 2 * r ** (d - 1)
    return area * _checked_quad(integrand, PLATEAU, SUPPORT)

def eta_moment(d: int, k: int, shape: str) -> float:
    """⟨η⟩_k = ∫ |Fη|² ‖p‖^{2k} dp; k = 0 is ‖η‖²_{L²(R^d)}."""
    if shape == 'paper':
        return _paper_moment(d, k)
    return _smooth_moment(d, k)

@dataclass(frozen=True)
class BumpProfile:
    """Radial bump η in dimension d with its cached L² norm and moments."""
    d: int
    shape: str

    def __post_init__(self):
        check_odd_dimension(self.d)
        if self.d > BUMP_MAX_DIM:
            raise ParameterError(
                f'bump profiles are available for d <= {BUMP_MAX_DIM}')
        if self.shape not in SHAPES:
            raise ParameterError(
                f'shape must be one of {SHAPES}, got {self.shape!r}')

    def __call__(self, points) -> np.ndarray:
        points = as_points(points, self.d)
        return eta_radial(np.linalg.norm(points, axis=1), self.shape)

    @cached_property
    def l2_norm_sq(self) -> float:
        return eta_moment(self.d, 0, self.shape)

    @cached_property
    def sobolev_moments(self) -> Tuple[float, ...]:
        """⟨η⟩_k for k = 1 .. (d+1)/2."""
        return tuple(eta_moment(self.d, k, self.shape)
            for k in range(1, sobolev_order(self.d) + 1))

@lru_cache(maxsize=None)
def bump_profile(d: int, shape: Optional[str] = None) -> BumpProfile:
    """Shared profile instance, so moments are computed once per (d, shape)."""
    return BumpProfile(d, shape or default_shape(d))

def eta_moments(d: int, shape: Optional[str] = None) -> BumpProfile:
    """Return the bump profile for d with every moment computed.

    Raises:
        QuadratureError: a needed moment diverges or did not converge.
    """
    profile = bump_profile(d, shape)
    profile.l2_norm_sq
    profile.sobolev_moments
    return profile

def eta(profile: BumpProfile, x):
    """η at one point (float) or at an (m, d) array of points."""
    array = np.asarray(x, dtype=float)
    values = profile(array)
    if array.ndim <= 1 and (profile.d > 1 or array.size == 1):
        return float(values[0])
    return values

def _bessel_kernel(d: int, z: np.ndarray) -> np.ndarray:
    # average of e^{-i z u·e} over unit vectors u: Γ(d/2) (2/z)^{d/2-1} J_{d/2-1}(z)
    if d == 1:
        return np.cos(z)
    values = np.ones_like(z)
    positive = z > 0
    nu = d / 2 - 1
    zp = z[positive]
    values[positive] = (half_integer_gamma(d) * (2.0 / zp) ** nu
        * jv(nu, zp))
    return values

def _legendre_panels(a: float, b: float, panels: int, nodes: int
        ) -> Tuple[np.ndarray, np.ndarray]:
    base_x, base_w = leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges)[:, None] / 2
    middle = (edges[:-1] + edges[1:])[:, None] / 2
    return ((middle + half * base_x).ravel(), (half * base_w).ravel())

def radial_fourier_transform(profile: BumpProfile, p) -> np.ndarray:
    """Unitary Fourier transform of η at frequency norms p."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    d = profile.d
    r, weights = _legendre_panels(0.0, SUPPORT, 64, 32)
    radial = eta_radial(r, profile.shape) * r ** (d - 1) * weights
    kernel = _bessel_kernel(d, np.outer(p, r))
    return sphere_area(d) * (kernel @ radial) / (2 * pi) ** (d / 2)

def fourier_side_moment(profile: BumpProfile, k: int, p_max: float = 400.0,
        panels: int = 800) -> float:
    """∫_{‖p‖ <= p_max} |Fη|² ‖p‖^{2k} dp by Gauss-Legendre panels."""
    d = profile.d
    p, weights = _legendre_panels(0.0, p_max, panels, 16)
    transform = np.concatenate([radial_fourier_transform(profile, chunk)
        for chunk in np.array_split(p, max(1, p.size // 2048))])
    return float(sphere_area(d) * np.sum(
        transform ** 2 * p ** (2 * k + d - 1) * weights))

@dataclass(frozen=True, eq=False)
class WitnessInterpolant:
    """g_α(x) = Σ Y_i η((x - X_i) / (α r_i)) over disjoint bump supports."""
    points: np.ndarray
    labels: np.ndarray
    radii: np.ndarray
    alpha: float
    profile: BumpProfile

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.points)

    def __call__(self, x) -> np.ndarray:
        # the only bump that can cover x belongs to its nearest point
        x = as_points(x, self.d)
        distance, index = self._tree.query(x, k=1)
        scaled = distance / (self.alpha * self.radii[index])
        return self.labels[index] * eta_radial(scaled, self.profile.shape)

def build_witness(sample: SampleSet, radii, alpha: float,
        shape: Optional[str] = None) -> WitnessInterpolant:
    """Witness interpolant through the sample with bump radii α r_i / 2."""
    if not 0 < alpha < 0.5:
        raise ParameterError(f'alpha must be in (0, 1/2), got {alpha}')
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (sample.n,):
        raise ParameterError(
            f'expected {sample.n} radii, got shape {radii.shape}')
    if np.any(radii <= 0):
        raise ParameterError('radii must be positive')
    profile = bump_profile(sample.d, shape)
    return WitnessInterpolant(sample.points, np.asarray(sample.targets,
        dtype=float), radii, float(alpha), profile)

def witness_supports_disjoint(w: WitnessInterpolant) -> bool:
    """Pairwise test ‖X_i - X_j‖ >= α (r_i + r_j) / 2 for all i ≠ j."""
    if w.points.shape[0] < 2:
        return True
    distances = cdist(w.points, w.points)
    reach = w.alpha * (w.radii[:, None] + w.radii[None, :]) / 2
    np.fill_diagonal(distances, np.inf)
    return bool(np.all(distances >= reach))

def witness_l2_norm_sq(w: WitnessInterpolant) -> float:
    """‖g_α‖²_{L²(R^d)} = α^d ‖η‖² Σ Y_i² r_i^d."""
    return float(w.alpha ** w.d * w.profile.l2_norm_sq
        * np.sum(w.labels ** 2 * w.radii ** w.d))

def witness_convention_norm(w: WitnessInterpolant, cfg: KernelConfig) -> float:
    """Exact convention norm ⟨g_α⟩ of the witness.

    Bumps with disjoint supports are orthogonal and each scaled bump has
    ⟨η((x - X_i)/(α r_i))⟩_k = (α r_i)^{d-2k} ⟨η⟩_k.
    """
    if cfg.d != w.d:
        raise ParameterError(
            f'kernel dimension {cfg.d} does not match witness dimension {w.d}')
    order = sobolev_order(w.d)
    scaled = w.alpha * w.radii
    total = witness_l2_norm_sq(w)
    for k, moment in enumerate(w.profile.sobolev_moments, start=1):
        total += (comb(order, k) * cfg.c ** (-2 * k) * moment
            * float(np.sum(w.labels ** 2 * scaled ** (w.d - 2 * k))))
    return total
