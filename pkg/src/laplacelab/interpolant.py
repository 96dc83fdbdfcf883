"""Minimum-norm and ridge-regularized Laplace kernel regressors.

The fitted function is f̂(x) = Σ α_i e^{-c‖x - X_i‖}: coefficients are
always stored in unit scale, so predictions do not depend on the scale
convention of the KernelConfig.
"""

from dataclasses import dataclass
import logging
from math import exp, log
from typing import List, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from laplacelab.errors import (DuplicatePointError, IllConditionedError,
    ParameterError)
from laplacelab.geometry import SampleSet, min_pairwise_distance
from laplacelab.kernel import KernelConfig, gram
from laplacelab.setting import (DUPLICATE_THRESHOLD, JITTER_FACTOR,
    JITTER_START, JITTER_STOP, MAX_SUPPORT, PREDICT_BLOCK_ROWS)
from laplacelab.utils import as_points, lambda_zero

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class SolverDiagnostics:
    jitter_used: float
    condition_estimate: float
    residual_max: float

@dataclass(frozen=True, eq=False)
class Interpolant:
    """Kernel expansion over the support points.

    Attributes:
        support: (n, d) training points
        coeffs: dual coefficients α in unit scale
        cfg: kernel configuration the model was fitted with
        ridge: λ of the regularized problem (0 for interpolation)
        diagnostics: jitter, condition estimate and label residual
    """
    support: np.ndarray
    coeffs: np.ndarray
    cfg: KernelConfig
    ridge: float
    diagnostics: SolverDiagnostics

    @property
    def paper_coeffs(self) -> np.ndarray:
        """Coefficients against the c^d-scaled kernel."""
        return self.coeffs * exp(-self.cfg.d * log(self.cfg.c))

    def predict(self, points) -> np.ndarray:
        """Evaluate f̂ at an (m, d) array of points, block by block."""
        points = as_points(points, self.cfg.d)
        unit = self.cfg.unit()
        values = np.empty(points.shape[0])
        for start in range(0, points.shape[0], PREDICT_BLOCK_ROWS):
            stop = start + PREDICT_BLOCK_ROWS
            values[start:stop] = gram(unit, points[start:stop],
                self.support) @ self.coeffs
        return values

    def __call__(self, points) -> np.ndarray:
        return self.predict(points)

def _condition_estimate(factor: np.ndarray) -> float:
    diagonal = np.abs(np.diag(factor))
    return float((diagonal.max() / diagonal.min()) ** 2)

def jitter_ladder(trace_mean: float) -> List[float]:
    """0 followed by 1e-12, 1e-11, ..., 1e-6 times tr(G)/n."""
    ladder = [0.0]
    step = JITTER_START
    while step <= JITTER_STOP * (1 + 1e-9):
        ladder.append(step * trace_mean)
        step *= JITTER_FACTOR
    return ladder

def _solve(matrix: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """Cholesky solve, escalating the diagonal jitter on failure."""
    identity = np.eye(matrix.shape[0])
    ladder = jitter_ladder(float(np.trace(matrix)) / matrix.shape[0])
    for jitter in ladder:
        try:
            factor = cho_factor(matrix + jitter * identity, lower=True,
                check_finite=False)
        except LinAlgError:
            continue
        if jitter:
            logger.warning('Gram factorization needed jitter %.3e', jitter)
        return (cho_solve(factor, y, check_finite=False), jitter,
            _condition_estimate(factor[0]))
    eigenvalues = np.linalg.eigvalsh(matrix)
    estimate = (float(eigenvalues[-1] / eigenvalues[0])
        if eigenvalues[0] > 0 else np.inf)
    logger.error('jitter exhausted at %.3e, condition estimate %.3e',
        ladder[-1], estimate)
    raise IllConditionedError(estimate, ladder[-1])

def fit_ridge(cfg: KernelConfig, sample: SampleSet, lam: float) -> Interpolant:
    """Minimize (1/n) Σ (f(X_i) - Y_i)² + lam ‖f‖²_H over the RKHS.

    The dual system is (G + n lam c^{-d} I) α = y in unit scale for a
    paper-scale config, and (G + n lam I) α = y for a unit-scale one.
    lam = 0 gives the minimum-norm interpolant.
    """
    if lam < 0 or not np.isfinite(lam):
        raise ParameterError(f'ridge must be >= 0, got {lam}')
    points = as_points(sample.points, cfg.d)
    n = points.shape[0]
    if n < 1:
        raise ParameterError('cannot fit an empty sample')
    if n > MAX_SUPPORT:
        raise ParameterError(f'n = {n} exceeds the dense-solve cap {MAX_SUPPORT}')
    closest = min_pairwise_distance(points)
    if closest is not None and closest[0] <= DUPLICATE_THRESHOLD:
        raise DuplicatePointError((closest[1], closest[2]), closest[0])
    y = np.asarray(sample.targets, dtype=float)
    matrix = gram(cfg.unit(), points)
    system = matrix + n * lam * exp(-cfg.log_prefactor) * np.eye(n) \
        if lam else matrix
    coeffs, jitter, condition = _solve(system, y)
    residual = float(np.max(np.abs(matrix @ coeffs - y)))
    diagnostics = SolverDiagnostics(jitter, condition, residual)
    logger.debug('fitted n=%d c=%g ridge=%g: %s', n, cfg.c, lam, diagnostics)
    return Interpolant(points, coeffs, cfg, float(lam), diagnostics)

def fit_min_norm(cfg: KernelConfig, sample: SampleSet) -> Interpolant:
    """Minimum-RKHS-norm function with f(X_i) = Y_i for all i."""
    return fit_ridge(cfg, sample, 0.0)

def predict(model: Interpolant, x) -> float:
    """Value of the fitted function at a single point."""
    return float(model.predict(np.asarray(x, dtype=float).reshape(1, -1))[0])

def _unit_quadratic_form(model: Interpolant) -> float:
    matrix = gram(model.cfg.unit(), model.support)
    return float(model.coeffs @ matrix @ model.coeffs)

def rkhs_quadratic_form(model: Interpolant) -> float:
    """Squared RKHS norm αᵀGα in the model's scale convention."""
    value = _unit_quadratic_form(model)
    if value <= 0:
        return value
    return exp(log(value) - model.cfg.log_prefactor)

def convention_norm(model: Interpolant) -> float:
    """Σ binom((d+1)/2, i) c^{-2i} ⟨f̂⟩_i, equal to λ(0) ‖f̂‖²_H (paper scale)."""
    value = _unit_quadratic_form(model)
    if value <= 0:
        return value
    d = model.cfg.d
    return exp(log(value) - d * log(model.cfg.c) + log(lambda_zero(d)))
