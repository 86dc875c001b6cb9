"""Reconstruction of a rank-one function from axis lines through a point.

Given z* with f(z*) != 0, the line restrictions
g_i(t) = f(z*_1, ..., t, ..., z*_d) satisfy
prod_i g_i(x_i) = f(x) * f(z*)^(d-1), so interpolating each line and
rescaling by f(z*)^-(d-1) reconstructs f.  With block-Chebyshev nodes
the sup error decays like n^(-r) in the total budget n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .errors import BudgetTooSmallError, NonzeroCenterError, ParameterError
from .tensor import QueryOracle
from .univariate import PiecewisePolynomial, block_chebyshev_nodes, interpolate_line

# Empirical constants for the error contract
#   sup error <= C * M * d^(r+1) * n2^(-r),
# fitted per smoothness order over the reference smooth-factor family by
# scripts/calibrate_error_constant.py (largest observed ratio, doubled).
CALIBRATED_ERROR_CONSTANT = {
    1: 0.93,
    2: 0.57,
    3: 1.04,
    4: 0.49,
    5: 0.19,
}


def error_constant(r: int) -> float:
    """Calibrated constant for the reconstruction error contract."""
    if r in CALIBRATED_ERROR_CONSTANT:
        return CALIBRATED_ERROR_CONSTANT[r]
    return CALIBRATED_ERROR_CONSTANT[max(CALIBRATED_ERROR_CONSTANT)]


@dataclass(frozen=True)
class RecoveryConfig:
    r: int
    budget_n2: int
    c_calibrated: float = 0.0  # 0 means: use error_constant(r)
    min_center_value: float = 0.0

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError("smoothness order r must be a positive integer")
        if self.budget_n2 < 1:
            raise ParameterError("budget must be positive")
        if self.c_calibrated == 0.0:
            object.__setattr__(self, "c_calibrated", error_constant(self.r))


@dataclass(frozen=True)
class RankOneApproximant:
    """Product of line interpolants rescaled by the center value."""

    line_interpolants: Tuple[PiecewisePolynomial, ...]
    center_value: float

    @property
    def d(self) -> int:
        return len(self.line_interpolants)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        out = self.center_value ** (-(self.d - 1))
        for i, g in enumerate(self.line_interpolants):
            out *= g(float(x[i]))
        return float(out)

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[0], self.center_value ** (-(self.d - 1)))
        for i, g in enumerate(self.line_interpolants):
            out *= g(X[:, i])
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.value(x) if x.ndim == 1 else self.value_batch(x)


def required_n2(d: int, r: int, M: float, eps: float, C_r: float) -> int:
    """Budget ceil(d * max(eps^(-1/r) (d C_r M)^(1/r), 2)) guaranteeing
    reconstruction error <= eps under the error contract."""
    if d < 1 or r < 1 or M <= 0 or eps <= 0 or C_r <= 0:
        raise ParameterError("all planner inputs must be positive")
    return math.ceil(d * max(eps ** (-1.0 / r) * (d * C_r * M) ** (1.0 / r), 2.0))


def min_budget(d: int, r: int) -> int:
    """Smallest budget recover accepts: center plus max(r, 2) nodes per line."""
    return 1 + d * max(r, 2)


def recover(oracle: QueryOracle, z_star, cfg: RecoveryConfig) -> RankOneApproximant:
    """Reconstruct a rank-one approximant from axis lines through z*.

    Samples m = floor((budget - 1) / d) block-Chebyshev nodes per axis
    line (rounded down to a multiple of r), reusing the center sample
    when a node coincides with z*_i.  Total queries <= budget_n2.
    """
    z = np.asarray(z_star, dtype=float)
    d = oracle.d
    if z.shape != (d,):
        raise ParameterError(f"z* must be a {d}-vector")
    m = (cfg.budget_n2 - 1) // d
    if m < max(cfg.r, 2):
        raise BudgetTooSmallError(
            f"budget {cfg.budget_n2} gives {m} nodes per line; "
            f"need at least {max(cfg.r, 2)} (budget >= {min_budget(d, cfg.r)})")

    center = oracle.evaluate(z)
    if center == 0.0:
        raise NonzeroCenterError("f(z*) = 0: recovery requires a nonzero center")
    if abs(center) < cfg.min_center_value:
        raise NonzeroCenterError(
            f"|f(z*)| = {abs(center)} below guard {cfg.min_center_value}; "
            "amplification risk")

    nodes = block_chebyshev_nodes(m, cfg.r)
    interpolants = []
    for i in range(d):
        line = np.tile(z, (len(nodes), 1))
        line[:, i] = nodes
        reuse = nodes == z[i]
        vals = np.empty(len(nodes))
        if reuse.any():
            vals[reuse] = center
            fresh = ~reuse
            vals[fresh] = oracle.evaluate_batch(line[fresh])
        else:
            vals = oracle.evaluate_batch(line)
        interpolants.append(interpolate_line(list(zip(nodes, vals)), cfg.r))

    return RankOneApproximant(line_interpolants=tuple(interpolants),
                              center_value=center)
