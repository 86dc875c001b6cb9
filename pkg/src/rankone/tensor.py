"""Rank-one tensors, query accounting and sup-norm machinery.

A rank-one tensor is a product f(x) = f_1(x_1) * ... * f_d(x_d) of
univariate factors.  Evaluation goes through a QueryOracle that counts
function calls; the count is the information cost of an algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import rng
from .errors import BudgetExhaustedError, DomainError
from .univariate import PiecewisePolynomial, UnivariateFactor

DEFAULT_GRID = 10_001
DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class Box:
    """Axis-parallel box inside the unit cube."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DomainError("box corners must be d-vectors of equal length")
        if np.any(lo < 0) or np.any(hi > 1) or np.any(lo > hi):
            raise DomainError("box must satisfy 0 <= lower <= upper <= 1")

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains_open(self, x: np.ndarray) -> bool:
        """Whether x lies in the open interior of the box."""
        return bool(np.all(x > self.lower) and np.all(x < self.upper))


@dataclass(frozen=True)
class RankOneTensor:
    """d factors plus the class parameters (r, M, optional support volume V)."""

    factors: Tuple[UnivariateFactor, ...]
    r: int
    M: float
    support_volume: Optional[float] = None
    witness_box: Optional[Box] = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 1:
            raise DomainError("need at least one factor")
        if any(f.r != self.r for f in self.factors):
            raise DomainError("all factors must share the same smoothness order r")
        if self.support_volume is not None and not 0 < self.support_volume < 1:
            raise DomainError("support volume V must lie in (0, 1)")

    @property
    def d(self) -> int:
        return len(self.factors)

    def factor_values(self, x: np.ndarray) -> np.ndarray:
        """Per-factor values at a single point; shape (d,)."""
        return np.array([float(f(x[i])) for i, f in enumerate(self.factors)])

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.prod(self.factor_values(x)))

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        """Values at each row of X; shape (k,)."""
        X = np.asarray(X, dtype=float)
        out = np.ones(X.shape[0])
        for i, f in enumerate(self.factors):
            out *= f(X[:, i])
        return out


class QueryOracle:
    """Evaluation wrapper that counts and optionally logs queries.

    Single-owner mutable state: not shareable between threads, but
    transferable.  Exceeding the budget raises instead of answering.
    """

    def __init__(self, target: RankOneTensor, budget: Optional[int] = None,
                 log: bool = False):
        self.target = target
        self.budget = budget
        self.query_count = 0
        self.query_log: Optional[List[Tuple[np.ndarray, float]]] = [] if log else None

    @property
    def d(self) -> int:
        return self.target.d

    def remaining(self) -> Optional[int]:
        return None if self.budget is None else self.budget - self.query_count

    def _charge(self, k: int):
        if self.budget is not None and self.query_count + k > self.budget:
            raise BudgetExhaustedError(
                f"budget {self.budget} exhausted ({self.query_count} used, {k} requested)")
        self.query_count += k

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise DomainError(f"expected a {self.d}-vector, got shape {x.shape}")
        if np.any(x < 0) or np.any(x > 1):
            raise DomainError("query point outside the unit cube")
        self._charge(1)
        v = self.target.value(x)
        if self.query_log is not None:
            self.query_log.append((x.copy(), v))
        return v

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Evaluate all rows of X, charging one query per row."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise DomainError(f"expected shape (k, {self.d}), got {X.shape}")
        if np.any(X < 0) or np.any(X > 1):
            raise DomainError("query point outside the unit cube")
        self._charge(X.shape[0])
        vals = self.target.value_batch(X)
        if self.query_log is not None:
            self.query_log.extend((row.copy(), float(v)) for row, v in zip(X, vals))
        return vals


def sup_norm(t: RankOneTensor, grid: int = DEFAULT_GRID) -> float:
    """Sup-norm of the product, exact up to the 1-D grid resolution.

    Rank-one structure makes the sup factorize: max|f| = prod_i max|f_i|.
    """
    ts = np.linspace(0.0, 1.0, grid)
    return float(np.prod([np.max(np.abs(f(ts))) for f in t.factors]))


@dataclass(frozen=True)
class MembershipResult:
    ok: bool
    failures: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_membership(t: RankOneTensor, cls: str = "F", grid: int = DEFAULT_GRID,
                     ) -> MembershipResult:
    """Verify class membership; returns the failing conditions, never raises.

    cls="F" checks the plain class (factor sup-norms <= 1, r-th derivative
    bounds <= M); cls="FV" additionally checks the declared witness box:
    volume strictly above V and every factor nonzero on its interval of
    the box (1-D grid check).
    """
    if cls not in ("F", "FV"):
        return MembershipResult(False, (f"unknown class tag {cls!r}",))
    failures = []
    for i, f in enumerate(t.factors):
        if f.sup_bound > 1.0 + 1e-12:
            failures.append(f"factor {i}: sup bound {f.sup_bound} exceeds 1")
        if f.deriv_bound > t.M + 1e-12:
            failures.append(f"factor {i}: derivative bound {f.deriv_bound} exceeds M={t.M}")
    if cls == "FV":
        if t.support_volume is None or t.witness_box is None:
            failures.append("support class requires a declared V and witness box")
        else:
            box = t.witness_box
            if box.lower.shape != (t.d,):
                failures.append("witness box dimension mismatch")
            elif box.volume <= t.support_volume:
                failures.append(
                    f"witness volume {box.volume} <= V={t.support_volume}")
            else:
                for i, f in enumerate(t.factors):
                    lo, hi = box.lower[i], box.upper[i]
                    ts = np.linspace(lo, hi, max(2, grid // 10))
                    if np.any(f(ts) == 0.0):
                        failures.append(
                            f"factor {i} vanishes inside witness interval [{lo}, {hi}]")
    return MembershipResult(not failures, tuple(failures))


def sup_distance_bound(t: RankOneTensor,
                       approx: Sequence[PiecewisePolynomial],
                       scale: float,
                       grid: int = DEFAULT_GRID,
                       samples: int = DEFAULT_SAMPLES,
                       seed: int = 0) -> Tuple[float, float]:
    """Bracket the sup distance between f and scale^-(d-1) * prod(approx).

    upper: telescoping bound.  The combined approximant is written as a
    product of rescaled factors B_i = mu_i * ghat_i with
    prod(mu_i) = scale^-(d-1); each mu_i is fitted on a 1-D grid so the
    per-factor differences f_i - B_i are measured in matching
    normalizations, then the telescoping sum
    sum_i ||f_i - B_i|| * prod_{j<i} max|B_j| * prod_{j>i} max|f_j|
    bounds the product difference.

    lower: max of |f - approximant| over a seeded random sample of
    points, a certified lower estimate.

    Guarantee: lower <= true sup distance <= upper + grid slack.
    """
    d = t.d
    if len(approx) != d:
        raise DomainError(f"need {d} approximant factors, got {len(approx)}")
    if scale == 0:
        raise DomainError("scale must be nonzero")

    ts = np.linspace(0.0, 1.0, grid)
    F = [np.asarray(f(ts), dtype=float) for f in t.factors]
    G = [np.asarray(g(ts), dtype=float) for g in approx]

    target = float(scale) ** (-(d - 1))
    mu = np.empty(d)
    for i in range(d):
        gg = float(G[i] @ G[i])
        mu[i] = (G[i] @ F[i]) / gg if gg > 1e-300 else abs(target) ** (1.0 / d)
        if mu[i] == 0.0:
            mu[i] = abs(target) ** (1.0 / d)
    prod_mu = float(np.prod(mu))
    corr = target / prod_mu
    if corr > 0:
        mu *= corr ** (1.0 / d)
    else:
        # sign mismatch: fold the whole correction into the first factor
        mu[0] *= corr

    B = [mu[i] * G[i] for i in range(d)]
    err = np.array([np.max(np.abs(F[i] - B[i])) for i in range(d)])
    bmax = np.array([np.max(np.abs(b)) for b in B])
    fmax = np.array([np.max(np.abs(f)) for f in F])
    upper = 0.0
    for i in range(d):
        upper += err[i] * np.prod(bmax[:i]) * np.prod(fmax[i + 1:])

    X = rng.spawn(seed, 0x5D).random((samples, d))
    fv = t.value_batch(X)
    av = np.ones(samples) * target
    for i in range(d):
        av *= approx[i](X[:, i])
    lower = float(np.max(np.abs(fv - av)))

    return float(upper), lower
