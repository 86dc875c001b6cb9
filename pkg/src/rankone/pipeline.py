"""Experiment configuration, seeded pipelines and order-of-convergence fits.

A pipeline trial plans budgets, runs phase 1 (search), runs phase 2
(reconstruction) when a nonzero point was found, and measures the error
bracket.  Everything is a pure function of the master seed and the
configuration, so runs are reproducible regardless of parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import rng
from .dispersion import uniform_pointset
from .errors import ParameterError
from .recovery import RecoveryConfig, recover
from .search import (BudgetPlan, SubsetSearchParams, plan, search_deterministic,
                     search_subset, search_uniform_multi, search_uniform_single)
from .specs import tensor_from_spec
from .tensor import RankOneTensor, QueryOracle, sup_distance_bound, sup_norm
from .univariate import UnivariateFactor, polynomial_factor, table_factor, trig_factor


def wilson_interval(successes: int, trials: int, z: float = 1.96,
                    ) -> Tuple[float, float]:
    """Wilson score confidence interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    ph = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (ph + z2 / (2 * trials)) / denom
    half = z * math.sqrt(ph * (1 - ph) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def fit_order(pairs: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """Least-squares slope of log(error) against log(n), with its standard error.

    Non-positive errors are dropped (with a stderr-independent warning by
    the caller); fewer than 4 surviving points is an error.
    """
    clean = [(n, e) for n, e in pairs if e > 0 and n > 0]
    if len(clean) < 4:
        raise ParameterError(f"need at least 4 positive (n, error) pairs, got {len(clean)}")
    x = np.log([n for n, _ in clean])
    y = np.log([e for _, e in clean])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope = float(coef[0])
    k = len(clean)
    if k > 2 and res.size:
        s2 = float(res[0]) / (k - 2)
        sxx = float(np.sum((x - x.mean()) ** 2))
        stderr = math.sqrt(s2 / sxx) if sxx > 0 else 0.0
    else:
        stderr = 0.0
    return slope, stderr


# ---------------------------------------------------------------------------
# Test-tensor families


def triangle_factor(support_lo: float, support_hi: float, peak: float,
                    r: int) -> UnivariateFactor:
    """Piecewise-linear spike, nonzero exactly on (support_lo, support_hi)."""
    mid = 0.5 * (support_lo + support_hi)
    half = mid - support_lo
    ts = [0.0, support_lo, mid, support_hi, 1.0]
    vals = [0.0, 0.0, peak, 0.0, 0.0]
    if support_lo <= 0.0:
        ts, vals = ts[1:], vals[1:]
        ts[0] = 0.0
    if support_hi >= 1.0:
        ts, vals = ts[:-1], vals[:-1]
        ts[-1] = 1.0
    f = table_factor(ts, vals, sup_bound=peak, deriv_bound=peak / half, r=r)
    return UnivariateFactor(fn=f.fn, sup_bound=f.sup_bound,
                            deriv_bound=f.deriv_bound, r=r,
                            kind="explicit-table",
                            support=(support_lo, support_hi))


def family_shifted_smooth(d: int, r: int, M: float, gen: np.random.Generator,
                          ) -> RankOneTensor:
    """Factors 1 - a t - b t^r with small random a, b: sup-norm exactly 1
    at the origin, r-th derivative bound b r! <= M."""
    bmax = min(M / math.factorial(r), 0.1)
    factors = []
    for _ in range(d):
        a = 0.1 * gen.random()
        b = bmax * gen.random()
        coeffs = np.zeros(r + 1)
        coeffs[0], coeffs[1] = 1.0, -a
        coeffs[r] += -b
        factors.append(polynomial_factor(coeffs, r))
    return RankOneTensor(factors=tuple(factors), r=r, M=M)


def family_trig_smooth(d: int, r: int, M: float, gen: np.random.Generator,
                       ) -> RankOneTensor:
    """Factors a + b sin(2 pi t + phi): genuinely non-polynomial, bounded
    away from zero, derivative bound b (2 pi)^r <= M."""
    b = min(0.2, M / (2 * np.pi) ** r)
    factors = []
    for _ in range(d):
        phi = 2 * np.pi * gen.random()
        factors.append(trig_factor(0.5 * b + 0.5 * b * gen.random(), 1.0, phi, 0.75, r))
    return RankOneTensor(factors=tuple(factors), r=r, M=M)


def family_box_support(d: int, r: int, V: float, gen: np.random.Generator,
                       ) -> RankOneTensor:
    """Product of triangle spikes with per-axis support V^(1/d): the
    nonzero set has measure exactly V."""
    alpha = V ** (1.0 / d)
    factors = []
    for _ in range(d):
        lo = gen.random() * (1.0 - alpha)
        factors.append(triangle_factor(lo, lo + alpha, 1.0, r))
    M = max(1.0, max(f.deriv_bound for f in factors))
    return RankOneTensor(factors=tuple(factors), r=r, M=M)


def family_offcenter_triangle(d: int, r: int, M: float, eps: float,
                              gen: np.random.Generator) -> RankOneTensor:
    """Most adversarial admissible spikes: minimal support given the
    product sup-norm target eps (slopes at the class bound M)."""
    peak = eps ** (1.0 / d) * 1.05  # small headroom over the minimum
    width = 2.0 * peak / M
    factors = []
    for _ in range(d):
        lo = gen.random() * (1.0 - width)
        factors.append(triangle_factor(lo, lo + width, peak, r))
    return RankOneTensor(factors=tuple(factors), r=r, M=M)


FAMILIES: Dict[str, Callable[..., RankOneTensor]] = {
    "shifted_smooth": family_shifted_smooth,
    "trig_smooth": family_trig_smooth,
    "box_support": family_box_support,
    "offcenter_triangle": family_offcenter_triangle,
}


# ---------------------------------------------------------------------------
# Experiment configuration and execution


@dataclass
class ExperimentConfig:
    """Fully deterministic description of a pipeline experiment."""

    r: int
    M: float
    d: int
    eps: float
    V: Optional[float] = None
    p: float = 0.5
    tensor_spec: Optional[Dict[str, Any]] = None
    family: Optional[str] = None
    family_params: Dict[str, Any] = field(default_factory=dict)
    strategy: str = "plan"  # plan | single | multi | subset | det
    n1: Optional[int] = None
    n2: Optional[int] = None
    trials: int = 100
    seed: int = 0
    grid: int = 10_001
    samples: int = 20_000
    threads: int = 1

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(raw) - known
        if unknown:
            raise ParameterError(f"unknown config fields: {sorted(unknown)}")
        try:
            cfg = cls(**raw)
        except TypeError as exc:
            raise ParameterError(str(exc))
        cfg.validate()
        return cfg

    def validate(self):
        if self.tensor_spec is None and self.family is None:
            raise ParameterError("config needs either 'tensor_spec' or 'family'")
        if self.family is not None and self.family not in FAMILIES:
            raise ParameterError(
                f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.strategy not in ("plan", "single", "multi", "subset", "det"):
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.trials < 0:
            raise ParameterError("trials must be nonnegative")

    def to_dict(self) -> Dict[str, Any]:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}  # type: ignore[attr-defined]

    def make_tensor(self, trial: int) -> RankOneTensor:
        if self.tensor_spec is not None:
            return tensor_from_spec(self.tensor_spec)
        gen = rng.spawn(self.seed, trial, 0xFA)
        kwargs = dict(self.family_params)
        fam = FAMILIES[self.family]
        if self.family == "box_support":
            kwargs.setdefault("V", self.V if self.V is not None else 0.3)
            return fam(self.d, self.r, gen=gen, **kwargs)
        if self.family == "offcenter_triangle":
            return fam(self.d, self.r, M=self.M, eps=self.eps, gen=gen, **kwargs)
        return fam(self.d, self.r, M=self.M, gen=gen, **kwargs)


def _run_phase1(cfg: ExperimentConfig, bp: BudgetPlan, oracle: QueryOracle,
                trial: int):
    strategy = cfg.strategy
    if strategy == "plan":
        strategy = {"trivial_M_small": "single", "subset_search": "subset",
                    "support_class_random": "multi",
                    "support_class_deterministic": "det",
                    "intractable": "multi"}[bp.regime]
    n1 = cfg.n1 if cfg.n1 is not None else bp.n1
    seed1 = rng._mix(cfg.seed, trial, 1)
    if strategy == "single":
        return search_uniform_single(oracle, seed1)
    if strategy == "multi":
        return search_uniform_multi(oracle, n1, seed1)
    if strategy == "subset":
        params = bp.subset_params or SubsetSearchParams.from_problem(
            cfg.r, cfg.M, cfg.eps)
        return search_subset(oracle, params, n1, seed1)
    if strategy == "det":
        ps = uniform_pointset(n1, cfg.d, seed1)
        return search_deterministic(oracle, ps)
    raise ParameterError(f"unknown strategy {strategy!r}")


def run_trial(cfg: ExperimentConfig, bp: BudgetPlan, trial: int) -> Dict[str, Any]:
    tensor = cfg.make_tensor(trial)
    oracle = QueryOracle(tensor)
    outcome = _run_phase1(cfg, bp, oracle, trial)
    q1 = oracle.query_count
    row = {"trial": trial, "seed": rng._mix(cfg.seed, trial, 1),
           "queries_phase1": q1, "queries_phase2": 0,
           "found": outcome.found}
    n2 = cfg.n2 if cfg.n2 is not None else bp.n2
    if outcome.found:
        rec = recover(oracle, outcome.z_star, RecoveryConfig(r=cfg.r, budget_n2=n2))
        row["queries_phase2"] = oracle.query_count - q1
        upper, lower = sup_distance_bound(
            tensor, rec.line_interpolants, rec.center_value,
            grid=cfg.grid, samples=cfg.samples, seed=rng._mix(cfg.seed, trial, 2))
        row["error_upper"], row["error_lower"] = upper, lower
    else:
        # zero output: the incurred error is the sup-norm of f itself
        nrm = sup_norm(tensor, grid=cfg.grid)
        row["error_upper"] = row["error_lower"] = nrm
    return row


def run_pipeline(cfg: ExperimentConfig) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """Execute all trials; returns (raw rows, aggregate summary)."""
    bp = plan(cfg.r, cfg.M, cfg.d, cfg.eps, V=cfg.V, p=cfg.p,
              prefer_deterministic=(cfg.strategy == "det"))
    trials = range(cfg.trials)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(lambda t: run_trial(cfg, bp, t), trials))
    else:
        rows = [run_trial(cfg, bp, t) for t in trials]
    rows.sort(key=lambda r: r["trial"])

    n_ok = sum(1 for r in rows if r["error_upper"] <= cfg.eps)
    n_found = sum(1 for r in rows if r["found"])
    lo, hi = wilson_interval(n_ok, len(rows))
    summary = {
        "config": cfg.to_dict(),
        "plan": {"regime": bp.regime, "n1": bp.n1, "n2": bp.n2,
                 "success_prob_lower": bp.success_prob_lower},
        "trials": len(rows),
        "found": n_found,
        "eps_success": n_ok,
        "eps_success_freq": n_ok / len(rows) if rows else None,
        "wilson_low": lo,
        "wilson_high": hi,
        "theorem_bound": bp.success_prob_lower,
        "max_error_upper": max((r["error_upper"] for r in rows), default=None),
    }
    return rows, summary


def convergence_sweep(d: int, r: int, budgets: Sequence[int], seed: int = 0,
                      M: Optional[float] = None, grid: int = 10_001,
                      samples: int = 20_000) -> List[Tuple[int, float]]:
    """Reconstruction error (telescoping upper bound) as a function of the
    phase-2 budget, over the smooth trigonometric family."""
    if M is None:
        M = 0.2 * (2 * np.pi) ** r
    gen = rng.spawn(seed, 0xC0)
    tensor = family_trig_smooth(d, r, M, gen)
    z = np.full(d, 0.41)  # fixed interior point; factors are nonzero everywhere
    pairs = []
    for n2 in budgets:
        oracle = QueryOracle(tensor)
        rec = recover(oracle, z, RecoveryConfig(r=r, budget_n2=int(n2)))
        upper, _ = sup_distance_bound(tensor, rec.line_interpolants,
                                      rec.center_value, grid=grid,
                                      samples=samples, seed=seed)
        pairs.append((int(n2), float(upper)))
    return pairs
