"""Univariate factors and piecewise polynomial interpolation.

The one-dimensional building blocks: evaluable factors with declared
sup-norm and derivative bounds, block-Chebyshev interpolation of axis
lines, and the two elementary inequalities that control everything else
(sup-norm of a function with r zeros, and the measure of the support of
a function with large sup-norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError


def interp_error_bound(M: float, a: float, b: float, r: int) -> float:
    """Sup-norm bound M (b-a)^r / r! for a function with r zeros in [a, b].

    Also bounds the error of degree-(r-1) interpolation at r nodes inside
    [a, b] of a function whose r-th derivative is bounded by M.
    """
    if r < 1:
        raise ParameterError("smoothness order r must be a positive integer")
    if not a < b:
        raise ParameterError(f"need a < b, got a={a}, b={b}")
    if M < 0:
        raise ParameterError("derivative bound M must be nonnegative")
    return M * (b - a) ** r / math.factorial(r)


def support_lower_bound(eps: float, M: float, r: int) -> float:
    """Guaranteed measure (r! eps / M)^(1/r) of {g != 0}.

    Holds for any g on [0,1] with sup-norm at least ``eps`` and r-th
    derivative bounded by ``M``.  A return value above 1 means no such g
    exists; the caller must treat it accordingly.
    """
    if r < 1:
        raise ParameterError("smoothness order r must be a positive integer")
    if eps <= 0 or M <= 0:
        raise ParameterError("eps and M must be positive")
    return (math.factorial(r) * eps / M) ** (1.0 / r)


@dataclass(frozen=True)
class UnivariateFactor:
    """An evaluable function on [0,1] with declared bounds.

    ``fn`` must be exact, side-effect free, and vectorized over numpy
    arrays.  ``sup_bound`` and ``deriv_bound`` are declared bounds on
    the sup-norm of the function and of its r-th derivative; they are
    supplied analytically at construction, never estimated.
    ``support`` optionally records the closure of {f != 0} when it is
    known to be an interval (None means nonzero almost everywhere or
    unknown).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    deriv_bound: float
    r: int
    kind: str
    support: Optional[Tuple[float, float]] = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.fn(t)

    def scaled(self, c: float) -> "UnivariateFactor":
        """The factor multiplied by the constant c."""
        inner = self.fn
        return UnivariateFactor(
            fn=lambda t: c * inner(t),
            sup_bound=abs(c) * self.sup_bound,
            deriv_bound=abs(c) * self.deriv_bound,
            r=self.r,
            kind=self.kind,
            support=self.support,
        )


def constant_factor(c: float, r: int) -> UnivariateFactor:
    """The factor identically equal to c."""
    return UnivariateFactor(
        fn=lambda t: np.full_like(np.asarray(t, dtype=float), c),
        sup_bound=abs(c),
        deriv_bound=0.0,
        r=r,
        kind="polynomial-piecewise",
        support=None if c != 0 else (0.0, 0.0),
    )


def polynomial_factor(coeffs: Sequence[float], r: int) -> UnivariateFactor:
    """Factor given by polynomial coefficients (ascending order).

    deriv_bound is the exact sup of the r-th derivative on [0,1],
    computed from the differentiated coefficients via critical points.
    """
    c = np.asarray(coeffs, dtype=float)
    poly = np.polynomial.Polynomial(c)
    dr = poly.deriv(r)
    sup = _poly_abs_max(poly)
    dsup = _poly_abs_max(dr)
    return UnivariateFactor(
        fn=lambda t: poly(t),
        sup_bound=sup,
        deriv_bound=dsup,
        r=r,
        kind="polynomial-piecewise",
        support=None,
    )


def trig_factor(amplitude: float, frequency: float, phase: float, offset: float,
                r: int) -> UnivariateFactor:
    """Factor a*sin(2*pi*k*t + phi) + c with the analytic derivative bound."""
    a, k, phi, c = float(amplitude), float(frequency), float(phase), float(offset)

    def fn(t):
        return a * np.sin(2 * np.pi * k * t + phi) + c

    return UnivariateFactor(
        fn=fn,
        sup_bound=abs(a) + abs(c),
        deriv_bound=abs(a) * (2 * np.pi * k) ** r,
        r=r,
        kind="trig",
        support=None,
    )


def table_factor(ts: Sequence[float], vals: Sequence[float], sup_bound: float,
                 deriv_bound: float, r: int) -> UnivariateFactor:
    """Piecewise-linear factor through a table, with declared bounds."""
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(vals, dtype=float)
    return UnivariateFactor(
        fn=lambda t: np.interp(t, ts, vals),
        sup_bound=float(sup_bound),
        deriv_bound=float(deriv_bound),
        r=r,
        kind="explicit-table",
        support=None,
    )


def make_bump(r: int, orientation: str, interval: Tuple[float, float] = (0.0, 1.0),
              ) -> UnivariateFactor:
    """One-sided bump on half of ``interval``, peak value 1 at the end point.

    For the canonical case interval=[0,1], orientation="left" this is
    f(t) = 2^r max{0, 1/2 - t}^r: f(0) = 1, f vanishes identically on
    [1/2, 1], and the sup of the r-th derivative is exactly 2^r r!.
    General intervals rescale affinely; the factor is defined as 0
    outside ``interval``.
    """
    if r < 1:
        raise ParameterError("smoothness order r must be a positive integer")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ParameterError(f"degenerate interval [{a}, {b}]")
    if orientation not in ("left", "right"):
        raise ParameterError(f"orientation must be 'left' or 'right', got {orientation!r}")
    m = 0.5 * (a + b)
    h = m - a  # half-width; support has measure h

    if orientation == "left":
        def fn(t, a=a, m=m, h=h, r=r):
            t = np.asarray(t, dtype=float)
            return np.where((t >= a) & (t < m), np.maximum(0.0, (m - t) / h) ** r, 0.0)
        support = (a, m)
    else:
        def fn(t, b=b, m=m, h=h, r=r):
            t = np.asarray(t, dtype=float)
            return np.where((t > m) & (t <= b), np.maximum(0.0, (t - m) / h) ** r, 0.0)
        support = (m, b)

    return UnivariateFactor(
        fn=fn,
        sup_bound=1.0,
        deriv_bound=math.factorial(r) / h ** r,
        r=r,
        kind="bump",
        support=support,
    )


def _poly_abs_max(poly: np.polynomial.Polynomial, lo: float = 0.0,
                  hi: float = 1.0) -> float:
    """Exact max of |p| on [lo, hi] via the critical points of p."""
    cand = [lo, hi]
    dp = poly.deriv()
    if dp.degree() >= 1 or (dp.degree() == 0 and dp.coef[0] != 0):
        roots = dp.roots() if dp.degree() >= 1 else []
        for z in np.atleast_1d(roots):
            if abs(z.imag) < 1e-12 and lo <= z.real <= hi:
                cand.append(float(z.real))
    return float(max(abs(poly(t)) for t in cand))


# ---------------------------------------------------------------------------
# Piecewise polynomial interpolation


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piecewise polynomial of local degree < r on [0,1].

    Stored per piece as interpolation nodes, values and barycentric
    weights; evaluation uses the barycentric formula for stability.
    ``coefficients`` holds the equivalent monomial coefficients in the
    local variable (t - piece midpoint), ascending order, for
    serialization.
    """

    breakpoints: np.ndarray            # shape (k+1,), 0 = first < ... < last = 1
    nodes: Tuple[np.ndarray, ...]      # k arrays of shape (r,)
    values: Tuple[np.ndarray, ...]
    weights: Tuple[np.ndarray, ...]
    coefficients: Tuple[np.ndarray, ...] = field(repr=False, default=())

    @property
    def pieces(self) -> int:
        return len(self.nodes)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tf = np.atleast_1d(t)
        out = np.empty_like(tf)
        idx = np.clip(np.searchsorted(self.breakpoints, tf, side="right") - 1,
                      0, self.pieces - 1)
        for j in range(self.pieces):
            sel = idx == j
            if np.any(sel):
                out[sel] = _bary_eval(tf[sel], self.nodes[j], self.values[j],
                                      self.weights[j])
        return float(out[0]) if scalar else out


def _bary_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def _bary_eval(t: np.ndarray, nodes: np.ndarray, values: np.ndarray,
               weights: np.ndarray) -> np.ndarray:
    diff = t[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-300)
    # guard exact node hits before dividing
    safe = np.where(exact, 1.0, diff)
    terms = weights / safe
    num = terms @ values
    den = terms.sum(axis=1)
    out = num / den
    hit_rows, hit_cols = np.nonzero(exact)
    out[hit_rows] = values[hit_cols]
    return out


def _local_coefficients(nodes: np.ndarray, values: np.ndarray,
                        center: float) -> np.ndarray:
    deg = len(nodes) - 1
    p = np.polynomial.Polynomial.fit(nodes - center, values, deg=deg, domain=[])
    return p.coef if len(p.coef) == deg + 1 else np.pad(p.coef, (0, deg + 1 - len(p.coef)))


def interpolate_line(samples: Sequence[Tuple[float, float]], r: int,
                     ) -> PiecewisePolynomial:
    """Blockwise degree-(r-1) interpolation of samples on [0,1].

    The nodes are partitioned into consecutive groups of r (the final
    group is the last r nodes when the count is not a multiple of r);
    each group defines one polynomial piece.  Piece boundaries sit at
    the midpoints between adjacent groups, with the first piece starting
    at 0 and the last ending at 1.  Reproduces any global polynomial of
    degree <= r-1 exactly.
    """
    if r < 1:
        raise ParameterError("smoothness order r must be a positive integer")
    pts = np.asarray([(t, v) for t, v in samples], dtype=float)
    if pts.ndim != 2 or pts.shape[0] < r:
        raise ParameterError(f"need at least r={r} sample nodes, got {0 if pts.ndim != 2 else pts.shape[0]}")
    ts, vs = pts[:, 0], pts[:, 1]
    if np.any(np.diff(ts) <= 0):
        raise ParameterError("sample nodes must be strictly increasing")
    if ts[0] < 0 or ts[-1] > 1:
        raise ParameterError("sample nodes must lie in [0, 1]")

    m = len(ts)
    k = m // r
    groups = [np.arange(j * r, (j + 1) * r) for j in range(k - 1)]
    groups.append(np.arange(m - r, m))

    bps = [0.0]
    for j in range(1, k):
        bps.append(0.5 * (ts[groups[j - 1][-1]] + ts[groups[j][0]]))
    bps.append(1.0)
    breakpoints = np.asarray(bps)

    nodes, values, weights, coeffs = [], [], [], []
    for j, g in enumerate(groups):
        nd, vl = ts[g], vs[g]
        nodes.append(nd)
        values.append(vl)
        weights.append(_bary_weights(nd))
        coeffs.append(_local_coefficients(nd, vl, 0.5 * (breakpoints[j] + breakpoints[j + 1])))

    return PiecewisePolynomial(
        breakpoints=breakpoints,
        nodes=tuple(nodes),
        values=tuple(values),
        weights=tuple(weights),
        coefficients=tuple(coeffs),
    )


def block_chebyshev_nodes(m: int, r: int) -> np.ndarray:
    """r Chebyshev nodes in each of floor(m/r) equal blocks of [0,1].

    Returns r*floor(m/r) <= m sorted nodes; this is the node layout
    that ``interpolate_line`` groups back into the same blocks.
    """
    if m < r:
        raise ParameterError(f"need at least r={r} nodes, got m={m}")
    k = m // r
    # Chebyshev points of the first kind on (-1, 1), ascending
    theta = (2 * np.arange(r) + 1) * np.pi / (2 * r)
    ref = -np.cos(theta)
    out = []
    for j in range(k):
        lo, hi = j / k, (j + 1) / k
        out.append(0.5 * (lo + hi) + 0.5 * (hi - lo) * ref)
    return np.concatenate(out)
