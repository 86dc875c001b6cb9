"""JSON specifications for factors and tensors.

The on-disk format consumed by the CLI: a factor is a tagged record
with a ``kind`` plus its parameters and declared bounds, a tensor spec
wraps d factors (or one factor with ``replicate: true``) together with
the class parameters.
"""

from __future__ import annotations

from typing import Any, Dict

import numpy as np

from .errors import ParameterError
from .tensor import Box, RankOneTensor
from .univariate import (UnivariateFactor, make_bump, polynomial_factor,
                         table_factor, trig_factor)


def factor_from_spec(spec: Dict[str, Any], r: int) -> UnivariateFactor:
    kind = spec.get("kind")
    if kind == "bump":
        interval = tuple(spec.get("interval", (0.0, 1.0)))
        return make_bump(r, spec["orientation"], interval)
    if kind == "trig":
        return trig_factor(spec["amplitude"], spec["frequency"],
                           spec.get("phase", 0.0), spec.get("offset", 0.0), r)
    if kind == "polynomial-piecewise":
        return polynomial_factor(spec["coefficients"], r)
    if kind == "explicit-table":
        return table_factor(spec["ts"], spec["values"], spec["sup_bound"],
                            spec["deriv_bound"], r)
    raise ParameterError(f"unknown factor kind {kind!r}")


def tensor_from_spec(spec: Dict[str, Any]) -> RankOneTensor:
    """Build a tensor from {"d", "r", "M", "V", "factors" | "factor"+replicate}."""
    try:
        d = int(spec["d"])
        r = int(spec["r"])
        M = float(spec["M"])
    except KeyError as exc:
        raise ParameterError(f"tensor spec missing field {exc}")
    if spec.get("replicate"):
        fspec = spec.get("factor") or spec["factors"][0]
        factors = tuple(factor_from_spec(fspec, r) for _ in range(d))
    else:
        fspecs = spec.get("factors", [])
        if len(fspecs) != d:
            raise ParameterError(f"expected {d} factor specs, got {len(fspecs)}")
        factors = tuple(factor_from_spec(fs, r) for fs in fspecs)
    V = spec.get("V")
    witness = None
    if spec.get("witness_box") is not None:
        wb = spec["witness_box"]
        witness = Box(lower=np.asarray(wb["lower"], dtype=float),
                      upper=np.asarray(wb["upper"], dtype=float))
    return RankOneTensor(factors=factors, r=r, M=M,
                         support_volume=None if V is None else float(V),
                         witness_box=witness)


def approximant_to_dict(approx) -> Dict[str, Any]:
    """Serialize a reconstruction: breakpoints and local coefficients per axis."""
    axes = []
    for g in approx.line_interpolants:
        axes.append({
            "breakpoints": [float(b) for b in g.breakpoints],
            "coefficients": [[float(c) for c in piece] for piece in g.coefficients],
            "nodes": [[float(t) for t in piece] for piece in g.nodes],
            "values": [[float(v) for v in piece] for piece in g.values],
        })
    return {"center_value": float(approx.center_value), "axes": axes}
