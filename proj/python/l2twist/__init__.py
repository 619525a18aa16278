"""Python front end for the l2twist library.

Jobs use the same JSON schema as the l2twist command-line tool; results come
back as dicts.
"""

import json
import math

from ._l2twist import (
    DimensionMismatch,
    InvalidInput,
    approx_json,
    canonical_polynomial,
    fkdet_json,
    geometric_grid,
    lead,
    mahler_json,
    torsion_json,
)

__all__ = [
    "DimensionMismatch",
    "InvalidInput",
    "approx",
    "canonical_polynomial",
    "degree",
    "fkdet",
    "geometric_grid",
    "lead",
    "mahler",
    "torsion",
]


def _load(text):
    out = json.loads(text)
    if out.get("value", 0.0) is None and out.get("status") == "zero-determinant":
        out["value"] = -math.inf
    return out


def mahler(poly, method="auto", tol=1e-4, quadrature_n=256):
    return _load(mahler_json(poly, method, tol, quadrature_n))


def fkdet(job, tol=1e-4):
    return _load(fkdet_json(json.dumps(job), tol))


def approx(job):
    return json.loads(approx_json(json.dumps(job)))


def _grid(job, t):
    if t is None:
        t = job.get("t") or geometric_grid(0.25, 4.0, 9)
    return [float(x) for x in t]


def torsion(job, t=None):
    return json.loads(torsion_json(json.dumps(job), _grid(job, t), False))


def degree(job, t=None):
    return json.loads(torsion_json(json.dumps(job), _grid(job, t), True))["degree"]
