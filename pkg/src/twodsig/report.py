"""Structured results of identity checks and the shared pass/fail policy."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

EXACT_TOL = 1e-12
FLOOR_TOL = 1e-8
RATIO_BAND = (1.7, 2.3)


@dataclass
class CheckReport:
    """Outcome of one identity check.

    ``mode`` is ``exact`` (fixed tolerance), ``convergence`` (refinement
    ratio, or an absolute floor when the identity holds on the grid) or
    ``inequality`` (lhs <= rhs must hold outright).
    """

    name: str
    lhs: object
    rhs: object
    abs_err: float
    rel_err: float
    tolerance: float
    grid_sizes: list
    convergence_ratio: float | None
    passed: bool
    mode: str = "exact"
    errors: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "lhs": _plain(self.lhs),
            "rhs": _plain(self.rhs),
            "abs_err": float(self.abs_err),
            "rel_err": float(self.rel_err),
            "tolerance": float(self.tolerance),
            "grid_sizes": list(self.grid_sizes),
            "errors": [float(e) for e in self.errors],
            "convergence_ratio": None if self.convergence_ratio is None else float(self.convergence_ratio),
            "passed": bool(self.passed),
            "details": {k: _plain(v) for k, v in self.details.items()},
        }

    def line(self) -> str:
        ratio = "-" if self.convergence_ratio is None else f"{self.convergence_ratio:.3f}"
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48} err={self.abs_err:.3e} ratio={ratio} grids={self.grid_sizes}"


def _plain(v):
    if isinstance(v, np.ndarray):
        return [float(x) for x in v.ravel()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return float(v)
    return v


def reports_to_json(reports: Sequence[CheckReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def reports_table(reports: Sequence[CheckReport]) -> str:
    lines = [r.line() for r in reports]
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(lines)


def _err(lhs, rhs) -> float:
    return float(np.max(np.abs(np.asarray(lhs, dtype=float) - np.asarray(rhs, dtype=float))))


def _rel(err: float, rhs) -> float:
    scale = float(np.max(np.abs(np.asarray(rhs, dtype=float)))) if np.size(rhs) else 0.0
    return err / scale if scale > 0 else (0.0 if err == 0 else math.inf)


def exact_report(name: str, lhs, rhs, grid_sizes, tol: float = EXACT_TOL, **details) -> CheckReport:
    err = _err(lhs, rhs)
    rel = _rel(err, rhs)
    return CheckReport(name, lhs, rhs, err, rel, tol, list(grid_sizes), None,
                       err <= tol or rel <= tol, "exact", [err], details)


def inequality_report(name: str, lhs: float, rhs: float, grid_sizes, **details) -> CheckReport:
    # allow rounding in the last bits when both sides coincide
    slack = 1e-13 * max(abs(lhs), abs(rhs)) + 1e-300
    violation = max(0.0, float(lhs - rhs))
    return CheckReport(name, lhs, rhs, violation, _rel(violation, rhs), 0.0, list(grid_sizes), None,
                       lhs <= rhs + slack, "inequality", [violation], details)


def refinement_report(name: str, sizes: Sequence[int], compute: Callable, floor: float = FLOOR_TOL,
                      band=RATIO_BAND, **details) -> CheckReport:
    """Evaluate ``compute(N) -> (lhs, rhs)`` on each grid size.

    Passes when the finest error is at most ``floor`` (the identity holds on
    the grid), or when errors decrease and the last ratio lies in ``band``.
    """
    sizes = list(sizes)
    errors, lhs, rhs = [], None, None
    for N in sizes:
        lhs, rhs = compute(N)
        errors.append(_err(lhs, rhs))
    ratio = None
    if len(errors) >= 2 and errors[-1] > 0:
        ratio = errors[-2] / errors[-1]
    decreasing = all(errors[i + 1] < errors[i] for i in range(len(errors) - 1))
    in_band = ratio is not None and band[0] <= ratio <= band[1]
    passed = errors[-1] <= floor or (decreasing and in_band)
    return CheckReport(name, lhs, rhs, errors[-1], _rel(errors[-1], rhs), floor, sizes, ratio,
                       passed, "convergence", errors, details)
