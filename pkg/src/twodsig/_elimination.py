"""Prefix-sum variable elimination for full-signature coordinates.

The coordinate ``(w, nu)`` is a sum over cell indices ``a_1 < ... < a_n``
(axis 1) and ``b_1 < ... < b_n`` (axis 2) of ``prod_k M_k[a_k, b_nu(k)]``.
Each factor is a 2-variable table. Variables are summed out one at a time.
The order constraints on an axis are kept only between neighbours that are
still alive: summing out ``x`` with live neighbours ``y < x < z`` turns into
an exclusive prefix sum (``x < z``), a suffix sum (``x > y``) or a difference
of prefix sums (both), after which ``y < z`` is a pending constraint. A
neighbour that already occurs in the product table is handled by a mask.
"""

from __future__ import annotations

import functools
import itertools
from typing import NamedTuple

import numpy as np


class Plan(NamedTuple):
    order: tuple  # variables ('a'|'b', k) in elimination order
    width: int  # largest table arity encountered
    cost: int  # sum over steps of m ** arity, with m = 1 (arity proxy)


def _neighbours(alive: list, var):
    axis, k = var
    lower = [v for v in alive if v[0] == axis and v[1] < k]
    upper = [v for v in alive if v[0] == axis and v[1] > k]
    lo = max(lower, key=lambda v: v[1]) if lower else None
    hi = min(upper, key=lambda v: v[1]) if upper else None
    return lo, hi


def _step(tables: list, alive: list, var):
    """Symbolic elimination step: returns (new tables, arity of product, arity of result)."""
    touching = [t for t in tables if var in t]
    rest = [t for t in tables if var not in t]
    union = frozenset().union(*touching) if touching else frozenset([var])
    lo, hi = _neighbours(alive, var)
    new = set(union - {var})
    for b in (lo, hi):
        if b is not None and b not in union:
            new.add(b)
    new = frozenset(new)
    return rest + [new], len(union), len(new)


def _initial_tables(nu):
    return [frozenset({("a", k), ("b", nu[k - 1])}) for k in range(1, len(nu) + 1)]


@functools.lru_cache(maxsize=None)
def plan_for(nu: tuple, exhaustive_limit: int = 4) -> Plan:
    """Elimination order minimising the largest table arity, ties by total work."""
    n = len(nu)
    variables = [("a", k) for k in range(1, n + 1)] + [("b", k) for k in range(1, n + 1)]
    if n == 0:
        return Plan((), 0, 0)
    if n > exhaustive_limit:
        return _greedy(nu, variables)
    best = [None]

    def search(tables, alive, order, width, cost):
        if best[0] is not None and (width, cost) >= (best[0].width, best[0].cost):
            return
        if not alive:
            best[0] = Plan(tuple(order), width, cost)
            return
        for var in alive:
            new_tables, ua, ra = _step(tables, alive, var)
            w = max(width, ua, ra)
            if best[0] is not None and w > best[0].width:
                continue
            rest = [v for v in alive if v != var]
            search(new_tables, rest, order + [var], w, cost + 4 ** ua)

    search(_initial_tables(nu), variables, [], 0, 0)
    return best[0]


def _greedy(nu, variables) -> Plan:
    tables = _initial_tables(nu)
    alive = list(variables)
    order, width, cost = [], 0, 0
    while alive:
        scored = []
        for var in alive:
            new_tables, ua, ra = _step(tables, alive, var)
            scored.append((max(ua, ra), ua, var, new_tables))
        w, ua, var, tables = min(scored, key=lambda s: (s[0], s[1]))
        alive.remove(var)
        order.append(var)
        width = max(width, w)
        cost += 4 ** ua
    return Plan(tuple(order), width, cost)


def max_table_entries(nu: tuple, m1: int, m2: int) -> int:
    """Largest number of array entries the plan for nu materialises."""
    plan = plan_for(tuple(nu))
    tables = _initial_tables(nu)
    alive = [("a", k) for k in range(1, len(nu) + 1)] + [("b", k) for k in range(1, len(nu) + 1)]
    size = {"a": m1, "b": m2}
    worst = 1
    for var in plan.order:
        touching = [t for t in tables if var in t]
        union = frozenset().union(*touching) if touching else frozenset([var])
        tables, _, _ = _step(tables, alive, var)
        alive.remove(var)
        for s in (union, tables[-1]):
            worst = max(worst, int(np.prod([size[v[0]] for v in s], dtype=float)))
    return worst


# ---------------------------------------------------------------------------
# numeric execution


def _align(arr: np.ndarray, labels: tuple, union: tuple) -> np.ndarray:
    """Transpose and reshape ``arr`` so it broadcasts against ``union``."""
    present = [u for u in union if u in labels]
    arr = np.transpose(arr, [labels.index(u) for u in present])
    shape = [arr.shape[present.index(u)] if u in labels else 1 for u in union]
    return arr.reshape(shape)


def _order_mask(union: tuple, low, high, sizes: dict, dtype) -> np.ndarray:
    """Indicator of ``low < high`` broadcast over ``union``."""
    n = sizes[low[0]]
    idx = np.arange(n)
    mask = (idx[:, None] < idx[None, :]).astype(dtype)
    return _align(mask, (low, high), union)


def evaluate(factors: list, nu: tuple, m1: int, m2: int, dtype=np.float64) -> float:
    """Evaluate ``sum prod_k factors[k][a_k, b_nu(k)]`` over strict index chains.

    ``factors[k]`` has shape (m1, m2).
    """
    n = len(nu)
    if n == 0:
        return 1.0
    if n > m1 or n > m2:
        return 0.0
    plan = plan_for(tuple(nu))
    sizes = {"a": m1, "b": m2}
    tables = [((("a", k + 1), ("b", nu[k])), np.asarray(factors[k], dtype=dtype)) for k in range(n)]
    alive = [("a", k) for k in range(1, n + 1)] + [("b", k) for k in range(1, n + 1)]
    scalar = np.asarray(1.0, dtype=dtype)
    for var in plan.order:
        touching = [t for t in tables if var in t[0]]
        tables = [t for t in tables if var not in t[0]]
        union = []
        for labels, _ in touching:
            for lab in labels:
                if lab not in union:
                    union.append(lab)
        union = tuple(union)
        prod = None
        for labels, arr in touching:
            a = _align(arr, labels, union)
            prod = a if prod is None else prod * a
        lo, hi = _neighbours(alive, var)
        alive.remove(var)
        if lo is not None and lo in union:
            prod = prod * _order_mask(union, lo, var, sizes, dtype)
            lo = None
        if hi is not None and hi in union:
            prod = prod * _order_mask(union, var, hi, sizes, dtype)
            hi = None
        ax = union.index(var)
        others = tuple(u for u in union if u != var)
        prod = np.broadcast_to(prod, [sizes[u[0]] for u in union])
        if lo is None and hi is None:
            out, labels = prod.sum(axis=ax), others
        elif hi is None:
            # sum over x > lo: exclusive suffix sum, indexed by lo
            inc = np.cumsum(prod[(slice(None),) * ax + (slice(None, None, -1),)], axis=ax)
            inc = inc[(slice(None),) * ax + (slice(None, None, -1),)]
            out = np.zeros_like(inc)
            out[(slice(None),) * ax + (slice(0, -1),)] = inc[(slice(None),) * ax + (slice(1, None),)]
            labels = union[:ax] + (lo,) + union[ax + 1:]
        elif lo is None:
            # sum over x < hi: exclusive prefix sum, indexed by hi
            inc = np.cumsum(prod, axis=ax)
            out = np.zeros_like(inc)
            out[(slice(None),) * ax + (slice(1, None),)] = inc[(slice(None),) * ax + (slice(0, -1),)]
            labels = union[:ax] + (hi,) + union[ax + 1:]
        else:
            # sum over lo < x < hi = P_excl[hi] - P_incl[lo]
            inc = np.moveaxis(np.cumsum(prod, axis=ax), ax, -1)
            exc = np.zeros_like(inc)
            exc[..., 1:] = inc[..., :-1]
            out = exc[..., None, :] - inc[..., :, None]
            labels = others + (lo, hi)
        if labels:
            tables.append((labels, out))
        else:
            scalar = scalar * out
    for labels, arr in tables:  # pragma: no cover - every variable is eliminated
        raise AssertionError(f"leftover table {labels}")
    return float(scalar)


def tuple_count(n: int, m1: int, m2: int) -> int:
    from math import comb

    return comb(m1, n) * comb(m2, n)


def chains(m: int, n: int) -> np.ndarray:
    """All strictly increasing n-tuples from range(m), shape (C(m,n), n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    out = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(m), n)),
                      dtype=np.int64)
    return out.reshape(-1, n)
