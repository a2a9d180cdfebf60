"""Numerical checks of the algebraic and analytic identities of 2D signatures.

Each checker returns a :class:`~twodsig.report.CheckReport`. Checkers that
verify a continuum identity take ``field`` as either a GridField (evaluated
once) or a callable ``N -> GridField`` evaluated at each size in
``refinements``. Rectangles are given as a :class:`~twodsig.field.Box` in
domain coordinates (so they scale with N), a GridRect, or None for the full
domain.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from . import combinatorics as cb
from .combinatorics import ExtendedWord, LinearCombination
from .errors import InputError, UnsupportedError
from .field import (
    Box,
    GridField,
    GridRect,
    Path1D,
    TrigPoly,
    is_square,
    lift,
    mixed_density,
    monomial,
    rect_increment,
    resolve_rect,
    rotate90,
    sample_field,
    stretch,
    translate_by_paths,
)
from .report import (
    CheckReport,
    exact_report,
    inequality_report,
    refinement_report,
)
from .signature import (
    brute_force_signature,
    conv_product_1,
    conv_product_2,
    corner_table,
    full_signature,
    id_signature,
    restricted_cells,
    sym_signature,
    upper_corner_table,
)

DEFAULT_REFINEMENTS = (32, 64, 128)


def _factory(field) -> Callable[[int], GridField]:
    if isinstance(field, GridField):
        return lambda N: field
    if callable(field):
        return field
    raise InputError("field must be a GridField or a callable N -> GridField")


def _sizes(field, refinements) -> list:
    if isinstance(field, GridField):
        return [field.n1]
    return list(refinements or DEFAULT_REFINEMENTS)


# id(grid) -> {(rect, key): value} for grids owned by a CachedField
_MEMOS: dict = {}


class CachedField:
    """Field factory that keeps one grid per size and memoizes its full-signature values.

    Suites of checks on the same field share expansion terms; this evaluates
    each coordinate once per grid size.
    """

    def __init__(self, make: Callable[[int], GridField]):
        self.make = make
        self._grids: dict = {}

    def __call__(self, N: int) -> GridField:
        if N not in self._grids:
            X = self.make(N)
            self._grids[N] = X
            _MEMOS[id(X)] = {}
        return self._grids[N]

    def clear(self) -> None:
        for X in self._grids.values():
            _MEMOS.pop(id(X), None)
        self._grids.clear()

    def __del__(self):
        self.clear()


def _full(X, coords, rect):
    coords = [ExtendedWord.make(*c) if not isinstance(c, ExtendedWord) else c for c in coords]
    memo = _MEMOS.get(id(X))
    if memo is None:
        table = full_signature(X, coords, rect)
        return np.array([table[c] for c in coords])
    r = tuple(resolve_rect(X, rect))
    missing = list(dict.fromkeys(c for c in coords if (r, c.key()) not in memo))
    if missing:
        table = full_signature(X, missing, rect)
        for c in missing:
            memo[(r, c.key())] = table[c]
    return np.array([memo[(r, c.key())] for c in coords])


def _lc_value(X, lc: LinearCombination, rect) -> float:
    coords = [e for e, _ in lc.items()]
    if not coords:
        return 0.0
    vals = _full(X, coords, rect)
    return float(sum(c * v for (_, c), v in zip(lc.items(), vals)))


def _key(c) -> str:
    return ExtendedWord.make(*c).key() if not isinstance(c, str) else c


# ---------------------------------------------------------------------------
# shuffle relations


def check_shuffle_full(field, a, b, rect=None, refinements=None) -> CheckReport:
    """<S,a><S,b> against the extended-word shuffle expansion."""
    a = ExtendedWord.make(*a)
    b = ExtendedWord.make(*b)
    expansion = cb.extended_shuffle(a, b)
    make = _factory(field)

    def compute(N):
        X = make(N)
        left = _full(X, [a, b], rect)
        return float(left[0] * left[1]), _lc_value(X, expansion, rect)

    return refinement_report(f"shuffle_full {a.key()} x {b.key()}", _sizes(field, refinements),
                             compute, terms=len(expansion))


def check_shuffle_sym(field, w, w2, rect=None, refinements=None) -> CheckReport:
    """<S^Sym,w><S^Sym,w'> against the word shuffle expansion."""
    w = cb.check_word(w)
    w2 = cb.check_word(w2)
    expansion = cb.word_shuffle(w, w2)
    make = _factory(field)
    words = [w, w2] + [u for u, _ in expansion.items()]

    def compute(N):
        X = make(N)
        t = sym_signature(X, words, rect)
        return t[w] * t[w2], sum(c * t[u] for u, c in expansion.items())

    return refinement_report(f"shuffle_sym {cb.word_key(w)} x {cb.word_key(w2)}",
                             _sizes(field, refinements), compute)


# ---------------------------------------------------------------------------
# Chen relations


def _split_index(X: GridField, u, axis: int) -> int:
    if isinstance(u, (int, np.integer)):
        return int(u)
    h = X.h1 if axis == 1 else X.h2
    q = float(u) / h
    k = int(round(q))
    if abs(q - k) > 1e-9 * max(1.0, abs(q)):
        raise InputError(f"split point {u} is not on the grid")
    return k


def chen_id_sides(X: GridField, w, axis: int, u, rect=None) -> tuple[float, float]:
    """Both sides of the axis-wise Chen relation for the id-signature."""
    w = cb.check_word(w, X.d)
    r = resolve_rect(X, rect)
    k = _split_index(X, u, axis)
    lo, hi = (r.i0, r.i1) if axis == 1 else (r.j0, r.j1)
    if not lo <= k <= hi:
        raise InputError(f"split index {k} outside [{lo}, {hi}]")
    if axis == 1:
        parts = [r, GridRect(r.i0, r.j0, k, r.j1), GridRect(k, r.j0, r.i1, r.j1)]
    else:
        parts = [r, GridRect(r.i0, r.j0, r.i1, k), GridRect(r.i0, k, r.i1, r.j1)]
    vals = [id_signature(X, [w], p)[w] for p in parts]
    lhs = vals[0] - vals[1] - vals[2]
    rhs = 0.0
    for ell in range(1, len(w)):
        inner, outer = w[:ell], w[ell:]
        if axis == 1:
            rhs += conv_product_1(X, outer, inner, k, r.i1, r.i0, k, r.j0, r.j1)
        else:
            rhs += conv_product_2(X, outer, inner, k, r.j1, r.j0, k, r.i0, r.i1)
    return lhs, rhs


def check_chen_id(field, w, axis: int, u, rect=None, refinements=None) -> CheckReport:
    """delta_u S^id against the sum of convolution products over all splits.

    ``u`` is a domain coordinate (float) or a node index (int).
    """
    if axis not in (1, 2):
        raise InputError("axis must be 1 or 2")
    w = cb.check_word(w)
    if len(w) < 2:
        raise InputError("Chen check needs a word of length >= 2")
    make = _factory(field)
    return refinement_report(f"chen_id axis{axis} {cb.word_key(w)} u={u}", _sizes(field, refinements),
                             lambda N: chen_id_sides(make(N), w, axis, u, rect))


def chen_sym_sides(X: GridField, w, u, rect=None) -> tuple[float, float]:
    w = cb.check_word(w, X.d)
    r = resolve_rect(X, rect)
    k = _split_index(X, u, 1)
    if not r.i0 <= k <= r.i1:
        raise InputError(f"split index {k} outside [{r.i0}, {r.i1}]")
    left = GridRect(r.i0, r.j0, k, r.j1)
    right = GridRect(k, r.j0, r.i1, r.j1)
    prefixes = [w[:ell] for ell in range(len(w) + 1)]
    suffixes = [w[ell:] for ell in range(len(w) + 1)]
    tl = sym_signature(X, prefixes, left)
    tr = sym_signature(X, suffixes, right)
    lhs = sym_signature(X, [w], r)[w] - tl[w] - tr[w]
    rhs = sum(tl[w[:ell]] * tr[w[ell:]] for ell in range(1, len(w)))
    return lhs, rhs


def check_chen_sym(field, w, u, rect=None, refinements=None) -> CheckReport:
    """delta_u S^Sym along axis 1 against the plain product expansion."""
    w = cb.check_word(w)
    if len(w) < 2:
        raise InputError("Chen check needs a word of length >= 2")
    make = _factory(field)
    return refinement_report(f"chen_sym {cb.word_key(w)} u={u}", _sizes(field, refinements),
                             lambda N: chen_sym_sides(make(N), w, u, rect))


# ---------------------------------------------------------------------------
# exact invariances


def rotated_coordinate(coord, quarter_turns: int) -> tuple[int, ExtendedWord]:
    """Sign and coordinate with <S(rot^q X), coord> = sign * <S(X), result>."""
    c = ExtendedWord.make(*coord)
    n = c.n
    q = int(quarter_turns) % 4
    rho = cb.reversal(n)
    w, nu = c.word, c.perm
    if q == 0:
        return 1, c
    if q == 1:
        p = cb.compose(cb.inverse(nu), rho)
        return (-1) ** n, ExtendedWord(cb.apply(w, p), p)
    if q == 2:
        p = cb.compose(cb.compose(cb.inverse(rho), nu), rho)
        return 1, ExtendedWord(cb.apply(w, rho), p)
    p = cb.compose(cb.inverse(rho), cb.inverse(nu))
    return (-1) ** n, ExtendedWord(cb.apply(w, cb.inverse(nu)), p)


def check_rotation(X: GridField, coord, quarter_turns: int = 1, rect=None) -> CheckReport:
    """Full signature of the rotated field against the relabelled original."""
    if not is_square(X):
        raise InputError("rotation check needs a square grid")
    c = ExtendedWord.make(*coord)
    sign, target = rotated_coordinate(c, quarter_turns)
    lhs = full_signature(rotate90(X, quarter_turns), [c])[c]
    rhs = sign * full_signature(X, [target])[target]
    return exact_report(f"rotation q={quarter_turns % 4} {c.key()}", lhs, rhs, [X.n1],
                        target=target.key(), sign=sign)


def check_translation(X: GridField, x1: Path1D | None, x2: Path1D | None, a, coords,
                      rect=None) -> CheckReport:
    coords = [ExtendedWord.make(*c) for c in coords]
    Y = translate_by_paths(X, x1, x2, a)
    lhs = _full(Y, coords, rect)
    rhs = _full(X, coords, rect)
    return exact_report(f"translation ({len(coords)} coords)", lhs, rhs, [X.n1])


def check_stretch(field, phi1: Callable, phi2: Callable, coords, refinements=None) -> CheckReport:
    """Full-square signature of X o phi against that of X.

    ``phi1`` and ``phi2`` map [0, T] onto itself and are sampled on the grid.
    """
    coords = [ExtendedWord.make(*c) for c in coords]
    make = _factory(field)

    def compute(N):
        X = make(N)
        t1, t2 = X.nodes()
        Y = stretch(X, phi1(t1), phi2(t2))
        return _full(Y, coords, None), _full(X, coords, None)

    return refinement_report(f"stretch ({len(coords)} coords)", _sizes(field, refinements), compute)


# ---------------------------------------------------------------------------
# continuity bound


def c2_norm(V: np.ndarray, h1: float, h2: float) -> float:
    """max of |values|, |forward differences|/h and |mixed differences|/(h1 h2)."""
    V = np.asarray(V, dtype=float)
    d1 = np.abs(np.diff(V, axis=0)).max() / h1
    d2 = np.abs(np.diff(V, axis=1)).max() / h2
    mixed = np.abs(V[1:, 1:] - V[:-1, 1:] - V[1:, :-1] + V[:-1, :-1]).max() / (h1 * h2)
    return float(max(np.abs(V).max(), d1, d2, mixed))


def continuity_bound(X: GridField, Xt: GridField, coord) -> float:
    c = ExtendedWord.make(*coord)
    n = c.n
    norms = [c2_norm(X.channel(k), X.h1, X.h2) for k in c.word]
    norms_t = [c2_norm(Xt.channel(k), X.h1, X.h2) for k in c.word]
    diffs = [c2_norm(X.channel(k) - Xt.channel(k), X.h1, X.h2) for k in c.word]
    total = 0.0
    for k in range(n):
        total += math.prod(norms[:k]) * math.prod(norms_t[k + 1:]) * diffs[k]
    return (X.T1 * X.T2) ** n / math.factorial(n) ** 2 * total


def check_continuity_bound(X: GridField, Xt: GridField, coord, rect=None) -> CheckReport:
    if X.values.shape != Xt.values.shape:
        raise InputError("fields must share a grid")
    c = ExtendedWord.make(*coord)
    lhs = abs(full_signature(X, [c], rect)[c] - full_signature(Xt, [c], rect)[c])
    rhs = continuity_bound(X, Xt, c)
    return inequality_report(f"continuity {c.key()}", lhs, rhs, [X.n1])


# ---------------------------------------------------------------------------
# increment products


def check_product_formula(field, w, rect=None, refinements=None) -> CheckReport:
    """prod_k box X^{w_k} against sum over nu, nu' of <S, (w_nu, nu')>."""
    w = cb.check_word(w)
    if not 1 <= len(w) <= 3:
        raise UnsupportedError("product formula check supports 1 <= |w| <= 3")
    expansion = cb.product_expansion(w)
    make = _factory(field)

    def compute(N):
        X = make(N)
        inc = rect_increment(X, resolve_rect(X, rect))
        return float(np.prod([inc[k - 1] for k in w])), _lc_value(X, expansion, rect)

    return refinement_report(f"product {cb.word_key(w)}", _sizes(field, refinements), compute)


def remainder_RX(X: GridField, i: int = 1, j: int = 1, rect=None) -> float:
    """Discrete R^X with channels i, j.

    Per cell: (axis-1 difference of X^i minus its value on the bottom edge)
    times (axis-2 difference of X^j minus its value on the left edge).
    """
    r = resolve_rect(X, rect)
    v = X.values[r.i0:r.i1 + 1, r.j0:r.j1 + 1]
    d1 = (v[1:, :-1, i - 1] - v[:-1, :-1, i - 1]) - (v[1:, :1, i - 1] - v[:-1, :1, i - 1])
    d2 = (v[:-1, 1:, j - 1] - v[:-1, :-1, j - 1]) - (v[:1, 1:, j - 1] - v[:1, :-1, j - 1])
    return float(np.sum(d1 * d2))


def check_remainder(X: GridField, i: int = 1, j: int = 1, rect=None) -> CheckReport:
    """R^X equals the coordinate ((j, i), (21)) on the grid."""
    coord = ExtendedWord((j, i), (2, 1))
    lhs = remainder_RX(X, i, j, rect)
    rhs = full_signature(X, [coord], rect)[coord]
    return exact_report(f"remainder R^X i={i} j={j}", lhs, rhs, [X.n1], tol=1e-11)


# ---------------------------------------------------------------------------
# L-recursion


def l_kernel(perm: tuple) -> list:
    """Kernel of the last-letter recursion as (sign, region, prefix permutation).

    Regions are relative to the cell v of the last letter: ``A`` is the block
    left of and below v, ``B`` the full-height strip left of v and ``C`` the
    block left of and above v.
    """
    perm = tuple(perm)
    table = {
        (1,): [(1, "A", ())],
        (1, 2): [(1, "A", (1,))],
        (2, 1): [(1, "C", (1,))],
        (1, 2, 3): [(1, "A", (1, 2))],
        (1, 3, 2): [(1, "B", (1, 2)), (-1, "A", (1, 2)), (-1, "C", (1, 2))],
        (2, 1, 3): [(1, "A", (2, 1))],
        (2, 3, 1): [(1, "C", (1, 2))],
        (3, 2, 1): [(1, "C", (2, 1))],
        (3, 1, 2): [(1, "B", (2, 1)), (-1, "A", (2, 1)), (-1, "C", (2, 1))],
    }
    if perm not in table:
        raise UnsupportedError(f"no L-kernel for permutation {perm}")
    return table[perm]


def l_recursion_rhs(X: GridField, w, perm, rect=None, backend: str = "tables") -> float:
    """sum over cells v of L(v) * D^{w_n}(v)."""
    w = cb.check_word(w, X.d)
    perm = cb.check_permutation(perm)
    if len(w) != len(perm):
        raise InputError("word and permutation lengths differ")
    kernel = l_kernel(perm)
    cells, r = restricted_cells(X, rect)
    m1, m2 = cells.shape[:2]
    prefix = w[:-1]
    L = np.zeros((m1, m2))
    if backend == "tables":
        for sign, region, p in kernel:
            coord = ExtendedWord(prefix, p)
            if region == "A":
                L += sign * corner_table(cells, coord)[:m1, :m2]
            elif region == "B":
                L += sign * corner_table(cells, coord)[:m1, m2][:, None]
            else:
                L += sign * upper_corner_table(cells, coord)[:m1, :]
    elif backend == "brute":
        for a in range(m1):
            for b in range(m2):
                total = 0.0
                for sign, region, p in kernel:
                    coord = ExtendedWord(prefix, p)
                    if region == "A":
                        sub = GridRect(r.i0, r.j0, r.i0 + a, r.j0 + b)
                    elif region == "B":
                        sub = GridRect(r.i0, r.j0, r.i0 + a, r.j1)
                    else:
                        sub = GridRect(r.i0, r.j0 + b + 1, r.i0 + a, r.j1)
                    total += sign * brute_force_signature(X, coord, sub)
                L[a, b] = total
    else:
        raise InputError(f"unknown backend {backend!r}")
    return float(np.sum(L * cells[:, :, w[-1] - 1]))


def check_L_recursion(field, w, perm, rect=None, refinements=None, backend: str = "tables") -> CheckReport:
    """Direct <S,(w,perm)> against the last-letter kernel integral."""
    w = cb.check_word(w)
    perm = cb.check_permutation(perm)
    coord = ExtendedWord.make(w, perm)
    make = _factory(field)

    def compute(N):
        X = make(N)
        return full_signature(X, [coord], rect)[coord], l_recursion_rhs(X, w, perm, rect, backend)

    return refinement_report(f"L_recursion {coord.key()}", _sizes(field, refinements), compute,
                             backend=backend)


# ---------------------------------------------------------------------------
# change of variables


def _function_family(name: str, d: int):
    """(f, grad, hess) on arrays of shape (..., d)."""
    c = np.arange(1, d + 1, dtype=float) / d
    if name == "linear":
        return (lambda x: x @ c,
                lambda x: np.broadcast_to(c, x.shape),
                lambda x: np.zeros(x.shape + (d,)))
    if name == "square":
        return (lambda x: np.sum(x ** 2, axis=-1),
                lambda x: 2 * x,
                lambda x: np.broadcast_to(2 * np.eye(d), x.shape + (d,)))
    if name == "quadratic":
        Q = np.eye(d) + 0.5 * (np.ones((d, d)) - np.eye(d))
        return (lambda x: np.einsum("...i,ij,...j->...", x, Q, x),
                lambda x: 2 * x @ Q,
                lambda x: np.broadcast_to(2 * Q, x.shape + (d,)))
    if name == "cubic":
        def f(x):
            return np.sum(x ** 3, axis=-1) + x[..., 0] * np.sum(x, axis=-1) ** 2

        def grad(x):
            s = np.sum(x, axis=-1, keepdims=True)
            g = 3 * x ** 2 + 2 * x[..., :1] * s
            g[..., 0] += s[..., 0] ** 2
            return g

        def hess(x):
            s = np.sum(x, axis=-1)
            H = np.zeros(x.shape + (d,))
            idx = np.arange(d)
            H[..., idx, idx] = 6 * x
            H += 2 * x[..., 0, None, None]
            H[..., 0, :] += 2 * s[..., None]
            H[..., :, 0] += 2 * s[..., None]
            return H

        return f, grad, hess
    if name == "exp":
        return (lambda x: np.exp(x @ c),
                lambda x: np.exp(x @ c)[..., None] * c,
                lambda x: np.exp(x @ c)[..., None, None] * np.outer(c, c))
    raise InputError(f"unknown function {name!r}; choose linear, square, quadratic, cubic or exp")


FUNCTIONS = ("linear", "square", "quadratic", "cubic", "exp")


def change_of_variables_sides(X: GridField, f: str, rect=None) -> tuple[float, float]:
    fn, grad, hess = _function_family(f, X.d)
    r = resolve_rect(X, rect)
    v = X.values[r.i0:r.i1 + 1, r.j0:r.j1 + 1]
    F = fn(v)
    lhs = F[-1, -1] - F[0, -1] - F[-1, 0] + F[0, 0]
    base = v[:-1, :-1]
    D = v[1:, 1:] - v[:-1, 1:] - v[1:, :-1] + v[:-1, :-1]
    e1 = v[1:, :-1] - v[:-1, :-1]
    e2 = v[:-1, 1:] - v[:-1, :-1]
    first = np.sum(grad(base) * D)
    second = np.einsum("abij,abi,abj->", hess(base), e1, e2)
    return float(lhs), float(first + second)


def check_change_of_variables(field, f: str, rect=None, refinements=None) -> CheckReport:
    """box f(X) against the first- plus second-order integrals, lower-left evaluation."""
    make = _factory(field)
    _function_family(f, 1)
    return refinement_report(f"change_of_variables f={f}", _sizes(field, refinements),
                             lambda N: change_of_variables_sides(make(N), f, rect))


# ---------------------------------------------------------------------------
# universality moments


def moment_expansion(m: int, n: int) -> LinearCombination:
    """Extended-word combination pairing with s1^(2m+n) s2^(2n+m) dX^3 on the lift."""
    acc = LinearCombination.single(ExtendedWord((), ()))
    for letter, count in ((1, m), (2, n)):
        for _ in range(count):
            acc = cb.extended_shuffle_lc(acc, LinearCombination.single(ExtendedWord((letter,), (1,))))
    terms = []
    for e, c in acc.items():
        k = e.n
        terms.append((c, ExtendedWord(e.word + (3,), e.perm + (k + 1,))))
    return LinearCombination(terms)


def moment_quadrature(X: GridField, m: int, n: int) -> float:
    """Midpoint rule for the integral of s1^(2m+n) s2^(2n+m) against the cells of channel 1."""
    t1, t2 = X.nodes()
    c1 = 0.5 * (t1[1:] + t1[:-1])
    c2 = 0.5 * (t2[1:] + t2[:-1])
    weight = np.outer(c1 ** (2 * m + n), c2 ** (2 * n + m))
    return float(np.sum(weight * mixed_density(X).cells[:, :, 0]))


def universality_sides(X: GridField, m: int, n: int) -> tuple[float, float]:
    if X.d != 1:
        raise InputError("universality check uses a scalar field")
    Xh = lift(X)
    return _lc_value(Xh, moment_expansion(m, n), None), moment_quadrature(X, m, n)


def check_universality_moments(field, m: int, n: int, refinements=None) -> CheckReport:
    if m < 0 or n < 0 or m + n > 3:
        raise UnsupportedError("universality check supports m, n >= 0 with m + n <= 3")
    make = _factory(field)
    return refinement_report(f"universality m={m} n={n}", _sizes(field, refinements),
                             lambda N: universality_sides(make(N), m, n))


# ---------------------------------------------------------------------------
# default battery


def default_battery(refinements=None, seed: int = 0, only: str | None = None,
                    field: GridField | None = None) -> list[CheckReport]:
    """A representative run of every checker on built-in fields.

    ``field`` (optional) replaces the built-in field for the exact checks.
    Refinement checks use fixed fields that are in the asymptotic regime at
    the default grid sizes; ``seed`` drives the random data of exact checks.
    """
    refinements = list(refinements or DEFAULT_REFINEMENTS)
    poly1 = TrigPoly(0, 2, 1)
    poly2 = TrigPoly(0, 2, 2)
    f1 = poly1.sample
    f2 = poly2.sample
    groups: dict = {}

    def add(group, thunk):
        groups.setdefault(group, []).append(thunk)

    add("shuffle", lambda: check_shuffle_full(f1, ((1,), (1,)), ((1,), (1,)), refinements=refinements))
    add("shuffle", lambda: check_shuffle_full(f2, ((1, 2), (2, 1)), ((2,), (1,)), refinements=refinements))
    add("shuffle", lambda: check_shuffle_sym(f2, (1, 2), (2,), refinements=refinements))
    add("chen", lambda: check_chen_id(f2, (1, 2, 1), 1, 0.5, refinements=refinements))
    add("chen", lambda: check_chen_id(f2, (2, 1), 2, 0.25, refinements=refinements))
    add("chen", lambda: check_chen_sym(f2, (1, 2, 2), 0.5, refinements=refinements))
    add("product", lambda: check_product_formula(f2, (1, 2), refinements=refinements))
    add("L_recursion", lambda: check_L_recursion(f2, (1, 2, 1), (1, 3, 2), refinements=refinements))
    add("L_recursion", lambda: check_L_recursion(f2, (2, 1, 1), (2, 3, 1), refinements=refinements))
    add("change_of_variables",
        lambda: check_change_of_variables(f2, "quadratic", refinements=refinements))
    add("stretch", lambda: check_stretch(f1, lambda t: t ** 2, lambda t: t, [((1, 1), (2, 1))],
                                         refinements=refinements))
    add("universality", lambda: check_universality_moments(f1, 1, 1, refinements=refinements))

    exact = field if field is not None else f2(12)
    rng = np.random.default_rng(seed)

    def rotation_checks():
        if not is_square(exact):
            raise InputError("rotation checks need a square grid")
        out = []
        for q in (1, 2, 3):
            for c in (((1,), (1,)), ((1, 2), (2, 1)), ((1, 1, 2), (3, 1, 2))):
                if max(c[0]) <= exact.d:
                    out.append(check_rotation(exact, c, q))
        return out

    def translation_checks():
        x1 = Path1D(rng.normal(size=(exact.n1 + 1, exact.d)))
        x2 = Path1D(rng.normal(size=(exact.n2 + 1, exact.d)))
        coords = [c for c in cb.extended_words_up_to(exact.d, 2)]
        return [check_translation(exact, x1, x2, rng.normal(size=exact.d), coords)]

    def continuity_checks():
        bump = TrigPoly(seed + 7, 2, exact.d)(*np.meshgrid(*exact.nodes(), indexing="ij"))
        Xt = GridField(exact.values + 1e-2 * bump, exact.T1, exact.T2)
        return [check_continuity_bound(exact, Xt, c) for c in cb.extended_words(exact.d, 2)[:4]]

    groups.setdefault("rotation", []).append(rotation_checks)
    groups.setdefault("translation", []).append(translation_checks)
    groups.setdefault("continuity", []).append(continuity_checks)
    add("remainder", lambda: check_remainder(exact, 1, 1))

    if only is not None and only not in groups:
        raise InputError(f"unknown checker group {only!r}; choose from {sorted(groups)}")
    selected = [only] if only else list(groups)
    reports: list[CheckReport] = []
    for g in selected:
        for thunk in groups[g]:
            out = thunk()
            reports.extend(out if isinstance(out, list) else [out])
    return reports


CHECKER_GROUPS = ("shuffle", "chen", "product", "L_recursion", "change_of_variables", "stretch",
                  "universality", "rotation", "translation", "continuity", "remainder")
