"""1D path signatures and the id, full and symmetrized 2D signatures.

All 2D sums run over strictly increasing cell indices on both axes, using
the per-cell rectangular increments of :func:`twodsig.field.mixed_density`
restricted to the rectangle.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from . import _elimination
from .combinatorics import (
    ExtendedWord,
    Word,
    check_word,
    identity,
    parse_word_key,
    reversal,
    compose,
    word_key,
)
from .errors import InputError, ResourceLimitError, UnsupportedError
from .field import GridField, GridRect, Path1D, mixed_density, resolve_rect

MAX_LEVEL = 4
BRUTE_FORCE_CAP = 10 ** 8
MAX_WIDTH = 3
MAX_TABLE_ENTRIES = 6 * 10 ** 7
EXTENDED_PRECISION_FROM = 256


# ---------------------------------------------------------------------------
# result container


@dataclass
class SigTable:
    """Coordinate key -> value, with the grid and rectangle it was computed on."""

    kind: str
    entries: dict
    grid: tuple
    rect: tuple | None = None
    meta: dict = dc_field(default_factory=dict)

    def __getitem__(self, coord) -> float:
        return self.entries[coord_key(coord)]

    def __contains__(self, coord) -> bool:
        return coord_key(coord) in self.entries

    def __len__(self):
        return len(self.entries)

    def keys(self):
        return list(self.entries)

    def values(self, coords: Iterable) -> np.ndarray:
        return np.array([self[c] for c in coords])

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rect": list(self.rect) if self.rect is not None else None,
            "grid": list(self.grid),
            "entries": dict(self.entries),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in self.entries.items():
            w.writerow([k, repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> "SigTable":
        try:
            rect = tuple(data["rect"]) if data.get("rect") is not None else None
            return cls(data["kind"], {str(k): float(v) for k, v in data["entries"].items()},
                       tuple(data["grid"]), rect)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed signature table: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SigTable":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed signature table json: {exc}") from exc

    @staticmethod
    def entries_from_csv(text: str) -> dict:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["key", "value"]:
            raise InputError("signature csv needs a 'key,value' header")
        try:
            return {r[0]: float(r[1]) for r in rows[1:] if r}
        except (IndexError, ValueError) as exc:
            raise InputError(f"malformed signature csv: {exc}") from exc


def coord_key(coord) -> str:
    """Serialized key of a Word, an ExtendedWord or an already-serialized key."""
    if isinstance(coord, str):
        return coord
    if isinstance(coord, ExtendedWord):
        return coord.key()
    if isinstance(coord, tuple) and len(coord) == 2 and all(isinstance(c, tuple) for c in coord):
        return ExtendedWord.make(*coord).key()
    return word_key(coord)


def parse_coord(text: str, kind: str):
    return ExtendedWord.parse(text) if kind == "full" else parse_word_key(text)


@dataclass(frozen=True)
class SigQuery:
    """Coordinates requested over a rectangle."""

    kind: str
    coords: tuple
    rect: GridRect | None = None
    max_level: int = MAX_LEVEL

    def __post_init__(self):
        if self.kind not in ("id", "full", "sym", "path1d"):
            raise InputError(f"unknown signature kind {self.kind!r}")
        for c in self.coords:
            n = len(c.word) if isinstance(c, ExtendedWord) else len(c)
            if n > self.max_level:
                raise InputError(f"coordinate {coord_key(c)} exceeds max level {self.max_level}")

    def run(self, X, **kwargs) -> SigTable:
        if self.kind == "path1d":
            return path_signature_1d(X, self.coords, **kwargs)
        fn = {"id": id_signature, "full": full_signature, "sym": sym_signature}[self.kind]
        return fn(X, self.coords, self.rect, **kwargs)


# ---------------------------------------------------------------------------
# helpers


def _choose_dtype(m1: int, m2: int, precision: str):
    if precision == "double":
        return np.float64
    if precision == "extended":
        return np.longdouble
    if precision != "auto":
        raise InputError(f"precision must be auto, double or extended; got {precision!r}")
    return np.longdouble if max(m1, m2) >= EXTENDED_PRECISION_FROM else np.float64


def restricted_cells(X: GridField, rect=None) -> tuple[np.ndarray, GridRect]:
    r = resolve_rect(X, rect)
    return mixed_density(X).restrict(r), r


def _check_letters(w: Sequence[int], d: int) -> Word:
    return check_word(w, d)


def _as_ext(c) -> ExtendedWord:
    if isinstance(c, ExtendedWord):
        return c
    if isinstance(c, str):
        return ExtendedWord.parse(c)
    return ExtendedWord.make(*c)


def _strict_prefix_1d(inc: np.ndarray, word: Word, dtype=np.float64) -> np.ndarray:
    """Strict iterated sums along one axis, for all endpoints.

    Returns ``V`` of length m+1 with ``V[p] = sum_{i_1<...<i_n<p} prod inc[i_k, w_k]``.
    """
    m = inc.shape[0]
    V = np.ones(m + 1, dtype=dtype)
    for letter in word:
        term = V[:m] * inc[:, letter - 1]
        V = np.zeros(m + 1, dtype=dtype)
        V[1:] = np.cumsum(term)
    return V


# ---------------------------------------------------------------------------
# 1D signatures


def path_signature_1d(x: Path1D, words: Iterable, method: str = "linear") -> SigTable:
    """Signature coordinates of a sampled path.

    ``method="linear"`` gives the exact signature of the piecewise-linear
    interpolant (Chen's relation with one exponential per segment).
    ``method="strict"`` gives strict left-point sums over segment increments,
    the 1D analogue of the strict 2D convention.
    """
    inc = x.increments()
    words = [_check_letters(w, x.d) for w in words]
    entries = {}
    for w in words:
        if method == "linear":
            val = _linear_signature(inc, w)
        elif method == "strict":
            val = float(_strict_prefix_1d(inc, w)[-1])
        else:
            raise InputError(f"unknown 1D method {method!r}")
        entries[word_key(w)] = float(val)
    return SigTable("path1d", entries, (x.m,), None, {"method": method})


def _linear_signature(inc: np.ndarray, w: Word) -> float:
    # V[j][p]: signature of the prefix w[:j] on segments [0, p)
    n = len(w)
    m = inc.shape[0]
    V = [np.ones(m + 1)]
    for j in range(1, n + 1):
        step = np.zeros(m)
        for i in range(j):
            e = np.ones(m)
            for k in range(i, j):
                e = e * inc[:, w[k] - 1]
            step += V[i][:m] * e / math.factorial(j - i)
        Vj = np.zeros(m + 1)
        Vj[1:] = np.cumsum(step)
        V.append(Vj)
    return float(V[n][m])


# ---------------------------------------------------------------------------
# id signature


def id_node_table(cells: np.ndarray, word: Word, dtype=np.float64, start=None) -> np.ndarray:
    """Table over rectangle nodes of the id-signature of ``word``.

    ``T[p, q] = sum over i_1<..<i_n<p, j_1<..<j_n<q of prod cells[i_k, j_k, w_k]``.
    ``start`` optionally replaces the empty-word table (shape (m1, m2) over
    cells); it is evaluated at the first cell of the chain.
    """
    m1, m2 = cells.shape[:2]
    V = np.ones((m1 + 1, m2 + 1), dtype=dtype)
    first = True
    for letter in word:
        base = start if (first and start is not None) else V[:m1, :m2]
        P = np.asarray(base, dtype=dtype) * cells[:, :, letter - 1]
        V = np.zeros((m1 + 1, m2 + 1), dtype=dtype)
        V[1:, 1:] = P.cumsum(axis=0).cumsum(axis=1)
        first = False
    return V


def id_signature(X: GridField, words: Iterable, rect=None, precision: str = "auto",
                 max_level: int | None = None) -> SigTable:
    """id-signature coordinates via the 2D prefix-sum recursion.

    Word prefixes are shared, so the cost is one O(m1*m2) pass per distinct prefix.
    """
    cells, r = restricted_cells(X, rect)
    words = [_check_letters(w, X.d) for w in words]
    _check_level(words, max_level)
    dtype = _choose_dtype(r.m1, r.m2, precision)
    cells = cells.astype(dtype)
    memo = {(): None}
    entries = {}
    for w in words:
        if r.is_degenerate():
            entries[word_key(w)] = 1.0 if not w else 0.0
            continue
        entries[word_key(w)] = float(_id_prefix_table(cells, w, memo, dtype)[-1, -1]) if w else 1.0
    return SigTable("id", entries, (X.n1, X.n2), tuple(r))


def _id_prefix_table(cells, w, memo, dtype):
    if w in memo:
        return memo[w]
    m1, m2 = cells.shape[:2]
    prev = _id_prefix_table(cells, w[:-1], memo, dtype) if w[:-1] else np.ones((m1 + 1, m2 + 1), dtype=dtype)
    P = prev[:m1, :m2] * cells[:, :, w[-1] - 1]
    V = np.zeros((m1 + 1, m2 + 1), dtype=dtype)
    V[1:, 1:] = P.cumsum(axis=0).cumsum(axis=1)
    memo[w] = V
    return V


def _check_level(coords, max_level):
    if max_level is None:
        return
    for c in coords:
        n = len(c.word) if isinstance(c, ExtendedWord) else len(c)
        if n > max_level:
            raise InputError(f"coordinate of length {n} exceeds max level {max_level}")


# ---------------------------------------------------------------------------
# full signature


def full_signature(X: GridField, coords: Iterable, rect=None, precision: str = "auto",
                   max_width: int = MAX_WIDTH, max_entries: int = MAX_TABLE_ENTRIES,
                   brute_force_cap: int = BRUTE_FORCE_CAP, max_level: int | None = None) -> SigTable:
    """Full-signature coordinates ``<S, (w, nu)>`` by prefix-sum elimination.

    Falls back to direct enumeration when the plan for ``nu`` needs tables of
    arity above ``max_width`` or more than ``max_entries`` entries; raises
    ResourceLimitError if enumeration would also exceed ``brute_force_cap``.
    """
    cells, r = restricted_cells(X, rect)
    coords = [_as_ext(c) for c in coords]
    for c in coords:
        _check_letters(c.word, X.d)
    _check_level(coords, max_level)
    dtype = _choose_dtype(r.m1, r.m2, precision)
    cells_t = cells.astype(dtype)
    entries = {}
    for c in coords:
        entries[c.key()] = _full_value(X, cells_t, r, c, dtype, max_width, max_entries, brute_force_cap)
    return SigTable("full", entries, (X.n1, X.n2), tuple(r))


def _full_value(X, cells, r, c, dtype, max_width, max_entries, brute_force_cap) -> float:
    n = c.n
    if n == 0:
        return 1.0
    if r.is_degenerate() or n > r.m1 or n > r.m2:
        return 0.0
    plan = _elimination.plan_for(c.perm)
    too_big = plan.width > max_width or _elimination.max_table_entries(c.perm, r.m1, r.m2) > max_entries
    if too_big:
        count = _elimination.tuple_count(n, r.m1, r.m2)
        if count > brute_force_cap:
            raise ResourceLimitError(
                f"{c.key()} on a {r.m1}x{r.m2} rectangle needs width {plan.width} tables "
                f"and {count} tuples for enumeration; use a coarser grid"
            )
        return brute_force_signature(X, c, r, cap=brute_force_cap)
    factors = [cells[:, :, letter - 1] for letter in c.word]
    return _elimination.evaluate(factors, c.perm, r.m1, r.m2, dtype)


def full_value(X: GridField, coord, rect=None, **kwargs) -> float:
    """Single full-signature coordinate as a float."""
    c = _as_ext(coord)
    return full_signature(X, [c], rect, **kwargs)[c]


def brute_force_signature(X: GridField, coord, rect=None, cap: int = BRUTE_FORCE_CAP) -> float:
    """Direct enumeration of all strictly increasing index tuples.

    Cell increments are recomputed from the four corners here, independently
    of the production path.
    """
    c = _as_ext(coord)
    _check_letters(c.word, X.d)
    r = resolve_rect(X, rect)
    n = c.n
    if n == 0:
        return 1.0
    if r.is_degenerate() or n > r.m1 or n > r.m2:
        return 0.0
    count = _elimination.tuple_count(n, r.m1, r.m2)
    if count > cap:
        raise ResourceLimitError(f"brute force needs {count} tuples, above the cap {cap}")
    v = np.asarray(X.values, dtype=float)[r.i0:r.i1 + 1, r.j0:r.j1 + 1]
    D = v[1:, 1:] - v[:-1, 1:] - v[1:, :-1] + v[:-1, :-1]
    A = _elimination.chains(r.m1, n)
    B = _elimination.chains(r.m2, n)
    partials = []
    chunk = max(1, 2 ** 22 // max(1, len(B)))
    for start in range(0, len(A), chunk):
        Ac = A[start:start + chunk]
        prod = np.ones((len(Ac), len(B)))
        for k in range(n):
            prod *= D[:, :, c.word[k] - 1][np.ix_(Ac[:, k], B[:, c.perm[k] - 1])]
        partials.extend(prod.sum(axis=1).tolist())
    return math.fsum(partials)


# ---------------------------------------------------------------------------
# symmetrized signature


def sym_signature(X: GridField, words: Iterable, rect=None, precision: str = "auto",
                  max_level: int | None = None) -> SigTable:
    """Symmetrized coordinates: strict 1D sums of the column-integrated cells."""
    cells, r = restricted_cells(X, rect)
    words = [_check_letters(w, X.d) for w in words]
    _check_level(words, max_level)
    dtype = _choose_dtype(r.m1, r.m2, precision)
    g = cells.astype(dtype).sum(axis=1)
    entries = {}
    for w in words:
        if not w:
            entries[word_key(w)] = 1.0
        elif r.is_degenerate():
            entries[word_key(w)] = 0.0
        else:
            entries[word_key(w)] = float(_strict_prefix_1d(g, w, dtype)[-1])
    return SigTable("sym", entries, (X.n1, X.n2), tuple(r))


def increment_path(X: GridField, rect=None) -> Path1D:
    """The path ``y_r = X(r, t2) - X(r, s2)`` for r along axis 1 of the rectangle."""
    r = resolve_rect(X, rect)
    v = X.values
    y = v[r.i0:r.i1 + 1, r.j1, :] - v[r.i0:r.i1 + 1, r.j0, :]
    if y.shape[0] < 2:
        raise InputError("increment path needs at least one column")
    return Path1D(y, r.m1 * X.h1)


# ---------------------------------------------------------------------------
# node tables for families of sub-rectangles


def corner_table(cells: np.ndarray, coord, dtype=np.float64) -> np.ndarray:
    """Full-signature values over the cell blocks [0,p) x [0,q), all p, q.

    Supported for words of length at most 2 (any permutation).
    """
    c = _as_ext(coord)
    m1, m2 = cells.shape[:2]
    if c.n == 0:
        return np.ones((m1 + 1, m2 + 1), dtype=dtype)
    if c.perm == identity(c.n):
        return id_node_table(cells, c.word, dtype)
    if c.n != 2:
        raise UnsupportedError("corner tables beyond length 2 are only available for nu = id")
    # nu = (21): sum over i < i' < p and j' < j < q of D1[i, j] D2[i', j']
    D1 = cells[:, :, c.word[0] - 1].astype(dtype)
    D2 = cells[:, :, c.word[1] - 1].astype(dtype)
    P1 = np.zeros((m1 + 1, m2 + 1), dtype=dtype)
    P1[1:, 1:] = D1.cumsum(0).cumsum(1)
    C2 = np.zeros((m1, m2 + 1), dtype=dtype)
    C2[:, 1:] = D2.cumsum(1)
    term1 = P1[:m1, :] * C2  # indexed (i', q)
    E = D2 * P1[:m1, 1:]  # indexed (i', j'), uses P1[i', j' + 1]
    out = np.zeros((m1 + 1, m2 + 1), dtype=dtype)
    out[1:, :] = term1.cumsum(0)
    second = np.zeros((m1 + 1, m2 + 1), dtype=dtype)
    second[1:, 1:] = E.cumsum(0).cumsum(1)
    return out - second


def upper_corner_table(cells: np.ndarray, coord, dtype=np.float64) -> np.ndarray:
    """Values over the blocks [0,p) x (q, m2) for all p and cells q.

    Returned with shape (m1+1, m2); entry [p, q] uses axis-2 cells strictly
    above q. Obtained by flipping axis 2, which reverses axis-2 ranks.
    """
    c = _as_ext(coord)
    flipped = cells[:, ::-1, :]
    rev = compose(reversal(c.n), c.perm) if c.n else ()
    T = corner_table(flipped, ExtendedWord(c.word, rev), dtype)
    m2 = cells.shape[1]
    # cells above q in original order = first m2 - 1 - q cells after flip
    return T[:, [m2 - 1 - q for q in range(m2)]]


# ---------------------------------------------------------------------------
# convolution products


def conv_product_1(X: GridField, outer: Sequence[int], inner: Sequence[int], a: int, b: int,
                   c: int, d: int, j0: int, j1: int, precision: str = "double") -> float:
    """Horizontal convolution product.

    Sum over axis-1 cells ``a <= p_1 < ... < p_k < b`` and axis-2 cells
    ``j0 <= q_1 < ... < q_k < j1`` of ``prod_l D^{outer_l}[p_l, q_l]`` times the
    id-signature of ``inner`` over axis-1 cells [c, d) and axis-2 cells [j0, q_1).
    All arguments are node indices of the full grid.
    """
    outer = _check_letters(outer, X.d)
    inner = _check_letters(inner, X.d)
    if not (0 <= a <= b <= X.n1 and 0 <= c <= d <= X.n1 and 0 <= j0 <= j1 <= X.n2):
        raise InputError("invalid convolution bounds")
    dtype = _choose_dtype(X.n1, X.n2, precision)
    D = mixed_density(X).cells.astype(dtype)
    inner_cells = D[c:d, j0:j1]
    if inner:
        T = id_node_table(inner_cells, inner, dtype)
        I = T[d - c, :]  # I[q] = inner value with axis-2 cells < j0 + q
    else:
        I = np.ones(j1 - j0 + 1, dtype=dtype)
    if not outer:
        return float(I[-1])
    outer_cells = D[a:b, j0:j1]
    m1, m2 = outer_cells.shape[:2]
    start = np.broadcast_to(I[None, :m2], (m1, m2))
    V = id_node_table(outer_cells, outer, dtype, start=start)
    return float(V[-1, -1])


def conv_product_2(X: GridField, outer: Sequence[int], inner: Sequence[int], a: int, b: int,
                   c: int, d: int, i0: int, i1: int, precision: str = "double") -> float:
    """Vertical convolution product: the horizontal one on the transposed field.

    ``a, b, c, d`` are axis-2 node indices, ``i0, i1`` axis-1 bounds.
    """
    return conv_product_1(X.transpose(), outer, inner, a, b, c, d, i0, i1, precision)
