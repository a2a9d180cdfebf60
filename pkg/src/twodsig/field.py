"""Discrete fields on uniform grids.

A ``GridField`` stores samples ``X(i*h1, j*h2)`` for ``0 <= i <= n1`` and
``0 <= j <= n2``. Every 2D signature is a sum over the per-cell rectangular
increments returned by :func:`mixed_density`.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class GridField:
    """d-channel samples on an (n1+1) x (n2+1) grid over [0,T1] x [0,T2]."""

    values: np.ndarray
    T1: float = 1.0
    T2: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 2:
            v = v[:, :, None]
        if v.ndim != 3 or v.shape[0] < 2 or v.shape[1] < 2 or v.shape[2] < 1:
            raise InputError(f"field values need shape (n1+1, n2+1, d) with n1, n2 >= 1; got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InputError("field values must be finite")
        if not (self.T1 > 0 and self.T2 > 0):
            raise InputError("domain lengths must be positive")
        v = v.copy() if v is self.values else v
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "T1", float(self.T1))
        object.__setattr__(self, "T2", float(self.T2))

    @property
    def n1(self) -> int:
        return self.values.shape[0] - 1

    @property
    def n2(self) -> int:
        return self.values.shape[1] - 1

    @property
    def d(self) -> int:
        return self.values.shape[2]

    @property
    def h1(self) -> float:
        return self.T1 / self.n1

    @property
    def h2(self) -> float:
        return self.T2 / self.n2

    def nodes(self):
        """Node coordinates along both axes."""
        return (np.arange(self.n1 + 1) * self.h1, np.arange(self.n2 + 1) * self.h2)

    def channel(self, k: int) -> np.ndarray:
        """Channel k (1-based) as an (n1+1, n2+1) array."""
        return self.values[:, :, k - 1]

    def transpose(self) -> "GridField":
        """Swap the two axes."""
        return GridField(self.values.transpose(1, 0, 2), self.T2, self.T1)

    def full_rect(self) -> "GridRect":
        return GridRect(0, 0, self.n1, self.n2)

    def __eq__(self, other):
        if not isinstance(other, GridField):
            return NotImplemented
        return (
            self.T1 == other.T1
            and self.T2 == other.T2
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class CellDensity:
    """Per-cell rectangular increments, shape (n1, n2, d)."""

    cells: np.ndarray
    h1: float
    h2: float

    def __post_init__(self):
        c = np.array(self.cells, dtype=float)
        c.flags.writeable = False
        object.__setattr__(self, "cells", c)

    @property
    def shape(self):
        return self.cells.shape

    def restrict(self, rect: "GridRect") -> np.ndarray:
        """Cells inside a grid-aligned rectangle, shape (i1-i0, j1-j0, d)."""
        return self.cells[rect.i0:rect.i1, rect.j0:rect.j1, :]

    def per_area(self) -> np.ndarray:
        """Cells divided by cell area: a first-order estimate of the mixed partial."""
        return self.cells / (self.h1 * self.h2)


class GridRect(NamedTuple):
    """Grid-aligned rectangle from node (i0, j0) to node (i1, j1)."""

    i0: int
    j0: int
    i1: int
    j1: int

    @property
    def m1(self) -> int:
        return self.i1 - self.i0

    @property
    def m2(self) -> int:
        return self.j1 - self.j0

    def is_degenerate(self) -> bool:
        return self.i1 == self.i0 or self.j1 == self.j0

    def validate(self, X: GridField) -> "GridRect":
        r = GridRect(*(int(v) for v in self))
        if not (0 <= r.i0 <= r.i1 <= X.n1 and 0 <= r.j0 <= r.j1 <= X.n2):
            raise InputError(f"rectangle {tuple(r)} outside grid {X.n1}x{X.n2}")
        return r

    @classmethod
    def parse(cls, text: str) -> "GridRect":
        try:
            parts = [int(v) for v in text.split(",")]
        except ValueError as exc:
            raise InputError(f"bad rectangle {text!r}") from exc
        if len(parts) != 4:
            raise InputError(f"rectangle needs i0,j0,i1,j1; got {text!r}")
        return cls(*parts)


class Box(NamedTuple):
    """Rectangle in domain coordinates, resolved against a grid on demand.

    Used where the same physical rectangle is evaluated at several grid sizes.
    """

    s1: float
    s2: float
    t1: float
    t2: float

    def on(self, X: GridField) -> GridRect:
        idx = []
        for value, h in ((self.s1, X.h1), (self.s2, X.h2), (self.t1, X.h1), (self.t2, X.h2)):
            q = value / h
            r = int(round(q))
            if abs(q - r) > 1e-9 * max(1.0, abs(q)):
                raise InputError(f"box coordinate {value} is not on the grid (spacing {h})")
            idx.append(r)
        return GridRect(*idx).validate(X)


def resolve_rect(X: GridField, rect) -> GridRect:
    """Accept None (full grid), a GridRect, a Box or a 4-tuple of indices."""
    if rect is None:
        return X.full_rect()
    if isinstance(rect, Box):
        return rect.on(X)
    return GridRect(*rect).validate(X)


@dataclass(frozen=True)
class Path1D:
    """d-channel samples of a path on a uniform grid of [0, length]."""

    values: np.ndarray
    length: float = 1.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 2:
            raise InputError(f"path values need shape (m+1, d) with m >= 1; got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InputError("path values must be finite")
        if not self.length > 0:
            raise InputError("path length must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0] - 1

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    @classmethod
    def from_function(cls, f: Callable, m: int, length: float = 1.0) -> "Path1D":
        t = np.linspace(0.0, length, m + 1)
        return cls(np.asarray(f(t), dtype=float).reshape(m + 1, -1), length)


# ---------------------------------------------------------------------------
# differentials and increments


def mixed_density(X: GridField) -> CellDensity:
    v = X.values
    cells = v[1:, 1:] - v[:-1, 1:] - v[1:, :-1] + v[:-1, :-1]
    return CellDensity(cells, X.h1, X.h2)


def rect_increment(X: GridField, rect=None) -> np.ndarray:
    r = resolve_rect(X, rect)
    v = X.values
    return v[r.i1, r.j1] - v[r.i0, r.j1] - v[r.i1, r.j0] + v[r.i0, r.j0]


# ---------------------------------------------------------------------------
# geometric transforms


def rotate90(X: GridField, quarter_turns: int = 1) -> GridField:
    """Rotate by quarter_turns * pi/2 about the centre of a square grid.

    One turn sets ``Y[i][j] = X[n - j][i]``, the grid form of
    ``Y(t1, t2) = X(-t2, t1)`` on a centred square.
    """
    if X.n1 != X.n2 or X.T1 != X.T2:
        raise InputError("rotation needs a square grid on a square domain")
    v = X.values
    for _ in range(int(quarter_turns) % 4):
        v = v.transpose(1, 0, 2)[:, ::-1, :]
    return GridField(np.ascontiguousarray(v), X.T1, X.T2)


def translate_by_paths(X: GridField, x1: Path1D | None = None, x2: Path1D | None = None,
                       a=None) -> GridField:
    """Return ``X + x1(t1) + x2(t2) + a`` pointwise."""
    v = np.array(X.values, dtype=float)
    if x1 is not None:
        if x1.values.shape != (X.n1 + 1, X.d):
            raise InputError(f"x1 must have shape {(X.n1 + 1, X.d)}; got {x1.values.shape}")
        v = v + x1.values[:, None, :]
    if x2 is not None:
        if x2.values.shape != (X.n2 + 1, X.d):
            raise InputError(f"x2 must have shape {(X.n2 + 1, X.d)}; got {x2.values.shape}")
        v = v + x2.values[None, :, :]
    if a is not None:
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape != (X.d,):
            raise InputError(f"shift must have {X.d} entries")
        v = v + a
    return GridField(v, X.T1, X.T2)


def _interp_weights(phi: np.ndarray, n: int, T: float):
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or phi.size < 2:
        raise InputError("stretch map must be a 1D array of samples")
    if np.any(np.diff(phi) <= 0):
        raise InputError("stretch map must be strictly increasing")
    if phi[0] != 0.0 or abs(phi[-1] - T) > 1e-12 * T:
        raise InputError("stretch map must fix the endpoints 0 and T")
    q = phi / T * n
    snapped = np.rint(q)
    q = np.where(np.abs(q - snapped) < 1e-9, snapped, q)
    lo = np.clip(np.floor(q).astype(int), 0, n - 1)
    frac = q - lo
    return lo, frac


def stretch(X: GridField, phi1, phi2) -> GridField:
    """Resample ``X o (phi1, phi2)`` with bilinear interpolation.

    ``phi1`` and ``phi2`` are sampled on the output grid; their lengths set the
    output grid size.
    """
    lo1, f1 = _interp_weights(phi1, X.n1, X.T1)
    lo2, f2 = _interp_weights(phi2, X.n2, X.T2)
    v = X.values
    g1 = (1 - f1)[:, None, None]
    g2 = (1 - f2)[None, :, None]
    a = f1[:, None, None]
    b = f2[None, :, None]
    out = (
        g1 * g2 * v[np.ix_(lo1, lo2)]
        + a * g2 * v[np.ix_(lo1 + 1, lo2)]
        + g1 * b * v[np.ix_(lo1, lo2 + 1)]
        + a * b * v[np.ix_(lo1 + 1, lo2 + 1)]
    )
    return GridField(out, X.T1, X.T2)


def lift(X: GridField) -> GridField:
    """Prepend the channels ``s1^2 s2`` and ``s1 s2^2``."""
    t1, t2 = X.nodes()
    s1, s2 = np.meshgrid(t1, t2, indexing="ij")
    extra = np.stack([s1 ** 2 * s2, s1 * s2 ** 2], axis=-1)
    return GridField(np.concatenate([extra, X.values], axis=-1), X.T1, X.T2)


# ---------------------------------------------------------------------------
# generators


def sample_field(f: Callable, n1: int, n2: int | None = None, T1: float = 1.0,
                 T2: float | None = None) -> GridField:
    """Sample ``f(t1, t2) -> (..., d)`` (or scalar) on a uniform grid."""
    n2 = n1 if n2 is None else n2
    T2 = T1 if T2 is None else T2
    t1 = np.linspace(0.0, T1, n1 + 1)
    t2 = np.linspace(0.0, T2, n2 + 1)
    s1, s2 = np.meshgrid(t1, t2, indexing="ij")
    v = np.asarray(f(s1, s2), dtype=float)
    if v.shape == s1.shape:
        v = v[:, :, None]
    return GridField(v, T1, T2)


def multiplicative(x1: Path1D, x2: Path1D) -> GridField:
    """Channel-wise product ``X^k(t1, t2) = x1^k(t1) x2^k(t2)``."""
    if x1.d != x2.d:
        raise InputError("paths must have the same dimension")
    v = x1.values[:, None, :] * x2.values[None, :, :]
    return GridField(v, x1.length, x2.length)


def homotopy_sine(N: int) -> GridField:
    """The field ``(sin(pi t2) t1, sin(pi t1) t2)`` on [0,1]^2."""
    return sample_field(
        lambda a, b: np.stack([np.sin(np.pi * b) * a, np.sin(np.pi * a) * b], axis=-1), N, N
    )


def monomial(p: int, q: int, N: int, T: float = 1.0) -> GridField:
    """Scalar field ``t1^p t2^q``."""
    return sample_field(lambda a, b: a ** p * b ** q, N, N, T, T)


class TrigPoly:
    """Random finite Fourier sum, reproducible from a seed.

    ``X^k(t1,t2) = sum_{p,q<=degree} c[k,p,q] cos(pi (p t1 + phi[k,p,q]))
    cos(pi (q t2 + psi[k,p,q])) / (1 + p + q)``.
    """

    def __init__(self, seed: int = 0, degree: int = 3, d: int = 1):
        rng = np.random.default_rng(seed)
        shape = (d, degree + 1, degree + 1)
        self.seed, self.degree, self.d = seed, degree, d
        self.c = rng.normal(size=shape)
        self.phi = rng.uniform(0, 2, size=shape)
        self.psi = rng.uniform(0, 2, size=shape)
        p = np.arange(degree + 1)
        self.p = p[:, None]
        self.q = p[None, :]
        self.scale = 1.0 / (1.0 + self.p + self.q)

    def __call__(self, t1, t2):
        t1 = np.asarray(t1, dtype=float)[..., None, None, None]
        t2 = np.asarray(t2, dtype=float)[..., None, None, None]
        terms = (self.c * self.scale * np.cos(np.pi * (self.p * t1 + self.phi))
                 * np.cos(np.pi * (self.q * t2 + self.psi)))
        return terms.sum(axis=(-1, -2))

    def sample(self, n1: int, n2: int | None = None, T1: float = 1.0, T2: float | None = None):
        return sample_field(self, n1, n2, T1, T2)


def trig_poly(seed: int, degree: int, d: int, n1: int = 32, n2: int | None = None,
              T1: float = 1.0, T2: float | None = None) -> GridField:
    """Sample a seeded random Fourier sum. The same seed gives the same continuum field."""
    return TrigPoly(seed, degree, d).sample(n1, n2, T1, T2)


def polynomial_path(seed: int, degree: int, d: int, m: int, length: float = 1.0) -> Path1D:
    """Random polynomial path with standard normal coefficients, x(0) = 0."""
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=(degree, d))
    t = np.linspace(0.0, length, m + 1)
    powers = np.stack([t ** (k + 1) for k in range(degree)], axis=-1)
    return Path1D(powers @ coeffs, length)


def linear_path(direction, m: int, length: float = 1.0) -> Path1D:
    direction = np.asarray(direction, dtype=float).reshape(-1)
    t = np.linspace(0.0, length, m + 1)
    return Path1D(t[:, None] * direction[None, :], length)


# ---------------------------------------------------------------------------
# file I/O

_CSV_HEADER = re.compile(
    r"#\s*twodsig-field\s+d=(\d+)\s+n1=(\d+)\s+n2=(\d+)\s+T1=(\S+)\s+T2=(\S+)\s*$"
)


def _infer_format(path: str, fmt: str | None) -> str:
    if fmt:
        fmt = fmt.lower()
    else:
        ext = os.path.splitext(path)[1].lower().lstrip(".")
        fmt = {"pgm": "pgm", "pnm": "pgm", "csv": "csv", "png": "png"}.get(ext, "")
    if fmt not in ("pgm", "csv", "png"):
        raise InputError(f"unknown field format {fmt or path!r}; use pgm, csv or png")
    return fmt


def load_field(path: str, fmt: str | None = None, T1: float = 1.0, T2: float = 1.0) -> GridField:
    """Load a field from CSV, PGM (P2/P5) or 8-bit PNG.

    Image column x maps to axis 1 node i = x and image row y maps to axis 2
    node j = height - 1 - y, so that axis 2 points up. ``T1``/``T2`` apply to
    image formats; CSV files carry their own domain.
    """
    fmt = _infer_format(path, fmt)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not data.strip():
        raise InputError(f"malformed {fmt} file {path}: empty")
    if fmt == "csv":
        return _parse_csv(data.decode("utf-8", errors="replace"), path)
    if fmt == "pgm":
        img = _parse_pgm(data, path)
    else:
        img = _parse_png(path)
    # img: (height, width, channels), already scaled to [0, 1]
    v = img[::-1, :, :].transpose(1, 0, 2)
    return GridField(v, T1, T2)


def _parse_csv(text: str, path: str) -> GridField:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    m = _CSV_HEADER.match(lines[0].strip()) if lines else None
    if not m:
        raise InputError(f"malformed csv field {path}: missing '# twodsig-field' header")
    d, n1, n2 = (int(m.group(k)) for k in (1, 2, 3))
    try:
        T1, T2 = float(m.group(4)), float(m.group(5))
    except ValueError as exc:
        raise InputError(f"malformed csv field {path}: bad domain") from exc
    rows = lines[1:]
    if len(rows) != (n1 + 1) * (n2 + 1):
        raise InputError(
            f"malformed csv field {path}: expected {(n1 + 1) * (n2 + 1)} rows, got {len(rows)}"
        )
    v = np.empty((n1 + 1, n2 + 1, d))
    seen = np.zeros((n1 + 1, n2 + 1), dtype=bool)
    for ln in rows:
        parts = ln.split(",")
        if len(parts) != d + 2:
            raise InputError(f"malformed csv field {path}: inconsistent row length in {ln!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            vals = [float(p) for p in parts[2:]]
        except ValueError as exc:
            raise InputError(f"malformed csv field {path}: bad number in {ln!r}") from exc
        if not (0 <= i <= n1 and 0 <= j <= n2) or seen[i, j]:
            raise InputError(f"malformed csv field {path}: bad or repeated node ({i},{j})")
        seen[i, j] = True
        v[i, j] = vals
    return GridField(v, T1, T2)


def _pgm_tokens(data: bytes):
    """Yield (token, end offset) from a PNM header, skipping comments."""
    pos = 0
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
                pos += 1
            yield data[start:pos], pos


def _parse_pgm(data: bytes, path: str) -> np.ndarray:
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        if magic not in (b"P2", b"P5"):
            raise InputError(f"malformed pgm {path}: magic {magic!r}")
        width = int(next(tokens)[0])
        height = int(next(tokens)[0])
        tok, end = next(tokens)
        maxval = int(tok)
    except (StopIteration, ValueError) as exc:
        raise InputError(f"malformed pgm {path}: bad header") from exc
    if width < 2 or height < 2:
        raise InputError(f"malformed pgm {path}: need at least 2x2 pixels")
    if not 0 < maxval <= 65535:
        raise InputError(f"unsupported bit depth in {path}: maxval {maxval}")
    count = width * height
    if magic == b"P2":
        try:
            vals = [int(t) for t, _ in tokens]
        except ValueError as exc:
            raise InputError(f"malformed pgm {path}: non-integer sample") from exc
        if len(vals) != count:
            raise InputError(f"malformed pgm {path}: expected {count} samples, got {len(vals)}")
        arr = np.array(vals, dtype=float)
    else:
        body = data[end + 1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(body) < count * dtype.itemsize:
            raise InputError(f"malformed pgm {path}: truncated raster")
        arr = np.frombuffer(body[:count * dtype.itemsize], dtype=dtype).astype(float)
    if np.any(arr > maxval):
        raise InputError(f"malformed pgm {path}: sample above maxval")
    return (arr / maxval).reshape(height, width, 1)


def _parse_png(path: str) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "P":
                im = im.convert("RGB")
                mode = "RGB"
            if mode not in ("L", "RGB"):
                raise InputError(f"unsupported bit depth or mode {mode!r} in {path}; need 8-bit L or RGB")
            arr = np.asarray(im, dtype=float) / 255.0
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise InputError(f"malformed png {path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        raise InputError(f"malformed png {path}: need at least 2x2 pixels")
    return arr


def field_to_csv(X: GridField) -> str:
    out = [f"# twodsig-field d={X.d} n1={X.n1} n2={X.n2} T1={X.T1!r} T2={X.T2!r}"]
    v = X.values
    for i in range(X.n1 + 1):
        for j in range(X.n2 + 1):
            out.append(f"{i},{j}," + ",".join(repr(float(x)) for x in v[i, j]))
    return "\n".join(out) + "\n"


def save_field(X: GridField, path: str, fmt: str | None = None) -> None:
    """Write a field as CSV (exact), PGM (P2, 8-bit, d=1) or PNG (d=1 or 3)."""
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(field_to_csv(X))
        return
    img = np.clip(X.values, 0.0, 1.0).transpose(1, 0, 2)[::-1, :, :]
    img8 = np.rint(img * 255).astype(np.uint8)
    if fmt == "pgm":
        if X.d != 1:
            raise InputError("pgm output needs a single channel")
        h, w = img8.shape[:2]
        rows = [" ".join(str(int(x)) for x in row) for row in img8[:, :, 0]]
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"P2\n{w} {h}\n255\n" + "\n".join(rows) + "\n")
        return
    from PIL import Image

    if X.d == 1:
        Image.fromarray(img8[:, :, 0], mode="L").save(path)
    elif X.d == 3:
        Image.fromarray(img8, mode="RGB").save(path)
    else:
        raise InputError("png output needs 1 or 3 channels")


def as_field_factory(field) -> Callable[[int], GridField]:
    """Wrap a GridField or a callable ``N -> GridField`` as a callable."""
    if isinstance(field, GridField):
        fixed = field

        def factory(N: int) -> GridField:
            return fixed

        factory.fixed = fixed  # type: ignore[attr-defined]
        return factory
    if callable(field):
        return field
    raise InputError("expected a GridField or a callable N -> GridField")


def is_square(X: GridField) -> bool:
    return X.n1 == X.n2 and X.T1 == X.T2


def check_same_shape(X: GridField, Y: GridField) -> None:
    if X.values.shape != Y.values.shape:
        raise InputError(f"field shapes differ: {X.values.shape} vs {Y.values.shape}")

