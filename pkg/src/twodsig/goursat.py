"""Linear Goursat problems and 1D linear ODEs driven by fields and paths.

The 2D problem is ``Y_t = v + sum_i int_[s,t] A^i Y_r d^i X_r`` on a grid
rectangle, with ``Y = v`` on its lower and left edges. Its solution expands as
``sum_w A^{o w} v <S^id, w>`` with ``A^{o w} = A^{w_n} ... A^{w_1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import combinatorics as cb
from .errors import InputError
from .field import GridField, GridRect, Path1D, mixed_density, multiplicative, resolve_rect
from .report import CheckReport, exact_report, refinement_report
from .signature import id_node_table, path_signature_1d


def _check_matrices(matrices, e: int | None = None) -> np.ndarray:
    A = np.asarray(matrices, dtype=float)
    if A.ndim == 2:
        A = A[None]
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise InputError(f"matrices need shape (d, e, e); got {A.shape}")
    if e is not None and A.shape[1] != e:
        raise InputError(f"matrices are {A.shape[1]}x{A.shape[1]} but the initial value has {e} entries")
    if not np.all(np.isfinite(A)):
        raise InputError("matrices must be finite")
    return A


def word_matrix(matrices, w) -> np.ndarray:
    """``A^{o w} = A^{w_n} ... A^{w_1}`` (the first letter acts first)."""
    A = _check_matrices(matrices)
    out = np.eye(A.shape[1])
    for letter in w:
        out = A[letter - 1] @ out
    return out


@dataclass(frozen=True)
class GoursatProblem:
    matrices: np.ndarray
    initial: np.ndarray
    driver: GridField
    rect: GridRect | None = None

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.initial, dtype=float))
        A = _check_matrices(self.matrices, v.shape[0])
        if A.shape[0] != self.driver.d:
            raise InputError(f"{A.shape[0]} matrices for a {self.driver.d}-channel driver")
        object.__setattr__(self, "matrices", A)
        object.__setattr__(self, "initial", v)
        object.__setattr__(self, "rect", resolve_rect(self.driver, self.rect))

    @property
    def e(self) -> int:
        return self.initial.shape[0]


@dataclass(frozen=True)
class GoursatSolution:
    """Solution on the nodes of the problem rectangle, shape (m1+1, m2+1, e)."""

    values: np.ndarray
    rect: GridRect
    scheme: str

    def at_end(self) -> np.ndarray:
        return self.values[-1, -1]


def solve_goursat_2d(p: GoursatProblem, scheme: str = "explicit") -> GoursatSolution:
    """March the Goursat problem cell by cell.

    ``explicit``: Y11 = Y10 + Y01 - Y00 + sum_k A^k Y00 D^k, first order; this
    is the strict id-signature recursion itself.
    ``trapezoidal``: the cell increment uses the average of the four corners,
    solved for Y11 per cell; second order.
    """
    r = p.rect
    D = mixed_density(p.driver).restrict(r)
    m1, m2 = r.m1, r.m2
    e = p.e
    A = p.matrices
    Y = np.empty((m1 + 1, m2 + 1, e))
    Y[0, :, :] = p.initial
    Y[:, 0, :] = p.initial
    if scheme == "explicit":
        # M[i, j] = sum_k A^k D^k[i, j]
        M = np.einsum("ijk,kab->ijab", D, A)
        for i in range(m1):
            step = np.einsum("jab,jb->ja", M[i], Y[i, :m2])
            # Y[i+1, j+1] - Y[i+1, j] = Y[i, j+1] - Y[i, j] + step[j]
            incr = (Y[i, 1:] - Y[i, :m2]) + step
            Y[i + 1, 1:] = Y[i + 1, 0] + np.cumsum(incr, axis=0)
    elif scheme == "trapezoidal":
        M = np.einsum("ijk,kab->ijab", D, A) / 4.0
        eye = np.eye(e)
        lhs = eye[None, None] - M
        if e == 1:
            inv = 1.0 / lhs[..., 0, 0]
        # anti-diagonal sweep: every cell on one diagonal depends only on earlier ones
        for s in range(m1 + m2 - 1):
            i = np.arange(max(0, s - m2 + 1), min(m1, s + 1))
            j = s - i
            y00, y10, y01 = Y[i, j], Y[i + 1, j], Y[i, j + 1]
            rhs = y10 + y01 - y00 + np.einsum("nab,nb->na", M[i, j], y00 + y10 + y01)
            if e == 1:
                Y[i + 1, j + 1] = rhs * inv[i, j][:, None]
            else:
                Y[i + 1, j + 1] = np.linalg.solve(lhs[i, j], rhs[..., None])[..., 0]
    else:
        raise InputError(f"unknown scheme {scheme!r}; use explicit or trapezoidal")
    return GoursatSolution(Y, r, scheme)


def expansion_goursat(p: GoursatProblem, level: int) -> np.ndarray:
    """``v + sum_{1<=|w|<=level} A^{o w} v <S^id_{s,node}, w>`` on every rectangle node."""
    if level < 0:
        raise InputError("level must be >= 0")
    r = p.rect
    cells = mixed_density(p.driver).restrict(r)
    out = np.broadcast_to(p.initial, (r.m1 + 1, r.m2 + 1, p.e)).copy()
    for n in range(1, level + 1):
        for w in cb.words(p.driver.d, n):
            T = id_node_table(cells, w)
            out += T[:, :, None] * (word_matrix(p.matrices, w) @ p.initial)[None, None, :]
    return out


def level_sums_goursat(p: GoursatProblem, level: int) -> list[np.ndarray]:
    """Per-level contributions computed by Picard iteration.

    Level n satisfies Z_n[p, q] = sum_{i<p, j<q} sum_k A^k Z_{n-1}[i, j] D^k[i, j];
    an independent route to the same level sums as :func:`expansion_goursat`.
    """
    r = p.rect
    D = mixed_density(p.driver).restrict(r)
    Z = np.broadcast_to(p.initial, (r.m1 + 1, r.m2 + 1, p.e)).copy()
    out = [Z.copy()]
    for _ in range(level):
        P = np.einsum("ijk,kab,ijb->ija", D, p.matrices, Z[:-1, :-1])
        Z = np.zeros_like(Z)
        Z[1:, 1:] = P.cumsum(0).cumsum(1)
        out.append(Z.copy())
    return out


# ---------------------------------------------------------------------------
# 1D linear ODE


def solve_linear_ode_1d(matrices, v, x: Path1D, method: str = "expm") -> np.ndarray:
    """Solve ``dy = sum_i A^i y dx^i`` along a sampled path; returns shape (m+1, e).

    ``euler`` uses explicit steps. ``expm`` is exact for the piecewise-linear
    interpolant: each segment multiplies by ``exp(sum_i A^i dx^i)``.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    A = _check_matrices(matrices, v.shape[0])
    if A.shape[0] != x.d:
        raise InputError(f"{A.shape[0]} matrices for a {x.d}-dimensional path")
    inc = x.increments()
    y = np.empty((x.m + 1, v.shape[0]))
    y[0] = v
    for k in range(x.m):
        G = np.einsum("i,iab->ab", inc[k], A)
        if method == "euler":
            y[k + 1] = y[k] + G @ y[k]
        elif method == "expm":
            y[k + 1] = scipy.linalg.expm(G) @ y[k]
        else:
            raise InputError(f"unknown method {method!r}; use euler or expm")
    return y


def expansion_ode_1d(matrices, v, x: Path1D, level: int, method: str = "linear") -> np.ndarray:
    """``v + sum_{1<=|w|<=level} A^{o w} v <S(x), w>`` at the end of the path."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    A = _check_matrices(matrices, v.shape[0])
    out = v.copy()
    all_words = [w for n in range(1, level + 1) for w in cb.words(x.d, n)]
    if not all_words:
        return out
    sig = path_signature_1d(x, all_words, method)
    for w in all_words:
        out = out + sig[w] * (word_matrix(A, w) @ v)
    return out


# ---------------------------------------------------------------------------
# signature kernel


def goursat_kernel(x1: Path1D, x2: Path1D, scheme: str = "explicit") -> GridField:
    """Solve ``d12 u = u <dx1, dx2>`` with ``u = 1`` on both axes.

    ``<dx1_{t1}, dx2_{t2}>`` summed over channels is the mixed density of the
    channel-sum of the multiplicative field, so this reuses the 2D solver.
    """
    if x1.d != x2.d:
        raise InputError("kernel paths must have equal dimension")
    X = multiplicative(x1, x2)
    driver = GridField(X.values.sum(axis=2, keepdims=True), X.T1, X.T2)
    sol = solve_goursat_2d(GoursatProblem(np.ones((1, 1, 1)), [1.0], driver), scheme)
    return GridField(sol.values, X.T1, X.T2)


def kernel_series(x1: Path1D, x2: Path1D, level: int, method: str = "linear") -> float:
    """``1 + sum_{1<=|w|<=level} <S(x1), w><S(x2), w>`` at the terminal corner."""
    if x1.d != x2.d:
        raise InputError("kernel paths must have equal dimension")
    all_words = [w for n in range(1, level + 1) for w in cb.words(x1.d, n)]
    s1 = path_signature_1d(x1, all_words, method)
    s2 = path_signature_1d(x2, all_words, method)
    return 1.0 + sum(s1[w] * s2[w] for w in all_words)


def bessel_series(z: float, terms: int = 12) -> float:
    """``sum_{n<=terms} z^n / (n!)^2``."""
    return float(sum(z ** n / math.factorial(n) ** 2 for n in range(terms + 1)))


def compare_kernel(x1: Path1D, x2: Path1D, level: int = 5, tol: float = 1e-3,
                   scheme: str = "explicit") -> CheckReport:
    """Kernel PDE at the terminal corner against the truncated signature series."""
    u = goursat_kernel(x1, x2, scheme).values[-1, -1, 0]
    series = kernel_series(x1, x2, level)
    return exact_report(f"kernel PDE vs series L={level}", u, series, [x1.m, x2.m], tol=tol,
                        scheme=scheme)


def compare_goursat_expansion(p: GoursatProblem, level: int, scheme: str = "explicit") -> CheckReport:
    """Solver against the level-L signature expansion over the whole rectangle."""
    sol = solve_goursat_2d(p, scheme).values
    exp = expansion_goursat(p, level)
    err = float(np.max(np.abs(sol - exp)))
    scale = float(np.max(np.abs(sol)))
    return CheckReport(f"goursat expansion L={level}", sol[-1, -1], exp[-1, -1], err,
                       err / scale if scale else 0.0, math.nan, [p.rect.m1, p.rect.m2], None,
                       True, "report", [err], {"scheme": scheme})


def concatenation_problem(driver: GridField, level: int, rect=None) -> tuple[GoursatProblem, list]:
    """A Goursat problem whose components are the id-signature coordinates.

    State basis: all words of length <= level. ``A^k`` maps the basis vector
    of ``u`` to that of ``u k`` (dropped beyond the level); ``v`` is the
    empty-word vector.
    """
    basis = cb.words_up_to(driver.d, level)
    index = {w: i for i, w in enumerate(basis)}
    e = len(basis)
    A = np.zeros((driver.d, e, e))
    for w, i in index.items():
        if len(w) < level:
            for k in range(1, driver.d + 1):
                A[k - 1, index[w + (k,)], i] = 1.0
    v = np.zeros(e)
    v[index[()]] = 1.0
    return GoursatProblem(A, v, driver, rect), basis


def refinement_goursat(make_problem, sizes, exact_value) -> CheckReport:
    """Convergence of the terminal value of the explicit scheme to ``exact_value``."""
    return refinement_report(
        "goursat explicit scheme", sizes,
        lambda N: (solve_goursat_2d(make_problem(N)).at_end(), np.atleast_1d(exact_value)),
    )
