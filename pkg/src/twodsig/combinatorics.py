"""Words, permutations, shuffle sets and the extended-word shuffle algebra.

Conventions (all 1-based, one-line notation):

* a permutation ``nu`` is a tuple ``(nu(1), ..., nu(n))``;
* ``compose(nu, mu)`` is ``nu o mu``, i.e. ``i -> nu(mu(i))``;
* ``apply(w, nu)`` is ``w_nu = (w[nu(1)], ..., w[nu(n)])``;
* an extended word ``(w, nu)`` pairs letter ``w_k`` (axis-1 rank ``k``) with
  axis-2 rank ``nu(k)``.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import InputError

Word = tuple
Permutation = tuple


# ---------------------------------------------------------------------------
# permutations


def identity(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(1, len(p) + 1))


def check_permutation(p: Sequence[int]) -> Permutation:
    p = tuple(int(v) for v in p)
    if not is_permutation(p):
        raise InputError(f"not a permutation of 1..{len(p)}: {p}")
    return p


def inverse(nu: Permutation) -> Permutation:
    out = [0] * len(nu)
    for i, v in enumerate(nu):
        out[v - 1] = i + 1
    return tuple(out)


def compose(nu: Permutation, mu: Permutation) -> Permutation:
    """Return ``nu o mu``."""
    if len(nu) != len(mu):
        raise InputError("cannot compose permutations of different sizes")
    return tuple(nu[m - 1] for m in mu)


def reversal(n: int) -> Permutation:
    """The reversal permutation i -> n - i + 1."""
    return tuple(range(n, 0, -1))


def apply(w: Sequence[int], nu: Permutation) -> Word:
    """Return ``w_nu = (w[nu(1)], ..., w[nu(n)])``."""
    if len(w) != len(nu):
        raise InputError(f"word of length {len(w)} and permutation of size {len(nu)}")
    return tuple(w[k - 1] for k in nu)


def star_product(sigma: Permutation, tau: Permutation) -> Permutation:
    n = len(sigma)
    return tuple(sigma) + tuple(t + n for t in tau)


def all_permutations(n: int) -> list[Permutation]:
    """All permutations of 1..n in lexicographic order."""
    return list(itertools.permutations(range(1, n + 1)))


# ---------------------------------------------------------------------------
# shuffle sets


def shuffle_set(n: int, k: int) -> list[Permutation]:
    """Permutations of 1..n+k increasing on 1..n and on n+1..n+k.

    Returned as a lexicographically sorted list (no duplicates).
    """
    if n < 0 or k < 0:
        raise InputError("shuffle_set needs n, k >= 0")
    total = n + k
    out = []
    for head in itertools.combinations(range(1, total + 1), n):
        chosen = set(head)
        tail = tuple(v for v in range(1, total + 1) if v not in chosen)
        out.append(tuple(head) + tail)
    return sorted(out)


def sh_of_perms(nu: Permutation, nu2: Permutation) -> list[Permutation]:
    """The set ``{(nu * nu2) o rho^{-1} : rho in Sh(n, k)}``, sorted."""
    base = star_product(nu, nu2)
    return sorted({compose(base, inverse(rho)) for rho in shuffle_set(len(nu), len(nu2))})


def rank_shuffles(nu: Permutation, nu2: Permutation) -> list[Permutation]:
    """The set ``{rho o (nu * nu2) : rho in Sh(n, k)}``, sorted.

    These are the axis-2 interleavings of two point configurations whose
    internal axis-2 orders are ``nu`` and ``nu2``. It is also the set of
    inverses of ``sh_of_perms(inverse(nu), inverse(nu2))``.
    """
    base = star_product(nu, nu2)
    return sorted({compose(rho, base) for rho in shuffle_set(len(nu), len(nu2))})


# ---------------------------------------------------------------------------
# linear combinations


class LinearCombination:
    """Finite formal sum with integer coefficients, normalized eagerly."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[int, object]] | dict | None = None):
        acc: dict = defaultdict(int)
        if isinstance(terms, dict):
            terms = ((c, e) for e, c in terms.items())
        for coeff, elem in terms or ():
            acc[elem] += int(coeff)
        self._terms = {e: c for e, c in acc.items() if c != 0}

    @classmethod
    def single(cls, elem, coeff: int = 1) -> "LinearCombination":
        return cls([(coeff, elem)])

    def items(self):
        """(element, coefficient) pairs in sorted element order."""
        return sorted(self._terms.items())

    def coefficient(self, elem) -> int:
        return self._terms.get(elem, 0)

    def mass(self) -> int:
        return sum(self._terms.values())

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator:
        return iter(e for e, _ in self.items())

    def __eq__(self, other):
        if not isinstance(other, LinearCombination):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "LinearCombination") -> "LinearCombination":
        return LinearCombination(
            [(c, e) for e, c in self._terms.items()] + [(c, e) for e, c in other._terms.items()]
        )

    def __rmul__(self, scalar: int) -> "LinearCombination":
        return LinearCombination([(scalar * c, e) for e, c in self._terms.items()])

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{e!r}" for e, c in self.items())


# ---------------------------------------------------------------------------
# words and extended words


def check_word(w: Sequence[int], d: int | None = None) -> Word:
    w = tuple(int(v) for v in w)
    if d is not None:
        bad = [v for v in w if v < 1 or v > d]
        if bad:
            raise InputError(f"letter(s) {bad} outside 1..{d}")
    elif any(v < 1 for v in w):
        raise InputError(f"letters must be positive: {w}")
    return w


def words(d: int, n: int) -> list[Word]:
    """All words of length n over 1..d in lexicographic order."""
    return list(itertools.product(range(1, d + 1), repeat=n))


def words_up_to(d: int, level: int) -> list[Word]:
    """Graded lexicographic list of words of length 0..level."""
    out: list[Word] = []
    for n in range(level + 1):
        out.extend(words(d, n))
    return out


def word_key(w: Sequence[int]) -> str:
    return "w=" + ",".join(str(v) for v in w)


def parse_word_key(key: str) -> Word:
    key = key.strip()
    if not key.startswith("w="):
        raise InputError(f"bad word key {key!r}")
    body = key[2:]
    if not body:
        return ()
    try:
        return check_word(int(v) for v in body.split(","))
    except ValueError as exc:
        raise InputError(f"bad word key {key!r}") from exc


class ExtendedWord(NamedTuple):
    """A word paired with a permutation of its positions."""

    word: Word
    perm: Permutation

    @classmethod
    def make(cls, word: Sequence[int], perm: Sequence[int] | None = None) -> "ExtendedWord":
        w = check_word(word)
        p = identity(len(w)) if perm is None else check_permutation(perm)
        if len(p) != len(w):
            raise InputError(f"permutation size {len(p)} differs from word length {len(w)}")
        return cls(w, p)

    def __len__(self):  # type: ignore[override]
        return len(self.word)

    @property
    def n(self) -> int:
        return len(self.word)

    def key(self) -> str:
        return word_key(self.word) + ";v=" + ",".join(str(v) for v in self.perm)

    @classmethod
    def parse(cls, text: str) -> "ExtendedWord":
        text = text.strip()
        parts = text.split(";")
        if len(parts) != 2 or not parts[1].startswith("v="):
            raise InputError(f"bad extended word {text!r}; expected w=..;v=..")
        w = parse_word_key(parts[0])
        body = parts[1][2:]
        try:
            p = tuple(int(v) for v in body.split(",")) if body else ()
        except ValueError as exc:
            raise InputError(f"bad extended word {text!r}") from exc
        return cls.make(w, p)

    def __str__(self):
        return self.key()


def extended_words(d: int, n: int) -> list[ExtendedWord]:
    """All extended words of length n, word-lex then permutation-lex."""
    perms = all_permutations(n)
    return [ExtendedWord(w, p) for w in words(d, n) for p in perms]


def extended_words_up_to(d: int, level: int) -> list[ExtendedWord]:
    out: list[ExtendedWord] = []
    for n in range(level + 1):
        out.extend(extended_words(d, n))
    return out


# ---------------------------------------------------------------------------
# shuffle products


def word_shuffle(w: Sequence[int], w2: Sequence[int]) -> LinearCombination:
    """Classical shuffle product, by the recursive last-letter rule."""
    return LinearCombination([(c, u) for u, c in _shuffle_counts(tuple(w), tuple(w2)).items()])


def _shuffle_counts(u: Word, v: Word) -> dict:
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out: dict = defaultdict(int)
    for x, c in _shuffle_counts(u[:-1], v).items():
        out[x + (u[-1],)] += c
    for x, c in _shuffle_counts(u, v[:-1]).items():
        out[x + (v[-1],)] += c
    return out


def shuffle_power(w: Sequence[int], m: int) -> LinearCombination:
    """``w`` shuffled with itself m times (m = 0 gives the empty word)."""
    acc = LinearCombination.single(())
    for _ in range(m):
        acc = shuffle_product(acc, LinearCombination.single(tuple(w)))
    return acc


def shuffle_product(a: LinearCombination, b: LinearCombination) -> LinearCombination:
    terms = []
    for u, cu in a.items():
        for v, cv in b.items():
            for x, cx in word_shuffle(u, v).items():
                terms.append((cu * cv * cx, x))
    return LinearCombination(terms)


def extended_shuffle_terms(a: ExtendedWord, b: ExtendedWord) -> list[ExtendedWord]:
    """All C(n+k, n)^2 terms of the product, with multiplicity.

    For each interleaving tau of the axis-1 positions the word is ``[ww']_tau``;
    for each interleaving lam of the axis-2 ranks the new permutation is
    ``lam o tau``.
    """
    a = ExtendedWord.make(*a)
    b = ExtendedWord.make(*b)
    n, k = a.n, b.n
    ww = a.word + b.word
    taus = [inverse(rho) for rho in shuffle_set(n, k)]
    lams = rank_shuffles(a.perm, b.perm)
    out = []
    for tau in taus:
        word = apply(ww, tau)
        for lam in lams:
            out.append(ExtendedWord(word, compose(lam, tau)))
    return out


def extended_shuffle(a: ExtendedWord, b: ExtendedWord) -> LinearCombination:
    return LinearCombination([(1, t) for t in extended_shuffle_terms(a, b)])


def extended_shuffle_lc(a: LinearCombination, b: LinearCombination) -> LinearCombination:
    """Bilinear extension of extended_shuffle to linear combinations."""
    terms = []
    for x, cx in a.items():
        for y, cy in b.items():
            for t, ct in extended_shuffle(x, y).items():
                terms.append((cx * cy * ct, t))
    return LinearCombination(terms)


def product_expansion(w: Sequence[int]) -> LinearCombination:
    """Expansion of a product of single-letter increments.

    ``prod_k box X^{w_k} = sum over nu, nu' of <S, (w_nu, nu')>``.
    """
    w = check_word(w)
    n = len(w)
    terms = []
    for nu in all_permutations(n):
        for nu2 in all_permutations(n):
            terms.append((1, ExtendedWord(apply(w, nu), nu2)))
    return LinearCombination(terms)


# ---------------------------------------------------------------------------
# matrix rendering


def render_matrix(a: ExtendedWord) -> str:
    """Render (w, nu) as an n x n grid, letter w_i at column i, row nu(i).

    Row 1 is the bottom printed row. Empty slots print as ``0``.
    """
    a = ExtendedWord.make(*a)
    n = a.n
    if n == 0:
        raise InputError("render_matrix needs a non-empty word")
    grid = [["0"] * n for _ in range(n)]
    for i in range(n):
        grid[a.perm[i] - 1][i] = str(a.word[i])
    width = max(len(s) for row in grid for s in row)
    lines = [" ".join(s.rjust(width) for s in grid[r]) for r in range(n - 1, -1, -1)]
    return "\n".join(lines)


def parse_matrix(text: str) -> ExtendedWord:
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise InputError("matrix must be square and non-empty")
    word = [0] * n
    perm = [0] * n
    for printed, row in enumerate(rows):
        r = n - printed
        for c, s in enumerate(row):
            if s == "0":
                continue
            if perm[c]:
                raise InputError(f"column {c + 1} has more than one letter")
            word[c] = int(s)
            perm[c] = r
    if not all(perm):
        raise InputError("every column needs exactly one letter")
    return ExtendedWord.make(word, perm)


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)
