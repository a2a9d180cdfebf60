import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twodsig import combinatorics as cb
from twodsig.combinatorics import ExtendedWord, LinearCombination
from twodsig.errors import InputError


@st.composite
def extended_words(draw, max_n=5, max_letter=3):
    n = draw(st.integers(1, max_n))
    word = tuple(draw(st.lists(st.integers(1, max_letter), min_size=n, max_size=n)))
    perm = tuple(draw(st.permutations(range(1, n + 1))))
    return ExtendedWord(word, perm)


class TestPermutations:
    def test_inverse(self):
        assert cb.inverse((2, 3, 1)) == (3, 1, 2)

    def test_apply(self):
        assert cb.apply((1, 2, 3), (1, 3, 2)) == (1, 3, 2)
        assert cb.apply((5, 6, 7), (2, 3, 1)) == (6, 7, 5)

    def test_reversal_is_involution(self):
        r = cb.reversal(3)
        assert r == (3, 2, 1)
        assert cb.compose(r, r) == cb.identity(3)

    def test_compose_order(self):
        # (nu o mu)(i) = nu(mu(i))
        nu, mu = (2, 3, 1), (1, 3, 2)
        assert cb.compose(nu, mu) == tuple(nu[mu[i] - 1] for i in range(3))

    def test_star_product(self):
        assert cb.star_product((1, 2), (1,)) == (1, 2, 3)
        assert cb.star_product((2, 1), (1,)) == (2, 1, 3)
        assert cb.star_product((1,), (2, 1)) == (1, 3, 2)

    def test_invalid(self):
        with pytest.raises(InputError):
            cb.check_permutation((1, 1))
        with pytest.raises(InputError):
            cb.apply((1, 2), (1, 2, 3))

    @pytest.mark.parametrize("n", range(1, 6))
    def test_rotation_algebra(self, n):
        rho = cb.reversal(n)
        inv = cb.inverse
        for nu in cb.all_permutations(n):
            lhs = cb.compose(inv(cb.compose(inv(nu), rho)), rho)
            assert lhs == cb.compose(cb.compose(inv(rho), nu), rho)
            mid = cb.compose(cb.compose(inv(rho), nu), rho)
            assert cb.compose(inv(mid), rho) == cb.compose(inv(rho), inv(nu))


class TestShuffleSets:
    def test_small_cases(self):
        assert cb.shuffle_set(1, 1) == [(1, 2), (2, 1)]
        assert len(cb.shuffle_set(2, 1)) == 3
        assert cb.shuffle_set(0, 3) == [(1, 2, 3)]

    def test_cardinality_exhaustive(self):
        for n in range(9):
            for k in range(9 - n):
                s = cb.shuffle_set(n, k)
                assert len(s) == math.comb(n + k, n)
                assert len(set(s)) == len(s)

    def test_defining_property(self):
        for n, k in ((2, 2), (3, 1), (1, 3)):
            expect = [p for p in itertools.permutations(range(1, n + k + 1))
                      if all(p[i] < p[i + 1] for i in range(n - 1))
                      and all(p[i] < p[i + 1] for i in range(n, n + k - 1))]
            assert cb.shuffle_set(n, k) == sorted(expect)

    def test_sh_of_perms(self):
        assert cb.sh_of_perms((1,), (1,)) == [(1, 2), (2, 1)]
        assert len(cb.sh_of_perms((2, 1), (1, 2))) == 6
        assert cb.sh_of_perms((1, 2), ()) == [(1, 2)]

    def test_rank_shuffles_is_inverted_set(self):
        for nu in cb.all_permutations(2):
            for nu2 in cb.all_permutations(2):
                inv = sorted(cb.inverse(s) for s in cb.sh_of_perms(cb.inverse(nu), cb.inverse(nu2)))
                assert cb.rank_shuffles(nu, nu2) == inv

    def test_inversion_invariant_counterexample(self):
        # Sh(nu, nu') and the inverses of Sh(nu^-1, nu'^-1) differ in general
        direct = cb.sh_of_perms((2, 1), (1,))
        inverted = sorted(cb.inverse(s) for s in cb.sh_of_perms((2, 1), (1,)))
        assert direct == [(2, 1, 3), (2, 3, 1), (3, 2, 1)]
        assert inverted == [(2, 1, 3), (3, 1, 2), (3, 2, 1)]


class TestLinearCombination:
    def test_normalization(self):
        lc = LinearCombination([(1, (1,)), (2, (1,)), (0, (2,)), (3, (2,)), (-3, (2,))])
        assert lc.items() == [((1,), 3)]

    def test_equality_and_arithmetic(self):
        a = LinearCombination.single((1, 2))
        b = LinearCombination.single((2, 1))
        assert a + b == b + a
        assert 2 * a == a + a
        assert (a + b).mass() == 2
        assert (a + b).coefficient((2, 1)) == 1
        assert hash(a + b) == hash(b + a)


class TestWordShuffle:
    def test_examples(self):
        assert cb.word_shuffle((1,), (2,)) == LinearCombination([(1, (1, 2)), (1, (2, 1))])
        assert cb.word_shuffle((), (1, 2)) == LinearCombination.single((1, 2))
        assert cb.word_shuffle((1,), (1,)) == LinearCombination.single((1, 1), 2)

    def test_mass_exhaustive(self):
        for n in range(4):
            for k in range(4):
                for u in cb.words(2, n):
                    for v in cb.words(2, k):
                        assert cb.word_shuffle(u, v).mass() == math.comb(n + k, n)

    def test_permutation_form(self):
        # sum over rho in Sh(n,k) of [ww']_{rho^-1}
        for u, v in (((1, 2), (3,)), ((1,), (2, 3)), ((1, 2), (3, 4))):
            terms = [(1, cb.apply(u + v, cb.inverse(r))) for r in cb.shuffle_set(len(u), len(v))]
            assert cb.word_shuffle(u, v) == LinearCombination(terms)

    def test_shuffle_power(self):
        assert cb.shuffle_power((1,), 3) == LinearCombination.single((1, 1, 1), 6)
        assert cb.shuffle_power((1, 2), 0) == LinearCombination.single(())


class TestExtendedShuffle:
    def test_square_of_single_letter(self):
        a = ExtendedWord((1,), (1,))
        assert cb.extended_shuffle(a, a) == LinearCombination(
            [(2, ExtendedWord((1, 1), (1, 2))), (2, ExtendedWord((1, 1), (2, 1)))])

    def test_unit(self):
        e = ExtendedWord((), ())
        b = ExtendedWord((1, 2), (2, 1))
        assert cb.extended_shuffle(e, b) == LinearCombination.single(b)
        assert cb.extended_shuffle(b, e) == LinearCombination.single(b)

    def test_term_count(self):
        a = ExtendedWord((1,), (1,))
        b = ExtendedWord((2, 1), (2, 1))
        assert len(cb.extended_shuffle_terms(a, b)) == 9
        assert cb.extended_shuffle(a, b).mass() == 9

    def test_commutative_and_associative(self):
        ews = [e for e in cb.extended_words_up_to(2, 2) if e.n >= 1]
        for a in ews:
            for b in ews:
                if a.n + b.n <= 4:
                    assert cb.extended_shuffle(a, b) == cb.extended_shuffle(b, a)
        small = [e for e in cb.extended_words_up_to(2, 2) if 1 <= e.n]
        for a, b, c in itertools.product(small, repeat=3):
            if a.n + b.n + c.n > 4:
                continue
            A, B, C = (LinearCombination.single(x) for x in (a, b, c))
            left = cb.extended_shuffle_lc(cb.extended_shuffle_lc(A, B), C)
            right = cb.extended_shuffle_lc(A, cb.extended_shuffle_lc(B, C))
            assert left == right

    @given(extended_words(max_n=2), extended_words(max_n=2))
    @settings(max_examples=40, deadline=None)
    def test_commutative_property(self, a, b):
        assert cb.extended_shuffle(a, b) == cb.extended_shuffle(b, a)

    def test_sum_over_perms_matches_word_shuffle(self):
        # summing over all permutations forgets axis-2 order on both sides
        u, v = (1, 2), (2,)
        lhs = LinearCombination([])
        for nu in cb.all_permutations(2):
            for nu2 in cb.all_permutations(1):
                lhs = lhs + cb.extended_shuffle(ExtendedWord(u, nu), ExtendedWord(v, nu2))
        rhs = LinearCombination([(c, ExtendedWord(w, p))
                                 for w, c in cb.word_shuffle(u, v).items()
                                 for p in cb.all_permutations(3)])
        assert lhs == rhs

    def test_product_expansion(self):
        lc = cb.product_expansion((1, 2))
        assert lc.mass() == 4
        assert lc.coefficient(ExtendedWord((2, 1), (2, 1))) == 1


class TestSerialization:
    def test_keys(self):
        assert ExtendedWord((1, 2), (2, 1)).key() == "w=1,2;v=2,1"
        assert ExtendedWord((), ()).key() == "w=;v="
        assert cb.word_key((10, 2)) == "w=10,2"
        assert ExtendedWord.parse("w=10,2;v=2,1") == ExtendedWord((10, 2), (2, 1))
        assert cb.parse_word_key("w=") == ()

    @pytest.mark.parametrize("bad", ["w=1,2", "w=1;v=2", "v=1;w=1", "w=a;v=1", "w=1,2;v=1,1"])
    def test_bad_keys(self, bad):
        with pytest.raises(InputError):
            ExtendedWord.parse(bad)

    def test_render_example(self):
        text = cb.render_matrix(ExtendedWord((4, 5, 6), (1, 3, 2)))
        assert text.splitlines() == ["0 5 0", "0 0 6", "4 0 0"]
        assert cb.render_matrix(ExtendedWord((1,), (1,))) == "1"

    @given(extended_words())
    def test_render_parse_roundtrip(self, a):
        assert cb.parse_matrix(cb.render_matrix(a)) == a

    @given(extended_words(max_letter=12))
    def test_key_roundtrip(self, a):
        assert ExtendedWord.parse(a.key()) == a

    def test_enumeration_order(self):
        ews = cb.extended_words_up_to(1, 2)
        assert [e.key() for e in ews] == ["w=;v=", "w=1;v=1", "w=1,1;v=1,2", "w=1,1;v=2,1"]
        assert len(cb.extended_words_up_to(2, 3)) == 1 + 2 + 8 + 48
        assert len(cb.words_up_to(2, 3)) == 15
