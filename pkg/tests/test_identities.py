import numpy as np
import pytest

from twodsig import combinatorics as cb
from twodsig import identities as ids
from twodsig.combinatorics import ExtendedWord
from twodsig.errors import InputError, UnsupportedError
from twodsig.field import Box, GridField, Path1D, TrigPoly, monomial, trig_poly
from twodsig.signature import full_signature


class TestBattery:
    def test_default_battery_passes(self):
        reports = ids.default_battery(seed=3)
        assert reports and all(r.passed for r in reports), [r.line() for r in reports if not r.passed]
        assert {r.name.split()[0] for r in reports} >= {"shuffle_full", "chen_id", "rotation", "remainder"}

    @pytest.mark.parametrize("group", ["rotation", "translation", "continuity", "remainder"])
    def test_exact_groups_selectable(self, group):
        reports = ids.default_battery(only=group)
        assert reports and all(r.passed for r in reports)
        assert all(r.grid_sizes == [12] for r in reports)

    def test_refinements_honored(self):
        reports = ids.default_battery(only="product", refinements=[16, 32, 64])
        assert reports[0].grid_sizes == [16, 32, 64]

    def test_unknown_group(self):
        with pytest.raises(InputError):
            ids.default_battery(only="nonsense")

    def test_rotation_needs_square(self):
        X = GridField(np.random.default_rng(0).normal(size=(9, 7, 2)))
        with pytest.raises(InputError):
            ids.default_battery(only="rotation", field=X)
        with pytest.raises(InputError):
            ids.check_rotation(X, ((1,), (1,)))


class TestCachedField:
    def test_memo_reuses_values(self):
        cf = ids.CachedField(TrigPoly(0, 2, 2).sample)
        X = cf(8)
        assert cf(8) is X
        c = ExtendedWord((1, 2), (2, 1))
        v = ids._full(X, [c], None)[0]
        assert v == full_signature(X, [c])[c]
        assert len(ids._MEMOS[id(X)]) == 1
        ids._full(X, [c, c], None)
        assert len(ids._MEMOS[id(X)]) == 1
        cf.clear()
        assert id(X) not in ids._MEMOS

    def test_shuffle_with_cache(self):
        cf = ids.CachedField(TrigPoly(0, 2, 2).sample)
        r = ids.check_shuffle_full(cf, ((1, 2), (2, 1)), ((2,), (1,)))
        assert r.passed, r.errors
        cf.clear()


class TestShuffle:
    def test_full(self):
        r = ids.check_shuffle_full(TrigPoly(0, 2, 1).sample, ((1,), (1,)), ((1, 1), (2, 1)))
        assert r.passed, r.errors

    def test_sym(self):
        r = ids.check_shuffle_sym(TrigPoly(0, 2, 2).sample, (1,), (2, 1))
        assert r.passed, r.errors

    def test_sub_box(self):
        r = ids.check_shuffle_full(TrigPoly(0, 2, 2).sample, ((1,), (1,)), ((2,), (1,)),
                                   rect=Box(0.25, 0.0, 1.0, 0.75))
        assert r.passed, r.errors


class TestChen:
    def test_axis_one_exact_on_grid(self):
        X = trig_poly(2, 2, 2, 16)
        lhs, rhs = ids.chen_id_sides(X, (1, 2, 1), 1, 6)
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_axis_two_exact_on_grid(self):
        X = trig_poly(2, 2, 2, 16)
        lhs, rhs = ids.chen_id_sides(X, (2, 1, 2), 2, 0.25)
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_sym(self):
        r = ids.check_chen_sym(TrigPoly(0, 2, 2).sample, (1, 2, 2), 0.5)
        assert r.passed, r.errors

    def test_split_off_grid(self):
        with pytest.raises(InputError):
            ids.chen_id_sides(trig_poly(0, 2, 1, 10), (1, 1), 1, 0.33)
        with pytest.raises(InputError):
            ids.check_chen_id(trig_poly(0, 2, 1, 10), (1,), 1, 0.5)


class TestRotation:
    def test_single_letter(self):
        assert ids.rotated_coordinate(((1,), (1,)), 1) == (-1, ExtendedWord((1,), (1,)))
        assert ids.rotated_coordinate(((1,), (1,)), 2) == (1, ExtendedWord((1,), (1,)))

    def test_full_turn_is_identity(self):
        c = ExtendedWord((1, 2, 3), (3, 1, 2))
        for q in (0, 4):
            assert ids.rotated_coordinate(c, q) == (1, c)

    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_checks(self, q):
        X = trig_poly(1, 3, 3, 8)
        for c in cb.extended_words_up_to(3, 2)[1:]:
            assert ids.check_rotation(X, c, q).passed

    def test_composition(self):
        # applying q=1 twice equals q=2 up to sign bookkeeping
        for n in (1, 2, 3):
            for nu in cb.all_permutations(n):
                c = ExtendedWord(tuple(range(1, n + 1)), nu)
                s1, c1 = ids.rotated_coordinate(c, 1)
                s2, c2 = ids.rotated_coordinate(c1, 1)
                assert (s1 * s2, c2) == ids.rotated_coordinate(c, 2)


class TestTranslationAndStretch:
    def test_translation(self):
        rng = np.random.default_rng(1)
        X = trig_poly(1, 2, 2, 10)
        r = ids.check_translation(X, Path1D(rng.normal(size=(11, 2))), None, [0.5, -1.0],
                                  cb.extended_words_up_to(2, 3))
        assert r.passed

    def test_stretch(self):
        r = ids.check_stretch(TrigPoly(0, 2, 1).sample, lambda t: t ** 2, lambda t: np.sin(np.pi * t / 2),
                              [((1,), (1,)), ((1, 1), (1, 2))], refinements=[64, 128, 256])
        assert r.passed, r.errors


class TestContinuity:
    def test_c2_norm_of_product(self):
        X = monomial(1, 1, 16)
        assert ids.c2_norm(X.channel(1), X.h1, X.h2) == pytest.approx(1.0)

    def test_bound_holds(self):
        X = trig_poly(0, 2, 2, 12)
        Y = GridField(X.values + 1e-3 * trig_poly(5, 2, 2, 12).values)
        for c in cb.extended_words_up_to(2, 2)[1:]:
            assert ids.check_continuity_bound(X, Y, c).passed

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            ids.check_continuity_bound(trig_poly(0, 2, 1, 8), trig_poly(0, 2, 1, 9), ((1,), (1,)))


class TestProductAndRemainder:
    @pytest.mark.parametrize("w", [(1,), (1, 2), (2, 1, 1)])
    def test_product_formula(self, w):
        r = ids.check_product_formula(TrigPoly(0, 2, 2).sample, w)
        assert r.passed, r.errors

    def test_product_length_limit(self):
        with pytest.raises(UnsupportedError):
            ids.check_product_formula(TrigPoly(0, 2, 1).sample, (1, 1, 1, 1))

    @pytest.mark.parametrize("ij", [(1, 1), (1, 2), (2, 1)])
    def test_remainder_exact(self, ij):
        assert ids.check_remainder(trig_poly(4, 3, 2, 11), *ij).passed


class TestLRecursion:
    def test_kernel_unsupported(self):
        with pytest.raises(UnsupportedError):
            ids.l_kernel((1, 2, 3, 4))

    @pytest.mark.parametrize("perm", [(1, 2), (2, 1), (2, 3, 1), (1, 2, 3)])
    def test_exact_kernels(self, perm):
        X = trig_poly(3, 2, 2, 10)
        w = (1, 2, 1)[:len(perm)]
        c = ExtendedWord(w, perm)
        assert ids.l_recursion_rhs(X, w, perm) == pytest.approx(full_signature(X, [c])[c], abs=1e-13)

    def test_backends_agree(self):
        X = trig_poly(3, 2, 2, 6)
        for perm in ((1, 3, 2), (3, 1, 2)):
            a = ids.l_recursion_rhs(X, (1, 2, 2), perm, backend="tables")
            b = ids.l_recursion_rhs(X, (1, 2, 2), perm, backend="brute")
            assert a == pytest.approx(b, abs=1e-13)

    def test_bad_backend(self):
        with pytest.raises(InputError):
            ids.l_recursion_rhs(trig_poly(0, 2, 1, 4), (1, 1), (1, 2), backend="gpu")


class TestChangeOfVariables:
    @pytest.mark.parametrize("f", ids.FUNCTIONS)
    def test_functions(self, f):
        r = ids.check_change_of_variables(TrigPoly(0, 2, 2).sample, f)
        assert r.passed, r.errors

    def test_linear_is_exact(self):
        lhs, rhs = ids.change_of_variables_sides(trig_poly(0, 2, 3, 9), "linear")
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_unknown(self):
        with pytest.raises(InputError):
            ids.check_change_of_variables(TrigPoly(0, 2, 1).sample, "sinh")


class TestUniversality:
    def test_expansion_mass(self):
        # shuffle of m copies of letter 1 and n of letter 2 has (m+n)!^2 / ... terms
        assert ids.moment_expansion(0, 0) == cb.LinearCombination.single(ExtendedWord((3,), (1,)))
        lc = ids.moment_expansion(1, 1)
        assert all(e.word[-1] == 3 and e.perm[-1] == e.n for e, _ in lc.items())

    def test_scalar_only(self):
        with pytest.raises(InputError):
            ids.universality_sides(trig_poly(0, 2, 2, 8), 1, 0)
        with pytest.raises(UnsupportedError):
            ids.check_universality_moments(TrigPoly(0, 2, 1).sample, 2, 2)
