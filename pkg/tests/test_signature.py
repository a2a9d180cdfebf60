import json
import math

import numpy as np
import pytest

from twodsig import combinatorics as cb
from twodsig._elimination import chains, max_table_entries, plan_for, tuple_count
from twodsig.combinatorics import ExtendedWord
from twodsig.errors import InputError, ResourceLimitError
from twodsig.field import GridField, GridRect, Path1D, linear_path, monomial, trig_poly
from twodsig.report import refinement_report
from twodsig.signature import (
    SigQuery,
    SigTable,
    brute_force_signature,
    conv_product_1,
    conv_product_2,
    corner_table,
    full_signature,
    id_signature,
    increment_path,
    path_signature_1d,
    sym_signature,
    upper_corner_table,
)


class TestPathSignature:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_linear_path_simplex_volume(self, n):
        for m in (10, 40):
            x = linear_path([1.0], m)
            w = (1,) * n
            assert path_signature_1d(x, [w])[w] == pytest.approx(1 / math.factorial(n), abs=1e-12)
            assert abs(path_signature_1d(x, [w], method="strict")[w] - 1 / math.factorial(n)) <= 2 / m

    def test_empty_word(self):
        assert path_signature_1d(linear_path([1.0, 2.0], 4), [()])[()] == 1.0

    def test_shuffle_two_letters(self):
        t = np.linspace(0, 1, 201)
        x = Path1D(np.stack([np.sin(3 * t), t ** 2], axis=1))
        s = path_signature_1d(x, [(1,), (2,), (1, 2), (2, 1)])
        assert s[(1,)] * s[(2,)] == pytest.approx(s[(1, 2)] + s[(2, 1)], abs=1e-12)

    def test_strict_matches_double_sum(self):
        rng = np.random.default_rng(0)
        x = Path1D(np.cumsum(rng.normal(size=(9, 2)), axis=0))
        inc = x.increments()
        brute = sum(inc[a, 0] * inc[b, 1] for a in range(8) for b in range(a + 1, 8))
        assert path_signature_1d(x, [(1, 2)], method="strict")[(1, 2)] == pytest.approx(brute, abs=1e-12)

    def test_bad_letter(self):
        with pytest.raises(InputError):
            path_signature_1d(linear_path([1.0], 4), [(2,)])


class TestIdSignature:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_product_field(self, n):
        w = (1,) * n
        exact = 1 / math.factorial(n) ** 2
        r = refinement_report("t1 t2", [32, 64, 128], lambda N: (id_signature(monomial(1, 1, N), [w])[w], exact))
        if n == 1:
            assert r.abs_err < 1e-12
        else:
            assert r.passed, r.errors

    def test_constant_field(self):
        X = GridField(np.full((6, 5, 2), 3.0))
        t = id_signature(X, cb.words_up_to(2, 3))
        assert t[()] == 1.0
        assert all(t[w] == 0.0 for w in cb.words_up_to(2, 3)[1:])

    def test_matches_full_identity(self):
        X = trig_poly(2, 3, 2, 12)
        for w in cb.words_up_to(2, 3):
            c = ExtendedWord(w, cb.identity(len(w)))
            assert id_signature(X, [w])[w] == pytest.approx(full_signature(X, [c])[c], abs=1e-15)

    def test_sub_rectangle(self):
        X = trig_poly(3, 3, 2, 8)
        r = GridRect(1, 2, 7, 6)
        for w in cb.words(2, 2):
            c = ExtendedWord(w, (1, 2))
            assert id_signature(X, [w], r)[w] == pytest.approx(brute_force_signature(X, c, r), abs=1e-14)

    def test_level_cap(self):
        with pytest.raises(InputError):
            id_signature(monomial(1, 1, 4), [(1,) * 5], max_level=4)


class TestFullSignature:
    @pytest.mark.parametrize("nu", [(1, 2), (2, 1)])
    def test_product_field_quarter(self, nu):
        c = ExtendedWord((1, 1), nu)
        r = refinement_report("t1 t2", [32, 64, 128],
                              lambda N: (full_signature(monomial(1, 1, N), [c])[c], 0.25))
        assert r.passed, r.errors

    def test_degenerate_rect(self):
        X = trig_poly(0, 2, 2, 6)
        t = full_signature(X, cb.extended_words_up_to(2, 2), GridRect(2, 0, 2, 6))
        assert t[ExtendedWord((), ())] == 1.0
        assert all(v == 0.0 for k, v in t.entries.items() if k != "w=;v=")

    def test_too_few_cells(self):
        X = trig_poly(0, 2, 1, 6)
        assert full_signature(X, [ExtendedWord((1, 1, 1), (2, 3, 1))], GridRect(0, 0, 6, 2)).entries[
            "w=1,1,1;v=2,3,1"] == 0.0
        assert brute_force_signature(X, ExtendedWord((1, 1, 1), (2, 3, 1)), GridRect(0, 0, 6, 2)) == 0.0

    def test_level4_against_enumeration(self):
        X = trig_poly(9, 3, 2, 6)
        for nu in cb.all_permutations(4):
            c = ExtendedWord((1, 2, 2, 1), nu)
            assert full_signature(X, [c])[c] == pytest.approx(brute_force_signature(X, c), abs=1e-12)

    def test_fallback_to_enumeration(self):
        X = trig_poly(9, 3, 1, 6)
        c = ExtendedWord((1, 1, 1, 1), (2, 4, 1, 3))
        assert plan_for(c.perm).width == 3
        direct = full_signature(X, [c], max_width=2)[c]
        assert direct == pytest.approx(brute_force_signature(X, c), abs=1e-12)

    def test_resource_limit(self):
        X = trig_poly(9, 3, 1, 64)
        c = ExtendedWord((1, 1, 1, 1), (2, 4, 1, 3))
        with pytest.raises(ResourceLimitError):
            full_signature(X, [c], max_width=2, brute_force_cap=10 ** 6)
        with pytest.raises(ResourceLimitError):
            brute_force_signature(X, ExtendedWord((1, 1, 1), (1, 2, 3)))

    def test_extended_precision_agrees(self):
        X = trig_poly(1, 2, 2, 64)
        coords = cb.extended_words(2, 2)
        a = full_signature(X, coords, precision="double")
        b = full_signature(X, coords, precision="extended")
        for c in coords:
            assert a[c] == pytest.approx(b[c], abs=1e-13)

    def test_bad_coordinates(self):
        X = trig_poly(0, 2, 1, 4)
        with pytest.raises(InputError):
            full_signature(X, [ExtendedWord((2,), (1,))])
        with pytest.raises(InputError):
            full_signature(X, [((1, 1), (1, 1))])


class TestSymSignature:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_product_field(self, n):
        w = (1,) * n
        r = refinement_report("t1 t2", [32, 64, 128],
                              lambda N: (sym_signature(monomial(1, 1, N), [w])[w], 1 / math.factorial(n)))
        assert r.passed, r.errors

    def test_sum_of_full_within_first_order(self):
        field = trig_poly
        for w in ((1, 2), (2, 1, 2)):
            coords = [ExtendedWord(w, nu) for nu in cb.all_permutations(len(w))]

            def sides(N, coords=coords, w=w):
                X = field(0, 2, 2, N)
                return sum(full_signature(X, coords).entries.values()), sym_signature(X, [w])[w]

            r = refinement_report(f"sym {w}", [32, 64, 128], sides)
            assert r.passed, r.errors

    def test_increment_path(self):
        X = trig_poly(4, 2, 2, 16)
        y = increment_path(X)
        for w in cb.words_up_to(2, 3):
            assert sym_signature(X, [w])[w] == pytest.approx(
                path_signature_1d(y, [w], method="strict")[w], abs=1e-14)


class TestElimination:
    def test_widths(self):
        assert all(plan_for(nu).width <= 2 for n in (1, 2, 3) for nu in cb.all_permutations(n))
        widths = [plan_for(nu).width for nu in cb.all_permutations(4)]
        assert widths.count(3) == 16 and widths.count(2) == 8

    def test_counts(self):
        assert tuple_count(3, 64, 64) == math.comb(64, 3) ** 2
        assert chains(5, 2).shape == (10, 2)
        assert max_table_entries((2, 4, 1, 3), 100, 100) == 10 ** 6


class TestConvolution:
    def test_empty_inner_is_id_signature(self):
        X = trig_poly(5, 2, 2, 8)
        for w in ((1, 2), (2,)):
            v = conv_product_1(X, w, (), 3, 8, 0, 3, 0, 8)
            assert v == pytest.approx(id_signature(X, [w], GridRect(3, 0, 8, 8))[w], abs=1e-14)

    def test_empty_outer_is_inner_id_signature(self):
        X = trig_poly(5, 2, 2, 8)
        v = conv_product_1(X, (), (1, 2), 3, 8, 0, 3, 0, 8)
        assert v == pytest.approx(id_signature(X, [(1, 2)], GridRect(0, 0, 3, 8))[(1, 2)], abs=1e-14)

    def test_split_one_plus_one(self):
        X = trig_poly(6, 2, 2, 6)
        D = np.diff(np.diff(X.values, axis=0), axis=1)
        brute = 0.0
        for p in range(2, 6):
            for q in range(6):
                inner = D[:2, :q, 0].sum()
                brute += D[p, q, 1] * inner
        assert conv_product_1(X, (2,), (1,), 2, 6, 0, 2, 0, 6) == pytest.approx(brute, abs=1e-14)
        assert conv_product_2(X.transpose(), (2,), (1,), 2, 6, 0, 2, 0, 6) == pytest.approx(brute, abs=1e-14)

    def test_invalid_bounds(self):
        with pytest.raises(InputError):
            conv_product_1(trig_poly(0, 2, 1, 4), (1,), (1,), 3, 2, 0, 1, 0, 4)


class TestCornerTables:
    def test_lower_corner(self):
        X = trig_poly(7, 2, 2, 6)
        cells = np.diff(np.diff(X.values, axis=0), axis=1)
        for c in cb.extended_words_up_to(2, 2):
            T = corner_table(cells, c)
            for a, b in ((3, 4), (6, 6), (0, 2)):
                assert T[a, b] == pytest.approx(brute_force_signature(X, c, GridRect(0, 0, a, b)), abs=1e-14)

    def test_upper_corner(self):
        X = trig_poly(8, 2, 2, 6)
        cells = np.diff(np.diff(X.values, axis=0), axis=1)
        for c in cb.extended_words_up_to(2, 2):
            T = upper_corner_table(cells, c)
            for a, b in ((3, 1), (6, 0), (2, 5)):
                ref = brute_force_signature(X, c, GridRect(0, b + 1, a, 6))
                assert T[a, b] == pytest.approx(ref, abs=1e-14)


class TestSigTable:
    def test_json_roundtrip(self):
        X = trig_poly(0, 2, 2, 6)
        t = full_signature(X, cb.extended_words_up_to(2, 2), GridRect(1, 1, 5, 6))
        back = SigTable.from_json(t.to_json())
        assert back.entries == t.entries and back.rect == t.rect and back.grid == t.grid
        data = json.loads(t.to_json())
        assert set(data) == {"kind", "rect", "grid", "entries"}

    def test_csv_roundtrip(self):
        t = sym_signature(trig_poly(0, 2, 2, 6), cb.words_up_to(2, 2))
        assert SigTable.entries_from_csv(t.to_csv()) == t.entries
        assert t.to_csv().splitlines()[0] == "key,value"

    def test_malformed(self):
        with pytest.raises(InputError):
            SigTable.from_json("{")
        with pytest.raises(InputError):
            SigTable.entries_from_csv("a,b\n")

    def test_query(self):
        X = trig_poly(0, 2, 1, 6)
        q = SigQuery("full", (ExtendedWord((1, 1), (2, 1)),))
        assert q.run(X).keys() == ["w=1,1;v=2,1"]
        with pytest.raises(InputError):
            SigQuery("full", (ExtendedWord((1,) * 5, (1, 2, 3, 4, 5)),))
        with pytest.raises(InputError):
            SigQuery("bogus", ())
