import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclic_dyn.catalan import (
    catalan,
    catalan_bounded,
    catalan_prime,
    chebyshev_u_at_one,
    gf_quarter,
    gf_quarter_chebyshev,
    gf_quarter_closed,
    gf_quarter_recurrence,
    level_mass_limit,
    predicted_level_fraction,
    predicted_periodic_fraction,
    predicted_swift_fraction,
    swift_mass_limit,
    theory_table,
)
from cyclic_dyn.circle import Fixed, Rational

from conftest import enumerate_paths

GOLDEN = Fixed.from_decimal("0.6180339887")


def filter_paths(ups: int, downs: int, h: int) -> int:
    """Count step sequences staying inside [0, h] by filtering all of them."""
    count = 0
    for steps in product((1, -1), repeat=ups + downs):
        if steps.count(1) != ups:
            continue
        y, ok = 0, True
        for s in steps:
            y += s
            if not 0 <= y <= h:
                ok = False
                break
        count += ok
    return count


def path_graph_ratio(h: int) -> float:
    """``cos^2(pi/(h+2))``: growth rate per step pair over four, on heights 0..h."""
    return math.cos(math.pi / (h + 2)) ** 2


class TestCounts:
    @pytest.mark.parametrize("i,value", [(0, 1), (1, 1), (2, 2), (3, 5), (10, 16796)])
    def test_catalan(self, i, value):
        assert catalan(i) == value

    def test_catalan_64_is_big(self):
        assert catalan(64) > 2**64

    def test_bounded_examples(self):
        assert catalan_bounded(0, 0) == 1
        assert all(catalan_bounded(i, 0) == 0 for i in range(1, 8))
        assert catalan_bounded(3, 1) == 1
        assert catalan_bounded(3, 2) == 4
        assert all(catalan_bounded(i, h) == catalan(i) for h in range(8) for i in range(h + 1))

    def test_prime_examples(self):
        assert all(catalan_prime(0, h) == 1 for h in range(10))
        assert all(catalan_prime(i, 1) == 1 for i in range(10))
        assert all(catalan_prime(i, 0) == 0 for i in range(1, 10))

    def test_enumerators_agree(self):
        for ups in range(8):
            for downs in range(ups + 1):
                for h in range(5):
                    assert enumerate_paths(ups, downs, h) == filter_paths(ups, downs, h)

    def test_enumeration_oracle(self):
        for i in range(11):
            for h in range(7):
                assert catalan_bounded(i, h) == enumerate_paths(i, i, h), (i, h)
                assert catalan_prime(i, h) == enumerate_paths(i + h, i, h), (i, h)

    def test_dyck_enumeration_to_twelve(self):
        for i in range(13):
            assert catalan(i) == enumerate_paths(i, i, 2 * i)

    @pytest.mark.parametrize("h", range(1, 8))
    def test_bounded_recurrence(self, h):
        for n in range(12):
            rhs = sum(catalan_bounded(j, h - 1) * catalan_bounded(n - j, h) for j in range(n + 1))
            assert catalan_bounded(n + 1, h) == rhs

    @pytest.mark.parametrize("h", range(1, 8))
    def test_prime_recurrence(self, h):
        for n in range(12):
            rhs = sum(catalan_prime(j, h - 1) * catalan_bounded(n + 1 - j, h) for j in range(n + 2))
            assert catalan_prime(n + 1, h) == rhs

    @given(st.integers(0, 30), st.integers(0, 30))
    def test_monotone_in_height(self, i, h):
        assert catalan_bounded(i, h) <= catalan_bounded(i, h + 1) <= catalan(i)


class TestGeneratingFunctions:
    def test_values(self):
        assert gf_quarter(0, "plainC") == 2
        assert gf_quarter(0, "C") == 1
        assert gf_quarter(2, "C'") == 2

    @pytest.mark.parametrize("family", ["C", "C'", "plainC"])
    def test_three_ways_agree(self, family):
        for h in range(65):
            assert gf_quarter_closed(h, family) == gf_quarter_recurrence(h, family) == gf_quarter_chebyshev(h, family)
            assert isinstance(gf_quarter(h, family), Fraction)

    def test_chebyshev_at_one(self):
        assert [chebyshev_u_at_one(h) for h in range(6)] == [1, 2, 3, 4, 5, 6]

    @pytest.mark.parametrize("h", range(0, 7))
    def test_series_converges_to_closed_form(self, h):
        partial = sum(Fraction(catalan_bounded(i, h), 4**i) for i in range(200))
        limit = gf_quarter(h, "C")
        assert 0 <= limit - partial < 1e-10

    @pytest.mark.parametrize("h", range(0, 7))
    def test_prime_series_converges(self, h):
        partial = sum(Fraction(catalan_prime(i, h), 4**i) for i in range(200))
        assert 0 <= gf_quarter(h, "C'") - partial < 1e-10

    def test_bad_family(self):
        with pytest.raises(ValueError):
            gf_quarter(1, "D")


class TestPredictions:
    def test_level_zero_is_half(self):
        for r in [GOLDEN, Rational(1, 3), Rational(5, 23), Rational(1, 2)]:
            assert predicted_level_fraction(0, r) == Fraction(1, 2)

    def test_fixed_levels(self):
        assert [predicted_level_fraction(i, GOLDEN) for i in range(1, 4)] == [
            Fraction(1, 8), Fraction(1, 16), Fraction(5, 128)
        ]

    def test_half_has_no_higher_levels(self):
        assert all(predicted_level_fraction(i, Rational(1, 2)) == 0 for i in range(1, 10))

    def test_swift(self):
        for q in range(2, 9):
            assert predicted_swift_fraction(0, 1, q) == Fraction(1, 2 ** (q - 1))
        assert predicted_swift_fraction(1, 1, 2) == 0

    def test_periodic(self):
        assert predicted_periodic_fraction(Rational(1, 3)) == Fraction(1, 3)
        assert predicted_periodic_fraction(GOLDEN) == 0
        assert predicted_periodic_fraction(Rational(1, 1)) == 1

    @pytest.mark.parametrize("q", range(2, 13))
    def test_level_mass_partition(self, q):
        r = Rational(1, q)
        i_max = 64
        partial = sum(predicted_level_fraction(i, r) for i in range(i_max + 1))
        assert level_mass_limit(r) == Fraction(q - 1, q)
        assert level_mass_limit(r) + predicted_periodic_fraction(r) == 1
        rho = path_graph_ratio(q - 2)
        tail_bound = rho ** (i_max + 1) / (2 * (1 - rho))
        assert 0 <= level_mass_limit(r) - partial <= tail_bound

    def test_fixed_level_mass(self):
        i_max = 64
        partial = sum(predicted_level_fraction(i, GOLDEN) for i in range(i_max + 1))
        assert level_mass_limit(GOLDEN) == 1
        # C_i / 4^i <= 1 / (sqrt(pi) i^(3/2))
        assert 0 < 1 - partial <= 1 / math.sqrt(math.pi * i_max)

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_swift_sum_tight(self, q):
        partial = sum(predicted_swift_fraction(i, 1, q) for i in range(65))
        assert abs(float(Fraction(1, q) - partial)) <= 1e-15
        assert swift_mass_limit(q) == Fraction(1, q)

    @pytest.mark.parametrize("q", range(5, 13))
    def test_swift_sum_tail_bound(self, q):
        partial = sum(predicted_swift_fraction(i, 1, q) for i in range(65))
        assert swift_mass_limit(q) == Fraction(1, q)
        rho = path_graph_ratio(q - 2)
        tail_bound = rho ** (65 + (q - 2) / 2) / (2 * (1 - rho))
        assert 0 <= Fraction(1, q) - partial <= tail_bound

    def test_unit_scale(self):
        r = Rational(1, 1)
        assert all(predicted_level_fraction(i, r) == 0 for i in range(5))
        assert predicted_swift_fraction(0, 1, 1) == 1
        assert swift_mass_limit(1) == 1

    def test_theory_table(self):
        t = theory_table(Rational(1, 3), 3)
        assert t["levels"][:2] == [Fraction(1, 2), Fraction(1, 8)]
        assert t["periodic"] == Fraction(1, 3)
        assert "swift" not in theory_table(GOLDEN, 3)
