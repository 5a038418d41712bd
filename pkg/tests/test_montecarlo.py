import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclic_dyn.circle import Fixed, Rational
from cyclic_dyn.dynamics import make_regular, orbit_report
from cyclic_dyn.montecarlo import (
    Aggregate,
    ExperimentConfig,
    Stat,
    TrialResult,
    aggregate,
    compare_with_theory,
    fit_slope,
    growth_exponent,
    run_experiment,
    run_trial,
    wf_bound_check,
    wf_threshold_upper,
    z_score,
)

from conftest import rationals

GOLDEN = Fixed.from_decimal("0.6180339887")


class TestConfig:
    def test_validation(self):
        for bad in [dict(n=0, trials=1), dict(n=5, trials=0), dict(n=5, trials=1, i_max=-1)]:
            with pytest.raises(ValueError):
                ExperimentConfig(r=Rational(1, 3), **bad)

    def test_json_round_trip(self):
        for r in [Rational(2, 5), GOLDEN]:
            cfg = ExperimentConfig(n=10, r=r, trials=3, seed=9, i_max=7)
            back = ExperimentConfig.from_json(cfg.to_json())
            assert back.to_json() == cfg.to_json()

    def test_swift_only_for_rational(self):
        assert not ExperimentConfig(n=5, r=GOLDEN, trials=1).with_swift
        assert ExperimentConfig(n=5, r=Rational(1, 2), trials=1).with_swift


class TestTrials:
    def test_single_point(self):
        res = run_trial(ExperimentConfig(n=1, r=Rational(1, 2), trials=1, seed=7), 0)
        assert (res.per, res.lev, res.ell, res.w) == (1, (), 1, 0)
        assert res.wf_pass is None

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 400), rationals(max_q=7), st.integers(0, 2**32), st.integers(0, 50))
    def test_conservation(self, n, r, seed, trial):
        res = run_trial(ExperimentConfig(n=n, r=r, trials=1, seed=seed, i_max=6), trial)
        assert res.per + sum(res.lev) == n
        assert res.swi_untyped + sum(res.swi) == res.per

    def test_trials_are_independent_of_each_other(self):
        cfg = ExperimentConfig(n=300, r=Rational(2, 7), trials=8, seed=4)
        results, _ = run_experiment(cfg)
        assert run_trial(cfg, 5) == results[5]

    def test_deterministic_across_workers(self):
        base = dict(n=500, r=Rational(1, 3), trials=12, seed=21, i_max=10)
        a, agg_a = run_experiment(ExperimentConfig(workers=1, **base))
        b, agg_b = run_experiment(ExperimentConfig(workers=3, **base))
        assert a == b
        assert agg_a.to_json() == agg_b.to_json()

    def test_json_round_trip(self):
        cfg = ExperimentConfig(n=200, r=Rational(1, 2), trials=2, seed=1)
        res = run_trial(cfg, 1)
        assert TrialResult.from_json(res.to_json()) == res


class TestAggregate:
    def test_stat_is_exact(self):
        vals = [3, 9, 4, 4, 10]
        st_ = Stat(20)
        for v in vals:
            st_.add(v)
        assert st_.mean == pytest.approx(np.mean(vals) / 20, rel=1e-15)
        assert st_.sd == pytest.approx(np.std(vals, ddof=1) / 20, rel=1e-12)
        assert st_.se == pytest.approx(st_.sd / math.sqrt(5))

    def test_rest_bucket(self):
        cfg = ExperimentConfig(n=10, r=Rational(1, 3), trials=1, i_max=1, swift=False)
        res = TrialResult(0, 3, (4, 2, 1), 1, 3, 1)
        agg = aggregate([res], cfg)
        assert agg.stats["lev_rest"].total == 1
        assert agg.stats["lev_1"].total == 2

    def test_conservation_violation_raises(self):
        cfg = ExperimentConfig(n=10, r=Rational(1, 3), trials=1, swift=False)
        with pytest.raises(AssertionError):
            aggregate([TrialResult(0, 3, (4,), 1, 3, 1)], cfg)


class TestTheoryComparison:
    def test_z_score(self):
        assert z_score(0.5, Fraction(1, 2), 0.1) == 0
        assert z_score(0.7, Fraction(1, 2), 0.1) == pytest.approx(2)
        assert z_score(0.5, Fraction(1, 2), 0.0) == 0

    def test_fixed_has_no_swift_rows(self):
        _, agg = run_experiment(ExperimentConfig(n=300, r=GOLDEN, trials=5, i_max=3))
        names = [row.name for row in compare_with_theory(agg, GOLDEN)]
        assert names == ["per", "lev_0", "lev_1", "lev_2", "lev_3"]

    def test_small_rational_run_agrees(self):
        cfg = ExperimentConfig(n=5000, r=Rational(1, 3), trials=40, seed=3, i_max=12)
        _, agg = run_experiment(cfg)
        rows = compare_with_theory(agg, cfg.r)
        assert all(not row.flagged for row in rows), [r.to_json() for r in rows if r.flagged]
        assert {"per", "swi_0", "swi_total"} <= {row.name for row in rows}

    def test_unseen_rare_level_is_not_flagged(self):
        agg = Aggregate(100, 0, trials=2)
        agg.stat("per").add(50)
        agg.stat("per").add(50)
        agg.stat("lev_0").add(50)
        agg.stat("lev_0").add(50)
        rows = compare_with_theory(agg, Rational(1, 2))
        assert all(math.isfinite(row.z) for row in rows)

    def test_truncated_swift_total(self):
        r = Rational(2, 5)
        cfg = ExperimentConfig(n=3000, r=r, trials=20, seed=0, i_max=3)
        _, agg = run_experiment(cfg)
        rows = {row.name: row for row in compare_with_theory(agg, r)}
        assert rows["swi_total"].predicted == sum([Fraction(1, 16), Fraction(3, 64), Fraction(1, 32), Fraction(21, 1024)])
        assert not rows["swi_total"].flagged


class TestWindingBound:
    def test_threshold_is_conservative(self):
        for n in [3, 10, 1000, 10**6]:
            bar = wf_threshold_upper(Rational(1, 3), n)
            true = 1 / 3 - 2 * math.log(n) / n
            assert float(bar) >= true - 1e-15
            assert float(bar) == pytest.approx(true, abs=1e-12)

    def test_too_small_is_skipped(self):
        res = run_trial(ExperimentConfig(n=2, r=Rational(1, 3), trials=1), 0)
        assert wf_bound_check([res], 2, Rational(1, 3)) is None

    def test_regular_winding_is_exact(self):
        rep = orbit_report(make_regular(12, 5))
        assert rep.wf == Fraction(5, 12)

    def test_small_run_passes(self):
        cfg = ExperimentConfig(n=1000, r=Rational(1, 3), trials=100, seed=8, swift=False, i_max=0)
        results, agg = run_experiment(cfg)
        assert wf_bound_check(results, cfg.n, cfg.r) >= 0.95
        assert agg.wf_checked == 100


class TestGrowth:
    def test_constant_slope(self):
        assert fit_slope([1, 2, 3], [5, 5, 5]) == pytest.approx(0)

    def test_rational_slope_is_one(self):
        fit = growth_exponent(Rational(1, 3), [1000, 3000, 10000], trials=10)
        assert fit.slope == pytest.approx(1, abs=0.05)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            growth_exponent(Rational(1, 3), [100, 50, 200], trials=1)


class TestSingleOrbit:
    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_frequency_rises_with_n(self, q):
        r = Rational(1, q)
        freq = {}
        for n in (100, 10_000):
            cfg = ExperimentConfig(n=n, r=r, trials=100, seed=q, swift=False, i_max=0)
            freq[n] = run_experiment(cfg)[1].single_orbit_freq
        assert freq[10_000] >= freq[100] - 0.05
        assert freq[10_000] >= 0.99

