"""Reproducible Monte Carlo experiments on random circle samples.

Trial ``t`` of an experiment seeded with ``seed`` draws from
``numpy.random.default_rng(SeedSequence([seed, t]))``, so every trial is
reproducible on its own and the experiment does not depend on scheduling.
Aggregates are kept as exact integer totals and only turned into floats at
the end.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import catalan
from .circle import Fixed, Rational, Scale, build_map, sample_uniform, scale_from_json
from .dynamics import DEFAULT_I_MAX, orbit_report, periodic_and_levels, swiftness_types
from .errors import InternalInvariantViolation

RNG_SCHEME = "numpy.SeedSequence([seed, trial]) -> PCG64"
Z_LIMIT = 4.0


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    r: Scale
    trials: int
    seed: int = 0
    i_max: int = DEFAULT_I_MAX
    swift: bool = True  # only meaningful for rational r
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.i_max < 0:
            raise ValueError("i_max must be >= 0")

    @property
    def with_swift(self) -> bool:
        return self.swift and isinstance(self.r, Rational)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r.to_json(),
            "trials": self.trials,
            "seed": self.seed,
            "i_max": self.i_max,
            "swift": self.with_swift,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        return cls(
            n=int(obj["n"]),
            r=scale_from_json(obj["r"]),
            trials=int(obj["trials"]),
            seed=int(obj["seed"]),
            i_max=int(obj["i_max"]),
            swift=bool(obj["swift"]),
        )


@dataclass(frozen=True)
class TrialResult:
    trial: int
    per: int
    lev: Tuple[int, ...]
    orbit_count: int
    ell: int
    w: int
    swi: Optional[Tuple[int, ...]] = None
    swi_untyped: Optional[int] = None
    q_swift: Optional[int] = None
    wf_pass: Optional[bool] = None

    @property
    def wf(self) -> Fraction:
        return Fraction(self.w, self.ell)

    def to_json(self) -> dict:
        out = {
            "trial": self.trial,
            "per": self.per,
            "lev": list(self.lev),
            "orbit_count": self.orbit_count,
            "ell": self.ell,
            "w": self.w,
            "wf": {"num": self.wf.numerator, "den": self.wf.denominator},
        }
        if self.swi is not None:
            out.update(swi=list(self.swi), swi_untyped=self.swi_untyped, q_swift=self.q_swift)
        if self.wf_pass is not None:
            out["wf_pass"] = self.wf_pass
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "TrialResult":
        swi = obj.get("swi")
        return cls(
            trial=int(obj["trial"]),
            per=int(obj["per"]),
            lev=tuple(int(v) for v in obj["lev"]),
            orbit_count=int(obj["orbit_count"]),
            ell=int(obj["ell"]),
            w=int(obj["w"]),
            swi=None if swi is None else tuple(int(v) for v in swi),
            swi_untyped=obj.get("swi_untyped"),
            q_swift=obj.get("q_swift"),
            wf_pass=obj.get("wf_pass"),
        )


def wf_threshold_upper(r: Scale, n: int) -> Fraction:
    """A rational at or above ``r - 2 ln(n) / n``.

    ``ln n`` is evaluated to 60 digits and then lowered by a margin far above
    the evaluation error, so passing against this value implies passing
    against the true threshold.
    """
    with localcontext() as ctx:
        ctx.prec = 60
        ln_n = Decimal(n).ln()
    ln_low = Fraction(ln_n) - Fraction(1, 10 ** 50)
    return r.as_fraction() - 2 * ln_low / n


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    rng = trial_rng(cfg.seed, trial)
    sys = build_map(sample_uniform(cfg.n, rng), cfg.r)
    levels = periodic_and_levels(sys)
    rep = orbit_report(sys, levels)
    lev = levels.histogram.counts
    if rep.per + sum(lev) != cfg.n:
        raise InternalInvariantViolation("per + sum(lev) != n")
    swi = untyped = q_swift = None
    if cfg.with_swift:
        sw = swiftness_types(sys, cfg.i_max, levels)
        swi, untyped, q_swift = sw.type_counts, sw.untyped, int(sw.q_swift_indices.size)
        if q_swift and rep.length * cfg.r.p - rep.winding * cfg.r.q != 1:
            raise InternalInvariantViolation("q-swift point without ell*p - w*q = 1")
    wf_pass = None
    if cfg.n >= 3:
        wf_pass = rep.wf >= wf_threshold_upper(cfg.r, cfg.n)
    return TrialResult(trial, rep.per, lev, rep.orbit_count, rep.length, rep.winding,
                       swi, untyped, q_swift, wf_pass)


def _run_trial_star(args):
    return run_trial(*args)


@dataclass
class Stat:
    """Running exact totals of one per-trial count; reported as a fraction of ``n``."""

    n: int
    total: int = 0
    total_sq: int = 0
    count: int = 0

    def add(self, value: int) -> None:
        self.total += value
        self.total_sq += value * value
        self.count += 1

    @property
    def mean(self) -> float:
        return self.total / (self.count * self.n)

    @property
    def sd(self) -> float:
        if self.count < 2:
            return 0.0
        var = Fraction(self.count * self.total_sq - self.total ** 2, self.count * (self.count - 1))
        return math.sqrt(var) / self.n

    @property
    def se(self) -> float:
        return self.sd / math.sqrt(self.count)

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "total_sq": self.total_sq,
            "count": self.count,
            "mean": self.mean,
            "sd": self.sd,
            "se": self.se,
        }


@dataclass
class Aggregate:
    n: int
    i_max: int
    stats: Dict[str, Stat] = field(default_factory=dict)
    trials: int = 0
    single_orbit: int = 0
    wf_checked: int = 0
    wf_passed: int = 0
    q_swift_trials: int = 0
    swift_identity_ok: int = 0

    def stat(self, name: str) -> Stat:
        if name not in self.stats:
            self.stats[name] = Stat(self.n)
        return self.stats[name]

    @property
    def single_orbit_freq(self) -> float:
        return self.single_orbit / self.trials

    @property
    def wf_pass_freq(self) -> Optional[float]:
        return self.wf_passed / self.wf_checked if self.wf_checked else None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "i_max": self.i_max,
            "trials": self.trials,
            "single_orbit": self.single_orbit,
            "single_orbit_freq": self.single_orbit_freq,
            "wf_checked": self.wf_checked,
            "wf_passed": self.wf_passed,
            "wf_pass_freq": self.wf_pass_freq,
            "q_swift_trials": self.q_swift_trials,
            "swift_identity_ok": self.swift_identity_ok,
            "stats": {k: v.to_json() for k, v in self.stats.items()},
        }


def aggregate(results: Sequence[TrialResult], cfg: ExperimentConfig) -> Aggregate:
    agg = Aggregate(cfg.n, cfg.i_max)
    for res in sorted(results, key=lambda t: t.trial):
        if res.per + sum(res.lev) != cfg.n:
            raise InternalInvariantViolation(f"trial {res.trial}: per + sum(lev) != n")
        agg.trials += 1
        agg.stat("per").add(res.per)
        for i in range(cfg.i_max + 1):
            agg.stat(f"lev_{i}").add(res.lev[i] if i < len(res.lev) else 0)
        agg.stat("lev_rest").add(sum(res.lev[cfg.i_max + 1:]))
        if res.swi is not None:
            for i, c in enumerate(res.swi):
                agg.stat(f"swi_{i}").add(c)
            agg.stat("swi_total").add(sum(res.swi))
        agg.single_orbit += res.orbit_count == 1
        if res.wf_pass is not None:
            agg.wf_checked += 1
            agg.wf_passed += bool(res.wf_pass)
        if res.q_swift:
            agg.q_swift_trials += 1
            r = cfg.r
            agg.swift_identity_ok += res.orbit_count == 1 and res.ell * r.p - res.w * r.q == 1
    return agg


def run_experiment(cfg: ExperimentConfig) -> Tuple[List[TrialResult], Aggregate]:
    """Run every trial (optionally across processes) and aggregate.

    Any trial failure propagates and aborts the experiment.
    """
    jobs = [(cfg, t) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_trial_star, jobs))
    else:
        results = [run_trial(*job) for job in jobs]
    results.sort(key=lambda t: t.trial)
    return results, aggregate(results, cfg)


@dataclass(frozen=True)
class ZRow:
    name: str
    observed: float
    predicted: Fraction
    se: float
    z: float

    @property
    def flagged(self) -> bool:
        return abs(self.z) > Z_LIMIT

    def to_json(self) -> dict:
        return {
            "statistic": self.name,
            "observed": self.observed,
            "predicted": {"num": self.predicted.numerator, "den": self.predicted.denominator},
            "se": self.se,
            "z": self.z,
            "pass": not self.flagged,
        }


def z_score(observed: float, predicted: Fraction, se: float) -> float:
    diff = observed - float(predicted)
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se


def compare_with_theory(agg: Aggregate, r: Scale, i_max: Optional[int] = None) -> List[ZRow]:
    """z-scores of observed fractions against the exact limits."""
    i_max = agg.i_max if i_max is None else min(i_max, agg.i_max)
    rows = []

    def row(name: str, predicted: Fraction):
        st = agg.stats[name]
        # A rare level seen zero times has sample se 0; fall back to the
        # binomial se under the prediction so the z-score stays finite.
        p = float(predicted)
        se = max(st.se, math.sqrt(p * (1 - p) / (st.n * st.count)))
        rows.append(ZRow(name, st.mean, predicted, se, z_score(st.mean, predicted, se)))

    row("per", catalan.predicted_periodic_fraction(r))
    for i in range(i_max + 1):
        row(f"lev_{i}", catalan.predicted_level_fraction(i, r))
    if isinstance(r, Rational) and "swi_total" in agg.stats:
        for i in range(i_max + 1):
            if f"swi_{i}" in agg.stats:
                row(f"swi_{i}", catalan.predicted_swift_fraction(i, r.p, r.q))
        # only types 0..agg.i_max were searched, so compare with the truncated sum
        total = sum(catalan.predicted_swift_fraction(i, r.p, r.q) for i in range(agg.i_max + 1))
        row("swi_total", total)
    return rows


def wf_bound_check(results: Sequence[TrialResult], n: int, r: Scale) -> Optional[float]:
    """Fraction of trials with ``wf >= r - 2 ln(n)/n``; ``None`` when ``n < 3``."""
    if n < 3:
        return None
    bar = wf_threshold_upper(r, n)
    passed = sum(res.wf >= bar for res in results)
    return passed / len(results)


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)
    return float(slope)


@dataclass(frozen=True)
class GrowthFit:
    n_grid: Tuple[int, ...]
    medians: Tuple[float, ...]
    slope: float


def growth_exponent(r: Scale, n_grid: Sequence[int], trials: int, seed: int = 0, workers: int = 1) -> GrowthFit:
    """Least-squares slope of ``log(median per)`` against ``log n``."""
    n_grid = tuple(int(n) for n in n_grid)
    if len(n_grid) < 3 or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("need at least three increasing sizes")
    medians = []
    for k, n in enumerate(n_grid):
        cfg = ExperimentConfig(n=n, r=r, trials=trials, seed=seed + k, i_max=0, swift=False, workers=workers)
        results, _ = run_experiment(cfg)
        medians.append(float(np.median([res.per for res in results])))
    slope = fit_slope(np.log(n_grid), np.log(medians))
    return GrowthFit(n_grid, tuple(medians), slope)
