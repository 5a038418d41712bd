"""Points on the unit-circumference circle at 64-bit tick resolution.

A position is an unsigned 64-bit integer ``tick`` standing for ``tick / 2**64``
in ``R/Z``.  Every comparison against a scale ``r`` is decided with integers,
so the map ``f_r`` is built without any rounding.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from .errors import DuplicatePoints

TICKS = 1 << 64
HALF = 1 << 63
MASK = TICKS - 1


@dataclass(frozen=True)
class Rational:
    """Scale ``r = p/q`` with ``gcd(p, q) == 1`` and ``0 < p/q <= 1``."""

    p: int
    q: int

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0 or self.p > self.q:
            raise ValueError(f"need 0 < p/q <= 1, got {self.p}/{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not reduced")

    @classmethod
    def of(cls, num: int, den: int) -> "Rational":
        g = math.gcd(num, den)
        return cls(num // g, den // g)

    @property
    def threshold(self) -> int:
        # d < p*2^64/q  <=>  d < ceil(p*2^64/q) for integer d
        return -((-self.p * TICKS) // self.q)

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def to_json(self) -> dict:
        return {"kind": "rational", "p": self.p, "q": self.q}


@dataclass(frozen=True)
class Fixed:
    """Scale ``r = num / 2**64``; stands in for an irrational ``r``."""

    num: int

    def __post_init__(self):
        if not 1 <= self.num < TICKS:
            raise ValueError(f"fixed-point numerator out of range: {self.num}")

    @classmethod
    def from_decimal(cls, text: str) -> "Fixed":
        """Parse a decimal in (0, 1), truncating toward zero to whole ticks."""
        try:
            value = Fraction(Decimal(text))
        except (InvalidOperation, ValueError) as exc:
            raise ValueError(f"not a decimal number: {text!r}") from exc
        return cls(math.floor(value * TICKS))

    @property
    def threshold(self) -> int:
        return self.num

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, TICKS)

    def __str__(self) -> str:
        return f"fixed:{self.num}"

    def to_json(self) -> dict:
        return {"kind": "fixed", "num": str(self.num), "value": float(self.as_fraction())}


Scale = Union[Rational, Fixed]


def parse_scale(text: str) -> Scale:
    """Parse ``P/Q``, ``fixed:0.xxxx`` or ``fixed:#<ticks>``."""
    text = text.strip()
    if text.startswith("fixed:"):
        body = text[len("fixed:"):]
        if body.startswith("#"):
            return Fixed(int(body[1:]))
        return Fixed.from_decimal(body)
    if "/" in text:
        num, den = text.split("/", 1)
        p, q = int(num), int(den)
        if p <= 0 or q <= 0:
            raise ValueError(f"scale must be positive: {text!r}")
        return Rational.of(p, q)
    if text == "1":
        return Rational(1, 1)
    raise ValueError(f"cannot parse scale {text!r}; use P/Q or fixed:0.xxx")


def scale_from_json(obj: dict) -> Scale:
    if obj["kind"] == "rational":
        return Rational(int(obj["p"]), int(obj["q"]))
    return Fixed(int(obj["num"]))


def cw_dist(x: int, y: int) -> int:
    """Clockwise distance from ``x`` to ``y`` in ticks."""
    return (y - x) & MASK


def arc_contains(x: int, r: Scale, y: int) -> bool:
    """Is ``y`` in the half-open arc ``[x, x + r)``?"""
    if isinstance(r, Rational):
        return cw_dist(x, y) * r.q < r.p * TICKS
    return cw_dist(x, y) < r.num


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Strictly increasing circle ticks."""

    ticks: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.ticks, dtype=np.uint64)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("a sample set needs at least one point")
        if t.size > 1 and not (t[1:] > t[:-1]).all():
            s = np.sort(t)
            if (s[1:] == s[:-1]).any():
                raise DuplicatePoints("repeated tick in sample set")
            raise ValueError("ticks must be sorted")
        t.setflags(write=False)
        object.__setattr__(self, "ticks", t)

    @classmethod
    def from_ticks(cls, ticks: Iterable[int]) -> "SampleSet":
        """Sort arbitrary ticks; duplicates are an error."""
        vals = [int(v) for v in ticks]
        if any(v < 0 or v >= TICKS for v in vals):
            raise ValueError("ticks must lie in [0, 2**64)")
        arr = np.array(sorted(vals), dtype=np.uint64)
        if arr.size > 1 and (arr[1:] == arr[:-1]).any():
            raise DuplicatePoints("repeated tick in sample set")
        return cls(arr)

    @property
    def n(self) -> int:
        return int(self.ticks.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, SampleSet) and np.array_equal(self.ticks, other.ticks)

    def tick(self, i: int) -> int:
        return int(self.ticks[i % self.n])

    def subset(self, indices) -> "SampleSet":
        return SampleSet(self.ticks[np.sort(np.asarray(indices, dtype=np.int64))])

    def to_text(self) -> str:
        return "".join(f"{int(t)}\n" for t in self.ticks)

    @classmethod
    def from_text(cls, text: str) -> "SampleSet":
        return cls.from_ticks(int(line) for line in text.split() if line)

    def to_json(self) -> str:
        return json.dumps({"ticks": [str(int(t)) for t in self.ticks]})

    @classmethod
    def from_json(cls, text: str) -> "SampleSet":
        return cls.from_ticks(int(v) for v in json.loads(text)["ticks"])


def regular_ticks(n: int) -> np.ndarray:
    return np.array([(j * TICKS) // n for j in range(n)], dtype=np.uint64)


def sample_uniform(n: int, rng: np.random.Generator) -> SampleSet:
    """``n`` distinct uniform ticks; colliding draws are replaced by fresh ones."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ticks = np.unique(rng.integers(0, TICKS, size=n, dtype=np.uint64))
    while ticks.size < n:
        extra = rng.integers(0, TICKS, size=n - ticks.size, dtype=np.uint64)
        ticks = np.unique(np.concatenate([ticks, extra]))
    return SampleSet(ticks)


@dataclass(frozen=True, eq=False)
class DynSystem:
    """A sample set, a scale, and the successor table of ``f_r``."""

    points: SampleSet
    r: Scale
    succ: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def ticks(self) -> np.ndarray:
        return self.points.ticks


def first_at_or_after(ticks: np.ndarray, positions) -> np.ndarray:
    """Index of the first point at or clockwise after each position."""
    idx = np.searchsorted(ticks, positions, side="left")
    return np.where(idx == ticks.size, 0, idx)


def furthest_in_arc(ticks: np.ndarray, threshold: int) -> np.ndarray:
    """For each point, the index of the last point with ``cw_dist < threshold``."""
    n = ticks.size
    i = np.arange(n, dtype=np.int64)
    if threshold >= TICKS:
        return (i - 1) % n
    ends = ticks + np.uint64(threshold)  # wraps modulo 2**64
    wrapped = ends < ticks
    below = np.searchsorted(ticks, ends, side="left").astype(np.int64)
    count = np.where(wrapped, n - i + below, below - i)
    return (i + count - 1) % n


def nearest_after_back_shift(ticks: np.ndarray, positions: np.ndarray, threshold: int) -> np.ndarray:
    """First point strictly clockwise after ``position - r``.

    ``y`` is strictly after ``a - r`` exactly when ``cw_dist(y, a) < r``, i.e.
    when ``y`` sits at or after tick ``a - (threshold - 1)``.
    """
    start = positions - np.uint64(threshold - 1)
    return first_at_or_after(ticks, start)


def build_map(points: SampleSet, r: Scale) -> DynSystem:
    """Successor table of ``f_r``: the furthest point of ``[x, x + r)``."""
    succ = furthest_in_arc(points.ticks, r.threshold)
    succ.setflags(write=False)
    return DynSystem(points, r, succ)
