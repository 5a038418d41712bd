"""Structure of ``f_r``: periodic set, levels, orbits, swift points, gap sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .circle import (
    TICKS,
    DynSystem,
    Rational,
    Scale,
    SampleSet,
    build_map,
    cw_dist,
    nearest_after_back_shift,
    regular_ticks,
)
from .errors import InternalInvariantViolation, NotRational

DEFAULT_I_MAX = 64


@dataclass(frozen=True)
class LevelHistogram:
    counts: Tuple[int, ...]

    @property
    def max_level(self) -> Optional[int]:
        return len(self.counts) - 1 if self.counts else None

    def __getitem__(self, i: int) -> int:
        return self.counts[i] if 0 <= i < len(self.counts) else 0

    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict:
        return {"counts": list(self.counts), "max_level": self.max_level}


@dataclass(frozen=True)
class Levels:
    periodic: np.ndarray  # sorted indices
    histogram: LevelHistogram
    level: np.ndarray  # -1 marks periodic points

    def image_size(self, j: int) -> int:
        """``|f^j(X)|``."""
        return int(self.level.size) - sum(self.histogram.counts[:j])


def periodic_and_levels(sys: DynSystem) -> Levels:
    """Peel the functional graph from its sources.

    A point reaches in-degree zero in round ``i`` exactly when the longest chain
    of preimages ending at it has length ``i``, which is the same as lying in
    ``f^i(X)`` but not ``f^(i+1)(X)``.  What is never peeled is periodic.
    """
    n = sys.n
    succ = sys.succ
    indeg = np.bincount(succ, minlength=n)
    level = np.full(n, -1, dtype=np.int64)
    counts: List[int] = []
    frontier = np.flatnonzero(indeg == 0)
    while frontier.size:
        level[frontier] = len(counts)
        counts.append(int(frontier.size))
        targets, hits = np.unique(succ[frontier], return_counts=True)
        indeg[targets] -= hits
        frontier = targets[indeg[targets] == 0]
    periodic = np.flatnonzero(level < 0)
    return Levels(periodic, LevelHistogram(tuple(counts)), level)


@dataclass(frozen=True)
class OrbitReport:
    length: int
    winding: int
    orbit_count: int
    periodic_indices: np.ndarray

    @property
    def wf(self) -> Fraction:
        return Fraction(self.winding, self.length)

    @property
    def per(self) -> int:
        return int(self.periodic_indices.size)

    def to_json(self) -> dict:
        return {
            "ell": self.length,
            "w": self.winding,
            "orbit_count": self.orbit_count,
            "per": self.per,
            "wf": {"num": self.wf.numerator, "den": self.wf.denominator},
        }


def orbit_report(sys: DynSystem, levels: Optional[Levels] = None) -> OrbitReport:
    """Walk every periodic orbit; all of them must share length and winding."""
    if levels is None:
        levels = periodic_and_levels(sys)
    periodic = levels.periodic
    succ = sys.succ.tolist()
    ticks = sys.ticks.tolist()
    seen = set()
    shape = None
    count = 0
    for start in periodic.tolist():
        if start in seen:
            continue
        count += 1
        x, length, total = start, 0, 0
        while True:
            seen.add(x)
            y = succ[x]
            total += (ticks[y] - ticks[x]) % TICKS
            length += 1
            x = y
            if x == start:
                break
            if length > len(succ):
                raise InternalInvariantViolation("periodic walk did not close")
        if sys.n == 1:
            total = 0
        if total % TICKS:
            raise InternalInvariantViolation("cycle tick sum is not a whole number of turns")
        orbit = (length, total // TICKS)
        if shape is None:
            shape = orbit
        elif shape != orbit:
            raise InternalInvariantViolation(f"orbits disagree: {shape} vs {orbit}")
    length, winding = shape
    if winding > 0 and math.gcd(length, winding) != 1:
        raise InternalInvariantViolation("length and winding not coprime")
    if length > 1 and winding >= length:
        raise InternalInvariantViolation("winding must be below length")
    if Fraction(winding, length) >= sys.r.as_fraction():
        raise InternalInvariantViolation("winding fraction must stay below r")
    return OrbitReport(length, winding, count, periodic)


def iterate(succ: np.ndarray, x, k: int):
    """``f^k`` applied to an index or an index array."""
    for _ in range(k):
        x = succ[x]
    return x


def step_sum(sys: DynSystem, x: int, k: int) -> Tuple[int, int]:
    """Total clockwise travel (ticks) of ``k`` steps from ``x`` and the endpoint."""
    ticks = sys.ticks
    total = 0
    for _ in range(k):
        y = int(sys.succ[x])
        total += cw_dist(int(ticks[x]), int(ticks[y]))
        x = y
    return total, x


@dataclass(frozen=True)
class PreimageArc:
    """Cyclic index range ``[start, start + count)``; ``count == n`` is all of X."""

    start: int
    count: int
    n: int

    @property
    def end(self) -> int:
        """First index clockwise after the arc."""
        return (self.start + self.count) % self.n

    def indices(self) -> List[int]:
        return [(self.start + k) % self.n for k in range(self.count)]

    def __bool__(self) -> bool:
        return self.count > 0


def _back(sys: DynSystem, x: int) -> int:
    """Nearest point strictly clockwise after ``x - r``."""
    pos = np.array([sys.ticks[x]], dtype=np.uint64)
    return int(nearest_after_back_shift(sys.ticks, pos, sys.r.threshold)[0])


def preimage_interval(sys: DynSystem, x0: int, i: int) -> PreimageArc:
    """``f^{-i}(x0)`` as the arc ``X ∩ [x_i, y_i)``.

    The arc length is tracked unwrapped, so an arc that swallows the whole
    circle (possible only in tiny degenerate systems) is told apart from an
    empty one.
    """
    n = sys.n
    ticks = sys.ticks
    x, y = x0, (x0 + 1) % n
    length = TICKS if n == 1 else cw_dist(int(ticks[x]), int(ticks[y]))
    for _ in range(i):
        if length == 0 or length >= TICKS:
            break
        nx, ny = _back(sys, x), _back(sys, y)
        length += cw_dist(int(ticks[nx]), int(ticks[x])) - cw_dist(int(ticks[ny]), int(ticks[y]))
        x, y = nx, ny
        if length <= 0:
            if x != y:
                raise InternalInvariantViolation("empty preimage arc with distinct ends")
            length = 0
    if length == 0:
        return PreimageArc(x, 0, n)
    if length >= TICKS:
        return PreimageArc(x, n, n)
    count = (y - x) % n
    if count == 0:
        raise InternalInvariantViolation("nonempty preimage arc with coinciding ends")
    return PreimageArc(x, count, n)


def _scale_ticks(r: Scale) -> Fraction:
    if isinstance(r, Rational):
        return Fraction(r.p * TICKS, r.q)
    return Fraction(r.num)


def gap_sequence(sys: DynSystem, x0: int, i: int) -> Tuple[List[Fraction], List[Fraction]]:
    """Gaps ``z_1..z_{i+1}`` and ``w_1..w_{i+1}`` in (possibly fractional) ticks.

    ``w_j`` is the gap from ``x_{j-1} - r`` to ``x_j`` and ``z_{j+1}`` the gap
    from ``y_{j-1} - r`` to ``y_j``; ``z_1`` is the gap from ``x0`` to its
    clockwise neighbour.
    """
    n = sys.n
    ticks = sys.ticks
    shift = _scale_ticks(sys.r)
    x, y = x0, (x0 + 1) % n
    z = [Fraction(TICKS if n == 1 else cw_dist(int(ticks[x]), int(ticks[y])))]
    w: List[Fraction] = []
    for j in range(1, i + 2):
        nx = _back(sys, x)
        w.append(shift - cw_dist(int(ticks[nx]), int(ticks[x])))
        if j <= i:
            ny = _back(sys, y)
            z.append(shift - cw_dist(int(ticks[ny]), int(ticks[y])))
            y = ny
        x = nx
    return z, w


def level_from_gaps(z: List[Fraction], w: List[Fraction]) -> Optional[int]:
    """Smallest ``k`` with ``w_1+..+w_{k+1} > z_1+..+z_{k+1}``, i.e. the level."""
    sz = sw = 0
    for k, (zk, wk) in enumerate(zip(z, w)):
        sz += zk
        sw += wk
        if sw > sz:
            return k
    return None


def _require_rational(sys: DynSystem) -> Rational:
    if not isinstance(sys.r, Rational):
        raise NotRational("swiftness needs a rational scale p/q")
    return sys.r


def _check_swift_structure(sys: DynSystem, landing: int) -> None:
    r = sys.r
    levels = periodic_and_levels(sys)
    if levels.level[landing] != -1:
        raise InternalInvariantViolation("swift point lands on a non-periodic point")
    rep = orbit_report(sys, levels)
    if rep.orbit_count != 1 or rep.length * r.p - rep.winding * r.q != 1:
        raise InternalInvariantViolation(
            f"swift point without single orbit: orb={rep.orbit_count}, ell={rep.length}, w={rep.winding}"
        )


def is_swift(sys: DynSystem, x: int, i: int, check: bool = True) -> bool:
    """Is ``x`` a ``(q, i)``-swift point?

    The closed walk ``x, f(x), .., f^q(x)`` winds ``p`` times exactly when its
    open ``q``-step travel exceeds ``(p - 1)`` turns.  Then ``x`` must be the
    first point clockwise after the arc ``f^{-i}(f^{q+i}(x))``; an empty arc
    disqualifies ``x``.
    """
    r = _require_rational(sys)
    travel, _ = step_sum(sys, x, r.q)
    if travel >= r.p * TICKS:
        raise InternalInvariantViolation("q steps travelled p turns or more")
    if travel <= (r.p - 1) * TICKS:
        return False
    landing = int(iterate(sys.succ, x, r.q + i))
    arc = preimage_interval(sys, landing, i)
    swift = 0 < arc.count < sys.n and arc.end == x
    if swift and check:
        _check_swift_structure(sys, landing)
    return swift


@dataclass(frozen=True)
class SwiftReport:
    q_swift_indices: np.ndarray
    type_counts: Tuple[int, ...]
    untyped: int
    i_max: int

    @property
    def typed(self) -> int:
        return sum(self.type_counts)

    def to_json(self) -> dict:
        return {
            "q_swift": self.q_swift_indices.tolist(),
            "type_counts": list(self.type_counts),
            "untyped": self.untyped,
            "i_max": self.i_max,
        }


def q_step_winds_p(sys: DynSystem) -> Tuple[np.ndarray, np.ndarray]:
    """For every point: does the closed ``q``-step walk wind ``p`` times; and ``f^q``."""
    r = _require_rational(sys)
    ticks = sys.ticks
    succ = sys.succ
    cur = np.arange(sys.n)
    hi = np.zeros(sys.n, dtype=np.int64)
    lo = np.zeros(sys.n, dtype=np.int64)
    low_mask = np.uint64(0xFFFFFFFF)
    for _ in range(r.q):
        nxt = succ[cur]
        step = ticks[nxt] - ticks[cur]  # modulo 2**64
        hi += (step >> np.uint64(32)).astype(np.int64)
        lo += (step & low_mask).astype(np.int64)
        cur = nxt
    hi += lo >> 32
    lo &= 0xFFFFFFFF
    # travel = hi*2^32 + lo; need travel > (p-1)*2^64
    bar = (r.p - 1) << 32
    winds = (hi > bar) | ((hi == bar) & (lo > 0))
    return winds, cur


def swiftness_types(sys: DynSystem, i_max: int = DEFAULT_I_MAX, levels: Optional[Levels] = None) -> SwiftReport:
    """Swiftness type of every periodic point, for types ``0..i_max``.

    All preimage arcs ``f^{-i}(x0)`` are advanced together, one back-shift per
    type, so the whole table costs ``O(n (q + i_max) log n)``.
    """
    r = _require_rational(sys)
    if levels is None:
        levels = periodic_and_levels(sys)
    n = sys.n
    ticks = sys.ticks
    succ = sys.succ
    winds, landing = q_step_winds_p(sys)
    candidates = np.flatnonzero(winds)

    xs = np.arange(n)
    ys = (xs + 1) % n
    kind = np.full(n, -1, dtype=np.int64)
    counts = []
    q_swift = np.empty(0, dtype=np.int64)
    periodic_mask = levels.level < 0
    for i in range(i_max + 1):
        if i > 0:
            xs = nearest_after_back_shift(ticks, ticks[xs], r.threshold)
            ys = nearest_after_back_shift(ticks, ticks[ys], r.threshold)
            landing = succ[landing]
        # an empty arc, or one covering all of X, has no first point after it
        usable = (ys - xs) % n > 0
        if levels.image_size(i) == 1:
            usable[levels.periodic] = False
        z = landing[candidates]
        hit = usable[z] & (ys[z] == candidates)
        swift = candidates[hit]
        if i == 0:
            q_swift = swift
        marked = z[hit]
        if marked.size and not periodic_mask[marked].all():
            raise InternalInvariantViolation("swift point lands on a non-periodic point")
        fresh = np.unique(marked[kind[marked] < 0])
        kind[fresh] = i
        counts.append(int(fresh.size))
    if (kind >= 0).any():
        rep = orbit_report(sys, levels)
        if rep.orbit_count != 1 or rep.length * r.p - rep.winding * r.q != 1:
            raise InternalInvariantViolation("swift point without a single orbit with ell*p - w*q = 1")
    untyped = int(levels.periodic.size - (kind >= 0).sum())
    return SwiftReport(q_swift, tuple(counts), untyped, i_max)


def make_regular(n: int, k: int) -> DynSystem:
    """``Reg_n^k``: ``n`` equally spaced points, each shifted ``k`` places."""
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    sys = build_map(SampleSet(regular_ticks(n)), Rational.of(2 * k + 1, 2 * n))
    if not np.array_equal(sys.succ, (np.arange(n) + k) % n):
        raise InternalInvariantViolation("regular system did not shift by k")
    return sys
