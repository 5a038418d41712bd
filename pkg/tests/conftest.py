"""Shared brute-force oracles and hypothesis strategies."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import strategies as st

from cyclic_dyn.circle import TICKS, Rational, SampleSet, arc_contains, cw_dist

ACCEPTANCE_LINES: list[str] = []


def brute_succ(ticks, r) -> list[int]:
    """Definitional ``f_r``: the point of ``[x, x+r)`` at greatest clockwise distance."""
    ticks = [int(t) for t in ticks]
    out = []
    for x in ticks:
        best, best_d = None, -1
        for j, y in enumerate(ticks):
            if arc_contains(x, r, y) and cw_dist(x, y) > best_d:
                best, best_d = j, cw_dist(x, y)
        out.append(best)
    return out


def image_peeling(succ) -> tuple[list[int], set[int]]:
    """Level counts via literal image iteration ``S_{k+1} = f(S_k)``."""
    cur = set(range(len(succ)))
    counts = []
    while True:
        nxt = {succ[x] for x in cur}
        if nxt == cur:
            return counts, cur
        counts.append(len(cur - nxt))
        cur = nxt


def naive_periodic(succ) -> set[int]:
    n = len(succ)
    periodic = set()
    for x in range(n):
        y = succ[x]
        for _ in range(n):
            if y == x:
                periodic.add(x)
                break
            y = succ[y]
    return periodic


def naive_orbits(succ) -> list[list[int]]:
    seen, orbits = set(), []
    for x in sorted(naive_periodic(succ)):
        if x in seen:
            continue
        orbit, y = [x], succ[x]
        while y != x:
            orbit.append(y)
            y = succ[y]
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def enumerate_paths(ups: int, downs: int, h: int) -> int:
    """Build every admissible step sequence explicitly, depth first."""
    found = []

    def walk(seq, y, u, d):
        if u == 0 and d == 0:
            found.append(tuple(seq))
            return
        for step, left in ((1, u), (-1, d)):
            if left and 0 <= y + step <= h:
                seq.append(step)
                walk(seq, y + step, u - (step == 1), d - (step == -1))
                seq.pop()

    walk([], 0, ups, downs)
    assert len(set(found)) == len(found)
    return len(found)


@st.composite
def rationals(draw, max_q: int = 8):
    q = draw(st.integers(1, max_q))
    p = draw(st.integers(1, q).filter(lambda p: math.gcd(p, q) == 1))
    return Rational(p, q)


@st.composite
def sample_sets(draw, min_n: int = 1, max_n: int = 40):
    """Mix of free 64-bit ticks and ticks on a coarse grid, where arc boundaries bite."""
    grid = draw(st.booleans())
    if grid:
        shift = draw(st.sampled_from([56, 58, 60]))
        base = st.integers(0, (TICKS >> shift) - 1).map(lambda k: k << shift)
        elems = st.one_of(base, base.map(lambda t: (t + 1) % TICKS), base.map(lambda t: (t - 1) % TICKS))
    else:
        elems = st.integers(0, TICKS - 1)
    ticks = draw(st.sets(elems, min_size=min_n, max_size=max_n))
    return SampleSet.from_ticks(ticks)


def random_small_system(rng: np.random.Generator, max_n: int = 100):
    """Random sample set (n <= max_n) and a rational scale with small q."""
    n = int(rng.integers(1, max_n + 1))
    if rng.random() < 0.5:
        ticks = rng.choice(1 << 12, size=min(n, 1 << 12), replace=False).astype(np.uint64) << np.uint64(52)
    else:
        ticks = rng.integers(0, 1 << 64, size=n, dtype=np.uint64)
    q = int(rng.integers(1, 9))
    p = int(rng.choice([p for p in range(1, q + 1) if math.gcd(p, q) == 1]))
    return SampleSet.from_ticks(ticks.tolist()), Rational(p, q)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
