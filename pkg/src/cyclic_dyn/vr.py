"""Vietoris-Rips complexes of circle samples, reduced to their cores.

For ``r < 1/2`` the complex is the clique complex of the proximity graph, and
each closed neighbourhood is a contiguous cyclic run of points.  Domination in
a clique complex is containment of closed neighbourhoods, so the whole
dismantling runs on interval endpoints and the complex is never built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .circle import HALF, Fixed, Rational, Scale, SampleSet, furthest_in_arc, nearest_after_back_shift
from .errors import ScaleTooLarge


def _check_scale(r: Scale) -> None:
    small = 2 * r.p < r.q if isinstance(r, Rational) else r.num < HALF
    if not small:
        raise ScaleTooLarge(f"r = {r} is not below 1/2")


@dataclass(frozen=True, eq=False)
class ProximityGraph:
    """Closed neighbourhood of vertex ``i`` is ``[lo[i], lo[i] + size[i])`` cyclically."""

    ticks: np.ndarray
    r: Scale
    lo: np.ndarray
    size: np.ndarray

    @property
    def n(self) -> int:
        return int(self.ticks.size)

    def neighbors(self, i: int) -> np.ndarray:
        return (self.lo[i] + np.arange(self.size[i])) % self.n

    def adjacent(self, i: int, j: int) -> bool:
        return (j - self.lo[i]) % self.n < self.size[i]

    def edge_count(self) -> int:
        return int((self.size - 1).sum()) // 2


def _graph_from_ticks(ticks: np.ndarray, r: Scale) -> ProximityGraph:
    hi = furthest_in_arc(ticks, r.threshold)
    lo = nearest_after_back_shift(ticks, ticks, r.threshold)
    size = (hi - lo) % ticks.size + 1
    return ProximityGraph(ticks, r, lo, size)


def build_graph(points: SampleSet, r: Scale) -> ProximityGraph:
    """Proximity graph joining points at circle distance below ``r``."""
    _check_scale(r)
    return _graph_from_ticks(points.ticks, r)


def contained(g: ProximityGraph, x, y):
    """Is ``N[x]`` a subset of ``N[y]``?  Works elementwise on index arrays."""
    n = g.n
    full_y = g.size[y] == n
    off = (g.lo[x] - g.lo[y]) % n
    return full_y | ((g.size[x] < n) & (off + g.size[x] <= g.size[y]))


def dominated_by_any(g: ProximityGraph, x: int) -> Optional[int]:
    """Some ``y != x`` with ``N[x] ⊆ N[y]``, or ``None``."""
    nb = g.neighbors(x)
    nb = nb[nb != x]
    if nb.size == 0:
        return None
    ok = contained(g, np.full(nb.size, x), nb)
    hits = nb[ok]
    return int(hits[0]) if hits.size else None


def _greedy_batch(g: ProximityGraph, order: Sequence[int]) -> np.ndarray:
    """Dominated vertices removable together: no member witnesses another."""
    batch, witnesses = set(), set()
    for x in order:
        if x in witnesses:
            continue
        nb = g.neighbors(x)
        nb = nb[(nb != x)]
        if nb.size == 0:
            continue
        ok = contained(g, np.full(nb.size, x), nb)
        for y in nb[ok].tolist():
            if y not in batch:
                batch.add(x)
                witnesses.add(y)
                break
    return np.array(sorted(batch), dtype=np.int64)


def _non_image_batch(g: ProximityGraph) -> np.ndarray:
    """Vertices outside the image of ``f_r`` that their next image vertex dominates."""
    n = g.n
    succ = furthest_in_arc(g.ticks, g.r.threshold)
    in_image = np.zeros(n, dtype=bool)
    in_image[succ] = True
    outside = np.flatnonzero(~in_image)
    if outside.size == 0:
        return outside
    image = np.flatnonzero(in_image)
    nxt = image[np.searchsorted(image, outside) % image.size]
    return outside[contained(g, outside, nxt)]


def dismantle_to_core(g: ProximityGraph, order: Optional[Sequence[int]] = None) -> np.ndarray:
    """Remove dominated vertices until none is left; return surviving indices.

    By default vertices outside the image of ``f_r`` go first, each checked
    against the image vertex following it.  A generic greedy scan (in the given
    ``order``, or index order) runs whenever that shortcut finds nothing, and
    the loop ends only after the generic scan confirms no vertex is dominated.
    With ``order`` given, only the generic scan is used.
    """
    pos = np.arange(g.n) if order is None else _positions(order, g.n)
    alive = np.arange(g.n)
    sub = g
    while True:
        drop = np.empty(0, dtype=np.int64)
        if order is None:
            drop = _non_image_batch(sub)
        if drop.size == 0:
            drop = _greedy_batch(sub, np.argsort(pos[alive]).tolist())
        if drop.size == 0:
            return alive
        keep = np.ones(sub.n, dtype=bool)
        keep[drop] = False
        alive = alive[keep]
        sub = _graph_from_ticks(g.ticks[alive], g.r)


def _positions(order: Sequence[int], n: int) -> np.ndarray:
    """Position of each original vertex within ``order``."""
    pos = np.empty(n, dtype=np.int64)
    pos[np.asarray(order, dtype=np.int64)] = np.arange(n)
    return pos


def is_minimal(g: ProximityGraph, core: np.ndarray) -> bool:
    sub = _graph_from_ticks(g.ticks[core], g.r)
    return all(dominated_by_any(sub, x) is None for x in range(sub.n))


@dataclass(frozen=True)
class HomotopyType:
    kind: str  # "odd_sphere" or "wedge"
    dim: int
    copies: int = 1

    def __str__(self) -> str:
        if self.kind == "odd_sphere":
            return f"S^{self.dim}"
        if self.copies == 0:
            return "point"
        return f"wedge^{self.copies} S^{self.dim}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "copies": self.copies}


def classify_homotopy(ell: int, w: int, orb: int) -> HomotopyType:
    """Homotopy type of the complex from the winding fraction ``w/ell``."""
    wf = Fraction(w, ell)
    if wf >= Fraction(1, 2):
        raise ValueError("winding fraction must be below 1/2")
    if wf.denominator == 2 * wf.numerator + 1:
        l = wf.numerator
        return HomotopyType("wedge", 2 * l, orb - 1)
    l = math.ceil(wf / (1 - 2 * wf)) - 1
    assert Fraction(l, 2 * l + 1) < wf < Fraction(l + 1, 2 * l + 3)
    return HomotopyType("odd_sphere", 2 * l + 1)


def expected_sphere_dimension(r: Scale) -> int:
    _check_scale(r)
    x = r.as_fraction()
    return 2 * math.ceil(x / (1 - 2 * x)) - 1


def analyze(points: SampleSet, r: Scale) -> dict:
    """Core and homotopy type of the complex at scale ``r``."""
    from .circle import build_map
    from .dynamics import orbit_report

    g = build_graph(points, r)
    core = dismantle_to_core(g)
    rep = orbit_report(build_map(points, r))
    htype = classify_homotopy(rep.length, rep.winding, rep.orbit_count)
    return {
        "n": points.n,
        "r": r.to_json(),
        "core_size": int(core.size),
        "core_is_periodic_set": bool(np.array_equal(core, rep.periodic_indices)),
        "ell": rep.length,
        "w": rep.winding,
        "orb": rep.orbit_count,
        "homotopy": htype.to_json(),
        "homotopy_str": str(htype),
    }
