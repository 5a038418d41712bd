"""Catalan-type counts and the exact asymptotic fractions built from them.

All values are Python integers or :class:`fractions.Fraction`; nothing here
touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Literal

from .circle import Fixed, Rational, Scale

Family = Literal["C", "C'", "plainC"]


def catalan(i: int) -> int:
    if i < 0:
        raise ValueError("order must be >= 0")
    return comb(2 * i, i) // (i + 1)


def _bounded_paths(ups: int, downs: int, h: int) -> int:
    """Lattice paths of ``ups`` up- and ``downs`` down-steps inside ``[0, h]``."""
    if h < 0:
        return 0
    ways = [0] * (h + 1)
    ways[0] = 1
    for step in range(ups + downs):
        nxt = [0] * (h + 1)
        for y, c in enumerate(ways):
            if not c:
                continue
            if y < h:
                nxt[y + 1] += c
            if y > 0:
                nxt[y - 1] += c
        ways = nxt
    end = ups - downs
    return ways[end] if 0 <= end <= h else 0


@lru_cache(maxsize=None)
def catalan_bounded(i: int, h: int) -> int:
    """``C_{i,h}``: Dyck paths of order ``i`` with height at most ``h``.

    ``h = -1`` (the value ``q - 2`` for ``r = 1``) admits no path at all.
    """
    if i < 0:
        raise ValueError("order must be >= 0")
    return _bounded_paths(i, i, h)


@lru_cache(maxsize=None)
def catalan_prime(i: int, h: int) -> int:
    """``C'_{i,h}``: paths with ``i + h`` up- and ``i`` down-steps inside ``[0, h]``."""
    if i < 0:
        raise ValueError("order must be >= 0")
    return _bounded_paths(i + h, i, h)


def gf_quarter_closed(h: int, family: Family) -> Fraction:
    if family == "plainC":
        return Fraction(2)
    if family == "C":
        return Fraction(2 * (h + 1), h + 2)
    if family == "C'":
        return Fraction(2 ** (h + 1), h + 2)
    raise ValueError(f"unknown family {family!r}")


def gf_quarter_recurrence(h: int, family: Family) -> Fraction:
    """``C_h(x) = 1/(1 - x C_{h-1}(x))``, ``C'_h = C'_{h-1} C_h`` at ``x = 1/4``."""
    x = Fraction(1, 4)
    if family == "plainC":
        # C(x) = 2 / (1 + sqrt(1 - 4x)); the root vanishes at x = 1/4
        return Fraction(2, 1)
    c = prime = Fraction(1)
    for _ in range(h):
        c = 1 / (1 - x * c)
        prime *= c
    if family == "C":
        return c
    if family == "C'":
        return prime
    raise ValueError(f"unknown family {family!r}")


def chebyshev_u_at_one(h: int) -> int:
    """``U_h(1)`` from ``U_0 = 1, U_1 = 2x, U_h = 2x U_{h-1} - U_{h-2}``."""
    prev, cur = 1, 2
    if h == 0:
        return prev
    for _ in range(h - 1):
        prev, cur = cur, 2 * cur - prev
    return cur


def gf_quarter_chebyshev(h: int, family: Family) -> Fraction:
    """``C_h(x) = U_h(1/(2 sqrt x)) / (sqrt x U_{h+1}(1/(2 sqrt x)))`` at ``x = 1/4``."""
    root = Fraction(1, 2)
    if family == "plainC":
        return Fraction(2)

    def bounded(k: int) -> Fraction:
        return Fraction(chebyshev_u_at_one(k)) / (root * chebyshev_u_at_one(k + 1))

    if family == "C":
        return bounded(h)
    if family == "C'":
        out = Fraction(1)
        for k in range(1, h + 1):
            out *= bounded(k)
        return out
    raise ValueError(f"unknown family {family!r}")


def gf_quarter(h: int, family: Family) -> Fraction:
    """Generating function value at 1/4, checked three independent ways."""
    if h < 0:
        raise ValueError("height must be >= 0")
    closed = gf_quarter_closed(h, family)
    rec = gf_quarter_recurrence(h, family)
    cheb = gf_quarter_chebyshev(h, family)
    if not closed == rec == cheb:
        raise ArithmeticError(f"generating function mismatch at h={h}: {closed}, {rec}, {cheb}")
    return closed


def predicted_level_fraction(i: int, r: Scale) -> Fraction:
    """Limit of ``E[lev_i] / n``."""
    if i < 0:
        raise ValueError("level must be >= 0")
    if isinstance(r, Fixed):
        return Fraction(catalan(i), 2 ** (2 * i + 1))
    return Fraction(catalan_bounded(i, r.q - 2), 2 ** (2 * i + 1))


def predicted_swift_fraction(i: int, p: int, q: int) -> Fraction:
    """Limit of ``E[swi_i] / n`` for ``r = p/q``.

    For ``q = 1`` every point is ``(1, 0)``-swift and lands on a distinct
    periodic point, so all mass sits at type 0.
    """
    if i < 0:
        raise ValueError("type must be >= 0")
    Rational(p, q)  # validates coprimality and range
    if q == 1:
        return Fraction(1 if i == 0 else 0)
    return Fraction(catalan_prime(i, q - 2), 2 ** (2 * i + q - 1))


def predicted_periodic_fraction(r: Scale) -> Fraction:
    if isinstance(r, Fixed):
        return Fraction(0)
    return Fraction(1, r.q)


def level_mass_limit(r: Scale) -> Fraction:
    """Total level mass: ``1`` for irrational-like ``r``, ``(q-1)/q`` for ``p/q``."""
    if isinstance(r, Fixed):
        return gf_quarter(0, "plainC") / 2
    if r.q == 1:
        return Fraction(0)
    return gf_quarter(r.q - 2, "C") / 2


def swift_mass_limit(q: int) -> Fraction:
    if q == 1:
        return Fraction(1)
    return gf_quarter(q - 2, "C'") / 2 ** (q - 1)


def theory_table(r: Scale, i_max: int) -> Dict[str, object]:
    """Exact predictions up to ``i_max``, as used by the CLI and reports."""
    levels: List[Fraction] = [predicted_level_fraction(i, r) for i in range(i_max + 1)]
    table: Dict[str, object] = {
        "levels": levels,
        "periodic": predicted_periodic_fraction(r),
        "level_mass": level_mass_limit(r),
    }
    if isinstance(r, Rational):
        table["swift"] = [predicted_swift_fraction(i, r.p, r.q) for i in range(i_max + 1)]
        table["swift_mass"] = swift_mass_limit(r.q)
    return table
