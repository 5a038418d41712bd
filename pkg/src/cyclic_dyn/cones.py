"""Cones of gap vectors and their exponential integrals.

A vector ``u = (z_1..z_m, w_1..w_m)`` lies in a cone when each listed
prefix-sum inequality ``H(j, k): z_1+..+z_j >= w_1+..+w_k`` holds (or its
strict negation, for negated entries).  The integral of ``exp(-|u|_1)`` over
such a cone is the probability that iid standard exponentials land in it, so it
can be estimated by sampling or computed exactly by counting linear extensions
of the prefix-sum chains.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Literal, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, MissingQ, TooLarge

ConeFamily = Literal["K", "Kq", "S"]
MAX_EXACT_HALF = 12


@dataclass(frozen=True)
class ConeSpec:
    half_z: int
    inequalities: Tuple[Tuple[int, int, bool], ...]  # (j, k, negated)

    def __post_init__(self):
        for j, k, _ in self.inequalities:
            if not (1 <= j <= self.half_z and 1 <= k <= self.half_z):
                raise ValueError(f"H({j},{k}) out of range for half dimension {self.half_z}")

    @property
    def dim(self) -> int:
        return 2 * self.half_z

    def constraint_set(self) -> frozenset:
        return frozenset(self.inequalities)


def build_cone(family: ConeFamily, i: int, q: Optional[int] = None) -> ConeSpec:
    if i < 0:
        raise ValueError("i must be >= 0")
    if family != "K":
        if q is None:
            raise MissingQ(f"family {family} needs q")
        if q < 2:
            raise ValueError("q must be >= 2")
    ineqs: List[Tuple[int, int, bool]] = []
    if family in ("K", "Kq"):
        ineqs += [(j, j, False) for j in range(1, i + 1)]
        ineqs.append((i + 1, i + 1, True))
        if family == "Kq":
            ineqs += [(j, j + q - 2, True) for j in range(1, i - q + 3)]
        return ConeSpec(i + 1, tuple(dict.fromkeys(ineqs)))
    if family == "S":
        top = i + q - 1
        ineqs += [(j, j, False) for j in range(1, top + 1)]
        ineqs += [(j, j + q - 2, True) for j in range(1, i + 1)]
        ineqs.append((i + 1, top, False))
        return ConeSpec(top, tuple(dict.fromkeys(ineqs)))
    raise ValueError(f"unknown cone family {family!r}")


def _holds(zsum, wsum, j: int, k: int, negated: bool):
    lhs, rhs = zsum[..., j - 1], wsum[..., k - 1]
    return lhs < rhs if negated else lhs >= rhs


def contains(spec: ConeSpec, u) -> bool:
    u = np.asarray(u, dtype=float)
    if u.shape != (spec.dim,):
        raise DimensionMismatch(f"expected length {spec.dim}, got {u.shape}")
    zsum = np.cumsum(u[: spec.half_z])
    wsum = np.cumsum(u[spec.half_z:])
    return all(bool(_holds(zsum, wsum, j, k, neg)) for j, k, neg in spec.inequalities)


def contains_many(spec: ConeSpec, u: np.ndarray) -> np.ndarray:
    zsum = np.cumsum(u[:, : spec.half_z], axis=1)
    wsum = np.cumsum(u[:, spec.half_z:], axis=1)
    inside = np.ones(u.shape[0], dtype=bool)
    for j, k, neg in spec.inequalities:
        inside &= _holds(zsum, wsum, j, k, neg)
    return inside


def exponentials(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard exponentials by inverse CDF from 64-bit uniforms.

    ``1 - U`` is taken from the top 53 bits plus one, so it lies in
    ``(0, 1]`` and the logarithm never sees zero.
    """
    raw = rng.integers(0, 1 << 64, size=shape, dtype=np.uint64)
    one_minus_u = ((raw >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0 ** -53
    return -np.log(one_minus_u)


@dataclass(frozen=True)
class MCResult:
    estimate: float
    se: float
    samples: int
    hits: int

    def to_json(self) -> dict:
        return {"est": self.estimate, "se": self.se, "samples": self.samples, "hits": self.hits}


CHUNK = 1 << 16


def mc_integral(spec: ConeSpec, samples: int, seed: int = 0, workers: int = 1) -> MCResult:
    """Hit fraction of iid exponential vectors, with binomial standard error.

    Samples are cut into fixed chunks, each with its own spawned stream, and
    hit counts are summed as integers, so the result does not depend on
    ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(job):
        size, ss = job
        u = exponentials(np.random.default_rng(ss), (size, spec.dim))
        return int(contains_many(spec, u).sum())

    jobs = list(zip(sizes, streams))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, jobs))
    else:
        hits = sum(map(run, jobs))
    est = hits / samples
    se = float(np.sqrt(est * (1 - est) / samples))
    return MCResult(est, se, samples, hits)


def _chain_relations(spec: ConeSpec):
    """Order constraints between prefix sums ``s_j`` (of z) and ``t_k`` (of w).

    ``after[j]`` lists the ``t`` indices that must precede ``s_j``;
    ``before[j]`` those that must follow it (strict, from negated entries).
    """
    m = spec.half_z
    after = {j: set() for j in range(1, m + 1)}
    before = {j: set() for j in range(1, m + 1)}
    for j, k, neg in spec.inequalities:
        (before if neg else after)[j].add(k)
    return after, before


def linear_extensions(spec: ConeSpec):
    """Yield every interleaving of ``s_1<..<s_m`` and ``t_1<..<t_m`` obeying the cone.

    Each is a tuple of ``('s', j)`` / ``('t', k)`` labels, smallest first.
    """
    m = spec.half_z
    after, before = _chain_relations(spec)
    order: List[Tuple[str, int]] = []

    def extend(a: int, b: int):
        if a == m and b == m:
            yield tuple(order)
            return
        if a < m:
            j = a + 1
            # s_j needs every t it dominates already placed, and none it must precede
            if max(after[j], default=0) <= b and min(before[j], default=m + 1) > b:
                order.append(("s", j))
                yield from extend(a + 1, b)
                order.pop()
        if b < m:
            k = b + 1
            # t_k may not come before an unplaced s_j that must precede it
            if all(k not in before[j] for j in range(a + 1, m + 1)):
                order.append(("t", k))
                yield from extend(a, b + 1)
                order.pop()

    yield from extend(0, 0)


def exact_integral(spec: ConeSpec) -> Fraction:
    """Sum, over compatible total orders, of ``I(2m, pos) = 2^-pos``.

    ``pos`` is the 1-based rank of whichever of ``s_m``, ``t_m`` is not the
    overall maximum: the integrand after the prefix-sum change of variables is
    ``exp(-s_m - t_m)``.
    """
    if spec.half_z > MAX_EXACT_HALF:
        raise TooLarge(f"half dimension {spec.half_z} > {MAX_EXACT_HALF}")
    m = spec.half_z
    total = Fraction(0)
    for ext in linear_extensions(spec):
        top = ext[-1]
        other = ("t", m) if top == ("s", m) else ("s", m)
        total += Fraction(1, 2 ** (ext.index(other) + 1))
    return total


def count_extensions(spec: ConeSpec) -> int:
    return sum(1 for _ in linear_extensions(spec))
