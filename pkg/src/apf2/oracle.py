"""Brute-force ground truth at tiny n.

Everything here recomputes results of the fast modules through a separate
arithmetic path (direct sums, Python set arithmetic, recursive search), so
agreement is meaningful evidence.  Caps are deliberate: these are oracles,
not production routines.
"""
from __future__ import annotations

from itertools import combinations

from .f2core import PointSet, Subspace, AffineSubspace
from .fourier import RealTable

import numpy as np

NAIVE_CONV_CAP = 12
SUMSET_CAP = 16
SUBSPACE_SEARCH_CAP = 8


def naive_convolve(f: RealTable, g: RealTable) -> RealTable:
    """f*g by the direct double sum, O(4^n)."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    if f.n > NAIVE_CONV_CAP:
        raise ValueError(f"naive convolution capped at n = {NAIVE_CONV_CAP}")
    size = 1 << f.n
    idx = np.arange(size, dtype=np.int64)
    out = np.empty(size)
    for x in range(size):
        out[x] = np.dot(f.values, g.values[x ^ idx]) / size
    return RealTable(f.n, out)


def exact_sumset(a: PointSet, k: int) -> PointSet:
    """kA by iterated Minkowski sums over Python sets."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if a.n > SUMSET_CAP or (a.n > 10 and k > 4):
        raise ValueError("exact sumset capped")
    base = [int(p) for p in a.points()]
    acc = set(base)
    for _ in range(k - 1):
        acc = {s ^ p for s in acc for p in base}
    return PointSet.from_points(a.n, acc)


def rho_by_counting(a: PointSet, b: PointSet, y: int) -> float:
    """|(y+A) cap B| / |A| by direct counting."""
    pts = a.points()
    return float(np.count_nonzero(b.mask[pts ^ y])) / len(pts)


def _span_points(basis: list[int]) -> set[int]:
    pts = {0}
    for b in basis:
        pts |= {p ^ b for p in pts}
    return pts


def _coset_min(x: int, span_pts: set[int]) -> bool:
    # x is the canonical representative of its coset modulo the current span
    return all(x <= (x ^ s) for s in span_pts)


def max_subspace_in_set(s: PointSet, d_max: int | None = None) -> Subspace:
    """A maximum-dimension linear subspace contained in S.

    Recursive basis extension: a candidate extends the basis only if it is
    the minimum of its coset (so each subspace is visited once) and the
    whole extended span stays inside S.  Ties in dimension resolve to the
    lexicographically smallest basis, which the canonical-coset ordering
    yields automatically.
    """
    if not s.contains(0):
        raise ValueError("a linear subspace needs 0 in the set")
    if d_max is None:
        d_max = s.n
    if s.n > SUBSPACE_SEARCH_CAP and d_max > 4:
        raise ValueError("subspace search capped")
    members = [int(p) for p in s.points() if p != 0]
    member_set = set(members) | {0}
    limit = min(d_max, s.size.bit_length() - 1)
    best: list[int] = []

    def extend(basis: list[int], span_pts: set[int], start: int):
        nonlocal best
        if len(basis) > len(best):
            best = list(basis)
        if len(basis) == limit:
            return
        for i in range(start, len(members)):
            v = members[i]
            if v in span_pts or not _coset_min(v, span_pts):
                continue
            shifted = {p ^ v for p in span_pts}
            if not shifted <= member_set:
                continue
            extend(basis + [v], span_pts | shifted, i + 1)
            if len(best) == limit:
                return

    extend([], {0}, 0)
    return Subspace.from_span(s.n, best)


def max_affine_subspace_in_set(s: PointSet, d_max: int | None = None) -> AffineSubspace:
    """A maximum-dimension coset contained in S (shift enumeration x 2^n)."""
    if s.size == 0:
        raise ValueError("empty set")
    idx = np.arange(1 << s.n, dtype=np.int64)
    best: AffineSubspace | None = None
    for shift in (int(p) for p in s.points()):
        shifted = PointSet(s.n, s.mask[idx ^ shift])
        v = max_subspace_in_set(shifted, d_max)
        cand = AffineSubspace(shift, v)
        if best is None or cand.dim > best.dim:
            best = cand
            if d_max is not None and best.dim >= d_max:
                break
    assert best is not None
    return best


def max_subspace_by_combinations(s: PointSet, d: int) -> Subspace | None:
    """Second, independent search used to cross-validate the recursive one:
    try every d-subset of S as a basis."""
    members = [int(p) for p in s.points() if p != 0]
    member_set = set(members) | {0}
    best: Subspace | None = None
    for cand in combinations(members, d):
        pts = _span_points(list(cand))
        if len(pts) == 1 << d and pts <= member_set:
            sub = Subspace.from_span(s.n, cand)
            if best is None or sub.perp_basis < best.perp_basis:
                best = sub
    return best
