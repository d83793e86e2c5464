"""GF(2) vectors, subspaces and point sets over F_2^n.

Points of F_2^n are plain Python ints (bit i = coordinate i), so addition
is ``^`` and the dot product is the parity of ``&``.  Containers carry the
ambient dimension n and validate points against it.  All bases are kept in
reduced row-echelon form with the pivot of each row at its highest set bit
and rows sorted descending, which makes equal subspaces structurally equal.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_DIM = 30          # bit-packed desk-scale cap for a single point
TABLE_DIM = 24        # largest n for which full 2^n tables/enumerations are allowed

# A point of F_2^n is a nonnegative int below 2^n; bit i is coordinate i.
BitVector = int


class EnumerationCapExceeded(RuntimeError):
    """Raised when a full enumeration would exceed the configured cap."""


def check_dim(n: int) -> int:
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {n}")
    return n


def check_point(x: int, n: int) -> int:
    if x < 0 or x >> n:
        raise ValueError(f"point {x:#x} has bits beyond dimension {n}")
    return x


def parity(x: int) -> int:
    return x.bit_count() & 1


def dot(x: int, y: int, n: int | None = None) -> int:
    """Dot product over GF(2): parity of the coordinatewise AND."""
    if n is not None:
        check_point(x, n)
        check_point(y, n)
    return (x & y).bit_count() & 1


def parity_u64(a: np.ndarray) -> np.ndarray:
    """Vectorised parity of popcount for an integer ndarray."""
    return (np.bitwise_count(a) & 1).astype(np.uint8)


def echelonize(vectors: Iterable[int], n: int) -> tuple[int, ...]:
    """Reduced row-echelon basis of the span of ``vectors``.

    Pivots sit at the highest set bit of each row; every pivot bit occurs in
    exactly one row; rows are returned sorted descending.  The length of the
    result is the rank.
    """
    check_dim(n)
    pivots: dict[int, int] = {}
    for v in vectors:
        v = check_point(int(v), n)
        for p, row in pivots.items():
            if (v >> p) & 1:
                v ^= row
        if v:
            p = v.bit_length() - 1
            for q in list(pivots):
                if (pivots[q] >> p) & 1:
                    pivots[q] ^= v
            pivots[p] = v
    return tuple(sorted(pivots.values(), reverse=True))


def nullspace_basis(vectors: Sequence[int], n: int) -> tuple[int, ...]:
    """Canonical basis of {v : v.b = 0 for every b in span(vectors)}."""
    rows = echelonize(vectors, n)
    pivot_bits = {r.bit_length() - 1 for r in rows}
    free_bits = [i for i in range(n) if i not in pivot_bits]
    out = []
    for f in free_bits:
        v = 1 << f
        for r in rows:
            if (r >> f) & 1:
                v |= 1 << (r.bit_length() - 1)
        out.append(v)
    return echelonize(out, n)


def span_contains(basis: Sequence[int], x: int) -> bool:
    """Membership of x in the span of an echelonized basis."""
    for row in basis:
        if x.bit_length() == row.bit_length():
            x ^= row
    return x == 0


def expand_span(basis: Sequence[int], cap: int = TABLE_DIM) -> np.ndarray:
    """All 2^rank points of the span (subset-XOR order)."""
    if len(basis) > cap:
        raise EnumerationCapExceeded(
            f"span enumeration of dimension {len(basis)} exceeds cap {cap}")
    pts = np.zeros(1, dtype=np.int64)
    for b in basis:
        pts = np.concatenate([pts, pts ^ b])
    return pts


@dataclass(frozen=True)
class Subspace:
    """A linear subspace V of F_2^n, stored through a basis of its
    orthogonal complement (codim(V) = len(perp_basis))."""

    n: int
    perp_basis: tuple[int, ...]

    def __post_init__(self):
        check_dim(self.n)
        if tuple(echelonize(self.perp_basis, self.n)) != tuple(self.perp_basis):
            raise ValueError("perp_basis must be an echelonized independent set")

    @classmethod
    def from_perp_vectors(cls, n: int, vectors: Iterable[int]) -> "Subspace":
        """V = {v : v.t = 0 for all t in vectors} (vectors need not be a basis)."""
        return cls(n, echelonize(vectors, n))

    @classmethod
    def from_span(cls, n: int, vectors: Iterable[int]) -> "Subspace":
        """V = span(vectors)."""
        return cls(n, nullspace_basis(list(vectors), n))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, echelonize([1 << i for i in range(n)], n))

    @property
    def codim(self) -> int:
        return len(self.perp_basis)

    @property
    def dim(self) -> int:
        return self.n - len(self.perp_basis)

    def contains(self, x: int) -> bool:
        check_point(x, self.n)
        return all((x & b).bit_count() & 1 == 0 for b in self.perp_basis)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        ok = np.ones(len(pts), dtype=bool)
        for b in self.perp_basis:
            ok &= parity_u64(np.asarray(pts) & b) == 0
        return ok

    def span_basis(self) -> tuple[int, ...]:
        """Canonical basis of V itself."""
        return nullspace_basis(self.perp_basis, self.n)

    def orthogonal_complement(self) -> "Subspace":
        return Subspace(self.n, self.span_basis())

    def to_json_dict(self) -> dict:
        return {"n": self.n, "perp_basis": [f"{b:#x}" for b in self.perp_basis]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Subspace":
        return cls(int(d["n"]), tuple(int(b, 16) for b in d["perp_basis"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def orthogonal_complement(s: Subspace) -> Subspace:
    return s.orthogonal_complement()


@dataclass(frozen=True)
class AffineSubspace:
    """A coset shift + V.  The shift is reduced to the canonical coset
    representative so that equal cosets compare equal."""

    shift: int
    linear: Subspace

    def __post_init__(self):
        check_point(self.shift, self.linear.n)
        reduced = self.shift
        for row in self.linear.span_basis():
            if reduced.bit_length() == row.bit_length():
                reduced ^= row
        object.__setattr__(self, "shift", reduced)

    @property
    def n(self) -> int:
        return self.linear.n

    @property
    def dim(self) -> int:
        return self.linear.dim

    def contains(self, x: int) -> bool:
        return self.linear.contains(x ^ self.shift)

    def to_json_dict(self) -> dict:
        return {"shift": f"{self.shift:#x}", "linear": self.linear.to_json_dict()}


def enumerate_points(v: Subspace | AffineSubspace, cap: int = TABLE_DIM) -> np.ndarray:
    """All 2^dim points of a (affine) subspace; raises beyond the cap."""
    if isinstance(v, AffineSubspace):
        return enumerate_points(v.linear, cap) ^ v.shift
    return expand_span(v.span_basis(), cap)


class PointSet:
    """A subset A of F_2^n held as a dense boolean table over all 2^n points."""

    def __init__(self, n: int, mask: np.ndarray):
        check_dim(n)
        if n > TABLE_DIM:
            raise EnumerationCapExceeded(f"dense PointSet needs n <= {TABLE_DIM}")
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (1 << n,):
            raise ValueError(f"mask must have shape ({1 << n},)")
        self.n = n
        self.mask = mask
        self._points: np.ndarray | None = None
        self._doubling: float | None = None

    @classmethod
    def from_points(cls, n: int, points: Iterable[int]) -> "PointSet":
        mask = np.zeros(1 << n, dtype=bool)
        for p in points:
            mask[check_point(int(p), n)] = True
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "PointSet":
        return cls(n, np.ones(1 << n, dtype=bool))

    @classmethod
    def from_subspace(cls, v: Subspace | AffineSubspace) -> "PointSet":
        n = v.n
        return cls.from_points(n, enumerate_points(v))

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def density(self) -> float:
        return self.size / self.mask.size

    def points(self) -> np.ndarray:
        if self._points is None:
            self._points = np.flatnonzero(self.mask).astype(np.int64)
        return self._points

    def contains(self, x: int) -> bool:
        return bool(self.mask[check_point(x, self.n)])

    def shift_by(self, s: int) -> "PointSet":
        idx = np.arange(1 << self.n, dtype=np.int64)
        return PointSet(self.n, self.mask[idx ^ check_point(s, self.n)])

    def add(self, other: "PointSet") -> "PointSet":
        """Minkowski sum A + B (sets of all pairwise XORs)."""
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        small, big = (self, other) if self.size <= other.size else (other, self)
        idx = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=bool)
        for a in small.points():
            out |= big.mask[idx ^ a]
        return PointSet(self.n, out)

    def iterated_sum(self, k: int) -> "PointSet":
        """kA = A + ... + A (k summands, k >= 1), by repeated doubling."""
        if k < 1:
            raise ValueError("k must be >= 1")
        result: PointSet | None = None
        power = self
        while k:
            if k & 1:
                result = power if result is None else result.add(power)
            k >>= 1
            if k:
                power = power.add(power)
        assert result is not None
        return result

    @property
    def doubling_constant(self) -> float:
        """K = |A + A| / |A|."""
        if self._doubling is None:
            if self.size == 0:
                raise ValueError("doubling constant of the empty set")
            self._doubling = self.add(self).size / self.size
        return self._doubling

    def __eq__(self, other) -> bool:
        return (isinstance(other, PointSet) and other.n == self.n
                and bool(np.array_equal(other.mask, self.mask)))

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter(int(p) for p in self.points())

    def __repr__(self) -> str:
        return f"PointSet(n={self.n}, size={self.size})"

    # -- file formats: packed bitmap with an 8-byte header, or hex lines --

    def to_bitmap_bytes(self) -> bytes:
        header = int(self.n).to_bytes(8, "little")
        return header + np.packbits(self.mask, bitorder="little").tobytes()

    @classmethod
    def from_bitmap_bytes(cls, raw: bytes) -> "PointSet":
        n = int.from_bytes(raw[:8], "little")
        check_dim(n)
        bits = np.unpackbits(np.frombuffer(raw[8:], dtype=np.uint8),
                             count=1 << n, bitorder="little")
        return cls(n, bits.astype(bool))

    def to_hex_lines(self) -> str:
        return "\n".join(f"{p:x}" for p in self.points()) + "\n"

    @classmethod
    def from_hex_lines(cls, n: int, text: str) -> "PointSet":
        pts = [int(line, 16) for line in text.split() if line.strip()]
        return cls.from_points(n, pts)
