"""Exact Fourier analysis on F_2^n.

Transforms use the expectation/sum normalization pair

    fhat(t) = E_x f(x) (-1)^{x.t},      f(x) = sum_t fhat(t) (-1)^{x.t},

so Parseval reads E_x f(x)g(x) = sum_t fhat(t) ghat(t) and the transform of
a convolution f*g(x) = E_y f(y) g(x+y) is the pointwise product.

For 0/1 tables every quantity below is a dyadic rational whose numerator
stays far below 2^53, so the fast transform is exact in float64 up to
n = 17; integer-count helpers (``convolve_counts``, ``sumset_support``)
round back to the underlying integers and are the basis of every
positivity/support decision in the package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .f2core import PointSet, Subspace, check_dim, echelonize

# generic report-level threshold for "> 0" on convolutions of indicators;
# exact decisions go through convolve_counts / sumset_support instead
POSITIVITY_TOL = 1e-9

_COUNT_GUARD = 1e-6


@dataclass
class RealTable:
    """A real-valued function on F_2^n as a dense length-2^n array."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_dim(self.n)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"table must have shape ({1 << self.n},)")

    @classmethod
    def zeros(cls, n: int) -> "RealTable":
        return cls(n, np.zeros(1 << n))

    @classmethod
    def constant(cls, n: int, c: float) -> "RealTable":
        return cls(n, np.full(1 << n, float(c)))

    @classmethod
    def delta(cls, n: int, at: int = 0, value: float = 1.0) -> "RealTable":
        v = np.zeros(1 << n)
        v[at] = value
        return cls(n, v)

    @classmethod
    def character(cls, n: int, s: int) -> "RealTable":
        """x -> (-1)^{s.x}."""
        x = np.arange(1 << n, dtype=np.int64)
        return cls(n, 1.0 - 2.0 * ((np.bitwise_count(x & s) & 1)))

    def copy(self) -> "RealTable":
        return RealTable(self.n, self.values.copy())

    def l1(self) -> float:
        return float(np.abs(self.values).mean())

    def l2_sq(self) -> float:
        return float((self.values ** 2).mean())

    def mean(self) -> float:
        return float(self.values.mean())

    def support(self, tol: float = POSITIVITY_TOL) -> PointSet:
        return PointSet(self.n, self.values > tol)

    def to_bytes(self) -> bytes:
        return int(self.n).to_bytes(8, "little") + \
            self.values.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "RealTable":
        n = int.from_bytes(raw[:8], "little")
        vals = np.frombuffer(raw[8:], dtype="<f8", count=1 << n)
        return cls(n, vals.copy())


def indicator(a: PointSet) -> RealTable:
    return RealTable(a.n, a.mask.astype(np.float64))


def measure(a: PointSet) -> RealTable:
    """mu_A = 1_A * 2^n/|A|, normalized to mean 1."""
    if a.size == 0:
        raise ValueError("measure of the empty set")
    return RealTable(a.n, a.mask.astype(np.float64) * ((1 << a.n) / a.size))


def _butterfly(vals: np.ndarray) -> np.ndarray:
    """Unnormalized in-place transform: out[t] = sum_x in[x] (-1)^{x.t}."""
    size = vals.shape[0]
    h = 1
    while h < size:
        v = vals.reshape(-1, 2, h)
        top = v[:, 0, :].copy()
        v[:, 0, :] = top + v[:, 1, :]
        v[:, 1, :] = top - v[:, 1, :]
        h *= 2
    return vals


def wht(f: RealTable) -> RealTable:
    """Transform table: fhat(t) = E_x f(x)(-1)^{x.t}."""
    out = _butterfly(f.values.copy())
    out /= 1 << f.n
    return RealTable(f.n, out)


def inverse_wht(fhat: RealTable) -> RealTable:
    """f(x) = sum_t fhat(t)(-1)^{x.t}."""
    return RealTable(fhat.n, _butterfly(fhat.values.copy()))


def convolve(f: RealTable, g: RealTable) -> RealTable:
    """f*g(x) = E_y f(y) g(x+y), computed in the frequency domain."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    fw = _butterfly(f.values.copy())
    gw = _butterfly(g.values.copy())
    out = _butterfly(fw * gw)
    out /= float(1 << f.n) ** 2
    return RealTable(f.n, out)


def convolve_power(f: RealTable, k: int) -> RealTable:
    """k-fold self-convolution f*...*f."""
    if k < 1:
        raise ValueError("k must be >= 1")
    fw = _butterfly(f.values.copy())
    out = _butterfly(fw ** k)
    out /= float(1 << f.n) ** k
    return RealTable(f.n, out)


def convolve_counts(a: PointSet, b: PointSet) -> np.ndarray:
    """Integer table |(y+A) cap B| = 2^n * (1_A * 1_B)(y), exactly."""
    conv = convolve(indicator(a), indicator(b))
    counts = conv.values * (1 << a.n)
    rounded = np.rint(counts)
    if np.max(np.abs(counts - rounded)) > _COUNT_GUARD:
        raise ArithmeticError("convolution counts drifted from integers")
    return rounded.astype(np.int64)


def sumset_support(a: PointSet, k: int) -> PointSet:
    """kA as the exact support of the k-fold convolution (k >= 1).

    Uses pairwise count convolutions only, so every decision is an
    integer comparison.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    result: PointSet | None = None
    power = a
    while k:
        if k & 1:
            result = power if result is None else \
                PointSet(a.n, convolve_counts(result, power) > 0)
        k >>= 1
        if k:
            power = PointSet(a.n, convolve_counts(power, power) > 0)
    assert result is not None
    return result


@dataclass(frozen=True)
class SpectrumSet:
    """Points t with |fhat(t)| >= rho * l1(f), plus their coefficients."""

    rho: float
    points: tuple[int, ...]
    coefficients: tuple[float, ...]
    l1: float

    def __len__(self) -> int:
        return len(self.points)

    def span_dim(self, n: int) -> int:
        return len(echelonize(self.points, n))


def spec_rho(f: RealTable, rho: float) -> SpectrumSet:
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    fhat = wht(f)
    l1 = f.l1()
    sel = np.flatnonzero(np.abs(fhat.values) >= rho * l1)
    return SpectrumSet(rho, tuple(int(t) for t in sel),
                       tuple(float(fhat.values[t]) for t in sel), l1)


@dataclass(frozen=True)
class ChangReport:
    dim_span: int
    bound: float
    holds: bool
    spectrum_size: int
    rho: float


def chang_check(a: PointSet, rho: float) -> ChangReport:
    """Compare dim(span(Spec_rho(1_A))) against 8*log2(2^n/|A|)/rho^2."""
    if a.size == 0:
        raise ValueError("empty set")
    spec = spec_rho(indicator(a), rho)
    dim_span = spec.span_dim(a.n)
    bound = 8.0 * np.log2((1 << a.n) / a.size) / rho ** 2
    return ChangReport(dim_span, float(bound), dim_span <= bound, len(spec), rho)
