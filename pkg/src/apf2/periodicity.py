"""Additive containment, exact good-estimator enumeration, almost-period
sets, and the exact quasipolynomial Bogolyubov pipeline.

The central quantity is rho_{A->B}(y) = |(y+A) cap B| / |A|, kept as exact
integer counts.  Period sets are built constructively: enumerate all sample
sequences in A^t, keep the ones that estimate rho well everywhere on A+B,
fiber them by the shift map a -> a + a_1, and read the periods off the
largest fiber.  Every guarantee that is a theorem at these finite sizes is
checked exactly, with a 1e-9 slack absorbing float roundoff on non-dyadic
thresholds.
"""
from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .f2core import (EnumerationCapExceeded, PointSet, Subspace,
                     enumerate_points)
from .fourier import (RealTable, convolve, convolve_counts, convolve_power,
                      indicator, measure, spec_rho, wht)
from .sampling import SUB_TUPLES, ParamSchedule, stream

VERIFY_SLACK = 1e-9
_DIRECT_BUDGET = 3 * 10 ** 8


class EstimatorSetEmpty(RuntimeError):
    """No sequence in A^t estimates rho well enough; t is too small for
    the requested (epsilon, delta)."""


class PeriodSetTooSmall(RuntimeError):
    """The pigeonhole size guarantee failed, which can only happen when an
    explicit delta below the Hoeffding value was forced."""


@dataclass(frozen=True)
class GoodnessSpec:
    """Estimator goodness: |rho(y) - rho_hat(y)| <= eps (or eps*sqrt(rho(y))
    in refined mode), allowed to fail on at most a 2*delta fraction of A+B.

    delta = None uses the Hoeffding sampling bound for the deviation event,
    2*exp(-2*eps^2*t) plain or 2*exp(-eps^2*t/4) refined, which is the value
    for which every guarantee below is a theorem.
    """

    epsilon: float
    delta: float | None = None
    refined: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0,1)")
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")

    def delta_value(self, t: int) -> float:
        if self.delta is not None:
            return self.delta
        if self.refined:
            return 2.0 * math.exp(-self.epsilon ** 2 * t / 4.0)
        return 2.0 * math.exp(-2.0 * self.epsilon ** 2 * t)

    def bad_fraction(self, t: int) -> float:
        """Allowed fraction of poorly-estimated y in A+B per sequence."""
        return 2.0 * self.delta_value(t)

    def pair_failure_bound(self, t: int, ratio: float) -> float:
        """Per-period bound on Pr_{y in S}[shift comparison fails]:
        two good sequences and a union bound give 2 * (2 delta) * |A+B|/|S|."""
        return 2.0 * self.bad_fraction(t) * ratio


@dataclass
class RhoTable:
    """rho_{A->B} with exact integer numerators: counts[y] = |(y+A) cap B|."""

    A: PointSet
    B: PointSet
    counts: np.ndarray
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.A.n

    def table(self) -> RealTable:
        return RealTable(self.n, self.values.copy())

    def support_mask(self) -> np.ndarray:
        """Exact A+B membership."""
        return self.counts > 0

    def mean_is_exact(self) -> bool:
        # sum_y |(y+A) cap B| = |A| |B| exactly
        return int(self.counts.sum()) == self.A.size * self.B.size


def rho(a: PointSet, b: PointSet) -> RhoTable:
    if a.size == 0:
        raise ValueError("rho needs a nonempty A")
    counts = convolve_counts(a, b)
    return RhoTable(a, b, counts, counts / a.size)


def rho_hat(seq: Sequence[int], b: PointSet, y: int) -> float:
    """Fraction of sequence elements a_i with y + a_i in B."""
    if len(seq) == 0:
        raise ValueError("empty sample sequence")
    hits = sum(1 for a in seq if b.mask[y ^ int(a)])
    return hits / len(seq)


def _bad_tables(rt: RhoTable, t: int, spec: GoodnessSpec,
                dom: np.ndarray) -> np.ndarray:
    """bad[k, j] = 1 iff estimator value k/t is a bad estimate of rho at the
    j-th domain point.  The whole goodness predicate lives in this table."""
    rvals = rt.values[dom]
    bad = np.empty((t + 1, dom.size), dtype=np.int64)
    for k in range(t + 1):
        diff = np.abs(rvals - k / t)
        if spec.refined:
            thr = spec.epsilon * np.sqrt(rvals)
        else:
            thr = spec.epsilon
        bad[k] = diff > thr
    return bad


@dataclass
class EstimatorSet:
    """The exact set G of good estimator sequences, as a flat boolean mask
    over A^t in lexicographic sequence order (set-like, iterated lazily)."""

    A: PointSet
    B: PointSet
    t: int
    spec: GoodnessSpec
    mask: np.ndarray
    domain_size: int

    @property
    def total(self) -> int:
        return self.mask.size

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def __len__(self) -> int:
        return self.count

    def index_of(self, seq: Sequence[int]) -> int:
        pts = self.A.points()
        m = len(pts)
        idx = 0
        for a in seq:
            pos = int(np.searchsorted(pts, int(a)))
            if pos >= m or pts[pos] != int(a):
                raise ValueError(f"{a:#x} is not in A")
            idx = idx * m + pos
        return idx

    def __contains__(self, seq) -> bool:
        return bool(self.mask[self.index_of(seq)])

    def sequence_at(self, idx: int) -> tuple[int, ...]:
        pts = self.A.points()
        m = len(pts)
        out = []
        for _ in range(self.t):
            idx, pos = divmod(idx, m)
            out.append(int(pts[pos]))
        return tuple(reversed(out))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for idx in np.flatnonzero(self.mask):
            yield self.sequence_at(int(idx))

    def fraction(self) -> float:
        return self.count / self.total


def good_estimator_set(a: PointSet, b: PointSet, t: int, spec: GoodnessSpec,
                       enum_cap: int = 1 << 24) -> EstimatorSet:
    """Enumerate A^t exactly and keep the sequences whose estimator is good
    on all but a 2*delta fraction of A+B."""
    if t < 1:
        raise ValueError("t must be >= 1")
    pts = a.points()
    m = len(pts)
    if m == 0:
        raise ValueError("A is empty")
    if m ** t > enum_cap:
        raise EnumerationCapExceeded(
            f"|A|^t = {m}^{t} exceeds the enumeration cap {enum_cap}")
    rt = rho(a, b)
    dom = np.flatnonzero(rt.support_mask())
    bad = _bad_tables(rt, t, spec, dom)
    allowed = spec.bad_fraction(t) * dom.size

    total = m ** t
    if total * dom.size <= _DIRECT_BUDGET:
        mask = _good_mask_direct(pts, b, t, bad, dom, allowed)
    elif t == 2:
        mask = _good_mask_fiber_t2(a, b, rt, bad, dom, allowed)
    else:
        raise EnumerationCapExceeded(
            f"exact G needs {total} x {dom.size} comparisons; "
            "reduce |A|, t, or use t = 2")
    return EstimatorSet(a, b, t, spec, mask, int(dom.size))


def _good_mask_direct(pts: np.ndarray, b: PointSet, t: int, bad: np.ndarray,
                      dom: np.ndarray, allowed: float) -> np.ndarray:
    m = len(pts)
    total = m ** t
    # s[i, j] = 1_B(dom_j + a_i)
    s = b.mask[pts[:, None] ^ dom[None, :]].astype(np.int8)
    mask = np.empty(total, dtype=bool)
    chunk = max(1, _DIRECT_BUDGET // (8 * max(1, dom.size)))
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        digits = []
        rest = idx.copy()
        for _ in range(t):
            rest, d = np.divmod(rest, m)
            digits.append(d)
        hits = np.zeros((idx.size, dom.size), dtype=np.int8)
        for d in digits:
            hits += s[d]
        mask[idx] = _gather_bad(bad, hits) <= allowed + VERIFY_SLACK
    return mask


def _gather_bad(bad: np.ndarray, hits: np.ndarray) -> np.ndarray:
    # bad is (t+1, D); hits is (C, D) of estimator numerators
    out = np.zeros(hits.shape[0], dtype=np.int64)
    for k in range(bad.shape[0]):
        out += (hits == k) @ bad[k]
    return out


def _good_mask_fiber_t2(a: PointSet, b: PointSet, rt: RhoTable,
                        bad: np.ndarray, dom: np.ndarray,
                        allowed: float) -> np.ndarray:
    """t = 2 fast path: for a pair (a1, a2) with difference d = a1 + a2 the
    bad count decomposes into correlations, one transform per fiber d."""
    from .fourier import _butterfly  # local import of the raw kernel

    n = a.n
    size = 1 << n
    w = np.zeros((3, size))
    for k in range(3):
        w[k, dom] = bad[k]
    w0, wh, w1 = w
    c0 = float(w0.sum())
    bmask = b.mask.astype(np.float64)

    # C1(x) = sum_y (wh - w0)(y) 1_B(y + x)
    bw = _butterfly(bmask.copy())
    c1 = _butterfly(_butterfly((wh - w0).copy()) * bw) / size
    c1 = np.rint(c1).astype(np.int64)

    w2_hat = _butterfly((w0 - 2.0 * wh + w1).copy())
    idx = np.arange(size, dtype=np.int64)
    pts = a.points()
    m = len(pts)
    pos = np.full(size, -1, dtype=np.int64)
    pos[pts] = np.arange(m)

    mask = np.zeros(m * m, dtype=bool)
    two_a = a.add(a)
    for d in (int(p) for p in two_a.points()):
        qd = bmask * bmask[idx ^ d]
        c2 = _butterfly(w2_hat * _butterfly(qd)) / size
        c2 = np.rint(c2).astype(np.int64)
        a2 = pts ^ d
        valid = a.mask[a2]
        bad_counts = c0 + c1[pts] + c1[a2] + c2[pts]
        good = valid & (bad_counts <= allowed + VERIFY_SLACK)
        rows = np.flatnonzero(good)
        mask[pts_index_pairs(rows, pos[pts[rows] ^ d], m)] = True
    return mask


def pts_index_pairs(i1: np.ndarray, i2: np.ndarray, m: int) -> np.ndarray:
    return i1 * m + i2


@dataclass
class PeriodSet:
    """Almost-periods of rho_{A->B}, read off the largest fiber of the
    good-estimator set under the shift-by-first-element map.

    Invariants (validated at construction): X sits inside shift_witness + A,
    and |X| >= |A| / (2 K^{t-1}) for K = |2A|/|A|.
    """

    X: PointSet
    shift_witness: int
    a_hat: tuple[int, ...]
    spec: GoodnessSpec
    t: int
    K: float
    A: PointSet
    B: PointSet
    size_bound: float
    fiber_label: tuple[int, ...]
    estimator_count: int
    estimator_total: int

    def failure_bound(self, s_size: int) -> float:
        ratio = self.domain_size / s_size
        return self.spec.pair_failure_bound(self.t, ratio)

    @property
    def domain_size(self) -> int:
        return int((rho(self.A, self.B).counts > 0).sum())

    def to_json_dict(self) -> dict:
        import base64
        return {
            "n": self.X.n,
            "X_bitmap_b64": base64.b64encode(self.X.to_bitmap_bytes()).decode(),
            "X_size": self.X.size,
            "shift_witness": f"{self.shift_witness:#x}",
            "a_hat": [f"{v:#x}" for v in self.a_hat],
            "t": self.t,
            "K": self.K,
            "size_bound": self.size_bound,
            "fiber_label": [f"{v:#x}" for v in self.fiber_label],
            "estimator_count": self.estimator_count,
            "estimator_total": self.estimator_total,
            "spec": {"epsilon": self.spec.epsilon, "delta": self.spec.delta,
                     "refined": self.spec.refined,
                     "delta_value": self.spec.delta_value(self.t)},
        }


def build_period_set(a: PointSet, b: PointSet, t: int, spec: GoodnessSpec,
                     enum_cap: int = 1 << 24) -> PeriodSet:
    est = good_estimator_set(a, b, t, spec, enum_cap)
    if est.count == 0:
        raise EstimatorSetEmpty(
            f"G[eps={spec.epsilon}, 2*delta={spec.bad_fraction(t)}] is empty; "
            f"t={t} is too small for this goodness requirement")
    pts = a.points()
    m = len(pts)
    good_idx = np.flatnonzero(est.mask)

    # fiber label of (a_1..a_t) is (a_1+a_2, ..., a_1+a_t), packed into one
    # integer with the leading difference in the high bits so that numeric
    # order is lexicographic order
    digits = []
    rest = good_idx.copy()
    for _ in range(t):
        rest, d = np.divmod(rest, m)
        digits.append(pts[d])
    digits.reverse()  # digits[0] = a_1 values
    n = a.n
    labels = np.zeros(len(good_idx), dtype=np.int64)
    for i in range(1, t):
        labels = (labels << n) | (digits[0] ^ digits[i])

    uniq, inverse, counts = np.unique(labels, return_inverse=True,
                                      return_counts=True)
    best_count = counts.max()
    best_label_pos = int(np.flatnonzero(counts == best_count)[0])  # smallest label
    members = good_idx[inverse == best_label_pos]
    a1_members = digits[0][inverse == best_label_pos]

    a_hat_idx = int(members.min())
    a_hat = est.sequence_at(a_hat_idx)
    x_points = int(a_hat[0]) ^ a1_members
    x = PointSet.from_points(n, x_points)

    k_doubling = a.doubling_constant
    size_bound = a.size / (2.0 * k_doubling ** (t - 1))
    if x.size + VERIFY_SLACK < size_bound:
        raise PeriodSetTooSmall(
            f"|X| = {x.size} < |A|/(2K^(t-1)) = {size_bound:.3f}; "
            "explicit delta was set below the Hoeffding value")
    # containment in the affine shift a_hat_1 + A
    if not np.all(a.mask[x.points() ^ int(a_hat[0])]):
        raise AssertionError("period set escaped its affine shift")

    label_val = int(uniq[best_label_pos])
    label_tuple = tuple((label_val >> (n * (t - 1 - i))) & ((1 << n) - 1)
                        for i in range(1, t))
    return PeriodSet(x, int(a_hat[0]), a_hat, spec, t, k_doubling, a, b,
                     size_bound, (0,) + label_tuple, est.count, est.total)


# ---------------- verification reports ----------------

@dataclass
class ShiftFailureRow:
    tuple_id: int
    shift: int
    failure_fraction: float
    bound: float

    @property
    def within(self) -> bool:
        return self.failure_fraction <= self.bound + VERIFY_SLACK


@dataclass
class IteratedReport:
    ell: int
    rows: list[ShiftFailureRow]
    bound: float
    s_size: int
    refined: bool

    @property
    def all_within(self) -> bool:
        return all(r.within for r in self.rows)

    @property
    def max_failure(self) -> float:
        return max((r.failure_fraction for r in self.rows), default=0.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["tuple_id", "failure_fraction", "bound"])
        for r in self.rows:
            writer.writerow([r.tuple_id, repr(r.failure_fraction), repr(r.bound)])
        return buf.getvalue()


def _shift_failure_fraction(rt: RhoTable, s_pts: np.ndarray, shift: int,
                            threshold_base: float, refined: bool) -> float:
    """Exact Pr_{y in S}[comparison of rho(y) vs rho(y+shift) fails]."""
    ry = rt.values[s_pts]
    rshift = rt.values[s_pts ^ shift]
    if refined:
        thr = threshold_base * np.sqrt(ry)
        failures = (ry - rshift) > thr + VERIFY_SLACK
    else:
        failures = np.abs(ry - rshift) > threshold_base + VERIFY_SLACK
    return float(failures.mean())


def verify_period_properties(ps: PeriodSet, s: PointSet | None = None) -> IteratedReport:
    """Per-period exact check of the shift-comparison guarantee (the ell = 1
    case of verify_iterated, listed per x in X)."""
    return verify_iterated(ps, 1, s, tuples="singletons")


def verify_iterated(ps: PeriodSet, ell: int, s: PointSet | None = None,
                    tuples: int | str = 500, seed: int = 0,
                    enumerate_cap: int = 4096) -> IteratedReport:
    """Exact failure fractions for ell-fold period shifts.

    tuples: "singletons" checks each x in X once (ell must be 1), "all"
    enumerates X^ell (capped), an integer samples that many tuples uniformly
    from X^ell with the run seed.
    """
    rt = rho(ps.A, ps.B)
    if s is None:
        s = PointSet(ps.A.n, rt.support_mask())
    s_pts = s.points()
    if s_pts.size == 0:
        raise ValueError("S is empty")
    ratio = int(rt.support_mask().sum()) / s_pts.size
    base_bound = ps.spec.pair_failure_bound(ps.t, ratio)
    bound = ell * base_bound
    threshold = 2.0 * ps.spec.epsilon * ell
    xpts = ps.X.points()

    shifts: list[tuple[int, int]] = []
    if tuples == "singletons":
        if ell != 1:
            raise ValueError("singleton mode needs ell = 1")
        shifts = [(i, int(x)) for i, x in enumerate(xpts)]
    elif tuples == "all":
        total = len(xpts) ** ell
        if total > enumerate_cap:
            raise EnumerationCapExceeded(
                f"|X|^ell = {total} tuples exceed cap {enumerate_cap}")
        for tid in range(total):
            rest, shift = tid, 0
            for _ in range(ell):
                rest, pos = divmod(rest, len(xpts))
                shift ^= int(xpts[pos])
            shifts.append((tid, shift))
    else:
        g = stream(seed, SUB_TUPLES)
        picks = g.integers(0, len(xpts), size=(int(tuples), ell))
        for tid in range(int(tuples)):
            shift = 0
            for j in range(ell):
                shift ^= int(xpts[picks[tid, j]])
            shifts.append((tid, shift))

    rows = [ShiftFailureRow(tid, shift,
                            _shift_failure_fraction(rt, s_pts, shift,
                                                    threshold, ps.spec.refined),
                            bound)
            for tid, shift in shifts]
    return IteratedReport(ell, rows, bound, int(s_pts.size), ps.spec.refined)


@dataclass
class AveragingReport:
    epsilon_total: float
    eta: float
    fraction_good: float
    required: float

    @property
    def holds(self) -> bool:
        return self.fraction_good >= self.required - VERIFY_SLACK


def averaging_check(ps: PeriodSet, ell: int, eta: float,
                    s: PointSet | None = None) -> AveragingReport:
    """Markov-averaged form: compare rho(y) against the exact expectation of
    rho(y + x_1 + ... + x_ell) over X^ell (an ell-fold convolution), with
    tolerance (2 eps ell + eta) and failure allowance delta/eta."""
    rt = rho(ps.A, ps.B)
    if s is None:
        s = PointSet(ps.A.n, rt.support_mask())
    s_pts = s.points()
    ratio = int(rt.support_mask().sum()) / s_pts.size
    delta = ell * ps.spec.pair_failure_bound(ps.t, ratio)

    mu_x_ell = convolve_power(measure(ps.X), ell)
    expect = convolve(mu_x_ell, RealTable(rt.n, rt.values.copy())).values
    ry = rt.values[s_pts]
    ex = expect[s_pts]
    if ps.spec.refined:
        eps_tot = 2.0 * ps.spec.epsilon * ell
        good = (ry - ex) <= eps_tot * np.sqrt(ry) + eta + VERIFY_SLACK
        eps_rep = eps_tot
    else:
        eps_rep = 2.0 * ps.spec.epsilon * ell + eta
        good = np.abs(ry - ex) <= eps_rep + VERIFY_SLACK
    required = max(0.0, 1.0 - delta / eta)
    return AveragingReport(eps_rep, eta, float(good.mean()), required)


def period_subspace(ps: PeriodSet) -> Subspace:
    """V = (large spectrum of 1_X at threshold 1/2) perp."""
    spec = spec_rho(indicator(ps.X), 0.5)
    return Subspace.from_perp_vectors(ps.X.n, spec.points)


def period_subspace_stats(ps: PeriodSet, v: Subspace) -> dict:
    alpha = ps.A.density
    alpha_x = ps.X.density
    return {
        "codim": v.codim,
        "parseval_cap": 4.0 / alpha_x,
        "chang_bound_on_X": 32.0 * math.log2(1.0 / alpha_x) if alpha_x < 1 else 0.0,
        "corollary_bound": 32.0 * math.log2(2.0 / alpha ** ps.t),
    }


@dataclass
class FourierShiftReport:
    max_deviation: float
    bound: float
    ell: int

    @property
    def holds(self) -> bool:
        return self.max_deviation <= self.bound + VERIFY_SLACK


def subspace_fourier_check(x: PointSet, a: PointSet, b: PointSet,
                           v: Subspace, ell: int) -> FourierShiftReport:
    """Exact check that the ell-fold X-averaged table
    T = (mu_X)^{*ell} * mu_A * 1_B moves by at most 2^-ell sqrt(|B|/|A|)
    under any shift from V = Spec_{1/2}(X)^perp."""
    t_table = convolve(convolve(convolve_power(measure(x), ell), measure(a)),
                       indicator(b)).values
    bound = 2.0 ** (-ell) * math.sqrt(b.size / a.size)
    worst = 0.0
    for vv in (int(p) for p in enumerate_points(v)):
        if vv == 0:
            continue
        dev = float(np.abs(t_table - t_table[np.arange(t_table.size) ^ vv]).max())
        worst = max(worst, dev)
    return FourierShiftReport(worst, bound, ell)


# ---------------- certificates and the exact pipeline ----------------

@dataclass
class Certificate:
    kind: str                      # exact-pass | exact-fail | sampled-pass | unverified
    witness: int | None = None
    confidence: float | None = None
    checked: int = 0
    details: dict | None = None

    @property
    def passed(self) -> bool:
        return self.kind in ("exact-pass", "sampled-pass")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "witness": None if self.witness is None else f"{self.witness:#x}",
            "confidence": self.confidence,
            "checked": self.checked,
            "details": self.details or {},
        }


def certify_subspace_in_iterated_sumset(a: PointSet, v: Subspace,
                                        k: int = 4) -> Certificate:
    """Exact check that V sits inside kA, via set arithmetic only."""
    ksum = a.iterated_sum(k)
    members = np.sort(enumerate_points(v))
    ok = ksum.mask[members]
    if ok.all():
        return Certificate("exact-pass", checked=int(members.size))
    witness = int(members[np.flatnonzero(~ok)[0]])
    return Certificate("exact-fail", witness=witness, checked=int(members.size))


@dataclass
class BogolyubovExactResult:
    V: Subspace
    certificate: Certificate
    period_set: PeriodSet
    stats: dict

    def to_json_dict(self) -> dict:
        return {
            "V": self.V.to_json_dict(),
            "certificate": self.certificate.to_json_dict(),
            "period_set": self.period_set.to_json_dict(),
            "stats": self.stats,
        }


def exact_bogolyubov(a: PointSet, sched: ParamSchedule) -> BogolyubovExactResult:
    """Exact desk-scale pipeline: period set for B = 2A, its spectral
    subspace, and an exact 4A certificate plus the majority-shift argument
    as an internal cross-check."""
    two_a = a.add(a)
    spec = GoodnessSpec(sched.epsilon, sched.delta, refined=False)
    ps = build_period_set(a, two_a, sched.t, spec, enum_cap=sched.enum_cap)
    v = period_subspace(ps)
    cert = certify_subspace_in_iterated_sumset(a, v, 4)

    # majority-shift cross-check: if some translate of 2A covers more than
    # half of V, then V lands in (2A) + (2A)
    v_set = PointSet.from_subspace(v)
    overlap = convolve_counts(v_set, two_a)
    best_shift = int(overlap.argmax())
    best_frac = float(overlap[best_shift]) / v_set.size
    majority = {"best_shift": best_shift, "overlap_fraction": best_frac,
                "majority_holds": best_frac > 0.5}
    if majority["majority_holds"]:
        four_a = two_a.add(two_a)
        inside = bool(np.all(four_a.mask[enumerate_points(v)]))
        majority["implies_containment_verified"] = inside
        if not inside:
            raise AssertionError("majority shift held but V escaped 4A")

    stats = period_subspace_stats(ps, v)
    stats.update({
        "majority_shift": majority,
        "alpha": a.density,
        "doubling": ps.K,
        "schedule": {"t": sched.t, "ell": sched.ell,
                     "epsilon": sched.epsilon, "eta": sched.eta,
                     "delta": spec.delta_value(sched.t)},
    })
    return BogolyubovExactResult(v, cert, ps, stats)


def classical_bogolyubov(a: PointSet) -> tuple[Subspace, Certificate]:
    """Spectral route: V = span(Spec_rho(1_A))^perp at rho = sqrt(alpha/2).

    Why this threshold closes the positivity argument: write the fourfold
    convolution at v in V as the character sum over t of 1_A-hat(t)^4 times
    (-1)^{v.t}.  Every t in the spectrum lies in V^perp, so those terms are
    nonnegative and include the t = 0 term alpha^4.  Each remaining t has
    |1_A-hat(t)| < rho * alpha, and their squares sum to at most alpha by
    the energy identity, so the remainder is bounded by rho^2 alpha^2 *
    alpha = alpha^4 / 2 in absolute value.  Hence the value at v is at
    least alpha^4/2 > 0 and V sits inside 4A.  The spectrum has at most
    rho^-2 alpha^-1 = 2 alpha^-2 elements, which caps the codimension.
    """
    if a.size == 0:
        raise ValueError("empty set")
    alpha = a.density
    rho_thr = math.sqrt(alpha / 2.0)
    spec = spec_rho(indicator(a), min(1.0, rho_thr))
    v = Subspace.from_perp_vectors(a.n, spec.points)
    if v.codim > 2.0 / alpha ** 2:
        raise AssertionError("codimension exceeded the 2/alpha^2 cap")
    cert = certify_subspace_in_iterated_sumset(a, v, 4)
    cert.details = {"rho_threshold": rho_thr, "codim": v.codim,
                    "codim_bound": 2.0 / alpha ** 2,
                    "spectrum_size": len(spec)}
    return v, cert
