"""Variance-aware almost-periodicity and the search for large affine
subspaces inside A+A.

The refined goodness predicate scales the estimator tolerance with
sqrt(rho(y)), which buys a better failure exponent exactly where rho is
small; the dense slice S = {rho_{A->A} >= alpha/2} then admits a shift y
that places a whole coset of the spectral subspace inside A+A, found here
by exact scanning in decreasing rho order.
"""
from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass

import numpy as np

from .f2core import PointSet, Subspace, enumerate_points
from .periodicity import (VERIFY_SLACK, GoodnessSpec, PeriodSet,
                          build_period_set, period_subspace, rho)
from .sampling import SUB_SHIFT, ParamSchedule, paper_parameters, stream


def parabola_monotone(b: float, c: float, t1: float, t2: float) -> bool:
    """For f(t) = t^2 - b t - c with b > 0, c >= 0: once f is positive at
    t1 >= 0, it cannot decrease on [t1, t2].  Returns f(t1) <= f(t2), which
    under the preconditions is always true."""
    if b <= 0 or c < 0:
        raise ValueError("need b > 0 and c >= 0")
    if not 0 <= t1 <= t2:
        raise ValueError("need 0 <= t1 <= t2")
    f1 = t1 * t1 - b * t1 - c
    if f1 <= 0:
        raise ValueError("need f(t1) > 0")
    f2 = t2 * t2 - b * t2 - c
    return f1 <= f2


def refined_period_set(a: PointSet, b: PointSet, t: int,
                       spec: GoodnessSpec | None = None,
                       epsilon: float = 0.125, delta: float | None = None,
                       enum_cap: int = 1 << 24) -> PeriodSet:
    """build_period_set with the sqrt(rho)-scaled goodness predicate."""
    if spec is None:
        spec = GoodnessSpec(epsilon, delta, refined=True)
    elif not spec.refined:
        raise ValueError("refined_period_set needs a refined GoodnessSpec")
    return build_period_set(a, b, t, spec, enum_cap)


@dataclass
class RefinedReport:
    V: Subspace
    S: PointSet
    period_set: PeriodSet
    shift: int | None
    per_v_failure: list[tuple[int, float]]
    failure_bound: float
    eps_prime_terms: dict
    stats: dict

    @property
    def all_within(self) -> bool:
        return all(f <= self.failure_bound + VERIFY_SLACK
                   for _, f in self.per_v_failure)

    @property
    def max_failure(self) -> float:
        return max((f for _, f in self.per_v_failure), default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "V": self.V.to_json_dict(),
            "dim": self.V.dim,
            "shift": None if self.shift is None else f"{self.shift:#x}",
            "S_size": self.S.size,
            "failure_bound": self.failure_bound,
            "max_per_v_failure": self.max_failure,
            "eps_prime_terms": self.eps_prime_terms,
            "stats": self.stats,
            "period_set": self.period_set.to_json_dict(),
        }

    def per_v_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["v", "failure_fraction", "bound"])
        for v, f in self.per_v_failure:
            w.writerow([f"{v:#x}", repr(f), repr(self.failure_bound)])
        return buf.getvalue()


def dense_rho_slice(a: PointSet) -> PointSet:
    """S = {y : rho_{A->A}(y) >= alpha/2}; its size is at least
    (alpha/2) 2^n because rho_{A->A} averages to exactly alpha."""
    rt = rho(a, a)
    # counts[y]/|A| >= alpha/2  <=>  2 * 2^n * counts[y] >= |A|^2, exactly
    mask = 2 * (1 << a.n) * rt.counts >= a.size * a.size
    s = PointSet(a.n, mask)
    if not rt.mean_is_exact():
        raise AssertionError("rho mean identity failed")
    if 2 * s.size < a.size:  # |S| >= (alpha/2) 2^n
        raise AssertionError("Markov lower bound on |S| failed")
    return s


def refined_subspace(a: PointSet, sched: ParamSchedule) -> RefinedReport:
    """Refined pipeline at B = A: period set, spectral subspace, and exact
    per-shift failure fractions of the one-sided sqrt-scaled comparison
    over the dense slice S."""
    spec = GoodnessSpec(sched.epsilon, sched.delta, refined=True)
    ps = refined_period_set(a, a, sched.t, spec, enum_cap=sched.enum_cap)
    v = period_subspace(ps)
    s = dense_rho_slice(a)
    rt = rho(a, a)
    s_pts = s.points()

    ell = sched.ell
    eta = sched.eta
    ratio = int(rt.support_mask().sum()) / s_pts.size
    bound = 16.0 * (ell / eta) * ratio * \
        math.exp(-sched.epsilon ** 2 * sched.t / 4.0)
    sqrt_term = 4.0 * sched.epsilon * ell
    const_term = 2.0 * eta + 2.0 ** (-ell)  # sqrt(|B|/|A|) = 1 at B = A

    ry = rt.values[s_pts]
    eps_prime = sqrt_term * np.sqrt(ry) + const_term
    per_v = []
    for vv in (int(p) for p in enumerate_points(v)):
        fails = (ry - rt.values[s_pts ^ vv]) > eps_prime + VERIFY_SLACK
        per_v.append((vv, float(fails.mean())))

    stats = {
        "alpha": a.density,
        "codim": v.codim,
        "corollary_codim_bound": 32.0 * math.log2(2.0 / a.density ** sched.t),
        "paper": paper_parameters(a.density, a.n, "sumsets"),
        "schedule": {"t": sched.t, "ell": ell, "epsilon": sched.epsilon,
                     "eta": eta, "delta": spec.delta_value(sched.t)},
    }
    terms = {
        "sqrt_coefficient": sqrt_term,
        "eta_term": 2.0 * eta,
        "fourier_term": 2.0 ** (-ell),
        "formula": "eps' = 4 eps ell sqrt(rho(y)) + 2 eta + 2^-ell sqrt(|B|/|A|)",
    }
    return RefinedReport(v, s, ps, None, per_v, bound, terms, stats)


def find_sumset_subspace(a: PointSet, sched: ParamSchedule,
                         prefilter_samples: int = 64) -> RefinedReport:
    """Search for an affine coset shift + V inside A + A.

    Shifts are scanned from the dense slice S in decreasing rho order (ties
    by ascending point).  A seeded random membership prefilter rejects
    hopeless shifts before the full coset check; the accepted shift is
    verified exactly against integer sumset counts, zero tolerance.
    """
    report = refined_subspace(a, sched)
    v = report.V
    rt = rho(a, a)
    s_pts = report.S.points()
    order = np.lexsort((s_pts, -rt.counts[s_pts]))
    candidates = s_pts[order]

    members = np.sort(enumerate_points(v))
    support = rt.counts > 0  # exact A+A membership
    g = stream(sched.seed, SUB_SHIFT)
    if len(members) > prefilter_samples:
        probe = members[g.integers(0, len(members), size=prefilter_samples)]
    else:
        probe = members

    shift = None
    scanned = 0
    for y in (int(p) for p in candidates):
        scanned += 1
        if not support[probe ^ y].all():
            continue
        if support[members ^ y].all():
            shift = y
            break
    report.shift = shift
    report.stats["shifts_scanned"] = scanned
    report.stats["dim_found"] = v.dim if shift is not None else None
    return report
