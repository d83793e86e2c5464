"""Heavy Fourier coefficient search from oracle access.

Prefix-bucket recursion: candidate prefixes P of length j hold the Fourier
weight W(P) = sum of fhat(beta)^2 over beta extending P, estimated by the
paired-restriction correlation

    W(P) = E_{z, x1, y1} f(x1|z) f(y1|z) (-1)^{P.(x1+y1)},

with the shared suffix z on the high n-j bits.  Buckets whose estimate
drops below nu^2/2 are pruned, survivors split on the next bit, and the
depth-n survivors get their coefficients estimated directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampling import (SUB_GL_BUCKET, SUB_GL_COEFF, AuditLog, FunctionOracle,
                       hoeffding_samples, stream, _ceil_count)


@dataclass(frozen=True)
class CoefficientList:
    """Recovered (character, coefficient) pairs, alpha-ascending."""

    entries: tuple[tuple[int, float], ...]
    nu: float
    delta_fail: float
    k_cap: int

    def __len__(self) -> int:
        return len(self.entries)

    def points(self) -> tuple[int, ...]:
        return tuple(alpha for alpha, _ in self.entries)

    def coefficient(self, alpha: int) -> float | None:
        for a, c in self.entries:
            if a == alpha:
                return c
        return None

    def to_json_dict(self) -> dict:
        return {
            "nu": self.nu,
            "delta": self.delta_fail,
            "k_cap": self.k_cap,
            "entries": [[f"{a:#x}", c] for a, c in self.entries],
        }


def estimate_coefficient(f: FunctionOracle, alpha_pt: int, gamma: float,
                         fail_prob: float, seed: int, tag: int = 0) -> float:
    """Sampled fhat(alpha) = E_x f(x) (-1)^{alpha.x} within gamma
    w.p. >= 1 - fail_prob."""
    count = hoeffding_samples(gamma, fail_prob)
    g = stream(seed, SUB_GL_COEFF, (int(tag) << 40) | (alpha_pt & (1 << 40) - 1))
    xs = g.integers(0, 1 << f.n, size=count)
    signs = 1.0 - 2.0 * (np.bitwise_count(xs & alpha_pt) & 1)
    vals = f.query_many(xs)
    return float(np.mean(vals * signs))


def _bucket_weight(f: FunctionOracle, level: int, prefix: int, samples: int,
                   seed: int) -> float:
    n = f.n
    g = stream(seed, SUB_GL_BUCKET, (level << 40) | prefix)
    if level == 0:
        return 1.0  # full weight by the energy identity for +-1 functions
    suffix = g.integers(0, 1 << (n - level), size=samples) if level < n \
        else np.zeros(samples, dtype=np.int64)
    x1 = g.integers(0, 1 << level, size=samples)
    y1 = g.integers(0, 1 << level, size=samples)
    xs = x1 | (suffix << level)
    ys = y1 | (suffix << level)
    signs = 1.0 - 2.0 * (np.bitwise_count((x1 ^ y1) & prefix) & 1)
    return float(np.mean(f.query_many(xs) * f.query_many(ys) * signs))


def goldreich_levin(f: FunctionOracle, nu: float, delta: float, seed: int,
                    sample_floor: int | None = None,
                    sample_cap: int | None = None,
                    k_cap: int | None = None,
                    mult: float = 1.0,
                    audit: AuditLog | None = None) -> CoefficientList:
    """All characters with |fhat| >= nu of a +-1-valued oracle, each with a
    coefficient accurate to nu/2, failing with probability <= delta.

    k_cap (default 4/nu^2) hard-caps survivors per level and the output
    length; sample_floor/cap clamp the per-bucket estimator size, which the
    integrated pipeline uses when nu is tiny and the formula count explodes.
    """
    if not 0 < nu <= 1:
        raise ValueError("nu must lie in (0,1]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0,1)")
    n = f.n
    k_hard = max(1, math.floor(4.0 / nu ** 2))
    k_eff = min(k_hard, k_cap) if k_cap is not None else k_hard
    samples = _ceil_count(mult * (16.0 / nu ** 4) *
                          math.log(8.0 * n * k_hard / delta))
    if sample_floor is not None:
        samples = max(samples, sample_floor)
    if sample_cap is not None:
        samples = min(samples, sample_cap)

    survivors: list[int] = [0]
    for level in range(1, n + 1):
        cands = []
        for p in survivors:
            cands.extend((p, p | (1 << (level - 1))))
        weights = [(_bucket_weight(f, level, c, samples, seed), c) for c in cands]
        kept = [(w, c) for w, c in weights if w >= nu ** 2 / 2.0]
        kept.sort(key=lambda wc: (-wc[0], wc[1]))
        survivors = [c for _, c in kept[:k_eff]]
        if audit is not None:
            audit.record("gl_level", level=level, candidates=len(cands),
                         kept=len(survivors), samples=samples)
        if not survivors:
            break

    entries = []
    for alpha_pt in sorted(survivors):
        c = estimate_coefficient(f, alpha_pt, nu / 4.0,
                                 delta / (4.0 * max(1, len(survivors))),
                                 seed, tag=1)
        entries.append((int(alpha_pt), c))
    entries.sort(key=lambda e: e[0])
    out = CoefficientList(tuple(entries), nu, delta, k_eff)
    if audit is not None:
        audit.record("goldreich_levin", entries=len(out), nu=nu, delta=delta,
                     samples=samples, queries=f.query_count)
    return out
