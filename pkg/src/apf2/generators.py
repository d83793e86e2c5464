"""Seeded instance generators for experiments and tests.

Generator specs are compact strings:

    random-density:0.25            density-alpha Bernoulli set
    subspace:2                     canonical subspace of codimension 2
    coset-union:3,2                union of 2 cosets of a codim-3 subspace
    planted-spectral:4,0.1         sign of 4 random characters + noise
    planted-spectral:0x3|0x5,0.1   explicit characters

All randomness derives from the run seed through the shared stream keying,
so a (spec, n, seed) triple pins the instance.
"""
from __future__ import annotations

import math

import numpy as np

from .f2core import PointSet, Subspace, check_dim
from .fourier import RealTable
from .sampling import SUB_GEN, stream

_GEN_RANDOM = 0
_GEN_COSET = 1
_GEN_PLANTED = 2


def canonical_subspace(n: int, codim: int) -> Subspace:
    """The subspace with the top `codim` coordinates zeroed."""
    if not 0 <= codim <= n:
        raise ValueError("codim out of range")
    return Subspace.from_perp_vectors(
        n, [1 << (n - 1 - i) for i in range(codim)])


def random_density_set(n: int, alpha: float, seed: int) -> PointSet:
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0,1]")
    g = stream(seed, SUB_GEN, _GEN_RANDOM)
    mask = g.random(1 << n) < alpha
    if not mask.any():
        mask[0] = True  # keep generated sets nonempty
    return PointSet(n, mask)


def subspace_set(n: int, codim: int) -> PointSet:
    return PointSet.from_subspace(canonical_subspace(n, codim))


def coset_union_set(n: int, codim: int, count: int, seed: int) -> PointSet:
    """Union of `count` distinct cosets of the canonical codim subspace
    (the zero coset always included, so the union is 0-containing)."""
    if count < 1 or count > 1 << codim:
        raise ValueError("count must lie in [1, 2^codim]")
    g = stream(seed, SUB_GEN, _GEN_COSET)
    sub = subspace_set(n, codim)
    reps = {0}
    while len(reps) < count:
        reps.add(int(g.integers(0, 1 << n)) & ~((1 << (n - codim)) - 1))
    mask = np.zeros(1 << n, dtype=bool)
    idx = np.arange(1 << n, dtype=np.int64)
    for r in sorted(reps):
        mask |= sub.mask[idx ^ r]
    return PointSet(n, mask)


def planted_spectral_table(n: int, characters: list[int] | int, noise: float,
                           seed: int) -> tuple[RealTable, list[int]]:
    """+-1 table sign(sum of characters + noise*gaussian), plus the plant."""
    g = stream(seed, SUB_GEN, _GEN_PLANTED)
    if isinstance(characters, int):
        count = characters
        chars: list[int] = []
        while len(chars) < count:
            c = int(g.integers(1, 1 << n))
            if c not in chars:
                chars.append(c)
    else:
        chars = [int(c) for c in characters]
    xs = np.arange(1 << n, dtype=np.int64)
    acc = np.zeros(1 << n)
    for c in chars:
        acc += 1.0 - 2.0 * (np.bitwise_count(xs & c) & 1)
    if noise > 0:
        acc += noise * g.standard_normal(1 << n)
    vals = np.where(acc >= 0.0, 1.0, -1.0)
    return RealTable(n, vals), chars


def parse_generator(spec: str):
    """Split "name:args" into (name, [arg strings])."""
    name, _, rest = spec.partition(":")
    args = [a for a in rest.split(",") if a] if rest else []
    return name.strip(), args


def generate_set(spec: str, n: int, seed: int) -> PointSet:
    check_dim(n)
    name, args = parse_generator(spec)
    if name == "random-density":
        return random_density_set(n, float(args[0]), seed)
    if name == "subspace":
        return subspace_set(n, int(args[0]))
    if name == "coset-union":
        return coset_union_set(n, int(args[0]), int(args[1]), seed)
    if name == "planted-spectral":
        table, _ = generate_planted(spec, n, seed)
        return PointSet(n, table.values > 0)
    raise ValueError(f"unknown generator {name!r}")


def generate_planted(spec: str, n: int, seed: int) -> tuple[RealTable, list[int]]:
    name, args = parse_generator(spec)
    if name != "planted-spectral":
        raise ValueError(f"not a planted-spectral spec: {spec!r}")
    noise = float(args[1]) if len(args) > 1 else 0.0
    first = args[0]
    if "|" in first or first.startswith("0x"):
        chars = [int(tok, 16) for tok in first.split("|")]
        return planted_spectral_table(n, chars, noise, seed)
    return planted_spectral_table(n, int(first), noise, seed)


def binomial_band(n_points: int, alpha: float, sigmas: float = 3.0) -> tuple[float, float]:
    sd = math.sqrt(alpha * (1 - alpha) / n_points)
    return alpha - sigmas * sd, alpha + sigmas * sd
