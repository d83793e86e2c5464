"""Randomized oracle-access subroutines: sample-size planning, membership
tests for the thick convolution set Z, for good estimator sequences G, and
for the almost-period set X.

Randomness is counter-based: every (seed, subroutine, point) triple keys its
own Philox stream, so a value such as Z(x) is a fixed function of x within a
run no matter how often or in what order it is queried, and reruns with the
same schedule are bit-identical, query counts included.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .f2core import TABLE_DIM, check_dim, check_point

# subroutine ids for stream derivation
SUB_Z = 1
SUB_RHO = 2
SUB_G = 3
SUB_FIND = 4
SUB_MU = 5
SUB_GL_BUCKET = 6
SUB_GL_COEFF = 7
SUB_CERT = 8
SUB_GEN = 9
SUB_TUPLES = 10
SUB_SHIFT = 11

_POINT_BITS = 56


def stream(seed: int, sub: int, point: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, subroutine id, point)."""
    if point < 0 or point >> _POINT_BITS:
        raise ValueError("stream point out of range")
    key = (int(seed) & (1 << 64) - 1) | (int(sub) & 0xFF) << 64 | int(point) << 72
    return np.random.Generator(np.random.Philox(key=key))


def sequence_digest(seq: Sequence[int]) -> int:
    """Stable 56-bit digest of an integer sequence, for stream keying."""
    raw = b"".join(int(v).to_bytes(8, "little") for v in seq)
    return int.from_bytes(hashlib.blake2b(raw, digest_size=7).digest(), "little")


class VarianceBoundInapplicable(ValueError):
    """gamma >= 2*sigma^2: fall back to the plain Hoeffding planner."""


def _ceil_count(x: float) -> int:
    return max(1, math.ceil(x - 1e-12))


def hoeffding_samples(gamma: float, fail_prob: float) -> int:
    """Smallest t with 2*exp(-2*gamma^2*t) <= fail_prob."""
    if not 0 < gamma:
        raise ValueError("gamma must be positive")
    if not 0 < fail_prob:
        raise ValueError("fail_prob must be positive")
    if fail_prob >= 2:
        return 1
    return _ceil_count(math.log(2.0 / fail_prob) / (2.0 * gamma * gamma))


def variance_hoeffding_samples(gamma: float, sigma_sq: float, fail_prob: float) -> int:
    """Smallest t with 2*exp(-gamma^2*t/(4*sigma^2)) <= fail_prob;
    valid only in the small-deviation regime gamma < 2*sigma^2."""
    if not 0 < gamma:
        raise ValueError("gamma must be positive")
    if not 0 < fail_prob:
        raise ValueError("fail_prob must be positive")
    if gamma >= 2.0 * sigma_sq:
        raise VarianceBoundInapplicable(
            f"gamma={gamma} >= 2*sigma^2={2.0 * sigma_sq}: use plain Hoeffding")
    if fail_prob >= 2:
        return 1
    return _ceil_count(4.0 * sigma_sq * math.log(2.0 / fail_prob) / (gamma * gamma))


@dataclass
class ParamSchedule:
    """Every knob of the sampling routines in one place.

    ``None`` fields are derived at run time (Hoeffding-based counts, the
    error-budget split of gamma_prime).  Asymptotic sample counts carry
    explicit multipliers so reports can show both the instantiated number
    and the formula it came from.
    """

    seed: int = 0
    name: str = "desk"
    t: int = 2
    ell: int = 2
    epsilon: float = 0.125
    delta: float | None = None          # goodness bad-fraction parameter
    eta: float = 0.25                   # Z threshold scale: h*h >= eta*alpha^2
    r: int | None = None                # G-test outer sample override
    r_prime: int | None = None          # G-test per-point sample override
    z_samples: int | None = None        # Z-test sample override
    gamma1: float | None = None
    gamma2: float | None = None
    gamma3: float | None = None
    gamma4: float | None = None
    gamma_prime: float = 0.2
    z_mult: float = 1.0
    g_mult: float = 1.0
    find_mult: float = 1.0
    mu_mult: float = 1.0
    gl_mult: float = 1.0
    gl_sample_floor: int | None = None
    gl_sample_cap: int | None = None
    gl_k_cap: int | None = None
    enum_cap: int = 1 << 24
    full_scan_limit: int = 1 << 20      # exact scans replace sampling below this
    cert_sample_cap: int = 4096

    def __post_init__(self):
        for name in ("epsilon", "eta", "gamma_prime"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0,1), got {v}")
        if self.delta is not None and not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0,1)")
        if self.t < 1 or self.ell < 1:
            raise ValueError("t and ell must be >= 1")

    @classmethod
    def desk(cls, seed: int, **overrides) -> "ParamSchedule":
        return cls(seed=seed, name="desk", **overrides)

    def with_seed(self, seed: int) -> "ParamSchedule":
        return replace(self, seed=seed)

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ParamSchedule":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def paper_parameters(alpha: float, n: int | None = None,
                     application: str = "bogolyubov") -> dict:
    """The symbolic parameter choices behind each headline statement,
    instantiated at density alpha for side-by-side reporting.  These are
    meaningful asymptotically; at desk scale they are typically vacuous
    (that is the point of printing them next to the measured run)."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0,1]")
    log2 = math.log2
    if application == "bogolyubov":
        ell = max(1.0, log2(900.0 / alpha) / 2.0)
        eta = 1.0 / 60.0
        eps = 1.0 / (120.0 * ell)
        # smallest t with 480*(log2(900/a)/a)*exp(-2 eps^2 t) <= 0.1
        t = 0.5 * math.log(4800.0 * log2(900.0 / alpha) / alpha) / eps ** 2
        out = {
            "application": application, "ell": ell, "eta": eta,
            "epsilon": eps, "t": math.ceil(t),
            "codim_bound": 32.0 * log2(2.0 / alpha ** math.ceil(t)),
        }
    elif application == "bogolyubov-sampled":
        ell = max(1.0, log2(10.0 / alpha))
        eps = 1.0 / (120.0 * ell)
        delta = alpha / (120.0 * ell)
        eta = 1e-4
        t = (1.0 / eps ** 2) * math.log(1.0 / delta)
        out = {
            "application": application, "ell": ell, "eta": eta,
            "epsilon": eps, "delta": delta, "gamma1": eta * alpha ** 2,
            "t": math.ceil(t),
            "codim_bound": 32.0 * log2(2.0 / alpha ** math.ceil(t)),
        }
    elif application == "sumsets":
        if n is None:
            raise ValueError("the sumset schedule needs n")
        eta = alpha / 24.0
        ell = max(1.0, log2(12.0 / alpha))
        eps = math.sqrt(2.0 * alpha) / (48.0 * ell)
        denom = 32.0 * math.log2(1.0 / alpha) + \
            2.0 * alpha / (4.0 * 48.0 ** 2 * math.log2(12.0 / alpha) ** 2)
        t = (2.0 * log2(1.0 / alpha) + n + log2(max(2.0, log2(12.0 / alpha)))) / denom
        out = {
            "application": application, "eta": eta, "ell": ell,
            "epsilon": eps, "t": t,
            "dim_lower_bound": n - 32.0 * math.log2(1.0 / alpha) * t - 32.0,
        }
    else:
        raise ValueError(f"unknown application {application!r}")
    return out


class FunctionOracle:
    """Black-box access to a function on F_2^n with per-point memoisation.

    The counter counts *fresh* points only; repeated queries are free and
    return the memoised value, which keeps randomized callers deterministic.
    """

    def __init__(self, n: int, fn: Callable[[np.ndarray], np.ndarray],
                 name: str = "oracle", integer_valued: bool = True):
        check_dim(n)
        if n > TABLE_DIM:
            raise NotImplementedError(f"dense oracle cache needs n <= {TABLE_DIM}")
        self.n = n
        self.name = name
        self._fn = fn
        dtype = np.int8 if integer_valued else np.float64
        self._values = np.zeros(1 << n, dtype=dtype)
        self._known = np.zeros(1 << n, dtype=bool)
        self.query_count = 0

    @classmethod
    def from_pointset(cls, a) -> "FunctionOracle":
        table = a.mask.astype(np.int8)
        return cls(a.n, lambda pts: table[pts], name="indicator")

    @classmethod
    def from_values(cls, n: int, values: np.ndarray,
                    name: str = "table") -> "FunctionOracle":
        vals = np.asarray(values)
        integer = np.issubdtype(vals.dtype, np.integer)
        return cls(n, lambda pts: vals[pts], name=name, integer_valued=integer)

    @classmethod
    def from_scalar_fn(cls, n: int, fn: Callable[[int], float],
                       name: str = "fn", integer_valued: bool = True) -> "FunctionOracle":
        def bulk(pts: np.ndarray) -> np.ndarray:
            return np.array([fn(int(p)) for p in pts])
        return cls(n, bulk, name=name, integer_valued=integer_valued)

    def query(self, x: int):
        check_point(x, self.n)
        val = self.query_many(np.array([x], dtype=np.int64))[0]
        return int(val) if self._values.dtype == np.int8 else float(val)

    def query_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64)
        missing = pts[~self._known[pts]]
        if missing.size:
            fresh = np.unique(missing)
            self._values[fresh] = self._fn(fresh)
            self._known[fresh] = True
            self.query_count += int(fresh.size)
        return self._values[pts]

    def full_table(self) -> np.ndarray:
        """Query every point once and return the dense value table."""
        all_pts = np.arange(1 << self.n, dtype=np.int64)
        self.query_many(all_pts)
        return self._values

    def known_fraction(self) -> float:
        return float(self._known.mean())


class AuditLog:
    """JSON-lines audit of subroutine calls."""

    def __init__(self):
        self.records: list[dict] = []

    def record(self, call: str, **fields):
        self.records.append({"call": call, **fields})

    def dump(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.records) + \
            ("\n" if self.records else "")


class EstimateUnderflow(RuntimeError):
    """Rejection sampling failed to collect enough in-set samples."""


@dataclass
class FindResult:
    a_hat: tuple[int, ...]
    verified: bool
    estimate: float
    attempts_used: int
    g_calls: int


class SamplingSession:
    """One run of the oracle-access machinery against a fixed h and schedule.

    Z, the per-point density estimate rho~, G and X are all memoised, so
    within a session they are fixed (random) functions of their argument.
    """

    def __init__(self, h: FunctionOracle, alpha: float, sched: ParamSchedule,
                 audit: AuditLog | None = None):
        if not 0 < alpha <= 1:
            raise ValueError("alpha must lie in (0,1]")
        self.h = h
        self.n = h.n
        self.size = 1 << h.n
        self.alpha = float(alpha)
        self.sched = sched
        self.audit = audit
        self.seed = sched.seed

        # gamma budget: the defaults follow the gamma' split of the
        # end-to-end algorithm (gamma2 = gamma'/4, gamma4 = gamma2/2,
        # gamma3 = gamma2/(2(ell+1)), gamma1 = eta*alpha^2).
        self.gamma1 = sched.gamma1 if sched.gamma1 is not None \
            else sched.eta * alpha ** 2
        self.gamma2 = sched.gamma2 if sched.gamma2 is not None \
            else sched.gamma_prime / 4.0
        self.gamma4 = sched.gamma4 if sched.gamma4 is not None \
            else self.gamma2 / 2.0
        self.gamma3 = sched.gamma3 if sched.gamma3 is not None \
            else self.gamma2 / (2.0 * (sched.ell + 1))
        self.delta = sched.delta if sched.delta is not None else 0.125

        self.z_threshold = sched.eta * alpha ** 2
        self.z_r = sched.z_samples if sched.z_samples is not None else \
            _ceil_count(sched.z_mult *
                        hoeffding_samples(self.z_threshold / 2.0, self.gamma1))
        self.g_r = sched.r if sched.r is not None else \
            _ceil_count(sched.g_mult *
                        2.0 * math.log(4.0 / self.gamma3) / self.delta ** 2)
        self.g_r_prime = sched.r_prime if sched.r_prime is not None else \
            _ceil_count(sched.g_mult * 2.0 *
                        math.log(8.0 * self.g_r / self.gamma3) / sched.epsilon ** 2)

        if self.size > sched.full_scan_limit:
            raise NotImplementedError(
                "sampling sessions are table-backed; need 2^n <= full_scan_limit")
        ht = h.full_table()
        self._ht = ht.astype(np.int8) if ht.dtype != np.int8 else ht
        self._z = np.full(self.size, -1, dtype=np.int8)
        self._rho = np.full(self.size, np.nan)
        self._g: dict[tuple[int, ...], int] = {}
        self._x: np.ndarray | None = None
        self.find_result: FindResult | None = None
        self.z_evals = 0
        self.g_evals = 0
        self.rho_evals = 0

    # ---------------- Z-Test ----------------

    def _z_eval(self, pts: np.ndarray) -> None:
        thr = self.z_threshold
        ht = self._ht
        for x in pts:
            x = int(x)
            g = stream(self.seed, SUB_Z, x)
            ys = g.integers(0, self.size, size=self.z_r)
            est = (ht[ys] & ht[x ^ ys]).mean()
            self._z[x] = 1 if est >= thr else 0
            self.z_evals += 1

    def z_test(self, x: int) -> int:
        """1 iff the sampled estimate of h*h(x) clears eta*alpha^2."""
        check_point(x, self.n)
        if self._z[x] < 0:
            self._z_eval(np.array([x]))
            if self.audit is not None:
                self.audit.record("z_test", x=int(x), output=int(self._z[x]),
                                  samples=self.z_r)
        return int(self._z[x])

    def z_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64)
        missing = np.unique(pts[self._z[pts] < 0])
        if missing.size:
            self._z_eval(missing)
        return self._z[pts]

    def z_table(self) -> np.ndarray:
        """Memoised Z on every point (the fixed random function of the run)."""
        self.z_many(np.arange(self.size, dtype=np.int64))
        if self.audit is not None:
            self.audit.record("z_table", points=self.size, samples_each=self.z_r)
        return self._z.copy()

    # ------------- rho estimates -------------

    def _sample_from_support(self, g: np.random.Generator, count: int) -> np.ndarray:
        """count uniform samples from {h = 1} by rejection from F_2^n."""
        out = np.empty(count, dtype=np.int64)
        have = 0
        batch = max(64, int(2.5 * count / max(self.alpha, 1e-9)))
        for _ in range(60):
            cand = g.integers(0, self.size, size=batch)
            acc = cand[self._ht[cand] == 1]
            take = min(count - have, acc.size)
            out[have:have + take] = acc[:take]
            have += take
            if have == count:
                return out
        raise EstimateUnderflow("rejection sampling starved; is E[h] ~ alpha?")

    def rho_estimate(self, y: int) -> float:
        """Memoised sampled estimate of rho(y) = E_{a in A}[Z(y + a)]."""
        if math.isnan(self._rho[y]):
            g = stream(self.seed, SUB_RHO, int(y))
            a_samples = self._sample_from_support(g, self.g_r_prime)
            zvals = self.z_many(y ^ a_samples)
            self._rho[y] = float(zvals.mean())
            self.rho_evals += 1
        return float(self._rho[y])

    def rho_estimate_many(self, ys: np.ndarray) -> np.ndarray:
        for y in np.unique(ys):
            if math.isnan(self._rho[y]):
                self.rho_estimate(int(y))
        return self._rho[ys]

    # ---------------- G-Test ----------------

    def g_test(self, seq: Sequence[int]) -> int:
        """Sampled membership test for good estimator sequences.

        0 if some h(a_i) != 1; otherwise draws r points y_i, compares the
        sampled rho(y_i) against the sequence estimator (1/t) sum_i Z(a_i+y_i)
        and accepts when at most a delta fraction deviate by >= epsilon.
        """
        seq = tuple(int(a) for a in seq)
        if len(seq) != self.sched.t:
            raise ValueError(f"sequence length {len(seq)} != t = {self.sched.t}")
        cached = self._g.get(seq)
        if cached is not None:
            return cached
        self.g_evals += 1
        if np.any(self._ht[np.array(seq, dtype=np.int64)] == 0):
            result = 0
        else:
            g = stream(self.seed, SUB_G, sequence_digest(seq))
            ys = g.integers(0, self.size, size=self.g_r)
            rho_est = self.rho_estimate_many(ys)
            acc = np.zeros(self.g_r)
            for a in seq:
                acc += self.z_many(a ^ ys)
            rho_hat = acc / len(seq)
            bad = np.abs(rho_est - rho_hat) >= self.sched.epsilon
            result = int(bad.sum() <= self.delta * self.g_r)
        self._g[seq] = result
        if self.audit is not None:
            self.audit.record("g_test", digest=sequence_digest(seq), output=result,
                              r=self.g_r, r_prime=self.g_r_prime)
        return result

    def _g_shifted_scan(self, seq: tuple[int, ...]) -> np.ndarray:
        """G(seq + x) for every x, going through g_test so results agree
        with (and fill) the per-sequence memo."""
        out = np.empty(self.size, dtype=np.int8)
        for x in range(self.size):
            out[x] = self.g_test(tuple(a ^ x for a in seq))
        return out

    # -------------- find-a-hat ---------------

    def find_a_hat(self) -> FindResult:
        """Search for a sequence a^ with G(a^) = 1 whose shifted acceptance
        mean E_x[G(a^+x)] clears 3*alpha^{2t}/4; falls back to a random
        (flagged) sequence when the attempt budget runs out."""
        if self.find_result is not None:
            return self.find_result
        t = self.sched.t
        a2t = self.alpha ** (2 * t)
        attempts = _ceil_count(self.sched.find_mult *
                               math.log(1.0 / min(self.gamma4, 0.5)) / a2t)
        threshold = 0.75 * a2t
        g_calls_before = self.g_evals
        result = None
        for i in range(attempts):
            g = stream(self.seed, SUB_FIND, i)
            seq = tuple(int(v) for v in g.integers(0, self.size, size=t))
            if self.g_test(seq) != 1:
                continue
            scan = self._g_shifted_scan(seq)
            est = float(scan.mean())
            if est >= threshold:
                self._x = scan
                result = FindResult(seq, True, est, i + 1,
                                    self.g_evals - g_calls_before)
                break
        if result is None:
            g = stream(self.seed, SUB_FIND, attempts)
            seq = tuple(int(v) for v in g.integers(0, self.size, size=t))
            result = FindResult(seq, False, float("nan"), attempts,
                                self.g_evals - g_calls_before)
        self.find_result = result
        if self.audit is not None:
            self.audit.record("find_a_hat", a_hat=list(result.a_hat),
                              verified=result.verified, estimate=result.estimate,
                              attempts=result.attempts_used, g_calls=result.g_calls)
        return result

    # ---------------- X-Test ----------------

    def x_test(self, x: int, a_hat: Sequence[int] | None = None) -> int:
        """X-Test(x) = G-Test(a^ + x)."""
        if a_hat is None:
            a_hat = self.find_a_hat().a_hat
        else:
            a_hat = tuple(int(a) for a in a_hat)
            if self.find_result is not None and a_hat != self.find_result.a_hat:
                return self.g_test(tuple(a ^ x for a in a_hat))
        if self._x is not None and self._x[x] >= 0:
            return int(self._x[x])
        val = self.g_test(tuple(a ^ x for a in a_hat))
        if self._x is not None:
            self._x[x] = val
        return val

    def x_table(self) -> np.ndarray:
        """Memoised X indicator on every point."""
        a_hat = self.find_a_hat().a_hat
        if self._x is None:
            self._x = self._g_shifted_scan(a_hat)
        elif np.any(self._x < 0):
            for x in np.flatnonzero(self._x < 0):
                self._x[x] = self.g_test(tuple(a ^ int(x) for a in a_hat))
        return self._x.copy()

    def x_oracle(self) -> FunctionOracle:
        """The set X = {x : G(a^+x) = 1} as a 0/1 oracle."""
        self.find_a_hat()

        def fn(pts: np.ndarray) -> np.ndarray:
            return np.array([self.x_test(int(p)) for p in pts], dtype=np.int8)

        return FunctionOracle(self.n, fn, name="x_test")

    def mu0_estimate(self) -> float:
        """Estimate of the mean of 1_X (its 0-frequency coefficient)."""
        table = self.x_table()
        mu0 = float(table.mean())
        if self.audit is not None:
            self.audit.record("mu0", value=mu0, mode="full-scan")
        return mu0

    def counters(self) -> dict:
        return {
            "h_fresh_queries": self.h.query_count,
            "z_evals": self.z_evals,
            "g_evals": self.g_evals,
            "rho_evals": self.rho_evals,
            "z_samples_each": self.z_r,
            "g_r": self.g_r,
            "g_r_prime": self.g_r_prime,
        }


# ----- spec-shaped conveniences (one-shot sessions) -----

def z_test(h: FunctionOracle, x: int, sched: ParamSchedule, alpha: float,
           session: SamplingSession | None = None) -> int:
    return (session or SamplingSession(h, alpha, sched)).z_test(x)

def g_test(h: FunctionOracle, seq: Sequence[int], sched: ParamSchedule, alpha: float,
           session: SamplingSession | None = None) -> int:
    return (session or SamplingSession(h, alpha, sched)).g_test(seq)

def find_a_hat(h: FunctionOracle, sched: ParamSchedule, alpha: float,
               session: SamplingSession | None = None) -> FindResult:
    return (session or SamplingSession(h, alpha, sched)).find_a_hat()

def x_test(h: FunctionOracle, x: int, sched: ParamSchedule, alpha: float,
           a_hat: Sequence[int], session: SamplingSession | None = None) -> int:
    sess = session or SamplingSession(h, alpha, sched)
    return sess.x_test(x, a_hat=a_hat)
