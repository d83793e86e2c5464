"""End-to-end oracle-access pipeline producing a subspace certified to sit
inside the fourfold sumset of {h = 1}.

Stages: find a good estimator sequence a^, expose X = {x : G(a^+x) = 1} as
an oracle, estimate its mean mu0, run the heavy-coefficient search on
2*1_X - 1 at threshold mu0/8, and take the orthogonal complement of the
recovered characters.  The certificate then checks h*h*h*h > 0 on V, exactly
when the full table fits and by per-point Z sampling otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .f2core import PointSet, Subspace, TABLE_DIM, enumerate_points
from .fourier import RealTable
from .glalgo import CoefficientList, goldreich_levin
from .periodicity import Certificate
from .sampling import (SUB_CERT, AuditLog, FunctionOracle, ParamSchedule,
                       SamplingSession, paper_parameters, stream)


@dataclass
class BogolyubovResult:
    V: Subspace
    mu0: float
    K_list: CoefficientList
    schedule: ParamSchedule
    certificate: Certificate
    a_hat: tuple[int, ...]
    a_hat_verified: bool
    diagnostics: dict

    def to_json_dict(self) -> dict:
        return {
            "V": self.V.to_json_dict(),
            "codim": self.V.codim,
            "mu0": self.mu0,
            "K_list": self.K_list.to_json_dict(),
            "schedule": self.schedule.to_json_dict(),
            "certificate": self.certificate.to_json_dict(),
            "a_hat": [f"{a:#x}" for a in self.a_hat],
            "a_hat_verified": self.a_hat_verified,
            "diagnostics": self.diagnostics,
        }


def verify_certificate(h_table: RealTable, v: Subspace) -> Certificate:
    """Exact h*h*h*h > 0 on V for a 0/1 table: membership of every point of
    V in the fourfold sumset of {h = 1}, witness = smallest failing point."""
    if h_table.n > TABLE_DIM:
        raise ValueError("exact certificate needs the full table")
    support = PointSet(h_table.n, h_table.values > 0.5)
    if support.size == 0:
        return Certificate("exact-fail", witness=0, checked=0,
                           details={"reason": "empty support"})
    four = support.iterated_sum(4)
    members = np.sort(enumerate_points(v))
    ok = four.mask[members]
    if ok.all():
        return Certificate("exact-pass", checked=int(members.size))
    return Certificate("exact-fail",
                       witness=int(members[np.flatnonzero(~ok)[0]]),
                       checked=int(members.size))


def _sampled_certificate(session: SamplingSession, v: Subspace,
                         sched: ParamSchedule) -> Certificate:
    """Z-sample members of V: Z(v) = 1 places v in the thick part of h*h,
    hence in 2A and in 4A.  Per-point failure gamma1 union-bounds into the
    reported confidence."""
    if v.dim <= int(math.log2(sched.cert_sample_cap)):
        members = enumerate_points(v)
    else:
        g = stream(sched.seed, SUB_CERT)
        basis = np.array(v.span_basis(), dtype=np.int64)
        coeffs = g.integers(0, 2, size=(sched.cert_sample_cap, len(basis)))
        members = np.unique(_combine(coeffs, basis))
    hits = np.array([session.z_test(int(p)) for p in members])
    checked = int(members.size)
    if hits.all():
        return Certificate("sampled-pass",
                           confidence=max(0.0, 1.0 - checked * session.gamma1),
                           checked=checked)
    return Certificate("exact-fail",
                       witness=int(np.sort(members[hits == 0])[0]),
                       checked=checked,
                       details={"mode": "sampled"})


def _combine(coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    out = np.zeros(coeffs.shape[0], dtype=np.int64)
    for j in range(len(basis)):
        out ^= coeffs[:, j] * basis[j]
    return out


def quasipoly_bogolyubov(h: FunctionOracle, alpha: float, gamma_prime: float,
                         sched: ParamSchedule, certificate_mode: str = "auto",
                         audit: AuditLog | None = None) -> BogolyubovResult:
    """Run the full sampled pipeline against a 0/1 oracle of density >= alpha.

    certificate_mode: "exact" forces the full-table check, "sampled" forces
    per-point Z sampling, "auto" picks exact whenever the table fits.
    """
    if gamma_prime is not None:
        sched = sched_with_gamma(sched, gamma_prime)
    else:
        gamma_prime = sched.gamma_prime
    session = SamplingSession(h, alpha, sched, audit=audit)
    find = session.find_a_hat()
    x_table = session.x_table()
    mu0 = session.mu0_estimate()
    diagnostics = {
        "counters": session.counters(),
        "find": {"attempts": find.attempts_used, "estimate": find.estimate,
                 "verified": find.verified, "g_calls": find.g_calls},
        "mu0_floor": 0.25 * alpha ** (2 * sched.t),
        "paper": paper_parameters(alpha, application="bogolyubov-sampled"),
    }

    if not find.verified or mu0 <= 0.0:
        v = Subspace.full(h.n)
        empty = CoefficientList((), nu=1.0, delta_fail=gamma_prime, k_cap=0)
        return BogolyubovResult(v, mu0, empty, sched,
                                Certificate("unverified"), find.a_hat,
                                find.verified, diagnostics)

    # the +-1 recoding g = 2*1_X - 1 doubles every nonzero coefficient, so
    # the 1_X targets (threshold mu0/8, accuracy mu0/16) become nu = mu0/8
    # with keep-filter 3*mu0/16 on |c|
    nu = mu0 / 8.0
    signed = FunctionOracle(h.n, lambda pts: 2.0 * x_table[pts] - 1.0,
                            name="x_signed", integer_valued=False)
    gl = goldreich_levin(signed, nu=nu, delta=gamma_prime / 2.0,
                         seed=sched.seed,
                         sample_floor=sched.gl_sample_floor,
                         sample_cap=sched.gl_sample_cap,
                         k_cap=sched.gl_k_cap, mult=sched.gl_mult,
                         audit=audit)
    keep_thr = 3.0 * mu0 / 16.0
    heavy = [alpha_pt for alpha_pt, c in gl.entries
             if alpha_pt != 0 and abs(c) >= keep_thr]
    v = Subspace.from_perp_vectors(h.n, heavy)
    diagnostics["gl"] = {"nu": nu, "keep_threshold": keep_thr,
                         "candidates": len(gl), "kept": len(heavy)}
    diagnostics["codim_bounds"] = {
        "gl_cap": 4.0 / nu ** 2,
        "chang_form": 32.0 * math.log2(2.0 / max(mu0, 1e-300)),
    }

    if certificate_mode not in ("auto", "exact", "sampled"):
        raise ValueError("certificate_mode must be auto|exact|sampled")
    use_exact = certificate_mode == "exact" or (
        certificate_mode == "auto" and h.n <= TABLE_DIM)
    if use_exact:
        cert = verify_certificate(RealTable(h.n, h.full_table().astype(float)), v)
    else:
        cert = _sampled_certificate(session, v, sched)
    return BogolyubovResult(v, mu0, gl, sched, cert, find.a_hat,
                            find.verified, diagnostics)


def sched_with_gamma(sched: ParamSchedule, gamma_prime: float) -> ParamSchedule:
    from dataclasses import replace
    return replace(sched, gamma_prime=gamma_prime)
