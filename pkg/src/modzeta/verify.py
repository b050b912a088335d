"""Named verification suites behind ``modzeta verify``.

Each suite compares two independent computations over a range of inputs and
returns a :class:`VerifyReport`; a suite fails iff some deviation exceeds its
tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from modzeta import expsum
from modzeta.arith import (
    divisor_count,
    fundamental_decomposition,
    is_discriminant,
    is_fundamental,
    kloosterman_complex,
    square_divisor_splits,
)
from modzeta.lfunc import (
    euler_correction,
    l1_fundamental,
    l1_logsin,
    l1_series,
    l_value_D,
    lambda_q,
    lambda_q_kloosterman,
)
from modzeta.pell import pell4_fundamental
from modzeta.quadforms import h_narrow
from modzeta.selberg import StripPoint, geodesic_side_psi, lfunction_side_psi, pgt_smoothed_check


@dataclass
class VerifyReport:
    suite: str
    tolerance: float
    cases: int = 0
    max_deviation: float = 0.0
    failures: int = 0
    details: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def check(self, deviation: float, keep: bool = False, **case) -> bool:
        self.cases += 1
        if math.isnan(deviation):
            deviation = math.inf
        self.max_deviation = max(self.max_deviation, deviation)
        ok = deviation <= self.tolerance
        if not ok:
            self.failures += 1
        if keep or not ok:
            self.details.append({**case, "deviation": deviation, "ok": ok})
        return ok

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def discriminants(lo: int, hi: int):
    return [D for D in range(lo, hi + 1) if is_discriminant(D)]


def pell4_bruteforce(D: int, u_max: int) -> tuple[int, int] | None:
    """Smallest 1 <= u <= u_max with D u^2 + 4 a perfect square."""
    u = np.arange(1, u_max + 1, dtype=object if D * u_max * u_max > 2**62 else np.int64)
    v = D * u * u + 4
    for ui, vi in zip(u.tolist(), v.tolist()):
        r = math.isqrt(vi)
        if r * r == vi:
            return r, ui
    return None


def pell4_convergents(D: int) -> tuple[int, int]:
    """Minimal solution of t^2 - D u^2 = 4 read off the convergents of sqrt(D).

    For D > 16, any solution has t/u (or (t/2)/(u/2) when both are even)
    within 4/(u^2 sqrt D) < 1/(2u^2) of sqrt(D), so it is a convergent.
    """
    if D <= 16:
        raise ValueError("convergent oracle needs D > 16")
    a0 = math.isqrt(D)
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while True:
        for t, u in ((p, q), (2 * p, 2 * q)):
            if t * t - D * u * u == 4:
                return t, u
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev


def suite_bykovskii(tmax: int = 500) -> VerifyReport:
    """sum over Du^2 = t^2-4 of h(D) log eps1(D) against sqrt(t^2-4) L(1, t^2-4)."""
    rep = VerifyReport("bykovskii", 1e-8)
    for t in range(3, tmax + 1):
        D = t * t - 4
        lhs = math.fsum(h_narrow(d) * pell4_fundamental(d).log_eps1 for d, _ in square_divisor_splits(D))
        rhs = math.sqrt(D) * l_value_D(D)
        rep.check(_rel(lhs, rhs), t=t, lhs=lhs, rhs=rhs)
    return rep


PSI_GRID = [(2.0, 0.0), (0.75, 10.0), (0.6, 50.0)]
PSI_XS = [1e3, 1e4, 1e5]


def suite_psi_two_sided(xs=PSI_XS) -> VerifyReport:
    rep = VerifyReport("psi-two-sided", 1e-8)
    for sigma, T in PSI_GRID:
        for x in xs:
            p = StripPoint(sigma, T, x)
            a = lfunction_side_psi(p).value
            b = geodesic_side_psi(p).value
            rep.check(abs(a - b) / abs(a), keep=True, sigma=sigma, T=T, x=x,
                      lside=[a.real, a.imag], gside=[b.real, b.imag])
    return rep


def suite_lambda_kloosterman(qmax: int = 50, tmax: int = 50) -> VerifyReport:
    rep = VerifyReport("lambda-kloosterman", 1e-8)
    for q in range(1, qmax + 1):
        for t in range(3, tmax + 1):
            a = lambda_q(q, t * t - 4)
            b = lambda_q_kloosterman(q, t)
            rep.check(abs(a - b), q=q, t=t, direct=a, kloosterman=b)
    return rep


def suite_weil(nmax: int = 10, cmax: int = 500) -> VerifyReport:
    """|S(n,m;c)| <= tau(c) sqrt(gcd(n,m,c)) sqrt(c); deviation is the excess over the bound."""
    rep = VerifyReport("weil", 0.0)
    for c in range(1, cmax + 1):
        tau = divisor_count(c) if c > 1 else 1
        for n in range(1, nmax + 1):
            for m in range(n, nmax + 1):
                z = kloosterman_complex(n, m, c)
                w = kloosterman_complex(m, n, c)
                bound = tau * math.sqrt(math.gcd(math.gcd(n, m), c) * c)
                # symmetry and reality ride along at rounding level
                if abs(z - w) > 1e-9 or abs(z.imag) > 1e-10:
                    rep.check(math.inf, n=n, m=m, c=c, value=[z.real, z.imag])
                    continue
                rep.check(max(0.0, abs(z.real) - bound), n=n, m=m, c=c, value=z.real, bound=bound)
    return rep


def suite_classnumber_formula(dmax: int = 3000) -> VerifyReport:
    """h(D) log eps1(D) = sqrt(D) L(1, chi_D0) prod_{p|f} (1 - chi_D0(p)/p)."""
    rep = VerifyReport("classnumber-formula", 1e-9)
    for D in discriminants(5, dmax):
        D0, f = fundamental_decomposition(D)
        lhs = h_narrow(D) * pell4_fundamental(D).log_eps1
        rhs = math.sqrt(D) * l1_fundamental(D0) * euler_correction(D0, f)
        rep.check(_rel(lhs, rhs), D=D, lhs=lhs, rhs=rhs)
    return rep


BRUTE_U_MAX = 10**5


def suite_pell_minimal(dmax: int = 2000) -> VerifyReport:
    """Cycle-automorph Pell solutions against brute force (small u) or convergents."""
    rep = VerifyReport("pell-minimal", 0.0)
    for D in discriminants(5, dmax):
        pf = pell4_fundamental(D)
        if pf.u <= BRUTE_U_MAX:
            other = pell4_bruteforce(D, pf.u)
            method = "bruteforce"
        else:
            other = pell4_convergents(D)
            method = "convergents"
        rep.check(0.0 if other == (pf.t, pf.u) else 1.0, D=D, method=method,
                  found=[pf.t, pf.u], oracle=list(other) if other else None)
    return rep


def suite_l1_threeway(dmax: int = 10**4, series_terms: int = 10**6) -> VerifyReport:
    rep = VerifyReport("l1-threeway", 1e-6)
    for d in range(5, dmax + 1):
        if not is_fundamental(d):
            continue
        a = l1_fundamental(d)
        b = l1_logsin(d)
        c = l1_series(d, series_terms)
        rep.check(max(abs(a - b), abs(a - c), abs(b - c)), d=d, smoothed=a, logsin=b, series=c)
    return rep


def suite_pgt(xs=(1e6,), window: float = 0.05) -> VerifyReport:
    rep = VerifyReport("pgt", window)
    for x in xs:
        r = pgt_smoothed_check(x)
        rep.check(abs(r - 1), keep=True, x=x, ratio=r)
    return rep


def suite_expsum_envelope(max_ratio: float = 10.0) -> VerifyReport:
    """Measured |sum| / bound on the grid; deviation is the excess over max_ratio."""
    rep = VerifyReport("expsum-envelope", 0.0)
    worst = 0.0
    for rec in expsum.envelope_scan():
        worst = max(worst, rec.ratio)
        rep.check(max(0.0, rec.ratio - max_ratio), k=rec.k, q2=rec.q2, T=rec.T, N=rec.N, ratio=rec.ratio)
    rep.details.append({"max_ratio": worst})
    # f', f'', f''' against central differences of f
    for T in (1e2, 1e3, 1e4):
        for t in (10.0, 100.0, 1000.0):
            for order, dev in _fd_deviations(T, t).items():
                rep.check(max(0.0, dev - 1e-6), T=T, t=t, derivative=order, rel_error=dev)
    return rep


def _fd_deviations(T: float, t: float) -> dict[str, float]:
    """Relative error of closed-form derivatives against finite differences.

    Differences of f'  are taken on the exact arccosh-free expression for f'
    itself, so each order needs only one differencing step.
    """
    h = t * 1e-4

    def f(u):
        return -(T / math.pi) * math.acosh(u / 2)

    d1 = (f(t + h) - f(t - h)) / (2 * h)
    d2 = (float(expsum.f1(t + h, T)) - float(expsum.f1(t - h, T))) / (2 * h)
    d3 = (float(expsum.f2(t + h, T)) - float(expsum.f2(t - h, T))) / (2 * h)
    return {
        "f1": _rel(d1, float(expsum.f1(t, T))),
        "f2": _rel(d2, float(expsum.f2(t, T))),
        "f3": _rel(d3, float(expsum.f3(t, T))),
    }


QUICK = {
    "bykovskii": {"tmax": 100},
    "psi-two-sided": {"xs": [1e3, 1e4]},
    "lambda-kloosterman": {"qmax": 20, "tmax": 20},
    "weil": {"cmax": 100},
    "classnumber-formula": {"dmax": 500},
    "pell-minimal": {"dmax": 500},
    "l1-threeway": {"dmax": 500},
    "pgt": {"xs": [1e5], "window": 0.1},
    "expsum-envelope": {},
}

SUITES = {
    "bykovskii": suite_bykovskii,
    "psi-two-sided": suite_psi_two_sided,
    "lambda-kloosterman": suite_lambda_kloosterman,
    "weil": suite_weil,
    "classnumber-formula": suite_classnumber_formula,
    "pell-minimal": suite_pell_minimal,
    "l1-threeway": suite_l1_threeway,
    "pgt": suite_pgt,
    "expsum-envelope": suite_expsum_envelope,
}


def run_suite(name: str, **limits) -> VerifyReport:
    if name not in SUITES:
        raise KeyError(name)
    start = time.perf_counter()
    rep = SUITES[name](**limits)
    rep.seconds = time.perf_counter() - start
    return rep

