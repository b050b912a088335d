"""Geodesic sums for SL2(Z): the smoothed sum psi_s(x) two ways, and Z'/Z.

``psi_s(x)`` is the sum over primitive hyperbolic classes gamma and j >= 1 with
N(gamma)^j < x of

    log N(gamma) / (1 - N(gamma)^-j) * (1 - N(gamma)^j / x) * N(gamma)^{-js}.

It is computed from class numbers and Pell units of discriminants (the
geodesic side) and, independently, as a sum over traces t of L(1, t^2 - 4)
(the L-function side).  Both group terms by trace t = eps + 1/eps, where
eps(t) = (t + sqrt(t^2 - 4))/2, so N(gamma)^j < x is the same as t < X with
X = sqrt(x) + 1/sqrt(x).
"""

from __future__ import annotations

import cmath
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from modzeta.arith import square_divisor_splits
from modzeta.lfunc import LCache, default_cache
from modzeta.pell import log_eps_trace, pell4_fundamental
from modzeta.quadforms import h_narrow

GEODESIC_X_CAP = 1e8


@dataclass(frozen=True)
class StripPoint:
    sigma: float
    T: float
    x: float

    def __post_init__(self):
        if not 0 < self.sigma <= 2:
            raise ValueError(f"sigma={self.sigma} outside (0, 2]")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if not self.x > 16:
            raise ValueError(f"cutoff x={self.x} must exceed 16")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.T)

    @property
    def X(self) -> float:
        return math.sqrt(self.x) + 1 / math.sqrt(self.x)

    @property
    def in_strip(self) -> bool:
        return 0.5 < self.sigma < 1


@dataclass(frozen=True)
class TraceClass:
    t: int
    log_eps_t: float
    decomposition: tuple[tuple[int, int], ...]
    L1: float

    @property
    def norm(self) -> float:
        """N(gamma) = eps(t)^2."""
        return math.exp(2 * self.log_eps_t)


@dataclass(frozen=True)
class PsiResult:
    value: complex
    n_traces: int
    heuristic_err_pole: float
    heuristic_err_line: float

    @property
    def heuristic_err(self) -> float:
        return self.heuristic_err_pole + self.heuristic_err_line


def heuristic_errors(sigma: float, T: float, x: float) -> tuple[float, float]:
    """T^-2 x^(1-sigma) and T x^(1/2-sigma), implied constants set to 1."""
    T = max(T, 1.0)
    return T**-2 * x ** (1 - sigma), T * x ** (0.5 - sigma)


def trace_limit(X: float) -> int:
    """Largest integer t with t < X."""
    return math.ceil(X) - 1


class TraceTable:
    """Per-trace arrays (log eps(t), L(1, t^2-4)) for t = 3..t_max, grown on demand."""

    def __init__(self, cache: LCache | None = None):
        self.cache = cache
        self.t_max = 2
        self.log_eps = np.zeros(0)
        self.L1 = np.zeros(0)
        self._lock = threading.Lock()

    def _cache(self) -> LCache:
        return self.cache if self.cache is not None else default_cache()

    def ensure(self, t_max: int, threads: int | None = None) -> None:
        with self._lock:
            if t_max <= self.t_max:
                return
            ts = range(self.t_max + 1, t_max + 1)
            cache = self._cache()
            workers = threads or os.cpu_count() or 1
            if workers > 1 and len(ts) > 64:
                with ThreadPoolExecutor(workers) as pool:
                    new_L = list(pool.map(lambda t: cache.get(t * t - 4), ts, chunksize=32))
            else:
                new_L = [cache.get(t * t - 4) for t in ts]
            new_le = [log_eps_trace(t) for t in ts]
            self.log_eps = np.concatenate([self.log_eps, new_le])
            self.L1 = np.concatenate([self.L1, new_L])
            self.t_max = t_max

    def arrays(self, t_max: int, threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        self.ensure(t_max, threads)
        n = max(t_max - 2, 0)
        return self.log_eps[:n], self.L1[:n]


_TABLE = TraceTable()


def trace_table() -> TraceTable:
    return _TABLE


def reset_trace_table(cache: LCache | None = None) -> None:
    global _TABLE
    _TABLE = TraceTable(cache)


def trace_classes(X: float, threads: int | None = None) -> list[TraceClass]:
    if not X > 3:
        raise ValueError("X must exceed 3")
    t_max = trace_limit(X)
    log_eps, L1 = _TABLE.arrays(t_max, threads)
    return [
        TraceClass(t, float(log_eps[t - 3]), tuple(square_divisor_splits(t * t - 4)), float(L1[t - 3]))
        for t in range(3, t_max + 1)
    ]


def _csum(z: np.ndarray) -> complex:
    # correctly rounded, hence independent of evaluation order
    return complex(math.fsum(z.real), math.fsum(z.imag))


def psi(s: complex, x: float, threads: int | None = None) -> tuple[complex, int]:
    """psi_s(x) = 2 sum_{3<=t<X} L(1,t^2-4) (1 - eps(t)^2/x) eps(t)^(1-2s)."""
    X = math.sqrt(x) + 1 / math.sqrt(x)
    t_max = trace_limit(X)
    if t_max < 3:
        return 0j, 0
    le, L1 = _TABLE.arrays(t_max, threads)
    weight = -np.expm1(2 * le - math.log(x))
    terms = 2 * L1 * weight * np.exp((1 - 2 * complex(s)) * le)
    return _csum(terms), len(le)


def lfunction_side_psi(p: StripPoint, threads: int | None = None) -> PsiResult:
    value, n = psi(p.s, p.x, threads)
    return PsiResult(value, n, *heuristic_errors(p.sigma, p.T, p.x))


def geodesic_psi(s: complex, x: float) -> tuple[complex, int]:
    """psi_s(x) from narrow class numbers and fundamental units.

    Sums 2 h(D) log eps1(D) / (1 - eps1^-2j) * (1 - eps1^2j / x) * eps1^(-2js)
    over discriminants D and j >= 1 with eps1(D)^j < sqrt(x).  Every such D
    is (t^2 - 4)/u^2 for some trace t < X, which is how D is enumerated.
    """
    if x > GEODESIC_X_CAP:
        raise ValueError(f"geodesic side limited to x <= {GEODESIC_X_CAP:g}")
    X = math.sqrt(x) + 1 / math.sqrt(x)
    t_max = trace_limit(X)
    discs = sorted({D for t in range(3, t_max + 1) for D, _ in square_divisor_splits(t * t - 4)})
    s = complex(s)
    log_x = math.log(x)
    terms = []
    traces = set()
    for D in discs:
        pf = pell4_fundamental(D)
        le1 = pf.log_eps1
        weight = 2 * h_narrow(D) * le1
        # traces of eps1^j by t_{j+1} = t_1 t_j - t_{j-1}, exact integers
        t_prev, t_j, j = 2, pf.t, 1
        while t_j < X:
            L = j * le1
            traces.add(t_j)
            terms.append(
                weight / -math.expm1(-2 * L) * -math.expm1(2 * L - log_x) * cmath.exp(-2 * s * L)
            )
            t_prev, t_j, j = t_j, pf.t * t_j - t_prev, j + 1
    value = _csum(np.array(terms, dtype=complex)) if terms else 0j
    return value, len(traces)


def geodesic_side_psi(p: StripPoint) -> PsiResult:
    value, n = geodesic_psi(p.s, p.x)
    return PsiResult(value, n, *heuristic_errors(p.sigma, p.T, p.x))


def pole_term(s: complex, x: float) -> complex:
    """x^(1-s) / ((1-s)(2-s)), the residue at the pole of Z'/Z at 1."""
    return cmath.exp((1 - s) * math.log(x)) / ((1 - s) * (2 - s))


def logderiv_strip_estimate(p: StripPoint, threads: int | None = None) -> PsiResult:
    """Estimate of Z'/Z(s) in 1/2 < sigma < 1: psi_s(x) minus the pole term."""
    if not p.in_strip:
        raise ValueError(f"sigma={p.sigma} not in (1/2, 1)")
    if p.T < 10:
        raise ValueError("strip estimate needs T >= 10")
    r = lfunction_side_psi(p, threads)
    return PsiResult(r.value - pole_term(p.s, p.x), r.n_traces, r.heuristic_err_pole, r.heuristic_err_line)


def _mean_tail(s: complex, t0: float) -> complex:
    """2 * integral over t > t0 of eps(t)^(1-2s) dt, L(1, t^2-4) replaced by its mean 1."""
    e0 = (t0 + math.sqrt(t0 * t0 - 4)) / 2
    return 2 * (e0 ** (2 - 2 * s) / (2 * s - 2) - e0 ** (-2 * s) / (2 * s))


def logderiv_dirichlet(s: complex, tail_tol: float = 1e-12, max_trace: int = 4000, threads: int | None = None) -> complex:
    """Z'/Z(s) for Re s > 1 as 2 sum_t L(1,t^2-4) eps(t)^(1-2s).

    Traces are summed explicitly up to the first cutoff where the mean-value
    tail estimate drops below ``tail_tol`` (at most ``max_trace``); the
    estimated tail beyond the cutoff is then added.
    """
    s = complex(s)
    if s.real < 1.05:
        raise ValueError(f"Re s = {s.real} too close to 1 for the Dirichlet series")
    t_max = 3
    while abs(_mean_tail(s, t_max + 0.5)) > tail_tol and t_max < max_trace:
        t_max = min(2 * t_max, max_trace)
    le, L1 = _TABLE.arrays(t_max, threads)
    body = _csum(2 * L1 * np.exp((1 - 2 * s) * le))
    return body + _mean_tail(s, t_max + 0.5)


def pgt_smoothed_check(x: float) -> float:
    """2 psi_0(x) / x, which tends to 1 by the prime geodesic theorem."""
    if x < 1e4:
        raise ValueError("x must be at least 1e4")
    value, _ = psi(0, x)
    return 2 * value.real / x
