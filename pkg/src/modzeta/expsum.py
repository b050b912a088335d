"""Exponential sums over traces with phase f(t) = kt/q2 - (T/pi) log eps(t).

log eps(t) = arccosh(t/2), so f'(t) = k/q2 - (T/pi)/sqrt(t^2-4),
f''(t) = (T/pi) t (t^2-4)^(-3/2) and f'''(t) = -(T/pi)(2t^2+4)(t^2-4)^(-5/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExpSumRecord:
    k: int
    q2: int
    T: float
    N: float
    value: complex
    bound: float
    branch: str

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.bound


def phase(k: int, q2: int, T: float, t: np.ndarray) -> np.ndarray:
    """f(t) mod 1 with the linear part reduced exactly as (k t mod q2)/q2."""
    t = np.asarray(t, dtype=np.int64)
    lin = np.mod(k * t, q2) / q2
    return np.mod(lin - (T / math.pi) * np.arccosh(t / 2.0), 1.0)


def trace_range(N: float) -> np.ndarray:
    return np.arange(math.ceil(N), math.ceil(2 * N), dtype=np.int64)


def exp_sum(k: int, q2: int, T: float, N: float) -> complex:
    """Sum of e(f(t)) over integers N <= t < 2N."""
    if N < 3:
        raise ValueError("N must be at least 3")
    if q2 < 1:
        raise ValueError("q2 must be positive")
    f = phase(k, q2, T, trace_range(N))
    z = np.exp(2j * np.pi * f)
    return complex(math.fsum(z.real), math.fsum(z.imag))


def vdc_bound(T: float, N: float) -> float:
    """min(T^(1/2) + T^(-1/2) N, T^(1/6) N^(1/2))."""
    if T <= 0 or N <= 0:
        raise ValueError("T and N must be positive")
    return min(math.sqrt(T) + N / math.sqrt(T), T ** (1 / 6) * math.sqrt(N))


def vdc_branch(T: float, N: float) -> str:
    """Dominant term by range: N < T^(2/3), T^(2/3) <= N < T, N >= T."""
    if N < T ** (2 / 3):
        return "T^1/6*N^1/2"
    if N < T:
        return "T^1/2"
    return "T^-1/2*N"


def f1(t, T, k=0, q2=1):
    return k / q2 - (T / math.pi) / np.sqrt(np.asarray(t, dtype=float) ** 2 - 4)


def f2(t, T):
    t = np.asarray(t, dtype=float)
    return (T / math.pi) * t * (t * t - 4) ** -1.5


def f3(t, T):
    t = np.asarray(t, dtype=float)
    return -(T / math.pi) * (2 * t * t + 4) * (t * t - 4) ** -2.5


def derivative_window(T: float, N: float) -> tuple[float, float, float, float]:
    """(Lambda2, Lambda3, eta2, eta3) for |f''| and |f'''| on [N, 2N].

    Both magnitudes decrease in t, so the minimum sits at 2N and the
    maximum at N.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    lam2, top2 = abs(float(f2(2 * N, T))), abs(float(f2(N, T)))
    lam3, top3 = abs(float(f3(2 * N, T))), abs(float(f3(N, T)))
    return lam2, lam3, top2 / lam2, top3 / lam3


def lemma_bounds(T: float, N: float) -> tuple[float, float]:
    """Second- and third-derivative test bounds on [N, 2N] with absolute constant 1."""
    lam2, lam3, eta2, eta3 = derivative_window(T, N)
    length = N
    second = eta2 * math.sqrt(lam2) * length + lam2**-0.5
    third = math.sqrt(eta3) * lam3 ** (1 / 6) * length + lam3 ** (-1 / 6) * math.sqrt(length)
    return second, third


def record(k: int, q2: int, T: float, N: float) -> ExpSumRecord:
    return ExpSumRecord(k, q2, T, N, exp_sum(k, q2, T, N), vdc_bound(T, N), vdc_branch(T, N))


def envelope_grid(Ts=(1e2, 1e3, 1e4), q2s=(1, 2, 5), ks=(0, 1, 2)):
    for T in Ts:
        for N in (T ** (1 / 3), T ** (2 / 3), T, 4 * T):
            for q2 in q2s:
                for k in ks:
                    yield k, q2, T, N


def envelope_scan(**grid) -> list[ExpSumRecord]:
    return [record(k, q2, T, N) for k, q2, T, N in envelope_grid(**grid)]
