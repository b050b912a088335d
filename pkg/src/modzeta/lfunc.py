"""Real-character L-values at 1, the split sum L(1, D), and its Dirichlet coefficients."""

from __future__ import annotations

import logging
import math
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erfc, exp1

from modzeta.arith import (
    check_discriminant,
    factor,
    fundamental_decomposition,
    is_fundamental,
    kloosterman_complex,
    kronecker,
    kronecker_array,
    square_divisor_splits,
)

log = logging.getLogger(__name__)

# e^{-pi n^2/d} < 1e-17 once n > 3.6 sqrt(d)
_CUTOFF = 3.6


def l1_fundamental(d: int) -> float:
    """L(1, chi_d) for a positive fundamental discriminant d.

    Uses the functional equation of the even character: splitting the theta
    integral at 1 gives
    L(1) = sum chi(n) [erfc(n sqrt(pi/d))/n + E1(pi n^2/d)/sqrt(d)].
    """
    if d <= 1 or not is_fundamental(d):
        raise ValueError(f"{d} is not a positive fundamental discriminant")
    n_max = int(_CUTOFF * math.sqrt(d)) + 2
    n = np.arange(1, n_max + 1)
    chi = kronecker_array(d, n)
    keep = chi != 0
    n, chi = n[keep].astype(float), chi[keep].astype(float)
    terms = chi * (erfc(n * math.sqrt(math.pi / d)) / n + exp1(math.pi * n * n / d) / math.sqrt(d))
    return math.fsum(terms)


def l1_logsin(d: int) -> float:
    """Finite formula -d^{-1/2} sum_{a<d} chi(a) log sin(pi a/d)."""
    if d <= 1 or not is_fundamental(d):
        raise ValueError(f"{d} is not a positive fundamental discriminant")
    a = np.arange(1, d)
    chi = kronecker_array(d, a).astype(float)
    return -math.fsum(chi * np.log(np.sin(np.pi * a / d))) / math.sqrt(d)


def l1_series(d: int, n_terms: int = 10**7) -> float:
    """Partial sums of sum chi(n)/n, averaged over one full period past n_terms.

    Averaging a window of length d kills the oscillating boundary term since
    chi is even and sums to zero over a period.
    """
    if d <= 1 or not is_fundamental(d):
        raise ValueError(f"{d} is not a positive fundamental discriminant")
    period = kronecker_array(d, np.arange(1, d + 1)).astype(float)
    total = n_terms + d
    n = np.arange(1, total + 1, dtype=float)
    chi = np.resize(period, total)
    partial = np.cumsum(chi / n)
    return float(partial[n_terms - 1 : n_terms - 1 + d].mean())


def euler_correction(D0: int, f: int) -> float:
    """prod_{p | f} (1 - (D0/p)/p)."""
    out = 1.0
    for p in factor(f):
        out *= 1.0 - kronecker(D0, p) / p
    return out


def l1_general(d: int) -> float:
    """Sum of (d/n)/n for any nonsquare discriminant d = D0 f^2."""
    D0, f = fundamental_decomposition(d)
    return l1_fundamental(D0) * euler_correction(D0, f)


@dataclass(frozen=True)
class LPart:
    d: int
    l: int
    D0: int
    f_d: int
    value: float


@dataclass(frozen=True)
class LDecomposition:
    D: int
    parts: tuple[LPart, ...]

    @property
    def total(self) -> float:
        return math.fsum(p.value / p.l for p in self.parts)


def l_decomposition(D: int) -> LDecomposition:
    check_discriminant(D)
    parts = []
    for d, l in square_divisor_splits(D):
        D0, f = fundamental_decomposition(d)
        parts.append(LPart(d, l, D0, f, l1_fundamental(D0) * euler_correction(D0, f)))
    return LDecomposition(D, tuple(parts))


class LCache:
    """Map D -> L(1, D) total, optionally persisted as CSV.

    File layout: a ``version,1`` header line followed by ``D,L1_total`` rows
    with 15 significant digits.  Concurrent writers store identical values,
    so last-writer-wins is harmless.
    """

    VERSION = "1"

    def __init__(self, path: Path | str | None = None):
        self.path = Path(path) if path is not None else None
        self._values: dict[int, float] = {}
        self._lock = threading.Lock()
        self._dirty = False
        if self.path is not None and self.path.exists():
            self.load(self.path)

    def __len__(self):
        return len(self._values)

    def __contains__(self, D: int):
        return D in self._values

    def get(self, D: int) -> float:
        v = self._values.get(D)
        if v is None:
            v = l_decomposition(D).total
            with self._lock:
                self._values[D] = v
                self._dirty = True
        return v

    def load(self, path: Path) -> None:
        with open(path) as fh:
            header = fh.readline().strip()
            if header != f"version,{self.VERSION}":
                log.warning("ignoring L-cache %s with header %r", path, header)
                return
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                D, v = line.split(",")
                self._values[int(D)] = float(v)

    def save(self, path: Path | str | None = None) -> None:
        path = Path(path) if path is not None else self.path
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        with self._lock:
            rows = sorted(self._values.items())
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".lcache-", suffix=".csv")
        with os.fdopen(fd, "w") as fh:
            fh.write(f"version,{self.VERSION}\n")
            for D, v in rows:
                fh.write(f"{D},{v:.15g}\n")
        os.replace(tmp, path)
        self._dirty = False


_DEFAULT_CACHE = LCache()


def default_cache() -> LCache:
    return _DEFAULT_CACHE


def set_default_cache(cache: LCache) -> None:
    global _DEFAULT_CACHE
    _DEFAULT_CACHE = cache


def l_value_D(D: int) -> float:
    """L(1, D) = sum over dl^2 = D of L(1, (d/.))/l, cached."""
    return _DEFAULT_CACHE.get(D)


def lambda_q(q: int, D: int) -> int:
    """Coefficient of q^{-z} in L(z, D): sum over dl^2 = D, l^2 | q of l (d/(q/l^2))."""
    if q < 1:
        raise ValueError("q must be positive")
    total = 0
    for d, l in square_divisor_splits(D):
        if q % (l * l) == 0:
            total += l * kronecker(d, q // (l * l))
    return total


def lambda_q_kloosterman(q: int, t: int) -> float:
    """sum over q1^2 q2 = q of q2^{-1} sum_{k mod q2} S(k^2, 1; q2) e(kt/q2)."""
    if q < 1:
        raise ValueError("q must be positive")
    total = 0j
    q1 = 1
    while q1 * q1 <= q:
        if q % (q1 * q1) == 0:
            q2 = q // (q1 * q1)
            inner = 0j
            for k in range(q2):
                phase = (k * t) % q2
                inner += kloosterman_complex(k * k, 1, q2) * complex(
                    math.cos(2 * math.pi * phase / q2), math.sin(2 * math.pi * phase / q2)
                )
            total += inner / q2
        q1 += 1
    if abs(total.imag) > 1e-9:
        raise ArithmeticError(f"lambda_{q} via Kloosterman sums has imaginary part {total.imag}")
    return total.real
