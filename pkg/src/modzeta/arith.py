"""Exact integer substrate: factor sieve, Kronecker symbols, square splits, Kloosterman sums."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


def is_discriminant(D: int) -> bool:
    """True for positive nonsquare D congruent to 0 or 1 mod 4."""
    if D <= 0 or D % 4 not in (0, 1):
        return False
    r = math.isqrt(D)
    return r * r != D


def check_discriminant(D: int) -> None:
    if not isinstance(D, (int, np.integer)):
        raise TypeError(f"discriminant must be an integer, got {D!r}")
    if not is_discriminant(int(D)):
        raise ValueError(f"{D} is not a positive nonsquare discriminant (0 or 1 mod 4)")


@dataclass(frozen=True)
class FactorSieve:
    """Smallest-prime-factor table for 2..limit.

    Built once; read-only afterwards so it can be shared between threads.
    """

    limit: int
    spf: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, limit: int) -> FactorSieve:
        if limit < 2:
            raise ValueError("sieve limit must be at least 2")
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        rest = np.nonzero(spf == 0)[0]
        spf[rest] = rest
        spf[:2] = 0
        spf.setflags(write=False)
        return cls(limit, spf)

    def factor(self, n: int) -> dict[int, int]:
        """Prime factorization of 1 <= n <= limit as {p: exponent}."""
        if n < 1 or n > self.limit:
            raise ValueError(f"{n} outside sieve range 1..{self.limit}")
        out: dict[int, int] = {}
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out

    def factor_product(self, *ns: int) -> dict[int, int]:
        """Factor a product without forming it, e.g. t^2-4 as (t-2)(t+2)."""
        out: dict[int, int] = {}
        for n in ns:
            for p, e in self.factor(n).items():
                out[p] = out.get(p, 0) + e
        return out


_SIEVE: FactorSieve | None = None


def shared_sieve(limit: int) -> FactorSieve:
    """Process-wide sieve, rebuilt (doubling) when a larger limit is requested."""
    global _SIEVE
    if _SIEVE is None or _SIEVE.limit < limit:
        size = max(limit, 2 * _SIEVE.limit if _SIEVE else 1 << 16)
        _SIEVE = FactorSieve.build(size)
    return _SIEVE


def trial_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def factor(n: int) -> dict[int, int]:
    if n <= (1 << 22):
        return shared_sieve(max(n, 2)).factor(n)
    return trial_factor(n)


def divisors_from_factorization(fac: dict[int, int]) -> list[int]:
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for e in factor(n).values())


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) by the binary reciprocity algorithm."""
    if n == 0:
        return 1 if d in (1, -1) else 0
    if d % 2 == 0 and n % 2 == 0:
        return 0
    sign = 1
    if n < 0:
        n = -n
        if d < 0:
            sign = -1
    v = (n & -n).bit_length() - 1
    n >>= v
    if v & 1 and d & 7 in (3, 5):
        sign = -sign
    # n odd and positive from here: Jacobi symbol (d/n)
    a = d % n
    while a:
        while a & 1 == 0:
            a >>= 1
            if n & 7 in (3, 5):
                sign = -sign
        a, n = n, a
        if a & 3 == 3 and n & 3 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def kronecker_array(d: int, n: np.ndarray) -> np.ndarray:
    """Vectorized (d/n) for fixed d and an array of positive n (int64 range)."""
    n = np.asarray(n, dtype=np.int64)
    if np.any(n <= 0):
        raise ValueError("kronecker_array needs positive moduli")
    out = np.ones(n.shape, dtype=np.int64)
    # 2-part of n
    tz = _trailing_zeros(n)
    n = n >> tz
    if d % 2 == 0:
        out[tz > 0] = 0
    elif d % 8 in (3, 5):
        out[(tz & 1) == 1] *= -1
    a = np.mod(d, n)
    m = n.copy()
    live = (a != 0) & (out != 0)
    while np.any(live):
        idx = np.nonzero(live)[0]
        ai, mi = a[idx], m[idx]
        tz = _trailing_zeros(ai)
        ai = ai >> tz
        flip = ((tz & 1) == 1) & (((mi & 7) == 3) | ((mi & 7) == 5))
        flip ^= ((ai & 3) == 3) & ((mi & 3) == 3)
        out[idx[flip]] *= -1
        a[idx] = np.mod(mi, ai)
        m[idx] = ai
        live[idx] = a[idx] != 0
    out[m != 1] = 0
    return out


def _trailing_zeros(a: np.ndarray) -> np.ndarray:
    low = a & -a
    return np.where(low > 0, np.log2(np.maximum(low, 1)).round().astype(np.int64), 0)


def square_divisor_splits(D: int) -> list[tuple[int, int]]:
    """Pairs (d, l) with d*l^2 = D and d = 0, 1 mod 4, ordered by l."""
    if D <= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a positive integer congruent to 0 or 1 mod 4")
    fac = factor(D)
    half = {p: e // 2 for p, e in fac.items() if e >= 2}
    out = []
    for l in divisors_from_factorization(half):
        d = D // (l * l)
        if d % 4 in (0, 1):
            out.append((d, l))
    return out


def is_fundamental(d: int) -> bool:
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(abs(n)).values())


def fundamental_decomposition(D: int) -> tuple[int, int]:
    """Write a nonsquare discriminant as D0*f^2 with D0 fundamental."""
    if D <= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a positive discriminant")
    r = math.isqrt(D)
    if r * r == D:
        raise ValueError(f"{D} is a perfect square")
    # the fundamental part is the last (largest l) admissible split
    d, l = square_divisor_splits(D)[-1]
    return d, l


@lru_cache(maxsize=4096)
def _unit_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    units, invs = [], []
    for a in range(c):
        if math.gcd(a, c) == 1:
            units.append(a)
            invs.append(pow(a, -1, c) if c > 1 else 0)
    return np.array(units, dtype=np.int64), np.array(invs, dtype=np.int64)


def kloosterman_complex(n: int, m: int, c: int) -> complex:
    if c < 1:
        raise ValueError("modulus c must be positive")
    a, b = _unit_inverses(c)
    # reduce numerators exactly before the angle is formed
    num = (a * (m % c) + b * (n % c)) % c
    return complex(np.exp(2j * np.pi * num / c).sum())


def kloosterman(n: int, m: int, c: int) -> float:
    """S(n, m; c) = sum over a*b = 1 mod c of e((a*m + b*n)/c)."""
    z = kloosterman_complex(n, m, c)
    if abs(z.imag) > 1e-10:
        raise ArithmeticError(f"S({n},{m};{c}) has imaginary part {z.imag}")
    return z.real
