"""Reduction theory of indefinite binary quadratic forms.

Forms are ``[a, b, c] = a x^2 + b x y + c y^2`` with positive nonsquare
discriminant ``D = b^2 - 4ac``.  All control flow uses exact integer
comparisons against ``isqrt(D)``; since D is never a square, ``sqrt(D)``
lies strictly between ``r = isqrt(D)`` and ``r + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

from modzeta.arith import check_discriminant, divisors_from_factorization, factor

if TYPE_CHECKING:
    from modzeta.pell import PellFundamental

DISC_CAP = 1 << 62


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        D = self.disc
        if D <= 0 or math.isqrt(D) ** 2 == D:
            raise ValueError(f"{self} has discriminant {D}, need positive nonsquare")
        if math.gcd(math.gcd(self.a, self.b), self.c) != 1:
            raise ValueError(f"{self} is not primitive")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def act(self, m: Matrix2) -> QuadForm:
        """The form (x, y) -> f(p x + q y, r x + s y)."""
        a, b, c = self.a, self.b, self.c
        p, q, r, s = m.p, m.q, m.r, m.s
        return QuadForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def __str__(self):
        return f"[{self.a},{self.b},{self.c}]"


@dataclass(frozen=True)
class Matrix2:
    """Integer 2x2 matrix ((p, q), (r, s))."""

    p: int
    q: int
    r: int
    s: int

    @property
    def det(self) -> int:
        return self.p * self.s - self.q * self.r

    @property
    def trace(self) -> int:
        return self.p + self.s

    def __matmul__(self, other: Matrix2) -> Matrix2:
        return Matrix2(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def norm(self) -> float:
        """Square of the larger eigenvalue (absolute value) of a hyperbolic matrix."""
        t = abs(self.trace)
        if t <= 2 or self.det != 1:
            raise ValueError("norm is defined for hyperbolic SL2(Z) matrices only")
        return ((t + math.sqrt(t * t - 4)) / 2) ** 2


IDENTITY = Matrix2(1, 0, 0, 1)


def is_reduced(form: QuadForm) -> bool:
    """Exact test of |sqrt(D) - 2|a|| < b < sqrt(D)."""
    D = form.disc
    a2, b = 2 * abs(form.a), form.b
    return 0 < b and b * b < D and D < (a2 + b) ** 2 and (a2 <= b or (a2 - b) ** 2 < D)


def _rho_step(form: QuadForm) -> tuple[QuadForm, int]:
    a, b, c = form.a, form.b, form.c
    D = form.disc
    r = math.isqrt(D)
    m = 2 * abs(c)
    if c * c < D:
        # largest b' <= r with b' = -b mod 2|c|; then b' + 2|c| > sqrt(D)
        b1 = r - (r + b) % m
    else:
        # normalize into (-|c|, |c|] while far from reduced
        b1 = -b % m
        if b1 > abs(c):
            b1 -= m
    step = (b1 + b) // (2 * c)
    return QuadForm(c, b1, (b1 * b1 - D) // (4 * c)), step


def rho(form: QuadForm) -> QuadForm:
    """One reduction step [a, b, c] -> [c, b', (b'^2 - D)/4c]."""
    return _rho_step(form)[0]


def rho_matrix(step: int) -> Matrix2:
    """Transition matrix with f.act(rho_matrix(s)) == rho(f), where b' = -b + 2cs."""
    return Matrix2(0, -1, 1, step)


def reduce(form: QuadForm) -> QuadForm:
    return reduce_with_matrix(form)[0]


def reduce_with_matrix(form: QuadForm) -> tuple[QuadForm, Matrix2]:
    """Iterate rho to a reduced form; also return M with form.act(M) equal to the result."""
    m = IDENTITY
    f = form
    while not is_reduced(f):
        f, step = _rho_step(f)
        m = m @ rho_matrix(step)
    return f, m


def principal_form(D: int) -> QuadForm:
    """The reduced form [1, b, (b^2 - D)/4] with b the largest admissible value below sqrt(D)."""
    check_discriminant(D)
    r = math.isqrt(D)
    b = r if (r - D) % 2 == 0 else r - 1
    return QuadForm(1, b, (b * b - D) // 4)


def cycle(form: QuadForm) -> list[QuadForm]:
    """The rho-orbit of a reduced form."""
    if not is_reduced(form):
        raise ValueError(f"{form} is not reduced")
    out = [form]
    f = rho(form)
    while f != form:
        out.append(f)
        f = rho(f)
    return out


def reduced_forms(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D."""
    check_discriminant(D)
    if D > DISC_CAP:
        raise ValueError(f"discriminant {D} exceeds cap {DISC_CAP}")
    r = math.isqrt(D)
    out = []
    for b in range(2 - D % 2, r + 1, 2):
        n = (D - b * b) // 4  # = -ac > 0
        for a in divisors_from_factorization(factor(n)):
            c = -(n // a)
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            for sa, sc in ((a, c), (-a, -c)):
                f = QuadForm(sa, b, sc)
                if is_reduced(f):
                    out.append(f)
    return out


@dataclass(frozen=True)
class ClassData:
    D: int
    reduced_forms: tuple[QuadForm, ...]
    cycles: tuple[tuple[QuadForm, ...], ...]

    @property
    def h_narrow(self) -> int:
        return len(self.cycles)


@lru_cache(maxsize=8192)
def class_data(D: int) -> ClassData:
    """Reduced forms of D split into rho-cycles; one cycle per narrow class."""
    forms = reduced_forms(D)
    seen: set[QuadForm] = set()
    cycles = []
    for f in forms:
        if f in seen:
            continue
        cyc = cycle(f)
        seen.update(cyc)
        cycles.append(tuple(cyc))
    if len(seen) != len(forms):
        raise AssertionError(f"rho left the reduced set for D={D}")
    return ClassData(D, tuple(forms), tuple(cycles))


def h_narrow(D: int) -> int:
    return class_data(D).h_narrow


def form_to_matrix(form: QuadForm, pell: PellFundamental) -> Matrix2:
    """Hyperbolic matrix ((t+bu)/2, -cu; au, (t-bu)/2) attached to a form."""
    if pell.D != form.disc:
        raise ValueError(f"Pell data for D={pell.D} does not match {form} (D={form.disc})")
    t, u = pell.t, pell.u
    a, b, c = form.a, form.b, form.c
    if (t + b * u) % 2:
        raise ArithmeticError("t and bu have different parity")
    m = Matrix2((t + b * u) // 2, -c * u, a * u, (t - b * u) // 2)
    assert m.det == 1
    return m
