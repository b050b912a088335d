"""Fundamental solutions of t^2 - D u^2 = 4 from the principal rho-cycle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from modzeta.arith import check_discriminant
from modzeta.quadforms import IDENTITY, _rho_step, principal_form, rho_matrix


@dataclass(frozen=True)
class PellFundamental:
    D: int
    t: int
    u: int

    def __post_init__(self):
        if self.t * self.t - self.D * self.u * self.u != 4:
            raise ValueError(f"({self.t}, {self.u}) does not solve t^2 - {self.D} u^2 = 4")

    @property
    def log_eps1(self) -> float:
        return log_eps_trace(self.t)


def log_eps_trace(t: int) -> float:
    """log((t + sqrt(t^2 - 4))/2) for an integer t >= 3 of any size."""
    if t < 3:
        raise ValueError("trace must be at least 3")
    if t <= 10**8:
        return math.log((t + math.sqrt(t * t - 4)) / 2)
    # log t + log((1 + sqrt(1 - w))/2) with w = 4/t^2, the second term via log1p
    w = 4.0 / float(t) ** 2 if t < 10**150 else 0.0
    return math.log(t) + math.log1p(-w / (2 * (1 + math.sqrt(1 - w))))


@lru_cache(maxsize=65536)
def pell4_fundamental(D: int) -> PellFundamental:
    """Minimal positive (t, u) with t^2 - D u^2 = 4.

    The product of the rho transition matrices along the cycle of the
    principal form is its fundamental proper automorph ((t-bu)/2, -cu; au, (t+bu)/2)
    up to sign.
    """
    check_discriminant(D)
    f0 = principal_form(D)
    m = IDENTITY
    f = f0
    while True:
        f, step = _rho_step(f)
        m = m @ rho_matrix(step)
        if f == f0:
            break
    t = abs(m.trace)
    u = abs(m.r)  # a = 1 for the principal form
    return PellFundamental(D, t, u)

