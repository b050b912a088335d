import math

import mpmath
import numpy as np
import pytest

from modzeta.arith import is_fundamental, kronecker, kronecker_array, square_divisor_splits
from modzeta.lfunc import (
    LCache,
    l1_fundamental,
    l1_general,
    l1_logsin,
    l1_series,
    l_decomposition,
    l_value_D,
    lambda_q,
    lambda_q_kloosterman,
)

mpmath.mp.dps = 30

# class-number-formula closed forms h log(eps)/sqrt(d) * 2 with h = 1
L5 = float(2 / mpmath.sqrt(5) * mpmath.log((1 + mpmath.sqrt(5)) / 2))
L8 = float(2 / mpmath.sqrt(8) * mpmath.log(1 + mpmath.sqrt(2)))
L12 = float(2 / mpmath.sqrt(12) * mpmath.log(2 + mpmath.sqrt(3)))


def test_closed_forms_recomputed():
    assert L5 == pytest.approx(0.4304089410, abs=1e-10)
    assert L8 == pytest.approx(0.6232252401, abs=1e-10)
    assert L12 == pytest.approx(0.7603459963, abs=1e-10)
    # log-sin form for d = 5 collapses to (2/sqrt5) log(2 cos 36 deg)
    assert L5 == pytest.approx(2 / math.sqrt(5) * math.log(2 * math.cos(math.pi / 5)), abs=1e-15)


@pytest.mark.parametrize("d,expected", [(5, L5), (8, L8), (12, L12)])
def test_l1_fundamental_spot_values(d, expected):
    assert l1_fundamental(d) == pytest.approx(expected, abs=1e-10)
    assert l1_logsin(d) == pytest.approx(expected, abs=1e-10)
    assert l1_series(d, 10**6) == pytest.approx(expected, abs=1e-6)


def test_l1_fundamental_against_digamma_formula():
    # L(1, chi) = -(1/d) sum_a chi(a) digamma(a/d), in 30-digit arithmetic
    for d in (13, 17, 21, 24, 28, 33, 229, 1001, 4001):
        assert is_fundamental(d)
        ref = float(-mpmath.fsum(kronecker(d, a) * mpmath.digamma(mpmath.mpf(a) / d) for a in range(1, d)) / d)
        assert l1_fundamental(d) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("d", [1, 4, 9, 45, 20, -3, 7])
def test_l1_fundamental_rejects(d):
    with pytest.raises(ValueError):
        l1_fundamental(d)


def test_l1_general_examples():
    assert kronecker(5, 3) == -1 and kronecker(5, 2) == -1
    assert l1_general(45) == pytest.approx(L5 * (1 + 1 / 3), abs=1e-10)
    assert l1_general(45) == pytest.approx(0.5738786, abs=1e-7)
    assert l1_general(20) == pytest.approx(L5 * 1.5, abs=1e-10)
    assert l1_general(20) == pytest.approx(0.6456134, abs=1e-7)
    for d in (5, 8, 12, 13, 9997):
        if is_fundamental(d):
            assert l1_general(d) == l1_fundamental(d)
    with pytest.raises(ValueError):
        l1_general(36)


def test_l1_general_is_the_imprimitive_series():
    # sum_n (d/n)/n for imprimitive d, partial sums averaged over one period
    for d in (45, 48, 80, 300):
        n_terms = 2 * 10**5
        period = kronecker_array(d, np.arange(1, d + 1)).astype(float)
        total = n_terms + d
        n = np.arange(1, total + 1, dtype=float)
        partial = np.cumsum(np.resize(period, total) / n)
        ref = partial[n_terms - 1 : n_terms - 1 + d].mean()
        assert l1_general(d) == pytest.approx(ref, abs=1e-6)


def test_l_value_D_examples():
    assert l_value_D(5) == pytest.approx(L5, abs=1e-10)
    assert l_value_D(12) == pytest.approx(L12, abs=1e-10)
    dec = l_decomposition(45)
    assert [(p.d, p.l) for p in dec.parts] == [(45, 1), (5, 3)]
    assert dec.total == pytest.approx(0.5738786 + 0.1434696, abs=1e-6)
    assert dec.total == pytest.approx(L5 * 4 / 3 + L5 / 3, abs=1e-10)


def test_l_decomposition_parts_match_splits():
    for D in (32, 45, 96, 5 * 144, 12 * 25, 10**4 - 4):
        dec = l_decomposition(D)
        assert [(p.d, p.l) for p in dec.parts] == square_divisor_splits(D)
        assert dec.total > 0
        for p in dec.parts:
            assert p.D0 * p.f_d**2 == p.d


def test_l_value_positive_on_traces():
    for t in range(3, 600):
        assert l_value_D(t * t - 4) > 0


def test_lambda_examples():
    for D in (5, 12, 45, 96, 221):
        assert lambda_q(1, D) == 1
    for t in range(3, 40):
        assert lambda_q(2, t * t - 4) == (0 if t % 2 == 0 else -1)
    assert lambda_q_kloosterman(1, 7) == pytest.approx(1.0)
    assert lambda_q_kloosterman(2, 5) == pytest.approx(-1.0, abs=1e-12)
    assert lambda_q_kloosterman(2, 4) == pytest.approx(0.0, abs=1e-12)


def test_lambda_q_four_by_hand():
    # q = 4: l = 1 gives (D/4); l = 2 adds 2 when D/4 = 0, 1 mod 4
    for t in range(3, 60):
        D = t * t - 4
        expected = kronecker(D, 4) + (2 if D % 4 == 0 and (D // 4) % 4 in (0, 1) else 0)
        assert lambda_q(4, D) == expected
        assert lambda_q_kloosterman(4, t) == pytest.approx(expected, abs=1e-9)


def test_lambda_identity_small_grid():
    for q in range(1, 25):
        for t in range(3, 25):
            assert lambda_q_kloosterman(q, t) == pytest.approx(lambda_q(q, t * t - 4), abs=1e-8)


def riesz_partial(D, Q):
    """sum_{q <= Q} lambda_q(D)/q (1 - q/Q)^2, vectorized over q."""
    total = 0.0
    for d, l in square_divisor_splits(D):
        m = np.arange(1, Q // (l * l) + 1)
        q = (l * l) * m
        chi = kronecker_array(d, m).astype(float)
        total += math.fsum(l * chi / q * (1 - q / Q) ** 2)
    return total


@pytest.mark.parametrize("D", [5, 12, 21, 32, 45, 77, 96, 221, 320, 480])
def test_coefficients_sum_to_l_value(D):
    assert riesz_partial(D, 10**6) == pytest.approx(l_value_D(D), abs=1e-4)


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "sub" / "lcache.csv"
    cache = LCache(path)
    values = {D: cache.get(D) for D in (5, 12, 45, 221)}
    cache.save()
    lines = path.read_text().splitlines()
    assert lines[0] == "version,1"
    assert lines[1] == f"5,{values[5]:.15g}"
    assert len(lines) == 5
    again = LCache(path)
    assert len(again) == 4
    for D, v in values.items():
        assert again.get(D) == pytest.approx(v, rel=1e-14)


def test_cache_ignores_unknown_version(tmp_path):
    path = tmp_path / "lcache.csv"
    path.write_text("version,0\n5,1.0\n")
    assert len(LCache(path)) == 0
