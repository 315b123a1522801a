from fractions import Fraction

import pytest

from oracles import conv_sums, tail_sum
from wrightcert.interval import DomainError
from wrightcert.sums import SumEstimates, gamma, phi, sum_bound_finite, sum_bound_tail, tail_weight_sum


def test_k0_plain_is_five():
    r = sum_bound_finite(0, 3, "plain")
    assert r.lo <= 5.0 <= r.hi and r.hi - r.lo < 1e-14


def test_k2_plain():
    r = sum_bound_finite(2, 3, "plain")
    assert r.lo <= 1.625 <= r.hi
    assert conv_sums(2, 3)[0] <= r.hi


def test_k3_weighted_dominates():
    r = sum_bound_finite(3, 3, "weighted")
    assert conv_sums(3, 3)[1] <= r.hi


def test_phi_matches_exact_fractions():
    for k in range(11):
        exact = sum(Fraction(1, j**3 * (k - j) ** 3) for j in range(1, k))
        r = phi(k, 3)
        assert Fraction(float(r.lo)) <= exact <= Fraction(float(r.hi))
    assert phi(3, 3).lo <= 0.25 <= phi(3, 3).hi


def test_gamma_and_tail_constants():
    g = gamma(11, 3)
    assert abs(float(g.hi) - 4.0862) < 1e-4
    assert abs(float(sum_bound_tail(3, 11, "plain").hi) - 0.8260) < 1e-4
    assert abs(float(sum_bound_tail(3, 11, "weighted").hi) - 6.0431) < 1e-4


@pytest.mark.parametrize("k", [11, 18, 110])
def test_tail_estimates_dominate(k):
    s, M = 3, 11
    S1, S2 = conv_sums(k, s)
    assert S1 <= float(sum_bound_tail(s, M, "plain").hi) / k ** (s - 1)
    assert S2 <= float(sum_bound_tail(s, M, "weighted").hi) / k ** (s - 1)


def test_eq31_tail():
    b = tail_weight_sum(3, 11)
    assert b.lo <= 0.005 <= b.hi
    assert tail_sum(3, 11) < float(b.hi)


def test_domain_errors():
    with pytest.raises(DomainError):
        sum_bound_finite(1, 2, "weighted")
    with pytest.raises(DomainError):
        sum_bound_tail(3, 2)
    with pytest.raises(DomainError):
        gamma(2, 3)


def test_estimates_object():
    est = SumEstimates(3, 11)
    assert len(est.phi) == 11 and len(est.S1) == 11
    assert est.phi[0].hi == 0.0 and est.phi[1].hi == 0.0
    assert all(v >= 0 for v in est.S1)
