"""Rigorous upper bounds for the convolution weight sums.

With omega_0 = 1 and omega_k = |k|^s the bilateral sums

    S1(k) = sum_{k1+k2=k} 1/(omega_k1 omega_k2)
    S2(k) = sum_{k1+k2=k} |k1|/(omega_k1 omega_k2)

are bounded for k < M by finite formulas involving
phi_k = sum_{k1=1}^{k-1} 1/(k1^s (k-k1)^s), and for k >= M by
C/k^(s-1) with k-independent constants built from gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .interval import PI, DomainError, Interval

__all__ = [
    "SumEstimates",
    "phi",
    "gamma",
    "sum_bound_finite",
    "sum_bound_tail",
    "tail_weight_sum",
]


def _pow(base: Interval, s: int) -> Interval:
    return base ** int(s)


def _check_s(s):
    if int(s) != s:
        raise DomainError("only integer exponents s are supported")


def phi(k: int, s: int) -> Interval:
    """phi_k; zero for k <= 1 (empty sum)."""
    _check_s(s)
    if k <= 1:
        return Interval(0.0)
    k1 = np.arange(1, k, dtype=float)
    terms = Interval(1.0) / (_pow(Interval(k1), s) * _pow(Interval(k - k1), s))
    return terms.sum(axis=0)


def _omega(k: int, s: int) -> Interval:
    return Interval(1.0) if k == 0 else _pow(Interval(float(k)), s)


def sum_bound_finite(k: int, s: int, kind: str = "plain") -> Interval:
    """Upper enclosure of S1(k) ('plain') or S2(k) ('weighted') for finite k."""
    _check_s(s)
    if s < 2:
        raise DomainError("s must be at least 2")
    one = Interval(1.0)
    sm1 = Interval(float(s - 1))
    if kind == "plain":
        return phi(k, s) + (one / _omega(k, s)) * (Interval(4.0) + Interval(2.0) / sm1)
    if kind == "weighted":
        if s <= 2:
            raise DomainError("the weighted bound needs s > 2")
        sm2 = Interval(float(s - 2))
        kp1 = Interval(float(k + 1))
        t1 = (one / _pow(kp1, s)) * (one + one / sm2)
        t2 = Interval(float(k)) / 2.0 * phi(k, s)
        t3 = Interval(float(k)) / _omega(k, s)
        t4 = (one / _pow(kp1, s - 1)) * (one + one / sm1)
        return t1 + t2 + t3 + t4
    raise ValueError(f"unknown kind {kind!r}")


def gamma(M: int, s: int) -> Interval:
    """2[M/(M-1)]^s + [4 ln(M-2)/M + (pi^2-6)/3][2/M + 1/2]^(s-2)."""
    _check_s(s)
    if M < 3:
        raise DomainError("gamma needs M >= 3")
    Mi = Interval(float(M))
    t1 = Interval(2.0) * _pow(Mi / Interval(float(M - 1)), s)
    lg = Interval(float(M - 2)).log()
    t2 = Interval(4.0) * lg / Mi + (PI.sqr() - 6.0) / 3.0
    t3 = _pow(Interval(2.0) / Mi + 0.5, s - 2)
    return t1 + t2 * t3


def sum_bound_tail(s: int, M: int, kind: str = "plain") -> Interval:
    """Constant C with S(k) <= C / k^(s-1) for every k >= M."""
    _check_s(s)
    if M < 3:
        raise DomainError("tail bounds need M >= 3")
    if s < 2:
        raise DomainError("s must be at least 2")
    g = gamma(M, s)
    two_s = Interval(2.0) / Interval(float(s - 1))
    if kind == "plain":
        return (Interval(4.0) + two_s + g) / Interval(float(M))
    if kind == "weighted":
        return Interval(3.0) + two_s + g / 2.0
    raise ValueError(f"unknown kind {kind!r}")


def tail_weight_sum(s: int, M: int, power: int = 0) -> Interval:
    """Upper bound of sum_{k >= M} k^power / omega_k  (integral comparison).

    power = 0 gives 1/((s-1)(M-1)^(s-1)); power = 1 gives 1/((s-2)(M-1)^(s-2)).
    """
    p = s - power
    if p <= 1:
        raise DomainError("divergent tail")
    return Interval(1.0) / (Interval(float(p - 1)) * _pow(Interval(float(M - 1)), p - 1))


@dataclass
class SumEstimates:
    """All sum constants needed for one (s, M) pair."""

    s: int
    M: int
    phi: list = field(init=False)
    gamma: Interval = field(init=False)
    s3: Interval = field(init=False)

    def __post_init__(self):
        s, M = self.s, self.M
        self.phi = [phi(k, s) for k in range(M)]
        self.gamma = gamma(M, s)
        self.s3 = tail_weight_sum(s, M, 0)
        self.S1 = np.array([sum_bound_finite(k, s, "plain").hi for k in range(M)])
        self.S2 = (
            np.array([sum_bound_finite(k, s, "weighted").hi for k in range(M)])
            if s > 2
            else None
        )
        self.S1_tail = float(sum_bound_tail(s, M, "plain").hi)
        self.S2_tail = float(sum_bound_tail(s, M, "weighted").hi)
        one = Interval(1.0)
        # sum_{j >= 1} j^(1-s) <= 1 + 1/(s-2), and its tail beyond M-1
        self.zeta1 = float((one + one / Interval(float(s - 2))).hi) if s > 2 else np.inf
        self.tail1 = float(tail_weight_sum(s, M, 1).hi) if s > 2 else np.inf
