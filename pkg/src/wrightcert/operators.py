"""Approximate inverse A, its finite block J_F, and the diagonal tail blocks.

For k >= M = 2m-1 the derivative acts on mode k through the 2x2 block

    Lambda_k = [[tau_k, delta_k], [-delta_k, tau_k]],
    tau_k   = alpha beta a0 + alpha (1 + beta a0) cos kL,
    delta_k = -kL + alpha (1 + beta a0) sin kL,

(beta = 1 for Wright's equation).  If M L > alpha |1 + beta a0| then
|Lambda_k^{-1}| <= Xi / k componentwise with rho = M / (M L - alpha|1+beta a0|)
and Xi = [[rho^2 alpha (|beta a0| + |1+beta a0|)/M, rho], [rho, same]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificateError, NumericalError
from .fourier import GalerkinPoint, pad_vector
from .interval import Interval, iv_mat_inf_norm
from .wright_map import WRIGHT, Problem, jacobian

__all__ = [
    "TailBound",
    "ApproxInverse",
    "build_lambda_k",
    "tail_bound",
    "numeric_inverse",
    "certify_invertibility",
    "apply_A",
    "tail_data",
]


def _vec(x):
    return x.data if isinstance(x, GalerkinPoint) else x


def tail_data(xbar, lam0, prob: Problem = WRIGHT):
    """(L, a0, alpha, beta) enclosures at the basepoint."""
    x = Interval.coerce(_vec(xbar))
    lam0 = Interval.coerce(lam0)
    e = prob.extra
    L, a0 = x[e], x[e + 1]
    if e == 0:
        return L, a0, lam0, Interval(1.0)
    return L, a0, x[0], lam0


def build_lambda_k(k, L, a0, alpha0, beta=1.0) -> Interval:
    """Enclosure of the 2x2 tail block; ``k`` may be an integer array."""
    L, a0, alpha0, beta = (Interval.coerce(v) for v in (L, a0, alpha0, beta))
    kf = Interval(np.asarray(k, dtype=float))
    kL = kf * L
    ba = beta * a0
    amp = alpha0 * (ba + 1.0)
    tau = alpha0 * ba + amp * kL.cos()
    delta = -kL + amp * kL.sin()
    row0 = Interval.stack([tau, delta], axis=-1)
    row1 = Interval.stack([-delta, tau], axis=-1)
    return Interval.stack([row0, row1], axis=-2)


@dataclass(frozen=True)
class TailBound:
    rho: Interval
    xi11: Interval
    M: int

    @property
    def Xi(self) -> Interval:
        return Interval.stack(
            [Interval.stack([self.xi11, self.rho]), Interval.stack([self.rho, self.xi11])]
        )


def tail_bound(xbar, lam0, M: int, prob: Problem = WRIGHT) -> TailBound:
    L, a0, alpha, beta = tail_data(xbar, lam0, prob)
    Mi = Interval(float(M))
    ba = beta * a0
    den = Mi * L - alpha * abs(ba + 1.0)
    if not den.lo > 0:
        raise CertificateError("tail blocks not certified invertible: M L <= alpha |1 + a0|")
    rho = Mi / den
    xi11 = rho.sqr() * alpha * (abs(ba) + abs(ba + 1.0)) / Mi
    return TailBound(rho, xi11, M)


def numeric_inverse(xbar, lam0, prob: Problem = WRIGHT) -> np.ndarray:
    """Float inverse of D_x f^{(2m-1)}(xbar, lam0), computed in plain arithmetic."""
    x = np.asarray(_vec(xbar), dtype=float)
    e = prob.extra
    m = (len(x) - e) // 2
    M = 2 * m - 1
    Df = jacobian(pad_vector(x, e, M), float(lam0), prob)
    try:
        J = np.linalg.inv(Df)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular Jacobian") from exc
    if not np.all(np.isfinite(J)):
        raise NumericalError("non-finite approximate inverse")
    return J


@dataclass(frozen=True)
class ApproxInverse:
    JF: np.ndarray
    xbar: np.ndarray
    lam0: float
    M: int
    prob: Problem = WRIGHT

    @property
    def extra(self) -> int:
        return self.prob.extra


def certify_invertibility(xbar, lam0, JF, prob: Problem = WRIGHT, Df: Interval | None = None):
    """Check ||J_F Df - I||_inf < 1 and M L > alpha|1 + beta a0| rigorously.

    Returns (ok, defect enclosure).  ``Df`` may be passed to avoid recomputing
    the interval Jacobian.
    """
    x = _vec(xbar)
    e = prob.extra
    m = (len(x) - e) // 2
    M = 2 * m - 1
    JF = np.asarray(JF, dtype=float)
    n = e + 2 * M
    if JF.shape != (n, n):
        raise ValueError(f"J_F must be {n}x{n}")
    if Df is None:
        Df = jacobian(Interval.coerce(pad_vector(x, e, M)), Interval.coerce(lam0), prob)
    defect = iv_mat_inf_norm(Interval(JF) @ Df - Interval(np.eye(n)))
    ok = bool(defect.hi < 1.0)
    try:
        tail_bound(x, lam0, M, prob)
    except CertificateError:
        ok = False
    return ok, defect


def apply_A(op: ApproxInverse, v) -> Interval:
    """A v: J_F on modes < M, exact interval 2x2 inverses on modes >= M."""
    v = Interval.coerce(v)
    e = op.extra
    nF = e + 2 * op.M
    if len(v) < nF or (len(v) - e) % 2:
        raise ValueError("v must cover at least the finite modes")
    out = [Interval(op.JF) @ v[:nF]]
    if len(v) > nF:
        ks = np.arange(op.M, (len(v) - e) // 2)
        L, a0, alpha, beta = tail_data(op.xbar, op.lam0, op.prob)
        lam = build_lambda_k(ks, L, a0, alpha, beta)
        tau = lam[:, 0, 0]
        delta = lam[:, 0, 1]
        det = tau.sqr() + delta.sqr()
        if np.any(det.lo <= 0):
            raise CertificateError("singular tail block")
        va = v[nF::2]
        vb = v[nF + 1::2]
        ra = (tau * va - delta * vb) / det
        rb = (delta * va + tau * vb) / det
        out.append(Interval.stack([ra, rb], axis=1).reshape(-1))
    return Interval.concatenate(out)
