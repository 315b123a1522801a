"""The Fourier map of Wright's equation, its Galerkin truncations and derivatives.

With c_k = a_k + i b_k (c_{-k} = conj c_k, b_0 = 0) and E_j = exp(-i j L) the
k-th complex component is

    g_k = (i k L + alpha E_k) c_k + alpha beta sum_{k1+k2=k} E_{k1} c_{k1} c_{k2}.

Wright's equation uses beta = 1; the rescaled Hopf problem keeps beta as the
continuation parameter and treats alpha as an unknown.  Real rows are
(h, Re g_0) for k = 0 and (Re g_k, Im g_k) for k >= 1, where
h = a0 + 2 sum a_k encodes y(0) = 0.  The Hopf problem prepends the phase row
-1 + 2 L sum k b_k.

All functions are generic over the scalar kind: float arrays (Newton world)
or Interval arrays (proof world).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend as B
from .fourier import GalerkinPoint, pad_vector
from .interval import Interval

__all__ = [
    "Problem",
    "WRIGHT",
    "HOPF",
    "MapComponentIndex",
    "unpack",
    "complex_rows",
    "residual",
    "jacobian",
    "dlam",
    "eval_f_component",
    "eval_f_truncated",
    "jacobian_truncated",
    "d_alpha",
    "residual_coeffs",
]


@dataclass(frozen=True)
class Problem:
    """Which variable is the continuation parameter.

    ``extra`` is the number of leading unknowns before (L, a0): 0 for
    Wright's equation (parameter alpha), 1 for the Hopf problem (alpha is an
    unknown, parameter beta).
    """

    name: str
    extra: int

    @property
    def tag(self) -> str:
        return "wright_alpha" if self.extra == 0 else "hopf_beta"


WRIGHT = Problem("wright", 0)
HOPF = Problem("hopf", 1)


@dataclass(frozen=True)
class MapComponentIndex:
    k: int
    i: int  # 1 or 2


def _vec(x):
    return x.data if isinstance(x, GalerkinPoint) else x


def unpack(x, lam, prob: Problem):
    """Split an unknown vector into (alpha, beta, L, a, b) with b[0] = 0."""
    x = _vec(x)
    iv = B.is_iv(x) or B.is_iv(lam)
    if iv:
        x = Interval.coerce(x)
        lam = Interval.coerce(lam)
    e = prob.extra
    L = x[e]
    rest = x[e + 1:]
    a = B.concat([rest[0:1], rest[1::2]])
    b = B.concat([B.zeros_like(rest, (1,)), rest[2::2]])
    if prob.extra == 0:
        alpha, beta = lam, (Interval(1.0) if iv else 1.0)
    else:
        alpha, beta = x[0], lam
    return alpha, beta, L, a, b


def _cmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


class _Modes:
    """Gathers c_j and E_j for signed indices from (a, b, L)."""

    def __init__(self, L, a, b, jmax):
        self.d = len(a)
        j = np.arange(jmax + 1, dtype=float)
        jL = (Interval(j) * L) if B.is_iv(L) else j * L
        self.cos = B.cos(jL)
        self.sin = B.sin(jL)
        self.a = a
        self.b = b

    def c(self, idx):
        """(re, im) of c_idx for an integer array idx; zero where |idx| >= d."""
        idx = np.asarray(idx)
        ab = np.abs(idx)
        valid = (ab < self.d).astype(float)
        safe = np.where(ab < self.d, ab, 0)
        sgn = np.sign(idx).astype(float) * valid
        re = self.a[safe] * valid
        im = self.b[safe] * sgn
        return re, im

    def E(self, idx):
        idx = np.asarray(idx)
        ab = np.abs(idx)
        sgn = np.sign(idx).astype(float)
        return self.cos[ab], -(self.sin[ab] * sgn)


def complex_rows(alpha, beta, L, a, b, K: int):
    """(Re g_k, Im g_k) for k = 0..K-1 as arrays of length K."""
    d = len(a)
    md = _Modes(L, a, b, max(K, d))
    k = np.arange(K)
    k1 = np.arange(-(d - 1), d)
    kk, kk1 = np.meshgrid(k, k1, indexing="ij")
    conv = _conv(md, kk, kk1)
    ck = md.c(k)
    Ek = md.E(k)
    kL = (Interval(k.astype(float)) * L) if B.is_iv(L) else k * L
    lin = _cmul((alpha * Ek[0], kL + alpha * Ek[1]), ck)
    ab = alpha * beta
    return lin[0] + ab * conv[0], lin[1] + ab * conv[1]


def _conv(md: _Modes, kk, kk1, weight=None):
    """sum_{k1} E_{k1} c_{k1} c_{k-k1} over the second axis, ascending k1."""
    p = _cmul(md.E(kk1), _cmul(md.c(kk1), md.c(kk - kk1)))
    if weight is not None:
        p = _cmul(p, weight)
    return B.vsum(p[0], axis=1), B.vsum(p[1], axis=1)


def _stack_rows(g_re, g_im, extra_rows):
    """Interleave complex rows into the real row layout."""
    K = len(g_re)
    rows = list(extra_rows)
    for k in range(K):
        rows.append(g_re[k])
        if k > 0:
            rows.append(g_im[k])
    return B.stack(rows)


def _h(a):
    d = len(a)
    w = np.full(d, 2.0)
    w[0] = 1.0
    return B.vsum(a * w, axis=0)


def _phase(L, b):
    d = len(b)
    j = np.arange(d, dtype=float)
    return -1.0 + 2.0 * L * B.vsum(b * j, axis=0)


def residual(x, lam, prob: Problem = WRIGHT, K: int | None = None):
    """Real residual vector for modes 0..K-1 (default K = number of modes of x)."""
    alpha, beta, L, a, b = unpack(x, lam, prob)
    K = len(a) if K is None else K
    g_re, g_im = complex_rows(alpha, beta, L, a, b, K)
    extra = [_phase(L, b)] if prob.extra else []
    extra.append(_h(a))
    return _stack_rows(g_re, g_im, extra)


def _dirs(md: _Modes, alpha, beta, L, K: int):
    """Complex partial derivatives of g_k for k < K.

    Returns dict with 'L', 'alpha', 'beta' (length K), and 'a', 'b'
    (K x d) giving d g_k / d a_n and d g_k / d b_n.
    """
    d = md.d
    k = np.arange(K)
    n = np.arange(d)
    kk, nn = np.meshgrid(k, n, indexing="ij")
    ab = alpha * beta

    def G(kk, nsig):
        # G(k, n) = delta_{nk}(ikL + alpha E_k) + alpha beta c_{k-n}(E_n + E_{k-n})
        cd = md.c(kk - nsig)
        En = md.E(nsig)
        Ekn = md.E(kk - nsig)
        t = _cmul(cd, (En[0] + Ekn[0], En[1] + Ekn[1]))
        t = (ab * t[0], ab * t[1])
        diag = (kk == nsig).astype(float)
        Ek = md.E(kk)
        kf = kk.astype(float)
        kL = (Interval(kf) * L) if B.is_iv(L) else kf * L
        dre = alpha * Ek[0] * diag
        dim = (kL + alpha * Ek[1]) * diag
        return t[0] + dre, t[1] + dim

    Gp = G(kk, nn)
    Gm = G(kk, -nn)
    first = (nn == 0).astype(float)
    rest = 1.0 - first
    da = (Gp[0] + Gm[0] * rest, Gp[1] + Gm[1] * rest)
    # d/db_n = i (G(k,n) - G(k,-n))
    db = (-(Gp[1] - Gm[1]) * rest, (Gp[0] - Gm[0]) * rest)

    ck = md.c(k)
    Ek = md.E(k)
    kf = k.astype(float)
    # i k (1 - alpha E_k) c_k
    one_m = (1.0 - alpha * Ek[0], -(alpha * Ek[1]))
    t = _cmul(one_m, ck)
    dL_lin = (-(t[1] * kf), t[0] * kf)
    k1 = np.arange(-(d - 1), d)
    kk2, kk1 = np.meshgrid(k, k1, indexing="ij")
    mk1 = (np.zeros(kk1.shape), -kk1.astype(float))
    conv_w = _conv(md, kk2, kk1, weight=mk1)
    dL = (dL_lin[0] + ab * conv_w[0], dL_lin[1] + ab * conv_w[1])
    conv = _conv(md, kk2, kk1)
    Ekc = _cmul(Ek, ck)
    dalpha = (Ekc[0] + beta * conv[0], Ekc[1] + beta * conv[1])
    dbeta = (alpha * conv[0], alpha * conv[1])
    return {"L": dL, "alpha": dalpha, "beta": dbeta, "a": da, "b": db}


def jacobian(x, lam, prob: Problem = WRIGHT, K: int | None = None):
    """Jacobian of the residual with respect to the unknowns.

    Rows cover modes 0..K-1 (default: square), columns the unknowns of x.
    """
    alpha, beta, L, a, b = unpack(x, lam, prob)
    d = len(a)
    K = d if K is None else K
    md = _Modes(L, a, b, K + d)
    dr = _dirs(md, alpha, beta, L, K)
    e = prob.extra
    ncol = e + 2 * d
    like = L
    rows = []
    if e:
        # phase row: d/dL = 2 sum n b_n, d/db_n = 2 L n
        nf = np.arange(d, dtype=float)
        entries = [0.0] * ncol
        entries[1] = 2.0 * B.vsum(b * nf, axis=0)
        for n in range(1, d):
            entries[2 + 2 * n] = 2.0 * L * float(n)
        rows.append(_row(entries, like))
    hrow = [0.0] * ncol
    hrow[e + 1] = 1.0
    for n in range(1, d):
        hrow[e + 2 * n] = 2.0
    rows.append(_row(hrow, like))
    for k in range(K):
        for part in (0, 1):
            if k == 0 and part == 1:
                continue
            entries = [0.0] * ncol
            if e:
                entries[0] = dr["alpha"][part][k]
            entries[e] = dr["L"][part][k]
            entries[e + 1] = dr["a"][part][k, 0]
            for n in range(1, d):
                entries[e + 2 * n] = dr["a"][part][k, n]
                entries[e + 2 * n + 1] = dr["b"][part][k, n]
            rows.append(_row(entries, like))
    return B.stack(rows)


def _row(entries, like):
    if B.is_iv(like):
        return Interval.stack([Interval.coerce(v) for v in entries])
    return np.array([float(v) for v in entries])


def dlam(x, lam, prob: Problem = WRIGHT, K: int | None = None):
    """Derivative of the residual with respect to the continuation parameter."""
    alpha, beta, L, a, b = unpack(x, lam, prob)
    d = len(a)
    K = d if K is None else K
    md = _Modes(L, a, b, K + d)
    k = np.arange(K)
    k1 = np.arange(-(d - 1), d)
    kk, kk1 = np.meshgrid(k, k1, indexing="ij")
    conv = _conv(md, kk, kk1)
    if prob.extra == 0:
        ck = md.c(k)
        Ekc = _cmul(md.E(k), ck)
        g = (Ekc[0] + conv[0], Ekc[1] + conv[1])
    else:
        g = (alpha * conv[0], alpha * conv[1])
    z = B.zeros_like(L, (1,)) if B.is_iv(L) else np.zeros(1)
    extra = [z[0]] * (prob.extra + 1)
    return _stack_rows(g[0], g[1], extra)


# ---------------------------------------------------------------- Wright API
def eval_f_component(idx: MapComponentIndex, x, alpha):
    """f_{k,i}(x, alpha) for any k (zero beyond the convolution support)."""
    k, i = idx.k, idx.i
    xv = _vec(x)
    m = (len(xv)) // 2
    if k >= 2 * m - 1:
        return Interval(0.0)
    r = residual(Interval.coerce(xv), Interval.coerce(alpha), WRIGHT, K=k + 1)
    return r[2 * k + i - 1]


def eval_f_truncated(x, alpha):
    xv = Interval.coerce(_vec(x))
    return residual(xv, Interval.coerce(alpha), WRIGHT)


def jacobian_truncated(x, alpha, dim: int | None = None):
    xv = _vec(x)
    m = len(xv) // 2
    dim = m if dim is None else dim
    xv = pad_vector(xv, 0, dim)
    return jacobian(Interval.coerce(xv), Interval.coerce(alpha), WRIGHT)


def d_alpha(x, alpha):
    return dlam(Interval.coerce(_vec(x)), Interval.coerce(alpha), WRIGHT)


def residual_coeffs(xbar, xdot, lam0, prob: Problem = WRIGHT):
    """d0 = f^{(M)}(xbar, lam0) and d1 = Df^{(M)} xdot + df/dlam, M = 2m-1."""
    xb = _vec(xbar)
    xd = _vec(xdot)
    e = prob.extra
    m = (len(xb) - e) // 2
    M = 2 * m - 1
    xbp = Interval.coerce(pad_vector(xb, e, M))
    xdp = Interval.coerce(pad_vector(xd, e, M))
    lam0 = Interval.coerce(lam0)
    d0 = residual(xbp, lam0, prob)
    J = jacobian(xbp, lam0, prob)
    d1 = (J @ xdp) + dlam(xbp, lam0, prob)
    return d0, d1
