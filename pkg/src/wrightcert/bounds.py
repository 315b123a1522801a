"""Y and Z bounds and the radii polynomials.

Notation: the basepoint (xbar, lam0) with tangent xdot; the predictor is
x(D) = xbar + D xdot at parameter lam0 + D.  For Wright's equation lam is
alpha and beta = 1; for the Hopf problem lam is beta and alpha is the first
unknown.  M = 2m - 1 is the first tail mode.

Y bound.  Along the predictor every term of g_k is P(D) E(D) with P a
polynomial and E = Ebar exp(i theta D), theta = -j Ldot real.  Keeping NE
terms of the exponential series gives exact interval Taylor coefficients d_n
(multiplied by J before taking moduli); the remainder satisfies
|exp(i t) - sum_{n<NE} (i t)^n/n!| <= |t|^NE/NE! and is bounded in modulus.

Z bound.  With c = F + U (F: finite-support part cbar + D cdot, U = r u) all
factors are bounded by linear polynomials in (D, r) with non-negative
coefficients.  For a term also present in the frozen derivative A-dagger the
difference is bounded by  [prod(b + delta)]_nonconst + prod(b) * |j| (|Ldot| D + r),
the last piece coming from |E_j(L) - E_j(Lbar)| <= |j| |L - Lbar|.  Infinite
convolution sums over U are replaced by the S1/S2 estimates of sums.py.
Complex moduli of v-components are bounded by sqrt(2)/omega_k.

All polynomial coefficients are non-negative upper bounds computed with
upward rounding, so p_k(r, D) is non-decreasing in D.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CertificateError
from .fourier import pad_vector
from .interval import Interval, add_up, div_up, mul_up
from .operators import tail_bound
from .sums import SumEstimates
from .wright_map import WRIGHT, Problem, _Modes, jacobian, unpack

__all__ = [
    "NU",
    "Basepoint",
    "BoundPolys",
    "build_Y",
    "build_Z",
    "build_radii_polys",
    "build_bounds",
    "solve_neg_interval",
    "certify_radius",
]

NU = math.nextafter(math.sqrt(2.0), math.inf)


@functools.lru_cache(maxsize=None)
def _estimates(s: int, M: int) -> SumEstimates:
    # read-only after construction, so sharing between basepoints is safe
    return SumEstimates(s, M)


# ----------------------------------------------------- nonneg 2-var polynomials
# arrays (..., nD, nR): coefficient of D^i r^j at [..., i, j]


def rp_lin(b, dD, dR):
    b, dD, dR = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (b, dD, dR)))
    out = np.zeros(b.shape + (2, 2))
    out[..., 0, 0] = b
    out[..., 1, 0] = dD
    out[..., 0, 1] = dR
    return out


def rp_const(c):
    c = np.asarray(c, dtype=float)
    return c[..., None, None].copy()


def _pad(p, nD, nR):
    if p.shape[-2] == nD and p.shape[-1] == nR:
        return p
    out = np.zeros(p.shape[:-2] + (nD, nR))
    out[..., : p.shape[-2], : p.shape[-1]] = p
    return out


def rp_add(*ps):
    nD = max(p.shape[-2] for p in ps)
    nR = max(p.shape[-1] for p in ps)
    shape = np.broadcast_shapes(*(p.shape[:-2] for p in ps))
    out = np.zeros(shape + (nD, nR))
    for p in ps:
        out = add_up(out, _pad(p, nD, nR))
    return out


def rp_mul(p, q):
    nD = p.shape[-2] + q.shape[-2] - 1
    nR = p.shape[-1] + q.shape[-1] - 1
    shape = np.broadcast_shapes(p.shape[:-2], q.shape[:-2])
    out = np.zeros(shape + (nD, nR))
    for i in range(p.shape[-2]):
        for j in range(p.shape[-1]):
            pij = p[..., i, j]
            if not np.any(pij):
                continue
            for a in range(q.shape[-2]):
                for b in range(q.shape[-1]):
                    qab = q[..., a, b]
                    if not np.any(qab):
                        continue
                    out[..., i + a, j + b] = add_up(out[..., i + a, j + b], mul_up(pij, qab))
    return out


def rp_scale(p, c):
    c = np.asarray(c, dtype=float)
    return mul_up(p, c[..., None, None])


def rp_nonconst(p):
    out = p.copy()
    out[..., 0, 0] = 0.0
    return out


def rp_rule(P, DE):
    """Bound for a term present in A-dagger: nonconstant part plus base * |dE|."""
    return rp_add(rp_nonconst(P), rp_mul(rp_const(P[..., 0, 0]), DE))


def rp_sum(p, axis=0):
    """Sequential upward sum over a leading axis."""
    p = np.moveaxis(p, axis, 0)
    out = np.zeros(p.shape[1:])
    for i in range(p.shape[0]):
        out = add_up(out, p[i])
    return out


def rp_shift_r(p, n=1):
    out = np.zeros(p.shape[:-1] + (p.shape[-1] + n,))
    out[..., n:] = p
    return out


def mod_up(re, im):
    """Upper bound of sqrt(re^2 + im^2) for float or interval inputs."""
    re, im = Interval.coerce(re), Interval.coerce(im)
    return (abs(re).sqr() + abs(im).sqr()).sqrt().hi


# --------------------------------------------------------------- basepoint data
@dataclass
class Basepoint:
    """Everything the bounds need at one basepoint."""

    prob: Problem
    xbar: np.ndarray
    xdot: np.ndarray
    lam0: float
    s: int
    JF: np.ndarray
    threads: int = 1

    def __post_init__(self):
        e = self.prob.extra
        self.e = e
        self.m = (len(self.xbar) - e) // 2
        self.M = 2 * self.m - 1
        self.nF = e + 2 * self.M
        self.est = _estimates(self.s, self.M)
        self.xbI = Interval(np.asarray(self.xbar, dtype=float))
        self.xdI = Interval(np.asarray(self.xdot, dtype=float))
        self.lamI = Interval(float(self.lam0))
        al, be, L, a, b = unpack(self.xbI, self.lamI, self.prob)
        _, _, Ld, ad, bd = unpack(self.xdI, Interval(0.0), self.prob)
        self.L, self.Ld = L, Ld
        self.a, self.b, self.ad, self.bd = a, b, ad, bd
        if e:
            self.alpha, self.alpha_d = self.xbI[0], self.xdI[0]
            self.beta, self.beta_d = self.lamI, Interval(1.0)
        else:
            self.alpha, self.alpha_d = self.lamI, Interval(1.0)
            self.beta, self.beta_d = Interval(1.0), Interval(0.0)
        # magnitudes for the Z bound
        d = self.m
        self.Lb = float(abs(L).hi)
        self.Ldm = float(abs(Ld).hi)
        self.cb = np.array([mod_up(a[j], b[j]) for j in range(d)])
        self.cd = np.array([mod_up(ad[j], bd[j]) for j in range(d)])
        omega = np.array([1.0] + [float(j) ** self.s for j in range(1, 4 * self.M + 2 * d)])
        self.omega = omega
        self.nu = np.where(np.arange(len(omega)) == 0, 1.0, div_up(NU, omega))
        if e:
            self.P_alpha = rp_lin(abs(self.alpha).hi, abs(self.alpha_d).hi, 1.0)
            self.P_beta = rp_lin(abs(self.beta).hi, 1.0, 0.0)
        else:
            self.P_alpha = rp_lin(abs(self.alpha).hi, 1.0, 0.0)
            self.P_beta = rp_lin(1.0, 0.0, 0.0)
        self.P_ba = rp_mul(self.P_beta, self.P_alpha)
        self.P_F = rp_lin(self.cb, self.cd, 0.0)  # (d, 2, 2)
        self.P_dL = rp_lin(0.0, self.Ldm, 1.0)  # bound of |L - Lbar|

    def nu_of(self, idx):
        return self.nu[np.abs(np.asarray(idx))]

    def DE(self, j):
        """Polynomial bound of |E_j(L) - E_j(Lbar)|, vectorized over j."""
        j = np.abs(np.asarray(j, dtype=float))
        return rp_lin(0.0, mul_up(j, self.Ldm), j)

    def F(self, j):
        j = np.abs(np.asarray(j))
        valid = j < self.m
        out = self.P_F[np.where(valid, j, 0)]
        return out * valid[..., None, None]

    def map_pool(self, fn, items):
        items = list(items)
        if self.threads <= 1:
            return [fn(i) for i in items]
        with ThreadPoolExecutor(max_workers=self.threads) as ex:
            return list(ex.map(fn, items))


# ------------------------------------------------------------------- Y bound
NE = 3  # exact terms of the exponential series kept before the remainder


def _cp_mul(p, q):
    """Product of complex polynomials given as (re, im) lists of coefficients."""
    n = len(p[0]) + len(q[0]) - 1
    re = [None] * n
    im = [None] * n
    for i in range(len(p[0])):
        for j in range(len(q[0])):
            tr = p[0][i] * q[0][j] - p[1][i] * q[1][j]
            ti = p[0][i] * q[1][j] + p[1][i] * q[0][j]
            re[i + j] = tr if re[i + j] is None else re[i + j] + tr
            im[i + j] = ti if im[i + j] is None else im[i + j] + ti
    return re, im


def _cp_sum(p, axis):
    return [c.sum(axis=axis) for c in p[0]], [c.sum(axis=axis) for c in p[1]]


def _cp_add(p, q):
    n = max(len(p[0]), len(q[0]))
    out = ([], [])
    for part in (0, 1):
        for i in range(n):
            a = p[part][i] if i < len(p[part]) else None
            b = q[part][i] if i < len(q[part]) else None
            out[part].append(b if a is None else (a if b is None else a + b))
    return out


def _mod_coeffs(p):
    """Upper bounds of the moduli of the coefficients of a complex polynomial."""
    return [mod_up(re, im) for re, im in zip(*p)]


def _exp_series(md, idx, Ld):
    """E_idx(D) = Ebar exp(i theta D), theta = -idx Ldot, cut after NE terms.

    Returns the truncated complex polynomial and the remainder constant
    |theta|^NE / NE!  (|exp(i t) - sum_{n<N} (i t)^n/n!| <= |t|^N / N! for real t).
    """
    E0 = md.E(idx)
    theta = -(Interval(np.asarray(idx, dtype=float)) * Ld)
    re, im = [], []
    pw = Interval(np.ones(np.shape(idx)))
    for n in range(NE):
        f = pw / float(math.factorial(n))
        # multiply Ebar by i^n
        er, ei = [(E0[0], E0[1]), (-E0[1], E0[0]), (-E0[0], -E0[1]), (E0[1], -E0[0])][n % 4]
        re.append(er * f)
        im.append(ei * f)
        pw = pw * theta
    rem = (abs(theta) ** NE / float(math.factorial(NE))).hi
    return (re, im), rem


def _remainder(P, rem, axis=None):
    """Moduli bound of P(D) (E - E_trunc): coefficients of D^(NE + i)."""
    mods = _mod_coeffs(P)
    out = [mul_up(np.asarray(mi), rem) for mi in mods]
    if axis is not None:
        red = []
        for o in out:
            acc = np.zeros(o.shape[0])
            for j in range(o.shape[1]):
                acc = add_up(acc, o[:, j])
            red.append(acc)
        out = red
    return out


def taylor_series(bp: Basepoint):
    """Exact coefficients of g_k along the predictor and the remainder moduli.

    Returns (G, R): G is a complex polynomial (lists over the degree of
    length-M Interval arrays), R a list of float arrays with R[i][k]
    bounding the modulus of the D^(NE + i) remainder coefficient of g_k.
    """
    d, M = bp.m, bp.M
    md = _Modes(bp.L, bp.a, bp.b, M + d)
    mdd = _Modes(bp.L, bp.ad, bp.bd, 0)
    k = np.arange(M)
    kf = Interval(k.astype(float))
    zero = Interval(np.zeros(M))

    def cpoly(idx):
        c0 = md.c(idx)
        c1 = mdd.c(idx)
        return [c0[0], c1[0]], [c0[1], c1[1]]

    def rpoly(v0, v1):
        return [v0, v1], [v0 * 0.0, v1 * 0.0]

    ck = cpoly(k)
    # i k L c_k
    iL = ([zero, zero], [bp.L * kf, bp.Ld * kf])
    G = _cp_mul(iL, ck)
    # alpha c_k E_k
    Pb = _cp_mul(rpoly(bp.alpha + zero, bp.alpha_d + zero), ck)
    Ek, rk = _exp_series(md, k, bp.Ld)
    G = _cp_add(G, _cp_mul(Pb, Ek))
    R = _remainder(Pb, rk)
    # alpha beta sum_k1 E_k1 c_k1 c_k2
    k1 = np.arange(-(d - 1), d)
    kk, kk1 = np.meshgrid(k, k1, indexing="ij")
    z2 = Interval(np.zeros(kk.shape))
    ab = _cp_mul(rpoly(bp.beta + z2, bp.beta_d + z2), rpoly(bp.alpha + z2, bp.alpha_d + z2))
    if not bp.e:
        ab = ([c for c in ab[0][:2]], [c for c in ab[1][:2]])  # beta is constant
    Pc = _cp_mul(_cp_mul(ab, cpoly(kk1)), cpoly(kk - kk1))
    E1, r1 = _exp_series(md, kk1, bp.Ld)
    G = _cp_add(G, _cp_sum(_cp_mul(Pc, E1), axis=1))
    Rc = _remainder(Pc, r1, axis=1)
    n = max(len(R), len(Rc))
    R = [add_up(R[i] if i < len(R) else 0.0, Rc[i] if i < len(Rc) else 0.0) for i in range(n)]
    return G, R


def _real_rows(bp: Basepoint, G):
    """Real row vectors d_n (Interval, shape (nF,)) for each degree n."""
    e, d = bp.e, bp.m
    j = Interval(np.arange(d, dtype=float))
    h = [bp.a[0] + (bp.a[1:] * 2.0).sum(axis=0), bp.ad[0] + (bp.ad[1:] * 2.0).sum(axis=0)]
    if e:
        sb = (bp.b * j).sum(axis=0) * 2.0
        sbd = (bp.bd * j).sum(axis=0) * 2.0
        ph = [bp.L * sb - 1.0, bp.Ld * sb + bp.L * sbd, bp.Ld * sbd]
    rows = []
    for n in range(len(G[0])):
        extra = []
        if e:
            extra.append(ph[n] if n < 3 else Interval(0.0))
        extra.append(h[n] if n < 2 else Interval(0.0))
        vals = list(extra)
        for kk in range(bp.M):
            vals.append(G[0][n][kk])
            if kk > 0:
                vals.append(G[1][n][kk])
        rows.append(Interval.stack(vals))
    return rows


def _pair_weights(bp: Basepoint) -> np.ndarray:
    """W[i, k] >= |(J[i, Re k], J[i, Im k])|_2: how a complex remainder enters row i."""
    e = bp.e
    J = bp.JF
    W = np.zeros((J.shape[0], bp.M))
    W[:, 0] = np.abs(J[:, e + 1])
    for k in range(1, bp.M):
        W[:, k] = mod_up(J[:, e + 2 * k], J[:, e + 2 * k + 1])
    return W


def _matvec_up(A_abs, V):
    """Upper bound of |A| V for non-negative V of shape (n, ...)."""
    out = np.zeros((A_abs.shape[0],) + V.shape[1:])
    ext = (slice(None),) + (None,) * (V.ndim - 1)
    for j in range(A_abs.shape[1]):
        out = add_up(out, mul_up(A_abs[:, j][ext], V[j][None]))
    return out


def build_Y(bp: Basepoint) -> np.ndarray:
    """Coefficients Y^(j), shape (nF, deg+1): Y(D) = sum_j Y[:, j] D^j.

    Exact Taylor coefficients are multiplied by J before taking moduli, so
    cancellations inside J f are kept; only the exponential remainders are
    bounded in modulus.
    """
    G, R = taylor_series(bp)
    rows = _real_rows(bp, G)
    J = Interval(bp.JF)
    nexact = len(rows)
    deg = max(nexact - 1, NE + len(R) - 1)
    Y = np.zeros((bp.nF, deg + 1))
    for n, dn in enumerate(rows):
        Y[:, n] = (J @ dn).mag()
    W = _pair_weights(bp)
    Rm = np.stack(R, axis=0).T  # (M, nrem)
    Yr = _matvec_up(W, Rm)
    for i in range(Rm.shape[1]):
        Y[:, NE + i] = add_up(Y[:, NE + i], Yr[:, i])
    return Y


# ------------------------------------------------------------------- Z bound
def _C_row(bp: Basepoint, k: int) -> np.ndarray:
    """Polynomial bound of |Q_k| (complex modulus) for a finite mode k < M."""
    d, M, est = bp.m, bp.M, bp.est
    NU2 = mul_up(NU, NU)
    r1 = rp_lin(0.0, 0.0, 1.0)
    terms = []
    cfull = rp_lin(bp.cb[k] if k < d else 0.0, bp.cd[k] if k < d else 0.0, bp.nu[k])
    # d1: i k v_L c_k
    if k:
        terms.append(rp_scale(rp_nonconst(cfull), float(k)))
        # d2: i k L w_k
        terms.append(rp_scale(bp.P_dL, mul_up(float(k), bp.nu[k])))
    if bp.e:
        # d3: v_alpha E_k c_k
        terms.append(rp_rule(cfull, bp.DE(k)))
    # d4: alpha (-i k v_L) E_k c_k
    if k:
        terms.append(rp_scale(rp_rule(rp_mul(bp.P_alpha, cfull), bp.DE(k)), float(k)))
    # d5: alpha E_k w_k
    terms.append(rp_scale(rp_rule(bp.P_alpha, bp.DE(k)), bp.nu[k]))

    k1 = np.arange(-(d - 1), d)
    k2 = k - k1
    fin = np.abs(k2) < d
    F1 = bp.F(k1)
    F2 = bp.F(np.where(fin, k2, 0)) * fin[:, None, None]
    nuk2 = bp.nu_of(k2)
    FF = rp_mul(F1, F2)
    FU = rp_mul(F1, rp_lin(0.0, 0.0, nuk2))
    k1abs = np.abs(k1).astype(float)
    k2abs = np.abs(k2).astype(float)
    if bp.e:
        # d6: beta v_alpha sum E c c
        terms.append(rp_sum(rp_rule(rp_mul(bp.P_beta, FF), bp.DE(k1))))
        terms.append(rp_scale(rp_mul(bp.P_beta, rp_sum(FU)), 2.0))
        terms.append(rp_mul(bp.P_beta, rp_mul(r1, rp_lin(0.0, 0.0, mul_up(NU2, est.S1[k])))))
    # d7: beta alpha sum (-i k1 v_L) E_k1 c_k1 c_k2
    ff7 = rp_scale(rp_rule(rp_mul(bp.P_ba, FF), bp.DE(k1)), k1abs)
    terms.append(rp_sum(ff7))
    terms.append(rp_mul(bp.P_ba, rp_sum(rp_scale(FU, k1abs))))
    # UF: c_k1 = U, c_k2 = F over finite k2 = k - k1  ->  weight |k - k2| = |k1'|
    terms.append(rp_mul(bp.P_ba, rp_sum(rp_scale(FU, k2abs))))
    terms.append(rp_mul(bp.P_ba, rp_mul(r1, rp_lin(0.0, 0.0, mul_up(NU2, est.S2[k])))))
    # d8: beta alpha sum (E_k1 + E_k2) c_k1 w_k2
    P8 = rp_mul(bp.P_ba, rp_scale(F1, nuk2))
    in_adag = np.abs(k2) < M
    both = rp_add(rp_rule(P8, bp.DE(k1)), rp_rule(P8, bp.DE(k2)))
    full = rp_scale(P8, 2.0)
    shp = _maxshape(both, full)
    terms.append(rp_sum(_pad(both, *shp) * in_adag[:, None, None]))
    terms.append(rp_sum(_pad(full, *shp) * (~in_adag)[:, None, None]))
    terms.append(rp_mul(bp.P_ba, rp_lin(0.0, 0.0, mul_up(2.0, mul_up(NU2, est.S1[k])))))
    return rp_add(*terms)


def _maxshape(p, q):
    return max(p.shape[-2], q.shape[-2]), max(p.shape[-1], q.shape[-1])


def _C_special_rows(bp: Basepoint):
    """(h row, phase row or None) bounds of |Q|."""
    est = bp.est
    h = rp_const(mul_up(2.0, est.s3.hi))
    if not bp.e:
        return h, None
    d, M = bp.m, bp.M
    jb = float((Interval(np.arange(d, dtype=float)) * abs(bp.bd)).sum(axis=0).hi)
    fin = Interval(1.0) / Interval(np.arange(1, M, dtype=float)) ** (bp.s - 1)
    fin = float(fin.sum(axis=0).hi)
    t = [
        rp_lin(0.0, mul_up(2.0, jb), mul_up(2.0, est.zeta1)),
        rp_scale(bp.P_dL, mul_up(2.0, fin)),
        rp_scale(rp_lin(bp.Lb, bp.Ldm, 1.0), mul_up(2.0, est.tail1)),
    ]
    return h, rp_add(*t)


def build_C(bp: Basepoint) -> np.ndarray:
    rows = bp.map_pool(lambda k: _C_row(bp, k), range(bp.M))
    h, ph = _C_special_rows(bp)
    nD = max(r.shape[0] for r in rows + [h] + ([ph] if ph is not None else []))
    nR = max(r.shape[1] for r in rows + [h] + ([ph] if ph is not None else []))
    C = np.zeros((bp.nF, nD, nR))
    e = bp.e
    if e:
        C[0] = _pad(ph, nD, nR)
    C[e] = _pad(h, nD, nR)
    C[e + 1] = _pad(rows[0], nD, nR)
    for k in range(1, bp.M):
        C[e + 2 * k] = _pad(rows[k], nD, nR)
        C[e + 2 * k + 1] = C[e + 2 * k]
    return C


def _W(bp: Basepoint, p: int) -> np.ndarray:
    """W_p(j) = 1 + (M/(M-j))^p for j >= 1, W_p(0) = 1."""
    j = np.arange(bp.m, dtype=float)
    Mi = Interval(float(bp.M))
    ratio = (Mi / (Mi - Interval(j))) ** p
    w = (ratio + 1.0).hi.copy()
    w[0] = 1.0
    return w


def build_q(bp: Basepoint) -> np.ndarray:
    """Polynomial q(r, D) with |Q_k| <= q / k^(s-1) for every k >= M."""
    M, est, s = bp.M, bp.est, bp.s
    NU2 = mul_up(NU, NU)
    invM = div_up(1.0, float(M))
    r1 = rp_lin(0.0, 0.0, 1.0)
    Ws = _W(bp, s)
    Ws1 = _W(bp, s - 1)
    j = np.arange(bp.m, dtype=float)
    t = [
        rp_scale(r1, NU),  # d1
        rp_scale(bp.P_dL, NU),  # d2
    ]
    if bp.e:
        t.append(rp_scale(r1, mul_up(NU, invM)))  # d3
    t.append(rp_scale(rp_mul(r1, bp.P_alpha), NU))  # d4
    t.append(rp_scale(rp_nonconst(bp.P_alpha), mul_up(NU, invM)))  # d5
    t.append(rp_scale(bp.P_dL, mul_up(NU, bp.P_alpha[0, 0])))
    if bp.e:
        bF = rp_mul(bp.P_beta, bp.P_F)  # (d, ...)
        t.append(rp_scale(rp_mul(r1, rp_sum(rp_scale(bF, Ws))), mul_up(2.0, mul_up(NU, invM))))
        t.append(rp_mul(bp.P_beta, rp_mul(r1, rp_lin(0.0, 0.0, mul_up(NU2, est.S1_tail)))))
    baF = rp_mul(bp.P_ba, bp.P_F)
    t.append(rp_scale(rp_mul(r1, rp_sum(rp_scale(baF, mul_up(j, Ws)))), mul_up(NU, invM)))  # d7 FU
    t.append(rp_scale(rp_mul(r1, rp_sum(rp_scale(baF, Ws1))), NU))  # d7 UF
    t.append(rp_mul(bp.P_ba, rp_mul(r1, rp_lin(0.0, 0.0, mul_up(NU2, est.S2_tail)))))  # d7 UU
    t.append(rp_scale(rp_nonconst(baF[0]), mul_up(2.0, mul_up(NU, invM))))  # d8 k1 = 0
    t.append(rp_scale(bp.P_dL, mul_up(NU, baF[0][0, 0])))
    if bp.m > 1:
        t.append(rp_scale(rp_sum(rp_scale(baF[1:], Ws[1:])), mul_up(2.0, mul_up(NU, invM))))
    t.append(rp_mul(bp.P_ba, rp_lin(0.0, 0.0, mul_up(2.0, mul_up(NU2, est.S1_tail)))))  # d8 U
    return rp_add(*t)


def build_Z(bp: Basepoint, Df: Interval | None = None):
    """(Z_F polynomial array (nF, nD, nR), Zhat_M polynomial (nD, nR), tail data)."""
    e, M = bp.e, bp.M
    if Df is None:
        Df = jacobian(Interval(pad_vector(bp.xbar, e, M)), bp.lamI, bp.prob)
    n = bp.nF
    defect = (Interval(bp.JF) @ Df - Interval(np.eye(n))).mag()
    winv = (Interval(1.0) / Interval(bp.omega[_modes(n, e)])).hi
    Z0 = _matvec_up(defect, winv)
    C = build_C(bp)
    JC = _matvec_up(np.abs(bp.JF), C)
    inner = rp_add(rp_const(Z0), JC)
    ZF = rp_shift_r(inner)
    try:
        tb = tail_bound(bp.xbI, bp.lamI, M, bp.prob)
    except CertificateError:
        raise
    q = build_q(bp)
    Ms = float(M) ** bp.s
    c = div_up((tb.xi11 + tb.rho).hi, Ms)
    ZM = rp_shift_r(rp_scale(q, c))
    return ZF, ZM, tb


def _modes(n, e):
    idx = np.arange(n)
    return np.where(idx < e + 2, 0, (idx - e) // 2)


# --------------------------------------------------------------- radii polys
@dataclass
class BoundPolys:
    """p_i(r, D) = pos_i(r, D) - neg_i r for i < nF, and the tail row i = nF."""

    Y: np.ndarray
    ZF: np.ndarray
    ZM: np.ndarray
    pos: np.ndarray
    neg: np.ndarray
    M: int
    s: int

    def numeric(self, r, delta):
        """Plain float evaluation (heuristic); r may be an array."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        nD, nR = self.pos.shape[1:]
        dp = float(delta) ** np.arange(nD)
        rp = r[:, None] ** np.arange(nR)[None, :]
        v = np.einsum("nij,i,rj->rn", self.pos, dp, rp)
        return v - r[:, None] * self.neg[None, :]

    def interval_eval(self, r, delta) -> Interval:
        """Rigorous upper enclosure of every p_i at (r, delta)."""
        nD, nR = self.pos.shape[1:]
        rI = Interval(float(r))
        dI = Interval(float(delta))
        dp = Interval.stack([dI**i for i in range(nD)])
        rp = Interval.stack([rI**j for j in range(nR)])
        mon = Interval(dp.lo[:, None] * 1.0, dp.hi[:, None]) * Interval(rp.lo[None, :], rp.hi[None, :])
        terms = Interval(self.pos) * Interval(mon.lo[None], mon.hi[None])
        n = self.pos.shape[0]
        tot = terms.reshape(n, nD * nR).sum(axis=1)
        return tot - rI * Interval(self.neg)


def build_radii_polys(Y, ZF, ZM, M, s, neg) -> BoundPolys:
    nD = max(Y.shape[1], ZF.shape[1], ZM.shape[0])
    nR = max(ZF.shape[2], ZM.shape[1])
    n = Y.shape[0]
    pos = np.zeros((n + 1, nD, nR))
    Yp = np.zeros((n, nD, nR))
    Yp[:, : Y.shape[1], 0] = Y
    pos[:n] = add_up(Yp, _pad(ZF, nD, nR))
    pos[n] = _pad(ZM, nD, nR)
    return BoundPolys(Y, ZF, ZM, pos, np.asarray(neg, dtype=float), M, s)


def build_bounds(bp: Basepoint, Df: Interval | None = None) -> BoundPolys:
    Y = build_Y(bp)
    ZF, ZM, _ = build_Z(bp, Df)
    n = bp.nF
    winv_lo = (Interval(1.0) / Interval(bp.omega[_modes(n, bp.e)])).lo
    tail_lo = (Interval(1.0) / (Interval(float(bp.M)) ** bp.s)).lo
    neg = np.concatenate([winv_lo, [tail_lo]])
    return build_radii_polys(Y, ZF, ZM, bp.M, bp.s, neg)


# ------------------------------------------------------------ radius search
def solve_neg_interval(bp: BoundPolys, delta: float, rmin: float = 1e-12, rmax: float = 1.0, npts: int = 64):
    """Numerically locate {r : p_i(r, delta) <= 0 for all i}.

    Every p_i is convex in r >= 0 (only the linear coefficient can be
    negative), so the maximum is unimodal: a log grid plus golden-section
    refinement finds its minimum and bisection finds the two crossings.
    """

    def f(r):
        return float(np.max(bp.numeric(r, delta)))

    grid = np.logspace(math.log10(rmin), math.log10(rmax), npts)
    vals = np.max(bp.numeric(grid, delta), axis=1)
    i = int(np.argmin(vals))
    lo_t = math.log(grid[max(i - 1, 0)])
    hi_t = math.log(grid[min(i + 1, npts - 1)])
    g = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        a = hi_t - g * (hi_t - lo_t)
        b = lo_t + g * (hi_t - lo_t)
        if f(math.exp(a)) < f(math.exp(b)):
            hi_t = b
        else:
            lo_t = a
    rbest = math.exp(0.5 * (lo_t + hi_t))
    fbest = f(rbest)
    if vals[i] < fbest:
        rbest, fbest = float(grid[i]), float(vals[i])
    if not fbest < 0:
        return False, (math.nan, math.nan)

    def bisect(a, b, neg_side_right):
        for _ in range(200):
            mid = 0.5 * (a + b) if b / max(a, 1e-300) < 4 else math.sqrt(max(a, 1e-300) * b)
            if mid <= a or mid >= b:
                break
            if (f(mid) < 0) == neg_side_right:
                b = mid
            else:
                a = mid
        return b if neg_side_right else a

    left_pos = [x for x in grid if x < rbest and f(x) >= 0]
    a = left_pos[-1] if left_pos else 0.0
    if a == 0.0 and f(rmin) < 0:
        a = 0.0
        lo_r = bisect(max(a, 1e-300), rmin, True) if f(1e-300) >= 0 else 0.0
    else:
        lo_r = bisect(a, rbest, True)
    right_pos = [x for x in grid if x > rbest and f(x) >= 0]
    if right_pos:
        hi_r = bisect(rbest, right_pos[0], False)
    else:
        hi_r = rmax
    return True, (lo_r, hi_r)


def certify_radius(bp: BoundPolys, r: float, delta: float) -> bool:
    """Strict interval check p_i(r, delta) < 0 for every i."""
    if not (r > 0 and math.isfinite(r)):
        return False
    return bool(np.all(bp.interval_eval(r, delta).hi < 0))
