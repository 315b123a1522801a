"""Independent high-precision reference formulas used by the tests.

Everything here is transcribed from the real-row form of the map
(rotation blocks R_k and Theta_k1) and evaluated with mpmath at 60
digits, without touching the package's complex-row implementation.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 60


def _mp(v):
    return v if isinstance(v, mp.mpf) else mp.mpf(float(v))


def split(x, extra):
    """(alpha or None, L, a dict, b dict) from a flat vector."""
    x = [_mp(v) for v in x]
    al = x[0] if extra else None
    L = x[extra]
    a = {0: x[extra + 1]}
    b = {0: mp.mpf(0)}
    rest = x[extra + 2:]
    for j in range(len(rest) // 2):
        a[j + 1] = rest[2 * j]
        b[j + 1] = rest[2 * j + 1]
    return al, L, a, b


def _ab(a, b, k):
    """(a_k, b_k) for signed k with a_{-k} = a_k, b_{-k} = -b_k."""
    n = abs(k)
    if n not in a:
        return mp.mpf(0), mp.mpf(0)
    return a[n], (b[n] if k >= 0 else -b[n])


def f_rows(x, lam, extra=0, K=None):
    """Real residual rows for modes 0..K-1 (phase row first when extra = 1)."""
    al, L, a, b = split(x, extra)
    if extra:
        alpha, beta = al, _mp(lam)
    else:
        alpha, beta = _mp(lam), mp.mpf(1)
    d = len(a)
    K = d if K is None else K
    trig = {j: (mp.cos(j * L), mp.sin(j * L)) for j in range(-(d - 1), d)}
    rows = []
    if extra:
        rows.append(-1 + 2 * L * mp.fsum(k * b[k] for k in range(1, d)))
    rows.append(a[0] + 2 * mp.fsum(a[k] for k in range(1, d)))
    for k in range(K):
        ak, bk = _ab(a, b, k)
        c, s = mp.cos(k * L), mp.sin(k * L)
        r1 = alpha * c * ak + (-k * L + alpha * s) * bk
        r2 = (k * L - alpha * s) * ak + alpha * c * bk
        s1 = mp.mpf(0)
        s2 = mp.mpf(0)
        for k1 in range(-(d - 1), d):
            k2 = k - k1
            if abs(k2) >= d:
                continue
            a1, b1 = _ab(a, b, k1)
            a2, b2 = _ab(a, b, k2)
            p = a1 * a2 - b1 * b2
            q = a1 * b2 + b1 * a2
            c1, s1_ = trig[k1]
            s1 += c1 * p + s1_ * q
            s2 += -s1_ * p + c1 * q
        r1 += alpha * beta * s1
        r2 += alpha * beta * s2
        rows.append(r1)
        if k > 0:
            rows.append(r2)
    return rows


def f_vector(x, lam, extra=0, K=None):
    return np.array([float(v) for v in f_rows(x, lam, extra, K)])


def pad(x, extra, m):
    """Zero-pad to m modes; mpmath entries are kept as they are."""
    x = list(x)
    return x + [mp.mpf(0)] * (extra + 2 * m - len(x))


def neg_Af(J, x, lam, extra=0):
    """|J f(x, lam)| computed in mpmath (f has support below M = 2m - 1)."""
    m = (len(x) - extra) // 2
    M = 2 * m - 1
    f = f_rows(pad(x, extra, M), lam, extra)
    out = []
    for i in range(J.shape[0]):
        out.append(abs(mp.fsum(_mp(J[i, j]) * f[j] for j in range(len(f)))))
    return np.array([float(v) for v in out])


def directional(x, lam, v, extra=0, K=None, h=mp.mpf("1e-25")):
    """D_x f(x, lam) v by a central difference at 60 digits (error O(h^2))."""
    xm = [_mp(t) for t in x]
    vm = [_mp(t) for t in v]
    xp = [p + h * q for p, q in zip(xm, vm)]
    xn = [p - h * q for p, q in zip(xm, vm)]
    fp = f_rows(xp, lam, extra, K)
    fn = f_rows(xn, lam, extra, K)
    return [(p - q) / (2 * h) for p, q in zip(fp, fn)]


def lambda_block(k, L, a0, alpha, beta=1.0):
    k, L, a0, alpha, beta = (mp.mpf(k), _mp(L), _mp(a0), _mp(alpha), _mp(beta))
    amp = alpha * (1 + beta * a0)
    tau = alpha * beta * a0 + amp * mp.cos(k * L)
    delta = -k * L + amp * mp.sin(k * L)
    return mp.matrix([[tau, delta], [-delta, tau]])


def lambda_inverse_abs(k, L, a0, alpha, beta=1.0):
    inv = lambda_block(k, L, a0, alpha, beta) ** -1
    return np.array([[float(abs(inv[i, j])) for j in range(2)] for i in range(2)])


def conv_sums(k, s, K=100000):
    """Truncated S1(k), S2(k) over |k1| <= K (float64, error far below margins)."""
    k1 = np.arange(-K, K + 1, dtype=np.float64)
    k2 = k - k1

    def om(j):
        j = np.abs(j)
        return np.where(j == 0, 1.0, j**s)

    w = 1.0 / (om(k1) * om(k2))
    return float(np.sum(w)), float(np.sum(np.abs(k1) * w))


def tail_sum(s, M, N=10**6):
    k = np.arange(M, N + 1, dtype=np.float64)
    return float(np.sum(1.0 / k**s))
