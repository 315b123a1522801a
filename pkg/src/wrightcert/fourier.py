"""Fourier sequence space: Galerkin points, weighted norms, predictors, tubes.

Unknown layout for a point with ``extra`` leading parameter slots (0 for
Wright's equation, 1 for the rescaled Hopf problem where alpha is unknown)::

    [alpha]  L  a0  a1 b1  a2 b2 ...  a_{m-1} b_{m-1}

The point is identified with an infinite sequence whose modes k >= m vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interval import Interval, ShapeError

__all__ = [
    "GalerkinPoint",
    "SolutionTube",
    "weights",
    "mode_of_index",
    "norm_s",
    "predictor",
    "tube_inclusion",
    "eval_solution",
    "start_seed",
    "START_ALPHA_EPS",
]

# Approximate zero at alpha0 = pi/2 + eps used to start the continuation
START_ALPHA_EPS = 7.3165e-4
_START = [
    1.570599180042083,
    0.0,
    0.000393777377493, 0.031377227341359,
    -0.000389051487791, 0.000206800585095,
    -0.000004694294098, -0.000001372932742,
    -0.000000031481138, -0.000000035052666,
    -0.000000000114467, -0.000000000397361,
]


@dataclass(frozen=True)
class GalerkinPoint:
    """Finite Fourier data; ``data`` is a float array or an Interval vector."""

    data: object
    extra: int = 0

    def __post_init__(self):
        n = len(self.data)
        if (n - self.extra) % 2 or n - self.extra < 2:
            raise ShapeError(f"bad Galerkin vector length {n} for extra={self.extra}")

    @property
    def m(self) -> int:
        return (len(self.data) - self.extra) // 2

    def __len__(self):
        return len(self.data)

    @property
    def L(self):
        return self.data[self.extra]

    def padded(self, m: int) -> "GalerkinPoint":
        if m < self.m:
            raise ShapeError("cannot pad to a smaller dimension")
        return GalerkinPoint(pad_vector(self.data, self.extra, m), self.extra)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=float)


def pad_vector(v, extra: int, m: int):
    n_new = extra + 2 * m
    if isinstance(v, Interval):
        if len(v) == n_new:
            return v
        z = np.zeros(n_new - len(v))
        return Interval.concatenate([v, Interval(z)])
    v = np.asarray(v, dtype=float)
    out = np.zeros(n_new)
    out[: len(v)] = v
    return out


def mode_of_index(n: int, extra: int) -> np.ndarray:
    """Fourier mode carried by each unknown (parameter slots report 0)."""
    idx = np.arange(n)
    return np.where(idx < extra + 2, 0, (idx - extra) // 2)


def weights(n: int, extra: int, s: float) -> Interval:
    """Enclosure of omega_k per unknown: 1 for k = 0 and k**s otherwise."""
    k = mode_of_index(n, extra).astype(float)
    w = np.where(k == 0, 1.0, k**s)
    # integer powers of small integers are exact in binary64
    return Interval(w)


def inv_weights(n: int, extra: int, s: float) -> Interval:
    return Interval(np.ones(n)) / weights(n, extra, s)


def norm_s(x, s: float = 3, extra: int = 0) -> Interval:
    """Weighted sup norm  max_k |x_k|_inf omega_k  (tail contributes 0)."""
    if s < 2:
        raise ValueError("s must be at least 2")
    v = x.data if isinstance(x, GalerkinPoint) else x
    if isinstance(x, GalerkinPoint):
        extra = x.extra
    v = Interval.coerce(v)
    w = weights(len(v), extra, s)
    vals = abs(v) * w
    return Interval(np.max(vals.lo), np.max(vals.hi))


def predictor(xbar, xdot, delta):
    """x_alpha = xbar + delta * xdot.

    Point arithmetic for float inputs (Newton seeds); interval arithmetic when
    ``delta`` or the data are intervals.
    """
    xb = xbar.data if isinstance(xbar, GalerkinPoint) else xbar
    xd = xdot.data if isinstance(xdot, GalerkinPoint) else xdot
    if len(xb) != len(xd):
        raise ShapeError("xbar and xdot have different lengths")
    if isinstance(delta, Interval) or isinstance(xb, Interval) or isinstance(xd, Interval):
        if np.any(Interval.coerce(delta).lo < 0):
            raise ValueError("delta must be non-negative")
        out = Interval.coerce(xb) + Interval.coerce(delta) * Interval.coerce(xd)
    else:
        if delta < 0:
            raise ValueError("delta must be non-negative")
        out = np.asarray(xb, dtype=float) + delta * np.asarray(xd, dtype=float)
    if isinstance(xbar, GalerkinPoint):
        return GalerkinPoint(out, xbar.extra)
    return out


@dataclass(frozen=True)
class SolutionTube:
    """Set  {x : x - center in B(r)}  with an interval-valued center."""

    center: Interval
    r: float
    extra: int = 0


def _box(center: Interval, r: float, extra: int, s: float, outer: bool):
    n = len(center)
    rw = Interval(r) / weights(n, extra, s)
    if outer:
        lo = (Interval(center.lo) - Interval(rw.hi)).lo
        hi = (Interval(center.hi) + Interval(rw.hi)).hi
    else:
        lo = (Interval(center.hi) - Interval(rw.lo)).hi
        hi = (Interval(center.lo) + Interval(rw.lo)).lo
    return lo, hi


def tube_inclusion(inner: SolutionTube, outer: SolutionTube, s: float) -> bool:
    """Rigorous test of  inner.center + B(inner.r)  subset of  outer.center + B(outer.r).

    Both centers are padded to a common number of modes.  Finite indices are
    compared componentwise (outer box of the inner set against the inner box
    of the outer set).  Beyond the padded support both sets are products of
    [-r/omega_k, r/omega_k], so the tail reduces to inner.r <= outer.r.
    """
    if inner.extra != outer.extra:
        raise ShapeError("tubes from different problems")
    extra = inner.extra
    mi = (len(inner.center) - extra) // 2
    mo = (len(outer.center) - extra) // 2
    m = max(mi, mo)
    ci = Interval.coerce(pad_vector(inner.center, extra, m))
    co = Interval.coerce(pad_vector(outer.center, extra, m))
    ilo, ihi = _box(ci, inner.r, extra, s, outer=True)
    olo, ohi = _box(co, outer.r, extra, s, outer=False)
    if not (inner.r <= outer.r):
        return False
    return bool(np.all(olo <= ilo) and np.all(ihi <= ohi))


def eval_solution(x, t, extra: int | None = None):
    """y(t) = a0 + 2 sum_k (a_k cos kLt - b_k sin kLt); plain floating point."""
    if isinstance(x, GalerkinPoint):
        extra = x.extra
        v = x.as_array()
    else:
        v = np.asarray(x, dtype=float)
        extra = extra or 0
    L = v[extra]
    a0 = v[extra + 1]
    rest = v[extra + 2:]
    a = rest[0::2]
    b = rest[1::2]
    k = np.arange(1, len(a) + 1)
    t = np.asarray(t, dtype=float)
    ph = np.multiply.outer(t, k * L)
    return a0 + 2.0 * (np.cos(ph) @ a - np.sin(ph) @ b)


def start_seed() -> GalerkinPoint:
    """Reference approximate zero (m = 6) at alpha0 = pi/2 + 7.3165e-4."""
    return GalerkinPoint(np.array(_START))
