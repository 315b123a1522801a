"""Outward-rounded interval arithmetic on numpy arrays.

Every interval is a pair of float64 arrays ``lo <= hi`` of identical shape.
Arithmetic is done in round-to-nearest and each computed endpoint is then
pushed one unit in the last place outward with ``np.nextafter``.  For the
four basic operations IEEE-754 guarantees the exact result lies within half
an ulp of the rounded one, so the nudged endpoints enclose it.  Results that
are exact by construction (a zero operand in a product, adding zero) are not
widened.

Elementary functions (sin, cos, log) are evaluated with mpmath at 120 bits,
rounded to the nearest double and then nudged outward.  The relative error
at that precision is far below half an ulp of the double result.

Intervals are immutable; there is no global rounding-mode state, so values
may be shared freely across threads.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

__all__ = [
    "DomainError",
    "ShapeError",
    "Interval",
    "IntervalScalar",
    "IntervalVector",
    "IntervalMatrix",
    "PI",
    "iv_arith",
    "iv_trig",
    "iv_linear_algebra",
    "iv_matmul",
    "iv_mat_inf_norm",
    "iv_contains",
    "add_up",
    "mul_up",
    "div_up",
]

_INF = np.inf
_MP_PREC = 120


class DomainError(ValueError):
    """Operation undefined on (part of) its interval argument."""


class ShapeError(ValueError):
    """Operand shapes do not conform."""


def _down(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


class Interval:
    """Array of closed intervals ``[lo, hi]`` with outward rounding.

    ``Interval(x)`` builds the degenerate interval ``[x, x]`` (exact when ``x``
    is a double).  Shapes broadcast like numpy arrays.
    """

    __slots__ = ("lo", "hi")
    __array_ufunc__ = None  # make ndarray <op> Interval dispatch to us

    def __init__(self, lo, hi=None, *, _check: bool = True):
        lo = _as_array(lo)
        hi = lo if hi is None else _as_array(hi)
        if lo.shape != hi.shape:
            lo, hi = np.broadcast_arrays(lo, hi)
        if _check:
            if np.isnan(lo).any() or np.isnan(hi).any():
                raise DomainError("NaN endpoint in interval")
            if (lo > hi).any():
                raise DomainError("interval with lo > hi")
        lo = lo.copy()
        hi = hi.copy()
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # ------------------------------------------------------------------ basics
    @classmethod
    def _raw(cls, lo, hi) -> "Interval":
        return cls(lo, hi, _check=True)

    @classmethod
    def coerce(cls, x) -> "Interval":
        if isinstance(x, Interval):
            return x
        return cls(x)

    @classmethod
    def hull(cls, a, b) -> "Interval":
        a, b = cls.coerce(a), cls.coerce(b)
        return cls._raw(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))

    @classmethod
    def zeros(cls, shape) -> "Interval":
        z = np.zeros(shape)
        return cls(z, z)

    @classmethod
    def concatenate(cls, items, axis=0) -> "Interval":
        items = [cls.coerce(i) for i in items]
        return cls._raw(
            np.concatenate([i.lo for i in items], axis=axis),
            np.concatenate([i.hi for i in items], axis=axis),
        )

    @classmethod
    def stack(cls, items, axis=0) -> "Interval":
        items = [cls.coerce(i) for i in items]
        return cls._raw(
            np.stack([i.lo for i in items], axis=axis),
            np.stack([i.hi for i in items], axis=axis),
        )

    @classmethod
    def where(cls, cond, a, b) -> "Interval":
        a, b = cls.coerce(a), cls.coerce(b)
        return cls._raw(np.where(cond, a.lo, b.lo), np.where(cond, a.hi, b.hi))

    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx) -> "Interval":
        return Interval(self.lo[idx], self.hi[idx], _check=False)

    def reshape(self, *shape) -> "Interval":
        return Interval(self.lo.reshape(*shape), self.hi.reshape(*shape), _check=False)

    @property
    def T(self) -> "Interval":
        return Interval(self.lo.T, self.hi.T, _check=False)

    def mid(self) -> np.ndarray:
        return 0.5 * self.lo + 0.5 * self.hi

    def width(self) -> np.ndarray:
        return self.hi - self.lo

    def mag(self) -> np.ndarray:
        """Upper bound of ``|x|`` (exact: no rounding involved)."""
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self) -> np.ndarray:
        """Lower bound of ``|x|``."""
        return np.where(
            (self.lo <= 0) & (self.hi >= 0), 0.0, np.minimum(np.abs(self.lo), np.abs(self.hi))
        )

    def contains(self, x) -> np.ndarray:
        x = _as_array(x)
        return (self.lo <= x) & (x <= self.hi)

    def subset_of(self, other) -> np.ndarray:
        other = Interval.coerce(other)
        return (other.lo <= self.lo) & (self.hi <= other.hi)

    def __repr__(self):
        if self.ndim == 0:
            return f"Interval([{float(self.lo)!r}, {float(self.hi)!r}])"
        return f"Interval(shape={self.shape})"

    # -------------------------------------------------------------- arithmetic
    def __neg__(self):
        return Interval(-self.hi, -self.lo, _check=False)

    def __pos__(self):
        return self

    def __abs__(self):
        lo = np.where((self.lo <= 0) & (self.hi >= 0), 0.0, np.minimum(np.abs(self.lo), np.abs(self.hi)))
        return Interval(lo, self.mag(), _check=False)

    def __add__(self, other):
        o = Interval.coerce(other)
        return Interval(_add_down(self.lo, o.lo), _add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Interval.coerce(other))

    def __rsub__(self, other):
        return Interval.coerce(other) + (-self)

    def __mul__(self, other):
        o = Interval.coerce(other)
        cands_lo = [_mul_down(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        cands_hi = [_mul_up(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        lo = np.minimum(np.minimum(cands_lo[0], cands_lo[1]), np.minimum(cands_lo[2], cands_lo[3]))
        hi = np.maximum(np.maximum(cands_hi[0], cands_hi[1]), np.maximum(cands_hi[2], cands_hi[3]))
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.coerce(other)
        if ((o.lo <= 0) & (o.hi >= 0)).any():
            raise DomainError("division by an interval containing zero")
        with np.errstate(over="ignore"):
            cands = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
            lows = [_div_down(a, b) for a, b in cands]
            highs = [_div_up(a, b) for a, b in cands]
        lo = np.minimum(np.minimum(lows[0], lows[1]), np.minimum(lows[2], lows[3]))
        hi = np.maximum(np.maximum(highs[0], highs[1]), np.maximum(highs[2], highs[3]))
        return Interval(lo, hi)

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def sqr(self) -> "Interval":
        a = abs(self)
        return Interval(_mul_down(a.lo, a.lo), _mul_up(a.hi, a.hi))

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise DomainError("only non-negative integer powers are supported")
        if n == 0:
            return Interval(np.ones(self.shape))
        if n % 2 == 0:
            base = self.sqr()
            out = base
            for _ in range(n // 2 - 1):
                out = out * base
            return out
        # odd powers are monotone; enclose each endpoint
        return _odd_pow(self, n)

    def sum(self, axis=-1) -> "Interval":
        """Sequential left-to-right sum along ``axis`` (deterministic order)."""
        lo = np.moveaxis(self.lo, axis, 0)
        hi = np.moveaxis(self.hi, axis, 0)
        if lo.shape[0] == 0:
            z = np.zeros(lo.shape[1:])
            return Interval(z, z)
        slo, shi = lo[0].copy(), hi[0].copy()
        for i in range(1, lo.shape[0]):
            slo = _add_down(slo, lo[i])
            shi = _add_up(shi, hi[i])
        return Interval(slo, shi)

    def max_upper(self):
        return float(np.max(self.hi))

    # --------------------------------------------------------------- functions
    def sin(self) -> "Interval":
        return _trig(self, "sin")

    def cos(self) -> "Interval":
        return _trig(self, "cos")

    def log(self) -> "Interval":
        if (self.lo <= 0).any():
            raise DomainError("log of a non-positive interval")
        lo = np.array([_mp_point("log", float(v))[0] for v in self.lo.ravel()]).reshape(self.shape)
        hi = np.array([_mp_point("log", float(v))[1] for v in self.hi.ravel()]).reshape(self.shape)
        return Interval(lo, hi)

    def sqrt(self) -> "Interval":
        if (self.lo < 0).any():
            raise DomainError("sqrt of a negative interval")
        lo = np.sqrt(self.lo)
        hi = np.sqrt(self.hi)
        # IEEE sqrt is correctly rounded
        return Interval(np.where(lo * lo == self.lo, lo, _down(lo)), np.where(hi * hi == self.hi, hi, _up(hi)))

    def __matmul__(self, other):
        return iv_matmul(self, other)

    def __rmatmul__(self, other):
        return iv_matmul(Interval.coerce(other), self)


IntervalScalar = Interval
IntervalVector = Interval
IntervalMatrix = Interval


# ---------------------------------------------------------------- rounding kit
def _add_down(a, b):
    s = a + b
    return np.where((a == 0) | (b == 0), s, _down(s))


def _add_up(a, b):
    s = a + b
    return np.where((a == 0) | (b == 0), s, _up(s))


def _mul_down(a, b):
    with np.errstate(invalid="ignore"):
        p = a * b
    return np.where((a == 0) | (b == 0), 0.0, _down(p))


def _mul_up(a, b):
    with np.errstate(invalid="ignore"):
        p = a * b
    return np.where((a == 0) | (b == 0), 0.0, _up(p))


def _div_down(a, b):
    q = a / b
    return np.where(a == 0, 0.0, _down(q))


def _div_up(a, b):
    q = a / b
    return np.where(a == 0, 0.0, _up(q))


def _odd_pow(x: Interval, n: int) -> Interval:
    # x -> x**n is increasing for odd n; enclose each endpoint separately.
    def enclose(v):
        lo = v.copy()
        hi = v.copy()
        for _ in range(n - 1):
            cands_lo = np.minimum(_mul_down(lo, v), _mul_down(hi, v))
            cands_hi = np.maximum(_mul_up(lo, v), _mul_up(hi, v))
            lo, hi = cands_lo, cands_hi
        return lo, hi

    llo, _ = enclose(x.lo)
    _, hhi = enclose(x.hi)
    return Interval(llo, hhi)


def add_up(a, b):
    """Upper bound of ``a + b`` for float arrays of upper bounds."""
    return _add_up(_as_array(a), _as_array(b))


def mul_up(a, b):
    """Upper bound of ``a * b`` for non-negative float arrays of upper bounds."""
    return _mul_up(_as_array(a), _as_array(b))


def div_up(a, b):
    """Upper bound of ``a / b`` for non-negative ``a`` and positive ``b``."""
    return _div_up(_as_array(a), _as_array(b))


# ----------------------------------------------------------- constants, trig
PI = Interval(3.141592653589793, math.nextafter(3.141592653589793, math.inf))
_TWO_PI = PI * 2.0
_HALF_PI = PI / 2.0


@lru_cache(maxsize=1 << 16)
def _mp_point(fn: str, x: float) -> tuple[float, float]:
    """Enclosure ``[lo, hi]`` of ``fn(x)`` for a double ``x``."""
    if x == 0.0:
        if fn == "sin":
            return 0.0, 0.0
        if fn == "cos":
            return 1.0, 1.0
    with mpmath.workprec(_MP_PREC):
        v = getattr(mpmath, fn)(mpmath.mpf(x))
        f = float(v)
    if fn == "log" and x == 1.0:
        return 0.0, 0.0
    return math.nextafter(f, -math.inf), math.nextafter(f, math.inf)


def _contains_point_of_lattice(lo: float, hi: float, offset: Interval) -> bool:
    """Could ``[lo, hi]`` contain ``offset + 2*pi*n`` for some integer ``n``?"""
    tlo = (Interval(lo) - offset) / _TWO_PI
    thi = (Interval(hi) - offset) / _TWO_PI
    return math.ceil(float(tlo.lo)) <= math.floor(float(thi.hi))


def _trig_scalar(lo: float, hi: float, fn: str) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("trig of a non-finite interval")
    if hi - lo >= float(_TWO_PI.lo):
        return -1.0, 1.0
    a = _mp_point(fn, lo)
    b = _mp_point(fn, hi) if hi != lo else a
    rlo = min(a[0], b[0])
    rhi = max(a[1], b[1])
    if fn == "sin":
        top, bottom = _HALF_PI, -_HALF_PI
    else:
        top, bottom = Interval(0.0), PI
    if hi != lo:
        if _contains_point_of_lattice(lo, hi, top):
            rhi = 1.0
        if _contains_point_of_lattice(lo, hi, bottom):
            rlo = -1.0
    return max(rlo, -1.0), min(rhi, 1.0)


def _trig(x: Interval, fn: str) -> Interval:
    lo = np.empty(x.shape)
    hi = np.empty(x.shape)
    flat_lo, flat_hi = x.lo.ravel(), x.hi.ravel()
    out_lo, out_hi = lo.reshape(-1), hi.reshape(-1)
    for i in range(flat_lo.size):
        out_lo[i], out_hi[i] = _trig_scalar(float(flat_lo[i]), float(flat_hi[i]), fn)
    return Interval(lo, hi)


# ---------------------------------------------------------- public helpers
def iv_arith(a, b, op: str) -> Interval:
    a, b = Interval.coerce(a), Interval.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def iv_trig(a, fn: str) -> Interval:
    a = Interval.coerce(a)
    if fn == "sin":
        return a.sin()
    if fn == "cos":
        return a.cos()
    raise ValueError(f"unknown trig function {fn!r}")


def iv_matmul(A, B) -> Interval:
    """Enclosure of ``A @ B`` for matrices (2-d) or matrix-vector (B 1-d)."""
    A, B = Interval.coerce(A), Interval.coerce(B)
    if A.ndim != 2 or B.ndim not in (1, 2):
        raise ShapeError(f"cannot multiply shapes {A.shape} and {B.shape}")
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"inner dimensions differ: {A.shape} @ {B.shape}")
    if B.ndim == 1:
        prod = A * B[None, :]
        return prod.sum(axis=1)
    prod = Interval(A.lo[:, :, None], A.hi[:, :, None], _check=False) * Interval(
        B.lo[None, :, :], B.hi[None, :, :], _check=False
    )
    return prod.sum(axis=1)


def iv_linear_algebra(M, v) -> Interval:
    """Matrix-vector product enclosure."""
    M, v = Interval.coerce(M), Interval.coerce(v)
    if v.ndim != 1:
        raise ShapeError("expected a vector")
    return iv_matmul(M, v)


def iv_mat_inf_norm(M) -> Interval:
    """Enclosure of the max absolute row sum."""
    M = Interval.coerce(M)
    if M.ndim != 2:
        raise ShapeError("expected a matrix")
    rows = abs(M).sum(axis=1)
    return Interval(np.max(rows.lo), np.max(rows.hi))


def iv_contains(outer, inner) -> bool:
    outer, inner = Interval.coerce(outer), Interval.coerce(inner)
    if outer.shape != inner.shape:
        raise ShapeError(f"shape mismatch {outer.shape} vs {inner.shape}")
    return bool(np.all(inner.subset_of(outer)))
