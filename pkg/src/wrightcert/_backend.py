"""Tiny dispatch layer so formula code runs on floats or on intervals."""

import numpy as np

from .interval import Interval


def is_iv(x) -> bool:
    return isinstance(x, Interval)


def sin(x):
    return x.sin() if is_iv(x) else np.sin(x)


def cos(x):
    return x.cos() if is_iv(x) else np.cos(x)


def vsum(x, axis=-1):
    """Sum along an axis; sequential for intervals (deterministic)."""
    return x.sum(axis=axis) if is_iv(x) else np.sum(x, axis=axis)


def stack(items, axis=0):
    if any(is_iv(i) for i in items):
        return Interval.stack(items, axis=axis)
    return np.stack([np.asarray(i, dtype=float) for i in items], axis=axis)


def concat(items, axis=0):
    if any(is_iv(i) for i in items):
        return Interval.concatenate(items, axis=axis)
    return np.concatenate([np.atleast_1d(np.asarray(i, dtype=float)) for i in items], axis=axis)


def take(x, idx):
    """Fancy indexing that works for both kinds."""
    return x[idx]


def zeros_like(x, shape):
    return Interval.zeros(shape) if is_iv(x) else np.zeros(shape)


def lift(value, like):
    """Promote a float array to the kind of ``like``."""
    if is_iv(like) and not is_iv(value):
        return Interval(value)
    return value
