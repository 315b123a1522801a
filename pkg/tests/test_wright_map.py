import numpy as np
import pytest

import oracles
from conftest import ALPHA0
from wrightcert.fourier import start_seed, pad_vector
from wrightcert.interval import Interval
from wrightcert.wright_map import (
    HOPF,
    WRIGHT,
    MapComponentIndex,
    d_alpha,
    dlam,
    eval_f_component,
    eval_f_truncated,
    jacobian,
    jacobian_truncated,
    residual,
    residual_coeffs,
)


def _seed():
    return start_seed().as_array()


def _inside(iv, vals, tol=0.0):
    return np.all(iv.lo - tol <= vals) and np.all(vals <= iv.hi + tol)


def test_zero_point():
    z = np.zeros(12)
    assert np.all(eval_f_truncated(z, 1.3).mag() == 0)
    assert np.all(d_alpha(z, 1.3).mag() == 0)
    for k in range(6):
        for i in (1, 2):
            assert float(eval_f_component(MapComponentIndex(k, i), z, 2.0).mag()) == 0.0


def test_h_row_on_start():
    x = _seed()
    r = eval_f_component(MapComponentIndex(0, 1), x, ALPHA0)
    direct = x[1] + 2 * sum(x[2::2])
    assert abs(float(r.mid()) - direct) < 1e-15 and abs(direct) <= 1e-12


def test_start_is_approximate_zero():
    r = eval_f_truncated(_seed(), ALPHA0)
    assert float(np.max(r.mag())) <= 1e-9


def test_high_modes_match_oracle():
    x = _seed()
    m = 6
    full = oracles.f_rows(pad_vector(x, 0, 2 * m + 2), ALPHA0)
    for k in (2 * m - 1, 2 * m, 2 * m + 1):
        for i in (1, 2):
            v = eval_f_component(MapComponentIndex(k, i), pad_vector(x, 0, 2 * m + 2), ALPHA0)
            assert _inside(v, float(full[2 * k + i - 1]), 1e-17)
    v = eval_f_component(MapComponentIndex(2 * m - 1, 1), x, ALPHA0)
    assert float(v.mag()) == 0.0


def test_random_points_match_oracle(rng):
    for _ in range(10):
        x = rng.standard_normal(10) * np.r_[1, 1, 0.3, 0.3, 0.1, 0.1, 0.03, 0.03, 0.01, 0.01]
        lam = rng.uniform(1.0, 3.0)
        ref = oracles.f_vector(x, lam)
        r = residual(Interval(x), Interval(lam))
        assert _inside(r, ref, 1e-14 * (1 + np.abs(ref)))


def test_hopf_rows_match_oracle(rng):
    x = rng.standard_normal(11) * 0.1
    x[0], x[1] = 1.6, 1.55
    ref = oracles.f_vector(x, 0.3, extra=1)
    r = residual(Interval(x), Interval(0.3), HOPF)
    assert _inside(r, ref, 1e-14)


def test_jacobian_at_zero():
    J = jacobian_truncated(np.zeros(8), 1.7)
    for k in range(1, 4):
        rows = slice(2 * k, 2 * k + 2)
        blk = J[rows, rows]
        assert np.allclose(blk.mid(), [[1.7, 0], [0, 1.7]])


@pytest.mark.parametrize("prob,lam", [(WRIGHT, ALPHA0), (HOPF, 0.05)])
def test_jacobian_central_difference(prob, lam):
    x = _seed()
    if prob.extra:
        x = np.r_[ALPHA0, x]
    J = jacobian(x, lam, prob)
    h = 1e-6
    for j in range(len(x)):
        e = np.zeros(len(x))
        e[j] = h
        fd = (residual(x + e, lam, prob) - residual(x - e, lam, prob)) / (2 * h)
        assert np.max(np.abs(fd - J[:, j])) < 1e-8


def test_lambda_block_closed_form():
    x = pad_vector(_seed(), 0, 12)
    J = jacobian_truncated(x, ALPHA0)
    k = 11
    ref = oracles.lambda_block(k, x[0], x[1], ALPHA0)
    blk = J[2 * k:2 * k + 2, 2 * k:2 * k + 2].mid()
    assert np.max(np.abs(blk - np.array(ref.tolist(), dtype=float))) < 1e-12


def test_d_alpha_properties():
    x = _seed()
    h = 1e-6
    fd = (residual(x, ALPHA0 + h) - residual(x, ALPHA0 - h)) / (2 * h)
    da = d_alpha(x, ALPHA0)
    assert np.max(np.abs(fd - da.mid())) < 1e-8
    # affine in alpha
    a1, a2 = 1.6, 1.9
    diff = eval_f_truncated(x, a1) - eval_f_truncated(x, a2)
    lin = d_alpha(x, 1.0) * (a1 - a2)
    assert np.max(np.abs(diff.mid() - lin.mid())) < 1e-14
    assert np.allclose(dlam(x, ALPHA0), da.mid(), atol=1e-16)


def test_residual_coeffs(base0):
    d0, d1 = residual_coeffs(np.zeros(12), np.zeros(12), ALPHA0)
    assert float(np.max(Interval.coerce(d0).mag())) == 0 and float(np.max(Interval.coerce(d1).mag())) == 0
    d0, d1 = residual_coeffs(base0.x, base0.xd, ALPHA0)
    d0, d1 = Interval.coerce(d0), Interval.coerce(d1)
    assert float(np.max(d0.mag())) <= 1e-9
    # the tangent solve zeroes d1 on the Galerkin rows; the extended rows stay small
    assert float(np.max(d1[:12].mag())) <= 1e-9
    assert float(np.max(d1.mag())) <= 1e-6
    # d1 is the first Taylor coefficient of f(xbar + t xdot, alpha0 + t) on the extended range
    h = 1e-6
    M = 2 * 6 - 1

    def g(t):
        return residual(pad_vector(base0.x + t * base0.xd, 0, M), ALPHA0 + t)

    fd = (g(h) - g(-h)) / (2 * h)
    assert np.max(np.abs(fd - d1.mid())) < 1e-8
