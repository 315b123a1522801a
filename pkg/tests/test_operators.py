import numpy as np
import pytest

import oracles
from conftest import ALPHA0
from wrightcert.errors import CertificateError
from wrightcert.fourier import start_seed
from wrightcert.interval import PI, Interval
from wrightcert.operators import (
    ApproxInverse,
    apply_A,
    build_lambda_k,
    certify_invertibility,
    numeric_inverse,
    tail_bound,
)
from wrightcert.wright_map import jacobian


def test_degenerate_hopf_block():
    blk = build_lambda_k(1, PI / 2, 0.0, PI / 2)
    assert np.all(blk.lo <= 0) and np.all(blk.hi >= 0) and np.all(blk.mag() < 1e-14)


def test_block_matches_direct_formula():
    x = start_seed().as_array()
    blk = build_lambda_k(11, x[0], x[1], ALPHA0)
    ref = np.array(oracles.lambda_block(11, x[0], x[1], ALPHA0).tolist(), dtype=float)
    assert np.all(blk.lo <= ref + 1e-16) and np.all(ref - 1e-16 <= blk.hi)


def test_delta_negative_on_tail():
    x = start_seed().as_array()
    blk = build_lambda_k(np.arange(11, 200), x[0], x[1], ALPHA0)
    assert np.all(blk[:, 0, 1].hi < 0)


def test_tail_bound_examples():
    tb = tail_bound(np.array([1.0, 0.0, 0, 0]), 1.0, 11)
    assert tb.rho.lo <= 1.1 <= tb.rho.hi
    x = start_seed().as_array()
    tb = tail_bound(x, ALPHA0, 11)
    assert abs(float(tb.rho.mid()) - 0.70041) < 1e-5
    Xi = tb.Xi
    assert Xi[0, 1].lo == tb.rho.lo and Xi[1, 0].hi == tb.rho.hi
    with pytest.raises(CertificateError):
        tail_bound(np.array([0.01, 0.0, 0, 0]), 1.0, 3)


def test_certify_invertibility_cases():
    x = np.array([2.0, -0.2, 0.1, 0.05])
    # M = 3, so the finite block is 6x6
    n = 6
    Df = jacobian(np.r_[x, 0.0, 0.0], 1.0)
    ok, defect = certify_invertibility(x, 1.0, np.linalg.inv(Df))
    assert ok and defect.hi < 1e-13
    ok, defect = certify_invertibility(x, 1.0, np.zeros((n, n)))
    assert not ok and defect.lo <= 1.0 <= defect.hi


def test_start_invertibility(base0):
    J = numeric_inverse(base0.x, ALPHA0)
    ok, defect = certify_invertibility(base0.x, ALPHA0, J)
    assert ok and defect.hi <= 1e-8


def _op(base0):
    return ApproxInverse(numeric_inverse(base0.x, ALPHA0), base0.x, ALPHA0, 11)


def test_apply_A_zero_and_single_mode(base0):
    op = _op(base0)
    assert np.all(apply_A(op, np.zeros(40)).mag() == 0)
    k = 15
    v = np.zeros(2 * 20)
    v[2 * k:2 * k + 2] = [0.3, -0.7]
    r = apply_A(op, v)
    blk = build_lambda_k(k, base0.x[0], base0.x[1], ALPHA0).mid()
    tau, dl = blk[0, 0], blk[0, 1]
    ref = np.array([[tau, -dl], [dl, tau]]) @ v[2 * k:2 * k + 2] / (tau**2 + dl**2)
    assert np.allclose(r[2 * k:2 * k + 2].mid(), ref, rtol=1e-12, atol=0)
    assert np.all(r[:2 * k].mag() == 0) and np.all(r[2 * k + 2:].mag() == 0)


def test_tail_inverse_dominated(base0, rng):
    op = _op(base0)
    tb = tail_bound(base0.x, ALPHA0, 11)
    Xi = tb.Xi.hi
    kmax = 112
    for _ in range(20):
        v = rng.standard_normal(2 * kmax)
        r = apply_A(op, v).mag()
        for k in range(11, kmax):
            bound = Xi @ np.abs(v[2 * k:2 * k + 2]) / k
            assert np.all(r[2 * k:2 * k + 2] <= bound)


def test_regularization_property(base0, rng):
    op = _op(base0)
    tb = tail_bound(base0.x, ALPHA0, 11)
    rowsum = float(np.max(tb.Xi.hi.sum(axis=1)))
    v = rng.standard_normal(2 * 60)
    r = apply_A(op, v).mag()
    for k in range(11, 60):
        vk = np.max(np.abs(v[2 * k:2 * k + 2]))
        assert np.max(r[2 * k:2 * k + 2]) * k ** 4 <= rowsum * vk * k**3 * (1 + 1e-12)
