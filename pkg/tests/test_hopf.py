import math

import numpy as np
import pytest

import oracles
from wrightcert.continuation import BranchSegment
from wrightcert.errors import CertificateError
from wrightcert.hopf import BETA0, HopfPoint, eval_F, hopf_datum, rescale_connect, run_beta_branch
from wrightcert.interval import Interval
from wrightcert.wright_map import HOPF, WRIGHT, residual


@pytest.mark.parametrize("m", [2, 3, 6, 9])
def test_datum_is_exact_zero(m):
    F = eval_F(hopf_datum(m, interval=True), 0.0)
    assert np.all(F.lo <= 0) and np.all(0 <= F.hi)
    assert float(np.max(F.width())) <= 1e-12


def test_zero_point_phase_row():
    F = eval_F(np.zeros(13), 0.3)
    assert F[0].lo == -1.0 == F[0].hi
    assert np.all(F[1:].mag() == 0)


def test_random_points_match_oracle(rng):
    for _ in range(10):
        X = rng.standard_normal(11) * 0.1
        X[0], X[1] = rng.uniform(1.4, 1.8, 2)
        beta = rng.uniform(0, 0.1)
        F = eval_F(X, beta)
        ref = oracles.f_vector(X, beta, extra=1)
        assert np.all(F.lo - 1e-14 <= ref) and np.all(ref <= F.hi + 1e-14)


def test_scaling_identity(rng):
    for _ in range(10):
        X = rng.standard_normal(11) * 0.2
        X[0], X[1] = rng.uniform(1.4, 1.8, 2)
        beta = rng.uniform(0.01, 0.2)
        y = np.concatenate([X[1:2], beta * X[2:]])
        fw = residual(y, X[0], WRIGHT)
        fh = residual(X, beta, HOPF)
        assert np.allclose(fw[1:], beta * fh[2:], rtol=0, atol=1e-15)


def test_hopf_point_roundtrip():
    v = hopf_datum(5)
    p = HopfPoint.from_vector(v)
    assert p.m == 5 and math.isclose(p.b[0], 1 / math.pi)
    assert np.array_equal(p.to_vector(), v)


def test_beta_zero_gives_single_ball():
    cert = run_beta_branch(0.0)
    assert cert.status == "complete" and len(cert.segments) == 1
    assert cert.segments[0].delta == 0.0


def _synthetic(beta, r_beta, r_alpha, shift=0.0):
    X = hopf_datum(6)
    X[3:] += 0.001
    zb = BranchSegment(beta, 0.0, r_beta, 6, 3, X, np.zeros_like(X), 1)
    y = np.concatenate([X[1:2], beta * X[2:]])
    y[3] += shift
    ya = BranchSegment(X[0] - 1e-6, 2e-6, r_alpha, 6, 3, y, np.zeros_like(y), 0)
    return zb, ya


def test_synthetic_rescale_connect():
    zb, ya = _synthetic(0.05, 1e-9, 1e-6)
    assert rescale_connect(zb, ya)
    zb, ya = _synthetic(0.05, 1e-9, 1e-6, shift=1e-3)
    assert not rescale_connect(zb, ya)


def test_rescale_parameter_mismatch():
    zb, ya = _synthetic(0.05, 1e-9, 1e-6)
    far = BranchSegment(ya.alpha0 + 1.0, ya.delta, ya.r0, ya.m, ya.s, ya.xbar, ya.xdot, 0)
    with pytest.raises(CertificateError):
        rescale_connect(zb, far)


def test_beta0_constant():
    assert BETA0 == 0.099847913753516
