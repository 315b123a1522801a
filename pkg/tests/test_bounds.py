import numpy as np

import oracles
from conftest import ALPHA0
from wrightcert.bounds import BoundPolys, build_radii_polys, certify_radius, solve_neg_interval
from wrightcert.continuation import prepare_basepoint
from wrightcert.fourier import predictor


def test_coefficients_nonnegative(base0):
    P = base0.pb.polys
    assert np.all(P.Y >= 0) and np.all(P.ZF >= 0) and np.all(P.ZM >= 0)
    assert np.all(P.neg > 0)


def test_initial_Y_is_small(base0):
    Y = base0.pb.polys.Y
    assert np.max(Y[:, 0]) <= 1e-7 and np.max(Y[:, 1]) <= 1e-7


def test_zero_tangent_kills_higher_Y(base0):
    pb = prepare_basepoint(base0.x, np.zeros_like(base0.x), ALPHA0, 3)
    Y = pb.polys.Y
    # the parameter still moves, so only terms free of xdot and Ldot survive;
    # with alpha entering linearly and beta = 1 nothing beyond degree 1 remains
    assert np.all(Y[:, 2:] == 0)


def test_tail_poly_has_no_r_delta3_term(base0):
    ZM = base0.pb.polys.ZM
    assert ZM.shape[0] <= 3 or np.all(ZM[3:, 1] == 0)
    assert np.all(ZM[:, 0] == 0)


def test_origin_is_never_negative(base0):
    P = base0.pb.polys
    v = P.interval_eval(0.0, 0.0)
    assert np.all(v.hi >= 0)
    assert not certify_radius(P, 0.0, 0.0)


def test_monotone_in_delta(base0, rng):
    P = base0.pb.polys
    for _ in range(100):
        r = 10 ** rng.uniform(-9, -4)
        d1, d2 = sorted(10 ** rng.uniform(-9, -3, 2))
        assert np.all(P.numeric(r, d1) <= P.numeric(r, d2))


def test_solve_neg_interval_linear():
    # single schematic polynomial p(r) = 1 - r on top of a zero tail row
    pos = np.zeros((2, 1, 2))
    pos[0, 0, 0] = 1.0
    P = BoundPolys(np.zeros((1, 1)), np.zeros((1, 1, 2)), np.zeros((1, 2)), pos, np.array([1.0, 1.0]), 3, 3)
    found, (lo, hi) = solve_neg_interval(P, 0.0, rmax=10.0)
    assert found and abs(lo - 1.0) < 1e-9 and hi == 10.0


def test_solve_neg_interval_large_Y(base0):
    P = base0.pb.polys
    Y = P.Y.copy()
    Y[0, 0] = 1.0
    Q = build_radii_polys(Y, P.ZF, P.ZM, P.M, P.s, P.neg)
    found, _ = solve_neg_interval(Q, 0.0)
    assert not found


def test_small_step_certifies(base0):
    P = base0.pb.polys
    found, (lo, hi) = solve_neg_interval(P, 5e-6)
    assert found and 0 < lo < hi
    assert certify_radius(P, 0.5 * (lo + hi), 5e-6)


def test_Y_dominates_direct_residual(base0, rng):
    P = base0.pb.polys
    J = base0.pb.bp.JF
    for d in rng.uniform(0, 5e-6, 5):
        xa = predictor(base0.x, base0.xd, d)
        ref = oracles.neg_Af(J, xa, ALPHA0 + d)
        Yd = P.Y @ (d ** np.arange(P.Y.shape[1]))
        assert np.all(ref <= Yd * (1 + 1e-12) + 1e-300)
