import math

import numpy as np
import pytest

from wrightcert.fourier import (
    GalerkinPoint,
    SolutionTube,
    eval_solution,
    start_seed,
    norm_s,
    predictor,
    tube_inclusion,
)
from wrightcert.interval import Interval, ShapeError


def test_norm_of_zero():
    assert norm_s(np.zeros(8), 3).hi == 0.0


def test_norm_single_mode():
    x = np.zeros(8)
    x[4] = 0.5  # a2
    r = norm_s(x, 3)
    assert r.lo <= 4.0 <= r.hi


def test_norm_start_matches_direct_max():
    x = start_seed().as_array()
    direct = max([abs(x[0]), abs(x[1])] + [abs(x[2 + i]) * ((i // 2) + 1) ** 3 for i in range(10)])
    r = norm_s(x, 3)
    assert r.lo <= direct <= r.hi


def test_norm_homogeneity(rng):
    x = rng.standard_normal(12)
    for c in (-3.0, 0.5, 7.25):
        a = norm_s(c * x, 3)
        b = abs(c) * norm_s(x, 3)
        assert a.lo <= b.hi and b.lo <= a.hi


def test_predictor_examples(rng):
    xb = rng.standard_normal(10)
    xd = rng.standard_normal(10)
    assert np.array_equal(predictor(xb, xd, 0.0), xb)
    e = np.zeros(10)
    e[3] = 1.0
    assert np.allclose(predictor(np.zeros(10), e, 0.1), 0.1 * e, rtol=0, atol=0)
    r = predictor(xb, xd, Interval(5e-5))
    exact = xb + 5e-5 * xd
    assert np.all(r.lo <= exact) and np.all(exact <= r.hi)
    with pytest.raises(ShapeError):
        predictor(xb, xd[:8], 0.1)


def test_tube_inclusion_cases():
    c = Interval(start_seed().as_array())
    assert tube_inclusion(SolutionTube(c, 1e-6), SolutionTube(c, 2e-6), 3)
    assert not tube_inclusion(SolutionTube(c, 2e-6), SolutionTube(c, 1e-6), 3)
    shifted = Interval(start_seed().as_array() + np.r_[0, 0, 0, 5e-6, np.zeros(8)])
    assert not tube_inclusion(SolutionTube(shifted, 1e-6), SolutionTube(c, 2e-6), 3)


def test_ball_nesting(rng):
    c = Interval(rng.standard_normal(10))
    for _ in range(20):
        r1, r2 = sorted(rng.uniform(1e-8, 1e-3, 2))
        assert tube_inclusion(SolutionTube(c, r1), SolutionTube(c, r2), 3)


def test_eval_solution():
    t = np.linspace(0, 10, 11)
    assert np.all(eval_solution(np.zeros(6), t) == 0.0)
    x = np.array([1.3, -0.4, 0.2, 0.0])
    assert abs(eval_solution(x, 0.0)) < 1e-16
    y0 = eval_solution(start_seed(), 0.0)
    assert abs(y0) <= 1e-12


def test_bad_length():
    with pytest.raises(ShapeError):
        GalerkinPoint(np.zeros(5))
    assert GalerkinPoint(np.zeros(5), 1).m == 2
    assert start_seed().padded(9).m == 9
    assert math.isclose(start_seed().L, 1.570599180042083)
