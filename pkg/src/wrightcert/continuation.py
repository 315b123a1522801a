"""Validated parameter continuation: Newton corrector, tangent predictor,
radii-polynomial steps, gluing of consecutive tubes and growth of m.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bounds import Basepoint, BoundPolys, build_bounds, certify_radius, solve_neg_interval
from .errors import CertificateError, ConvergenceError, NumericalError
from .fourier import GalerkinPoint, SolutionTube, pad_vector, tube_inclusion
from .interval import Interval
from .operators import certify_invertibility, numeric_inverse
from .wright_map import WRIGHT, Problem, dlam, jacobian, residual

__all__ = [
    "BranchSegment",
    "Junction",
    "BranchCertificate",
    "StepSettings",
    "newton_correct",
    "tangent_solve",
    "prepare_basepoint",
    "validate_step",
    "glue_check",
    "run_branch",
    "next_parameter",
    "certified_span",
]

log = logging.getLogger(__name__)

GROW = 10.0 / 9.0
SHRINK = 9.0 / 10.0
M_GROWTH_TOL = 1e-9


def _vec(x):
    return np.asarray(x.data if isinstance(x, GalerkinPoint) else x, dtype=float)


@dataclass(frozen=True)
class BranchSegment:
    """Certified tube over [alpha0, alpha0 + delta] around xbar + (a - alpha0) xdot."""

    alpha0: float
    delta: float
    r0: float
    m: int
    s: int
    xbar: np.ndarray
    xdot: np.ndarray
    extra: int = 0

    @property
    def alpha_end(self) -> Interval:
        return Interval(self.alpha0) + Interval(self.delta)


@dataclass(frozen=True)
class Junction:
    """Gluing data at the left end of segment ``index`` (index >= 1)."""

    index: int
    r_minus: float
    r_plus: float
    glued: bool
    mode: str  # "outer" (B0 in B1+), "inner" (B1- in B0) or "none"


@dataclass
class BranchCertificate:
    problem: str
    s: int
    segments: list = field(default_factory=list)
    junctions: list = field(default_factory=list)
    status: str = "running"
    message: str = ""

    @property
    def junction_flags(self):
        return [j.glued for j in self.junctions]

    @property
    def alpha_range(self):
        if not self.segments:
            return None
        return self.segments[0].alpha0, float(self.segments[-1].alpha_end.hi)


@dataclass
class StepSettings:
    delta_init: float = 5e-5
    delta_min: float = 1e-15
    delta_max: float = 2.0
    newton_tol: float = 1e-13
    newton_maxit: int = 50
    threads: int = 1
    max_steps: int = 10**7


# -------------------------------------------------------------------- Newton
def newton_correct(seed, lam, tol: float = 1e-13, maxit: int = 50, prob: Problem = WRIGHT):
    """Plain floating point Newton on the Galerkin system f^(m)(x, lam) = 0.

    The residual is iterated to its floating point floor once below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    extra = seed.extra if isinstance(seed, GalerkinPoint) else prob.extra
    x = _vec(seed).copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("seed must be finite")
    lam = float(lam)
    res = residual(x, lam, prob)
    best = float(np.max(np.abs(res)))
    it = 0
    while best > tol:
        if it >= maxit:
            raise ConvergenceError(f"Newton did not reach {tol:g} in {maxit} steps (residual {best:.3e})")
        try:
            dx = np.linalg.solve(jacobian(x, lam, prob), res)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular Jacobian in Newton") from exc
        if not np.all(np.isfinite(dx)):
            raise NumericalError("non-finite Newton update")
        x = x - dx
        res = residual(x, lam, prob)
        best = float(np.max(np.abs(res)))
        it += 1
    # a couple of polishing steps near machine precision
    for _ in range(2):
        if best == 0.0:
            break
        dx = np.linalg.solve(jacobian(x, lam, prob), res)
        xn = x - dx
        rn = residual(xn, lam, prob)
        nn = float(np.max(np.abs(rn)))
        if nn >= best:
            break
        x, res, best = xn, rn, nn
    if best > tol:
        raise ConvergenceError(f"Newton stalled at residual {best:.3e}")
    return GalerkinPoint(x, extra)


def tangent_solve(xbar, lam, prob: Problem = WRIGHT):
    """xdot with D_x f^(m) xdot + d f^(m)/d lam = 0."""
    extra = xbar.extra if isinstance(xbar, GalerkinPoint) else prob.extra
    x = _vec(xbar)
    Df = jacobian(x, float(lam), prob)
    rhs = dlam(x, float(lam), prob)
    try:
        xd = -np.linalg.solve(Df, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular Jacobian; the tangent is undefined") from exc
    if not np.all(np.isfinite(xd)) or np.linalg.cond(Df) > 1e14:
        raise NumericalError("Jacobian numerically singular")
    return GalerkinPoint(xd, extra)


# ------------------------------------------------------------ validated step
@dataclass
class PreparedBasepoint:
    bp: Basepoint
    polys: BoundPolys


def prepare_basepoint(xbar, xdot, lam0, s: int = 3, prob: Problem = WRIGHT, threads: int = 1,
                      JF: np.ndarray | None = None) -> PreparedBasepoint:
    """Certify invertibility and build all bound polynomials once."""
    x = _vec(xbar)
    xd = _vec(xdot)
    e = prob.extra
    m = (len(x) - e) // 2
    M = 2 * m - 1
    if JF is None:
        JF = numeric_inverse(x, lam0, prob)
    Df = jacobian(Interval(pad_vector(x, e, M)), Interval(float(lam0)), prob)
    ok, defect = certify_invertibility(x, lam0, JF, prob, Df=Df)
    if not ok:
        raise CertificateError(f"approximate inverse not certified (defect {float(defect.hi):.3g})")
    bp = Basepoint(prob, x, xd, float(lam0), s, JF, threads)
    return PreparedBasepoint(bp, build_bounds(bp, Df))


def _try_delta(pb: PreparedBasepoint, delta: float):
    ok, I = solve_neg_interval(pb.polys, delta)
    if not ok:
        return False, 0.0, I
    r = 0.5 * (I[0] + I[1])
    if certify_radius(pb.polys, r, delta):
        return True, r, I
    return False, 0.0, I


def validate_step(xbar, xdot, alpha0, delta, s: int = 3, prob: Problem = WRIGHT, prepared=None):
    """(ok, r): p_k(r, delta) < 0 for every k, checked in interval arithmetic."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    pb = prepared or prepare_basepoint(xbar, xdot, alpha0, s, prob)
    ok, r, _ = _try_delta(pb, float(delta))
    return ok, r


def certified_span(pb: PreparedBasepoint):
    """Rigorously checked radii (r_minus, r_plus) near the ends of I at delta = 0."""
    ok, I = solve_neg_interval(pb.polys, 0.0)
    if not ok:
        return None
    lo, hi = I
    rm = lo * 1.01 if lo > 0 else hi * 1e-6
    rp = hi * 0.99
    for _ in range(40):
        if certify_radius(pb.polys, rm, 0.0):
            break
        rm = 0.5 * (rm + rp) if rm * 2 > rp else rm * 1.5
    else:
        return None
    for _ in range(40):
        if certify_radius(pb.polys, rp, 0.0):
            break
        rp = rm + 0.9 * (rp - rm)
    else:
        return None
    if rp < rm:
        return None
    return rm, rp


def _tube_at(seg: BranchSegment, lam1: float) -> SolutionTube:
    """Tube of ``seg`` at parameter lam1 (centre enclosed in interval arithmetic)."""
    dl = Interval(lam1) - Interval(seg.alpha0)
    centre = Interval(seg.xbar) + dl * Interval(seg.xdot)
    return SolutionTube(centre, seg.r0, seg.extra)


def glue_check(prev, next_xbar, next_r_interval, lam1: float | None = None, s: int | None = None):
    """True iff B0 in B1+ or B1- in B0 holds rigorously.

    ``prev`` is a BranchSegment (its tube is transported to the next
    basepoint parameter ``lam1``, default its right end) or a SolutionTube.
    Returns (glued, mode) when called with a BranchSegment, else a bool.
    """
    rm, rp = next_r_interval
    if isinstance(prev, SolutionTube):
        if s is None:
            raise ValueError("s is required for plain tubes")
        B0 = prev
        extra = prev.extra
    else:
        s = prev.s if s is None else s
        lam1 = float(prev.alpha_end.lo) if lam1 is None else lam1
        B0 = _tube_at(prev, lam1)
        extra = prev.extra
    xc = Interval.coerce(next_xbar.data if isinstance(next_xbar, GalerkinPoint) else next_xbar)
    if tube_inclusion(B0, SolutionTube(xc, rp, extra), s):
        res = (True, "outer")
    elif tube_inclusion(SolutionTube(xc, rm, extra), B0, s):
        res = (True, "inner")
    else:
        res = (False, "none")
    return res if isinstance(prev, BranchSegment) else res[0]


def next_parameter(alpha0: float, delta: float) -> float:
    """Largest float not exceeding alpha0 + delta: the next basepoint parameter."""
    return float((Interval(alpha0) + Interval(delta)).lo)


def _needs_more_modes(x: np.ndarray, extra: int) -> bool:
    return bool(abs(x[-1]) > M_GROWTH_TOL or abs(x[-2]) > M_GROWTH_TOL)


# --------------------------------------------------------------- main loop
def run_branch(seed, lam_start: float, lam_target: float, s: int = 3, prob: Problem = WRIGHT,
               settings: StepSettings | None = None,
               on_segment: Callable | None = None) -> BranchCertificate:
    """Certify the branch from lam_start up to lam_target (or an honest prefix).

    ``on_segment(cert, segment, junction)`` is called after every accepted
    segment so callers may write the certificate incrementally.
    """
    st = settings or StepSettings()
    if lam_target < lam_start:
        raise ValueError("target below the start parameter")
    cert = BranchCertificate(prob.tag, s)
    extra = prob.extra
    x = newton_correct(seed, lam_start, st.newton_tol, st.newton_maxit, prob).as_array()
    lam0 = float(lam_start)
    delta = st.delta_init
    prev = None
    bumped = False
    steps = 0
    while True:
        steps += 1
        if steps > st.max_steps:
            cert.status, cert.message = "partial", "step limit reached"
            break
        xd = tangent_solve(x, lam0, prob).as_array()
        try:
            pb = prepare_basepoint(x, xd, lam0, s, prob, st.threads)
        except CertificateError as exc:
            cert.status, cert.message = "partial", f"basepoint {lam0!r}: {exc}"
            break
        junction = None
        if prev is not None:
            span = certified_span(pb)
            if span is None:
                glued, mode, span = False, "none", (0.0, 0.0)
            else:
                glued, mode = glue_check(prev, x, span, lam0, s)
            junction = Junction(len(cert.segments), span[0], span[1], glued, mode)
            if not glued:
                cert.status = "partial"
                cert.message = f"gluing failed at {lam0!r}"
                break
        remaining = float((Interval(lam_target) - Interval(lam0)).hi) if lam_target > lam0 else 0.0
        if remaining <= 0:
            if prev is None:
                # empty range: a single existence ball at delta = 0
                ok, r, _ = _try_delta(pb, 0.0)
                if ok:
                    seg = BranchSegment(lam0, 0.0, r, (len(x) - extra) // 2, s, x.copy(), xd.copy(), extra)
                    cert.segments.append(seg)
                    if on_segment:
                        on_segment(cert, seg, None)
            cert.status = "complete" if cert.segments else "partial"
            break
        delta = min(delta, st.delta_max)
        ok = False
        while delta >= st.delta_min:
            d_try = min(delta, remaining)
            ok, r, _ = _try_delta(pb, d_try)
            if ok:
                break
            delta *= SHRINK
        if not ok:
            m = (len(x) - extra) // 2
            if bumped:
                cert.status = "partial"
                cert.message = f"step size below {st.delta_min:g} at {lam0!r} with m = {m}"
                break
            # one attempt with two more modes, restarting from this basepoint
            log.info("step 9 at %r: retrying with m = %d", lam0, m + 2)
            bumped = True
            x = newton_correct(GalerkinPoint(pad_vector(x, extra, m + 2), extra), lam0,
                               st.newton_tol, st.newton_maxit, prob).as_array()
            delta = st.delta_init
            steps -= 1
            continue
        seg = BranchSegment(lam0, d_try, r, (len(x) - extra) // 2, s, x.copy(), xd.copy(), extra)
        cert.segments.append(seg)
        if junction is not None:
            cert.junctions.append(junction)
        if on_segment:
            on_segment(cert, seg, junction)
        log.debug("segment %d: [%r, +%g] r=%.3g m=%d", len(cert.segments), lam0, d_try, r, seg.m)
        if d_try >= remaining:
            cert.status = "complete"
            break
        prev = seg
        bumped = False
        lam1 = next_parameter(lam0, d_try)
        guess = x + (lam1 - lam0) * xd
        x = newton_correct(GalerkinPoint(guess, extra), lam1, st.newton_tol, st.newton_maxit, prob).as_array()
        if _needs_more_modes(x, extra):
            m = (len(x) - extra) // 2
            x = newton_correct(GalerkinPoint(pad_vector(x, extra, m + 1), extra), lam1,
                               st.newton_tol, st.newton_maxit, prob).as_array()
        lam0 = lam1
        delta = min(delta * GROW, st.delta_max)
    return cert
