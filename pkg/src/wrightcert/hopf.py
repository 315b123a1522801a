"""Rescaled problem near the Hopf point.

With y = beta z Wright's equation becomes z' = -alpha z(t-1)[1 + beta z(t)].
The unknowns are X = (alpha, L, a0, a1, b1, ...) and the parameter is beta.
Next to h = a0 + 2 sum a_k the phase row -1 + 2L sum k b_k = 0 fixes
z'(0) = -1.  At beta = 0 the exact zero is alpha = L = pi/2, b1 = 1/pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .continuation import (
    BranchCertificate,
    BranchSegment,
    StepSettings,
    certified_span,
    glue_check,
    newton_correct,
    prepare_basepoint,
    run_branch,
    tangent_solve,
    validate_step,
)
from .errors import CertificateError
from .fourier import GalerkinPoint, pad_vector
from .interval import PI, Interval
from .wright_map import HOPF, WRIGHT, residual

__all__ = [
    "HopfPoint",
    "HopfMapIndex",
    "hopf_datum",
    "eval_F",
    "run_beta_branch",
    "rescale_tube",
    "rescale_connect",
    "BETA0",
    "endpoint_ball",
    "alpha_segment_for",
    "connect_branches",
    "connect_to_alpha_branch",
]

BETA0 = 0.099847913753516


@dataclass(frozen=True)
class HopfMapIndex:
    k: int  # -1 addresses the phase row


@dataclass(frozen=True)
class HopfPoint:
    alpha: object
    L: object
    a: object  # a0..a_{m-1}
    b: object  # b1..b_{m-1}

    @property
    def m(self) -> int:
        return len(self.a)

    def to_vector(self):
        iv = any(isinstance(v, Interval) for v in (self.alpha, self.L, self.a, self.b))
        if iv:
            a = Interval.coerce(self.a)
            b = Interval.coerce(self.b)
            parts = [Interval.coerce(self.alpha).reshape(1), Interval.coerce(self.L).reshape(1), a[0:1]]
            for k in range(1, self.m):
                parts += [a[k:k + 1], b[k - 1:k]]
            return Interval.concatenate(parts)
        out = [float(self.alpha), float(self.L), float(self.a[0])]
        for k in range(1, self.m):
            out += [float(self.a[k]), float(self.b[k - 1])]
        return np.array(out)

    @classmethod
    def from_vector(cls, v):
        m = (len(v) - 1) // 2
        return cls(v[0], v[1], np.concatenate([[v[2]], v[3::2]]) if not isinstance(v, Interval) else
                   Interval.concatenate([v[2:3], v[3::2]]), v[4::2])


def hopf_datum(m: int = 6, interval: bool = False):
    """alpha = L = pi/2, b1 = 1/pi, everything else zero."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if interval:
        half = PI / 2.0
        v = Interval.concatenate([half.reshape(1), half.reshape(1), Interval(np.zeros(2 * m - 1))])
        parts = [v[:4], (Interval(1.0) / PI).reshape(1), v[5:]] if m >= 2 else [v]
        return Interval.concatenate(parts)
    v = np.zeros(2 * m + 1)
    v[0] = v[1] = np.pi / 2
    v[4] = 1.0 / np.pi
    return v


def eval_F(X, beta) -> Interval:
    """Interval enclosure of F(X, beta): phase row, h row, then k = 0.. rows."""
    if isinstance(X, HopfPoint):
        X = X.to_vector()
    if isinstance(X, GalerkinPoint):
        X = X.data
    return residual(Interval.coerce(X), Interval.coerce(beta), HOPF)


def run_beta_branch(beta_target: float, m: int = 6, s: int = 3, settings: StepSettings | None = None,
                    on_segment=None) -> BranchCertificate:
    """Validated continuation in beta from the exact zero at beta = 0."""
    if beta_target < 0:
        raise ValueError("beta must be non-negative")
    seed = GalerkinPoint(hopf_datum(m), HOPF.extra)
    return run_branch(seed, 0.0, float(beta_target), s, HOPF, settings, on_segment)


def _segment_box(seg: BranchSegment, lam: Interval):
    """Interval hull of the tube of ``seg`` at parameters ``lam``: (centre, r)."""
    dl = lam - Interval(seg.alpha0)
    return Interval(seg.xbar) + dl * Interval(seg.xdot), seg.r0


def rescale_tube(beta_seg: BranchSegment, beta: float | None = None, s: int | None = None):
    """Image of the beta-side tube at ``beta`` under y = beta z.

    Returns (alpha enclosure, Wright-layout centre box, tail radius).  L and
    alpha are unchanged; every Fourier coefficient is multiplied by beta.
    """
    s = beta_seg.s if s is None else s
    beta = float(beta_seg.alpha_end.lo) if beta is None else float(beta)
    if not (beta_seg.alpha0 <= beta <= float(beta_seg.alpha_end.hi)):
        raise CertificateError("beta outside the segment")
    centre, r = _segment_box(beta_seg, Interval(beta))
    n = len(centre)
    k = np.concatenate([[0, 0, 0], np.repeat(np.arange(1, (n - 1) // 2), 2)])
    w = Interval(np.where(k == 0, 1.0, k.astype(float) ** s))
    box = Interval((centre - Interval(r) / w).lo, (centre + Interval(r) / w).hi)
    b = Interval(beta)
    alpha = box[0]
    coeffs = box[2:] * b
    y = Interval.concatenate([box[1:2], coeffs])
    return alpha, y, (Interval(r) * b).hi


def rescale_connect(beta_end: BranchSegment, alpha_start: BranchSegment, beta: float | None = None) -> bool:
    """True iff the rescaled beta-side solution set lies in the alpha-side tube.

    The alpha enclosure of the beta-side endpoint must lie inside the
    parameter range of ``alpha_start`` (else CertificateError).  Only the
    direction  beta-side image  inside  alpha-side tube  is attempted: the
    image of a ball under y = beta z is a box that is not itself a ball of
    the weighted norm, so the reverse inclusion does not yield uniqueness.
    """
    if beta_end.extra != 1 or alpha_start.extra != 0:
        raise ValueError("expected a beta segment and an alpha segment")
    s = alpha_start.s
    if beta_end.s < s:
        # the beta-side tail |z_k| <= r / k^s' must dominate k^-s decay
        raise ValueError("the beta segment needs s at least that of the alpha segment")
    alpha, y, rtail = rescale_tube(beta_end, beta)
    a_lo, a_hi = float(alpha.lo), float(alpha.hi)
    if a_lo < alpha_start.alpha0 or a_hi > float(alpha_start.alpha_end.lo):
        raise CertificateError(
            f"alpha enclosure [{a_lo!r}, {a_hi!r}] not inside [{alpha_start.alpha0!r}, "
            f"{float(alpha_start.alpha_end.lo)!r}]"
        )
    centre, r = _segment_box(alpha_start, alpha)
    if not rtail <= r:
        return False
    m = max(len(y) // 2, len(centre) // 2)
    n = 2 * m
    k = np.concatenate([[0, 0], np.repeat(np.arange(1, m), 2)])
    w = Interval(np.where(k == 0, 1.0, k.astype(float) ** s))
    # beta-side modes beyond its support are the rescaled tail of a ball
    pad = Interval(rtail) / w
    ylo = np.where(np.arange(n) < len(y), pad_vector(y.lo, 0, m), -pad.hi)
    yhi = np.where(np.arange(n) < len(y), pad_vector(y.hi, 0, m), pad.hi)
    c = Interval.coerce(pad_vector(centre, 0, m))
    rw = Interval(r) / w
    olo = (Interval(c.hi) - Interval(rw.lo)).hi
    ohi = (Interval(c.lo) + Interval(rw.lo)).lo
    return bool(np.all(olo <= ylo) and np.all(yhi <= ohi))


def endpoint_ball(last: BranchSegment, prob=HOPF, s: int | None = None):
    """Small existence ball at the right end of ``last``, glued to its tube.

    Returns (segment with delta = 0 and radius r_minus, r_plus, glued).  The
    ball B(r_minus) localises the branch solution much more tightly than the
    tube radius, which is what the rescaling step needs.
    """
    s = last.s if s is None else s
    lam = float(last.alpha_end.lo)
    guess = last.xbar + (lam - last.alpha0) * last.xdot
    x = newton_correct(GalerkinPoint(guess, prob.extra), lam, prob=prob).as_array()
    xd = tangent_solve(x, lam, prob).as_array()
    pb = prepare_basepoint(x, xd, lam, s, prob)
    span = certified_span(pb)
    if span is None:
        raise CertificateError("no existence ball at the branch end")
    glued, _ = glue_check(last, x, span, lam, s)
    m = (len(x) - prob.extra) // 2
    return BranchSegment(lam, 0.0, span[0], m, s, x, xd, prob.extra), span[1], glued


def alpha_segment_for(ball: BranchSegment, s: int = 3, alpha_end: float | None = None) -> BranchSegment:
    """Certified alpha-side segment whose range covers the alpha enclosure of ``ball``.

    With ``alpha_end`` the segment is stretched to reach that parameter too.
    """
    alpha, y, _ = rescale_tube(ball)
    a_lo = float(np.nextafter(alpha.lo, -np.inf))
    top = float(alpha.hi) if alpha_end is None else max(float(alpha.hi), float(alpha_end))
    width = float((Interval(top) - Interval(a_lo)).hi)
    # small relative margin so that lo(a_lo + delta) still exceeds the top
    delta = width * (1.0 + 1e-6) + 4.0 * float(np.spacing(top))
    y0 = pad_vector(y.mid(), 0, len(y) // 2)
    x = newton_correct(GalerkinPoint(y0, 0), a_lo, prob=WRIGHT).as_array()
    xd = tangent_solve(x, a_lo, WRIGHT).as_array()
    ok, r = validate_step(x, xd, a_lo, delta, s, WRIGHT)
    if not ok:
        raise CertificateError(f"alpha-side step of width {delta:.3g} at {a_lo!r} not certified")
    return BranchSegment(a_lo, delta, r, len(x) // 2, s, x, xd, 0)


def connect_branches(beta_last: BranchSegment, alpha_seg: BranchSegment | None = None, s: int = 3):
    """Glue the end of a certified beta branch to an alpha-side segment.

    Without ``alpha_seg`` a matching alpha-side segment is certified at the
    rescaled endpoint (a self-consistent junction).  Returns
    (connected, ball, alpha_seg).
    """
    ball, _, glued = endpoint_ball(beta_last, HOPF)
    if alpha_seg is None:
        alpha_seg = alpha_segment_for(ball, s)
    ok = glued and rescale_connect(ball, alpha_seg)
    return ok, ball, alpha_seg


def connect_to_alpha_branch(beta_last: BranchSegment, alpha_first: BranchSegment):
    """Connect the beta branch to the first segment of a certified alpha branch.

    If the alpha enclosure of the beta-side endpoint falls inside the first
    alpha segment the rescaled ball is compared with it directly.  Otherwise
    (the endpoint lies slightly to the left) a bridging alpha segment is
    certified from that enclosure up to the start of the alpha branch and
    glued to it.  Returns (connected, description).
    """
    s = alpha_first.s
    ball, _, glued = endpoint_ball(beta_last, HOPF)
    if not glued:
        return False, "end ball not glued to the beta branch"
    alpha, _, _ = rescale_tube(ball)
    if float(alpha.lo) >= alpha_first.alpha0 and float(alpha.hi) <= float(alpha_first.alpha_end.lo):
        return rescale_connect(ball, alpha_first), "direct"
    if float(alpha.lo) > alpha_first.alpha0:
        return False, "beta-side endpoint beyond the first alpha segment"
    bridge = alpha_segment_for(ball, s, alpha_end=alpha_first.alpha0)
    if not rescale_connect(ball, bridge):
        return False, "rescaled ball not inside the bridge segment"
    pb = prepare_basepoint(alpha_first.xbar, alpha_first.xdot, alpha_first.alpha0, s, WRIGHT)
    span = certified_span(pb)
    if span is None:
        return False, "no existence ball at the alpha branch start"
    ok, mode = glue_check(bridge, alpha_first.xbar, span, alpha_first.alpha0, s)
    return ok, f"bridge of width {bridge.delta:.3g} glued ({mode})"
