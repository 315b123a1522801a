"""Command line driver: continue, verify, export.

Exit codes: 0 success, 1 file system error, 2 usage error, 3 parse error,
4 stale format version, 5 failed re-certification, 6 honest partial
coverage, 7 domain error in export.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .certificate import (
    CertificateWriter,
    ParseError,
    StaleVersionError,
    read_certificate,
    verify_certificate,
)
from .continuation import StepSettings, run_branch
from .errors import DomainError
from .fourier import START_ALPHA_EPS, GalerkinPoint, eval_solution, start_seed
from .hopf import hopf_datum
from .interval import PI
from .wright_map import HOPF, WRIGHT

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_STALE = 4
EXIT_RECERT = 5
EXIT_PARTIAL = 6
EXIT_DOMAIN = 7

ALPHA_START = float((PI / 2.0 + START_ALPHA_EPS).lo)
N_SAMPLES = 4096

log = logging.getLogger("wrightcert")


@dataclass
class RunConfig:
    problem: str = "wright_alpha"
    alpha_start: float = ALPHA_START
    alpha_target: float = 1.7
    beta_target: float = 0.02
    m0: int = 6
    s: int = 3
    delta_min: float = 1e-15
    delta_max: float = 2.0
    delta_init: float = 5e-5
    newton_tol: float = 1e-13
    output_path: str = "certificate.jsonl"
    threads: int = 1

    def validate(self):
        if self.problem not in ("wright_alpha", "hopf_beta"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.problem == "wright_alpha" and not self.alpha_target >= self.alpha_start:
            raise ValueError("alpha_target below alpha_start")
        if self.problem == "hopf_beta" and not 0 <= self.beta_target:
            raise ValueError("beta_target must be non-negative")
        if self.m0 < 2 or self.s < 3:
            raise ValueError("need m0 >= 2 and s >= 3")
        if not (0 < self.delta_min <= self.delta_init <= self.delta_max):
            raise ValueError("need 0 < delta_min <= delta_init <= delta_max")
        if self.newton_tol <= 0 or self.threads < 1:
            raise ValueError("bad newton_tol or threads")


def cmd_continue(cfg: RunConfig) -> int:
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    settings = StepSettings(cfg.delta_init, cfg.delta_min, cfg.delta_max, cfg.newton_tol, threads=cfg.threads)
    consts = {"delta_init": cfg.delta_init, "delta_min": cfg.delta_min, "delta_max": cfg.delta_max,
              "newton_tol": cfg.newton_tol}
    if cfg.problem == "wright_alpha":
        prob, seed, lo, hi = WRIGHT, start_seed(), cfg.alpha_start, cfg.alpha_target
        if cfg.m0 > seed.m:
            seed = seed.padded(cfg.m0)
    else:
        prob, lo, hi = HOPF, 0.0, cfg.beta_target
        seed = GalerkinPoint(hopf_datum(cfg.m0), HOPF.extra)
    consts.update(start=lo, target=hi)
    try:
        writer = CertificateWriter(cfg.output_path, prob.tag, cfg.s, consts)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    t0 = time.time()
    cert = run_branch(seed, lo, hi, cfg.s, prob, settings, on_segment=writer.on_segment)
    writer.close(cert)
    segs = cert.segments
    dmin = min((sg.delta for sg in segs), default=math.nan)
    print(f"{cert.status}: {len(segs)} segments, range {cert.alpha_range}, "
          f"min step {dmin:.3g}, {time.time() - t0:.1f} s")
    if cert.message:
        print(cert.message)
    return EXIT_OK if cert.status == "complete" else EXIT_PARTIAL


def cmd_verify(path: str, threads: int = 1) -> int:
    try:
        parsed = read_certificate(path)
    except StaleVersionError as exc:
        print(f"stale certificate: {exc}", file=sys.stderr)
        return EXIT_STALE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    rep = verify_certificate(parsed.cert, threads)
    if not rep.ok:
        print(f"FAILED: {rep.summary()}")
        return EXIT_RECERT
    print(rep.summary() + f", range {parsed.cert.alpha_range}")
    if parsed.cert.status != "complete":
        print(f"partial coverage: {parsed.cert.message}")
        return EXIT_PARTIAL
    return EXIT_OK


def _point_at(seg, lam):
    return seg.xbar + (lam - seg.alpha0) * seg.xdot


def _amplitude(y, L):
    t = np.linspace(0.0, 2.0 * np.pi / L, N_SAMPLES, endpoint=False)
    return float(np.max(np.abs(eval_solution(y, t, 0))))


def _y_of(seg, lam):
    v = _point_at(seg, lam)
    if seg.extra == 0:
        return lam, v
    # y = beta z: scale the Fourier coefficients, keep L
    return v[0], np.concatenate([v[1:2], v[2:] * lam])


def branch_rows(cert):
    rows = []
    n = len(cert.segments)
    for i, seg in enumerate(cert.segments):
        pts = [seg.alpha0, seg.alpha0 + 0.5 * seg.delta]
        if i == n - 1:
            pts.append(seg.alpha0 + seg.delta)
        for lam in pts:
            alpha, y = _y_of(seg, lam)
            L = y[0]
            row = {"alpha": alpha, "L": L, "period": 2.0 * np.pi / L, "amplitude": _amplitude(y, L), "r0": seg.r0}
            if seg.extra:
                row = {"beta": lam, **row}
            rows.append(row)
    return rows


def solution_rows(cert, lam):
    for seg in cert.segments:
        if seg.alpha0 <= lam <= seg.alpha0 + seg.delta:
            _, y = _y_of(seg, lam)
            L = y[0]
            t = np.linspace(0.0, 2.0 * np.pi / L, N_SAMPLES, endpoint=False)
            return [{"t": ti, "y": yi} for ti, yi in zip(t, eval_solution(y, t, 0))]
    raise DomainError(f"parameter {lam!r} outside the certified range")


def cmd_export(path: str, fmt: str, out, param: float | None = None) -> int:
    try:
        parsed = read_certificate(path)
    except StaleVersionError as exc:
        print(f"stale certificate: {exc}", file=sys.stderr)
        return EXIT_STALE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if fmt == "branch_csv":
            rows = branch_rows(parsed.cert)
        elif fmt == "solution_csv":
            if param is None:
                print("usage error: solution_csv needs --param", file=sys.stderr)
                return EXIT_USAGE
            rows = solution_rows(parsed.cert, param)
        else:
            print(f"usage error: unknown format {fmt!r}", file=sys.stderr)
            return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if not rows:
        return EXIT_OK
    w = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(v)) for k, v in r.items()})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wrightcert", description="Validated continuation for Wright's equation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)
    d = RunConfig()
    c = sub.add_parser("continue", help="run a validated continuation and write a certificate")
    c.add_argument("--problem", choices=["wright_alpha", "hopf_beta"], default=d.problem)
    c.add_argument("--alpha-start", type=float, default=d.alpha_start)
    c.add_argument("--alpha-target", type=float, default=d.alpha_target)
    c.add_argument("--beta-target", type=float, default=d.beta_target)
    c.add_argument("--m0", type=int, default=d.m0)
    c.add_argument("--s", type=int, default=d.s)
    c.add_argument("--delta-min", type=float, default=d.delta_min)
    c.add_argument("--delta-max", type=float, default=d.delta_max)
    c.add_argument("--delta-init", type=float, default=d.delta_init)
    c.add_argument("--newton-tol", type=float, default=d.newton_tol)
    c.add_argument("-o", "--output", dest="output_path", default=d.output_path)
    c.add_argument("--threads", type=int, default=d.threads)
    v = sub.add_parser("verify", help="re-check every segment and junction of a certificate")
    v.add_argument("certificate")
    v.add_argument("--threads", type=int, default=1)
    e = sub.add_parser("export", help="write branch or solution data as CSV")
    e.add_argument("certificate")
    e.add_argument("--format", choices=["branch_csv", "solution_csv"], default="branch_csv")
    e.add_argument("--param", type=float, default=None, help="parameter value for solution_csv")
    e.add_argument("-o", "--output", default="-")
    return p


def main(argv=None) -> int:
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.verb == "continue":
        fields = set(asdict(RunConfig()))
        cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in fields})
        return cmd_continue(cfg)
    if args.verb == "verify":
        return cmd_verify(args.certificate, args.threads)
    if args.output == "-":
        return cmd_export(args.certificate, args.format, sys.stdout, args.param)
    try:
        with open(args.output, "w", newline="") as fh:
            return cmd_export(args.certificate, args.format, fh, args.param)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
