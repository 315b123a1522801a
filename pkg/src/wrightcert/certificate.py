"""Line-delimited certificate files and their independent re-verification.

Each line is one JSON object.  Floats are stored as {"hex": ..., "dec": ...};
the hex form is normative and the decimal form is informational.  Records:

    header    format version, problem tag, s and run constants
    segment   alpha0, delta, r0, m, xbar, xdot
    junction  index, r_minus, r_plus, glued, mode
    end       status, message
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .continuation import (
    BranchCertificate,
    BranchSegment,
    Junction,
    glue_check,
    next_parameter,
    prepare_basepoint,
)
from .bounds import certify_radius
from .errors import CertificateError, NumericalError
from .wright_map import HOPF, WRIGHT

__all__ = [
    "FORMAT",
    "VERSION",
    "ParseError",
    "StaleVersionError",
    "CertificateWriter",
    "dumps_record",
    "read_certificate",
    "write_certificate",
    "verify_certificate",
    "VerifyReport",
]

FORMAT = "wrightcert"
VERSION = 1

PROBLEMS = {"wright_alpha": WRIGHT, "hopf_beta": HOPF}


class ParseError(ValueError):
    pass


class StaleVersionError(ValueError):
    pass


def _f(x: float) -> dict:
    x = float(x)
    return {"hex": x.hex(), "dec": repr(x)}


def _unf(d) -> float:
    try:
        return float.fromhex(d["hex"])
    except (TypeError, KeyError, ValueError) as exc:
        raise ParseError(f"bad float record {d!r}") from exc


def dumps_record(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def header_record(problem: str, s: int, constants: dict | None = None) -> dict:
    consts = {k: _f(v) for k, v in sorted((constants or {}).items())}
    return {"record": "header", "format": FORMAT, "version": VERSION, "problem": problem, "s": int(s),
            "constants": consts}


def segment_record(i: int, seg: BranchSegment) -> dict:
    return {
        "record": "segment",
        "index": i,
        "alpha0": _f(seg.alpha0),
        "delta": _f(seg.delta),
        "r0": _f(seg.r0),
        "m": int(seg.m),
        "s": int(seg.s),
        "xbar": [_f(v) for v in seg.xbar],
        "xdot": [_f(v) for v in seg.xdot],
    }


def junction_record(j: Junction) -> dict:
    return {"record": "junction", "index": j.index, "r_minus": _f(j.r_minus), "r_plus": _f(j.r_plus),
            "glued": bool(j.glued), "mode": j.mode}


def end_record(cert: BranchCertificate) -> dict:
    return {"record": "end", "status": cert.status, "message": cert.message,
            "segments": len(cert.segments)}


class CertificateWriter:
    """Append-per-segment writer; the file is opened (and checked) up front."""

    def __init__(self, path: str, problem: str, s: int, constants: dict | None = None):
        self.path = path
        d = os.path.dirname(os.path.abspath(path)) or "."
        if not os.path.isdir(d) or not os.access(d, os.W_OK):
            raise OSError(f"cannot write certificate to {path!r}")
        if os.path.exists(path) and not os.access(path, os.W_OK):
            raise OSError(f"cannot write certificate to {path!r}")
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._write(header_record(problem, s, constants))

    def _write(self, rec):
        self._fh.write(dumps_record(rec) + "\n")
        self._fh.flush()

    def on_segment(self, cert, seg, junction):
        if junction is not None:
            self._write(junction_record(junction))
        self._write(segment_record(len(cert.segments) - 1, seg))

    def close(self, cert: BranchCertificate):
        self._write(end_record(cert))
        self._fh.close()


def certificate_lines(cert: BranchCertificate, constants: dict | None = None) -> list:
    lines = [dumps_record(header_record(cert.problem, cert.s, constants))]
    js = {j.index: j for j in cert.junctions}
    for i, seg in enumerate(cert.segments):
        if i in js:
            lines.append(dumps_record(junction_record(js[i])))
        lines.append(dumps_record(segment_record(i, seg)))
    lines.append(dumps_record(end_record(cert)))
    return lines


def write_certificate(cert: BranchCertificate, path: str, constants: dict | None = None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(certificate_lines(cert, constants)) + "\n")


@dataclass
class ParsedCertificate:
    cert: BranchCertificate
    constants: dict = field(default_factory=dict)
    complete_file: bool = False


def read_certificate(path: str) -> ParsedCertificate:
    """Parse a certificate file.  Raises ParseError or StaleVersionError."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().split("\n") if ln.strip()]
    except UnicodeDecodeError as exc:
        raise ParseError("not a text file") from exc
    if not lines:
        raise ParseError("empty certificate file")
    try:
        recs = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed record: {exc}") from exc
    head = recs[0]
    if not isinstance(head, dict) or head.get("record") != "header" or head.get("format") != FORMAT:
        raise ParseError("missing header record")
    if head.get("version") != VERSION:
        raise StaleVersionError(f"format version {head.get('version')!r}, expected {VERSION}")
    problem = head.get("problem")
    if problem not in PROBLEMS:
        raise ParseError(f"unknown problem tag {problem!r}")
    extra = PROBLEMS[problem].extra
    try:
        s = int(head["s"])
        constants = {k: _unf(v) for k, v in head.get("constants", {}).items()}
        cert = BranchCertificate(problem, s)
        done = False
        for rec in recs[1:]:
            kind = rec.get("record")
            if kind == "segment":
                if int(rec["index"]) != len(cert.segments):
                    raise ParseError("segments out of order")
                seg = BranchSegment(
                    _unf(rec["alpha0"]), _unf(rec["delta"]), _unf(rec["r0"]), int(rec["m"]), int(rec["s"]),
                    np.array([_unf(v) for v in rec["xbar"]]), np.array([_unf(v) for v in rec["xdot"]]), extra,
                )
                if len(seg.xbar) != extra + 2 * seg.m or len(seg.xdot) != len(seg.xbar):
                    raise ParseError(f"segment {rec['index']}: bad vector length")
                cert.segments.append(seg)
            elif kind == "junction":
                cert.junctions.append(Junction(int(rec["index"]), _unf(rec["r_minus"]), _unf(rec["r_plus"]),
                                               bool(rec["glued"]), str(rec["mode"])))
            elif kind == "end":
                cert.status = str(rec["status"])
                cert.message = str(rec.get("message", ""))
                done = True
            else:
                raise ParseError(f"unknown record type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed record: {exc}") from exc
    if not done:
        cert.status = "partial"
        cert.message = "no end record (interrupted run)"
    return ParsedCertificate(cert, constants, done)


@dataclass
class VerifyReport:
    ok: bool
    failures: list = field(default_factory=list)
    segments: int = 0
    junctions: int = 0

    def summary(self) -> str:
        if self.ok:
            return f"verified {self.segments} segments and {self.junctions} junctions"
        return "; ".join(self.failures)


def verify_certificate(cert: BranchCertificate, threads: int = 1, stop_at_first: bool = False) -> VerifyReport:
    """Rebuild every bound from the stored data alone and re-run all checks.

    J_F is recomputed from xbar; p_k(r0, delta) < 0 is re-checked in
    interval arithmetic, and every junction is re-glued with its stored
    radii after checking p_k(r_minus, 0) < 0 and p_k(r_plus, 0) < 0.
    """
    prob = PROBLEMS[cert.problem]
    rep = VerifyReport(True)
    js = {j.index: j for j in cert.junctions}
    prev = None
    for i, seg in enumerate(cert.segments):
        tag = f"segment {i} (alpha0 = {seg.alpha0!r})"
        try:
            if seg.s != cert.s or seg.extra != prob.extra:
                raise CertificateError("inconsistent segment metadata")
            if not (seg.delta >= 0 and seg.r0 > 0):
                raise CertificateError("non-positive radius or negative step")
            pb = prepare_basepoint(seg.xbar, seg.xdot, seg.alpha0, seg.s, prob, threads)
            if not certify_radius(pb.polys, seg.r0, seg.delta):
                raise CertificateError("radii polynomials not negative at the stored r0")
            if prev is not None:
                if seg.alpha0 != next_parameter(prev.alpha0, prev.delta):
                    raise CertificateError("parameter gap to the previous segment")
                j = js.get(i)
                if j is None or not j.glued:
                    raise CertificateError("missing junction record")
                if not (0 < j.r_minus <= j.r_plus):
                    raise CertificateError("bad junction radii")
                if not (certify_radius(pb.polys, j.r_minus, 0.0) and certify_radius(pb.polys, j.r_plus, 0.0)):
                    raise CertificateError("junction radii not certified")
                glued, mode = glue_check(prev, seg.xbar, (j.r_minus, j.r_plus), seg.alpha0, seg.s)
                if not glued:
                    raise CertificateError("gluing inclusion fails")
                rep.junctions += 1
        except (CertificateError, NumericalError) as exc:
            rep.ok = False
            rep.failures.append(f"{tag}: {exc}")
            if stop_at_first:
                break
        rep.segments += 1
        prev = seg
    if not cert.segments:
        rep.ok = False
        rep.failures.append("certificate has no segments")
    return rep
