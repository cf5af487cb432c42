"""Batch front end: `cmk k0 | dynkin | k1 | semilocal | verify`.

Exit status: 0 all checks pass, 1 a requested check failed, 2 bad input
(parse error, bad flags, size bound), 3 hypothesis failure (non-injective
AR matrix), 4 internal-consistency error.
"""
from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from . import arquiver, checks, intlinalg, k1, semilocal
from .rings import Field

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_HYPOTHESIS, EXIT_INTERNAL = 0, 1, 2, 3, 4


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{col}: {msg}")
        self.line, self.col = line, col


@dataclass
class JobSpec:
    command: str
    path: str | None = None
    field: str | None = None
    precision: int = 8
    seed: int = 0
    samples: int = 100
    fmt: str = "text"
    family: str | None = None
    ring: str | None = None
    dynkin: str | None = None

    def __post_init__(self):
        if self.precision < 2:
            raise ValueError("--precision must be at least 2")
        if self.samples < 1:
            raise ValueError("--samples must be positive")


# ---------------------------------------------------------------------------
# Input files

_KV = re.compile(r"(\w+)=(\S+)")


def _lines(text: str):
    """(line number, column offset, content) with comments and blanks dropped."""
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            yield no, len(body) - len(body.lstrip()) + 1, body.strip()


def _fields(body: str, no: int, start: int, keys: set[str], source: str) -> dict[str, tuple[str, int]]:
    head, _, rest = body.partition(" ")
    out = {}
    pos = len(head) + 1
    for tok in rest.split():
        col = start + body.index(tok, pos)
        pos = body.index(tok, pos) + len(tok)
        m = _KV.fullmatch(tok)
        if not m:
            raise ParseError(f"expected key=value, got {tok!r}", no, col, source)
        if m.group(1) not in keys:
            raise ParseError(f"unknown key {m.group(1)!r}", no, col, source)
        if m.group(1) in out:
            raise ParseError(f"duplicate key {m.group(1)!r}", no, col, source)
        out[m.group(1)] = (m.group(2), col + len(m.group(1)) + 1)
    missing = keys - set(out)
    if missing:
        raise ParseError(f"missing {', '.join(sorted(missing))}", no, start, source)
    return out


def _int(val: str, no: int, col: int, source: str) -> int:
    try:
        return int(val)
    except ValueError:
        raise ParseError(f"expected an integer, got {val!r}", no, col, source) from None


def parse_presentation(text: str, source: str = "<input>") -> arquiver.ARPresentation:
    """`modules: t+1` followed by `seq end=<j> tau=<i> middle=<n0,...,nt>` lines."""
    n_modules = None
    seqs = []
    last = (1, 1)
    for no, col, body in _lines(text):
        last = (no, col)
        if body.startswith("modules:"):
            if n_modules is not None:
                raise ParseError("repeated modules line", no, col, source)
            val = body[len("modules:"):]
            n_modules = _int(val.strip(), no, col + len("modules:") + len(val) - len(val.lstrip()), source)
            if n_modules < 2:
                raise ParseError("need at least one non-free module", no, col, source)
        elif body.split(" ", 1)[0] == "seq":
            if n_modules is None:
                raise ParseError("seq before modules line", no, col, source)
            kv = _fields(body, no, col, {"end", "tau", "middle"}, source)
            end = _int(kv["end"][0], no, kv["end"][1], source)
            tau = _int(kv["tau"][0], no, kv["tau"][1], source)
            mval, mcol = kv["middle"]
            middle = []
            for part in mval.split(","):
                middle.append(_int(part, no, mcol, source))
                mcol += len(part) + 1
            if len(middle) != n_modules:
                raise ParseError(f"middle has {len(middle)} entries, expected {n_modules}", no, kv["middle"][1], source)
            try:
                seqs.append(arquiver.ARSequence(end, tau, tuple(middle)))
            except arquiver.MalformedPresentation as exc:
                raise ParseError(str(exc), no, col, source) from None
        else:
            raise ParseError(f"unknown directive {body.split()[0]!r}", no, col, source)
    if n_modules is None:
        raise ParseError("missing modules line", *last, source)
    try:
        return arquiver.ARPresentation(tuple(sorted(seqs, key=lambda s: s.end)))
    except arquiver.MalformedPresentation as exc:
        raise ParseError(str(exc), *last, source) from None


def parse_ring(text: str, source: str = "<input>") -> semilocal.FiniteRing:
    """`ring kind=matrix n=<n> p=<p>` plus optional `factor` lines of the same shape."""
    factors = []
    seen_ring = False
    for no, col, body in _lines(text):
        head = body.split(" ", 1)[0]
        if head not in ("ring", "factor"):
            raise ParseError(f"unknown directive {head!r}", no, col, source)
        if head == "ring":
            if seen_ring:
                raise ParseError("repeated ring line", no, col, source)
            seen_ring = True
        elif not seen_ring:
            raise ParseError("factor before ring line", no, col, source)
        kv = _fields(body, no, col, {"kind", "n", "p"}, source)
        if kv["kind"][0] != "matrix":
            raise ParseError(f"unsupported kind {kv['kind'][0]!r}", no, kv["kind"][1], source)
        n = _int(kv["n"][0], no, kv["n"][1], source)
        p = _int(kv["p"][0], no, kv["p"][1], source)
        try:
            factors.append(semilocal.MatrixFactor(n, p))
        except ValueError as exc:
            raise ParseError(str(exc), no, col, source) from None
    if not seen_ring:
        raise ParseError("missing ring line", 1, 1, source)
    try:
        return semilocal.FiniteRing(tuple(factors))
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1, source) from None


# ---------------------------------------------------------------------------
# Reports


class Report:
    """Collects (key, value) pairs; renders as text or flat key = value lines."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.items: list[tuple[str, object]] = []
        self.text: list[str] = []

    def add(self, key: str, value, text: str | None = None):
        self.items.append((key, value))
        if text is not None:
            self.text.append(text)

    def line(self, text: str):
        self.text.append(text)

    def render(self) -> str:
        if self.fmt == "text":
            return "\n".join(self.text) + "\n"
        out = []
        for key, value in self.items:
            if isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            out.append(f"{key} = {value}".rstrip())
        return "\n".join(out) + "\n"


def _yes(b: bool) -> str:
    return "true" if b else "false"


def _upsilon_report(rep: Report, ups: intlinalg.IntegerMatrix):
    rep.add("upsilon.shape", f"{ups.rows}x{ups.cols}", f"upsilon ({ups.rows}x{ups.cols}):")
    for i, row in enumerate(ups.entries):
        rep.add(f"upsilon.row{i}", list(row))
    rep.text.extend(ups.format(2).splitlines())
    inj = intlinalg.is_injective(ups)
    rep.add("injective", inj, f"injective: {_yes(inj)}")
    return inj


def run_k0(job: JobSpec, rep: Report) -> int:
    pres = parse_presentation(Path(job.path).read_text(encoding="utf-8"), job.path)
    ups = arquiver.build_upsilon(pres)
    inj = _upsilon_report(rep, ups)
    factors = intlinalg.invariant_factors(ups)
    group = intlinalg.cokernel(ups)
    rep.add("invariant_factors", factors, "invariant factors: " + (", ".join(map(str, factors)) or "none"))
    rep.add("k0.free_rank", group.free_rank)
    rep.add("k0.torsion", list(group.torsion))
    rep.add("k0", str(group), f"K0 = Coker(upsilon) = {group}")
    return EXIT_OK if inj else EXIT_HYPOTHESIS


def run_dynkin(job: JobSpec, rep: Report) -> int:
    kind, n = arquiver.parse_dynkin(job.dynkin)
    ups = arquiver.dynkin_upsilon(kind, n)
    rep.add("type", f"{kind}{n}", f"type: {kind}{n}")
    inj = _upsilon_report(rep, ups)
    cartan = arquiver.cartan_matrix(kind, n)
    rep.add("cartan_determinant", cartan.determinant(), f"Cartan determinant: {cartan.determinant()}")
    rep.add("k0", str(intlinalg.cokernel(ups)), f"K0 = Coker(upsilon) = {intlinalg.cokernel(ups)}")
    return EXIT_OK if inj else EXIT_HYPOTHESIS


def run_k1(job: JobSpec, rep: Report) -> int:
    if job.family is None:
        raise ValueError("k1 needs --family dual|cusp")
    field = Field.parse(job.field if job.field is not None else "5")
    system = k1.family_system(job.family, field, job.precision)
    r = k1.k1_compute(system, job.samples, job.seed)
    rep.add("family", r.family, f"family: {r.family}")
    rep.add("field", r.field, f"field: {r.field}")
    rep.add("precision", r.precision, f"precision: {r.precision}")
    rep.add("samples", job.samples, f"samples: {job.samples}")
    rep.add("group", r.group, f"K1(mod R) = {r.group}")
    rep.add("upsilon", r.upsilon, "upsilon: (" + ", ".join(map(str, r.upsilon)) + ")^T")
    rep.add("injective", r.injective, f"injective: {_yes(r.injective)}")
    rep.add("xi.sampling", r.generator_sampling,
            f"omega(Xi) over {len(r.omega_of_xi)} generators ({r.generator_sampling}):")
    for h, w in r.omega_of_xi:
        rep.line(f"  {h} ↦ {w}")
    rep.add("xi.generators", [h for h, _ in r.omega_of_xi])
    rep.add("xi.omega", [w.replace(", ", ";") for _, w in r.omega_of_xi])
    rep.add("lambda.sampling", r.unit_sampling,
            f"lambda table, r ↦ mu(r), over {len(r.lambda_table)} units ({r.unit_sampling}):")
    for u, v in r.lambda_table:
        rep.line(f"  {u} ↦ {v}")
    rep.add("lambda.units", [u for u, _ in r.lambda_table])
    rep.add("lambda.values", [v for _, v in r.lambda_table])
    if r.mu_image is not None:
        rep.add("mu.image", r.mu_image, "mu image: {" + ", ".join(r.mu_image) + "}")
        rep.add("mu.index", r.mu_image_index, f"index in k*: {r.mu_image_index}")
    for f in r.failures:
        rep.line(f"FAIL {f}")
    rep.add("failures", len(r.failures))
    rep.add("status", "ok" if r.ok else "failed", f"status: {'ok' if r.ok else 'failed'}")
    if not r.injective:
        return EXIT_HYPOTHESIS
    return EXIT_OK if r.ok else EXIT_FAILED


def run_semilocal(job: JobSpec, rep: Report) -> int:
    if job.ring:
        a = semilocal.parse_ring_name(job.ring)
    elif job.path:
        a = parse_ring(Path(job.path).read_text(encoding="utf-8"), job.path)
    else:
        raise ValueError("semilocal needs --ring NAME or a ring file")
    if not a.check_axioms(seed=job.seed):
        raise semilocal.InternalConsistencyError(f"{a.name} fails the ring axioms")
    res = semilocal.vaserstein_check(a)
    rep.add("ring", res.ring, f"ring: {res.ring}")
    rep.add("ring.size", a.size, f"|A| = {a.size}")
    rep.add("units", res.units, f"|A*| = {res.units}")
    rep.add("ker_theta", res.ker_theta)
    rep.add("commutators", res.commutators)
    rep.add("verdict", res.verdict, res.summary())
    return EXIT_OK


def run_verify(job: JobSpec, rep: Report) -> int:
    results = checks.run_all(job.seed)
    for name, ok, detail in results:
        rep.add(name, "pass" if ok else "fail", f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    n_fail = sum(not ok for _, ok, _ in results)
    rep.add("failed", n_fail, f"{len(results) - n_fail}/{len(results)} properties pass")
    return EXIT_OK if n_fail == 0 else EXIT_FAILED


RUNNERS = {"k0": run_k0, "dynkin": run_dynkin, "k1": run_k1, "semilocal": run_semilocal, "verify": run_verify}


def run(job: JobSpec) -> tuple[int, str]:
    """Execute one job; returns (exit status, report). Domain errors raise."""
    rep = Report(job.fmt)
    rep.add("command", job.command, f"command: {job.command}")
    rep.add("seed", job.seed, f"seed: {job.seed}")
    status = RUNNERS[job.command](job, rep)
    return status, rep.render()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="odd prime p, 'F<p>' or 'Q'")
    common.add_argument("--p", dest="field", help="alias for --field")
    common.add_argument("--precision", type=int, default=8, help="truncation order N (default 8)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--format", dest="fmt", choices=("text", "structured"), default="text")

    ap = argparse.ArgumentParser(prog="cmk", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("k0", parents=[common], help="Upsilon and K0 of an AR presentation file")
    p.add_argument("path")
    p = sub.add_parser("dynkin", parents=[common], help="Upsilon for an ADE type, e.g. E6")
    p.add_argument("dynkin")
    p = sub.add_parser("k1", parents=[common], help="K1 report for the dual numbers or the cusp")
    p.add_argument("--family", choices=("dual", "cusp"), required=True)
    p = sub.add_parser("semilocal", parents=[common], help="commutators vs Ker theta for a finite ring")
    p.add_argument("path", nargs="?")
    p.add_argument("--ring", help="e.g. M2F2, F5, F2xF2")
    sub.add_parser("verify", parents=[common], help="run every property check")
    return ap


def main(argv: list[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    args = build_parser().parse_args(argv)
    try:
        job = JobSpec(**vars(args))
        status, text = run(job)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (k1.InternalConsistencyError, semilocal.InternalConsistencyError) as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
