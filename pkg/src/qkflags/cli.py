"""Batch front end: ``qkflags <subcommand> --spec job.json``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 tolerance
violation.  Reports are canonical JSON (sorted keys, floats with 17
significant digits, complex numbers as [re, im]) so that the same job and
seed always produce byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import jsonschema
import numpy as np

from . import __version__, bethe, qq, selftest, toda, trs, vertex
from .core import ParameterFrame, QKError, QuiverSpec

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 2, 3, 4
SCHEMA_VERSION = 1
CUTOFF_MAX = 12
DEFAULT_TOL = 1e-8
DEFAULT_CUTOFF = 4
DEFAULT_LADDER = (1e2, 1e3, 1e4)
LIMIT_EXACT_TOL = 1e-10

SUBCOMMANDS = ("solve", "vertex", "verify-trs", "verify-dual", "verify-qq", "toda", "limit-check", "self-test")
NUMERIC_ERRORS = (QKError, ZeroDivisionError, np.linalg.LinAlgError, FloatingPointError)


class ValidationError(Exception):
    pass


# ---------------------------------------------------------------------------
# canonical output


def _canon(x):
    """Plain JSON-ready structure; complex -> [re, im]."""
    if isinstance(x, dict):
        return {str(k): _canon(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_canon(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_canon(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = format(v, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _emit(x, out):
    if isinstance(x, dict):
        out.append("{")
        for k, key in enumerate(sorted(x)):
            if k:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _emit(x[key], out)
        out.append("}")
    elif isinstance(x, list):
        out.append("[")
        for k, v in enumerate(x):
            if k:
                out.append(",")
            _emit(v, out)
        out.append("]")
    elif isinstance(x, bool) or x is None:
        out.append(json.dumps(x))
    elif isinstance(x, float):
        out.append(_fmt_float(x))
    elif isinstance(x, int):
        out.append(str(x))
    else:
        out.append(json.dumps(x))


def canonical_json(obj) -> str:
    out: list = []
    _emit(_canon(obj), out)
    return "".join(out) + "\n"


def _csv_cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0])
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(_canon(r[c])) for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# job intake


def load_schema() -> dict:
    path = resources.files("qkflags").joinpath(f"schema/jobspec-v{SCHEMA_VERSION}.json")
    return json.loads(path.read_text())


def _c(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _clist(xs) -> np.ndarray:
    return np.array([_c(x) for x in xs], dtype=complex)


class Job:
    """Validated job: quiver, frame and options."""

    def __init__(self, raw: dict, args):
        try:
            jsonschema.validate(raw, load_schema())
        except jsonschema.ValidationError as e:
            path = "/".join(str(p) for p in e.absolute_path) or "<root>"
            raise ValidationError(f"job spec invalid at {path}: {e.message}") from None
        self.raw = raw
        q = raw["quiver"]
        dims = q["dims"]
        try:
            self.spec = QuiverSpec(len(dims) + 1, tuple(dims), q["framing"])
        except ValueError as e:
            raise ValidationError(str(e)) from None
        p = raw["parameters"]
        self.params = p
        opts = raw.get("options", {})
        self.options = opts
        a = _clist(p["a"])
        if len(a) != self.spec.framing:
            raise ValidationError(f"expected {self.spec.framing} equivariant parameters, got {len(a)}")
        for key in ("z", "zsharp"):
            if key in p and len(p[key]) != self.spec.n - 1:
                raise ValidationError(f"parameters.{key} needs {self.spec.n - 1} entries")
        self.a = a
        try:
            self.q_sqrt = np.sqrt(_c(p["q"]))
            self.h = np.sqrt(_c(p["hbar"]))
            ParameterFrame(self.q_sqrt, self.h, a)
        except ValueError as e:
            raise ValidationError(str(e)) from None

        self.tol = args.tol if args.tol is not None else opts.get("tol", DEFAULT_TOL)
        if not self.tol > 0:
            raise ValidationError("tolerance must be positive")
        self.cutoff = args.cutoff if args.cutoff is not None else opts.get("cutoff", DEFAULT_CUTOFF)
        if not 0 <= self.cutoff <= CUTOFF_MAX:
            raise ValidationError(f"cutoff must lie in 0..{CUTOFF_MAX}")
        self.fmt = args.format or raw.get("format", "json")

    def need(self, *keys):
        missing = [k for k in keys if k not in self.params]
        if missing:
            raise ValidationError("missing required parameter(s): " + ", ".join(missing))

    def frame(self) -> ParameterFrame:
        self.need("z")
        return ParameterFrame(self.q_sqrt, self.h, self.a, _clist(self.params["z"]))

    def compact_frame(self) -> ParameterFrame:
        if "zsharp" in self.params:
            return ParameterFrame.from_zsharp(self.spec, self.q_sqrt, self.h, self.a, _clist(self.params["zsharp"]))
        if "z" in self.params:
            return self.frame()
        raise ValidationError("missing required parameter(s): zsharp (or z)")

    def require_complete(self, what):
        if not self.spec.is_complete_flag:
            raise ValidationError(f"{what} needs a complete flag (dims 1..n-1, framing n)")

    def echo(self) -> dict:
        return {"job": self.raw, "tol": self.tol, "cutoff": self.cutoff, "schema_version": SCHEMA_VERSION}


def read_job(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ValidationError("job spec must be a JSON object")
    return raw


# ---------------------------------------------------------------------------
# subcommands; each returns (report, csv_rows, ok)


def _pmap(fn, items, threads):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _solution_json(k, sol: bethe.BetheSolution) -> dict:
    return {
        "index": k,
        "origin": sol.origin.label() if sol.origin else None,
        "roots": [list(r) for r in sol.roots],
        "residual": sol.residual_norm,
        "residual_abs": sol.residual_abs,
        "steps": sol.steps,
    }


def _solve(job: Job, compact=False):
    if compact:
        problem = bethe.BetheProblem(job.spec, job.compact_frame(), "compact")
    else:
        problem = bethe.BetheProblem(job.spec, job.frame(), job.options.get("convention", "raw"))
    return bethe.solve_all(problem)


def cmd_solve(job: Job, args):
    compact = job.options.get("convention") == "compact"
    sols = _solve(job, compact)
    items = [_solution_json(k, s) for k, s in enumerate(sols)]
    rows = []
    for it in items:
        for lvl, r in enumerate(it["roots"], start=1):
            for j, x in enumerate(r):
                rows.append(
                    {"solution": it["index"], "origin": it["origin"], "level": lvl, "index": j + 1,
                     "re": float(np.real(x)), "im": float(np.imag(x)), "residual": it["residual"]}
                )
    res = max((s.residual_norm for s in sols), default=0.0)
    return {"solutions": items, "count": len(sols), "max_residual": res}, rows, True


def _insertion(spec: QuiverSpec, opt) -> vertex.Insertion:
    if not opt or opt["kind"] == "one":
        return vertex.Insertion.one()
    if opt["kind"] == "exterior":
        if "level" not in opt or "k" not in opt:
            raise ValidationError("exterior insertion needs level and k")
        if opt["level"] > spec.n - 1:
            raise ValidationError("insertion level out of range")
        return vertex.Insertion.exterior(opt["level"], opt["k"])
    terms = {}
    for t in opt.get("terms", []):
        ex = t["exponents"]
        if len(ex) != spec.n - 1 or any(len(e) != v for e, v in zip(ex, spec.dims)):
            raise ValidationError("monomial exponents must match the dimension vector")
        terms[tuple(tuple(e) for e in ex)] = _c(t["coefficient"])
    tau = vertex.Insertion.from_monomials(terms)
    if not vertex.check_symmetric(tau, spec):
        raise ValidationError("insertion is not symmetric within levels")
    return tau


def cmd_vertex(job: Job, args):
    spec = job.spec
    tau = _insertion(spec, job.options.get("insertion"))
    compact = job.options.get("compact", False)
    z = _clist(job.params["z"]) if "z" in job.params else None
    frame = ParameterFrame(job.q_sqrt, job.h, job.a, z if z is not None else ())
    points = vertex.enumerate_fixed_points(spec)
    if "point" in job.options:
        points = [p for p in points if p.label() == job.options["point"]]
        if not points:
            raise ValidationError(f"no fixed point labelled {job.options['point']!r}")
    near = job.options.get("q_near_one")

    def one(p):
        fn = vertex.compact_vertex_series if compact else vertex.vertex_series
        ser = fn(p, tau, frame, job.cutoff)
        coeffs = [{"degree": list(d), "value": ser.coeffs[d]} for d in sorted(ser.coeffs)]
        out = {"point": p.label(), "variable": ser.variable, "coefficients": coeffs}
        if z is not None:
            zv = frame.zsharp(spec) if compact else z
            out["value_at_z"] = ser(zv)
        if near is not None:
            fq = frame.replace(q_sqrt=np.sqrt(near.get("q", 1 - 1e-3)))
            ze = _clist(near["z"]) if "z" in near else z
            if ze is None:
                raise ValidationError("q_near_one needs z")
            out["eigenvalue_ratio"] = vertex.eigenvalue_ratio(p, tau, fq, job.cutoff, ze)
        return out

    items = _pmap(one, points, args.threads)
    rows = [
        {"point": it["point"], "degree": " ".join(map(str, c["degree"])),
         "re": float(np.real(c["value"])), "im": float(np.imag(c["value"]))}
        for it in items for c in it["coefficients"]
    ]
    return {"insertion": tau.name, "compact": compact, "points": items}, rows, True


def _verify(job: Job, args, check, compact=False, metric=lambda rep: rep.max_residual):
    sols = _solve(job, compact)
    reports = _pmap(check, sols, args.threads)
    items, rows = [], []
    for k, (s, rep) in enumerate(zip(sols, reports)):
        m = float(metric(rep))
        d = rep.to_json()
        d.update({"index": k, "origin": s.origin.label(), "max_residual": m, "bethe_residual": s.residual_norm})
        items.append(d)
        rows.append({"solution": k, "origin": s.origin.label(), "max_residual": m, "tol": job.tol})
    worst = max((it["max_residual"] for it in items), default=0.0)
    ok = worst <= job.tol
    return {"solutions": items, "tol": job.tol, "max_residual": worst, "passed": ok}, rows, ok


def cmd_verify_trs(job, args):
    job.require_complete("verify-trs")
    return _verify(job, args, trs.verify_spectrum)


def cmd_verify_dual(job, args):
    job.require_complete("verify-dual")
    return _verify(job, args, trs.verify_dual, metric=lambda r: r.trace_residual)


def cmd_verify_qq(job, args):
    job.require_complete("verify-qq")
    return _verify(job, args, qq.verify_qq)


def cmd_toda(job, args):
    job.require_complete("toda")
    return _verify(job, args, toda.verify_toda, compact=True)


def cmd_limit_check(job, args):
    ladder = tuple(job.options.get("hbar_ladder", DEFAULT_LADDER))
    if "toda" in job.params:
        t = job.params["toda"]
        if not len(t["tz"]) == len(t["tp"]) == job.spec.n:
            raise ValidationError(f"toda.tz and toda.tp need {job.spec.n} entries")
        points = [("input", toda.TodaPoint(_clist(t["tz"]), _clist(t["tp"])))]
    else:
        job.require_complete("limit-check")
        points = [(s.origin.label(), toda.toda_point(s)) for s in _solve(job, compact=True)]
    reports = _pmap(lambda lp: toda.limit_check(lp[1], ladder), points, args.threads)
    n = job.spec.n
    items, rows, ok = [], [], True
    for (label, _), rep in zip(points, reports):
        exact = max(rep.differences[n])
        passed = rep.all_decreasing and exact < LIMIT_EXACT_TOL
        ok &= passed
        d = rep.to_json()
        d.update({"point": label, "passed": passed, "top_difference": exact})
        items.append(d)
        for r, vals in rep.differences.items():
            for hb, v in zip(ladder, vals):
                rows.append({"point": label, "r": r, "hbar": float(hb), "difference": v})
    worst = max((it["top_difference"] for it in items), default=0.0)
    return {"points": items, "tol": LIMIT_EXACT_TOL, "max_residual": worst, "passed": ok}, rows, ok


def cmd_self_test(args):
    results = selftest.run_all(args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    items = []
    for r in results:
        d = r.to_json()
        d.pop("seconds")  # keep the report deterministic
        items.append(d)
    rows = [{"name": r.name, "passed": r.passed, "value": r.value, "tol": r.tol} for r in results]
    report = {"command": "self-test", "seed": args.seed, "checks": items, "passed": ok, "version": __version__}
    return report, rows, ok


COMMANDS = {
    "solve": cmd_solve,
    "vertex": cmd_vertex,
    "verify-trs": cmd_verify_trs,
    "verify-dual": cmd_verify_dual,
    "verify-qq": cmd_verify_qq,
    "toda": cmd_toda,
    "limit-check": cmd_limit_check,
}


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qkflags", description="Quasimap vertices, XXZ Bethe equations and their integrable duals.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--spec", help="job specification (JSON)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--tol", type=float, help="override the job tolerance")
    p.add_argument("--cutoff", type=int, help="override the series cutoff")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _write(text: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.threads < 1:
        print("qkflags: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.command == "self-test":
            report, rows, ok = cmd_self_test(args)
            fmt = args.format or "json"
        else:
            if not args.spec:
                raise ValidationError(f"{args.command} needs --spec")
            job = Job(read_job(args.spec), args)
            body, rows, ok = COMMANDS[args.command](job, args)
            report = {"command": args.command, "inputs": job.echo(), "results": body, "version": __version__}
            fmt = job.fmt
    except ValidationError as e:
        print(f"qkflags: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NUMERIC_ERRORS as e:
        print(f"qkflags: numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    _write(canonical_json(report) if fmt == "json" else to_csv(rows), args.out)
    if not ok:
        print("qkflags: tolerance violated", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def main():  # console script
    sys.exit(run())
