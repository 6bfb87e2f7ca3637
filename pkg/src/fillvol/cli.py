"""Command-line front end.

Every subcommand is turned into a job dictionary, the same shape a job
document has, and run through :func:`run_job`. Reports are written to the
output directory; a content-hash cache under ``<out>/cache`` lets a repeated
job skip all solver work.

Exit codes: 0 success, 2 validation, 3 resource limit, 4 internal
inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__, builtins
from .complexes import instantiate_map, instantiate_window
from .config import Caps, load_caps
from .documents import (
    expand_refs,
    load_document,
    resolve_complex,
    resolve_map,
    resolve_presentation,
    validate_job,
)
from .errors import FillvolError, ResourceLimitError, ValidationError
from .filling import escalate_until_stable
from .functions import (
    check_norm_equivalence,
    default_radius,
    dehn_consistency,
    fv_table,
    operator_bound,
    subgroup_inequality_check,
    witness_id,
)
from .groups import verify_confluence

OUT_ENV = "FILLVOL_OUT"
DEFAULT_OUT = "fillvol-out"


@dataclass
class Report:
    task: str
    body: dict
    columns: list
    rows: list = field(default_factory=list)

    def csv_body(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()

    def to_cache(self):
        return {"task": self.task, "body": self.body, "columns": self.columns,
                "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_cache(cls, d):
        return cls(d["task"], d["body"], d["columns"], [tuple(r) for r in d["rows"]])


# -- tasks -------------------------------------------------------------------------


def _radius(job, caps: Caps, key="radius", default=3):
    r = job.get(key, default)
    if r < 0 or r > caps.max_radius:
        raise ValidationError(f"{key} {r} outside 0..{caps.max_radius}", field=key)
    return r


def _window(spec, r, caps: Caps):
    return instantiate_window(spec, r, ball_cap=caps.max_ball)


def _samples(job, caps, default):
    s = job.get("samples", default)
    if not 1 <= s <= caps.max_samples:
        raise ValidationError(f"samples must be in 1..{caps.max_samples}", field="samples")
    return s


def _require(job, key):
    if key not in job:
        raise ValidationError(f"task {job['task']!r} needs {key!r}", field=key)
    return job[key]


def task_fill(job, caps):
    spec = resolve_complex(_require(job, "complex"))
    n = job.get("dim", 1)
    target = _require(job, "target")
    r0 = _radius(job, caps)
    r_max = _radius(job, caps, "max_radius", r0)
    windows = {r: _window(spec, r, caps) for r in range(r0, r_max + 1)}
    certs = escalate_until_stable(spec, target, n, r0, r_max, caps.max_nodes, windows)
    final = certs[-1]
    body = {"complex": spec.label, "dim": n, "target": target,
            "result": final.as_dict(timing=False),
            "history": [c.as_dict(timing=False) for c in certs]}
    rows = [(c.radius, c.value if c.feasible else "", c.status,
             body["history"][i]["lp_bound"] or "", witness_id(c.witness))
            for i, c in enumerate(certs)]
    return Report("fill", body, ["radius", "value", "status", "lp_bound", "witness_id"], rows)


def task_fv(job, caps):
    spec = resolve_complex(_require(job, "complex"))
    n = job.get("dim", 1)
    k_max = job.get("max_k", 4)
    mode = job.get("mode", "exhaustive")
    r = _radius(job, caps, default=default_radius(spec, n, k_max))
    table = fv_table(spec, n, k_max, mode, window=_window(spec, r, caps),
                     k_cap=caps.max_exhaustive_k, enum_cap=caps.max_enum,
                     node_budget=caps.max_nodes)
    return Report("fv", table.as_dict(),
                  ["k", "value", "status", "mode", "witness_id", "radius"], table.csv_rows())


def task_operator_bound(job, caps):
    mspec = resolve_map(_require(job, "map"))
    dim = job.get("dim", 1)
    r = _radius(job, caps, default=2)
    rt = _radius(job, caps, "target_radius", r + 1)
    cmap = instantiate_map(mspec, _window(mspec.source, r, caps),
                           _window(mspec.target, rt, caps))
    rep = operator_bound(cmap, dim, samples=_samples(job, caps, 500), seed=job.get("seed", 0))
    body = rep.as_dict()
    body["max_ratio"] = round(body["max_ratio"], 9)
    row = (rep.label, dim, rep.constant, rep.witness_orbit, rep.samples,
           body["max_ratio"], rep.failures)
    return Report("operator-bound", body,
                  ["map", "dim", "constant", "witness_orbit", "samples", "max_ratio",
                   "failures"], [row])


def task_equivalence(job, caps):
    fwd = resolve_map(job.get("map", "z2-to-redundant"))
    if "reverse_map" in job:
        back = resolve_map(job["reverse_map"])
    elif "map" not in job:
        back = resolve_map("redundant-to-z2")
    else:
        back = None
    n = job.get("dim", 1)
    ra = _radius(job, caps)
    rb = _radius(job, caps, "target_radius", ra)
    rep = check_norm_equivalence(
        fwd, back, n, samples=_samples(job, caps, 50), seed=job.get("seed", 0),
        node_budget=caps.max_nodes,
        windows={"a": _window(fwd.source, ra, caps), "b": _window(fwd.target, rb, caps)})
    rows = [(i, s.norm_a, s.norm_b, "" if s.norm_back is None else s.norm_back,
             int(s.roundtrip)) for i, s in enumerate(rep.samples)]
    return Report("equivalence", rep.as_dict(),
                  ["sample", "norm_a", "norm_b", "norm_back", "roundtrip"], rows)


def task_dehn(job, caps):
    spec = resolve_complex(_require(job, "complex"))
    k_max = job.get("max_k", 8)
    r = _radius(job, caps, default=default_radius(spec, 1, k_max))
    w = _window(spec, r, caps)
    fv = fv_table(spec, 1, k_max, "exhaustive", window=w, k_cap=caps.max_exhaustive_k,
                  enum_cap=caps.max_enum, node_budget=caps.max_nodes)
    rep = dehn_consistency(spec, k_max, window=w, fv=fv)
    return Report("dehn-consistency", rep.as_dict(),
                  ["k", "fv", "circuit_fill", "bound", "ok", "status"],
                  [(k, a, d, b, int(ok), st) for k, a, d, b, ok, st in rep.rows])


def task_subgroup(job, caps):
    h = resolve_complex(job.get("complex", "z2-torus"))
    g = resolve_complex(job.get("g_complex", "z3-cubes"))
    emb = resolve_map(job.get("map", "z2-in-z3"))
    if emb.source is not h or emb.target is not g:
        raise ValidationError("embedding map does not go from the H complex to the G complex",
                              field="map")
    n = job.get("dim", 1)
    k_max = job.get("max_k", 8)
    rh = _radius(job, caps, default=default_radius(h, n, k_max))
    rg = _radius(job, caps, "g_radius", 3 if n == 1 else 2)
    wh, wg = _window(h, rh, caps), _window(g, rg, caps)
    kw = dict(k_cap=caps.max_exhaustive_k, enum_cap=caps.max_enum, node_budget=caps.max_nodes)
    th = fv_table(h, n, k_max, job.get("mode", "exhaustive"), window=wh, **kw)
    tg = fv_table(g, n, k_max, job.get("mode", "exhaustive"), window=wg, **kw)
    cmap = instantiate_map(emb, wh, _window(g, rh, caps))
    retraction = None
    if "retraction" in job:
        rspec = resolve_map(job["retraction"])
        retraction = instantiate_map(rspec, _window(g, 2, caps), _window(h, 3, caps))
    rep = subgroup_inequality_check(th, tg, cmap, c_cap=job.get("c_cap", 10),
                                    retraction=retraction, seed=job.get("seed", 0))
    rows = [(k, a, "" if x is None else x, "" if b is None else b, "" if r is None else r, v)
            for k, a, x, b, r, v in rep.verdicts]
    return Report("subgroup-check", rep.as_dict(),
                  ["k", "fv_h", "g_arg", "fv_g", "rhs", "verdict"], rows)


def task_confluence(job, caps):
    p = resolve_presentation(_require(job, "presentation"))
    rep = verify_confluence(p, job.get("length"))
    body = rep.as_dict()
    rows = [(v["word"], " | ".join(v["normal_forms"])) for v in body["violations"]]
    return Report("confluence", body, ["word", "normal_forms"], rows)


TASK_FUNCS = {
    "fill": task_fill,
    "fv": task_fv,
    "operator-bound": task_operator_bound,
    "equivalence": task_equivalence,
    "dehn-consistency": task_dehn,
    "subgroup-check": task_subgroup,
    "confluence": task_confluence,
}


# -- running jobs -----------------------------------------------------------------


def cache_key(job: dict, caps: Caps) -> str:
    blob = json.dumps({"job": expand_refs(job), "caps": caps.as_dict(),
                       "version": __version__}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def output_dir(explicit=None) -> str:
    return explicit or os.environ.get(OUT_ENV) or DEFAULT_OUT


def run_job(job: dict, out_dir=None, fmt="csv", caps: Caps | None = None,
            cap_override=False, use_cache=True):
    """Run one job; returns ``(report, output_path, cache_hit)``."""
    job = validate_job({"version": 1, "kind": "job", **job})
    caps = (caps or Caps()).merged(job.pop("caps", None), override=cap_override)
    out = output_dir(out_dir)
    key = cache_key(job, caps)
    cache_path = os.path.join(out, "cache", key + ".json")
    t0 = time.perf_counter()
    hit = False
    if use_cache and os.path.isfile(cache_path):
        with open(cache_path) as fh:
            report = Report.from_cache(json.load(fh))
        hit = True
    else:
        report = TASK_FUNCS[job["task"]](job, caps)
        os.makedirs(os.path.dirname(cache_path), exist_ok=True)
        tmp = cache_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(report.to_cache(), fh, sort_keys=True)
        os.replace(tmp, cache_path)
    elapsed = (time.perf_counter() - t0) * 1e3
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    path = os.path.join(out, f"{job['task']}-{key[:12]}.{fmt}")
    os.makedirs(out, exist_ok=True)
    if fmt == "csv":
        text = (f"# fillvol {__version__} task={job['task']} key={key[:12]} "
                f"generated={stamp} elapsed_ms={elapsed:.1f} cache={'hit' if hit else 'miss'}\n"
                + report.csv_body())
    elif fmt == "json":
        doc = {"meta": {"version": __version__, "task": job["task"], "key": key,
                        "generated": stamp, "elapsed_ms": round(elapsed, 1),
                        "cache_hit": hit},
               "report": report.body}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        raise ValidationError(f"unknown format {fmt!r}", field="format")
    with open(path, "w") as fh:
        fh.write(text)
    return report, path, hit


def report_body(path: str) -> str:
    """The deterministic part of a written report (no header line or meta block)."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        return json.dumps(json.loads(text)["report"], sort_keys=True)
    return "".join(line for line in text.splitlines(True) if not line.startswith("#"))


# -- argument parsing --------------------------------------------------------------


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON file with resource caps")
    p.add_argument("--cap-override", action="store_true",
                   help="allow job caps above the configured ones")
    p.add_argument("--no-cache", action="store_true")
    return p


def _target(text):
    if text.startswith("@"):
        return load_document(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"target is not JSON: {exc.msg}", field="target") from None


def build_parser():
    common = _common()
    ap = argparse.ArgumentParser(prog="fillvol", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = cmd("fill", "least filling norm of one cycle")
    p.add_argument("--complex", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--target", required=True,
                   help='JSON chain literal [[coef, orbit, word], ...] or @file')
    p.add_argument("--radius", type=int)
    p.add_argument("--max-radius", type=int, help="grow the window until the value stabilizes")

    p = cmd("fv", "filling-volume table")
    p.add_argument("--complex", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--max-k", type=int, default=4)
    p.add_argument("--radius", type=int)
    p.add_argument("--mode", choices=("exhaustive", "circuits"), default="exhaustive")

    p = cmd("operator-bound", "operator-norm constant of a chain map")
    p.add_argument("--map", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--radius", type=int)
    p.add_argument("--samples", type=int)

    p = cmd("equivalence", "compare filling norms across two complexes")
    p.add_argument("--map")
    p.add_argument("--reverse-map")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--radius", type=int)
    p.add_argument("--samples", type=int)

    p = cmd("dehn-consistency", "check FV(k) <= k D(k) against circuit fills")
    p.add_argument("--complex", required=True)
    p.add_argument("--max-k", type=int, default=8)
    p.add_argument("--radius", type=int)

    p = cmd("subgroup-check", "fit the subgroup inequality between two FV tables")
    p.add_argument("--complex", help="subgroup complex (default z2-torus)")
    p.add_argument("--g-complex", help="ambient complex (default z3-cubes)")
    p.add_argument("--map", help="embedding chain map (default z2-in-z3)")
    p.add_argument("--retraction")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--max-k", type=int, default=8)
    p.add_argument("--radius", type=int)
    p.add_argument("--g-radius", type=int)
    p.add_argument("--mode", choices=("exhaustive", "circuits"))

    p = cmd("confluence", "check a rewriting system for local confluence")
    p.add_argument("--presentation", required=True)
    p.add_argument("--length", type=int)

    p = cmd("run", "run a job document")
    p.add_argument("job")

    sub.add_parser("list-builtins", help="print the built-in catalog")
    return ap


_ARG_FIELDS = ("complex", "dim", "max_k", "radius", "max_radius", "mode", "seed", "samples",
               "map", "reverse_map", "retraction", "g_complex", "g_radius", "presentation",
               "length")


def job_from_args(args) -> dict:
    if args.command == "run":
        doc = load_document(args.job)
        try:
            return validate_job(doc, args.job)
        except ValidationError as exc:
            exc.path = exc.path or args.job
            raise
    job = {"task": args.command}
    for key in _ARG_FIELDS:
        val = getattr(args, key, None)
        if val is not None:
            job[key] = val
    if getattr(args, "target", None) is not None:
        job["target"] = _target(args.target)
    return job


def _error_object(exc):
    if isinstance(exc, ValidationError):
        d = exc.as_dict()
    else:
        d = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ResourceLimitError):
        d["partial"] = exc.partial is not None
        d["partial_result"] = exc.partial if isinstance(exc.partial, (dict, list, int)) \
            and _jsonable(exc.partial) else None
    d["exit_code"] = getattr(exc, "exit_code", 4)
    return d


def _jsonable(x):
    try:
        json.dumps(x)
        return True
    except TypeError:
        return False


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "list-builtins":
        json.dump(builtins.catalog(), sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0
    try:
        caps = load_caps(args.config)
        job = job_from_args(args)
        report, path, hit = run_job(job, args.out, args.format, caps, args.cap_override,
                                    use_cache=not args.no_cache)
    except FillvolError as exc:
        json.dump(_error_object(exc), sys.stderr)
        sys.stderr.write("\n")
        return getattr(exc, "exit_code", 4)
    except ArithmeticError as exc:  # pragma: no cover - solver invariant broken
        json.dump({"error": "InternalError", "message": str(exc), "exit_code": 4}, sys.stderr)
        sys.stderr.write("\n")
        return 4
    print(json.dumps({"status": "ok", "task": report.task, "output": path, "cache_hit": hit}))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
