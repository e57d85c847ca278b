"""Command-line front end: classify, predict, solve, sweep, report,
templates.

Reproducibility contract: identical invocations produce byte-identical
stdout/files.  All floats are printed with 12 significant digits; the
sweep CSV's wall_time column is 0.0 unless --timings is passed (real
timings would break determinism).  Exit codes: 0 ok, 2 validation
error, 3 numerical failure; errors go to stderr as "Code: message".
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import lab, maxset, predictor
from .assembly import assemble_periodic, assemble_transformed, \
    eigenfunction_on_grid, principal_eigen
from .errors import MalformedSpec, NumericalError, ValidationError
from .profile import (PeriodicBC, Potential, RobinBC, TEMPLATES, build_profile,
                      builtin, load_profile_json)


def _fmt(v):
    return f"{float(v):.12g}"


def _round12(obj):
    if isinstance(obj, float):
        if math.isinf(obj) or math.isnan(obj):
            return None
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit_json(payload, stream=None):
    (stream or sys.stdout).write(json.dumps(_round12(payload), indent=2) + "\n")


# -- argument parsing ----------------------------------------------------

def _parse_template_arg(text):
    name, _, rest = text.partition(":")
    params = [float(p) for p in rest.split(",") if p] if rest else []
    return builtin(name, *params)


def _load_inputs(args):
    """(profile, potential) from --template/--profile plus --c."""
    potential = None
    if getattr(args, "template", None):
        spec = _parse_template_arg(args.template)
    elif getattr(args, "profile", None):
        spec, potential = load_profile_json(args.profile)
    else:
        raise MalformedSpec("need --template NAME[:p1,p2,...] or --profile FILE")
    profile = build_profile(spec)
    c_arg = getattr(args, "c", None)
    if c_arg:
        potential = _parse_potential_arg(c_arg)
    if potential is None:
        potential = Potential.zero()
    return profile, potential


def _parse_potential_arg(text):
    if text == "zero":
        return Potential.zero()
    if text.startswith("const:"):
        return Potential.constant(float(text[len("const:"):]))
    if text.startswith("poly:"):
        return Potential.from_coeffs([float(v) for v in text[len("poly:"):].split(",")])
    if os.path.exists(text):
        with open(text) as fh:
            data = json.load(fh)
        block = data.get("potential", data)
        return Potential.from_segments(tuple(block["knots"]),
                                       tuple(tuple(s) for s in block["segments"]))
    raise MalformedSpec(f"cannot parse potential {text!r} "
                        "(use zero | const:v | poly:c0,c1,... | FILE)")


def _parse_bc(text):
    if text == "periodic":
        return PeriodicBC()
    if text.startswith("robin:"):
        vals = [float(v) for v in text[len("robin:"):].split(",")]
        if len(vals) != 4:
            raise MalformedSpec("--bc robin needs hbar1,ell1,hbar2,ell2")
        return RobinBC(*vals)
    raise MalformedSpec(f"cannot parse boundary condition {text!r}")


def _parse_ladder(text):
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise MalformedSpec("--ladder needs start:stop:count[:log|lin]")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        mode = parts[3] if len(parts) == 4 else "log"
        if count < 1 or start <= 0 or stop <= start:
            raise MalformedSpec("ladder must be ascending with positive start")
        if mode == "log":
            ladder = list(np.geomspace(start, stop, count))
        elif mode == "lin":
            ladder = list(np.linspace(start, stop, count))
        else:
            raise MalformedSpec("ladder mode must be log or lin")
    else:
        ladder = [float(v) for v in text.split(",") if v]
    if any(b <= a for a, b in zip(ladder, ladder[1:])) or not ladder:
        raise MalformedSpec("ladder must be strictly ascending")
    return ladder


def _parse_mass_intervals(text):
    if not text:
        return ()
    out = []
    for block in text.split(";"):
        lo, hi = (float(v) for v in block.split(","))
        out.append((lo, hi))
    return tuple(out)


def _grid_policy(args):
    policy = lab.DEFAULT_POLICY
    if getattr(args, "grid_multiplier", None) is not None:
        policy = lab.GridPolicy(multiplier=args.grid_multiplier,
                                floor=getattr(args, "grid_floor", None) or 2000)
    elif getattr(args, "grid_floor", None) is not None:
        policy = lab.GridPolicy(floor=args.grid_floor)
    return policy


def _serialize_source(term):
    src = term.source
    if isinstance(src, maxset.IsolatedMax):
        return {"type": "isolated", "x": src.x, "position": src.position}
    return {"type": "segment", "a": src.a, "b": src.b, "class": src.cls}


def _prediction_payload(pred):
    if not pred.finite:
        return {"verdict": "unbounded", "case": pred.case,
                "value": None, "terms": [], "argmin": []}
    return {
        "verdict": "finite",
        "value": pred.value,
        "terms": [{"source": _serialize_source(t), "kind": t.kind,
                   "value": t.value} for t in pred.terms],
        "argmin": list(pred.argmin),
    }


def _predict(profile, potential, bc, grid_n):
    if isinstance(bc, PeriodicBC):
        bc.validate(profile, potential)
        return predictor.periodic_prediction(profile, potential, grid_n)
    return predictor.predict_limit(maxset.decompose(profile), potential, bc, grid_n)


# -- subcommands ---------------------------------------------------------

def _cmd_classify(args):
    profile, _ = _load_inputs(args)
    decomp = maxset.decompose(profile)
    _emit_json({
        "isolated": [{"x": p.x, "position": p.position, "k_star": p.k_star,
                      "m_kstar": p.m_kstar} for p in decomp.isolated],
        "segments": [{"a": s.a, "b": s.b, "class": s.cls}
                     for s in decomp.segments],
    })
    return 0


def _cmd_predict(args):
    profile, potential = _load_inputs(args)
    bc = _parse_bc(args.bc)
    pred = _predict(profile, potential, bc, args.grid_n)
    _emit_json(_prediction_payload(pred))
    return 0


def _cmd_solve(args):
    profile, potential = _load_inputs(args)
    bc = _parse_bc(args.bc)
    n = args.n or _grid_policy(args).n_for(profile, args.s)
    if isinstance(bc, PeriodicBC):
        op = assemble_periodic(profile, potential, args.s, n)
    else:
        op = assemble_transformed(profile, potential, bc, args.s, n)
    pair = principal_eigen(op)
    sys.stdout.write(_fmt(pair.lam) + "\n")
    if args.dump_eigenfunction:
        x, w = eigenfunction_on_grid(op, pair)
        with open(args.dump_eigenfunction, "w") as fh:
            fh.write("x,w\n")
            for xi, wi in zip(x, w):
                fh.write(f"{_fmt(xi)},{_fmt(wi)}\n")
    return 0


def _sweep_records(args, profile, potential, bc):
    ladder = _parse_ladder(args.ladder)
    intervals = _parse_mass_intervals(getattr(args, "mass_intervals", ""))
    workers = getattr(args, "workers", 1) or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = lab.sweep(profile, potential, bc, ladder,
                                grid_policy=_grid_policy(args),
                                mass_intervals=intervals, map_fn=pool.map)
    else:
        records = lab.sweep(profile, potential, bc, ladder,
                            grid_policy=_grid_policy(args),
                            mass_intervals=intervals)
    return records, intervals


def _write_sweep_csv(records, intervals, stream, timings):
    header = ["s", "n", "lambda"]
    header += [f"mass_{i}" for i in range(len(intervals))]
    header.append("wall_time")
    stream.write(",".join(header) + "\n")
    for r in records:
        if r.error is not None:
            row = [_fmt(r.s), str(r.n), f"error:{r.error.split(':')[0]}"]
            row += [""] * len(intervals) + [""]
        else:
            row = [_fmt(r.s), str(r.n), _fmt(r.lam)]
            row += [_fmt(m) for _, m in r.mass]
            row.append(_fmt(r.wall_time) if timings else "0.0")
        stream.write(",".join(row) + "\n")


def _cmd_sweep(args):
    profile, potential = _load_inputs(args)
    bc = _parse_bc(args.bc)
    records, intervals = _sweep_records(args, profile, potential, bc)
    if args.out:
        with open(args.out, "w") as fh:
            _write_sweep_csv(records, intervals, fh, args.timings)
    else:
        _write_sweep_csv(records, intervals, sys.stdout, args.timings)
    return 0 if all(r.error is None for r in records) else 3


def _cmd_report(args):
    profile, potential = _load_inputs(args)
    bc = _parse_bc(args.bc)
    pred = _predict(profile, potential, bc, args.grid_n)
    outdir = args.outdir or os.environ.get("ADVEIG_OUTDIR", ".")
    os.makedirs(outdir, exist_ok=True)

    payload = {"prediction": _prediction_payload(pred)}
    records, intervals = _sweep_records(args, profile, potential, bc)
    good = [r for r in records if r.error is None]
    with open(os.path.join(outdir, "lambda_vs_s.dat"), "w") as fh:
        for r in good:
            fh.write(f"{_fmt(r.s)} {_fmt(r.lam)}\n")

    est = lab.estimate_limit(records, tol=args.converge_tol)
    payload["estimate"] = est
    payload["converged"] = est["converged"]
    gap = None
    if pred.finite and good:
        gap = max(abs(r.lam - pred.value) for r in good[len(good) // 2:])
    payload["max_abs_gap"] = gap

    # rescaled local profile at the largest s, when the argmin set holds
    # an isolated maximum with a defined degeneracy order
    profile_file = None
    if pred.finite and good and good[-1].grid is not None:
        decomp = (maxset.decompose_periodic(profile)
                  if isinstance(bc, PeriodicBC) else maxset.decompose(profile))
        for idx in pred.argmin:
            src = pred.terms[idx].source
            if isinstance(src, maxset.IsolatedMax) and src.k_star is not None:
                x, w = good[-1].grid
                radius = lab.component_mass_radius(decomp, src.x)
                resc = lab.rescaled_profile(x, w, src.x, src.k_star,
                                            good[-1].s, radius)
                profile_file = os.path.join(outdir, "rescaled_profile.dat")
                with open(profile_file, "w") as fh:
                    for yi, vi in zip(resc.y, resc.values):
                        fh.write(f"{_fmt(yi)} {_fmt(vi)}\n")
                payload["rescaled_profile"] = {
                    "x0": src.x, "k_star": src.k_star, "file": profile_file}
                break
    _emit_json(payload)
    return 0 if all(r.error is None for r in records) else 3


def _cmd_templates(args):
    for name in sorted(TEMPLATES):
        _, doc = TEMPLATES[name]
        sys.stdout.write(f"{name}: {doc}\n")
    return 0


# -- entry point ---------------------------------------------------------

def _add_profile_args(p, with_c=True):
    p.add_argument("--template", help="builtin template NAME[:p1,p2,...]")
    p.add_argument("--profile", help="profile JSON file")
    if with_c:
        p.add_argument("--c", default=None,
                       help="potential: zero | const:v | poly:c0,c1,... | FILE")


def _add_grid_args(p):
    p.add_argument("--grid-multiplier", type=float, default=None,
                   help="override the n(s) policy multiplier (default 16)")
    p.add_argument("--grid-floor", type=int, default=None,
                   help="override the n(s) policy floor (default 2000)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="adveig",
        description="principal-eigenvalue laboratory for large-advection "
                    "1D elliptic operators")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="emit the local-maximum decomposition")
    _add_profile_args(p, with_c=False)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("predict", help="predicted s->infinity limit")
    _add_profile_args(p)
    p.add_argument("--bc", required=True, help="robin:h1,l1,h2,l2 | periodic")
    p.add_argument("--grid-n", type=int, default=predictor.DEFAULT_GRID_PER_UNIT,
                   help="sub-interval grid points per unit length")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("solve", help="principal eigenvalue at one s")
    _add_profile_args(p)
    p.add_argument("--bc", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--n", type=int, default=None, help="grid size override")
    p.add_argument("--dump-eigenfunction", metavar="FILE",
                   help="write the grid eigenfunction as x,w CSV")
    _add_grid_args(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run an s ladder, emit CSV")
    _add_profile_args(p)
    p.add_argument("--bc", required=True)
    p.add_argument("--ladder", required=True,
                   help="start:stop:count[:log|lin] or comma list")
    p.add_argument("--mass-intervals", default="",
                   help="semicolon-separated lo,hi pairs")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--workers", type=int, default=1,
                   help="concurrent ladder solves (deterministic merge)")
    p.add_argument("--timings", action="store_true",
                   help="emit real wall times (breaks byte determinism)")
    _add_grid_args(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="predict + sweep + estimate verdict")
    _add_profile_args(p)
    p.add_argument("--bc", required=True)
    p.add_argument("--ladder", required=True)
    p.add_argument("--mass-intervals", default="")
    p.add_argument("--grid-n", type=int, default=predictor.DEFAULT_GRID_PER_UNIT)
    p.add_argument("--converge-tol", type=float, default=1e-2)
    p.add_argument("--outdir", default=None,
                   help="plot-data directory (default $ADVEIG_OUTDIR or .)")
    p.add_argument("--workers", type=int, default=1)
    _add_grid_args(p)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("templates", help="list builtin profile templates")
    p.set_defaults(func=_cmd_templates)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"{exc.code}: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"{exc.code}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
