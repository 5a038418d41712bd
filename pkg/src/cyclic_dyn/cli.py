"""Command-line entry point: ``cyclic-dyn <command> [flags]``.

Exit status is 0 on success, 2 on a usage error, 1 on a runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import List, Optional

from . import catalan, cones, montecarlo, vr
from .circle import Fixed, Rational, parse_scale, sample_uniform
from .errors import CyclicDynError, SchemaMismatch

SCHEMA = "cyclic-dyn/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _frac(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _scale_echo(text: str, r) -> dict:
    out = {"input": text, **r.to_json()}
    if isinstance(r, Fixed):
        out["ticks"] = str(r.num)
    return out


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cyclic-dyn", description="Random cyclic dynamical systems on the circle.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="Monte Carlo experiment")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--r", type=str, required=True, help="P/Q or fixed:0.xxxx")
    s.add_argument("--trials", type=_positive, required=True)
    s.add_argument("--seed", type=_nonneg, required=True)
    s.add_argument("--i-max", type=_nonneg, default=montecarlo.DEFAULT_I_MAX)
    s.add_argument("--out", type=str)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--no-swift", action="store_true", help="skip swiftness types")
    s.add_argument("--no-rows", action="store_true", help="omit per-trial rows from JSON")

    t = sub.add_parser("theory", help="exact limiting fractions")
    t.add_argument("--r", type=str, required=True)
    t.add_argument("--i-max", type=_nonneg, default=8)
    t.add_argument("--json", action="store_true")

    c = sub.add_parser("catalan", help="Catalan-type counts")
    c.add_argument("--family", choices=["C", "Cb", "Cp"], required=True)
    c.add_argument("--i", type=_nonneg, required=True)
    c.add_argument("--h", type=_nonneg)

    k = sub.add_parser("cone", help="exponential integral over a cone")
    k.add_argument("--family", choices=["K", "Kq", "S"], required=True)
    k.add_argument("--i", type=_nonneg, required=True)
    k.add_argument("--q", type=_positive)
    k.add_argument("--samples", type=_positive)
    k.add_argument("--seed", type=_nonneg, default=0)
    k.add_argument("--exact", action="store_true")

    v = sub.add_parser("vr", help="Vietoris-Rips core of a random sample")
    v.add_argument("--n", type=_positive, required=True)
    v.add_argument("--r", type=str, required=True)
    v.add_argument("--seed", type=_nonneg, required=True)

    rp = sub.add_parser("report", help="theory-vs-observation z-scores")
    rp.add_argument("--in", dest="infile", required=True)
    return p


def _check_scale_arg(text: str):
    try:
        return parse_scale(text)
    except ValueError as exc:
        raise UsageError(f"--r: {exc}")


def experiment_document(cfg: montecarlo.ExperimentConfig, r_text: str, results, agg, rows: bool = True) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "experiment",
        "config": cfg.to_json(),
        "scale": _scale_echo(r_text, cfg.r),
        "rng": {"scheme": montecarlo.RNG_SCHEME, "seed": cfg.seed},
        "aggregate": agg.to_json(),
        "created": datetime.now(timezone.utc).isoformat(),
    }
    if rows:
        doc["trials"] = [res.to_json() for res in results]
    return doc


def experiment_csv(cfg: montecarlo.ExperimentConfig, results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "per", *[f"lev_{i}" for i in range(cfg.i_max + 1)],
                     "orbit_count", "ell", "w", "wf_num", "wf_den"])
    for res in results:
        lev = [res.lev[i] if i < len(res.lev) else 0 for i in range(cfg.i_max + 1)]
        wf = res.wf
        writer.writerow([res.trial, res.per, *lev, res.orbit_count, res.ell, res.w,
                         wf.numerator, wf.denominator])
    return buf.getvalue()


def cmd_simulate(args) -> str:
    r = _check_scale_arg(args.r)
    cfg = montecarlo.ExperimentConfig(n=args.n, r=r, trials=args.trials, seed=args.seed,
                                      i_max=args.i_max, swift=not args.no_swift, workers=args.workers)
    results, agg = montecarlo.run_experiment(cfg)
    if args.format == "csv":
        text = experiment_csv(cfg, results)
    else:
        text = _dump(experiment_document(cfg, args.r, results, agg, rows=not args.no_rows)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        return ""
    return text


def cmd_theory(args) -> str:
    r = _check_scale_arg(args.r)
    table = catalan.theory_table(r, args.i_max)
    if args.json:
        doc = {
            "schema": SCHEMA,
            "kind": "theory",
            "scale": _scale_echo(args.r, r),
            "levels": [_frac(v) for v in table["levels"]],
            "periodic": _frac(table["periodic"]),
            "level_mass": _frac(table["level_mass"]),
        }
        if "swift" in table:
            doc["swift"] = [_frac(v) for v in table["swift"]]
            doc["swift_mass"] = _frac(table["swift_mass"])
        return _dump(doc) + "\n"
    lines = [f"r = {r}", f"{'i':>4}  {'level fraction':>24}  {'swift fraction':>24}"]
    for i, lev in enumerate(table["levels"]):
        sw = str(table["swift"][i]) if "swift" in table else "n/a"
        lines.append(f"{i:>4}  {str(lev):>24}  {sw:>24}")
    lines.append(f"periodic fraction: {table['periodic']}")
    lines.append(f"total level mass:  {table['level_mass']}")
    if "swift_mass" in table:
        lines.append(f"total swift mass:  {table['swift_mass']}")
    return "\n".join(lines) + "\n"


def cmd_catalan(args) -> str:
    if args.family == "C":
        return f"{catalan.catalan(args.i)}\n"
    if args.h is None:
        raise UsageError(f"--h is required for family {args.family}")
    fn = catalan.catalan_bounded if args.family == "Cb" else catalan.catalan_prime
    return f"{fn(args.i, args.h)}\n"


def cmd_cone(args) -> str:
    if args.family != "K" and args.q is None:
        raise UsageError(f"--q is required for family {args.family}")
    if args.q is not None and args.q < 2:
        raise UsageError("--q must be >= 2")
    spec = cones.build_cone(args.family, args.i, args.q)
    doc = {"family": args.family, "i": args.i, "q": args.q}
    if args.exact or args.samples is None:
        doc["exact"] = _frac(cones.exact_integral(spec))
    if args.samples is not None:
        doc["mc"] = cones.mc_integral(spec, args.samples, args.seed).to_json()
        doc["seed"] = args.seed
    return _dump(doc) + "\n"


def cmd_vr(args) -> str:
    r = _check_scale_arg(args.r)
    points = sample_uniform(args.n, montecarlo.trial_rng(args.seed, 0))
    doc = vr.analyze(points, r)
    doc["scale"] = _scale_echo(args.r, r)
    doc["rng"] = {"scheme": montecarlo.RNG_SCHEME, "seed": args.seed}
    return _dump(doc) + "\n"


def load_experiment(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA or doc.get("kind") != "experiment":
        raise SchemaMismatch(f"{path}: not a {SCHEMA} experiment document")
    try:
        cfg = montecarlo.ExperimentConfig.from_json(doc["config"])
        results = [montecarlo.TrialResult.from_json(row) for row in doc.get("trials", [])]
        stored = doc["aggregate"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{path}: malformed experiment ({exc})") from exc
    return doc, cfg, results, stored


def report(path: str) -> dict:
    """Join an experiment file with the exact predictions."""
    doc, cfg, results, stored = load_experiment(path)
    for res in results:
        if res.per + sum(res.lev) != cfg.n:
            raise SchemaMismatch(f"trial {res.trial}: per + sum(lev) != n")
    if results:
        if len(results) != cfg.trials:
            raise SchemaMismatch("trial rows do not match the configured trial count")
        agg = montecarlo.aggregate(results, cfg)
        recomputed = agg.to_json()
        if json.loads(json.dumps(recomputed)) != stored:
            raise SchemaMismatch("embedded aggregate does not match the trial rows")
    else:
        agg = montecarlo.Aggregate(cfg.n, cfg.i_max, trials=stored["trials"])
        for name, st in stored["stats"].items():
            agg.stats[name] = montecarlo.Stat(cfg.n, st["total"], st["total_sq"], st["count"])
    rows = montecarlo.compare_with_theory(agg, cfg.r)
    notes = []
    if not isinstance(cfg.r, Rational):
        notes.append("swiftness rows omitted: only defined for rational r")
    elif "swi_total" not in agg.stats:
        notes.append("swiftness rows omitted: experiment ran without swiftness")
    return {
        "schema": SCHEMA,
        "kind": "report",
        "source": path,
        "config": cfg.to_json(),
        "rows": [row.to_json() for row in rows],
        "all_pass": all(not row.flagged for row in rows),
        "single_orbit_freq": agg.single_orbit_freq if agg.trials else None,
        "notes": notes,
    }


def cmd_report(args) -> str:
    return _dump(report(args.infile)) + "\n"


COMMANDS = {
    "simulate": cmd_simulate,
    "theory": cmd_theory,
    "catalan": cmd_catalan,
    "cone": cmd_cone,
    "vr": cmd_vr,
    "report": cmd_report,
}


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cyclic-dyn: usage error: {exc}", file=err)
        return 2
    except (CyclicDynError, ValueError, OSError) as exc:
        print(f"cyclic-dyn: error: {exc}", file=err)
        return 1
    out.write(text)
    return 0


def main() -> None:
    sys.exit(run())
