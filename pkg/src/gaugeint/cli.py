"""Command-line experiment runner.

Subcommands: integrate, verify, modulus, sweep, report.  Identical config
and seed produce byte-identical output files: iteration orders are fixed,
rationals serialize canonically, floats print as shortest round-trip
decimals, and every file is written atomically.

Exit codes: 0 success, 1 check violation, 2 configuration error,
3 unsupported input.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from .config import ENV_OUT_DIR, ExperimentConfig, load_config
from .corpus import resolve_corpus
from .errors import (
    ConfigError,
    GaugeIntError,
    MonotonicityError,
    NoConvergenceError,
    UnsupportedClassError,
    UnsupportedFormError,
)
from .functions import AeModifiedFunction, LatticeFunction, modulus_fn
from .harness import control_flip_pair, check_ae_equality, dimension_sweep, run_default_suite
from .integrate import (
    indefinite,
    integrate_monotone,
    integrate_norm_adaptive,
    integrate_order,
    integrate_step,
    modulus_profile,
)
from .lattice import SUP, OSequence, Space
from .scalars import RATIONAL

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_UNSUPPORTED = 3


def _write_json(path: str, obj) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as out:
        json.dump(obj, out, indent=2, sort_keys=True)
        out.write("\n")
    os.replace(tmp, path)


def _prepare_corpus(cfg: ExperimentConfig) -> List[LatticeFunction]:
    corpus = resolve_corpus(cfg.corpus)
    if cfg.backend == "float":
        converted = []
        for f in corpus:
            to_float = getattr(f, "to_float_backend", None)
            converted.append(to_float() if to_float else f)
        corpus = converted
    corpus.sort(key=lambda f: f.name)
    if cfg.functions:
        known = {f.name for f in corpus}
        missing = [name for name in cfg.functions if name not in known]
        if missing:
            raise ConfigError(f"unknown corpus ids: {', '.join(missing)}")
        corpus = [f for f in corpus if f.name in set(cfg.functions)]
    return corpus


def _integrate_one(f: LatticeFunction, cfg: ExperimentConfig) -> List[dict]:
    records = []
    oracle = f.exact_integral(Fraction(0), Fraction(1)).to_json() if f.supports_exact_integral else None

    def record(method: str, result, n: Optional[int] = None) -> None:
        rec = result.to_json()
        rec.update({
            "function": f.name,
            "method": method,
            "n": n,
            "seed": cfg.seed,
            "oracle": oracle,
        })
        records.append(rec)

    if getattr(f, "is_step", False):
        record("step", integrate_step(f))
    elif isinstance(f, AeModifiedFunction):
        record("order", integrate_order(f, _default_oseq(f), cfg.order_n), cfg.order_n)
    elif f.is_monotone:
        for n in cfg.monotone_n:
            record("monotone", integrate_monotone(f, n), n)
        record("order", integrate_order(f, _default_oseq(f), cfg.order_n), cfg.order_n)
    else:
        space = Space(f.dim, SUP)
        eps = cfg.adaptive_eps if f.backend == RATIONAL else float(cfg.adaptive_eps)
        record("adaptive", integrate_norm_adaptive(f, space, eps, cfg.max_depth, seed=cfg.seed))
    return records


def _default_oseq(f: LatticeFunction) -> OSequence:
    from .harness import default_osequence

    return default_osequence(f)


def cmd_integrate(cfg: ExperimentConfig) -> int:
    corpus = _prepare_corpus(cfg)
    out_dir = os.path.join(cfg.resolved_out_dir(), "integrate")
    os.makedirs(out_dir, exist_ok=True)
    try:
        if cfg.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                all_records = list(pool.map(_integrate_one, corpus, [cfg] * len(corpus)))
        else:
            all_records = [_integrate_one(f, cfg) for f in corpus]
    except (UnsupportedClassError, UnsupportedFormError, NoConvergenceError, MonotonicityError) as exc:
        print(f"integrate: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    count = 0
    for records in all_records:
        for rec in records:
            suffix = f"__n{rec['n']}" if rec.get("n") is not None else ""
            path = os.path.join(out_dir, f"{rec['function']}__{rec['method']}{suffix}.json")
            _write_json(path, rec)
            count += 1
    print(f"integrate: wrote {count} records to {out_dir}")
    return EXIT_OK


def _verify_one(args) -> List[dict]:
    f, idx, cfg, check, n, trials = args
    reports = run_default_suite(
        [f],
        n=n,
        trials=trials,
        depth=cfg.modulus_depth,
        eps=cfg.variational_eps,
        seed=cfg.seed + 1000 * idx,
        checks=[check] if check else cfg.checks,
        functions=[f.name],
        with_controls=cfg.with_controls,
    )
    return [r.to_json() for r in reports]


def cmd_verify(cfg: ExperimentConfig, check: Optional[str] = None,
               function: Optional[str] = None, n: Optional[int] = None,
               trials: Optional[int] = None) -> int:
    corpus = _prepare_corpus(cfg)
    if function is not None:
        known = {f.name for f in corpus} | {f.name for f in corpus if isinstance(f, AeModifiedFunction)}
        if function not in known:
            raise ConfigError(f"unknown corpus id: {function}")
        keep = {function}
        work = [(f, i) for i, f in enumerate(corpus) if f.name in keep]
    else:
        work = list(enumerate(corpus))
        work = [(f, i) for i, f in work]
    n_eff = n if n is not None else cfg.check_n
    trials_eff = trials if trials is not None else cfg.trials
    tasks = [(f, i, cfg, check, n_eff, trials_eff) for f, i in work]
    if cfg.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_verify_one, tasks))
    else:
        chunks = [_verify_one(t) for t in tasks]
    reports = [rec for chunk in chunks for rec in chunk]
    flip_wanted = (check in (None, "ae_equality")) and (
        cfg.checks is None or "ae_equality" in cfg.checks
    )
    if cfg.with_controls and flip_wanted and function is None:
        base, flip = control_flip_pair()
        reports.append(check_ae_equality(
            base, flip, n=max(4, n_eff), trials=8,
            seed=cfg.seed + 9999, bound_scale=Fraction(1, 2),
        ).to_json())

    out_dir = os.path.join(cfg.resolved_out_dir(), "checks")
    os.makedirs(out_dir, exist_ok=True)
    bad = 0
    controls_ok = True
    for i, rec in enumerate(reports):
        tag = "__control" if rec["control"] else ""
        path = os.path.join(out_dir, f"{i:03d}__{rec['theorem']}__{rec['function']}{tag}.json")
        _write_json(path, rec)
        if rec["control"]:
            status = "control violated (expected)" if rec["violated"] else "CONTROL DID NOT VIOLATE"
            controls_ok = controls_ok and rec["violated"]
        else:
            status = "pass" if not rec["violated"] else "VIOLATED"
            bad += int(rec["violated"])
        print(f"[{status:>28}] {rec['theorem']:<18} {rec['function']} (n={rec['n']}, trials={rec['trials']})")
    _write_csv_summary(reports, os.path.join(cfg.resolved_out_dir(), "checks_summary.csv"))
    if not controls_ok:
        print("warning: a negative control failed to violate its shrunken bound", file=sys.stderr)
    print(f"verify: {len(reports)} reports, {bad} violations, results in {out_dir}")
    return EXIT_VIOLATION if bad else EXIT_OK


def _write_csv_summary(reports: List[dict], path: str) -> None:
    import csv

    with open(path, "w", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["theorem", "function", "n", "trials", "worst_slack", "violated", "control", "seed"])
        for rec in reports:
            writer.writerow([
                rec["theorem"],
                rec["function"],
                "" if rec["n"] is None else rec["n"],
                rec["trials"],
                ";".join(repr(_slack_float(e)) for e in rec["worst_slack"]),
                int(rec["violated"]),
                int(rec["control"]),
                rec["seed"],
            ])


def _slack_float(entry) -> float:
    if isinstance(entry, str) and "/" in entry:
        num, den = entry.split("/")
        return int(num) / int(den)
    return float(entry)


def cmd_modulus(cfg: ExperimentConfig) -> int:
    corpus = _prepare_corpus(cfg)
    out_dir = os.path.join(cfg.resolved_out_dir(), "modulus")
    os.makedirs(out_dir, exist_ok=True)
    count = 0
    for f in corpus:
        try:
            oracle = modulus_fn(f).exact_integral(Fraction(0), Fraction(1))
            profile = modulus_profile(indefinite(f), depth=cfg.modulus_depth)
        except (UnsupportedFormError, UnsupportedClassError):
            continue
        rec = {
            "function": f.name,
            "backend": f.backend,
            "depth": cfg.modulus_depth,
            "profile": [v.to_json() for v in profile],
            "oracle": oracle.to_json(),
            "seed": cfg.seed,
        }
        _write_json(os.path.join(out_dir, f"{f.name}.json"), rec)
        gap = max(float(o) - float(v) for o, v in zip(oracle.entries, profile[-1].entries))
        print(f"modulus: {f.name}: gap {gap!r} at depth {cfg.modulus_depth}")
        count += 1
    print(f"modulus: wrote {count} profiles to {out_dir}")
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig) -> int:
    report, rows = dimension_sweep(
        d_list=cfg.d_list,
        n=cfg.sweep_n,
        scaled=cfg.sweep_scaled,
        trials=cfg.sweep_trials,
        seed=cfg.seed,
    )
    out_dir = os.path.join(cfg.resolved_out_dir(), "sweep")
    os.makedirs(out_dir, exist_ok=True)
    tag = "scaled" if cfg.sweep_scaled else "unscaled"
    _write_json(os.path.join(out_dir, f"sweep_{tag}.json"),
                {"report": report.to_json(), "rows": rows})
    for row in rows:
        print(f"sweep: d={row['d']:>3} sup={row['sup_bound']} l1={row['l1_bound']}")
    return EXIT_VIOLATION if report.violated else EXIT_OK


def cmd_report(result_dir: str, out_dir: Optional[str]) -> int:
    from .reporting import write_report

    target = out_dir or os.path.join(result_dir, "report")
    written = write_report(result_dir, target)
    for path in written:
        print(f"report: wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaugeint",
        description="Gauge-integration experiments for lattice-valued functions on [0,1].",
    )
    parser.add_argument("--config", metavar="PATH", help="TOML experiment config")
    parser.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
    parser.add_argument("--backend", choices=("rational", "float"), help="scalar backend")
    parser.add_argument("--out", metavar="DIR",
                        help=f"output directory (default: config, then ${ENV_OUT_DIR}, then ./results)")
    parser.add_argument("--jobs", type=int, metavar="N", help="parallel workers across corpus entries")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("integrate", help="integrate every corpus function, one JSON record per method")

    p_verify = sub.add_parser("verify", help="run the theorem checks incl. negative controls")
    p_verify.add_argument("--check", help="run a single check by name")
    p_verify.add_argument("--function", help="restrict to one corpus id")
    p_verify.add_argument("--n", type=int, help="o-sequence index for the checks")
    p_verify.add_argument("--trials", type=int, help="trials per check")

    sub.add_parser("modulus", help="modulus-measure profiles against the |f| oracle")

    p_sweep = sub.add_parser("sweep", help="dimension sweep of the escaping family")
    p_sweep.add_argument("--scaled", dest="scaled", action="store_true", default=None,
                         help="scale block k by 2^k")
    p_sweep.add_argument("--unscaled", dest="scaled", action="store_false", default=None)

    p_report = sub.add_parser("report", help="aggregate a result directory into tables and figures")
    p_report.add_argument("result_dir", help="directory produced by the other subcommands")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.backend is not None:
            cfg.backend = args.backend
        if args.out is not None:
            cfg.out_dir = args.out
        if args.jobs is not None:
            cfg.jobs = args.jobs
        if args.command == "sweep" and getattr(args, "scaled", None) is not None:
            cfg.sweep_scaled = args.scaled
        cfg.validate()

        if args.command == "integrate":
            return cmd_integrate(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, check=args.check, function=args.function,
                              n=args.n, trials=args.trials)
        if args.command == "modulus":
            return cmd_modulus(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "report":
            return cmd_report(args.result_dir, cfg.out_dir or None)
        parser.error(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnsupportedClassError, UnsupportedFormError, NoConvergenceError) as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except GaugeIntError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
