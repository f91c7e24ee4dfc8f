"""Command-line entry point binding the library into reproducible runs.

Subcommands: ``federal``, ``district``, ``simulate``, ``validate``.  Every
run writes a manifest (config plus input digests) next to its outputs so the
run can be reproduced exactly.  Exit codes: 0 success, 1 analysis error,
2 usage error.  The output directory flag can be overridden with the
``CAUSALSPREAD_OUTDIR`` environment variable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .ingest import fixture_path, load_scm_spec
from .pipeline import DistrictConfig, FederalConfig, run_district_analysis, run_federal_analysis
from .reports import (
    district_outputs,
    federal_outputs,
    simulation_outputs,
    validation_outputs,
    write_manifest,
)
from .scenarios import scenario_suite
from .scm import label_ground_truth, simulate
from .sypi import DEFAULT_THRESHOLDS, THRESHOLD_GRID, ThresholdPair
from .validate import run_validation

log = logging.getLogger(__name__)

OUTDIR_ENV = "CAUSALSPREAD_OUTDIR"


def _existing_file(parser: argparse.ArgumentParser, value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        parser.error(f"input file not found: {path}")
    return path


def _threshold(value: str) -> float:
    x = float(value)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"threshold must be in (0, 1): {value}")
    return x


def _outdir(args) -> Path:
    outdir = Path(os.environ.get(OUTDIR_ENV, args.out))
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalspread",
        description="Causal feature selection for regional time series "
                    "with latent confounders.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="INFO-level progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    fed = sub.add_parser("federal", help="state-level analysis with policies")
    fed.add_argument("--cases", default=None, help="cases CSV (default: bundled fixture)")
    fed.add_argument("--policies", default=None, help="policies CSV (default: bundled fixture)")
    fed.add_argument("--thr1", type=_threshold, default=None,
                     help="condition-1 level; omit to run the full grid")
    fed.add_argument("--thr2", type=_threshold, default=None,
                     help="condition-2 level; omit to run the full grid")
    fed.add_argument("--max-lag", type=int, default=14)
    fed.add_argument("--seed", type=int, default=0)
    fed.add_argument("--normalize-max", action="store_true",
                     help="divide each series by its maximum before testing")
    fed.add_argument("--no-granger", action="store_true",
                     help="skip the Lasso-Granger baseline")
    fed.add_argument("--out", default="runs/federal")

    dis = sub.add_parser("district", help="district-level analysis")
    dis.add_argument("--cases", default=None)
    dis.add_argument("--geo", default=None)
    dis.add_argument("--adjacency", default=None)
    dis.add_argument("--airports", default=None)
    dis.add_argument("--thr1", type=_threshold, default=DEFAULT_THRESHOLDS.thr1)
    dis.add_argument("--thr2", type=_threshold, default=DEFAULT_THRESHOLDS.thr2)
    dis.add_argument("--max-lag", type=int, default=14)
    dis.add_argument("--seed", type=int, default=0)
    dis.add_argument("--normalize-max", action="store_true")
    dis.add_argument("--out", default="runs/district")

    sim = sub.add_parser("simulate", help="emit synthetic panels and ground truth")
    sim.add_argument("--scenario", default=None,
                     help="suite scenario name (default: whole suite)")
    sim.add_argument("--spec", default=None,
                     help="YAML model file instead of a suite scenario")
    sim.add_argument("--n", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default="runs/simulate")

    val = sub.add_parser("validate", help="synthetic validation of both methods")
    val.add_argument("--seeds", type=int, default=200)
    val.add_argument("--n", type=int, default=1000)
    val.add_argument("--thr1", type=_threshold, default=DEFAULT_THRESHOLDS.thr1)
    val.add_argument("--thr2", type=_threshold, default=DEFAULT_THRESHOLDS.thr2)
    val.add_argument("--max-lag", type=int, default=14)
    val.add_argument("--scenario", action="append", default=None,
                     help="restrict to named scenarios (repeatable)")
    val.add_argument("--out", default="runs/validate")
    return parser


def cmd_federal(parser, args) -> int:
    if (args.thr1 is None) != (args.thr2 is None):
        parser.error("--thr1 and --thr2 must be given together")
    cases = _existing_file(parser, args.cases) if args.cases else fixture_path("cases-federal")
    policies = (_existing_file(parser, args.policies) if args.policies
                else fixture_path("policies-federal"))
    thresholds = (THRESHOLD_GRID if args.thr1 is None
                  else (ThresholdPair(args.thr1, args.thr2),))
    config = FederalConfig(
        cases=cases, policies=policies, thresholds=thresholds,
        max_lag=args.max_lag, seed=args.seed, normalize=args.normalize_max,
        with_granger=not args.no_granger,
    )
    outdir = _outdir(args)
    report = run_federal_analysis(config)
    federal_outputs(report, outdir)
    write_manifest(outdir, "federal", config.as_dict(),
                   {"cases": cases, "policies": policies})
    detected = sum(len(r["sypi_causes"]) for r in report["comparison"]["rows"])
    print(f"federal analysis: {report['n_series']} states, "
          f"{detected} causes at comparison thresholds, outputs in {outdir}")
    return 0


def cmd_district(parser, args) -> int:
    paths = {
        "cases": _existing_file(parser, args.cases) if args.cases else fixture_path("cases-district"),
        "geo": _existing_file(parser, args.geo) if args.geo else fixture_path("geo-regions"),
        "adjacency": (_existing_file(parser, args.adjacency) if args.adjacency
                      else fixture_path("adjacency")),
        "airports": (_existing_file(parser, args.airports) if args.airports
                     else fixture_path("airports")),
    }
    config = DistrictConfig(
        cases=paths["cases"], geo=paths["geo"], adjacency=paths["adjacency"],
        airports=paths["airports"],
        thresholds=ThresholdPair(args.thr1, args.thr2),
        max_lag=args.max_lag, seed=args.seed, normalize=args.normalize_max,
    )
    outdir = _outdir(args)
    report = run_district_analysis(config)
    district_outputs(report, outdir)
    write_manifest(outdir, "district", config.as_dict(), paths)
    summary = report["summary"]
    near = report["near_airport_districts"]
    print(f"district analysis: {report['n_series']} districts, "
          f"{summary['total_causes']} causes "
          f"(reference {summary['reference_total']}), "
          f"{near['count']} districts near airports (reference {near['reference']}), "
          f"outputs in {outdir}")
    return 0


def cmd_simulate(parser, args) -> int:
    outdir = _outdir(args)
    if args.spec:
        spec = load_scm_spec(_existing_file(parser, args.spec)).with_seed(args.seed)
        jobs = [(spec, label_ground_truth(spec))]
    else:
        jobs = [
            (spec.with_seed(args.seed), truth)
            for spec, truth in scenario_suite()
            if args.scenario is None or spec.name == args.scenario
        ]
        if not jobs:
            names = sorted(spec.name for spec, _ in scenario_suite())
            parser.error(f"unknown scenario {args.scenario!r}; have {names}")
    for spec, truth in jobs:
        panel = simulate(spec, args.n)
        simulation_outputs(panel, {k: v.value for k, v in truth.labels.items()},
                           outdir, spec.name)
        print(f"simulated {spec.name}: n={args.n} seed={args.seed}")
    config = {"n": args.n, "seed": args.seed, "scenario": args.scenario,
              "spec": str(args.spec) if args.spec else None}
    write_manifest(outdir, "simulate", config,
                   {"spec": Path(args.spec)} if args.spec else {})
    return 0


def cmd_validate(parser, args) -> int:
    outdir = _outdir(args)
    thresholds = ThresholdPair(args.thr1, args.thr2)
    results = run_validation(
        seeds=args.seeds, n=args.n, thresholds=thresholds,
        max_lag=args.max_lag, scenario_names=args.scenario,
    )
    rows = [r.row() for r in results]
    validation_outputs(rows, outdir)
    config = {"seeds": args.seeds, "n": args.n,
              "thresholds": [thresholds.thr1, thresholds.thr2],
              "max_lag": args.max_lag, "scenarios": args.scenario}
    write_manifest(outdir, "validate", config, {})
    for row in rows:
        det = row.get("sypi_direct_detection")
        fpr = row.get("sypi_confounded_fpr")
        print(f"{row['scenario']:>26}: direct detection "
              f"{det if det is not None else 'n/a'} | confounded FPR "
              f"{fpr if fpr is not None else 'n/a'}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "federal": cmd_federal,
        "district": cmd_district,
        "simulate": cmd_simulate,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](parser, args)
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
