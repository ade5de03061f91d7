"""Command-line entry point: ``ghl <command> ...``."""
import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

from ghl import __version__
from ghl.cache import ResultCache
from ghl.config import settings
from ghl.errors import GhlError, UsageError, VerificationFailure
from ghl.experiments import EXPERIMENTS
from ghl.groups import CATALOG_SPECS, FiniteGroup
from ghl.homology import ROUTES, TheoryId, check_degree_cutoff, compute_theory, default_window, parse_theory
from ghl.models import HomRecord, JobSpec, MatrixPayload, ResultRecord
from ghl.reporting import FORMATS, render
from ghl.specs import parse_degrees, parse_group, parse_module, parse_subgroup
from ghl.transfer import TRANSFER_MODELS, is_index_multiplication, map_for, transfer_context
from ghl.verify import MUTATIONS, SUITES, run_suite

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def execute_job(job: JobSpec, cache_dir: Optional[str] = None, budget: Optional[int] = None) -> List[ResultRecord]:
    """Run one job, serving degrees from the cache where possible."""
    group = parse_group(job.group)
    module = parse_module(job.module, group)
    cache = ResultCache(cache_dir, enabled=job.use_cache)
    records = {}
    missing = []
    for n in job.degrees:
        hit = cache.get(cache.key(group, module, job.theory, n, job.route))
        if hit is not None:
            records[n] = hit
        else:
            missing.append(n)
    if missing:
        start = time.time()
        try:
            computed = compute_theory(parse_theory(job.theory), module, missing, route=job.route, budget=budget)
        except Exception as e:
            logger.error(f"Job {job.theory} on {job.group} with {job.module} failed: {e}")
            raise
        runtime_ms = (time.time() - start) * 1000 / len(missing)
        for n in missing:
            record = ResultRecord(
                theory=job.theory,
                group=job.group,
                module=job.module,
                degree=n,
                invariant_factors=list(computed[n].invariant_factors),
                runtime_ms=round(runtime_ms, 3),
            )
            cache.put(cache.key(group, module, job.theory, n, job.route), record)
            records[n] = record
    return [records[n] for n in sorted(records)]


def run_jobs(jobs: Sequence[JobSpec], max_workers: int, cache_dir: Optional[str], budget: Optional[int]) -> List[ResultRecord]:
    """Execute jobs, in a process pool when more than one worker is allowed; output order follows ``jobs``."""
    if max_workers <= 1 or len(jobs) <= 1:
        results = [execute_job(job, cache_dir, budget) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(execute_job, job, cache_dir, budget) for job in jobs]
            results = [f.result() for f in futures]
    return [record for batch in results for record in batch]


# Commands


def cmd_compute(args: argparse.Namespace) -> int:
    theories = [parse_theory(t.strip()).value for t in args.theory.split(",") if t.strip()]
    if not theories:
        raise UsageError("No theory given")
    group = parse_group(args.group)
    parse_module(args.module, group)
    if args.route:
        for t in theories:
            if args.route not in ROUTES[TheoryId(t)]:
                raise UsageError(f"Theory {t} has no route '{args.route}'")
    windows: Dict[str, List[int]] = {}
    for t in theories:
        if args.degrees:
            windows[t] = parse_degrees(args.degrees)
            check_degree_cutoff(windows[t], args.max_degree)
        else:
            # the default window stops at the cutoff instead of failing on it
            windows[t] = [n for n in default_window(TheoryId(t), group) if n <= args.max_degree]
    jobs = [
        JobSpec(theory=t, group=args.group, module=args.module, degrees=windows[t], route=args.route,
                output_format=args.format, use_cache=not args.no_cache)
        for t in theories
    ]
    records = run_jobs(jobs, args.jobs, args.cache_dir, args.budget)
    print(render(records, args.format))
    return 0


def cmd_transfer(args: argparse.Namespace) -> int:
    group = parse_group(args.group)
    theory = parse_theory(args.theory)
    if theory not in TRANSFER_MODELS:
        raise UsageError(f"Transfer is defined for {', '.join(t.value for t in TRANSFER_MODELS)}, not {theory.value}")
    check_degree_cutoff([args.degree], args.max_degree)
    reps = [int(x) for x in args.reps.split(",")] if args.reps else None
    ctx = transfer_context(group, parse_subgroup(args.subgroup, group), parse_module(args.module, group), reps=reps)
    hom = map_for(ctx, theory, args.map, args.degree)
    record = HomRecord(
        theory=theory.value,
        group=args.group,
        subgroup=args.subgroup,
        module=args.module,
        map=args.map,
        degree=args.degree,
        source=list(hom.source.invariant_factors),
        target=list(hom.target.invariant_factors),
        matrix=MatrixPayload(**hom.matrix.to_payload()),
        index=ctx.index,
        is_index_multiplication=is_index_multiplication(hom, ctx.index) if args.map == "cores-res" else None,
    )
    print(record.model_dump_json(indent=2))
    return 0


def _orientation_report(group: FiniteGroup) -> dict:
    oriented = group.is_oriented()
    return {
        "group": group.name,
        "order": group.order,
        "orientation": "oriented" if oriented else "non-oriented",
        "sign_character": {group.label(g): group.cayley_sign(g) for g in group.elements()},
        "even_order_if_non_oriented": oriented or group.order % 2 == 0,
        "relabel_invariant": group.relabel([0] + list(reversed(range(1, group.order)))).is_oriented() == oriented,
    }


def cmd_orientation(args: argparse.Namespace) -> int:
    report = _orientation_report(parse_group(args.group))
    if args.format == "json":
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print(f"{report['group']}: {report['orientation']}")
        for label, sign in report["sign_character"].items():
            print(f"  {label:>8}  {sign:+d}")
    return 0


def _generators(group: FiniteGroup) -> List[int]:
    gens: List[int] = []
    span = group.generated_subgroup(gens)
    for g in group.elements():
        if g not in span:
            gens.append(g)
            span = group.generated_subgroup(gens)
    return gens


def cmd_catalog(args: argparse.Namespace) -> int:
    rows = []
    for spec in CATALOG_SPECS + ("q8",):
        group = parse_group(spec)
        rows.append({
            "spec": spec,
            "order": group.order,
            "orientation": "oriented" if group.is_oriented() else "non-oriented",
            "generators": [group.label(g) for g in _generators(group)],
        })
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        for row in rows:
            print(f"{row['spec']:<12} order {row['order']:<3} {row['orientation']:<13} generators {', '.join(row['generators'])}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(args.suite, seed=args.seed, mutate=args.mutate, quick=args.quick)
    print(report.model_dump_json(indent=2))
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        raise VerificationFailure(f"{len(report.failures)} check(s) failed: {names}",
                                  witness=[c.witness for c in report.failures])
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.name not in EXPERIMENTS:
        raise UsageError(f"Unknown experiment '{args.name}', expected one of {', '.join(EXPERIMENTS)}")
    kwargs = {}
    if args.name == "conjecture-cyclic" and args.orders:
        kwargs["orders"] = parse_degrees(args.orders)
    table = EXPERIMENTS[args.name](**kwargs)
    print(table.model_dump_json(indent=2))
    return 0


def cmd_cache(args: argparse.Namespace) -> int:
    cache = ResultCache(args.cache_dir, enabled=True)
    if args.action == "stats":
        print(cache.stats().model_dump_json(indent=2))
    else:
        removed = cache.gc(remove_all=args.all)
        print(json.dumps({"removed": removed}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghl", description=settings.app_name)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--budget", type=int, default=settings.ghl_budget, help="generator budget per degree")
    parser.add_argument("--jobs", type=int, default=settings.ghl_jobs, help="parallel jobs")
    parser.add_argument("--cache-dir", default=settings.ghl_cache_dir)
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--max-degree", type=int, default=settings.ghl_max_degree)
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="(co)homology groups of one theory")
    p.add_argument("--group", required=True)
    p.add_argument("--theory", required=True, help=", ".join(t.value for t in TheoryId) + " (comma list allowed)")
    p.add_argument("--module", default="trivial:Z")
    p.add_argument("--degrees", help="A..B, N or I,J,K; defaults to the theory's window up to --max-degree")
    p.add_argument("--route")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("transfer", help="res, cores or cores∘res on cohomology")
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", required=True)
    p.add_argument("--module", default="trivial:Z")
    p.add_argument("--theory", default="classical-cohomology")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--map", choices=("res", "cores", "cores-res"), default="cores-res")
    p.add_argument("--reps", help="comma-separated coset representatives")
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("orientation", help="Cayley sign character and orientation")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_orientation)

    p = sub.add_parser("verify", help="reproduction and property suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--mutate", choices=MUTATIONS)
    p.add_argument("--quick", action="store_true", help="small groups and degrees only")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="tabulated experiments")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--orders", help="cyclic orders for conjecture-cyclic, e.g. 2..6")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("catalog", help="built-in groups")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("cache", help="result cache maintenance")
    p.add_argument("action", choices=("stats", "gc"))
    p.add_argument("--all", action="store_true", help="with gc: remove every entry")
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose or settings.debug else getattr(logging, settings.log_level.upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except GhlError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(json.dumps(e.to_dict(), ensure_ascii=False), file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        print(json.dumps({"error": "UsageError", "message": str(e), "witness": None}), file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"Computation failed: {e}")
        print(json.dumps({"error": type(e).__name__, "message": str(e), "witness": None}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
