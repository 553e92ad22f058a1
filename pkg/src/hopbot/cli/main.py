"""``hopbot`` command line.

Exit status: 0 success, 2 unreadable or malformed config, 3 invalid
parameters, 4 numerical failure.
"""

import argparse
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..errors import ConfigError, DomainError, NumericalError, ValidationError
from .config import KINDS, Scenario, load_scenario
from .scenarios import DEFAULT_PARAMS, execute, prepare, write_json

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3, 4
MAX_SEED = 2 ** 64 - 1


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64 - 1]")
    return value


def _jobs(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"jobs must be an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("jobs must be >= 1")
    return value


def _add_globals(parser, suppress):
    default = (lambda d: argparse.SUPPRESS) if suppress else (lambda d: d)
    parser.add_argument("--config", action="append", metavar="PATH", default=default(None),
                        help="scenario JSON file; repeat for a batch")
    parser.add_argument("--out", metavar="DIR", default=default("out"),
                        help="output directory (default: out)")
    parser.add_argument("--seed", type=_seed, default=default(None),
                        help="random seed; overrides the seed in the config")
    parser.add_argument("--jobs", type=_jobs, default=default(1),
                        help="worker processes for a batch of configs")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hopbot", description="Hopping-robot simulation and mission sizing scenarios.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "motor-burn": "solid-grain burn: pressure, thrust and mass history",
        "isp-table": "ideal Isp and hover flight time for a propellant database",
        "hop": "6-DOF slew, burn and ballistic coast",
        "attitude": "reaction-wheel attitude slew",
        "plan-path": "navigation-function path planning",
        "survey": "robots and mapping time for a cave survey",
        "relay": "store-and-forward relay latency",
        "tables": "recompute the reference comparison tables",
    }
    for kind in KINDS:
        p = sub.add_parser(kind, help=helps[kind])
        _add_globals(p, suppress=True)
        if kind == "plan-path":
            p.add_argument("--paper-world", action="store_true",
                           help="use the built-in four-obstacle world and start point")
        if kind == "tables":
            p.add_argument("--which", type=int, choices=(2, 3, 4), action="append",
                           help="table to produce (repeatable; default all)")
    p = sub.add_parser("validate", help="check config files without running them")
    _add_globals(p, suppress=True)
    return parser


def _options(args):
    return {"paper_world": getattr(args, "paper_world", False),
            "which": getattr(args, "which", None)}


def _commit(staging, out):
    """Move finished artifacts from ``staging`` into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    for item in sorted(staging.iterdir()):
        target = out / item.name
        if target.is_dir() and item.is_dir():
            _commit(item, target)
        else:
            shutil.move(str(item), str(target))


def stage_one(scenario, staging, seed, options):
    """Validate and run one scenario, writing artifacts into ``staging``.

    Returns ``(exit_code, message)``.
    """
    try:
        prep = prepare(scenario.kind, scenario.params, options)
    except ConfigError as exc:
        return EXIT_PARSE, f"error: {scenario.source}: {exc}"
    except ValidationError as exc:
        lines = "\n".join(f"  {p}" for p in exc.problems)
        return EXIT_INVALID, f"invalid scenario {scenario.source}:\n{lines}"
    staging = Path(staging)
    staging.mkdir(parents=True, exist_ok=True)
    try:
        summary = execute(scenario.kind, prep, staging, seed)
        write_json(staging / "summary.json", {
            "kind": scenario.kind,
            "config": Path(scenario.source).name,
            "seed": seed,
            "status": "ok",
            "results": summary,
        })
    except (ValidationError, DomainError) as exc:
        return EXIT_INVALID, f"invalid scenario {scenario.source}: {exc}"
    except (NumericalError, ArithmeticError) as exc:
        return EXIT_NUMERIC, f"numerical failure in {scenario.source}: {exc}"
    return EXIT_OK, f"{scenario.kind}: {scenario.source}"


def _stage_job(job):
    return stage_one(*job)


def run_scenarios(scenarios, out, seed=None, options=None, jobs=1):
    """Run scenarios and publish their artifacts under ``out``.

    Everything is validated first, then computed in a private temporary
    directory. Artifacts are moved into ``out`` only if every scenario
    succeeded, so a nonzero exit never leaves new files behind. A single
    scenario writes straight into ``out``; a batch gets one subdirectory
    per config file.
    """
    options = options or {}
    for s in scenarios:
        try:
            prepare(s.kind, s.params, options)
        except ConfigError as exc:
            return EXIT_PARSE, [f"error: {s.source}: {exc}"]
        except ValidationError as exc:
            lines = "\n".join(f"  {p}" for p in exc.problems)
            return EXIT_INVALID, [f"invalid scenario {s.source}:\n{lines}"]

    out = Path(out)
    targets = [out] if len(scenarios) == 1 else _batch_dirs(out, scenarios)
    root = Path(tempfile.mkdtemp(prefix="hopbot-"))
    try:
        work = [(s, root / str(i), s.seed if seed is None else seed, options)
                for i, s in enumerate(scenarios)]
        if jobs > 1 and len(work) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_stage_job, work))
        else:
            results = [_stage_job(w) for w in work]
        code = max(c for c, _ in results)
        if code == EXIT_OK:
            for (_, staged, _, _), target in zip(work, targets):
                _commit(staged, target)
            messages = [f"{s.kind}: wrote {t}" for s, t in zip(scenarios, targets)]
        else:
            messages = [m for c, m in results if c != EXIT_OK]
        return code, messages
    finally:
        shutil.rmtree(root, ignore_errors=True)


def _batch_dirs(out, scenarios):
    names, seen = [], {}
    for s in scenarios:
        stem = Path(s.source).stem
        seen[stem] = seen.get(stem, 0) + 1
        names.append(stem if seen[stem] == 1 else f"{stem}-{seen[stem]}")
    return [Path(out) / n for n in names]


def cmd_validate(args):
    if not args.config:
        print("error: validate needs at least one --config", file=sys.stderr)
        return EXIT_PARSE
    worst = EXIT_OK
    for path in args.config:
        try:
            scenario = load_scenario(path)
            prepare(scenario.kind, scenario.params, {})
        except ConfigError as exc:
            message = str(exc)
            print(f"error: {message if message.startswith(str(path)) else f'{path}: {message}'}",
                  file=sys.stderr)
            worst = EXIT_PARSE  # unreadable files dominate
            continue
        except ValidationError as exc:
            print(f"{path}: {len(exc.problems)} violation(s)")
            for p in exc.problems:
                print(f"  {p}")
            if worst == EXIT_OK:
                worst = EXIT_INVALID
            continue
        print(f"{path}: ok ({scenario.kind})")
    return worst


def cmd_run(args):
    options = _options(args)
    if args.config:
        try:
            scenarios = [load_scenario(p, args.command) for p in args.config]
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
    else:
        scenarios = [Scenario(args.command, DEFAULT_PARAMS.get(args.command, {}))]

    code, messages = run_scenarios(scenarios, args.out, args.seed, options, args.jobs)
    for message in messages:
        print(message, file=sys.stderr if code else sys.stdout)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args)
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
