"""Command-line entry point.

``isoflow run <config.json>`` executes the scenarios in a config file;
``isoflow suite`` runs the built-in closed-form check suite at masses
0.5, 1, and 2.  Artifacts land in per-scenario directories under
``--out`` (or $ISOFLOW_OUT, or ./isoflow-out).

Exit status: 0 when every checked invariant passes, 1 when any verdict
fails, 2 on a malformed configuration, 3 when a run produced non-finite
values (the message carries the last good sample time).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .config import ConfigError, RunPlan, Scenario, load_plan
from .runner import apply_overrides, run_plan


def _built_in_suite() -> RunPlan:
    scenarios = tuple(
        Scenario(name=name, mode="lemma-suite", mass=mass)
        for name, mass in (
            ("lemma-suite-m05", 0.5),
            ("lemma-suite-m1", 1.0),
            ("lemma-suite-m2", 2.0),
        )
    )
    return RunPlan(scenarios=scenarios)


def _out_root(arg: str | None) -> str:
    if arg:
        return arg
    return os.environ.get("ISOFLOW_OUT") or "isoflow-out"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="isoflow",
        description="Isoperimetric-profile and freezing-flow scenario runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the scenarios in a config file")
    p_run.add_argument("config", help="path to a JSON scenario file")
    p_run.add_argument("--out", help="output root directory")
    p_run.add_argument("--h", type=float, help="override grid spacing in all scenarios")
    p_run.add_argument("--dt", type=float, help="override time step in all flow scenarios")

    p_suite = sub.add_parser("suite", help="run the built-in closed-form checks")
    p_suite.add_argument("--out", help="output root directory")

    args = parser.parse_args(argv)

    if args.command == "suite":
        plan = _built_in_suite()
    else:
        try:
            plan = load_plan(args.config)
            plan = apply_overrides(plan, args.h, args.dt)
        except ConfigError as e:
            print(f"isoflow: bad config: {e}", file=sys.stderr)
            return 2

    try:
        results = run_plan(plan, _out_root(args.out))
    except (ConfigError, ValueError) as e:
        # Late validation: an override can make a grid invalid or push dt
        # past the stability bound, and a hand-written dt can fail to
        # divide the sample interval.  All of these are config mistakes.
        print(f"isoflow: bad config: {e}", file=sys.stderr)
        return 2

    status = 0
    for res in results:
        if res.blowup_last_good is not None:
            t = res.blowup_last_good
            shown = "none" if math.isnan(t) else f"{t:.17g}"
            print(
                f"isoflow: {res.name}: numerical blow-up; last good sample t={shown}",
                file=sys.stderr,
            )
            return 3
        for v in res.verdicts:
            print(f"{res.name}: {v.line()}")
            if not v.passed:
                status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
