#!/usr/bin/env python3
"""Run every bundled scenario and print a one-line result for each.

Exits non-zero if any scenario fails its expectations, so this doubles as a
quick smoke check: python3 scripts/run_scenarios.py [--dir scenarios]
"""
import argparse
import sys
from pathlib import Path

from mitto.harness import run_scenario
from mitto.scenario import ParseError, load_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default=None, help="scenario directory (default: bundled)")
    args = parser.parse_args()

    directory = Path(args.dir) if args.dir else Path(__file__).resolve().parent.parent / "scenarios"
    paths = sorted(directory.glob("*.json"))
    if not paths:
        print(f"no scenarios in {directory}", file=sys.stderr)
        return 2

    failures = 0
    for path in paths:
        try:
            report = run_scenario(load_scenario(path))
        except ParseError as err:
            print(f"{path.stem}: parse error: {err}")
            failures += 1
            continue
        status = "ok" if report["ok"] else "FAILED"
        print(f"{path.stem}: {len(report['steps'])} steps, {len(report['violations'])} violations, {status}")
        if not report["ok"]:
            failures += 1
            for line in report["violations"]:
                print(f"  {line}")
            if report["failure"]:
                print(f"  failed invariant at step {report['failure']['step']}: {report['failure']['invariant']}")
    print(f"{len(paths) - failures}/{len(paths)} scenarios passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
