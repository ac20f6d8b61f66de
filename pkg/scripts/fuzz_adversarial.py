#!/usr/bin/env python3
"""Long-running adversarial fuzz driver.

Generates randomized multi-chain traces with one Byzantine operator per
trace, runs each through the scenario engine with conservation and
forgery accounting switched on, and reports the probe tallies. Any trace
that produces a violation is replayable by seed:

    python3 scripts/fuzz_adversarial.py --traces 5000 --seed 99
"""
import argparse
import sys

from mitto.fuzz import run_fuzz


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--traces", type=int, default=1000, help="number of traces (default 1000)")
    parser.add_argument("--seed", type=int, default=0, help="corpus seed (default 0)")
    args = parser.parse_args()
    if args.traces <= 0:
        print("--traces must be positive", file=sys.stderr)
        return 2

    report = run_fuzz(args.seed, args.traces)
    routing, over = report["routing"], report["over_return"]
    print(f"seed {args.seed}: {args.traces} traces, {report['steps']} steps")
    print(f"  routing probes rejected: {routing['rejected']}/{routing['attempts']}")
    print(f"  over-return probes rejected: {over['rejected']}/{over['attempts']}")
    if report["violations"]:
        print(f"  {len(report['violations'])} violations:")
        for line in report["violations"][:20]:
            print(f"    {line}")
        return 1
    print("  no violations")
    ok = routing["rejected"] == routing["attempts"] and over["rejected"] == over["attempts"]
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
