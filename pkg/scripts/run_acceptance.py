#!/usr/bin/env python3
"""Run every verification suite and print a pass/fail table.

Equivalent to `skellam-fields verify --suite all`, with a summary footer.
"""

import argparse
import json
import sys

from skellam_fields.suites import DEFAULT_SEED, run_suite, suite_names


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument("--replicates", type=int, default=100_000,
                        help="TV/CF thresholds assume the default 100000")
    parser.add_argument("--output", help="write the JSON report here")
    args = parser.parse_args()

    results = []
    for name in suite_names():
        result = run_suite(name, seed=args.seed, workers=args.workers,
                           replicates=args.replicates)
        results.append(result)
        worst = max((r.value / r.threshold if r.threshold > 0 else 0.0)
                    for r in result.reports)
        status = "pass" if result.passed else "FAIL"
        print(f"{status:4s}  {name:22s} {len(result.reports):2d} gates  "
              f"worst value/threshold {worst:8.3f}  {result.elapsed_s:6.1f}s")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump([r.to_dict() for r in results], fh, indent=2)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed suites:", ", ".join(failed))
        return 1
    print(f"all {len(results)} suites pass")
    return 0


if __name__ == "__main__":
    sys.exit(main())
