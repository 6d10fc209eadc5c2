"""Acceptance gates: every verification suite at its stated tolerance and
full replicate count, one printed pass/fail line per criterion check.
"""

import pytest

from skellam_fields.suites import DEFAULT_SEED, run_suite, suite_names

CRITERIA = {
    "srf-oracle": 1,
    "srf-mc": 2,
    "compound": 3,
    "inverse-subordinator": 4,
    "fsrf1": 5,
    "fsrf2": 6,
    "fsrf3": 7,
    "theorem31": 8,
    "governing-equations": 9,
    "integrals": 10,
    "fprf": 11,
    "specfun": 12,
}


@pytest.mark.parametrize("suite", sorted(suite_names(), key=CRITERIA.get))
def test_acceptance_criterion(suite):
    result = run_suite(suite, seed=DEFAULT_SEED, workers=2)
    for rep in result.reports:
        status = "PASS" if rep.passed else "FAIL"
        label = rep.metadata.get("criterion", rep.metric.value)
        print(f"[{status}] criterion {CRITERIA[suite]} ({suite}): {label}: "
              f"{rep.metric.value}={rep.value:.4g} (threshold {rep.threshold:.4g})")
    print(f"[{'PASS' if result.passed else 'FAIL'}] criterion {CRITERIA[suite]} "
          f"({suite}) in {result.elapsed_s:.1f}s")
    failures = [r for r in result.reports if not r.passed]
    assert not failures, f"{suite}: {len(failures)} gate(s) failed: " + "; ".join(
        str(r.metadata.get("criterion", r.metric.value)) for r in failures)
