"""
Quasi-Polish Kit - Quick Check Script

This script runs every invariant suite with a small sample count:
1. quasi-metric axioms of the universal space
2. handyfication of random finite preorders
3. UF <-> Pi^0_2 round trips
4. frame prover agreement

Run this after installing to verify the setup.
"""

import os
import sys

sys.path.append(os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'core'))

from errors import QpkError
from settings import get_settings
from suites import SuiteOptions, run_suite

QUICK_RUNS = [
    ("quasi-metric", SuiteOptions(target="pn", exhaustive=3)),
    ("handy", SuiteOptions(samples=10)),
    ("roundtrip", SuiteOptions(target="uf-pi02", samples=5)),
    ("frame-triad", SuiteOptions(samples=20)),
]


def check_environment():
    """Check that the settings load and validate."""
    try:
        settings = get_settings()
    except Exception as e:
        print(f"\n❌ ERROR: settings did not load: {e}")
        print("\nCheck config/qpk_defaults.json and the QPK_* variables in config/.env.")
        return False
    print(f"✅ Settings loaded (max carrier {settings.max_carrier}, seed {settings.default_seed}).")
    return True


def run_quick_suite(name, opts):
    print(f"\n--- Running {name} ---")
    opts.quiet = True
    try:
        report = run_suite(name, opts)
    except QpkError as e:
        print(f"❌ {name} stopped with an error: {e}")
        return False
    if report.exit_code == 0:
        print(f"✅ {name}: {report.verdicts.get('checked')} checked, no violations")
        return True
    print(f"❌ {name}: {report.verdicts.get('violations')} violations")
    for v in report.violations[:5]:
        print("  " + ", ".join(f"{k}={v[k]}" for k in sorted(v)))
    return False


def run_all_checks():
    """Run all quick checks."""
    print("\n=================================================")
    print("  QUASI-POLISH KIT - QUICK CHECK")
    print("=================================================")

    if not check_environment():
        return False

    results = {name: run_quick_suite(name, opts) for name, opts in QUICK_RUNS}

    print("\n=================================================")
    print("  CHECK RESULTS")
    print("=================================================")
    for name, ok in results.items():
        print(f"{name}: {'✅ PASSED' if ok else '❌ FAILED'}")

    if all(results.values()):
        print("\n✅ ALL CHECKS PASSED!")
        print("Run 'python run_qpk.py suites' to see the full suites.")
        return True
    print("\n❌ SOME CHECKS FAILED.")
    print("See logs/qpk.log for details.")
    return False


if __name__ == "__main__":
    sys.exit(0 if run_all_checks() else 1)
