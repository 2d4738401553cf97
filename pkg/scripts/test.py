#!/usr/bin/env python3
"""
Check runner for gsinclusion.

Collects the requested steps (black, flake8, mypy, pytest and the
verification suites), runs them in that order and reports which ones failed.
"""

import argparse
import subprocess
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).parent.parent


def run_command(cmd, cwd=PROJECT_ROOT):
    """Run a command and return whether it exited with status 0."""
    print(f"Running: {' '.join(cmd)}")
    try:
        return subprocess.run(cmd, cwd=cwd, check=False).returncode == 0
    except OSError as e:
        print(f"Error running command: {e}")
        return False


def pytest_command(args):
    """pytest invocation for the selected test subset."""
    cmd = [sys.executable, "-m", "pytest"]
    if args.verbose:
        cmd.append("-v")
    if args.coverage or args.all:
        cmd.append("--cov-report=xml")
    if args.fast:
        cmd.extend(["-m", "not slow"])
    elif args.core:
        cmd.append("tests/core/")
    elif args.cli:
        cmd.append("tests/test_app.py")
    elif args.integration:
        cmd.extend(["-m", "integration"])
    return cmd


def collect_steps(args):
    """(label, command) pairs in execution order."""
    steps = []
    if args.format or args.all:
        steps.append(("black", ["black", "gsinclusion", "tests", "scripts"]))
    if args.lint or args.all:
        steps.append(("flake8", ["flake8", "gsinclusion", "tests"]))
    if args.type_check or args.all:
        steps.append(("mypy", ["mypy", "gsinclusion"]))
    only_static = (args.lint or args.type_check or args.format) and not args.all
    if not only_static:
        steps.append(("pytest", pytest_command(args)))
    # verify exits 1 when a check fails and 3 when a check stays inconclusive
    if args.suites or args.all:
        suites = args.suites or "all"
        verify = [sys.executable, "-m", "gsinclusion.app", "verify", "--suite", suites, "--no-log-file"]
        steps.append((f"suites {suites}", verify))
    return steps


def main():
    """Main test runner function."""
    parser = argparse.ArgumentParser(
        description="gsinclusion Test Runner",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/test.py                    # Run all tests
  python scripts/test.py --fast             # Skip slow tests
  python scripts/test.py --core --coverage  # Core tests with coverage.xml
  python scripts/test.py --cli              # Command-line tests only
  python scripts/test.py --suites norms,parametrix
  python scripts/test.py --lint --type-check
  python scripts/test.py --all              # Everything, all suites included
        """,
    )
    parser.add_argument("--fast", action="store_true", help="Skip slow tests")
    parser.add_argument("--coverage", action="store_true", help="Also write coverage.xml")
    parser.add_argument("--core", action="store_true", help="Run only tests/core")
    parser.add_argument("--cli", action="store_true", help="Run only command-line tests")
    parser.add_argument("--integration", action="store_true", help="Run only integration tests")
    parser.add_argument("--suites", metavar="NAMES", help="Run `gsinclusion verify --suite NAMES` after the tests")
    parser.add_argument("--lint", action="store_true", help="Run flake8")
    parser.add_argument("--format", action="store_true", help="Format code with black")
    parser.add_argument("--type-check", action="store_true", help="Run mypy")
    parser.add_argument("--all", action="store_true", help="Format, lint, type check, test and run every suite")
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose pytest output")
    args = parser.parse_args()

    print("gsinclusion Test Runner")
    print("=" * 30)

    failed = []
    for label, cmd in collect_steps(args):
        print(f"\n[{label}]")
        if not run_command(cmd):
            failed.append(label)

    print()
    if failed:
        print(f"❌ Failed: {', '.join(failed)}")
        return 1
    print("✅ All checks passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
