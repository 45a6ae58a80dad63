#!/usr/bin/env python3
"""Run the acceptance suite and show one PASS/FAIL line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    cmd = [
        sys.executable, "-m", "pytest",
        str(ROOT / "tests" / "test_acceptance.py"),
        "-v", "-s", "--no-header",
    ]
    return subprocess.call(cmd, cwd=ROOT)


if __name__ == "__main__":
    raise SystemExit(main())
