"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(ROOT / "tests" / "test_acceptance.py")]
    out = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True).stdout
    lines = [ln for ln in out.splitlines() if ln.startswith(("PASS criterion", "FAIL criterion"))]
    lines = sorted(dict.fromkeys(lines), key=lambda ln: int(ln.split()[2].rstrip(":")))
    print("\n".join(lines))
    sys.exit(0 if lines and all(ln.startswith("PASS") for ln in lines) else 1)
