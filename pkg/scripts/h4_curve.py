"""H4 / STO-3G error curve: QCCSD and first-order Trotter UCCSD against FCI.

Writes h4_curve.csv and h4_curve.svg to the output directory (default: cwd).

    python scripts/h4_curve.py [outdir] [--jobs N]
"""

import argparse
import sys
from pathlib import Path

from qccsd.cli import main


def cli():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", type=Path, default=Path("."))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    return main([
        "scan", "--system", "h4",
        "--bond-start", "0.5", "--bond-stop", "2.5", "--bond-step", "0.25",
        "--ansatz", "both", "--jobs", str(args.jobs),
        "--out-csv", str(args.outdir / "h4_curve.csv"),
        "--out-svg", str(args.outdir / "h4_curve.svg"),
        "-v",
    ])


if __name__ == "__main__":
    sys.exit(cli())
