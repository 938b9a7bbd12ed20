"""Run every built-in scenario and write CSV and SVG files to a directory."""
import argparse
import sys
import time
from pathlib import Path

from biphoton.experiments import SCENARIOS, builtin, run_scenario
from biphoton.results import emit


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--only", nargs="*", choices=[s for s in SCENARIOS if s != "custom"],
                    help="subset of scenarios")
    args = ap.parse_args(argv)
    out = Path(args.out)
    for sid in args.only or [s for s in SCENARIOS if s != "custom"]:
        start = time.perf_counter()
        rs = run_scenario(builtin(sid))
        for fmt in ("csv", "svg"):
            emit(rs, fmt, out / f"{sid}.{fmt}")
        print(f"{sid:12s} {len(rs):6d} rows  {time.perf_counter() - start:6.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
