#!/usr/bin/env python3
"""Regenerate every canonical solution-family table and its plot script.

Writes one directory per family set under the output root (default
./tables), each holding the sampled CSV files and a gnuplot script that
plots them.  Rerun after any solver change; the files are byte-stable,
so `git diff` on the output doubles as a regression check.

Usage: python scripts/make_tables.py [out_root] [--jobs N]
"""

import argparse
import pathlib
import sys

from frwcosmo.cli import main as cli_main

FAMILY_SETS = (
    ("zero-lambda-closed", []),
    ("zero-lambda-open", []),
    ("radiation-curved", ["--kappa", "1"]),
    ("radiation-curved", ["--kappa", "-1"]),
    ("flat-radiation", []),
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_root", nargs="?", default="tables")
    ap.add_argument("--jobs", type=int, default=1)
    ns = ap.parse_args()

    root = pathlib.Path(ns.out_root)
    for family, extra in FAMILY_SETS:
        suffix = f"-k{extra[1]}" if extra else ""
        out_dir = root / f"{family}{suffix}"
        rc = cli_main(
            ["table", "--family", family, *extra,
             "--jobs", str(ns.jobs), "--out", str(out_dir)]
        )
        if rc != 0:
            return rc
        n_files = len(list(out_dir.glob("*.csv")))
        print(f"{out_dir}: {n_files} data files")
    return 0


if __name__ == "__main__":
    sys.exit(main())
