#!/usr/bin/env python3
"""Report how much headroom each reference-suite check has left.

A check that merely passes can still be one solver tweak away from its
gate; this prints worst-figure / gate ratios so drift is visible before
it becomes a failure.  Exit status follows the suite outcome.

Usage: python scripts/check_margins.py [subset-prefix]
"""

import sys

from frwcosmo.validate import DEFAULT_TOLERANCES, run_reference_suite


def main():
    subset = sys.argv[1] if len(sys.argv) > 1 else None
    results = run_reference_suite(subset=subset)
    width = max(len(name) for name in results)
    all_ok = True
    for name, rep in sorted(results.items()):
        figures = {
            "friedmann": rep.max_friedmann_residual,
            "ode": rep.max_ode_residual,
            "cross_method": rep.max_cross_method_deviation,
            "ermakov": rep.ermakov_drift,
        }
        shown = []
        for kind, value in figures.items():
            if value is None or value == 0.0:
                continue
            gate = rep.tolerances.get(kind, DEFAULT_TOLERANCES[kind])
            shown.append((kind, value, value / gate))
        if not shown:
            print(f"{name:<{width}}  exact (all residuals identically zero)")
            continue
        kind, value, ratio = max(shown, key=lambda item: item[2])
        status = "ok" if rep.passed else "FAIL"
        all_ok = all_ok and rep.passed
        print(
            f"{name:<{width}}  {status:<4} worst {kind} = {value:.3e}"
            f"  ({ratio * 100.0:6.2f}% of gate)"
        )
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
