#!/usr/bin/env python3
"""Write CSV and SVG for every panel of the three sweep figures.

    python3 scripts/reproduce_figures.py --out figures/
"""

import argparse
import pathlib
import time

from collider_lab.cli import rows_to_csv, sweep_svg
from collider_lab.estimands import report
from collider_lab.sweep import FIG3_BASE, run_panels


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="figures")
    parser.add_argument("--steps", type=int, default=61)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for preset in ("fig2-top", "fig2-bottom", "fig3"):
        start = time.perf_counter()
        panels = run_panels(preset, steps=args.steps)
        for axis, rows in panels.items():
            stem = out / f"{preset}_{axis}"
            stem.with_suffix(".csv").write_text(rows_to_csv(rows))
            stem.with_suffix(".svg").write_text(sweep_svg(rows, title=f"{preset}: {axis}"))
        print(f"{preset}: {len(panels)} panels in {time.perf_counter() - start:.3f}s")

    base = report(FIG3_BASE)
    print("fig3 base odds ratios:", {k: round(v, 4) for k, v in base.odds_ratios().items()})


if __name__ == "__main__":
    main()
