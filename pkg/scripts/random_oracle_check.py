#!/usr/bin/env python3
"""Closed forms against the Monte Carlo oracle on random parameter vectors.

Prints the worst |z| per vector and a summary of how many fields land outside
the tolerance.
"""

import argparse

import numpy as np

from collider_lab import mc
from collider_lab.estimands import report
from collider_lab.scm import COEFFICIENTS, ScmParams


def draw(rng):
    coefs = dict(zip(COEFFICIENTS, rng.uniform(-3, 3, len(COEFFICIENTS))))
    return ScmParams(nu=float(rng.integers(0, 2)), **{k: float(v) for k, v in coefs.items()})


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--vectors", type=int, default=50)
    parser.add_argument("--n", type=int, default=10**6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=4.0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    outside = 0
    for i in range(args.vectors):
        params = draw(rng)
        rows = mc.compare(report(params), mc.estimate_report(params, args.n, args.seed + i, args.workers), args.tol)
        worst = max(rows, key=lambda k: rows[k]["z"])
        bad = [k for k, r in rows.items() if not r["ok"]]
        outside += len(bad)
        print(f"{i:4d}  max |z| {rows[worst]['z']:5.2f} ({worst}){'  OUTSIDE: ' + ', '.join(bad) if bad else ''}")
    print(f"{outside} field(s) outside {args.tol:g} SE across {args.vectors} vectors")


if __name__ == "__main__":
    main()
