#!/usr/bin/env python3
"""Empirical check of the estimator-variance model across a query-count sweep.

Simulates the hierarchical Beta-Bernoulli evaluation at several Kq values,
compares against the closed form and the large-Kq asymptote, and writes a CSV
(kq, theory, simulated, rel_error, asymptote). Deterministic per seed.

Usage:
    python scripts/validate_variance_model.py [--reps 50000] [--out sweep.csv]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from episcope.montecarlo import sweep
from episcope.variance import AccuracyPrior, variance_asymptote


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--a", type=float, default=0.87)
    parser.add_argument("--sigma", type=float, default=0.05)
    parser.add_argument("--kp", type=int, default=120)
    parser.add_argument("--kq", type=str, default="1,5,15,75,595,2975")
    parser.add_argument("--reps", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--out", type=str, default="-")
    args = parser.parse_args()

    prior = AccuracyPrior(args.a, args.sigma)
    kq_values = [int(v) for v in args.kq.split(",")]
    reports = sweep(prior, kq_values, args.kp, args.reps, args.seed)
    limit = variance_asymptote(prior, args.kp)

    lines = ["kq,theoretical_var,empirical_var,rel_var_error,asymptote_var"]
    for kq, report in zip(kq_values, reports):
        lines.append(
            f"{kq},{report.theoretical_var:.10g},{report.empirical_var:.10g},"
            f"{report.rel_var_error:.10g},{limit:.10g}"
        )
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")

    worst = max(r.rel_var_error for r in reports)
    print(
        f"# {len(kq_values)} sweep points, {args.reps} replications each, "
        f"worst relative error {worst:.4f}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
