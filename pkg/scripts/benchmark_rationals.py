"""Benchmark the gmpy2 rational backend against the stdlib Fraction.

beltrami.exactpoly picks gmpy2's mpq at import time and falls back to
fractions.Fraction when gmpy2 is missing.  This script times a few
representative exact workloads under both backends and prints a table.

The Fraction timings come from a child interpreter that installs an
import hook blocking gmpy2, so each backend is measured in a process
that never touched the other one.

Usage:

    python3 scripts/benchmark_rationals.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

BLOCK_ENV = "BELTRAMI_BLOCK_GMPY2"


class _BlockGmpy2:
    """Meta-path finder that makes `import gmpy2` fail."""

    def find_spec(self, name, path=None, target=None):
        if name == "gmpy2" or name.startswith("gmpy2."):
            raise ImportError("gmpy2 blocked for benchmarking")
        return None


def workloads():
    from beltrami.atlas import eigenspace_solve, explicit_basis
    from beltrami.exactpoly import Poly4, Rat, canonicalize, integrate_poly
    from beltrami.frames import curl

    def atlas_exactness():
        for mu in (5, -5):
            entry = explicit_basis(mu)
            for f in entry.fields:
                assert curl(f) == f.scale(mu)

    def atlas_gram():
        entry = explicit_basis(4)
        for i, f in enumerate(entry.fields):
            for g in entry.fields[: i + 1]:
                f.l2_inner(g)

    def solver_dmax2():
        eigenspace_solve(2)

    def degree_twelve_integral():
        x = [Poly4.variable(i) for i in range(1, 5)]
        p = canonicalize(
            (x[0] * x[1] - x[2] * x[3] + Poly4.const(Rat(1, 7))) ** 6)
        integrate_poly(p * p)

    return [
        ("atlas exactness (|mu| = 5)", atlas_exactness),
        ("atlas Gram matrix (mu = 4)", atlas_gram),
        ("eigenspace solve (dmax = 2)", solver_dmax2),
        ("degree-12 sphere integral", degree_twelve_integral),
    ]


def run_backend(repeat: int) -> dict:
    if os.environ.get(BLOCK_ENV):
        sys.meta_path.insert(0, _BlockGmpy2())
    from beltrami import exactpoly

    timings = {}
    for name, work in workloads():
        best = min(_timed(work) for _ in range(repeat))
        timings[name] = best
    return {"backend": exactpoly.RATIONAL_BACKEND, "timings": timings}


def _timed(work) -> float:
    start = time.perf_counter()
    work()
    return time.perf_counter() - start


def run_child(repeat: int) -> dict:
    env = dict(os.environ, **{BLOCK_ENV: "1"})
    output = subprocess.run(
        [sys.executable, os.path.abspath(__file__),
         "--repeat", str(repeat), "--emit-json"],
        env=env, check=True, capture_output=True, text=True).stdout
    return json.loads(output)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions per workload; best time is kept")
    parser.add_argument("--emit-json", action="store_true",
                        help="print raw timings as JSON (used internally)")
    args = parser.parse_args(argv)

    result = run_backend(args.repeat)
    if args.emit_json:
        json.dump(result, sys.stdout)
        return 0

    if result["backend"] != "gmpy2":
        print("gmpy2 is not installed; only the Fraction backend "
              "is available.")
        backends = [result]
    else:
        backends = [result, run_child(args.repeat)]

    width = max(len(name) for name, _ in workloads())
    header = f"{'workload':<{width}}" + "".join(
        f"  {b['backend']:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, _ in workloads():
        row = f"{name:<{width}}"
        for b in backends:
            row += f"  {b['timings'][name]:>11.3f}s"
        if len(backends) == 2:
            ratio = backends[1]["timings"][name] / backends[0]["timings"][name]
            row += f"  {ratio:>7.2f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
