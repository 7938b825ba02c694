"""Benchmark the compiled SMO solver against the pure-Python fallback.

Both solvers must return bit-identical solutions; this script verifies that
on every problem while timing them, so it doubles as a parity smoke check.

    python3 benchmarks/bench_smo.py --sizes 200 500 1000 2000 --repeats 3
"""

import argparse
import time

import numpy as np

from sasvfuse.backends import _smo_py

try:
    from sasvfuse.backends import _smo as _smo_ext
except ImportError:
    _smo_ext = None


def build_problem(rng, n, degree=3, gamma=0.25):
    features = rng.normal(0.0, 1.0, (n, 2))
    labels = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    if labels.min() == labels.max():
        labels[0] = -labels[0]
    gram = (gamma * (features @ features.T) + 1.0) ** degree
    q_matrix = np.ascontiguousarray(gram * np.outer(labels, labels))
    return q_matrix, np.ascontiguousarray(labels)


def time_solver(solver, q_matrix, labels, box, repeats):
    best = np.inf
    result = None
    for _ in range(repeats):
        started = time.perf_counter()
        result = solver(q_matrix, labels, box, 1e-3, 10_000_000)
        best = min(best, time.perf_counter() - started)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000, 2000])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--box", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _smo_ext is None:
        print("compiled solver unavailable; timing the python fallback only")
    rng = np.random.default_rng(args.seed)
    header = f"{'n':>6}  {'iters':>8}  {'python (s)':>11}  {'compiled (s)':>13}  {'speedup':>8}  parity"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        q_matrix, labels = build_problem(rng, n)
        py_time, py_out = time_solver(
            _smo_py.smo_solve, q_matrix, labels, args.box, args.repeats
        )
        if _smo_ext is None:
            print(f"{n:>6}  {py_out[2]:>8}  {py_time:>11.4f}  {'-':>13}  {'-':>8}  -")
            continue
        ext_time, ext_out = time_solver(
            _smo_ext.smo_solve, q_matrix, labels, args.box, args.repeats
        )
        same = (
            np.array_equal(np.asarray(py_out[0]), np.asarray(ext_out[0]))
            and np.array_equal(np.asarray(py_out[1]), np.asarray(ext_out[1]))
            and py_out[2:] == ext_out[2:]
        )
        print(
            f"{n:>6}  {ext_out[2]:>8}  {py_time:>11.4f}  {ext_time:>13.4f}  "
            f"{py_time / ext_time:>7.1f}x  {'bit-exact' if same else 'MISMATCH'}"
        )
        if not same:
            raise SystemExit("solver outputs diverged; investigate before trusting timings")


if __name__ == "__main__":
    main()
