"""Compare the compiled and interpreted kernel backends.

The backend is chosen when :mod:`adecount` is first imported, so each
measurement runs in a child process with ``ADECOUNT_BACKEND`` set.  Both
backends must produce identical counts; the script exits nonzero on any
mismatch and otherwise prints a timing table with speedups.

Run from the repository root:

    python3 benchmarks/compare_backends.py
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    from adecount.exactmath import field_from_q
    from adecount.jordan import count_nilpotents
    from adecount.quiverlab import count_bistable, count_filtered_bistable
    from adecount.rootdata import dynkin_graph, weight_from_dims

    a1 = dynkin_graph("A", 1)
    a2 = dynkin_graph("A", 2)
    cube = weight_from_dims(a1, (3,), (1,))
    std = weight_from_dims(a1, (1,), (0,))
    pair = weight_from_dims(a2, (1, 1), (1, 1))
    return [
        (
            "census scan, 3x3 over F_3",
            lambda: count_nilpotents(field_from_q(3), (2, 1), method="census"),
        ),
        (
            "commutant scan, type (2,1) over F_7",
            lambda: count_nilpotents(field_from_q(7), (2, 1), method="centralizer"),
        ),
        (
            "bistable structures, A_2 pair weight over F_8",
            lambda: count_bistable(pair, 8),
        ),
        (
            "filtered bistable, cube weight over F_5",
            lambda: count_filtered_bistable(cube, [std, std, std], 5),
        ),
    ]


def run_worker():
    from adecount import _kernels

    results = {"backend": _kernels.BACKEND, "workloads": []}
    if _kernels.BACKEND == "numba":
        _kernels.warm_up()
    for name, job in workloads():
        start = time.perf_counter()
        value = job()
        results["workloads"].append(
            {
                "name": name,
                "seconds": time.perf_counter() - start,
                "value": int(value),
            }
        )
    json.dump(results, sys.stdout)
    return 0


def run_backend(backend):
    env = dict(os.environ, ADECOUNT_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker"],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit("worker for backend %r failed" % backend)
    data = json.loads(proc.stdout)
    if data["backend"] != backend:
        raise SystemExit(
            "asked for backend %r but the worker used %r"
            % (backend, data["backend"])
        )
    return data


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)
    if args.worker:
        return run_worker()

    numba = run_backend("numba")
    numpy = run_backend("numpy")
    width = max(len(w["name"]) for w in numba["workloads"])
    print("%-*s  %10s  %10s  %8s" % (width, "workload", "numba", "numpy", "speedup"))
    ok = True
    for fast, slow in zip(numba["workloads"], numpy["workloads"]):
        assert fast["name"] == slow["name"]
        if fast["value"] != slow["value"]:
            ok = False
            print(
                "%-*s  VALUES DISAGREE: %d vs %d"
                % (width, fast["name"], fast["value"], slow["value"])
            )
            continue
        ratio = slow["seconds"] / fast["seconds"] if fast["seconds"] > 0 else 0.0
        print(
            "%-*s  %9.3fs  %9.3fs  %7.1fx"
            % (width, fast["name"], fast["seconds"], slow["seconds"], ratio)
        )
    if not ok:
        print("backend mismatch: the interpreted and compiled kernels disagree")
        return 1
    print("all workload values identical across backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
