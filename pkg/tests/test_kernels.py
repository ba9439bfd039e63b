"""Backend selection and the low-level field-matrix kernels."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from adecount import _kernels
from adecount.exactmath import field_from_q
from adecount.jordan import count_nilpotents
from adecount.quiverlab import count_bistable
from adecount.rootdata import dynkin_graph, weight_from_dims


def test_selected_backend_is_exported():
    assert _kernels.BACKEND in ("numba", "numpy")


def test_select_backend_rejects_garbage(monkeypatch):
    monkeypatch.setenv("ADECOUNT_BACKEND", "fortran")
    with pytest.raises(ValueError):
        _kernels._select_backend()


def test_select_backend_honors_numpy(monkeypatch):
    monkeypatch.setenv("ADECOUNT_BACKEND", "numpy")
    assert _kernels._select_backend() == "numpy"


def _tables(q):
    return field_from_q(q).tables


def test_rank_sees_dependent_row_over_f4():
    add, mul, neg, inv = _tables(4)
    m = np.array([[1, 2, 0], [0, 1, 3], [1, 2, 0]], np.int64)
    assert _kernels.mat_rank(m, add, mul, neg, inv) == 2


def test_nullspace_vectors_lie_in_kernel():
    add, mul, neg, inv = _tables(5)
    m = np.array([[1, 2, 3], [0, 1, 4]], np.int64)
    ns = _kernels.nullspace(m, add, mul, neg, inv)
    assert ns.shape == (1, 3)
    prod = _kernels.matmul(m, np.ascontiguousarray(ns.T), add, mul)
    assert not prod.any()


def test_solve_right_consistent_and_inconsistent():
    add, mul, neg, inv = _tables(3)
    a = np.array([[1, 1], [0, 0]], np.int64)
    good = np.array([[2], [0]], np.int64)
    ok, x = _kernels.solve_right(a, good, add, mul, neg, inv)
    assert ok
    assert (_kernels.matmul(a, x, add, mul) == good).all()
    bad = np.array([[0], [1]], np.int64)
    ok, _ = _kernels.solve_right(a, bad, add, mul, neg, inv)
    assert not ok


def test_numpy_fallback_counts_match():
    script = (
        "import json; "
        "from adecount import _kernels; "
        "from adecount.exactmath import field_from_q; "
        "from adecount.jordan import count_nilpotents; "
        "from adecount.quiverlab import count_bistable; "
        "from adecount.rootdata import dynkin_graph, weight_from_dims; "
        "g = dynkin_graph('A', 1); "
        "print(json.dumps(["
        "_kernels.BACKEND, "
        "count_nilpotents(field_from_q(3), (1, 1), method='census'), "
        "count_bistable(weight_from_dims(g, (2,), (1,)), 4)]))"
    )
    env = dict(os.environ, ADECOUNT_BACKEND="numpy")
    proc = subprocess.run(
        [sys.executable, "-c", script], env=env, capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    backend, census, bistable = json.loads(proc.stdout)
    assert backend == "numpy"
    assert census == count_nilpotents(field_from_q(3), (1, 1), method="census")
    a1 = dynkin_graph("A", 1)
    assert bistable == count_bistable(weight_from_dims(a1, (2,), (1,)), 4)
