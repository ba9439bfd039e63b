"""Low-level matrix kernels over small finite fields.

Every kernel works on ``int64`` numpy arrays whose entries encode field
elements as integers in ``[0, q)``.  Arithmetic goes through lookup
tables built by :class:`adecount.exactmath.FiniteField` (``add``,
``mul``: shape ``(q, q)``; ``neg``, ``inv``: shape ``(q,)``), so prime
and prime-power fields share one code path and nothing here ever
touches floating point.

The kernels are compiled with ``numba.njit`` when available.  Setting
``ADECOUNT_BACKEND=numpy`` (or running without numba installed) selects
the interpreted fallback, which executes the identical source.  The
active choice is exported as :data:`BACKEND`.
"""

import os

import numpy as np


def _select_backend() -> str:
    choice = os.environ.get("ADECOUNT_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            "ADECOUNT_BACKEND must be 'numba' or 'numpy', got %r" % choice
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _select_backend()

if BACKEND == "numba":
    from numba import njit as _numba_njit

    def _jit(fn):
        return _numba_njit(cache=True)(fn)

else:

    def _jit(fn):
        return fn


@_jit
def rref_ip(m, piv, add, mul, neg, inv):
    """Row reduce ``m`` in place; returns the rank.

    ``piv[r]`` receives the pivot column of row ``r`` for ``r < rank``.
    """
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pr = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                t = m[r, j]
                m[r, j] = m[pr, j]
                m[pr, j] = t
        s = inv[m[r, c]]
        if s != 1:
            for j in range(c, cols):
                m[r, j] = mul[m[r, j], s]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                f = m[i, c]
                for j in range(c, cols):
                    if m[r, j] != 0:
                        m[i, j] = add[m[i, j], neg[mul[f, m[r, j]]]]
        piv[r] = c
        r += 1
    return r


@_jit
def mat_rank(m, add, mul, neg, inv):
    a = m.copy()
    piv = np.empty(a.shape[0], np.int64)
    return rref_ip(a, piv, add, mul, neg, inv)


@_jit
def matmul(a, b, add, mul):
    """Product of two field matrices (plain triple loop, table lookups)."""
    n, k = a.shape
    mcols = b.shape[1]
    out = np.zeros((n, mcols), np.int64)
    for i in range(n):
        for t in range(k):
            v = a[i, t]
            if v != 0:
                for j in range(mcols):
                    w = b[t, j]
                    if w != 0:
                        out[i, j] = add[out[i, j], mul[v, w]]
    return out


@_jit
def mat_add(a, b, add):
    rows, cols = a.shape
    out = np.empty((rows, cols), np.int64)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = add[a[i, j], b[i, j]]
    return out


@_jit
def mat_neg(a, neg):
    rows, cols = a.shape
    out = np.empty((rows, cols), np.int64)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = neg[a[i, j]]
    return out


@_jit
def nullspace(m, add, mul, neg, inv):
    """Row basis of the right null space ``{v : m @ v = 0}``.

    Rows are independent but not in reduced echelon form; re-reduce when
    a canonical basis is needed.
    """
    rows, cols = m.shape
    a = m.copy()
    piv = np.empty(rows, np.int64)
    rank = rref_ip(a, piv, add, mul, neg, inv)
    free = cols - rank
    out = np.zeros((free, cols), np.int64)
    ispiv = np.zeros(cols, np.int64)
    for r in range(rank):
        ispiv[piv[r]] = 1
    idx = 0
    for j in range(cols):
        if ispiv[j] == 0:
            out[idx, j] = 1
            for r in range(rank):
                out[idx, piv[r]] = neg[a[r, j]]
            idx += 1
    return out


@_jit
def reduce_rows_ip(rows, basis, piv, nb, add, mul, neg):
    """Reduce each row of ``rows`` modulo the reduced row space ``basis[:nb]``."""
    n = rows.shape[0]
    cols = rows.shape[1]
    for i in range(n):
        for r in range(nb):
            c = piv[r]
            f = rows[i, c]
            if f != 0:
                for j in range(c, cols):
                    if basis[r, j] != 0:
                        rows[i, j] = add[rows[i, j], neg[mul[f, basis[r, j]]]]


@_jit
def rows_in_span(rows, basis, piv, nb, add, mul, neg):
    red = rows.copy()
    reduce_rows_ip(red, basis, piv, nb, add, mul, neg)
    for i in range(red.shape[0]):
        for j in range(red.shape[1]):
            if red[i, j] != 0:
                return False
    return True


@_jit
def solve_right(a, b, add, mul, neg, inv):
    """One solution ``x`` of ``a @ x = b`` with free variables set to zero.

    Returns ``(ok, x)``; ``ok`` is False when the system is inconsistent.
    """
    m, n = a.shape
    k = b.shape[1]
    aug = np.zeros((m, n + k), np.int64)
    for i in range(m):
        for j in range(n):
            aug[i, j] = a[i, j]
        for j in range(k):
            aug[i, n + j] = b[i, j]
    piv = np.empty(m, np.int64)
    rank = rref_ip(aug, piv, add, mul, neg, inv)
    x = np.zeros((n, k), np.int64)
    for r in range(rank):
        if piv[r] >= n:
            return False, x
        for j in range(k):
            x[piv[r], j] = aug[r, n + j]
    return True, x


@_jit
def count_invertible_in_span(basis, q, add, mul, neg, inv):
    """Number of invertible matrices in the span of ``basis``.

    ``basis`` has shape ``(k, n, n)``; all ``q**k`` coefficient combinations
    are scanned with an odometer.  The caller guards the job size.
    """
    k = basis.shape[0]
    n = basis.shape[1]
    total = 1
    for _ in range(k):
        total *= q
    digits = np.zeros(k, np.int64)
    m = np.zeros((n, n), np.int64)
    scratch = np.empty((n, n), np.int64)
    piv = np.empty(n, np.int64)
    cnt = 0
    for _ in range(total):
        for i in range(n):
            for j in range(n):
                s = 0
                for t in range(k):
                    d = digits[t]
                    if d != 0 and basis[t, i, j] != 0:
                        s = add[s, mul[d, basis[t, i, j]]]
                m[i, j] = s
        for i in range(n):
            for j in range(n):
                scratch[i, j] = m[i, j]
        if rref_ip(scratch, piv, add, mul, neg, inv) == n:
            cnt += 1
        t = 0
        while t < k:
            digits[t] += 1
            if digits[t] < q:
                break
            digits[t] = 0
            t += 1
    return cnt


@_jit
def nilpotent_type_census(n, q, add, mul, neg, inv):
    """Scan all n-by-n matrices, bucketing nilpotent ones by power ranks.

    Returns an int64 array ``counts`` where the bucket of a nilpotent T is
    ``sum(rank(T^i) * (n+1)**(i-1) for i in 1..n-1)``.  Non-nilpotent
    matrices are skipped.  Cost is ``q**(n*n)`` rank computations, so this
    is only for small n and q.
    """
    total = 1
    for _ in range(n * n):
        total *= q
    base = n + 1
    ncodes = 1
    for _ in range(n - 1):
        ncodes *= base
    counts = np.zeros(ncodes, np.int64)
    digits = np.zeros(n * n, np.int64)
    mat = np.zeros((n, n), np.int64)
    for _ in range(total):
        idx = 0
        for i in range(n):
            for j in range(n):
                mat[i, j] = digits[idx]
                idx += 1
        code = 0
        mult = 1
        pw = mat.copy()
        for _ in range(1, n):
            r = mat_rank(pw, add, mul, neg, inv)
            code += r * mult
            mult *= base
            pw = matmul(pw, mat, add, mul)
        nilpotent = True
        for i in range(n):
            for j in range(n):
                if pw[i, j] != 0:
                    nilpotent = False
        if nilpotent:
            counts[code] += 1
        t = 0
        while t < n * n:
            digits[t] += 1
            if digits[t] < q:
                break
            digits[t] = 0
            t += 1
    return counts


def warm_up():
    """Trigger compilation of every kernel on tiny inputs."""
    add = np.array([[0, 1], [1, 0]], np.int64)
    mul = np.array([[0, 0], [0, 1]], np.int64)
    neg = np.array([0, 1], np.int64)
    inv = np.array([0, 1], np.int64)
    m = np.array([[1, 0], [1, 1]], np.int64)
    piv = np.empty(2, np.int64)
    rref_ip(m.copy(), piv, add, mul, neg, inv)
    mat_rank(m, add, mul, neg, inv)
    matmul(m, m, add, mul)
    mat_add(m, m, add)
    mat_neg(m, neg)
    ns = nullspace(m, add, mul, neg, inv)
    reduce_rows_ip(m.copy(), m, piv, 0, add, mul, neg)
    rows_in_span(ns, m, piv, 0, add, mul, neg)
    solve_right(m, m, add, mul, neg, inv)
    count_invertible_in_span(m.reshape(1, 2, 2)[:0], 2, add, mul, neg, inv)
    nilpotent_type_census(1, 2, add, mul, neg, inv)
