"""Nilpotent operators over finite fields and their invariant flags.

A nilpotent operator on F_q^n is classified up to conjugation by the
partition of its Jordan block sizes, called its type here.  This module
computes types, counts the operators of a given type (two independent
ways), counts chains of invariant subspaces whose successive quotients
have prescribed types, and fits the resulting counting polynomials.

Operators act on row vectors from the right: ``w -> w @ T``.  Subspaces
are passed around as reduced-echelon row bases, the canonical form
produced by :func:`adecount.exactmath.enumerate_subspaces`.
"""

import numpy as np

from . import _kernels
from .exactmath import (
    FiniteField,
    QPoly,
    field_from_q,
    gl_order,
    lagrange_fit,
    subspace_stack,
    supported_q,
)
from .rootdata import Partition, flag_dim, nilpotent_orbit_dim

_CENSUS_CACHE: dict = {}

# Odometer scans beyond this many combinations are refused; callers that
# need larger fields should stick to types with small commutants.
SCAN_LIMIT = 10**7


def _pivot_array(basis: np.ndarray) -> np.ndarray:
    """First nonzero column of each row of a reduced-echelon basis."""
    k, n = basis.shape
    piv = np.empty(k, np.int64)
    for r in range(k):
        for j in range(n):
            if basis[r, j] != 0:
                piv[r] = j
                break
        else:
            raise ValueError("zero row in a subspace basis")
    return piv


def module_type(field: FiniteField, mat: np.ndarray) -> Partition:
    """Type of a nilpotent matrix: the rank drops of successive powers.

    Part i is rank(T^(i-1)) - rank(T^i).  The zero matrix on n dimensions
    has type (n); a single length-n chain has type (1, ..., 1).  Block
    sizes of the Jordan form give the conjugate of this partition.
    """
    mat = np.ascontiguousarray(mat, np.int64)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("matrix must be square, got %r" % (mat.shape,))
    add, mul, neg, inv = field.tables
    ranks = [n]
    pw = mat.copy()
    for _ in range(n):
        r = _kernels.mat_rank(pw, add, mul, neg, inv)
        ranks.append(int(r))
        if r == 0:
            break
        pw = _kernels.matmul(pw, mat, add, mul)
    if ranks[-1] != 0:
        raise ValueError("matrix is not nilpotent")
    return Partition(ranks[i - 1] - ranks[i] for i in range(1, len(ranks)))


def rep_of_type(field: FiniteField, lam) -> np.ndarray:
    """A standard nilpotent of the given type.

    The Jordan block sizes are the parts of the conjugate partition.
    """
    lam = Partition(lam)
    n = lam.size
    mat = np.zeros((n, n), np.int64)
    offset = 0
    for part in lam.conjugate().parts:
        for i in range(part - 1):
            mat[offset + i, offset + i + 1] = 1
        offset += part
    return mat


class NilpotentRep:
    """A nilpotent matrix together with its field and cached type."""

    def __init__(self, field: FiniteField, mat: np.ndarray):
        self.field = field
        self.mat = np.ascontiguousarray(mat, np.int64)
        self.n = self.mat.shape[0]
        if np.any(self.mat < 0) or np.any(self.mat >= field.q):
            raise ValueError("matrix entries must be encoded field elements")
        self.type = module_type(field, self.mat)

    def is_invariant(self, basis: np.ndarray) -> bool:
        """Whether the row space of ``basis`` is carried into itself."""
        add, mul, neg, inv = self.field.tables
        piv = _pivot_array(basis)
        img = _kernels.matmul(basis, self.mat, add, mul)
        return bool(
            _kernels.rows_in_span(img, basis, piv, basis.shape[0], add, mul, neg)
        )

    def restrict(self, basis: np.ndarray) -> "NilpotentRep":
        """The operator induced on an invariant subspace, in basis coordinates.

        A vector in the row space of a reduced-echelon basis has its
        coordinates sitting at the pivot columns, so restriction is a
        product followed by a column gather.
        """
        add, mul, neg, inv = self.field.tables
        piv = _pivot_array(basis)
        img = _kernels.matmul(basis, self.mat, add, mul)
        return NilpotentRep(self.field, img[:, piv])

    def quotient(self, basis: np.ndarray) -> "NilpotentRep":
        """The operator induced on the quotient by an invariant subspace.

        Coordinates on the quotient are the non-pivot positions left
        after reducing modulo the subspace basis.
        """
        add, mul, neg, inv = self.field.tables
        k = basis.shape[0]
        piv = _pivot_array(basis)
        pivset = set(int(p) for p in piv)
        nonpiv = [j for j in range(self.n) if j not in pivset]
        rows = self.mat[nonpiv, :].copy()
        _kernels.reduce_rows_ip(rows, basis, piv, k, add, mul, neg)
        return NilpotentRep(self.field, rows[:, nonpiv])


def _census(field: FiniteField, n: int) -> dict:
    """Counts of nilpotents by type from a full matrix scan (small n only)."""
    key = (field.q, n)
    if key in _CENSUS_CACHE:
        return _CENSUS_CACHE[key]
    q = field.q
    if q ** (n * n) > SCAN_LIMIT:
        raise ValueError("census scan of q^(n^2) = %d matrices is too large" % q ** (n * n))
    add, mul, neg, inv = field.tables
    counts = _kernels.nilpotent_type_census(n, q, add, mul, neg, inv)
    out = {}
    total = 0
    for lam in Partition.all_of(n):
        # rank(T^i) = n minus the sum of the first i rank drops.
        parts = list(lam.parts) + [0] * n
        code = 0
        mult = 1
        csum = 0
        for i in range(1, n):
            csum += parts[i - 1]
            code += (n - csum) * mult
            mult *= n + 1
        out[lam] = int(counts[code])
        total += out[lam]
    # Classical check: nilpotent n-by-n matrices over F_q number q^(n^2 - n).
    assert total == q ** (n * n - n), (total, q, n)
    _CENSUS_CACHE[key] = out
    return out


def commutant_basis(field: FiniteField, mat: np.ndarray) -> np.ndarray:
    """Basis of the matrices commuting with ``mat``, shape (k, n, n)."""
    mat = np.ascontiguousarray(mat, np.int64)
    n = mat.shape[0]
    add, mul, neg, inv = field.tables
    # Linear system on the n^2 unknowns A[a, b]: (A @ mat - mat @ A) = 0.
    sys = np.zeros((n * n, n * n), np.int64)
    for i in range(n):
        for j in range(n):
            row = i * n + j
            for b in range(n):
                col = i * n + b
                sys[row, col] = add[sys[row, col], mat[b, j]]
            for a in range(n):
                col = a * n + j
                sys[row, col] = add[sys[row, col], neg[mat[i, a]]]
    ker = _kernels.nullspace(sys, add, mul, neg, inv)
    return ker.reshape(ker.shape[0], n, n)


def count_nilpotents(field: FiniteField, lam, method: str = "centralizer") -> int:
    """Number of nilpotent matrices of the given type over the field.

    ``centralizer`` divides the group order by a brute-force count of
    invertible elements in the commutant of a standard representative;
    ``census`` reads the answer off a full matrix scan.  The two are
    independent and cross-checked in the tests.
    """
    lam = Partition(lam)
    n = lam.size
    q = field.q
    if method == "census":
        return _census(field, n).get(lam, 0)
    if method != "centralizer":
        raise ValueError("unknown method %r" % (method,))
    if n == 0:
        return 1
    if lam.parts == (n,):
        # Type (n) is the zero matrix: alone in its class, commutes with all.
        return 1
    basis = commutant_basis(field, rep_of_type(field, lam))
    k = basis.shape[0]
    if q**k > SCAN_LIMIT:
        raise ValueError("commutant scan of q^%d combinations is too large" % k)
    add, mul, neg, inv = field.tables
    z = int(_kernels.count_invertible_in_span(np.ascontiguousarray(basis), q, add, mul, neg, inv))
    order = gl_order(n, q)
    assert order % z == 0
    return order // z


def invariant_subspaces(rep: NilpotentRep, m: int):
    """Yield the reduced-echelon bases of all invariant m-subspaces."""
    if m < 0 or m > rep.n:
        raise ValueError("subspace dimension %d is out of range" % m)
    for basis in subspace_stack(rep.field, rep.n, m):
        if rep.is_invariant(basis):
            yield basis


def count_invariant_flags(rep: NilpotentRep, mus) -> int:
    """Chains 0 <= F_1 <= ... <= F_s = V of invariant subspaces.

    ``mus[a]`` prescribes the type induced on the quotient F_(a+1)/F_a,
    ordered from the bottom of the chain upward.  Recurses from the top:
    pick the next-to-last step, match the quotient type, restrict.
    """
    mus = [Partition(m) for m in mus]
    if sum(m.size for m in mus) != rep.n:
        raise ValueError(
            "step sizes add to %d but the space has dimension %d"
            % (sum(m.size for m in mus), rep.n)
        )
    if not mus:
        return 1
    if len(mus) == 1:
        return 1 if rep.type == mus[0] else 0
    top = mus[-1]
    k = rep.n - top.size
    total = 0
    for basis in subspace_stack(rep.field, rep.n, k):
        if not rep.is_invariant(basis):
            continue
        if rep.quotient(basis).type != top:
            continue
        total += count_invariant_flags(rep.restrict(basis), mus[:-1])
    return total


def count_filtered_nilpotents(field: FiniteField, lam, mus) -> int:
    """Pairs (nilpotent of type lam, invariant flag with quotient types mus).

    Conjugation moves any such pair onto the standard representative, so
    the count factors as the class size times the flag count for that
    one representative.  The direct scan below is the regression check.
    """
    lam = Partition(lam)
    mus = [Partition(m) for m in mus]
    if sum(m.size for m in mus) != lam.size:
        raise ValueError("flag step sizes must add up to the type size")
    orbit = count_nilpotents(field, lam)
    flags = count_invariant_flags(NilpotentRep(field, rep_of_type(field, lam)), mus)
    return orbit * flags


def count_filtered_direct(field: FiniteField, lam, mus) -> int:
    """Same count as :func:`count_filtered_nilpotents`, by full matrix scan."""
    lam = Partition(lam)
    mus = [Partition(m) for m in mus]
    n = lam.size
    q = field.q
    if q ** (n * n) > SCAN_LIMIT:
        raise ValueError("direct scan of q^(n^2) matrices is too large")
    add, mul, neg, inv = field.tables
    total = 0
    digits = np.zeros(n * n, np.int64)
    while True:
        mat = digits.reshape(n, n)
        pw = mat.copy()
        for _ in range(n - 1):
            pw = _kernels.matmul(pw, mat, add, mul)
        if not pw.any() and module_type(field, mat) == lam:
            total += count_invariant_flags(NilpotentRep(field, mat.copy()), mus)
        t = 0
        while t < n * n and digits[t] == q - 1:
            digits[t] = 0
            t += 1
        if t == n * n:
            break
        digits[t] += 1
    return total


def _fit_counts(counter, degree_bound: int, tag: str) -> QPoly:
    """Fit an integer-valued polynomial to counts sampled along small q.

    Samples ``degree_bound + 1`` supported field sizes, fits exactly,
    then demands agreement on two further held-out sizes.
    """
    qs = supported_q()
    need = degree_bound + 3
    if len(qs) < need:
        raise ValueError("not enough supported field sizes for degree %d" % degree_bound)
    qs = qs[:need]
    values = [(q, counter(q)) for q in qs]
    poly = lagrange_fit(values[: degree_bound + 1])
    for q, v in values[degree_bound + 1 :]:
        got = poly(q)
        if got != v:
            raise AssertionError(
                "%s: fit predicts %s at q=%d but the count is %d" % (tag, got, q, v)
            )
    assert poly.is_integral(), "%s: fitted coefficients are not integers" % tag
    return poly


def orbit_count_polynomial(lam) -> QPoly:
    """Polynomial in q counting nilpotents of the given type."""
    lam = Partition(lam)
    bound = nilpotent_orbit_dim(lam)
    return _fit_counts(
        lambda q: count_nilpotents(field_from_q(q), lam), bound, "orbit count %r" % (lam,)
    )


def filtered_count_polynomial(lam, mus) -> QPoly:
    """Polynomial in q counting (nilpotent, invariant flag) pairs."""
    lam = Partition(lam)
    mus = [Partition(m) for m in mus]
    half = nilpotent_orbit_dim(lam) + sum(nilpotent_orbit_dim(m) for m in mus)
    assert half % 2 == 0
    bound = flag_dim([m.size for m in mus]) + half // 2
    return _fit_counts(
        lambda q: count_filtered_nilpotents(field_from_q(q), lam, mus),
        bound,
        "filtered count %r | %r" % (lam, mus),
    )


def hall_polynomial(lam, mus) -> QPoly:
    """Flags per single module: the filtered count divided by the class size."""
    num = filtered_count_polynomial(lam, mus)
    den = orbit_count_polynomial(lam)
    out = num.exact_div(den)
    assert out.is_integral()
    return out
