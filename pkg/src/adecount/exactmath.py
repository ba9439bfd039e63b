"""Exact linear algebra over small finite fields and rational polynomials.

Field elements are integers in ``[0, q)``: the base-p digits of such an
integer are the coefficients of a polynomial over F_p in the generator
of the extension.  All arithmetic is mediated by lookup tables, which
also feed the compiled kernels in :mod:`adecount._kernels`.

The polynomial side (:class:`QPoly`, :func:`lagrange_fit`) works over
``fractions.Fraction`` so interpolation and division are exact.
"""

from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import _kernels as K


class NonPrime(ValueError):
    """Raised when a field characteristic is not prime."""


class UnsupportedField(ValueError):
    """Raised for field sizes outside the supported table."""


#: Normative moduli for the supported extension fields, as coefficient
#: lists low degree first.  F_4 uses x^2+x+1, F_8 uses x^3+x+1,
#: F_9 uses x^2+1, F_16 uses x^4+x+1, F_25 uses x^2+3, F_27 uses x^3+2x+1.
MODULUS_TABLE = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (1, 0, 1),
    16: (1, 1, 0, 0, 1),
    25: (3, 0, 1),
    27: (1, 2, 0, 1),
}

SIZE_BOUND = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_divmod_p(num, den, p):
    """Divide coefficient lists over F_p; both low degree first."""
    num = list(num)
    dl = len(den) - 1
    while den[-1] == 0:
        den = den[:-1]
        dl -= 1
    lead_inv = pow(den[-1], p - 2, p) if den[-1] != 1 else 1
    quot = [0] * max(len(num) - dl, 0)
    for i in range(len(num) - 1, dl - 1, -1):
        c = num[i] % p
        if c == 0:
            continue
        f = (c * lead_inv) % p
        quot[i - dl] = f
        for j in range(dl + 1):
            num[i - dl + j] = (num[i - dl + j] - f * den[j]) % p
    while num and num[-1] % p == 0:
        num.pop()
    return quot, [c % p for c in num]


def _check_modulus(modulus, p, l):
    if len(modulus) != l + 1 or modulus[-1] != 1:
        raise UnsupportedField("modulus must be monic of degree %d" % l)
    if any(c % p != c for c in modulus):
        raise UnsupportedField("modulus coefficients must be reduced mod p")
    # No roots in F_p rules out linear factors; enough for degree 2 and 3.
    for a in range(p):
        acc = 0
        for c in reversed(modulus):
            acc = (acc * a + c) % p
        if acc == 0:
            raise UnsupportedField("modulus has root %d mod %d" % (a, p))
    if l == 4:
        # Also rule out irreducible quadratic factors by trial division.
        for b in range(p):
            for c in range(p):
                _, rem = _poly_divmod_p(modulus, [c, b, 1], p)
                if not rem:
                    raise UnsupportedField("modulus has a quadratic factor")


class FiniteField:
    """F_q with table-driven arithmetic on integer-encoded elements.

    Use :func:`make_field` (which caches instances) instead of calling
    the constructor directly.
    """

    def __init__(self, p: int, l: int, modulus):
        self.p = p
        self.l = l
        self.q = p**l
        self.modulus = tuple(modulus) if modulus is not None else None
        self._build_tables()

    def _digits(self, e):
        out = []
        for _ in range(self.l):
            out.append(e % self.p)
            e //= self.p
        return out

    def _undigits(self, ds):
        e = 0
        for c in reversed(ds):
            e = e * self.p + (c % self.p)
        return e

    def _mul_poly(self, a, b):
        p, l = self.p, self.l
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * l - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        if self.modulus is not None:
            _, prod = _poly_divmod_p(prod, list(self.modulus), p)
        prod += [0] * (l - len(prod))
        return self._undigits(prod[:l])

    def _build_tables(self):
        q, p = self.q, self.p
        add = np.empty((q, q), np.int64)
        mul = np.empty((q, q), np.int64)
        neg = np.empty(q, np.int64)
        inv = np.zeros(q, np.int64)
        for a in range(q):
            da = self._digits(a)
            neg[a] = self._undigits([(-c) % p for c in da])
            for b in range(q):
                db = self._digits(b)
                add[a, b] = self._undigits([(x + y) % p for x, y in zip(da, db)])
                mul[a, b] = self._mul_poly(a, b)
        for a in range(1, q):
            for b in range(1, q):
                if mul[a, b] == 1:
                    inv[a] = b
                    break
            else:
                raise UnsupportedField("element %d has no inverse; modulus reducible" % a)
        for t in (add, mul, neg, inv):
            t.setflags(write=False)
        self.add_table, self.mul_table = add, mul
        self.neg_table, self.inv_table = neg, inv

    @property
    def tables(self):
        return self.add_table, self.mul_table, self.neg_table, self.inv_table

    def elements(self):
        return range(self.q)

    def add(self, a, b):
        return int(self.add_table[a, b])

    def sub(self, a, b):
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def neg(self, a):
        return int(self.neg_table[a])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.q)
        return int(self.inv_table[a])

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.l) == (other.p, other.l)

    def __hash__(self):
        return hash((self.p, self.l))

    def __repr__(self):
        return "FiniteField(q=%d)" % self.q


_FIELD_CACHE: dict = {}


def make_field(p: int, l: int = 1, bound: int = SIZE_BOUND) -> FiniteField:
    """Return F_{p^l}, validating p prime, l >= 1 and p^l <= bound."""
    if not isinstance(p, int) or not isinstance(l, int):
        raise TypeError("p and l must be integers")
    if not is_prime(p):
        raise NonPrime("p=%d is not prime" % p)
    if l < 1:
        raise ValueError("l must be >= 1")
    q = p**l
    if q > bound:
        raise UnsupportedField("q=%d exceeds bound %d" % (q, bound))
    key = (p, l)
    if key in _FIELD_CACHE:
        return _FIELD_CACHE[key]
    if l == 1:
        modulus = None
    else:
        if q not in MODULUS_TABLE:
            raise UnsupportedField("no modulus table entry for q=%d" % q)
        modulus = MODULUS_TABLE[q]
        _check_modulus(modulus, p, l)
    fld = FiniteField(p, l, modulus)
    _FIELD_CACHE[key] = fld
    return fld


def field_from_q(q: int) -> FiniteField:
    """Factor a prime power and return the corresponding field."""
    if not isinstance(q, int) or q < 2:
        raise UnsupportedField("q=%r is not a prime power >= 2" % (q,))
    for p in range(2, q + 1):
        if q % p == 0:
            l = 0
            m = q
            while m % p == 0:
                m //= p
                l += 1
            if m != 1:
                raise UnsupportedField("q=%d is not a prime power" % q)
            return make_field(p, l)
    raise UnsupportedField("q=%d is not a prime power" % q)


def supported_q(limit: int = SIZE_BOUND):
    """Sorted field sizes usable for sampling counts."""
    out = [p for p in range(2, limit + 1) if is_prime(p)]
    out += [q for q in MODULUS_TABLE if q <= limit]
    return sorted(out)


class FMatrix:
    """Immutable matrix over a :class:`FiniteField`.

    Wraps a read-only int64 array; heavy operations delegate to the
    compiled kernels.
    """

    __slots__ = ("field", "array")

    def __init__(self, field: FiniteField, array):
        arr = np.ascontiguousarray(array, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("FMatrix needs a 2-d array")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError("entries must lie in [0, q)")
        arr.setflags(write=False)
        self.field = field
        self.array = arr

    @property
    def rows(self):
        return self.array.shape[0]

    @property
    def cols(self):
        return self.array.shape[1]

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, np.zeros((rows, cols), np.int64))

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64))

    def __matmul__(self, other):
        if self.field != other.field:
            raise ValueError("field mismatch")
        return FMatrix(self.field, K.matmul(self.array, other.array, self.field.add_table, self.field.mul_table))

    def __add__(self, other):
        if self.field != other.field:
            raise ValueError("field mismatch")
        return FMatrix(self.field, K.mat_add(self.array, other.array, self.field.add_table))

    def __sub__(self, other):
        return self + FMatrix(other.field, K.mat_neg(other.array, other.field.neg_table))

    def __neg__(self):
        return FMatrix(self.field, K.mat_neg(self.array, self.field.neg_table))

    def transpose(self):
        return FMatrix(self.field, self.array.T.copy())

    def is_zero(self):
        return not self.array.any()

    def rank(self):
        f = self.field
        return int(K.mat_rank(self.array, *f.tables))

    def __eq__(self, other):
        return (
            isinstance(other, FMatrix)
            and self.field == other.field
            and self.array.shape == other.array.shape
            and bool((self.array == other.array).all())
        )

    def __repr__(self):
        return "FMatrix(q=%d, %r)" % (self.field.q, self.array.tolist())


def rref(m: FMatrix):
    """Reduced row echelon form; returns ``(R, pivots, rank)``."""
    a = m.array.copy()
    piv = np.empty(a.shape[0], np.int64)
    rank = int(K.rref_ip(a, piv, *m.field.tables))
    return FMatrix(m.field, a), tuple(int(c) for c in piv[:rank]), rank


def kernel_basis(m: FMatrix) -> FMatrix:
    """Matrix whose columns are a basis of ``{v : m @ v = 0}``."""
    rows = K.nullspace(m.array, *m.field.tables)
    return FMatrix(m.field, rows.T.copy())


def gl_order(n: int, q: int) -> int:
    """Order of GL_n(F_q) as an exact integer."""
    if n < 0:
        raise ValueError("n must be >= 0")
    qn = q**n
    out = 1
    for i in range(n):
        out *= qn - q**i
    return out


def gauss_binomial(n: int, m: int, q: int) -> int:
    """Number of m-dimensional subspaces of F_q^n."""
    if m < 0 or m > n:
        return 0
    num = 1
    den = 1
    for i in range(m):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def enumerate_subspaces(field: FiniteField, n: int, m: int):
    """Yield each m-dimensional subspace of F_q^n once.

    Subspaces are produced as their unique reduced-echelon row basis,
    an ``(m, n)`` int64 array.
    """
    if m < 0 or m > n:
        return
    q = field.q
    for pivots in combinations(range(n), m):
        free = [
            (r, j)
            for r in range(m)
            for j in range(pivots[r] + 1, n)
            if j not in pivots
        ]
        base = np.zeros((m, n), np.int64)
        for r, c in enumerate(pivots):
            base[r, c] = 1
        if not free:
            yield base.copy()
            continue
        for vals in product(range(q), repeat=len(free)):
            mat = base.copy()
            for (r, j), v in zip(free, vals):
                mat[r, j] = v
            yield mat


_SUBSPACE_CACHE: dict = {}


def subspace_stack(field: FiniteField, n: int, m: int):
    """All m-subspaces of F_q^n as one ``(count, m, n)`` array (cached)."""
    key = (field.q, n, m)
    if key not in _SUBSPACE_CACHE:
        mats = list(enumerate_subspaces(field, n, m))
        if mats:
            stack = np.stack(mats)
        else:
            stack = np.zeros((0, max(m, 0), n), np.int64)
        stack.setflags(write=False)
        _SUBSPACE_CACHE[key] = stack
    return _SUBSPACE_CACHE[key]


class QPoly:
    """Polynomial with exact rational coefficients, low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls):
        return cls(())

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial reported as -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self):
        if not self.is_integral():
            raise ValueError("polynomial has non-integer coefficients")
        return tuple(int(c) for c in self.coeffs)

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return QPoly(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    def __neg__(self):
        return QPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QPoly([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return QPoly(out)

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return QPoly.zero(), QPoly(rem)
        quot = [Fraction(0)] * (dq + 1)
        dl = other.degree
        for i in range(len(rem) - 1, dl - 1, -1):
            if rem[i] == 0:
                continue
            f = rem[i] / other.coeffs[-1]
            quot[i - dl] = f
            for j, b in enumerate(other.coeffs):
                rem[i - dl + j] -= f * b
        return QPoly(quot), QPoly(rem)

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("division left remainder %s" % r)
        return q

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                xs = "x" if i == 1 else "x^%d" % i
                body = xs if mag == 1 else "%s*%s" % (mag, xs)
            parts.append((sign, body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += " %s %s" % (sign, body)
        return text

    def __repr__(self):
        return "QPoly(%s)" % str(self)


def lagrange_fit(points) -> QPoly:
    """Exact interpolating polynomial through ``[(x, y), ...]``.

    Sample points must have distinct x values; degree is at most
    ``len(points) - 1``.
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("sample points must have distinct x values")
    if not pts:
        raise ValueError("need at least one sample point")
    acc = QPoly.zero()
    for i, (xi, yi) in enumerate(pts):
        term = QPoly([yi])
        for j, (xj, _) in enumerate(pts):
            if j == i:
                continue
            term = term * QPoly([-xj, 1]) * QPoly([Fraction(1, 1) / (xi - xj)])
        acc = acc + term
    return acc
