"""Framed quiver data over finite fields and their counting problems.

A datum on a simply-laced graph assigns to every vertex i a framing
space D_i = F_q^{d_i} and an auxiliary space V_i = F_q^{v_i}, to every
arrow h a matrix x_h : V_{s(h)} -> V_{t(h)}, and to every vertex the
pair p_i : D_i -> V_i, q_i : V_i -> D_i.  All maps act on column
vectors, so x_h is a v_{t(h)} x v_{s(h)} matrix.  Subspaces travel, as
everywhere in this package, as reduced-echelon row bases; the image of
the row space of B under a column operator M is the row space of
B @ M^T.

Three predicates drive everything.  A datum is flat when at each vertex
the signed sum of x_h x_hbar over incoming arrows equals p_i q_i; this
is exactly the condition making the induced operators on D multiply by
the junction-insertion rule (see :func:`op_product`).  It is stable when
the x-closure of the image of p is all of V, and costable when no
nonzero x-invariant subspace of V dies under q.  Counting enumerates raw
solutions and divides by the order of the graded group GL(v) acting on
V; divisibility is asserted, never rounded.
"""

import json
from itertools import product

import numpy as np

from . import _kernels
from .exactmath import (
    FiniteField,
    field_from_q,
    gauss_binomial,
    gl_order,
    subspace_stack,
)
from .jordan import NilpotentRep
from .rootdata import (
    DynkinGraph,
    ExtendedWeight,
    NotConcentrated,
    weight_from_dims,
    weight_to_partition,
)

# Refuse enumerations whose (x, p) odometer alone exceeds this many steps.
SCAN_LIMIT = 10**7

_COUNT_CACHE: dict = {}
_DATA_CACHE: dict = {}
_FILTERED_CACHE: dict = {}
_WITNESS_CACHE: dict = {}


def _pivots(basis: np.ndarray) -> np.ndarray:
    """First nonzero column of each row of a reduced-echelon basis."""
    k = basis.shape[0]
    piv = np.empty(k, np.int64)
    for r in range(k):
        nz = np.flatnonzero(basis[r])
        if nz.size == 0:
            raise ValueError("zero row in a subspace basis")
        piv[r] = nz[0]
    return piv


def _rref_rows(field: FiniteField, rows: np.ndarray) -> np.ndarray:
    """Reduced-echelon basis of the row space; zero rows are dropped."""
    a = np.ascontiguousarray(rows, np.int64).copy()
    if a.shape[0] == 0:
        return a
    piv = np.empty(a.shape[0], np.int64)
    rank = int(_kernels.rref_ip(a, piv, *field.tables))
    return np.ascontiguousarray(a[:rank])


class GradedSubspace:
    """One subspace per vertex, each stored as a reduced-echelon row basis."""

    def __init__(self, field: FiniteField, bases):
        self.field = field
        cleaned = []
        for b in bases:
            b = np.ascontiguousarray(b, np.int64)
            if b.ndim != 2:
                raise ValueError("each vertex basis must be a 2-d array")
            red = _rref_rows(field, b)
            if red.shape[0] != b.shape[0]:
                raise ValueError("vertex basis rows are linearly dependent")
            cleaned.append(red)
        self.bases = tuple(cleaned)
        self.dims = tuple(int(b.shape[0]) for b in self.bases)
        self.ambient = tuple(int(b.shape[1]) for b in self.bases)
        self.pivs = tuple(_pivots(b) for b in self.bases)

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, [np.zeros((0, int(n)), np.int64) for n in ambient])

    @classmethod
    def full(cls, field, ambient):
        return cls(field, [np.eye(int(n), dtype=np.int64) for n in ambient])

    def contains(self, other: "GradedSubspace") -> bool:
        if self.ambient != other.ambient:
            raise ValueError("graded subspaces live in different spaces")
        add, mul, neg, inv = self.field.tables
        for b, mine, piv in zip(other.bases, self.bases, self.pivs):
            if not _kernels.rows_in_span(b, mine, piv, mine.shape[0], add, mul, neg):
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, GradedSubspace)
            and self.field == other.field
            and self.dims == other.dims
            and all((a == b).all() for a, b in zip(self.bases, other.bases))
        )

    def __repr__(self):
        return "GradedSubspace(dims=%r of %r)" % (self.dims, self.ambient)


class GradedFlag:
    """An increasing chain of graded subspaces, starting at zero.

    Whether the top step fills the ambient space depends on the datum the
    flag is used with, so that check lives in :func:`flag_types`.
    """

    def __init__(self, steps):
        steps = tuple(steps)
        if not steps:
            raise ValueError("a flag needs at least one step")
        if any(d != 0 for d in steps[0].dims):
            raise ValueError("the bottom step of a flag must be zero")
        for a in range(1, len(steps)):
            if not steps[a].contains(steps[a - 1]):
                raise ValueError("flag step %d does not contain step %d" % (a, a - 1))
            if sum(steps[a].dims) <= sum(steps[a - 1].dims):
                raise ValueError("flag steps must grow strictly")
        self.steps = steps

    def __len__(self):
        return len(self.steps)


class ADHMDatum:
    """A point of the framed quiver variety: matrices (x, p, q).

    ``x[a]`` is the matrix of arrow ``a`` (indexing ``graph.arrows``),
    ``p[i]`` maps the framing space into V at vertex i and ``q[i]`` maps
    back out.  Transposes are precomputed because row-basis images are
    taken constantly.  Instances own immutable copies of their arrays.
    """

    def __init__(self, graph: DynkinGraph, field: FiniteField, d, v, x, p, q):
        self.graph = graph
        self.field = field
        self.d = tuple(int(e) for e in d)
        self.v = tuple(int(e) for e in v)
        if len(self.d) != graph.rank or len(self.v) != graph.rank:
            raise ValueError("dimension vectors need one entry per vertex")
        if any(e < 0 for e in self.d + self.v):
            raise ValueError("dimensions must be nonnegative")
        x = [np.array(m, dtype=np.int64) for m in x]
        p = [np.array(m, dtype=np.int64) for m in p]
        q = [np.array(m, dtype=np.int64) for m in q]
        if len(x) != len(graph.arrows):
            raise ValueError("need one matrix per arrow, got %d" % len(x))
        if len(p) != graph.rank or len(q) != graph.rank:
            raise ValueError("need one p and one q matrix per vertex")
        for a, (s, t) in enumerate(graph.arrows):
            want = (self.v[t], self.v[s])
            if x[a].shape != want:
                raise ValueError(
                    "arrow %d matrix has shape %r, needs %r" % (a, x[a].shape, want)
                )
        for i in graph.vertices:
            if p[i].shape != (self.v[i], self.d[i]):
                raise ValueError("p[%d] has shape %r" % (i, p[i].shape))
            if q[i].shape != (self.d[i], self.v[i]):
                raise ValueError("q[%d] has shape %r" % (i, q[i].shape))
        for m in x + p + q:
            if m.size and (m.min() < 0 or m.max() >= field.q):
                raise ValueError("entries must be encoded field elements")
            m.setflags(write=False)
        self.x = tuple(x)
        self.p = tuple(p)
        self.q = tuple(q)
        self.xT = tuple(np.ascontiguousarray(m.T) for m in self.x)
        self.pT = tuple(np.ascontiguousarray(m.T) for m in self.p)
        self.qT = tuple(np.ascontiguousarray(m.T) for m in self.q)

    @classmethod
    def zero(cls, graph, field, d, v):
        d = tuple(int(e) for e in d)
        v = tuple(int(e) for e in v)
        x = [np.zeros((v[t], v[s]), np.int64) for s, t in graph.arrows]
        p = [np.zeros((v[i], d[i]), np.int64) for i in graph.vertices]
        q = [np.zeros((d[i], v[i]), np.int64) for i in graph.vertices]
        return cls(graph, field, d, v, x, p, q)

    def to_json(self) -> dict:
        return {
            "family": self.graph.family,
            "rank": self.graph.rank,
            "field_q": self.field.q,
            "d": list(self.d),
            "v": list(self.v),
            "x": [m.tolist() for m in self.x],
            "p": [m.tolist() for m in self.p],
            "q": [m.tolist() for m in self.q],
        }

    def __repr__(self):
        return "ADHMDatum(%s_%d, q=%d, d=%r, v=%r)" % (
            self.graph.family,
            self.graph.rank,
            self.field.q,
            self.d,
            self.v,
        )


def moment_residual(datum: ADHMDatum):
    """Per-vertex defect of the composition constraint, as raw matrices.

    The residual at vertex i is the signed sum of x_h x_hbar over arrows
    h ending at i, minus p_i q_i.
    """
    graph = datum.graph
    add, mul, neg, inv = datum.field.tables
    out = []
    for i in graph.vertices:
        acc = _kernels.mat_neg(
            _kernels.matmul(datum.p[i], datum.q[i], add, mul), datum.field.neg_table
        )
        for a, (s, t) in enumerate(graph.arrows):
            if t != i:
                continue
            term = _kernels.matmul(datum.x[a], datum.x[graph.rev[a]], add, mul)
            if graph.eps[a] == -1:
                term = _kernels.mat_neg(term, datum.field.neg_table)
            acc = _kernels.mat_add(acc, term, add)
        out.append(acc)
    return out


def is_flat(datum: ADHMDatum) -> bool:
    return all(not r.any() for r in moment_residual(datum))


def _saturate_raw(field, graph, xT, bases):
    """Smallest x-invariant graded row-space family containing ``bases``."""
    add, mul, neg, inv = field.tables
    bases = [_rref_rows(field, b) for b in bases]
    changed = True
    while changed:
        changed = False
        for a, (s, t) in enumerate(graph.arrows):
            if bases[s].shape[0] == 0 or xT[a].shape[1] == 0:
                continue
            img = _kernels.matmul(bases[s], xT[a], add, mul)
            if not img.any():
                continue
            piv = _pivots(bases[t]) if bases[t].shape[0] else np.empty(0, np.int64)
            if _kernels.rows_in_span(img, bases[t], piv, bases[t].shape[0], add, mul, neg):
                continue
            bases[t] = _rref_rows(field, np.vstack([bases[t], img]))
            changed = True
    return bases


def saturate(datum: ADHMDatum, seed: GradedSubspace) -> GradedSubspace:
    """Smallest x-invariant graded subspace of V containing the seed."""
    if seed.ambient != datum.v:
        raise ValueError("seed must be a graded subspace of V")
    return GradedSubspace(
        datum.field, _saturate_raw(datum.field, datum.graph, datum.xT, seed.bases)
    )


def _framing_image_raw(field, pT):
    return [_rref_rows(field, m) for m in pT]


def is_stable(datum: ADHMDatum) -> bool:
    """Whether the x-closure of the image of p fills V."""
    bases = _saturate_raw(
        datum.field, datum.graph, datum.xT, _framing_image_raw(datum.field, datum.pT)
    )
    return all(b.shape[0] == n for b, n in zip(bases, datum.v))


def _radical_raw(field, graph, xT, q_mats, v):
    """Largest x-invariant graded row-space family inside ker q."""
    add, mul, neg, inv = field.tables
    bases = [_rref_rows(field, _kernels.nullspace(m, add, mul, neg, inv)) for m in q_mats]
    changed = True
    while changed:
        changed = False
        for s in graph.vertices:
            b = bases[s]
            if b.shape[0] == 0:
                continue
            blocks = []
            for a, (src, tgt) in enumerate(graph.arrows):
                if src != s or v[tgt] == 0:
                    continue
                img = _kernels.matmul(b, xT[a], add, mul)
                w = bases[tgt]
                if w.shape[0]:
                    img = img.copy()
                    piv = _pivots(w)
                    _kernels.reduce_rows_ip(img, w, piv, w.shape[0], add, mul, neg)
                if img.any():
                    blocks.append(img)
            if not blocks:
                continue
            stacked = np.ascontiguousarray(np.hstack(blocks).T)
            coeffs = _kernels.nullspace(stacked, add, mul, neg, inv)
            if coeffs.shape[0] == b.shape[0]:
                continue
            bases[s] = _rref_rows(field, _kernels.matmul(coeffs, b, add, mul))
            changed = True
    return bases


def costable_radical(datum: ADHMDatum) -> GradedSubspace:
    """Largest x-invariant graded subspace of V killed by every q_i."""
    return GradedSubspace(
        datum.field, _radical_raw(datum.field, datum.graph, datum.xT, datum.q, datum.v)
    )


def is_costable(datum: ADHMDatum) -> bool:
    bases = _radical_raw(datum.field, datum.graph, datum.xT, datum.q, datum.v)
    return all(b.shape[0] == 0 for b in bases)


def type_of(datum: ADHMDatum) -> ExtendedWeight:
    """Weight classifying the datum: framing dimensions plus effective v.

    The effective v discards the costable radical, so non-costable but
    flat and stable data still get the type of their costable reduction.
    """
    if not is_flat(datum):
        raise ValueError("datum is not flat")
    if not is_stable(datum):
        raise ValueError("datum is not stable")
    rad = _radical_raw(datum.field, datum.graph, datum.xT, datum.q, datum.v)
    veff = tuple(n - b.shape[0] for n, b in zip(datum.v, rad))
    return weight_from_dims(datum.graph, datum.d, veff)


def _d_offsets(datum):
    offs = [0]
    for e in datum.d:
        offs.append(offs[-1] + e)
    return offs


def _word_vertices(graph, word):
    """(input vertex, output vertex) of a generator word."""
    kind = word[0]
    if kind in ("u", "loop"):
        i = int(word[1])
        if not 0 <= i < graph.rank:
            raise ValueError("vertex %d out of range" % i)
        return i, i
    if kind != "path":
        raise ValueError("unknown word kind %r" % (kind,))
    arrows = tuple(int(a) for a in word[1])
    if not arrows:
        raise ValueError("empty arrow tuple; use ('loop', i) for a lazy path")
    for a in arrows:
        if not 0 <= a < len(graph.arrows):
            raise ValueError("arrow index %d out of range" % a)
    for k in range(len(arrows) - 1):
        if graph.arrows[arrows[k]][0] != graph.arrows[arrows[k + 1]][1]:
            raise ValueError(
                "path breaks between arrows %d and %d" % (arrows[k], arrows[k + 1])
            )
    return graph.arrows[arrows[-1]][0], graph.arrows[arrows[0]][1]


def module_op(datum: ADHMDatum, word) -> np.ndarray:
    """Matrix on the total framing space of one generator word.

    Words are ``("u", i)`` for the projection onto the i-th summand,
    ``("loop", i)`` for the round trip q_i p_i through V_i (the lazy
    path at i), and ``("path", arrows)`` for q . x ... x . p along a
    tuple of composable arrows, rightmost applied first.
    """
    graph = datum.graph
    add, mul, neg, inv = datum.field.tables
    offs = _d_offsets(datum)
    n = offs[-1]
    out = np.zeros((n, n), np.int64)
    src, tgt = _word_vertices(graph, word)
    kind = word[0]
    if kind == "u":
        i = int(word[1])
        out[offs[i] : offs[i + 1], offs[i] : offs[i + 1]] = np.eye(
            datum.d[i], dtype=np.int64
        )
        return out
    if kind == "loop":
        i = int(word[1])
        block = _kernels.matmul(datum.q[i], datum.p[i], add, mul)
    else:
        arrows = tuple(int(a) for a in word[1])
        block = datum.p[src]
        for a in reversed(arrows):
            block = _kernels.matmul(datum.x[a], block, add, mul)
        block = _kernels.matmul(datum.q[tgt], block, add, mul)
    out[offs[tgt] : offs[tgt + 1], offs[src] : offs[src + 1]] = block
    return out


def op_product(datum: ADHMDatum, f, fp) -> np.ndarray:
    """Matrix of the algebra product of two generator words.

    Projections multiply as projections; the product of two paths is the
    signed sum over arrows h into the junction vertex of the word with
    h hbar inserted.  On flat data this equals the plain matrix product
    module_op(f) @ module_op(fp); that equivalence is what fixes the
    sign convention in :func:`moment_residual`.
    """
    graph = datum.graph
    add, mul, neg, inv = datum.field.tables
    n = sum(datum.d)
    f_in, f_out = _word_vertices(graph, f)
    fp_in, fp_out = _word_vertices(graph, fp)
    if f[0] == "u":
        m = module_op(datum, fp)
        return m if fp_out == f_in else np.zeros((n, n), np.int64)
    if fp[0] == "u":
        m = module_op(datum, f)
        return m if f_in == fp_out else np.zeros((n, n), np.int64)
    if f_in != fp_out:
        return np.zeros((n, n), np.int64)
    f_arrows = () if f[0] == "loop" else tuple(int(a) for a in f[1])
    fp_arrows = () if fp[0] == "loop" else tuple(int(a) for a in fp[1])
    total = np.zeros((n, n), np.int64)
    for a, (s, t) in enumerate(graph.arrows):
        if t != f_in:
            continue
        term = module_op(datum, ("path", f_arrows + (a, graph.rev[a]) + fp_arrows))
        if graph.eps[a] == -1:
            term = _kernels.mat_neg(term, datum.field.neg_table)
        total = _kernels.mat_add(total, term, add)
    return total


def is_subrep(datum: ADHMDatum, sub: GradedSubspace) -> bool:
    """Whether a graded subspace of D is carried into itself.

    The single check q(saturate(p(S))) <= S is equivalent to invariance
    under every induced operator, because any such operator routes
    through p, travels inside the x-closure, and exits through q.
    Assumes the datum is flat and stable.
    """
    if sub.ambient != datum.d:
        raise ValueError("subspace does not live in the framing space")
    field = datum.field
    add, mul, neg, inv = field.tables
    seed = [
        _kernels.matmul(b, datum.pT[i], add, mul) for i, b in enumerate(sub.bases)
    ]
    closure = _saturate_raw(field, datum.graph, datum.xT, seed)
    for i, w in enumerate(closure):
        if w.shape[0] == 0:
            continue
        img = _kernels.matmul(w, datum.qT[i], add, mul)
        b = sub.bases[i]
        if not _kernels.rows_in_span(img, b, sub.pivs[i], b.shape[0], add, mul, neg):
            return False
    return True


def _coords_in(field, rows, basis, piv):
    """Coordinates of rows (already inside the span) w.r.t. an echelon basis."""
    if basis.shape[0] == 0:
        return np.zeros((rows.shape[0], 0), np.int64)
    return np.ascontiguousarray(rows[:, piv])


def sub_datum(datum: ADHMDatum, sub: GradedSubspace) -> ADHMDatum:
    """The datum induced on an invariant graded subspace of D.

    The new V is the x-closure of p(S); the new framing space is S in
    its basis coordinates.  The result is flat and stable (asserted) but
    need not be costable.
    """
    if not is_subrep(datum, sub):
        raise ValueError("not a subrepresentation")
    field = datum.field
    graph = datum.graph
    add, mul, neg, inv = field.tables
    seed = [
        _kernels.matmul(b, datum.pT[i], add, mul) for i, b in enumerate(sub.bases)
    ]
    vbases = _saturate_raw(field, graph, datum.xT, seed)
    vpivs = [
        _pivots(b) if b.shape[0] else np.empty(0, np.int64) for b in vbases
    ]
    new_v = [b.shape[0] for b in vbases]
    new_d = list(sub.dims)
    x = []
    for a, (s, t) in enumerate(graph.arrows):
        img = _kernels.matmul(vbases[s], datum.xT[a], add, mul)
        x.append(_coords_in(field, img, vbases[t], vpivs[t]).T)
    p = []
    q = []
    for i in graph.vertices:
        img = _kernels.matmul(sub.bases[i], datum.pT[i], add, mul)
        p.append(_coords_in(field, img, vbases[i], vpivs[i]).T)
        img = _kernels.matmul(vbases[i], datum.qT[i], add, mul)
        q.append(_coords_in(field, img, sub.bases[i], sub.pivs[i]).T)
    out = ADHMDatum(graph, field, new_d, new_v, x, p, q)
    assert is_flat(out) and is_stable(out)
    return out


def quotient_datum(datum: ADHMDatum, sub: GradedSubspace) -> ADHMDatum:
    """The datum induced on D/S, with V cut down by the closure of p(S).

    Quotient coordinates are the non-pivot positions left after reducing
    modulo the subspace basis, at every vertex on both D and V.  The
    result is flat and stable (asserted) but need not be costable.
    """
    if not is_subrep(datum, sub):
        raise ValueError("not a subrepresentation")
    field = datum.field
    graph = datum.graph
    add, mul, neg, inv = field.tables
    seed = [
        _kernels.matmul(b, datum.pT[i], add, mul) for i, b in enumerate(sub.bases)
    ]
    vbases = _saturate_raw(field, graph, datum.xT, seed)

    def complement(basis, ambient):
        pivset = {int(c) for c in (_pivots(basis) if basis.shape[0] else ())}
        keep = [j for j in range(ambient) if j not in pivset]
        rep = np.zeros((len(keep), ambient), np.int64)
        for r, j in enumerate(keep):
            rep[r, j] = 1
        return keep, rep

    def reduce_mod(rows, basis):
        if basis.shape[0] == 0 or rows.shape[0] == 0:
            return rows
        out = rows.copy()
        piv = _pivots(basis)
        _kernels.reduce_rows_ip(out, basis, piv, basis.shape[0], add, mul, neg)
        return out

    d_keep = []
    d_reps = []
    v_keep = []
    v_reps = []
    for i in graph.vertices:
        keep, rep = complement(sub.bases[i], datum.d[i])
        d_keep.append(keep)
        d_reps.append(rep)
        keep, rep = complement(vbases[i], datum.v[i])
        v_keep.append(keep)
        v_reps.append(rep)
    new_d = [len(k) for k in d_keep]
    new_v = [len(k) for k in v_keep]
    x = []
    for a, (s, t) in enumerate(graph.arrows):
        img = reduce_mod(_kernels.matmul(v_reps[s], datum.xT[a], add, mul), vbases[t])
        x.append(np.ascontiguousarray(img[:, v_keep[t]]).T)
    p = []
    q = []
    for i in graph.vertices:
        img = reduce_mod(_kernels.matmul(d_reps[i], datum.pT[i], add, mul), vbases[i])
        p.append(np.ascontiguousarray(img[:, v_keep[i]]).T)
        img = reduce_mod(_kernels.matmul(v_reps[i], datum.qT[i], add, mul), sub.bases[i])
        q.append(np.ascontiguousarray(img[:, d_keep[i]]).T)
    out = ADHMDatum(graph, field, new_d, new_v, x, p, q)
    assert is_flat(out) and is_stable(out)
    return out


def flag_types(datum: ADHMDatum, flag):
    """Types of the successive subquotients of an invariant graded flag.

    ``flag`` is a :class:`GradedFlag` or a plain chain of graded
    subspaces from zero to the full space.  Each step must be invariant;
    the returned list runs from the bottom step upward.
    """
    steps = list(flag.steps if isinstance(flag, GradedFlag) else flag)
    if not steps:
        raise ValueError("empty flag")
    if any(d != 0 for d in steps[0].dims):
        raise ValueError("flag must start at the zero subspace")
    if steps[-1].dims != datum.d:
        raise ValueError("flag must end at the full framing space")
    for a in range(1, len(steps)):
        if not steps[a].contains(steps[a - 1]):
            raise ValueError("flag steps are not nested")
    types = []
    cur = datum
    lower = [s.bases for s in steps[:-1]]
    while lower:
        sub = GradedSubspace(cur.field, lower[-1])
        if not is_subrep(cur, sub):
            raise ValueError("flag step is not invariant")
        types.append(type_of(quotient_datum(cur, sub)))
        cur = sub_datum(cur, sub)
        rest = []
        for bases in lower[:-1]:
            rest.append(
                [
                    _rref_rows(cur.field, b[:, piv])
                    for b, piv in zip(bases, sub.pivs)
                ]
            )
        lower = rest
    return list(reversed(types))


def _check_weights(xi: ExtendedWeight, etas):
    for eta in etas:
        if eta.graph != xi.graph:
            raise ValueError("all weights must live on the same graph")
    sizes = [sum(col) for col in zip(*[eta.delta for eta in etas])] if etas else [0] * xi.graph.rank
    if tuple(sizes) != xi.delta:
        raise ValueError(
            "step sizes add to %r but the weight has size %r" % (tuple(sizes), xi.delta)
        )


def count_invariant_flags(datum: ADHMDatum, etas) -> int:
    """Invariant graded flags on a fixed datum with prescribed types.

    ``etas[a]`` is the type required of the subquotient at step a,
    ordered from the bottom of the chain upward.  Recurses from the top,
    exactly like the nilpotent-side flag count.
    """
    etas = list(etas)
    sizes = [sum(col) for col in zip(*[eta.delta for eta in etas])] if etas else [0] * datum.graph.rank
    if tuple(sizes) != datum.d:
        raise ValueError("flag step sizes must add up to the framing dimensions")
    if not etas:
        return 1
    if len(etas) == 1:
        return 1 if type_of(datum) == etas[0] else 0
    top = etas[-1]
    keep = [datum.d[i] - top.delta[i] for i in datum.graph.vertices]
    if any(k < 0 for k in keep):
        return 0
    stacks = [
        subspace_stack(datum.field, datum.d[i], keep[i]) for i in datum.graph.vertices
    ]
    total = 0
    for combo in product(*stacks):
        sub = GradedSubspace(datum.field, list(combo))
        if not is_subrep(datum, sub):
            continue
        if type_of(quotient_datum(datum, sub)) != top:
            continue
        total += count_invariant_flags(sub_datum(datum, sub), etas[:-1])
    return total


def _bistable_stream(field: FiniteField, xi: ExtendedWeight):
    """Yield raw (x, p, q) matrix lists of every flat stable costable datum.

    Dimensions come from the weight: framing d = size vector, auxiliary
    v.  Yielded arrays are reused between steps; copy them to keep them.
    """
    graph = xi.graph
    d = xi.delta
    v = xi.v
    qn = field.q
    add, mul, neg, inv = field.tables
    x_shapes = [(v[t], v[s]) for s, t in graph.arrows]
    x_cells = sum(r * c for r, c in x_shapes)
    p_cells = sum(v[i] * d[i] for i in graph.vertices)
    if qn ** (x_cells + p_cells) > SCAN_LIMIT:
        raise ValueError(
            "search over q^%d arrow and framing matrices is too large"
            % (x_cells + p_cells)
        )
    x_mats = [np.zeros(s, np.int64) for s in x_shapes]
    p_mats = [np.zeros((v[i], d[i]), np.int64) for i in graph.vertices]
    x_digits = np.zeros(max(x_cells, 1), np.int64)
    p_digits = np.zeros(max(p_cells, 1), np.int64)

    def fill(mats, digits):
        pos = 0
        for m in mats:
            r, c = m.shape
            if r * c:
                m[:, :] = digits[pos : pos + r * c].reshape(r, c)
                pos += r * c

    def odometer(digits, cells):
        t = 0
        while t < cells and digits[t] == qn - 1:
            digits[t] = 0
            t += 1
        if t == cells:
            return False
        digits[t] += 1
        return True

    xT = [np.zeros((s[1], s[0]), np.int64) for s in x_shapes]
    while True:
        fill(x_mats, x_digits)
        for a in range(len(x_mats)):
            xT[a][:, :] = x_mats[a].T
        p_digits[:] = 0
        while True:
            fill(p_mats, p_digits)
            closure = _saturate_raw(field, graph, xT, [m.T for m in p_mats])
            if all(b.shape[0] == v[i] for i, b in enumerate(closure)):
                yield from _q_solutions(field, graph, xi, x_mats, xT, p_mats)
            if p_cells == 0 or not odometer(p_digits, p_cells):
                break
        if x_cells == 0 or not odometer(x_digits, x_cells):
            break


def _q_solutions(field, graph, xi, x_mats, xT, p_mats):
    """Yield (x, p, q) for every costable q solving the flatness system."""
    d = xi.delta
    v = xi.v
    qn = field.q
    add, mul, neg, inv = field.tables
    particular = []
    kernels = []
    free = 0
    for i in graph.vertices:
        target = np.zeros((v[i], v[i]), np.int64)
        for a, (s, t) in enumerate(graph.arrows):
            if t != i:
                continue
            term = _kernels.matmul(x_mats[a], x_mats[graph.rev[a]], add, mul)
            if graph.eps[a] == -1:
                term = _kernels.mat_neg(term, field.neg_table)
            target = _kernels.mat_add(target, term, add)
        ok, part = _kernels.solve_right(p_mats[i], target, add, mul, neg, inv)
        if not ok:
            return
        ker = _kernels.nullspace(p_mats[i], add, mul, neg, inv)
        particular.append(part)
        kernels.append(ker)
        free += v[i] * ker.shape[0]
    q_mats = [part.copy() for part in particular]
    if free == 0:
        if _costable(field, graph, xT, q_mats, v):
            yield x_mats, p_mats, q_mats
        return
    digits = np.zeros(free, np.int64)
    layout = []
    for i in graph.vertices:
        for col in range(v[i]):
            for r in range(kernels[i].shape[0]):
                layout.append((i, col, r))
    while True:
        for i in graph.vertices:
            q_mats[i][:, :] = particular[i]
        for val, (i, col, r) in zip(digits, layout):
            if val:
                row = kernels[i][r]
                qcol = q_mats[i][:, col]
                for j in range(row.shape[0]):
                    if row[j]:
                        qcol[j] = add[qcol[j], mul[val, row[j]]]
        if _costable(field, graph, xT, q_mats, v):
            yield x_mats, p_mats, q_mats
        t = 0
        while t < free and digits[t] == qn - 1:
            digits[t] = 0
            t += 1
        if t == free:
            return
        digits[t] += 1


def _costable(field, graph, xT, q_mats, v):
    bases = _radical_raw(field, graph, xT, q_mats, v)
    return all(b.shape[0] == 0 for b in bases)


def find_bistable(xi: ExtendedWeight, field: FiniteField):
    """Some flat stable costable datum with the dimensions of ``xi``.

    Returns None when none exists.  Any such datum has type ``xi``: with
    the radical trivial, the effective v is v itself.  Cached, because a
    single witness serves every flag count at the same weight.
    """
    key = (xi.graph.key(), xi.u, xi.v, field.q)
    if key in _WITNESS_CACHE:
        return _WITNESS_CACHE[key]
    found = None
    for x, p, q in _bistable_stream(field, xi):
        found = ADHMDatum(xi.graph, field, xi.delta, xi.v, x, p, q)
        break
    _WITNESS_CACHE[key] = found
    return found


def count_bistable(xi: ExtendedWeight, q: int, dump=None) -> int:
    """Flat stable costable data with the dimensions of ``xi``, up to gauge.

    Enumerates arrow and framing-in matrices, prunes by stability, solves
    the linear flatness system for the framing-out matrices, filters by
    costability, and divides the raw total by the order of GL(v).  The
    division must be exact; a remainder would mean the gauge action is
    not free and the model is wrong.

    ``dump`` names a file that receives one JSON line per raw datum, for
    debugging small searches.
    """
    if not xi.is_integrable():
        raise ValueError("weight %r is not integrable" % (xi,))
    key = (xi.graph.key(), xi.u, xi.v, q)
    if dump is None and key in _COUNT_CACHE:
        return _COUNT_CACHE[key]
    field = field_from_q(q)
    sink = open(dump, "w") if dump is not None else None
    raw = 0
    try:
        for x, p, qm in _bistable_stream(field, xi):
            raw += 1
            if sink is not None:
                datum = ADHMDatum(xi.graph, field, xi.delta, xi.v, x, p, qm)
                sink.write(json.dumps(datum.to_json()) + "\n")
    finally:
        if sink is not None:
            sink.close()
    order = 1
    for n in xi.v:
        order *= gl_order(n, q)
    assert raw % order == 0, (raw, order, xi, q)
    out = raw // order
    _COUNT_CACHE[key] = out
    return out


# Materialized structure lists larger than this stay unmemoized; the
# scan is redone instead of holding that many matrices alive.
_DATA_CACHE_LIMIT = 200_000


def _bistable_data(field: FiniteField, xi: ExtendedWeight):
    """Iterate ADHM data for ``xi``, memoizing small result sets.

    Repeated flag counts at one weight then skip the expensive scan over
    arrow and framing matrices and replay the survivors.
    """
    key = (xi.graph.key(), xi.u, xi.v, field.q)
    cached = _DATA_CACHE.get(key)
    if cached is not None:
        yield from cached
        return
    keep: list = []
    for x, p, qm in _bistable_stream(field, xi):
        datum = ADHMDatum(xi.graph, field, xi.delta, xi.v, x, p, qm)
        if keep is not None:
            keep.append(datum)
            if len(keep) > _DATA_CACHE_LIMIT:
                keep = None
        yield datum
    if keep is not None:
        _DATA_CACHE[key] = keep


def _standard_sub(field: FiniteField, dims, ambient) -> GradedSubspace:
    """Coordinate subspace spanned by the first dims[i] basis vectors."""
    bases = [
        np.eye(n, dtype=np.int64)[:k] for k, n in zip(dims, ambient)
    ]
    return GradedSubspace(field, bases)


def _flag_compatible(datum: ADHMDatum, etas) -> bool:
    """Whether the standard coordinate flag is invariant with these types.

    The flag steps are the coordinate subspaces whose dimensions are the
    partial sums of the eta sizes; taking the sub datum of a coordinate
    subspace keeps lower coordinate steps coordinate-aligned, so each
    level peels off the top factor against a fresh standard subspace.
    """
    cur = datum
    for idx in range(len(etas) - 1, 0, -1):
        keep = [cur.d[i] - etas[idx].delta[i] for i in cur.graph.vertices]
        sub = _standard_sub(cur.field, keep, cur.d)
        if not is_subrep(cur, sub):
            return False
        if type_of(quotient_datum(cur, sub)) != etas[idx]:
            return False
        cur = sub_datum(cur, sub)
    if not etas:
        return True
    return type_of(cur) == etas[0]


def count_filtered_bistable(xi: ExtendedWeight, etas, q: int, method: str = "flagged") -> int:
    """Pairs (bistable structure, invariant graded flag), up to gauge.

    ``etas[a]`` prescribes the type of the a-th subquotient, bottom
    first.  Two methods compute the same number.  ``pairs`` enumerates
    every structure and sums its invariant flag counts; it is the
    literal definition and the regression check.  ``flagged`` uses that
    the graded general linear group of the framing space moves any flag
    with the given step dimensions to the standard coordinate flag while
    permuting the bistable structures, so the pair total is the number
    of flags of those dimensions times the number of structures
    compatible with the one standard flag.  A single witness structure
    would not do instead: structures with the same dimensions can carry
    different flag counts, so only the flag side may be factored out.
    """
    etas = list(etas)
    _check_weights(xi, etas)
    for w in [xi] + etas:
        if not w.is_positive_integrable():
            raise ValueError("weight %r is not positive-integrable" % (w,))
    field = field_from_q(q)
    order = 1
    for n in xi.v:
        order *= gl_order(n, q)
    if method == "pairs":
        total = 0
        for datum in _bistable_data(field, xi):
            total += count_invariant_flags(datum, etas)
        assert total % order == 0, (total, order, xi, q)
        return total // order
    if method != "flagged":
        raise ValueError("unknown method %r" % (method,))
    key = (
        xi.graph.key(),
        xi.u,
        xi.v,
        tuple((e.u, e.v) for e in etas),
        q,
    )
    if key in _FILTERED_CACHE:
        return _FILTERED_CACHE[key]
    flags = 1
    for i in xi.graph.vertices:
        run = 0
        for eta in etas:
            prev = run
            run += eta.delta[i]
            flags *= gauss_binomial(run, prev, q)
    compatible = 0
    for datum in _bistable_data(field, xi):
        if _flag_compatible(datum, etas):
            compatible += 1
    total = flags * compatible
    assert total % order == 0, (total, order, xi, q)
    out = total // order
    _FILTERED_CACHE[key] = out
    return out


def induced_nilpotent(datum: ADHMDatum) -> NilpotentRep:
    """Nilpotent operator on the framing space of a concentrated A-type datum.

    For an A-type graph with all framing dimension at vertex 0, the lazy
    path there induces a nilpotent operator whose partition type must
    match the partition form of the datum's weight; both facts are
    asserted, tying the two counting models together.
    """
    graph = datum.graph
    if graph.family != "A":
        raise NotConcentrated("the nilpotent picture needs an A-type graph")
    if any(datum.d[i] != 0 for i in range(1, graph.rank)):
        raise NotConcentrated(
            "framing dimensions %r are not concentrated at vertex 0" % (datum.d,)
        )
    mat = module_op(datum, ("loop", 0))
    rep = NilpotentRep(datum.field, mat)
    assert len(rep.type) <= graph.rank + 1, "operator order exceeds the path bound"
    assert rep.type == weight_to_partition(type_of(datum))
    return rep
