"""ADE graphs, weight bookkeeping and the dimension formulas.

Vertices are labelled ``0 .. rank-1``.  Canonical shapes: ``A_n`` is the
chain ``0-1-...-(n-1)``; ``D_n`` is the chain ``0..n-3`` with two extra
leaves ``n-2, n-1`` attached to vertex ``n-3``; ``E_n`` (n = 6, 7, 8) is
the chain ``0-2-3-4-5(-6-7)`` with the branch vertex ``1`` attached to
``3``.  Every edge appears with both orientations; the orientation from
the lower to the higher label carries sign ``+1`` by default.

A weight is stored as the pair ``(u, v)`` of nonnegative-destined
integer vectors; the pair maps to ``(gamma, delta) = (u - v, u - v + Av)``
with ``A`` the Cartan matrix.  ``delta`` plays the role of a dimension
vector and ``gamma`` the role of an ordinary dominant weight.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class NotInLattice(ValueError):
    """The requested (gamma, delta) pair has no integral preimage."""


class NotConcentrated(ValueError):
    """Partition conversion needs the size vector concentrated at vertex 0."""


class NotAPartition(ValueError):
    """The converted vector is not weakly decreasing and nonnegative."""


class Partition:
    """Weakly decreasing tuple of positive integers."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        ps = tuple(int(x) for x in parts if int(x) != 0)
        if any(x < 0 for x in ps):
            raise NotAPartition("negative part in %r" % (tuple(parts),))
        if any(ps[i] < ps[i + 1] for i in range(len(ps) - 1)):
            raise NotAPartition("parts not weakly decreasing: %r" % (tuple(parts),))
        self.parts = ps

    @property
    def size(self) -> int:
        return sum(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition(())
        return Partition(
            [sum(1 for p in self.parts if p > i) for i in range(self.parts[0])]
        )

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __eq__(self, other):
        if isinstance(other, Partition):
            return self.parts == other.parts
        if isinstance(other, tuple):
            return self.parts == other
        return NotImplemented

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return "Partition(%r)" % (self.parts,)

    @staticmethod
    def all_of(n: int, max_parts: int | None = None):
        """Yield every partition of n (optionally with bounded length)."""

        def rec(remaining, cap, prefix):
            if remaining == 0:
                yield Partition(prefix)
                return
            if max_parts is not None and len(prefix) >= max_parts:
                return
            for part in range(min(cap, remaining), 0, -1):
                yield from rec(remaining - part, part, prefix + [part])

        yield from rec(n, n, [])


_E_CHAINS = {6: [0, 2, 3, 4, 5], 7: [0, 2, 3, 4, 5, 6], 8: [0, 2, 3, 4, 5, 6, 7]}


def _canonical_edges(family: str, rank: int):
    if family == "A":
        if rank < 1:
            raise ValueError("A requires rank >= 1")
        return [(i, i + 1) for i in range(rank - 1)]
    if family == "D":
        if rank < 3:
            raise ValueError("D requires rank >= 3")
        edges = [(i, i + 1) for i in range(rank - 3)]
        edges += [(rank - 3, rank - 2), (rank - 3, rank - 1)]
        return edges
    if family == "E":
        if rank not in _E_CHAINS:
            raise ValueError("E requires rank in {6, 7, 8}")
        chain = _E_CHAINS[rank]
        edges = [(chain[i], chain[i + 1]) for i in range(len(chain) - 1)]
        edges.append((1, 3))
        return sorted(edges)
    raise ValueError("family must be one of 'A', 'D', 'E'")


def _invert_rational(mat):
    """Exact inverse of an integer matrix as nested Fraction tuples."""
    n = len(mat)
    aug = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        pr = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if pr is None:
            raise ValueError("matrix not invertible")
        aug[c], aug[pr] = aug[pr], aug[c]
        s = aug[c][c]
        aug[c] = [x / s for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


class DynkinGraph:
    """A simply-laced tree with signed orientations on its doubled edges.

    ``arrows[a] = (src, tgt)`` lists both orientations of every edge;
    ``eps[a]`` is the sign and ``rev[a]`` the index of the reversed
    arrow.  Instances are immutable; use :func:`dynkin_graph` for the
    canonical labelling and :meth:`relabel` / :meth:`with_eps` to build
    gauge-equivalent variants.
    """

    __slots__ = ("family", "rank", "edges", "arrows", "eps", "rev", "cartan", "_cartan_inv")

    def __init__(self, family: str, rank: int, edges, eps=None):
        edges = tuple((int(a), int(b)) for a, b in edges)
        if len(edges) != rank - 1:
            raise ValueError("a connected simply-laced graph on %d vertices needs %d edges" % (rank, rank - 1))
        seen = set()
        adj = {i: set() for i in range(rank)}
        for a, b in edges:
            if a == b or not (0 <= a < rank and 0 <= b < rank):
                raise ValueError("bad edge (%d, %d)" % (a, b))
            key = frozenset((a, b))
            if key in seen:
                raise ValueError("repeated edge (%d, %d)" % (a, b))
            seen.add(key)
            adj[a].add(b)
            adj[b].add(a)
        reach = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y not in reach:
                    reach.add(y)
                    frontier.append(y)
        if len(reach) != rank:
            raise ValueError("graph is not connected")
        self.family = family
        self.rank = rank
        self.edges = edges
        arrows = []
        for a, b in edges:
            arrows.append((a, b))
            arrows.append((b, a))
        self.arrows = tuple(arrows)
        if eps is None:
            eps = tuple(1 if k % 2 == 0 else -1 for k in range(len(arrows)))
        else:
            eps = tuple(int(e) for e in eps)
            if len(eps) != len(arrows) or any(e not in (-1, 1) for e in eps):
                raise ValueError("eps must assign +-1 to every arrow")
            for k in range(0, len(arrows), 2):
                if eps[k] * eps[k + 1] != -1:
                    raise ValueError("eps must take opposite signs on the two orientations")
        self.eps = eps
        self.rev = tuple(k + 1 if k % 2 == 0 else k - 1 for k in range(len(arrows)))
        cart = 2 * np.eye(rank, dtype=np.int64)
        for a, b in edges:
            cart[a, b] = -1
            cart[b, a] = -1
        cart.setflags(write=False)
        self.cartan = cart
        self._cartan_inv = None

    @property
    def vertices(self):
        return range(self.rank)

    @property
    def cartan_inv(self):
        if self._cartan_inv is None:
            self._cartan_inv = _invert_rational(self.cartan.tolist())
        return self._cartan_inv

    def key(self):
        return (self.family, self.rank, self.edges, self.eps)

    def __eq__(self, other):
        return isinstance(other, DynkinGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "DynkinGraph(%s_%d)" % (self.family, self.rank)

    def relabel(self, perm) -> "DynkinGraph":
        """Graph with vertex i renamed perm[i]; arrow order is kept."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.rank)):
            raise ValueError("not a permutation of the vertices")
        edges = [(perm[a], perm[b]) for a, b in self.edges]
        return DynkinGraph(self.family, self.rank, edges, self.eps)

    def with_eps(self, flips) -> "DynkinGraph":
        """Graph with the signs of the listed edges (or all, if True) negated."""
        if flips is True:
            flips = range(len(self.edges))
        flips = set(flips)
        eps = list(self.eps)
        for e in flips:
            eps[2 * e] = -eps[2 * e]
            eps[2 * e + 1] = -eps[2 * e + 1]
        return DynkinGraph(self.family, self.rank, self.edges, eps)

    def automorphisms(self):
        """All vertex permutations preserving the undirected edge set."""
        from itertools import permutations

        eset = {frozenset(e) for e in self.edges}
        out = []
        for perm in permutations(range(self.rank)):
            if {frozenset((perm[a], perm[b])) for a, b in self.edges} == eset:
                out.append(perm)
        return out


_GRAPH_CACHE: dict = {}


def dynkin_graph(family: str, rank: int) -> DynkinGraph:
    """Canonical ADE graph (cached)."""
    key = (family, rank)
    if key not in _GRAPH_CACHE:
        _GRAPH_CACHE[key] = DynkinGraph(family, rank, _canonical_edges(family, rank))
    return _GRAPH_CACHE[key]


def cartan_apply(graph: DynkinGraph, vec) -> tuple:
    v = np.asarray(vec, dtype=np.int64)
    return tuple(int(x) for x in graph.cartan @ v)


@dataclass(frozen=True)
class ExtendedWeight:
    """Weight of the extended algebra, stored as the pair (u, v)."""

    graph: DynkinGraph
    u: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(int(x) for x in self.u))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        if len(self.u) != self.graph.rank or len(self.v) != self.graph.rank:
            raise ValueError("u and v must have one entry per vertex")

    @property
    def gamma(self) -> tuple:
        return tuple(a - b for a, b in zip(self.u, self.v))

    @property
    def delta(self) -> tuple:
        av = cartan_apply(self.graph, self.v)
        return tuple(a - b + c for a, b, c in zip(self.u, self.v, av))

    @property
    def size(self) -> tuple:
        """The dimension vector |.| of the weight, alias for delta."""
        return self.delta

    def is_integrable(self) -> bool:
        return all(x >= 0 for x in self.u) and all(x >= 0 for x in self.v)

    def is_positive_integrable(self) -> bool:
        return (
            self.is_integrable()
            and all(x >= 0 for x in self.gamma)
            and all(x >= 0 for x in self.delta)
        )

    def to_json(self) -> dict:
        return {
            "family": self.graph.family,
            "rank": self.graph.rank,
            "u": list(self.u),
            "v": list(self.v),
        }

    @staticmethod
    def from_json(data: dict) -> "ExtendedWeight":
        graph = dynkin_graph(data["family"], int(data["rank"]))
        return ExtendedWeight(graph, data["u"], data["v"])

    def __repr__(self):
        return "ExtendedWeight(%s_%d, u=%r, v=%r)" % (
            self.graph.family,
            self.graph.rank,
            self.u,
            self.v,
        )


def to_gamma_delta(graph: DynkinGraph, u, v):
    w = ExtendedWeight(graph, u, v)
    return w.gamma, w.delta


def from_gamma_delta(graph: DynkinGraph, gamma, delta) -> ExtendedWeight:
    """Invert the (gamma, delta) encoding; raises NotInLattice if fractional."""
    gamma = tuple(int(x) for x in gamma)
    delta = tuple(int(x) for x in delta)
    rhs = [d - g for g, d in zip(gamma, delta)]
    inv = graph.cartan_inv
    v = []
    for row in inv:
        acc = Fraction(0)
        for c, x in zip(row, rhs):
            acc += c * x
        if acc.denominator != 1:
            raise NotInLattice("v = A^-1(delta - gamma) is not integral")
        v.append(int(acc))
    u = tuple(g + x for g, x in zip(gamma, v))
    return ExtendedWeight(graph, u, v)


def weight_from_dims(graph: DynkinGraph, d, v) -> ExtendedWeight:
    """Weight whose size vector is d and whose v-part is v."""
    d = tuple(int(x) for x in d)
    v = tuple(int(x) for x in v)
    av = cartan_apply(graph, v)
    u = tuple(dd + vv - a for dd, vv, a in zip(d, v, av))
    w = ExtendedWeight(graph, u, v)
    assert w.delta == d
    return w


def nilpotent_orbit_dim(lam) -> int:
    """sum_{i != j} lam_i lam_j for a partition."""
    parts = tuple(lam)
    total = sum(parts)
    return total * total - sum(p * p for p in parts)


def bistable_dim(xi: ExtendedWeight) -> int:
    """Dimension exponent of the bistable datum count for weight xi."""
    av = cartan_apply(xi.graph, xi.v)
    d = xi.delta
    return sum(vi * (2 * di - ai) for vi, di, ai in zip(xi.v, d, av))


def flag_dim(sizes) -> int:
    """sum_{a<b} n_a n_b for a list of step sizes."""
    sizes = list(sizes)
    out = 0
    for a in range(len(sizes)):
        for b in range(a + 1, len(sizes)):
            out += sizes[a] * sizes[b]
    return out


def graded_flag_dim(vecs) -> int:
    """sum_{a<b} sum_i v^a_i v^b_i for a list of integer vectors."""
    vecs = [tuple(v) for v in vecs]
    out = 0
    for a in range(len(vecs)):
        for b in range(a + 1, len(vecs)):
            out += sum(x * y for x, y in zip(vecs[a], vecs[b]))
    return out


def weight_to_partition(eta: ExtendedWeight) -> Partition:
    """Convert a concentrated A-type weight to its partition.

    Requires the size vector to vanish away from vertex 0; the result
    lists the successive differences of the v-part.
    """
    if eta.graph.family != "A":
        raise NotConcentrated("partition conversion needs an A-type graph")
    delta = eta.delta
    if any(delta[i] != 0 for i in range(1, len(delta))):
        raise NotConcentrated("size vector %r is not concentrated at vertex 0" % (delta,))
    v = eta.v
    rank = eta.graph.rank
    nu = [delta[0] - v[0]]
    for k in range(1, rank):
        nu.append(v[k - 1] - v[k])
    nu.append(v[rank - 1])
    if any(x < 0 for x in nu) or any(nu[i] < nu[i + 1] for i in range(len(nu) - 1)):
        raise NotAPartition("converted vector %r is not a partition" % (nu,))
    return Partition(nu)


def partition_to_weight(graph: DynkinGraph, lam) -> ExtendedWeight:
    """Concentrated A-type weight whose partition is lam."""
    if graph.family != "A":
        raise NotConcentrated("partition conversion needs an A-type graph")
    parts = list(Partition(lam).parts)
    n_slots = graph.rank + 1
    if len(parts) > n_slots:
        raise NotAPartition(
            "partition %r has more than %d parts" % (tuple(parts), n_slots)
        )
    parts += [0] * (n_slots - len(parts))
    v = tuple(sum(parts[i + 1 :]) for i in range(graph.rank))
    d = (sum(parts),) + (0,) * (graph.rank - 1)
    return weight_from_dims(graph, d, v)
