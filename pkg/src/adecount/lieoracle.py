"""Independent multiplicity oracles for the counting polynomials.

Two routes that never touch the counting code:

* arbitrary ADE graphs: irreducible characters via the Freudenthal
  recursion (cross-checked against the Weyl dimension formula on every
  call) and tensor product decomposition by character convolution plus
  highest-weight peeling;
* type A: Littlewood-Richardson coefficients by the classical skew
  tableau rule, iterated over multi-factor lists.

Weights are tuples of fundamental-weight coordinates; roots are kept in
simple-root coordinates.  Inner products use the exact rational inverse
of the Cartan matrix.
"""

from dataclasses import dataclass
from fractions import Fraction

from .rootdata import DynkinGraph, ExtendedWeight, Partition

_ROOT_CACHE: dict = {}
_CHAR_CACHE: dict = {}
_LR_CACHE: dict = {}


def positive_roots(graph: DynkinGraph):
    """All positive roots in simple-root coordinates, sorted by height."""
    key = graph.key()
    if key in _ROOT_CACHE:
        return _ROOT_CACHE[key]
    n = graph.rank
    cartan = graph.cartan
    roots = {tuple(1 if j == i else 0 for j in range(n)) for i in range(n)}
    layer = set(roots)
    while layer:
        new = set()
        for r in layer:
            pairing = cartan @ r
            for i in range(n):
                p = 0
                probe = list(r)
                while True:
                    probe[i] -= 1
                    if probe[i] < 0 or tuple(probe) not in roots:
                        break
                    p += 1
                if p - pairing[i] > 0:
                    cand = list(r)
                    cand[i] += 1
                    cand = tuple(cand)
                    if cand not in roots:
                        new.add(cand)
        roots |= new
        layer = new
    out = tuple(sorted(roots, key=lambda r: (sum(r), r)))
    _ROOT_CACHE[key] = out
    return out


def _pairing_with_root(mu, root) -> int:
    """(mu, alpha) for mu in fundamental and alpha in simple-root coordinates."""
    return sum(m * r for m, r in zip(mu, root))


def _inner(graph: DynkinGraph, x, y) -> Fraction:
    """Exact inner product of two fundamental-coordinate weights."""
    inv = graph.cartan_inv
    acc = Fraction(0)
    for i, xi in enumerate(x):
        if xi:
            row = inv[i]
            acc += xi * sum(row[j] * y[j] for j in range(len(y)))
    return acc


def _reflect(graph: DynkinGraph, mu, i):
    c = mu[i]
    cartan = graph.cartan
    return tuple(mu[j] - c * int(cartan[j][i]) for j in range(len(mu)))


def dominant_representative(graph: DynkinGraph, mu) -> tuple:
    mu = tuple(mu)
    while True:
        neg = next((i for i, m in enumerate(mu) if m < 0), None)
        if neg is None:
            return mu
        mu = _reflect(graph, mu, neg)


def weyl_orbit(graph: DynkinGraph, mu):
    """The full Weyl orbit of a weight, as a set of tuples."""
    seen = {tuple(mu)}
    frontier = [tuple(mu)]
    while frontier:
        w = frontier.pop()
        for i in range(graph.rank):
            r = _reflect(graph, w, i)
            if r not in seen:
                seen.add(r)
                frontier.append(r)
    return seen


def weyl_dim(graph: DynkinGraph, hw) -> int:
    """Dimension of the irreducible with highest weight hw (product formula)."""
    rho = (1,) * graph.rank
    num = Fraction(1)
    lam_rho = tuple(h + 1 for h in hw)
    for alpha in positive_roots(graph):
        num *= Fraction(_pairing_with_root(lam_rho, alpha), _pairing_with_root(rho, alpha))
    assert num.denominator == 1
    return int(num)


@dataclass(frozen=True)
class Character:
    """Weight multiplicities of one irreducible representation."""

    graph: DynkinGraph
    highest_weight: tuple
    dominant: dict
    weights: dict
    dim: int


def irreducible_character(graph: DynkinGraph, hw) -> Character:
    """Freudenthal character, memoized per graph and highest weight."""
    hw = tuple(int(x) for x in hw)
    if any(x < 0 for x in hw):
        raise ValueError("highest weight must be dominant, got %r" % (hw,))
    key = (graph.key(), hw)
    if key in _CHAR_CACHE:
        return _CHAR_CACHE[key]
    n = graph.rank
    inv = graph.cartan_inv
    # Heights of candidate dominant weights: hw - A c with c >= 0 integral.
    bounds = []
    for i in range(n):
        b = sum(inv[i][j] * hw[j] for j in range(n))
        bounds.append(int(b))  # floor; inv has nonnegative entries
    candidates = []

    def walk(i, c):
        if i == n:
            mu = tuple(
                hw[k] - sum(int(graph.cartan[k][j]) * c[j] for j in range(n))
                for k in range(n)
            )
            if all(x >= 0 for x in mu):
                candidates.append((sum(c), tuple(c), mu))
            return
        for val in range(bounds[i] + 1):
            walk(i + 1, c + [val])

    walk(0, [])
    candidates.sort()
    roots = positive_roots(graph)
    # The string walk adds roots to weights, so both need the same
    # coordinate system: convert each root to fundamental coordinates.
    roots_fund = [
        tuple(int(x) for x in graph.cartan @ list(r)) for r in roots
    ]
    hw_rho = tuple(h + 1 for h in hw)
    c2_top = _inner(graph, hw_rho, hw_rho)
    dominant = {}
    for height, _, mu in candidates:
        if height == 0:
            dominant[mu] = 1
            continue
        acc = Fraction(0)
        for alpha, alpha_f in zip(roots, roots_fund):
            pair = _pairing_with_root(mu, alpha)
            k = 1
            while True:
                nu = tuple(m + k * a for m, a in zip(mu, alpha_f))
                mult = dominant.get(dominant_representative(graph, nu), 0)
                if mult == 0:
                    break
                acc += mult * (pair + 2 * k)
                k += 1
        mu_rho = tuple(m + 1 for m in mu)
        den = c2_top - _inner(graph, mu_rho, mu_rho)
        assert den > 0
        m = 2 * acc / den
        assert m.denominator == 1 and m > 0
        dominant[mu] = int(m)
    weights = {}
    total = 0
    for mu, mult in dominant.items():
        orbit = weyl_orbit(graph, mu)
        total += mult * len(orbit)
        for w in orbit:
            weights[w] = mult
    dim = weyl_dim(graph, hw)
    assert total == dim, "character size %d disagrees with dimension %d" % (total, dim)
    ch = Character(graph, hw, dominant, weights, dim)
    _CHAR_CACHE[key] = ch
    return ch


@dataclass(frozen=True)
class DecompositionResult:
    """Multiplicities of the irreducible constituents of a tensor product."""

    multiplicities: dict
    total_dim: int

    def get(self, hw, default=0):
        return self.multiplicities.get(tuple(hw), default)


def _height_vector(graph: DynkinGraph):
    inv = graph.cartan_inv
    n = graph.rank
    return tuple(sum(inv[i][j] for i in range(n)) for j in range(n))


def tensor_decompose(graph: DynkinGraph, hws) -> DecompositionResult:
    """Decompose a tensor product of irreducibles into irreducibles.

    Convolves the full weight multisets, then peels highest weights by
    descending height.  Dimension conservation is asserted.
    """
    hws = [tuple(int(x) for x in hw) for hw in hws]
    if not hws:
        raise ValueError("need at least one factor")
    chars = [irreducible_character(graph, hw) for hw in hws]
    conv = dict(chars[0].weights)
    for ch in chars[1:]:
        new: dict = {}
        for w1, m1 in conv.items():
            for w2, m2 in ch.weights.items():
                key = tuple(a + b for a, b in zip(w1, w2))
                new[key] = new.get(key, 0) + m1 * m2
        conv = new
    hvec = _height_vector(graph)
    out: dict = {}
    while conv:
        top = max(conv, key=lambda w: sum(h * x for h, x in zip(hvec, w)))
        mult = conv[top]
        assert mult > 0, "peeling produced a negative multiplicity"
        assert all(x >= 0 for x in top), "maximal weight %r is not dominant" % (top,)
        out[top] = mult
        for w, m in irreducible_character(graph, top).weights.items():
            rem = conv.get(w, 0) - mult * m
            assert rem >= 0
            if rem:
                conv[w] = rem
            else:
                conv.pop(w, None)
    total = 1
    for ch in chars:
        total *= ch.dim
    check = sum(m * irreducible_character(graph, hw).dim for hw, m in out.items())
    assert check == total, "dimension conservation failed: %d != %d" % (check, total)
    return DecompositionResult(out, total)


def _lr_expand(kap: tuple, mu: tuple) -> dict:
    """Expansion of the product of two Schur functions, by the tableau rule."""
    key = (kap, mu)
    if key in _LR_CACHE:
        return _LR_CACHE[key]
    if not mu:
        out = {kap: 1}
        _LR_CACHE[key] = out
        return out
    if not kap:
        out = {mu: 1}
        _LR_CACHE[key] = out
        return out
    total = sum(kap) + sum(mu)
    maxlen = len(kap) + len(mu)
    cap0 = kap[0] + mu[0]
    shapes = []

    # Enumerate weakly decreasing candidate shapes of the right total that
    # contain kap row by row; the first row is capped by kap[0] + mu[0].
    def gen(i, left, prev, prefix):
        if left == 0:
            if len(prefix) >= len(kap):
                shapes.append(tuple(prefix))
            return
        if i >= maxlen:
            return
        low = max(kap[i] if i < len(kap) else 0, 1)
        for val in range(min(prev, left, cap0), low - 1, -1):
            gen(i + 1, left - val, val, prefix + [val])

    gen(0, total, total, [])
    out = {}
    for lam in shapes:
        cnt = _count_lr_fillings(lam, kap, mu)
        if cnt:
            out[lam] = cnt
    _LR_CACHE[key] = out
    return out


def _count_lr_fillings(lam: tuple, kap: tuple, mu: tuple) -> int:
    """Number of lattice semistandard fillings of lam/kap with content mu."""
    kpad = tuple(kap) + (0,) * (len(lam) - len(kap))
    if any(k > l for k, l in zip(kpad, lam)):
        return 0
    cells = []
    for r, (lo, hi) in enumerate(zip(kpad, lam)):
        for c in range(hi - 1, lo - 1, -1):
            cells.append((r, c))
    nvals = len(mu)
    counts = [0] * nvals
    grid = {}
    result = 0

    def place(idx):
        nonlocal result
        if idx == len(cells):
            result += 1
            return
        r, c = cells[idx]
        right = grid.get((r, c + 1))
        above = grid.get((r - 1, c)) if r > 0 and c >= kpad[r - 1] else None
        above_in_skew = r > 0 and c >= kpad[r - 1] and c < lam[r - 1]
        hi = right if right is not None else nvals - 1
        lo = (above + 1) if above_in_skew else 0
        for t in range(lo, hi + 1):
            if counts[t] >= mu[t]:
                continue
            if t > 0 and counts[t - 1] <= counts[t]:
                continue
            counts[t] += 1
            grid[(r, c)] = t
            place(idx + 1)
            counts[t] -= 1
        grid.pop((r, c), None)

    place(0)
    return result


def lr_coefficient(lam, mus) -> int:
    """Multi-factor Littlewood-Richardson coefficient.

    The sizes of the factor partitions must add up to the size of lam.
    """
    lam = Partition(lam)
    mus = [Partition(m) for m in mus]
    if not mus:
        raise ValueError("need at least one factor")
    if sum(m.size for m in mus) != lam.size:
        raise ValueError(
            "size mismatch: |lam| = %d but factors add to %d"
            % (lam.size, sum(m.size for m in mus))
        )
    acc = {mus[0].parts: 1}
    for mu in mus[1:]:
        new: dict = {}
        for kap, mult in acc.items():
            for shape, c in _lr_expand(kap, mu.parts).items():
                new[shape] = new.get(shape, 0) + mult * c
        acc = new
    return acc.get(lam.parts, 0)


def partition_weight(lam, rank: int) -> tuple:
    """Fundamental-coordinate weight of a partition on A_rank."""
    parts = list(Partition(lam).parts)
    if len(parts) > rank + 1:
        raise ValueError("partition %r needs more than %d rows" % (tuple(parts), rank + 1))
    parts += [0] * (rank + 1 - len(parts))
    return tuple(parts[i] - parts[i + 1] for i in range(rank))


def extended_multiplicity(xi: ExtendedWeight, etas) -> int:
    """Multiplicity of the target weight inside the tensor of the eta factors.

    All weights must be positive integrable and live on the same graph;
    the size vectors of the factors must add up to the size of xi.
    """
    etas = list(etas)
    if not etas:
        raise ValueError("need at least one factor")
    graph = xi.graph
    for w in [xi] + etas:
        if w.graph != graph:
            raise ValueError("weights live on different graphs")
        if not w.is_positive_integrable():
            raise ValueError("weight %r is not positive integrable" % (w,))
    total = [0] * graph.rank
    for w in etas:
        for i, x in enumerate(w.size):
            total[i] += x
    if tuple(total) != xi.size:
        raise ValueError(
            "size mismatch: |xi| = %r but factors add to %r" % (xi.size, tuple(total))
        )
    dec = tensor_decompose(graph, [w.gamma for w in etas])
    return dec.get(xi.gamma, 0)
