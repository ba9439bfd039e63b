"""Built-in acceptance catalog: the checks this package must pass.

Each criterion is a function returning (ok, detail).  The catalog runs
them in order, one line per criterion; the same functions back the
acceptance test suite and the ``catalog`` CLI subcommand.
"""

import time

from . import _kernels
from .exactmath import QPoly, field_from_q, gl_order
from .jordan import count_nilpotents, orbit_count_polynomial
from .lieoracle import (
    extended_multiplicity,
    lr_coefficient,
    partition_weight,
    tensor_decompose,
    weyl_dim,
)
from .pipeline import ExperimentSpec, cross_check_a_type, fit_and_verify, run_experiment
from .quiverlab import (
    ADHMDatum,
    count_bistable,
    count_filtered_bistable,
    find_bistable,
    module_op,
    op_product,
    _bistable_stream,
)
from .rootdata import (
    Partition,
    dynkin_graph,
    nilpotent_orbit_dim,
    partition_to_weight,
    weight_from_dims,
)

A1 = dynkin_graph("A", 1)
A2 = dynkin_graph("A", 2)

_REPORTS: dict = {}


def _quiver_spec(d, v, etas_dims, q, holdout, graph=None):
    graph = graph or (A1 if len(d) == 1 else A2)
    xi = weight_from_dims(graph, d, v)
    etas = [weight_from_dims(graph, ed, ev) for ed, ev in etas_dims]
    return ExperimentSpec("quiver", xi=xi, etas=etas, q=q, holdout=holdout)


def _catalog_specs():
    """Every fit-style experiment the catalog runs, by name."""
    std1 = ((1,), (0,))
    std2 = ((1, 0), (0, 0))
    return {
        "hall-square": ExperimentSpec(
            "hall", lam=(1, 1), mus=[(1,), (1,)], q=(2, 3, 4, 5), holdout=(7, 8)
        ),
        "hall-line": ExperimentSpec(
            "hall", lam=(2,), mus=[(1,), (1,)], q=(2, 3, 4, 5), holdout=(7, 8)
        ),
        "quiver-tensor-cube": _quiver_spec(
            (3,), (1,), [std1, std1, std1], (2, 3, 4, 5, 7, 8), (9,)
        ),
        "quiver-pair-wedge": _quiver_spec(
            (2, 0), (1, 0), [std2, std2], (2, 3, 4), (5,)
        ),
        "quiver-pair-sym": _quiver_spec(
            (2, 0), (0, 0), [std2, std2], (2, 3, 4), (5,)
        ),
    }


def _report(name):
    if name not in _REPORTS:
        spec = _catalog_specs()[name]
        records = run_experiment(spec)
        _REPORTS[name] = (records, fit_and_verify(spec, records))
    return _REPORTS[name]


def _partition_lists(n):
    """All ordered lists of nonempty partitions whose sizes add to n."""
    if n == 0:
        return [[]]
    out = []
    for k in range(1, n + 1):
        for head in Partition.all_of(k):
            for tail in _partition_lists(n - k):
                out.append([head] + tail)
    return out


def criterion_1():
    """Hall golden run: lam=(1,1) against two singletons fits x^2 - 1."""
    records, report = _report("hall-square")
    counts = [r.normalized for r in records[:4]]
    ok = (
        counts == [3, 8, 15, 24]
        and report.poly == QPoly([-1, 0, 1])
        and report.actual_degree == 2
        and report.actual_leading == 1
        and report.expected_leading == lr_coefficient((1, 1), [(1,), (1,)])
        and report.verdict == "PASS"
    )
    return ok, "counts %r, fit %s, %s" % (counts, report.poly, report.verdict)


def criterion_2():
    """Hall golden run: lam=(2) against two singletons fits x + 1."""
    _, report = _report("hall-line")
    ok = (
        report.poly == QPoly([1, 1])
        and report.actual_degree == 1
        and report.actual_leading == 1
        and report.verdict == "PASS"
    )
    return ok, "fit %s, %s" % (report.poly, report.verdict)


def criterion_3():
    """Orbit polynomials are monic of the orbit dimension, |lam| <= 3."""
    checked = 0
    for n in (1, 2, 3):
        for lam in Partition.all_of(n):
            poly = orbit_count_polynomial(lam)
            if poly.degree != nilpotent_orbit_dim(lam) or poly.leading != 1:
                return False, "type %r fitted %s" % (lam, poly)
            for q in (2, 3, 5, 7):
                if poly(q) != count_nilpotents(field_from_q(q), lam):
                    return False, "type %r misses the count at q=%d" % (lam, q)
            checked += 1
    return True, "%d types monic with matching checkpoints" % checked


def criterion_4():
    """Structure counts: q^2 - 1 for the good weight, 0 for the dead one."""
    good = weight_from_dims(A1, (2,), (1,))
    dead = weight_from_dims(A1, (1,), (1,))
    got = [count_bistable(good, q) for q in (2, 3, 4, 5)]
    zeros = [count_bistable(dead, q) for q in (2, 3, 4, 5)]
    ok = got == [q * q - 1 for q in (2, 3, 4, 5)] and zeros == [0, 0, 0, 0]
    return ok, "counts %r, empty-weight counts %r" % (got, zeros)


def criterion_5():
    """Quiver tensor run: three singleton factors fit degree 5, leading 2."""
    _, report = _report("quiver-tensor-cube")
    spec = _catalog_specs()["quiver-tensor-cube"]
    ok = (
        report.actual_degree == 5
        and report.expected_degree == 5
        and report.actual_leading == 2
        and report.expected_leading == extended_multiplicity(spec.xi, spec.etas)
        and report.verdict == "PASS"
    )
    return ok, "fit %s, %s" % (report.poly, report.verdict)


def criterion_6():
    """Rank-two pair: the two length-two filtrations fit x^2-1 and x+1."""
    _, wedge = _report("quiver-pair-wedge")
    _, sym = _report("quiver-pair-sym")
    dec = tensor_decompose(A2, [(1, 0), (1, 0)])
    dims = sum(mult * weyl_dim(A2, hw) for hw, mult in dec.multiplicities.items())
    ok = (
        wedge.poly == QPoly([-1, 0, 1])
        and wedge.verdict == "PASS"
        and sym.poly == QPoly([1, 1])
        and sym.verdict == "PASS"
        and wedge.actual_leading == dec.get((0, 1), 0)
        and sym.actual_leading == dec.get((2, 0), 0)
        and dims == 9
    )
    return ok, "fits %s and %s, tensor square splits 9 = %s" % (
        wedge.poly,
        sym.poly,
        " + ".join(str(weyl_dim(A2, hw)) for hw in sorted(dec.multiplicities)),
    )


def criterion_7():
    """Both models agree on every concentrated rank-two spec, |d| <= 3."""
    combos = 0
    for n in (1, 2, 3):
        for lam in Partition.all_of(n):
            xi = partition_to_weight(A2, lam)
            for mus in _partition_lists(n):
                etas = [partition_to_weight(A2, m) for m in mus]
                cross_check_a_type(3, xi, etas, [2, 3])
                combos += 1
    ok = combos >= 6
    return ok, "%d (weight, factor-list) combinations, q in {2, 3}" % combos


def criterion_8():
    """Tableau rule and character oracle agree; 8x8 fills 64 dimensions."""
    graph = dynkin_graph("A", 5)
    checked = 0
    for n in range(2, 6):
        for lam in Partition.all_of(n):
            target = partition_weight(lam, 5)
            for mus in _partition_lists(n):
                if len(mus) not in (2, 3):
                    continue
                dec = tensor_decompose(
                    graph, [partition_weight(m, 5) for m in mus]
                )
                if lr_coefficient(lam, mus) != dec.get(target, 0):
                    return False, "mismatch at lam=%r, mus=%r" % (lam, mus)
                checked += 1
    adj = tensor_decompose(A2, [(1, 1), (1, 1)])
    total = sum(mult * weyl_dim(A2, hw) for hw, mult in adj.multiplicities.items())
    if total != 64 or adj.get((1, 1), 0) != 2:
        return False, "adjoint square sums to %d" % total
    return True, "%d coefficient pairs equal, adjoint square is 64" % checked


def criterion_9():
    """Hard property suite: signs, gauge moves, divisibility, fits."""
    # Induced operators multiply exactly on flat data.
    for graph, d, v, q in [(A1, (2,), (1,), 3), (A2, (2, 1), (1, 1), 2)]:
        field = field_from_q(q)
        add, mul = field.add_table, field.mul_table
        data = [find_bistable(weight_from_dims(graph, d, v), field)]
        data.append(ADHMDatum.zero(graph, field, d, v))
        words = [("u", i) for i in graph.vertices]
        words += [("loop", i) for i in graph.vertices]
        words += [("path", (a,)) for a in range(len(graph.arrows))]
        for datum in data:
            for f in words:
                for fp in words:
                    lhs = _kernels.matmul(
                        module_op(datum, f), module_op(datum, fp), add, mul
                    )
                    if (lhs != op_product(datum, f, fp)).any():
                        return False, "operator product breaks at %r * %r" % (f, fp)
    # Sign flips and vertex relabelings leave every count alone.
    xi = weight_from_dims(A2, (2, 0), (1, 0))
    std = weight_from_dims(A2, (1, 0), (0, 0))
    flip = A2.with_eps(True)
    swap = A2.relabel((1, 0))
    for q in (2, 3):
        base = count_bistable(xi, q)
        if base != count_bistable(weight_from_dims(flip, (2, 0), (1, 0)), q):
            return False, "sign flip changes the structure count at q=%d" % q
        if base != count_bistable(weight_from_dims(swap, (0, 2), (0, 1)), q):
            return False, "relabeling changes the structure count at q=%d" % q
    filtered = count_filtered_bistable(xi, [std, std], 2)
    flip_std = weight_from_dims(flip, (1, 0), (0, 0))
    if filtered != count_filtered_bistable(
        weight_from_dims(flip, (2, 0), (1, 0)), [flip_std, flip_std], 2
    ):
        return False, "sign flip changes the filtered count"
    # Raw scans divide exactly by the gauge group order.
    for graph, d, v, q in [(A1, (2,), (1,), 3), (A2, (2, 0), (1, 0), 2)]:
        w = weight_from_dims(graph, d, v)
        field = field_from_q(q)
        raw = sum(1 for _ in _bistable_stream(field, w))
        order = 1
        for e in w.v:
            order *= gl_order(e, q)
        if raw % order != 0:
            return False, "raw count %d not divisible by %d" % (raw, order)
    # Every catalog fit has integer coefficients and exact holdouts.
    for name in _catalog_specs():
        _, report = _report(name)
        if not report.checks["integral"]:
            return False, "%s fit has fractional coefficients" % name
        if any(r != 0 for r in report.residuals.values()):
            return False, "%s fit misses a held-out point" % name
    return True, "sign, gauge, divisibility and fit properties all hold"


def criterion_10():
    """Every catalog spec passes the degree-parity precheck."""
    degrees = {}
    for name, spec in _catalog_specs().items():
        degrees[name] = spec.degree_bound()
    for n in (1, 2, 3):
        for lam in Partition.all_of(n):
            xi = partition_to_weight(A2, lam)
            for mus in _partition_lists(n):
                etas = [partition_to_weight(A2, m) for m in mus]
                spec = ExperimentSpec(
                    "quiver", xi=xi, etas=etas, q=(2,), holdout=(3,)
                )
                spec.degree_bound()
    return True, "degree formula integral on all specs: %s" % (
        ", ".join("%s=%d" % kv for kv in sorted(degrees.items()))
    )


CRITERIA = [
    ("criterion-1", "hall golden run (1,1)", criterion_1),
    ("criterion-2", "hall golden run (2)", criterion_2),
    ("criterion-3", "orbit monicity sweep", criterion_3),
    ("criterion-4", "structure count values", criterion_4),
    ("criterion-5", "quiver tensor cube run", criterion_5),
    ("criterion-6", "rank-two filtration pair", criterion_6),
    ("criterion-7", "cross-model identity sweep", criterion_7),
    ("criterion-8", "oracle consistency", criterion_8),
    ("criterion-9", "property suite", criterion_9),
    ("criterion-10", "degree parity precheck", criterion_10),
]


def run_catalog(emit=print) -> bool:
    """Run every criterion, one line each; True when all pass."""
    all_ok = True
    for slug, title, func in CRITERIA:
        start = time.perf_counter()
        try:
            ok, detail = func()
        except Exception as exc:
            ok, detail = False, "raised %s: %s" % (type(exc).__name__, exc)
        elapsed = time.perf_counter() - start
        emit(
            "%s %s (%s): %s [%.2fs]"
            % ("PASS" if ok else "FAIL", slug, title, detail, elapsed)
        )
        all_ok = all_ok and ok
    return all_ok
