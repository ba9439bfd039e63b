"""Experiment orchestration: counting campaigns, fits, checks, reports.

An experiment is described by an :class:`ExperimentSpec` (which counting
model, which weight or partition data, which field sizes).  Running it
produces one :class:`CountRecord` per field size, optionally cached as
JSON lines; fitting the records produces a :class:`VerifyReport` whose
verdict compares the fitted polynomial against the predicted degree and
the oracle's multiplicity, with held-out samples as an empirical guard.

Everything is exact: counts are integers, fits are rational, and a
verdict can only pass when degree, leading coefficient, integrality and
every held-out residual agree simultaneously.
"""

import hashlib
import json
import time
import warnings
from fractions import Fraction

from .exactmath import (
    MODULUS_TABLE,
    QPoly,
    field_from_q,
    gl_order,
    lagrange_fit,
)
from .jordan import count_filtered_nilpotents
from .lieoracle import extended_multiplicity, lr_coefficient
from .quiverlab import count_filtered_bistable
from .rootdata import (
    ExtendedWeight,
    Partition,
    bistable_dim,
    dynkin_graph,
    flag_dim,
    graded_flag_dim,
    nilpotent_orbit_dim,
    partition_to_weight,
    weight_to_partition,
)

# Version of the counting conventions (vertex labeling, sign choices,
# field modulus table).  Cached records from other versions are ignored
# and recomputed.
CODE_VERSION = "1"

DEFAULT_BUDGET = 10**9


class BudgetExceeded(Exception):
    """The estimated enumeration cost is over the configured ceiling."""


class CrossCheckError(Exception):
    """The two counting models disagree on a value that must match."""


def _conventions_digest() -> str:
    payload = {
        "moduli": {str(k): list(v) for k, v in sorted(MODULUS_TABLE.items())},
    }
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()[:12]


class ExperimentSpec:
    """One counting campaign: a counting problem plus its field sizes.

    ``kind`` selects the model: ``hall`` counts filtered nilpotents from
    a partition and its factor list, ``quiver`` counts filtered bistable
    data from an extended weight and its factor weights, ``cross_check``
    carries quiver data but runs both models and compares.  ``q`` holds
    the sample sizes used for fitting, ``holdout`` extra sizes reserved
    for validating the fit.
    """

    KINDS = ("hall", "quiver", "cross_check")

    def __init__(self, kind, *, lam=None, mus=None, xi=None, etas=None,
                 q=(), holdout=()):
        if kind not in self.KINDS:
            raise ValueError("unknown experiment kind %r" % (kind,))
        self.kind = kind
        self.q = tuple(int(x) for x in q)
        self.holdout = tuple(int(x) for x in holdout)
        seen = set()
        for x in self.q + self.holdout:
            if x in seen:
                raise ValueError("field size %d listed twice" % x)
            seen.add(x)
            field_from_q(x)
        if kind == "hall":
            if lam is None or mus is None:
                raise ValueError("hall experiments need lam and mus")
            self.lam = Partition(lam)
            self.mus = [Partition(m) for m in mus]
            if sum(m.size for m in self.mus) != self.lam.size:
                raise ValueError(
                    "factor sizes add to %d but the type has size %d"
                    % (sum(m.size for m in self.mus), self.lam.size)
                )
            self.xi = None
            self.etas = None
        else:
            if xi is None or etas is None:
                raise ValueError("%s experiments need xi and etas" % kind)
            if not isinstance(xi, ExtendedWeight):
                raise ValueError("xi must be an ExtendedWeight")
            self.xi = xi
            self.etas = list(etas)
            for eta in self.etas:
                if eta.graph != xi.graph:
                    raise ValueError("all weights must live on one graph")
            for w in [xi] + self.etas:
                if not w.is_positive_integrable():
                    raise ValueError(
                        "weight %r is not positive-integrable" % (w,)
                    )
            totals = [0] * xi.graph.rank
            for eta in self.etas:
                for i, e in enumerate(eta.delta):
                    totals[i] += e
            if tuple(totals) != xi.delta:
                raise ValueError(
                    "factor sizes add to %r but the weight has size %r"
                    % (tuple(totals), xi.delta)
                )
            self.lam = None
            self.mus = None

    def degree_bound(self) -> int:
        """Predicted degree of the counting polynomial.

        A flag dimension plus half a sum of variety dimensions; the half
        must be integral, otherwise the spec is rejected as malformed
        before any counting starts.
        """
        if self.kind == "hall":
            base = flag_dim([m.size for m in self.mus])
            half = nilpotent_orbit_dim(self.lam) + sum(
                nilpotent_orbit_dim(m) for m in self.mus
            )
        else:
            base = graded_flag_dim([eta.delta for eta in self.etas])
            half = bistable_dim(self.xi) + sum(
                bistable_dim(eta) for eta in self.etas
            )
        if half % 2 != 0:
            raise ValueError(
                "malformed spec: dimension sum %d is odd, the degree "
                "formula would not be an integer" % half
            )
        return base + half // 2

    def expected_leading(self) -> int:
        """Oracle multiplicity the leading coefficient must equal."""
        if self.kind == "hall":
            return lr_coefficient(self.lam, self.mus)
        return extended_multiplicity(self.xi, self.etas)

    def count_one(self, q: int):
        """(raw, normalized) pair count at one field size."""
        if self.kind == "hall":
            n = count_filtered_nilpotents(field_from_q(q), self.lam, self.mus)
            return n, n
        normalized = count_filtered_bistable(self.xi, self.etas, q)
        order = 1
        for n in self.xi.v:
            order *= gl_order(n, q)
        return normalized * order, normalized

    def estimate_ops(self, q: int) -> int:
        """Upper estimate of the field operations one count needs."""
        if self.kind == "hall":
            n = self.lam.size
            return q ** (n * n)
        graph = self.xi.graph
        v = self.xi.v
        d = self.xi.delta
        x_cells = sum(v[t] * v[s] for s, t in graph.arrows)
        p_cells = sum(v[i] * d[i] for i in graph.vertices)
        free = sum(e * e for e in v)
        return q ** (x_cells + p_cells + free)

    def fingerprint(self) -> str:
        payload = self.to_json()
        if self.kind != "hall":
            graph = self.xi.graph
            payload["conventions"] = {
                "edges": [list(e) for e in graph.edges],
                "eps": list(graph.eps),
            }
        payload["tables"] = _conventions_digest()
        blob = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        out = {"kind": self.kind, "q": list(self.q), "holdout": list(self.holdout)}
        if self.kind == "hall":
            out["lambda"] = list(self.lam.parts)
            out["mus"] = [list(m.parts) for m in self.mus]
        else:
            graph = self.xi.graph
            out["family"] = graph.family
            out["rank"] = graph.rank
            out["xi"] = {"u": list(self.xi.u), "v": list(self.xi.v)}
            out["etas"] = [
                {"u": list(e.u), "v": list(e.v)} for e in self.etas
            ]
        return out

    @staticmethod
    def from_json(data: dict) -> "ExperimentSpec":
        kind = data.get("kind")
        q = data.get("q", [])
        holdout = data.get("holdout", [])
        if kind == "hall":
            return ExperimentSpec(
                "hall",
                lam=data["lambda"],
                mus=data["mus"],
                q=q,
                holdout=holdout,
            )
        graph = dynkin_graph(data["family"], int(data["rank"]))
        xi = ExtendedWeight(graph, data["xi"]["u"], data["xi"]["v"])
        etas = [ExtendedWeight(graph, e["u"], e["v"]) for e in data["etas"]]
        return ExperimentSpec(kind, xi=xi, etas=etas, q=q, holdout=holdout)

    def __repr__(self):
        if self.kind == "hall":
            body = "lam=%r, mus=%r" % (self.lam, self.mus)
        else:
            body = "xi=%r, %d etas" % (self.xi, len(self.etas))
        return "ExperimentSpec(%s, %s, q=%r)" % (self.kind, body, self.q)


class CountRecord:
    """One counted point: field size, raw and normalized values.

    Wall time is informational and excluded from equality; two runs of
    the same spec under the same code version must agree on everything
    else.
    """

    def __init__(self, fingerprint, q, raw, normalized, wall_time, version):
        self.fingerprint = fingerprint
        self.q = int(q)
        self.raw = int(raw)
        self.normalized = int(normalized)
        self.wall_time = float(wall_time)
        self.version = version

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "q": self.q,
            "raw": self.raw,
            "normalized": self.normalized,
            "wall_time": self.wall_time,
            "version": self.version,
        }

    @staticmethod
    def from_json(data: dict) -> "CountRecord":
        return CountRecord(
            data["fingerprint"],
            data["q"],
            data["raw"],
            data["normalized"],
            data["wall_time"],
            data["version"],
        )

    def __eq__(self, other):
        return isinstance(other, CountRecord) and (
            self.fingerprint,
            self.q,
            self.raw,
            self.normalized,
            self.version,
        ) == (
            other.fingerprint,
            other.q,
            other.raw,
            other.normalized,
            other.version,
        )

    def __repr__(self):
        return "CountRecord(q=%d, normalized=%d)" % (self.q, self.normalized)


def cache_store(path, records):
    """Append records to a JSON-lines cache file."""
    with open(path, "a") as sink:
        for rec in records:
            sink.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")


def cache_load(path):
    """Parse every valid record from a JSON-lines cache file.

    Corrupt lines are skipped with a warning; the caller recounts the
    missing points.  A missing file is an empty cache.
    """
    records = []
    try:
        handle = open(path)
    except FileNotFoundError:
        return records
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                records.append(CountRecord.from_json(data))
            except (ValueError, KeyError, TypeError):
                warnings.warn(
                    "skipping corrupt cache line %d in %s" % (lineno, path)
                )
    return records


def run_experiment(spec, cache=None, budget=DEFAULT_BUDGET, threads=1):
    """Count the spec at every listed field size, including holdouts.

    Records come from the cache when the fingerprint and code version
    match, otherwise they are computed and appended to the cache.  The
    total estimated cost is compared against the budget before anything
    runs.  ``threads`` is validated for interface compatibility; the
    counting kernels run on one core.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    qs = list(spec.q) + list(spec.holdout)
    if budget is not None:
        total = sum(spec.estimate_ops(q) for q in qs)
        if total > budget:
            raise BudgetExceeded(
                "estimated %d field operations exceed the budget of %d"
                % (total, budget)
            )
    fingerprint = spec.fingerprint()
    known = {}
    if cache is not None:
        for rec in cache_load(cache):
            if rec.fingerprint == fingerprint and rec.version == CODE_VERSION:
                known[rec.q] = rec
    records = []
    fresh = []
    for q in qs:
        if q in known:
            records.append(known[q])
            continue
        start = time.perf_counter()
        raw, normalized = spec.count_one(q)
        rec = CountRecord(
            fingerprint,
            q,
            raw,
            normalized,
            time.perf_counter() - start,
            CODE_VERSION,
        )
        records.append(rec)
        fresh.append(rec)
    if cache is not None and fresh:
        cache_store(cache, fresh)
    return records


class VerifyReport:
    """Outcome of fitting counts and checking them against the theory."""

    def __init__(self, spec, poly, expected_degree, expected_leading,
                 residuals, checks, verdict):
        self.spec = spec
        self.poly = poly
        self.expected_degree = expected_degree
        self.actual_degree = poly.degree
        self.expected_leading = expected_leading
        self.actual_leading = poly.leading
        self.residuals = dict(residuals)
        self.checks = dict(checks)
        self.verdict = verdict

    @property
    def passed(self) -> bool:
        return self.verdict != "FAIL"

    def rows(self):
        """(check, expected, actual, ok) tuples for report rendering."""
        out = [
            (
                "degree",
                str(self.expected_degree),
                str(self.actual_degree),
                self.checks["degree"],
            ),
            (
                "leading",
                str(self.expected_leading),
                str(self.actual_leading),
                self.checks["leading"],
            ),
            (
                "integral coefficients",
                "yes",
                "yes" if self.checks["integral"] else "no",
                self.checks["integral"],
            ),
        ]
        for q in sorted(self.residuals):
            out.append(
                (
                    "residual at %d" % q,
                    "0",
                    str(self.residuals[q]),
                    self.residuals[q] == 0,
                )
            )
        return out

    def summary(self) -> str:
        return "degree %d, leading %s, %s" % (
            self.actual_degree,
            self.actual_leading,
            self.verdict,
        )

    def __repr__(self):
        return "VerifyReport(%s, poly=%s)" % (self.verdict, self.poly)


def fit_and_verify(spec, records) -> VerifyReport:
    """Fit the counts exactly and compare them with the theory.

    The fit uses exactly bound + 1 of the sample points; every other
    record, held-out points included, must land on the polynomial with
    residual zero.  The verdict passes only when the degree, the leading
    coefficient, integrality and all residuals agree.  All-zero counts
    give the special verdict "zero polynomial", legitimate exactly when
    the oracle multiplicity is zero.
    """
    bound = spec.degree_bound()
    expected_leading = spec.expected_leading()
    by_q = {rec.q: rec for rec in records}
    sample = [q for q in sorted(spec.q) if q in by_q]
    held = [q for q in sorted(spec.holdout) if q in by_q]
    if len(sample) < bound + 1:
        raise ValueError(
            "need %d sample points for a degree-%d fit, have %d"
            % (bound + 1, bound, len(sample))
        )
    if not held:
        raise ValueError("need at least one held-out point")
    fit_qs = sample[: bound + 1]
    poly = lagrange_fit([(q, by_q[q].normalized) for q in fit_qs])
    residuals = {}
    for q in sample[bound + 1 :] + held:
        residuals[q] = by_q[q].normalized - poly(Fraction(q))
    if poly.is_zero():
        checks = {
            "degree": expected_leading == 0,
            "leading": expected_leading == 0,
            "integral": True,
            "holdout": all(r == 0 for r in residuals.values()),
        }
        verdict = (
            "zero polynomial"
            if all(checks.values())
            else "FAIL"
        )
        return VerifyReport(
            spec, poly, bound, expected_leading, residuals, checks, verdict
        )
    checks = {
        "degree": poly.degree == bound,
        "leading": poly.leading == expected_leading,
        "integral": poly.is_integral(),
        "holdout": all(r == 0 for r in residuals.values()),
    }
    verdict = "PASS" if all(checks.values()) else "FAIL"
    return VerifyReport(
        spec, poly, bound, expected_leading, residuals, checks, verdict
    )


def cross_check_a_type(n, xi, etas, q_list):
    """Compare the two models on concentrated A-type data.

    ``n`` names the A graph with n - 1 vertices, so partitions with at
    most n parts; the weights must be concentrated at vertex 0 so they
    translate to partitions.  Any disagreement raises
    :class:`CrossCheckError` carrying both values.
    """
    graph = dynkin_graph("A", n - 1)
    if xi.graph != graph:
        raise ValueError("weight does not live on the A graph of rank %d" % (n - 1))
    lam = weight_to_partition(xi)
    mus = [weight_to_partition(eta) for eta in etas]
    rows = []
    for q in q_list:
        left = count_filtered_bistable(xi, etas, q)
        right = count_filtered_nilpotents(field_from_q(q), lam, mus)
        if left != right:
            raise CrossCheckError(
                "models disagree at q=%d: quiver %d, nilpotent %d "
                "(lam=%r, mus=%r)" % (q, left, right, lam, mus)
            )
        rows.append(
            {
                "q": q,
                "quiver": left,
                "nilpotent": right,
                "lambda": list(lam.parts),
                "mus": [list(m.parts) for m in mus],
            }
        )
    return rows


def emit_report(report, fmt="md") -> str:
    """Render a verify report as Markdown, CSV or JSON."""
    rows = report.rows()
    if fmt == "md":
        lines = [
            "| check | expected | actual | ok |",
            "| --- | --- | --- | --- |",
        ]
        for name, want, got, ok in rows:
            lines.append(
                "| %s | %s | %s | %s |" % (name, want, got, "yes" if ok else "NO")
            )
        lines.append("")
        lines.append("fit: %s" % report.poly)
        lines.append("verdict: %s" % report.summary())
        return "\n".join(lines)
    if fmt == "csv":
        lines = ["check,expected,actual,ok"]
        for name, want, got, ok in rows:
            lines.append(
                "%s,%s,%s,%s" % (name, want, got, "yes" if ok else "NO")
            )
        lines.append("summary,,,%s" % report.summary())
        return "\n".join(lines)
    if fmt == "json":
        return json.dumps(
            {
                "spec": report.spec.to_json(),
                "polynomial": [str(c) for c in report.poly.coeffs],
                "expected_degree": report.expected_degree,
                "actual_degree": report.actual_degree,
                "expected_leading": str(report.expected_leading),
                "actual_leading": str(report.actual_leading),
                "residuals": {str(q): str(r) for q, r in report.residuals.items()},
                "checks": report.checks,
                "verdict": report.verdict,
                "summary": report.summary(),
            },
            indent=2,
            sort_keys=True,
        )
    raise ValueError("unknown report format %r" % (fmt,))
