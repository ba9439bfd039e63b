"""Exact point counting for filtered modules over small finite fields.

Two counting models live side by side: nilpotent matrices with invariant
flags (module :mod:`adecount.jordan`) and framed ADE quiver data with
graded flags (module :mod:`adecount.quiverlab`).  Both produce counts
that are polynomial in the field size; :mod:`adecount.pipeline` fits
those polynomials exactly and verifies degree and leading coefficient
against a Lie-theoretic multiplicity oracle (:mod:`adecount.lieoracle`).

All arithmetic is exact: field elements are table-driven integers,
polynomial fits use ``fractions.Fraction``.  No floating point anywhere.
"""

__version__ = "0.1.0"

from . import exactmath, rootdata, lieoracle, jordan, quiverlab, pipeline

__all__ = [
    "exactmath",
    "rootdata",
    "lieoracle",
    "jordan",
    "quiverlab",
    "pipeline",
    "__version__",
]
