"""Tests for nilpotent type counting and invariant flag counting.

Frozen small counts are cross-checked three ways: the full-scan census,
the centralizer quotient, and hand values.  The orbit factorization
behind the pair counts is regression-tested against a direct scan that
never factors anything.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adecount import _kernels
from adecount.exactmath import QPoly, field_from_q, gauss_binomial, gl_order
from adecount.jordan import (
    NilpotentRep,
    commutant_basis,
    count_filtered_direct,
    count_filtered_nilpotents,
    count_invariant_flags,
    count_nilpotents,
    filtered_count_polynomial,
    hall_polynomial,
    invariant_subspaces,
    module_type,
    orbit_count_polynomial,
    rep_of_type,
)
from adecount.lieoracle import lr_coefficient
from adecount.rootdata import Partition, nilpotent_orbit_dim

F2 = field_from_q(2)
F3 = field_from_q(3)


def test_module_type_zero_and_chain():
    # The zero operator drops full rank at once: one part of size n.
    assert module_type(F3, np.zeros((3, 3), np.int64)) == Partition((3,))
    # A single length-3 chain drops rank one step at a time.
    chain = rep_of_type(F2, (1, 1, 1))
    assert module_type(F2, chain) == Partition((1, 1, 1))
    assert chain[0, 1] == 1 and chain[1, 2] == 1


def test_module_type_round_trip():
    for n in range(0, 7):
        for lam in Partition.all_of(n):
            for field in (F2, F3):
                assert module_type(field, rep_of_type(field, lam)) == lam


def test_module_type_rejects_non_nilpotent():
    with pytest.raises(ValueError):
        module_type(F2, np.eye(2, dtype=np.int64))


def test_nilpotent_rep_validates_entries():
    with pytest.raises(ValueError):
        NilpotentRep(F2, np.array([[0, 2], [0, 0]], np.int64))


@settings(max_examples=40, deadline=None)
@given(
    q=st.sampled_from([2, 3]),
    n=st.integers(min_value=1, max_value=3),
    data=st.data(),
)
def test_module_type_is_conjugation_invariant(q, n, data):
    field = field_from_q(q)
    lams = list(Partition.all_of(n))
    lam = data.draw(st.sampled_from(lams))
    g = np.array(
        data.draw(
            st.lists(
                st.lists(st.integers(0, q - 1), min_size=n, max_size=n),
                min_size=n,
                max_size=n,
            )
        ),
        np.int64,
    )
    add, mul, neg, inv = field.tables
    if _kernels.mat_rank(g, add, mul, neg, inv) < n:
        return
    ok, ginv = _kernels.solve_right(g, np.eye(n, dtype=np.int64), add, mul, neg, inv)
    assert ok
    t = rep_of_type(field, lam)
    conj = _kernels.matmul(_kernels.matmul(ginv, t, add, mul), g, add, mul)
    assert module_type(field, conj) == lam


def test_count_frozen_rank_two():
    # Type (1, 1) is the rank-one square-zero class.
    assert count_nilpotents(F2, (1, 1)) == 3
    assert count_nilpotents(F3, (1, 1)) == 8
    # Type (2) is the zero matrix.
    assert count_nilpotents(F2, (2,)) == 1
    assert count_nilpotents(F2, Partition(())) == 1


def test_count_frozen_rank_three():
    assert count_nilpotents(F2, (2, 1)) == 21
    assert count_nilpotents(F2, (1, 1, 1)) == 42
    assert count_nilpotents(F3, (2, 1)) == 104
    # All nilpotents together: q^(n^2 - n).
    assert 1 + 21 + 42 == 2**6


def test_census_agrees_with_centralizer():
    for field in (F2, F3):
        for n in (1, 2, 3):
            for lam in Partition.all_of(n):
                a = count_nilpotents(field, lam, method="census")
                b = count_nilpotents(field, lam, method="centralizer")
                assert a == b, (field.q, lam)


def test_count_nilpotents_bad_method():
    with pytest.raises(ValueError):
        count_nilpotents(F2, (1, 1), method="scan")


def test_commutant_dimensions():
    # A single chain commutes exactly with its own powers.
    assert commutant_basis(F2, rep_of_type(F2, (1, 1))).shape[0] == 2
    assert commutant_basis(F3, rep_of_type(F3, (1, 1, 1))).shape[0] == 3
    assert commutant_basis(F2, rep_of_type(F2, (2, 1))).shape[0] == 5
    # The zero matrix commutes with everything.
    assert commutant_basis(F2, np.zeros((2, 2), np.int64)).shape[0] == 4


def test_scan_limit_guard():
    with pytest.raises(ValueError):
        count_nilpotents(field_from_q(23), (2, 1, 1))


def test_invariant_flags_chain_and_zero():
    for field in (F2, F3):
        q = field.q
        chain2 = NilpotentRep(field, rep_of_type(field, (1, 1)))
        assert count_invariant_flags(chain2, [(1,), (1,)]) == 1
        zero2 = NilpotentRep(field, rep_of_type(field, (2,)))
        assert count_invariant_flags(zero2, [(1,), (1,)]) == q + 1


def test_invariant_flags_hook():
    for field in (F2, F3, field_from_q(5)):
        q = field.q
        rep = NilpotentRep(field, rep_of_type(field, (2, 1)))
        assert count_invariant_flags(rep, [(1,), (1,), (1,)]) == 2 * q + 1


def test_invariant_flags_single_step():
    rep = NilpotentRep(F2, rep_of_type(F2, (2, 1)))
    assert count_invariant_flags(rep, [(2, 1)]) == 1
    assert count_invariant_flags(rep, [(1, 1, 1)]) == 0


def test_invariant_flags_size_mismatch():
    rep = NilpotentRep(F2, rep_of_type(F2, (2, 1)))
    with pytest.raises(ValueError):
        count_invariant_flags(rep, [(1,), (1,)])


def test_invariant_subspaces_zero_operator_keeps_everything():
    for field in (F2, F3):
        rep = NilpotentRep(field, np.zeros((3, 3), np.int64))
        for m in range(4):
            found = list(invariant_subspaces(rep, m))
            assert len(found) == gauss_binomial(3, m, field.q)


def test_invariant_subspaces_single_block_has_one_line():
    # One Jordan block: any invariant line is killed, so it must be the
    # kernel, which is one-dimensional.
    for lam in [(1, 1), (1, 1, 1)]:
        rep = NilpotentRep(F2, rep_of_type(F2, lam))
        lines = list(invariant_subspaces(rep, 1))
        assert len(lines) == 1
        img = _kernels.matmul(lines[0], rep.mat, *F2.tables[:2])
        assert not img.any()


def test_invariant_subspaces_dimension_range():
    rep = NilpotentRep(F2, np.zeros((2, 2), np.int64))
    with pytest.raises(ValueError):
        list(invariant_subspaces(rep, 3))


def test_filtered_matches_direct_scan():
    cases = [
        ((2,), [(1,), (1,)]),
        ((1, 1), [(1,), (1,)]),
        ((1, 1), [(2,)]),
    ]
    for field in (F2, F3):
        for lam, mus in cases:
            assert count_filtered_nilpotents(field, lam, mus) == count_filtered_direct(
                field, lam, mus
            ), (field.q, lam, mus)


def test_filtered_matches_direct_scan_rank_three():
    for field, lam, mus in [
        (F2, (2, 1), [(1,), (1,), (1,)]),
        (F2, (2, 1), [(1, 1), (1,)]),
        (F2, (2, 1), [(1,), (2,)]),
        (F3, (2, 1), [(1,), (1,), (1,)]),
    ]:
        assert count_filtered_nilpotents(field, lam, mus) == count_filtered_direct(
            field, lam, mus
        ), (field.q, lam, mus)


def test_filtered_frozen_values():
    assert count_filtered_nilpotents(F2, (2, 1), [(1,), (1,), (1,)]) == 105
    assert count_filtered_nilpotents(F3, (2, 1), [(1,), (1,), (1,)]) == 728


def test_orbit_polynomial_hook():
    poly = orbit_count_polynomial((2, 1))
    assert poly == QPoly((-1, -1, 0, 1, 1))
    assert str(poly) == "x^4 + x^3 - x - 1"


def test_orbit_polynomials_are_monic_of_known_degree():
    for n in range(1, 4):
        for lam in Partition.all_of(n):
            poly = orbit_count_polynomial(lam)
            assert poly.degree == nilpotent_orbit_dim(lam)
            assert poly.leading == 1
            assert poly.is_integral()


def test_filtered_polynomial_hook():
    poly = filtered_count_polynomial((2, 1), [(1,), (1,), (1,)])
    assert poly == QPoly((-1, -3, -2, 1, 3, 2))
    assert poly(2) == 105 and poly(3) == 728
    assert poly.leading == 2
    assert poly.degree == 5


def test_hall_polynomial_hook():
    assert hall_polynomial((2, 1), [(1,), (1,), (1,)]) == QPoly((1, 2))


def test_hall_polynomial_two_step():
    # On the zero module every line is invariant; on a chain only one is.
    assert hall_polynomial((2,), [(1,), (1,)]) == QPoly((1, 1))
    assert hall_polynomial((1, 1), [(1,), (1,)]) == QPoly((1,))


def test_hall_polynomial_symmetric_in_two_steps():
    a = hall_polynomial((2, 1), [(1, 1), (1,)])
    b = hall_polynomial((2, 1), [(1,), (1, 1)])
    assert a == b


def test_leading_coefficients_match_tableau_rule():
    mus = [(1,), (1,), (1,)]
    for lam in Partition.all_of(3):
        poly = filtered_count_polynomial(lam, mus)
        c = lr_coefficient(lam, mus)
        if poly.degree == -1:
            assert c == 0
        else:
            assert poly.leading == c, lam
