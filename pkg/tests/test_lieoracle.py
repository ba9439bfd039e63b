"""Tests for the multiplicity oracles.

The strongest checks here are cross-checks between the two independent
routes: Freudenthal characters peeled out of tensor products on one
side, the tableau rule for products of Schur functions on the other.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adecount.lieoracle import (
    Character,
    dominant_representative,
    extended_multiplicity,
    irreducible_character,
    lr_coefficient,
    partition_weight,
    positive_roots,
    tensor_decompose,
    weyl_dim,
    weyl_orbit,
)
from adecount.rootdata import ExtendedWeight, Partition, dynkin_graph


def test_positive_root_counts():
    assert len(positive_roots(dynkin_graph("A", 1))) == 1
    assert len(positive_roots(dynkin_graph("A", 2))) == 3
    assert len(positive_roots(dynkin_graph("A", 4))) == 10
    assert len(positive_roots(dynkin_graph("D", 4))) == 12
    assert len(positive_roots(dynkin_graph("E", 6))) == 36


def test_highest_roots():
    # The last root in height order is the highest root.
    assert positive_roots(dynkin_graph("A", 2))[-1] == (1, 1)
    # Coefficient 2 sits at the branch vertex of D4.
    assert positive_roots(dynkin_graph("D", 4))[-1] == (1, 2, 1, 1)


def test_roots_are_closed_under_negation_symmetry():
    # For A3 the positive roots are exactly the interval sums.
    roots = set(positive_roots(dynkin_graph("A", 3)))
    expected = set()
    for a in range(3):
        for b in range(a, 3):
            expected.add(tuple(1 if a <= i <= b else 0 for i in range(3)))
    assert roots == expected


def test_dominant_representative():
    g = dynkin_graph("A", 2)
    assert dominant_representative(g, (-1, 0)) == (0, 1)
    assert dominant_representative(g, (1, 1)) == (1, 1)
    assert dominant_representative(g, (-1, -1)) == (1, 1)


def test_weyl_orbit_sizes():
    assert len(weyl_orbit(dynkin_graph("A", 2), (1, 0))) == 3
    assert len(weyl_orbit(dynkin_graph("A", 2), (1, 1))) == 6
    assert len(weyl_orbit(dynkin_graph("A", 3), (1, 0, 0))) == 4
    assert len(weyl_orbit(dynkin_graph("D", 4), (1, 0, 0, 0))) == 8
    assert len(weyl_orbit(dynkin_graph("A", 2), (0, 0))) == 1


def test_weyl_dim_small():
    assert weyl_dim(dynkin_graph("A", 1), (3,)) == 4
    assert weyl_dim(dynkin_graph("A", 2), (1, 0)) == 3
    assert weyl_dim(dynkin_graph("A", 2), (1, 1)) == 8
    assert weyl_dim(dynkin_graph("A", 2), (2, 2)) == 27
    assert weyl_dim(dynkin_graph("A", 3), (0, 1, 0)) == 6
    # Vertex 1 is the branch vertex in our D4 labeling.
    assert weyl_dim(dynkin_graph("D", 4), (0, 1, 0, 0)) == 28
    assert weyl_dim(dynkin_graph("E", 6), (1, 0, 0, 0, 0, 0)) == 27


def test_character_rank_one():
    ch = irreducible_character(dynkin_graph("A", 1), (2,))
    assert ch.dim == 3
    assert ch.weights == {(2,): 1, (0,): 1, (-2,): 1}
    assert ch.dominant == {(2,): 1, (0,): 1}


def test_character_adjoint_a2():
    ch = irreducible_character(dynkin_graph("A", 2), (1, 1))
    assert ch.dim == 8
    assert ch.dominant == {(1, 1): 1, (0, 0): 2}
    assert ch.weights[(0, 0)] == 2
    assert ch.weights[(-1, 2)] == 1


def test_character_27_of_a2():
    ch = irreducible_character(dynkin_graph("A", 2), (2, 2))
    assert ch.dim == 27
    assert ch.dominant == {(2, 2): 1, (3, 0): 1, (0, 3): 1, (1, 1): 2, (0, 0): 3}


def test_character_vector_rep_a3():
    ch = irreducible_character(dynkin_graph("A", 3), (0, 1, 0))
    assert ch.dim == 6
    assert all(m == 1 for m in ch.weights.values())


def test_character_adjoint_d4():
    ch = irreducible_character(dynkin_graph("D", 4), (0, 1, 0, 0))
    assert ch.dim == 28
    # Zero weight multiplicity equals the rank for an adjoint representation.
    assert ch.dominant[(0, 0, 0, 0)] == 4


def test_character_rejects_non_dominant():
    with pytest.raises(ValueError):
        irreducible_character(dynkin_graph("A", 2), (-1, 0))


def test_character_is_memoized():
    a = irreducible_character(dynkin_graph("A", 2), (1, 1))
    b = irreducible_character(dynkin_graph("A", 2), (1, 1))
    assert a is b


def test_tensor_square_of_vector_rep():
    dec = tensor_decompose(dynkin_graph("A", 2), [(1, 0), (1, 0)])
    assert dec.multiplicities == {(2, 0): 1, (0, 1): 1}
    assert dec.total_dim == 9


def test_tensor_adjoint_square_a2():
    dec = tensor_decompose(dynkin_graph("A", 2), [(1, 1), (1, 1)])
    assert dec.multiplicities == {
        (2, 2): 1,
        (3, 0): 1,
        (0, 3): 1,
        (1, 1): 2,
        (0, 0): 1,
    }
    assert dec.total_dim == 64


def test_tensor_cube_rank_one():
    dec = tensor_decompose(dynkin_graph("A", 1), [(1,), (1,), (1,)])
    assert dec.multiplicities == {(3,): 1, (1,): 2}


def test_tensor_single_factor():
    dec = tensor_decompose(dynkin_graph("A", 3), [(1, 0, 1)])
    assert dec.multiplicities == {(1, 0, 1): 1}


def test_tensor_commutes():
    g = dynkin_graph("A", 2)
    ab = tensor_decompose(g, [(2, 0), (1, 1)])
    ba = tensor_decompose(g, [(1, 1), (2, 0)])
    assert ab.multiplicities == ba.multiplicities


def test_lr_classics():
    assert lr_coefficient((2,), [(1,), (1,)]) == 1
    assert lr_coefficient((1, 1), [(1,), (1,)]) == 1
    assert lr_coefficient((2, 1), [(1,), (1,), (1,)]) == 2
    assert lr_coefficient((2, 2), [(2, 1), (1,)]) == 1
    assert lr_coefficient((3, 2, 1), [(2, 1), (2, 1)]) == 2
    assert lr_coefficient((6,), [(3,), (2,), (1,)]) == 1


def test_lr_size_mismatch():
    with pytest.raises(ValueError):
        lr_coefficient((2, 1), [(1,), (1,)])


def test_partition_weight():
    assert partition_weight((2, 1), 2) == (1, 1)
    assert partition_weight((3,), 2) == (3, 0)
    assert partition_weight((), 3) == (0, 0, 0)
    assert partition_weight((2, 2), 1) == (0,)
    with pytest.raises(ValueError):
        partition_weight((1, 1, 1), 1)


def test_lr_matches_tensor_oracle():
    # The tableau rule and the Freudenthal route must agree on type A
    # whenever the rank is large enough to avoid row truncation.
    g = dynkin_graph("A", 4)
    lams = list(Partition.all_of(4))
    for na in range(1, 4):
        for mua in Partition.all_of(na):
            for mub in Partition.all_of(4 - na):
                dec = tensor_decompose(
                    g, [partition_weight(mua, 4), partition_weight(mub, 4)]
                )
                for lam in lams:
                    want = dec.get(partition_weight(lam, 4))
                    got = lr_coefficient(lam, [mua, mub])
                    assert got == want, (lam, mua, mub)


@settings(max_examples=25, deadline=None)
@given(
    u=st.integers(min_value=0, max_value=3),
    v=st.integers(min_value=0, max_value=3),
)
def test_tensor_with_trivial_factor(u, v):
    g = dynkin_graph("A", 2)
    dec = tensor_decompose(g, [(u, v), (0, 0)])
    assert dec.multiplicities == {(u, v): 1}


def test_extended_multiplicity_rank_one():
    g = dynkin_graph("A", 1)
    eta = ExtendedWeight(g, (1,), (0,))
    # gamma 0, size 2: the invariant line in the tensor square.
    xi = ExtendedWeight(g, (1,), (1,))
    assert xi.size == (2,)
    assert extended_multiplicity(xi, [eta, eta]) == 1
    # gamma 1, size 3: two copies inside the tensor cube.
    xi3 = ExtendedWeight(g, (2,), (1,))
    assert xi3.size == (3,)
    assert extended_multiplicity(xi3, [eta, eta, eta]) == 2


def test_extended_multiplicity_errors():
    g = dynkin_graph("A", 1)
    eta = ExtendedWeight(g, (1,), (0,))
    with pytest.raises(ValueError):
        extended_multiplicity(ExtendedWeight(g, (1,), (1,)), [eta])
    with pytest.raises(ValueError):
        extended_multiplicity(ExtendedWeight(g, (0,), (1,)), [eta, eta])
    g2 = dynkin_graph("A", 2)
    with pytest.raises(ValueError):
        extended_multiplicity(
            ExtendedWeight(g2, (1, 0), (0, 0)), [ExtendedWeight(g, (1,), (0,))]
        )


def test_extended_multiplicity_matches_lr_on_type_a():
    # Concentrated type A weights correspond to partitions; on that
    # overlap the general oracle must agree with the tableau rule.
    g = dynkin_graph("A", 2)
    from adecount.rootdata import partition_to_weight, weight_to_partition

    xi = partition_to_weight(g, (2, 1))
    etas = [partition_to_weight(g, (1,)) for _ in range(3)]
    assert weight_to_partition(xi) == Partition((2, 1))
    assert extended_multiplicity(xi, etas) == lr_coefficient((2, 1), [(1,)] * 3)


def test_character_type():
    ch = irreducible_character(dynkin_graph("A", 1), (1,))
    assert isinstance(ch, Character)
    assert ch.highest_weight == (1,)
