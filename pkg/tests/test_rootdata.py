from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adecount.rootdata import (
    DynkinGraph,
    ExtendedWeight,
    NotAPartition,
    NotConcentrated,
    NotInLattice,
    Partition,
    bistable_dim,
    cartan_apply,
    dynkin_graph,
    flag_dim,
    from_gamma_delta,
    graded_flag_dim,
    nilpotent_orbit_dim,
    partition_to_weight,
    to_gamma_delta,
    weight_from_dims,
    weight_to_partition,
)


def det(mat):
    n = len(mat)
    if n == 0:
        return 1
    if n == 1:
        return mat[0][0]
    out = 0
    for j in range(n):
        if mat[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
        out += (-1) ** j * mat[0][j] * det(minor)
    return out


def test_canonical_shapes():
    a3 = dynkin_graph("A", 3)
    assert a3.edges == ((0, 1), (1, 2))
    d4 = dynkin_graph("D", 4)
    assert d4.edges == ((0, 1), (1, 2), (1, 3))
    e6 = dynkin_graph("E", 6)
    degrees = [sum(1 for a, b in e6.edges if v in (a, b)) for v in range(6)]
    assert sorted(degrees) == [1, 1, 1, 2, 2, 3]
    assert (1, 3) in e6.edges
    with pytest.raises(ValueError):
        dynkin_graph("E", 5)
    with pytest.raises(ValueError):
        dynkin_graph("D", 2)
    with pytest.raises(ValueError):
        dynkin_graph("B", 2)


def test_cartan_matrices():
    a2 = dynkin_graph("A", 2)
    assert a2.cartan.tolist() == [[2, -1], [-1, 2]]
    # determinants of the canonical Cartan matrices
    assert det(dynkin_graph("A", 4).cartan.tolist()) == 5
    assert det(dynkin_graph("D", 4).cartan.tolist()) == 4
    assert det(dynkin_graph("D", 5).cartan.tolist()) == 4
    assert det(dynkin_graph("E", 6).cartan.tolist()) == 3
    assert det(dynkin_graph("E", 7).cartan.tolist()) == 2
    assert det(dynkin_graph("E", 8).cartan.tolist()) == 1


def test_cartan_inverse_exact():
    for fam, rank in [("A", 3), ("D", 4), ("E", 6)]:
        g = dynkin_graph(fam, rank)
        inv = g.cartan_inv
        for i in range(rank):
            for j in range(rank):
                acc = sum(Fraction(int(g.cartan[i][k])) * inv[k][j] for k in range(rank))
                assert acc == (1 if i == j else 0)


def test_arrow_structure():
    g = dynkin_graph("A", 3)
    assert len(g.arrows) == 4
    for k, (s, t) in enumerate(g.arrows):
        assert g.arrows[g.rev[k]] == (t, s)
        assert g.eps[k] * g.eps[g.rev[k]] == -1
    # canonical signs: +1 on the low-to-high orientation
    for e, (a, b) in enumerate(g.edges):
        assert g.eps[2 * e] == 1 and g.arrows[2 * e] == (a, b)


def test_graph_validation():
    with pytest.raises(ValueError):
        DynkinGraph("A", 3, [(0, 1)])  # too few edges
    with pytest.raises(ValueError):
        DynkinGraph("A", 3, [(0, 1), (0, 1)])  # repeated edge
    with pytest.raises(ValueError):
        DynkinGraph("A", 3, [(0, 1), (3, 1)])  # out of range
    with pytest.raises(ValueError):
        DynkinGraph("A", 4, [(0, 1), (2, 3), (2, 3)])


def test_relabel_and_eps_variants():
    g = dynkin_graph("A", 3)
    h = g.relabel((2, 1, 0))
    assert {frozenset(e) for e in h.edges} == {frozenset((2, 1)), frozenset((1, 0))}
    flipped = g.with_eps(True)
    assert all(a == -b for a, b in zip(flipped.eps, g.eps))
    one = g.with_eps([0])
    assert one.eps[0] == -1 and one.eps[2] == 1
    with pytest.raises(ValueError):
        g.relabel((0, 0, 1))


def test_automorphisms():
    assert len(dynkin_graph("A", 2).automorphisms()) == 2
    assert len(dynkin_graph("A", 3).automorphisms()) == 2
    assert len(dynkin_graph("D", 4).automorphisms()) == 6


def test_gamma_delta_encoding():
    a1 = dynkin_graph("A", 1)
    gamma, delta = to_gamma_delta(a1, (2,), (1,))
    assert gamma == (1,) and delta == (3,)
    a2 = dynkin_graph("A", 2)
    w = weight_from_dims(a2, (2, 0), (1, 0))
    assert w.u == (1, 1) and w.gamma == (0, 1) and w.delta == (2, 0)
    assert w.is_positive_integrable()
    w2 = weight_from_dims(a2, (1, 0), (1, 0))
    assert not w2.is_positive_integrable()  # gamma has a negative entry


def test_from_gamma_delta_round_trip():
    a2 = dynkin_graph("A", 2)
    w = from_gamma_delta(a2, (0, 1), (2, 0))
    assert w.u == (1, 1) and w.v == (1, 0)
    with pytest.raises(NotInLattice):
        from_gamma_delta(dynkin_graph("A", 1), (0,), (1,))


@settings(max_examples=80, deadline=None)
@given(
    fam_rank=st.sampled_from([("A", 1), ("A", 2), ("A", 3), ("D", 4)]),
    data=st.data(),
)
def test_encoding_round_trip_property(fam_rank, data):
    fam, rank = fam_rank
    g = dynkin_graph(fam, rank)
    u = data.draw(st.lists(st.integers(-4, 6), min_size=rank, max_size=rank))
    v = data.draw(st.lists(st.integers(-4, 6), min_size=rank, max_size=rank))
    gamma, delta = to_gamma_delta(g, u, v)
    w = from_gamma_delta(g, gamma, delta)
    assert w.u == tuple(u) and w.v == tuple(v)


def test_weight_json_round_trip():
    w = weight_from_dims(dynkin_graph("A", 2), (2, 0), (1, 0))
    data = w.to_json()
    assert data == {"family": "A", "rank": 2, "u": [1, 1], "v": [1, 0]}
    assert ExtendedWeight.from_json(data) == w


def test_dimension_formulas():
    assert nilpotent_orbit_dim((2, 1)) == 4
    assert nilpotent_orbit_dim((1, 1)) == 2
    assert nilpotent_orbit_dim((3,)) == 0
    assert flag_dim((1, 1, 1)) == 3
    assert flag_dim((2, 1)) == 2
    assert graded_flag_dim([(1, 0), (1, 0)]) == 1
    assert graded_flag_dim([(1, 0), (0, 1)]) == 0
    a1 = dynkin_graph("A", 1)
    assert bistable_dim(weight_from_dims(a1, (2,), (1,))) == 2
    assert bistable_dim(weight_from_dims(a1, (3,), (1,))) == 4
    a2 = dynkin_graph("A", 2)
    assert bistable_dim(weight_from_dims(a2, (2, 0), (1, 0))) == 2
    assert bistable_dim(weight_from_dims(a2, (2, 0), (0, 0))) == 0


@settings(max_examples=80, deadline=None)
@given(
    fam_rank=st.sampled_from([("A", 2), ("A", 3), ("D", 4)]),
    data=st.data(),
)
def test_bistable_dim_always_even(fam_rank, data):
    fam, rank = fam_rank
    g = dynkin_graph(fam, rank)
    d = data.draw(st.lists(st.integers(0, 5), min_size=rank, max_size=rank))
    v = data.draw(st.lists(st.integers(0, 4), min_size=rank, max_size=rank))
    assert bistable_dim(weight_from_dims(g, d, v)) % 2 == 0


def test_partition_basics():
    lam = Partition((3, 1, 0))
    assert lam.parts == (3, 1) and lam.size == 4
    assert lam.conjugate() == Partition((2, 1, 1))
    assert Partition((2, 1)).conjugate() == Partition((2, 1))
    assert Partition(()).conjugate() == Partition(())
    with pytest.raises(NotAPartition):
        Partition((1, 2))
    with pytest.raises(NotAPartition):
        Partition((-1,))
    assert len(list(Partition.all_of(4))) == 5
    assert len(list(Partition.all_of(5, max_parts=2))) == 3
    assert Partition((2, 1)) == (2, 1)


def test_partition_weight_conversion():
    a2 = dynkin_graph("A", 2)
    w = weight_from_dims(a2, (2, 0), (1, 0))
    assert weight_to_partition(w) == Partition((1, 1))
    w = weight_from_dims(a2, (2, 0), (0, 0))
    assert weight_to_partition(w) == Partition((2,))
    w = weight_from_dims(a2, (3, 0), (1, 0))
    assert weight_to_partition(w) == Partition((2, 1))
    with pytest.raises(NotConcentrated):
        weight_to_partition(weight_from_dims(a2, (1, 1), (0, 0)))
    with pytest.raises(NotAPartition):
        weight_to_partition(weight_from_dims(a2, (2, 0), (2, 0)))
    with pytest.raises(NotConcentrated):
        weight_to_partition(weight_from_dims(dynkin_graph("D", 4), (2, 0, 0, 0), (0, 0, 0, 0)))


def test_partition_weight_round_trip():
    a2 = dynkin_graph("A", 2)
    for n in range(1, 5):
        for lam in Partition.all_of(n, max_parts=3):
            w = partition_to_weight(a2, lam)
            assert w.is_positive_integrable()
            assert weight_to_partition(w) == lam
    with pytest.raises(NotAPartition):
        partition_to_weight(dynkin_graph("A", 1), (1, 1, 1))


def test_cartan_apply():
    a2 = dynkin_graph("A", 2)
    assert cartan_apply(a2, (1, 0)) == (2, -1)
    assert cartan_apply(a2, (1, 1)) == (1, 1)
