import random
from math import lcm

import pytest
from sympy import Matrix

from ghl.errors import LatticeContainmentError, WellDefinednessError
from ghl.exactlinalg import (
    FpAbGroup,
    FpHom,
    IntMatrix,
    Lattice,
    LinearSolver,
    Subquotient,
    canonical_factors,
    hnf,
    kernel_lattice,
    preimage_lattice,
    snf,
)


def _det(m: IntMatrix) -> int:
    return int(Matrix(m.to_dense()).det())


def test_matrix_strips_zeros_and_compares_by_content():
    a = IntMatrix(2, 2, [{0: 1, 1: 0}, {}])
    b = IntMatrix.from_dense([[1, 0], [0, 0]])
    assert a == b
    assert a.nnz() == 1
    assert (a - b).is_zero()


def test_matrix_product_and_transpose():
    a = IntMatrix.from_dense([[1, 2], [3, 4]])
    b = IntMatrix.from_dense([[0, 1], [1, 0]])
    assert (a @ b).to_dense() == [[2, 1], [4, 3]]
    assert a.transpose().to_dense() == [[1, 3], [2, 4]]
    assert a.apply({0: 1, 1: -1}) == {0: -1, 1: -1}


def test_big_integers_survive_payload():
    m = IntMatrix.from_dense([[2**70]])
    payload = m.to_payload()
    assert payload["triplets"] == [[0, 0, str(2**70)]]
    assert IntMatrix.from_payload(payload) == m


def test_snf_of_reference_matrix():
    m = IntMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    s, p, q = snf(m)
    assert s == IntMatrix.diagonal([2, 6, 12])
    assert p @ m @ q == s
    assert abs(_det(p)) == 1
    assert abs(_det(q)) == 1


def test_snf_rectangular_with_big_entries():
    m = IntMatrix.from_dense([[2**70, 0, 0], [0, 2**65, 0]])
    s, p, q = snf(m)
    assert s[0, 0] == 2**65
    assert s[1, 1] == 2**70
    assert p @ m @ q == s


def test_snf_makes_a_divisibility_chain_out_of_a_diagonal():
    s, p, q = snf(IntMatrix.diagonal([6, 4]))
    assert s == IntMatrix.diagonal([2, 12])
    assert p @ IntMatrix.diagonal([6, 4]) @ q == s


def test_snf_above_the_dense_limit_reduces_columns_first():
    block = IntMatrix.from_dense([[2, 4], [6, 8]])
    m = IntMatrix.hstack(70, [IntMatrix.block_diagonal([block] * 35), IntMatrix.zero(70, 3)])
    s, p, q = snf(m)
    assert s.shape == (70, 73)
    assert [s[i, i] for i in range(70)] == [2] * 35 + [4] * 35
    assert all(i == j for i, j, _ in s.triplets())
    assert p @ m @ q == s
    assert FpAbGroup(70, Lattice.from_generators(70, m.columns())).invariant_factors == (2,) * 35 + (4,) * 35


def _random_matrix(rng, rows, cols, bound=9):
    return IntMatrix.from_dense([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)])


@pytest.mark.parametrize("seed", range(12))
def test_snf_on_random_matrices(seed):
    rng = random.Random(seed)
    m = _random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
    s, p, q = snf(m)
    assert p @ m @ q == s
    assert abs(_det(p)) == 1
    assert abs(_det(q)) == 1
    diagonal = [s[i, i] for i in range(min(s.shape))]
    assert all(i == j for i, j, _ in s.triplets())
    nonzero = [d for d in diagonal if d]
    assert diagonal == nonzero + [0] * (len(diagonal) - len(nonzero))
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


def _element_order(relations, i, bound):
    return next(t for t in range(1, bound + 1) if relations.contains({i: t}))


def _enumerate_cosets(relations, rank):
    """Breadth-first walk over Z^rank / relations from 0 by unit steps."""
    found = [{}]
    frontier = [{}]
    while frontier:
        step = []
        for x in frontier:
            for i in range(rank):
                y = dict(x)
                y[i] = y.get(i, 0) + 1
                if not any(relations.contains(_difference(y, z, rank)) for z in found):
                    found.append(y)
                    step.append(y)
        frontier = step
    return found


def _difference(x, y, rank):
    out = {j: x.get(j, 0) - y.get(j, 0) for j in range(rank)}
    return {j: v for j, v in out.items() if v}


@pytest.mark.parametrize("seed", range(8))
def test_finite_presentations_against_counting(seed):
    rng = random.Random(100 + seed)
    rank = rng.randint(1, 3)
    while True:
        m = _random_matrix(rng, rank, rank, bound=5)
        det = abs(_det(m))
        if 0 < det <= 60:
            break
    relations = Lattice.from_generators(rank, m.columns())
    group = FpAbGroup(rank, relations)
    factors = group.invariant_factors
    assert group.order() == det == len(_enumerate_cosets(relations, rank))
    assert group.exponent() == lcm(*(_element_order(relations, i, det) for i in range(rank)))
    assert len(factors) <= rank
    assert 0 not in factors


def test_hnf_is_a_unimodular_column_transform():
    m = IntMatrix.from_dense([[2, 3, 6], [4, 1, 2]])
    h, u = hnf(m)
    assert m @ u == h
    assert abs(_det(u)) == 1


def test_hnf_spans_the_column_lattice():
    m = IntMatrix.from_dense([[2, 4], [6, 8]])
    h, _ = hnf(m)
    expected = Lattice.from_generators(2, [{0: 2, 1: 6}, {1: 4}])
    assert Lattice.from_matrix(h) == expected
    assert Lattice.from_matrix(m) == expected
    assert not expected.contains({1: 2})


@pytest.mark.parametrize("values,expected", [
    ([6, 4, 0], (2, 12, 0)),
    ([1, 1, 5], (5,)),
    ([0, 0], (0, 0)),
    ([-4, 6], (2, 12)),
    ([], ()),
])
def test_canonical_factors(values, expected):
    assert canonical_factors(values) == expected


def test_presented_group_invariant_factors():
    rel = Lattice.from_generators(2, [{0: 2, 1: 4}, {0: 4, 1: 2}])
    assert FpAbGroup(2, rel).invariant_factors == (2, 6)
    rel = Lattice.from_generators(3, [{0: 1, 1: 1}])
    assert FpAbGroup(3, rel).invariant_factors == (0, 0)
    assert FpAbGroup.trivial().describe() == "0"
    assert FpAbGroup.from_invariant_factors([2, 0]).describe() == "Z2 ⊕ Z"


def test_order_and_exponent():
    g = FpAbGroup.from_invariant_factors([2, 6])
    assert g.order() == 12
    assert g.exponent() == 6
    assert FpAbGroup.free(1).order() == 0
    assert FpAbGroup.free(1).exponent() == 0


def test_lattice_membership_and_modulus():
    lat = Lattice.from_generators(2, [{0: 1}], modulus=4)
    assert lat.contains({1: 4})
    assert not lat.contains({1: 2})
    assert lat.contains({0: 7, 1: -8})
    assert Lattice.full(2).contains_lattice(lat)
    assert lat.containment_witness(Lattice.full(2)) == {1: 1}


def test_lattice_equality_is_basis_independent():
    a = Lattice.from_generators(2, [{0: 2, 1: 2}, {1: 4}])
    b = Lattice.from_generators(2, [{0: 2, 1: -2}, {0: 4}])
    assert a == b


def test_preimage_and_kernel():
    doubling = IntMatrix.from_dense([[2]])
    assert preimage_lattice(doubling, Lattice.scaled_full(1, 4)) == Lattice.scaled_full(1, 2)
    ker = kernel_lattice(IntMatrix.from_dense([[1, 1]]))
    assert ker.rank == 1
    assert ker.contains({0: 1, 1: -1})
    assert not ker.contains({0: 1})


def test_subquotient_rejects_uncontained_denominator():
    with pytest.raises(LatticeContainmentError):
        Subquotient(1, Lattice.scaled_full(1, 2), Lattice.full(1))


def test_subquotient_section():
    sq = Subquotient(2, Lattice.from_generators(2, [{0: 1}, {1: 2}]), Lattice.from_generators(2, [{1: 6}]))
    assert sq.group.invariant_factors == (3, 0)
    assert sq.lift(sq.coordinates({0: 1, 1: 2})) == {0: 1, 1: 2}


def test_hom_must_respect_relations():
    z2 = FpAbGroup.from_invariant_factors([2])
    z = FpAbGroup.free(1)
    with pytest.raises(WellDefinednessError):
        FpHom(z2, z, IntMatrix.identity(1))
    onto = FpHom(z, z2, IntMatrix.identity(1))
    assert onto.is_surjective()
    assert not onto.is_injective()


def test_hom_equality_is_modulo_target_relations():
    z4 = FpAbGroup.from_invariant_factors([4])
    assert FpHom.multiplication(z4, 5) == FpHom.identity(z4)
    assert FpHom.multiplication(z4, 4).is_zero()
    doubling = FpHom.multiplication(z4, 2)
    assert not doubling.is_injective()
    assert doubling.kernel() == Lattice.scaled_full(1, 2)
    assert (doubling @ doubling).is_zero()


def test_linear_solver():
    m = IntMatrix.from_dense([[2, 0], [0, 3]])
    solver = LinearSolver(m)
    assert solver.solve({0: 4, 1: 9}) == {0: 2, 1: 3}
    assert solver.solve({0: 1}) is None
