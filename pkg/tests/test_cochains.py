import pytest

from ghl.cochains import (
    CochainFamily,
    delta_on_functions,
    face_operator,
    psi_inverse_matrix,
    psi_matrix,
    skew_constraints,
    staic_action,
    subcomplexes,
    tuple_index,
    tuples,
)
from ghl.coeffmod import regular_module, trivial_module
from ghl.errors import DegreeRangeError
from ghl.exactlinalg import IntMatrix
from ghl.groups import cyclic, symmetric
from ghl.homology import inclusion_on_cohomology, induced_on_homology


@pytest.fixture(params=["trivial", "regular"])
def module(request):
    group = cyclic(3)
    if request.param == "trivial":
        return trivial_module(group)
    return regular_module(group, "left")


def test_tuple_numbering_is_lexicographic():
    group = cyclic(3)
    listed = tuples(group, 2)
    assert listed[0] == (0, 0)
    assert all(tuple_index(group, t) == k for k, t in enumerate(listed))


def test_cosimplicial_identities(module):
    n = 1
    for j in range(1, n + 3):
        for i in range(j):
            left = face_operator(module, n + 1, j) @ face_operator(module, n, i)
            right = face_operator(module, n + 1, i) @ face_operator(module, n, j - 1)
            assert left == right, (i, j)


def test_coboundary_is_alternating_sum_of_faces(module):
    for n in (0, 1, 2):
        total = IntMatrix.zero(*delta_on_functions(module, n).shape)
        for j in range(n + 2):
            total = total + face_operator(module, n, j).scale(-1 if j % 2 else 1)
        assert total == delta_on_functions(module, n)


def test_coboundary_squares_to_zero(module):
    for n in (0, 1):
        assert (delta_on_functions(module, n + 1) @ delta_on_functions(module, n)).is_zero()


def test_face_index_range():
    with pytest.raises(DegreeRangeError):
        face_operator(trivial_module(cyclic(2)), 1, 3)


def test_staic_operators_are_involutions(module):
    for n in (1, 2, 3):
        ident = IntMatrix.identity(delta_on_functions(module, n).cols)
        for i in range(1, n + 1):
            tau = staic_action(module, n, i)
            assert tau @ tau == ident


def test_staic_operators_satisfy_the_symmetric_group_relations(module):
    n = 3
    ident = IntMatrix.identity(delta_on_functions(module, n).cols)
    tau = {i: staic_action(module, n, i) for i in range(1, n + 1)}
    for i in (1, 2):
        pair = tau[i] @ tau[i + 1]
        assert pair @ pair @ pair == ident, i
        assert pair @ pair != ident, i
    assert tau[1] @ tau[3] == tau[3] @ tau[1]


def test_staic_operators_on_non_abelian_group():
    module = regular_module(symmetric(3), "left")
    ident = IntMatrix.identity(6 ** 2 * 6)
    for i in (1, 2):
        tau = staic_action(module, 2, i)
        assert tau @ tau == ident


def test_staic_index_range():
    with pytest.raises(DegreeRangeError):
        staic_action(trivial_module(cyclic(2)), 2, 3)


def test_psi_is_invertible(module):
    for n in (1, 2):
        psi, inverse = psi_matrix(module, n), psi_inverse_matrix(module, n)
        ident = IntMatrix.identity(psi.rows)
        assert psi @ inverse == ident
        assert inverse @ psi == ident


def test_psi_intertwines_the_coboundaries(module):
    family = CochainFamily(module, range(0, 4))
    coboundary = family.equivariant_ambient.coboundary
    for n in (0, 1, 2):
        left = delta_on_functions(module, n) @ psi_matrix(module, n)
        assert left == psi_matrix(module, n + 1) @ coboundary[n], n


def test_psi_is_a_chain_isomorphism(module):
    family = CochainFamily(module, range(0, 3))
    psi = family.psi_chain_map()
    for n in (0, 1):
        assert induced_on_homology(psi, n).is_isomorphism()


def test_staic_skew_cochains_include_into_all_cochains():
    family = CochainFamily(trivial_module(cyclic(2), [2]), range(0, 4))
    first = inclusion_on_cohomology(family.CS, family.C, 1)
    assert first.source.invariant_factors == (2,)
    assert first.is_isomorphism()
    second = inclusion_on_cohomology(family.CS, family.C, 2)
    assert second.source.is_trivial()
    assert second.target.invariant_factors == (2,)


def test_skew_constraints_for_order_two():
    group = cyclic(2)
    matrix, count = skew_constraints(group, trivial_module(group), 1, vanishing=False)
    assert count == 2
    assert matrix.to_dense() == [[2, 0], [0, 2]]
    _, count = skew_constraints(group, trivial_module(group), 1, vanishing=True)
    assert count == 3


def test_skew_cochains_vanish_in_degree_one_for_integers():
    group = cyclic(2)
    family = CochainFamily(trivial_module(group), range(0, 3))
    assert family.KS.lattices[1].rank == 0
    assert family.K_lambda.lattices[1].rank == 0
    assert family.K.lattices[1].rank == 2


def test_skew_lattices_are_nested():
    family = CochainFamily(trivial_module(cyclic(3), [3]), range(0, 3))
    for n in range(3):
        assert family.K.lattices[n].contains_lattice(family.KS.lattices[n])
        assert family.KS.lattices[n].contains_lattice(family.K_lambda.lattices[n])


@pytest.mark.parametrize("base", [None, [2]])
def test_staic_and_equivariant_skew_models_agree(base):
    family = CochainFamily(trivial_module(cyclic(2), base), range(0, 4))
    for n in (0, 1, 2):
        cs = family.CS.complex.homology_data(n).group.invariant_factors
        ks = family.KS.complex.homology_data(n).group.invariant_factors
        assert cs == ks


def test_subcomplexes_builds_all_three():
    complexes = subcomplexes(trivial_module(cyclic(2)), range(0, 3))
    assert set(complexes) == {"CS", "KS", "K_lambda"}
    assert all(c.kind == "cochain" for c in complexes.values())
