import pytest

from ghl.cochains import psi_inverse_matrix, psi_matrix
from ghl.coeffmod import regular_module, trivial_module
from ghl.errors import LatticeContainmentError, UsageError
from ghl.groups import CosetSystem, cyclic, symmetric
from ghl.homology import TheoryId, compute_theory
from ghl.specs import parse_subgroup
from ghl.transfer import (
    TransferContext,
    Tr_cochain,
    cores_res,
    is_index_multiplication,
    map_for,
    res_cochain,
    res_on_cohomology,
    tr_cochain,
    transfer_context,
)


def _s3_with_transposition(module_kind="trivial"):
    group = symmetric(3)
    module = trivial_module(group) if module_kind == "trivial" else regular_module(group, "left")
    return transfer_context(group, parse_subgroup("gen:1", group), module)


@pytest.fixture
def z4_ctx():
    group = cyclic(4)
    return transfer_context(group, [0, 2], trivial_module(group))


def test_context_basics(z4_ctx):
    assert z4_ctx.index == 2
    assert z4_ctx.sub.order == 2
    assert z4_ctx.cosets.reps == (0, 1)


@pytest.mark.parametrize("make", [
    lambda: transfer_context(cyclic(4), [0, 2], regular_module(cyclic(4), "left")),
    lambda: _s3_with_transposition("regular"),
])
def test_equivariant_transfer_is_conjugate_of_functional(make):
    ctx = make()
    for n in (0, 1, 2):
        conjugated = psi_inverse_matrix(ctx.module, n) @ ctx.tr_matrix(n) @ psi_matrix(ctx.restricted_module, n)
        assert ctx.Tr_matrix(n) == conjugated


@pytest.mark.parametrize("n", [1, 2])
def test_cores_res_is_index_on_classical_cohomology(z4_ctx, n):
    hom = cores_res(z4_ctx, TheoryId.CLASSICAL_COHOMOLOGY, n)
    assert is_index_multiplication(hom, 2)


def test_cores_res_with_other_representatives(z4_ctx):
    ctx = z4_ctx.reindexed([2, 3])
    assert ctx.cosets.reps == (2, 3)
    hom = cores_res(ctx, TheoryId.CLASSICAL_COHOMOLOGY, 2)
    assert hom.source.invariant_factors == (4,)
    assert is_index_multiplication(hom, 2)


def test_cores_res_for_non_normal_subgroup():
    ctx = _s3_with_transposition()
    assert ctx.index == 3
    hom = cores_res(ctx, TheoryId.CLASSICAL_COHOMOLOGY, 2)
    assert hom.source.invariant_factors == (2,)
    assert is_index_multiplication(hom, 3)


def test_restriction_on_symmetric_cohomology():
    group = cyclic(4)
    ctx = transfer_context(group, [0, 2], trivial_module(group, [2]))
    hom = res_on_cohomology(ctx, TheoryId.SYM_COHOMOLOGY, 1)
    expected = compute_theory(TheoryId.SYM_COHOMOLOGY, trivial_module(cyclic(2), [2]), [1])[1]
    assert hom.target.invariant_factors == expected.invariant_factors


def test_restriction_of_a_function_cochain():
    group = cyclic(2)
    ctx = transfer_context(group, [0], trivial_module(group))
    assert res_cochain(ctx, TheoryId.CLASSICAL_COHOMOLOGY, 1, {0: 1, 1: 2}) == {0: 1}


def test_restriction_rejects_non_skew_cochain():
    group = cyclic(2)
    ctx = transfer_context(group, [0], trivial_module(group))
    with pytest.raises(LatticeContainmentError):
        res_cochain(ctx, TheoryId.SYM_COHOMOLOGY, 1, {1: 1})


def test_transfer_in_degree_zero_sums_over_cosets():
    group = cyclic(2)
    ctx = transfer_context(group, [0], trivial_module(group))
    assert tr_cochain(ctx, 0, {0: 1}) == {0: 2}
    assert Tr_cochain(ctx, 0, {0: 1}) == {0: 2}


def test_unsupported_theory_and_map(z4_ctx):
    with pytest.raises(UsageError):
        map_for(z4_ctx, TheoryId.EXT_HOMOLOGY, "res", 1)
    with pytest.raises(UsageError):
        map_for(z4_ctx, TheoryId.CLASSICAL_COHOMOLOGY, "inflation", 1)


def test_module_must_live_over_the_group():
    cosets = CosetSystem(cyclic(4), [0, 2])
    with pytest.raises(UsageError):
        TransferContext(cosets, trivial_module(cyclic(4)))
