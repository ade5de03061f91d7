from math import factorial

import pytest

from ghl.cochains import top_coboundary_closed_form
from ghl.coeffmod import regular_module, trivial_module
from ghl.complexes import (
    BasisKind,
    ComplexOfFp,
    alternating_sum,
    bar_boundary,
    basis_module,
    bs_boundary,
    cyclic_periodic_complex,
    ext_boundary,
    ext_sign_mutation,
    hom_over_G,
    lambda_matrix,
    mu_matrix,
    nu_matrix,
    sort_with_sign,
    symmetric_to_exterior,
    tensor_over_G,
    top_boundary_closed_form,
    top_coboundary_block,
)
from ghl.errors import BudgetExceededError, DegreeRangeError, StructuralError
from ghl.exactlinalg import FpAbGroup, IntMatrix
from ghl.groups import cyclic, klein4, symmetric
from ghl.specs import parse_group

SMALL_GROUPS = ["cyclic:2", "cyclic:3", "cyclic:4", "klein4", "sym:3"]


def test_sort_with_sign():
    assert sort_with_sign((1, 0)) == ((0, 1), -1)
    assert sort_with_sign((2, 0, 1)) == ((0, 1, 2), 1)
    assert sort_with_sign((2, 1, 0)) == ((0, 1, 2), -1)
    assert sort_with_sign((1, 1))[1] == 0


def test_alternating_sum_cancels_on_repeats():
    assert alternating_sum((1, 1, 2)) == {}
    assert alternating_sum((0, 1)) == {(0, 1): 1, (1, 0): -1}


@pytest.mark.parametrize("spec", SMALL_GROUPS)
def test_exterior_boundary_squares_to_zero(spec):
    group = parse_group(spec)
    for n in range(2, group.order):
        assert (ext_boundary(group, n - 1) @ ext_boundary(group, n)).is_zero()


@pytest.mark.parametrize("spec", ["cyclic:2", "cyclic:3"])
def test_bar_boundary_squares_to_zero(spec):
    group = parse_group(spec)
    for n in (2, 3):
        assert (bar_boundary(group, n - 1) @ bar_boundary(group, n)).is_zero()


@pytest.mark.parametrize("spec", ["cyclic:3", "cyclic:4", "klein4"])
def test_symmetric_boundary_routes_agree(spec):
    group = parse_group(spec)
    for n in range(1, group.order):
        scaled = bs_boundary(group, n)
        assert bs_boundary(group, n, direct=True) == scaled
        assert scaled == ext_boundary(group, n).scale(n + 1)


@pytest.mark.parametrize("spec", ["cyclic:3", "cyclic:4", "sym:3"])
def test_comparison_maps_are_chain_maps(spec):
    group = parse_group(spec)
    for n in (1, 2):
        lam_hi, lam_lo = lambda_matrix(group, n), lambda_matrix(group, n - 1)
        nu_hi, nu_lo = nu_matrix(group, n), nu_matrix(group, n - 1)
        assert lam_lo @ bar_boundary(group, n) == ext_boundary(group, n) @ lam_hi
        # ν intertwines the bar boundary with the scaled symmetric one
        assert bar_boundary(group, n) @ nu_hi == nu_lo @ bs_boundary(group, n)


@pytest.mark.parametrize("spec", ["cyclic:3", "klein4"])
def test_lambda_nu_mu_identities(spec):
    group = parse_group(spec)
    for n in (0, 1, 2):
        lam, nu = lambda_matrix(group, n), nu_matrix(group, n)
        size = len(basis_module(BasisKind.EXT, group, n).tags)
        assert lam @ nu == IntMatrix.scalar(size, factorial(n + 1))
        assert nu @ lam == mu_matrix(group, n)


@pytest.mark.parametrize("spec", ["cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5", "klein4", "sym:3"])
def test_top_boundary_matches_closed_form(spec):
    group = parse_group(spec)
    assert ext_boundary(group, group.order - 1).column(0) == top_boundary_closed_form(group)


def test_sign_mutation_breaks_closed_form_and_resets():
    group = cyclic(3)
    closed = top_boundary_closed_form(group)
    with ext_sign_mutation():
        assert ext_boundary(group, 2).column(0) != closed
    assert ext_boundary(group, 2).column(0) == closed


@pytest.mark.parametrize("n", [0, 3])
def test_exterior_degree_range(n):
    with pytest.raises(DegreeRangeError):
        ext_boundary(cyclic(3), n)


def test_bar_boundary_needs_positive_degree():
    with pytest.raises(DegreeRangeError):
        bar_boundary(cyclic(3), 0)


def test_orbit_representatives_of_exterior_tags():
    module = basis_module(BasisKind.EXT, klein4(), 1)
    assert module.rep_count() == 3
    for tag in module.tags:
        r, g, s = module.locate(tag)
        image, sign = module.act(g, module.rep(r))
        assert image == tag
        assert sign == s


def test_bar_representatives():
    module = basis_module(BasisKind.BAR, cyclic(3), 2)
    assert module.rep_count() == 9
    assert module.rep(5) == (0, 1, 2)
    assert module.locate((1, 2, 0)) == (module.rep_index([1, 2]), 1, 1)


def test_exterior_top_degree_with_trivial_coefficients():
    group = cyclic(4)
    c = tensor_over_G(trivial_module(group), BasisKind.EXT, range(0, 4))
    assert c.homology_data(3).group.invariant_factors == (2,)


def test_symmetric_to_exterior_is_a_factorial_on_representatives():
    f = symmetric_to_exterior(regular_module(klein4()), range(0, 4))
    for n in range(0, 4):
        assert f.at(n) == IntMatrix.scalar(f.source.group(n).generators, factorial(n + 1))
    assert f.target.name == "A⊗ext"


def test_symmetric_to_exterior_stops_at_the_top_degree():
    f = symmetric_to_exterior(trivial_module(cyclic(3)), range(0, 6))
    assert list(f.source.degrees) == [0, 1, 2]
    assert f.at(2).to_dense() == [[6]]


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError) as info:
        tensor_over_G(trivial_module(cyclic(4)), BasisKind.BAR, range(0, 4), budget=10)
    assert info.value.requested == 16
    assert info.value.budget == 10


def test_complex_rejects_nonzero_square():
    z = FpAbGroup.free(1)
    one = IntMatrix.identity(1)
    with pytest.raises(StructuralError):
        ComplexOfFp("chain", range(0, 3), {0: z, 1: z, 2: z}, {1: one, 2: one})


def test_complex_rejects_bad_kind():
    with pytest.raises(ValueError):
        ComplexOfFp("cocycle", range(0, 1), {0: FpAbGroup.free(1)}, {})


def test_periodic_resolution_homology():
    chains = cyclic_periodic_complex(trivial_module(cyclic(4)), "chain", 3)
    assert chains.homology_data(1).group.invariant_factors == (4,)
    assert chains.homology_data(2).group.invariant_factors == ()
    cochains = cyclic_periodic_complex(trivial_module(cyclic(2)), "cochain", 3)
    assert cochains.homology_data(0).group.invariant_factors == (0,)
    assert cochains.homology_data(2).group.invariant_factors == (2,)


def test_exterior_cochains_in_degree_zero_are_invariants():
    group = cyclic(3)
    c = hom_over_G(BasisKind.EXT, regular_module(group), range(0, 2))
    assert c.homology_data(0).group.invariant_factors == (0,)


@pytest.mark.parametrize("group,module", [
    (cyclic(3), "trivial"),
    (cyclic(4), "trivial"),
    (cyclic(3), "regular"),
    (symmetric(3), "trivial"),
])
def test_top_coboundary_block_matches_closed_form(group, module):
    A = trivial_module(group) if module == "trivial" else regular_module(group, "left")
    blocks = top_coboundary_block(BasisKind.EXT, A)
    assert list(blocks.values()) == [top_coboundary_closed_form(group, A)]
