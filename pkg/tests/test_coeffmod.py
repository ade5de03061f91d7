import pytest

from ghl.coeffmod import (
    GModule,
    GroupRingElement,
    annihilator_of,
    augmentation_ideal,
    coinvariants,
    invariants,
    module_from_payload,
    regular_module,
    trivial_module,
    twisted_coinvariants,
)
from ghl.errors import StructuralError, UsageError, WellDefinednessError
from ghl.exactlinalg import FpAbGroup, IntMatrix, Lattice
from ghl.groups import CosetSystem
from ghl.specs import parse_module


def test_trivial_module_names(z3):
    assert trivial_module(z3).name == "trivial:Z"
    assert trivial_module(z3, [5]).name == "trivial:Z/5"
    assert trivial_module(z3, FpAbGroup.from_invariant_factors([2, 0])).underlying.invariant_factors == (2, 0)
    assert trivial_module(z3).side == "both"


def test_trivial_module_exponent(z3):
    assert trivial_module(z3).exponent() == 0
    assert trivial_module(z3, [5]).exponent() == 5
    assert trivial_module(z3, [2, 3]).exponent() == 6


def test_regular_module_invariants_and_coinvariants(z3, regular):
    module = regular(z3)
    assert invariants(module).invariant_factors == (0,)
    assert coinvariants(module).invariant_factors == (0,)


def test_augmentation_ideal(z3):
    module = augmentation_ideal(z3)
    assert module.rank == 2
    assert invariants(module).invariant_factors == ()
    # I/I^2 is the abelianization
    assert coinvariants(module).invariant_factors == (3,)


def test_twisted_coinvariants_of_sign(z2, trivial_z):
    lat = twisted_coinvariants(trivial_z(z2), z2.sign_character)
    assert lat == Lattice.scaled_full(1, 2)


def test_side_conversion_gives_valid_left_module(z3, s3):
    for group in (z3, s3):
        right = regular_module(group, "right")
        left = right.side_convert()
        assert left.side == "left"
        GModule(group, left.free_rank, left.torsion, left.action, side="left")
        assert left.side_convert().side == "right"


def test_incompatible_action_is_rejected(z3):
    minus = IntMatrix.scalar(1, -1)
    with pytest.raises(StructuralError):
        GModule(z3, 1, (), [IntMatrix.identity(1), minus, minus])


def test_action_must_preserve_relations(z2):
    shear = IntMatrix.from_dense([[1, 1], [0, 1]])
    with pytest.raises(WellDefinednessError):
        GModule(z2, 1, (2,), [IntMatrix.identity(2), shear])


def test_bad_side_and_torsion(z2):
    ident = IntMatrix.identity(1)
    with pytest.raises(UsageError):
        GModule(z2, 1, (), [ident, ident], side="middle")
    with pytest.raises(UsageError):
        GModule(z2, 0, (1,), [ident, ident])


def test_sign_module_is_valid(z2):
    module = GModule(z2, 1, (), [IntMatrix.identity(1), IntMatrix.scalar(1, -1)], side="left")
    assert invariants(module).invariant_factors == ()
    assert coinvariants(module).invariant_factors == (2,)


def test_restriction_to_subgroup(z4, regular):
    cosets = CosetSystem(z4, [0, 2])
    restricted = regular(z4).restrict(cosets)
    assert restricted.group.order == 2
    assert restricted.rank == 4
    # Z[Z4] restricted to Z2 is free of rank two
    assert invariants(restricted).invariant_factors == (0, 0)


def test_group_ring_arithmetic(z3):
    norm = GroupRingElement.norm(z3)
    diff = GroupRingElement.basis_difference(z3, 1)
    assert (norm * diff).coefficients == (0, 0, 0)
    assert norm.augmentation() == 3
    assert diff.augmentation() == 0
    assert GroupRingElement.signed_sum(z3) == norm
    assert (norm + diff).coefficients == (0, 2, 1)


def test_signed_sum_of_non_oriented_group(z4):
    assert GroupRingElement.signed_sum(z4).coefficients == (1, -1, 1, -1)


def test_annihilators(z3, trivial_z):
    norm = GroupRingElement.norm(z3)
    assert annihilator_of(trivial_z(z3), norm) == Lattice.zero(1)
    assert annihilator_of(trivial_z(z3, 3), norm).is_full()


def test_module_from_payload(z2):
    payload = {"side": "left", "free_rank": 1, "torsion": [], "action": {"t": [[0, 0, "-1"]]}}
    module = module_from_payload(z2, payload)
    assert module.action[1].to_dense() == [[-1]]
    with pytest.raises(UsageError):
        module_from_payload(z2, {"free_rank": 1, "action": {}})


@pytest.mark.parametrize("spec,rank,side", [
    ("trivial:Z", 1, "both"),
    ("trivial:Z/4", 1, "both"),
    ("regular", 3, "right"),
    ("augideal", 2, "right"),
])
def test_parse_module(z3, spec, rank, side):
    module = parse_module(spec, z3)
    assert module.rank == rank
    assert module.side == side


@pytest.mark.parametrize("spec", ["trivial:Z/1", "trivial:Q", "dual"])
def test_parse_module_rejects(z3, spec):
    with pytest.raises(UsageError):
        parse_module(spec, z3)


def test_module_hash_depends_on_action(z2):
    sign = GModule(z2, 1, (), [IntMatrix.identity(1), IntMatrix.scalar(1, -1)], side="left")
    assert sign.hash() != trivial_module(z2).hash()
