import pytest

from ghl.errors import GroupAxiomError, UsageError
from ghl.groups import (
    CosetSystem,
    FiniteGroup,
    cyclic,
    dihedral,
    direct_product,
    from_table,
    klein4,
    make_group,
    quaternion8,
    symmetric,
)
from ghl.specs import parse_group

NON_ASSOCIATIVE_LATIN_SQUARE = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]


@pytest.mark.parametrize("spec,order,oriented", [
    ("cyclic:2", 2, False),
    ("cyclic:3", 3, True),
    ("cyclic:4", 4, False),
    ("cyclic:5", 5, True),
    ("cyclic:6", 6, False),
    ("klein4", 4, True),
    ("sym:3", 6, False),
    ("dihedral:4", 8, True),
    ("q8", 8, True),
])
def test_orientation_table(spec, order, oriented):
    group = parse_group(spec)
    assert group.order == order
    assert group.is_oriented() == oriented


@pytest.mark.parametrize("spec", ["cyclic:4", "cyclic:5", "sym:3", "dihedral:4", "q8"])
def test_sign_matches_element_order_formula(spec):
    group = parse_group(spec)
    n = group.order
    for g in group.elements():
        k = group.element_order(g)
        assert group.cayley_sign(g) == (-1) ** ((k - 1) * (n // k))


def test_non_oriented_groups_have_even_order():
    for spec in ("cyclic:2", "cyclic:4", "cyclic:6", "sym:3"):
        group = parse_group(spec)
        assert not group.is_oriented()
        assert group.order % 2 == 0


def test_orientation_survives_relabeling():
    group = symmetric(3)
    perm = [0, 3, 5, 1, 2, 4]
    relabeled = group.relabel(perm)
    assert relabeled.is_oriented() == group.is_oriented()
    assert sorted(relabeled.sign_character) == sorted(group.sign_character)


def test_relabel_requires_fixed_identity():
    with pytest.raises(UsageError):
        cyclic(3).relabel([1, 0, 2])


def test_non_associative_table_is_rejected():
    with pytest.raises(GroupAxiomError) as info:
        from_table(NON_ASSOCIATIVE_LATIN_SQUARE)
    assert "associative" in str(info.value)
    assert len(info.value.witness) == 3


@pytest.mark.parametrize("table", [
    [[0, 1], [1, 1]],
    [[1, 0], [0, 1]],
    [[0, 1, 2], [1, 2]],
    [[0, 5], [1, 0]],
])
def test_malformed_tables_are_rejected(table):
    with pytest.raises(GroupAxiomError):
        FiniteGroup(table)


def test_constructors_have_expected_orders():
    assert dihedral(4).order == 8
    assert symmetric(3).order == 6
    assert quaternion8().order == 8
    assert direct_product(cyclic(2), cyclic(3)).is_oriented() == cyclic(6).is_oriented()
    assert make_group("cyclic", 5).order == 5
    with pytest.raises(UsageError):
        make_group("free", 2)


def test_cyclic_labels():
    assert cyclic(4).labels == ("1", "t", "t^2", "t^3")


def test_dihedral_is_non_abelian():
    group = dihedral(3)
    assert any(group.mul(a, b) != group.mul(b, a) for a in group.elements() for b in group.elements())


def test_payload_round_trip_preserves_hash():
    group = klein4()
    again = FiniteGroup.from_payload(group.to_payload())
    assert again.hash() == group.hash()


def test_declared_order_must_match():
    with pytest.raises(GroupAxiomError):
        FiniteGroup.from_payload({"order": 3, "table": [[0, 1], [1, 0]]})


def test_subgroup_witness():
    group = cyclic(4)
    assert group.subgroup_witness([0, 2]) is None
    assert group.subgroup_witness([0, 1]) is not None
    with pytest.raises(GroupAxiomError):
        CosetSystem(group, [0, 1])


def test_coset_system_of_cyclic_four():
    cosets = CosetSystem(cyclic(4), [0, 2])
    assert cosets.reps == (0, 1)
    assert cosets.index == 2
    assert cosets.bar == (0, 1, 0, 1)
    assert cosets.sub_group.order == 2
    assert cosets.to_sub(2) == 1


def test_reindexed_cosets_keep_partition():
    cosets = CosetSystem(cyclic(4), [0, 2]).reindexed([2, 3])
    assert cosets.reps == (2, 3)
    assert cosets.bar == (2, 3, 2, 3)
    with pytest.raises(UsageError):
        CosetSystem(cyclic(4), [0, 2]).reindexed([0, 2])


def test_generated_subgroup():
    group = symmetric(3)
    assert len(group.generated_subgroup([])) == 1
    everything = group.generated_subgroup(list(group.elements()))
    assert len(everything) == 6
