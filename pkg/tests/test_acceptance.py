"""Reference values and property checks run through the verification runner."""
import random

import pytest

from ghl.coeffmod import regular_module, trivial_module
from ghl.complexes import ext_sign_mutation
from ghl.config import settings
from ghl.errors import UsageError
from ghl.experiments import conjecture_cyclic, predicted_top_exterior
from ghl.groups import cyclic, dihedral
from ghl.verify import (
    PROPERTY_CHECKS,
    QUICK_BLOCK_LIMIT,
    REFERENCE_CHECKS,
    VerifyOptions,
    _bar_top,
    check_exterior_routes_agree,
    check_periodic_oracle,
    check_top_degree_formulas,
    run_suite,
)


@pytest.fixture(scope="module")
def reference_report():
    return run_suite("paper", quick=True)


@pytest.mark.parametrize("name", [name for name, _ in REFERENCE_CHECKS])
def test_reference_value(reference_report, name):
    result = next(c for c in reference_report.checks if c.name == name)
    assert result.passed, (result.expected, result.computed, result.witness)


def test_report_metadata(reference_report):
    assert reference_report.suite == "paper"
    assert reference_report.mutation is None
    assert len(reference_report.checks) == len(REFERENCE_CHECKS)


@pytest.mark.parametrize("check", [check for _, check in PROPERTY_CHECKS], ids=[name for name, _ in PROPERTY_CHECKS])
def test_property_check_passes(check):
    outcome = check(VerifyOptions(rng=random.Random(7), quick=True))
    assert outcome.passed, (outcome.witness, outcome.expected, outcome.computed)


def test_sweep_limits_follow_the_budget():
    assert VerifyOptions(rng=random.Random(7), quick=True).block_limit == QUICK_BLOCK_LIMIT
    assert VerifyOptions(rng=random.Random(7)).block_limit == settings.ghl_budget
    # degree 4 needs bar degree 5
    assert _bar_top(cyclic(6), trivial_module(cyclic(6)), 5, 100000) == 5
    assert _bar_top(dihedral(4), regular_module(dihedral(4)), 5, 100000) == 4
    assert _bar_top(dihedral(4), regular_module(dihedral(4)), 5, 300000) == 5


def test_sweeps_report_their_scope():
    opts = VerifyOptions(rng=random.Random(7), quick=True)
    assert "Z4 trivial:Z 0..3" in check_periodic_oracle(opts).note
    assert "klein4 regular 0..2" in check_exterior_routes_agree(opts).note


def test_sign_mutation_is_caught_with_a_witness():
    with ext_sign_mutation():
        outcome = check_top_degree_formulas(VerifyOptions(rng=random.Random(7), quick=True))
    assert not outcome.passed
    assert outcome.witness == {"group": "cyclic:2", "theorem": "top boundary"}


def test_unknown_suite_and_mutation():
    with pytest.raises(UsageError):
        run_suite("everything")
    with pytest.raises(UsageError):
        run_suite("paper", mutate="swap-faces")


@pytest.mark.parametrize("n,base,expected", [
    (3, (0,), ()),
    (4, (0,), (2,)),
    (5, (5,), (5,)),
    (6, (3,), ()),
    (6, (4,), (2,)),
])
def test_predicted_top_exterior(n, base, expected):
    assert predicted_top_exterior(n, base) == expected


def test_conjecture_table_on_small_orders():
    table = conjecture_cyclic(orders=[2, 3, 4], bases=[(0,), (2,)])
    assert len(table.rows) == 6
    assert all(row.agrees for row in table.rows)
