"""Tabulated experiments. Rows report computed values next to predictions; nothing is asserted."""
import logging
from math import gcd
from typing import List, Optional, Sequence, Tuple

from ghl.coeffmod import trivial_module
from ghl.exactlinalg import canonical_factors
from ghl.groups import cyclic
from ghl.homology import TheoryId, compute_theory
from ghl.models import ExperimentRow, ExperimentTable, MatrixPayload
from ghl.specs import parse_group, parse_module, parse_subgroup
from ghl.transfer import cores_res, is_index_multiplication, transfer_context

logger = logging.getLogger(__name__)


def predicted_top_exterior(n: int, base: Sequence[int]) -> Tuple[int, ...]:
    """ker(n·) on A for odd n, A/2A for even n, with A = ⊕ Z/d (d = 0 for Z)."""
    if n % 2:
        return canonical_factors([gcd(n, d) for d in base if d])
    return canonical_factors([gcd(2, d) for d in base])


def conjecture_cyclic(orders: Sequence[int] = tuple(range(2, 9)), bases: Sequence[Sequence[int]] = ((0,), (2,), (3,), (4,))) -> ExperimentTable:
    """H^λ_{n-1}(Z_n, A) for trivial A against the predicted closed form."""
    table = ExperimentTable(
        name="conjecture-cyclic",
        description="Top exterior homology of cyclic groups with trivial coefficients",
    )
    for n in orders:
        group = cyclic(n)
        for base in bases:
            module = trivial_module(group, list(base))
            computed = compute_theory(TheoryId.EXT_HOMOLOGY, module, [n - 1])[n - 1].invariant_factors
            predicted = predicted_top_exterior(n, base)
            table.rows.append(ExperimentRow(
                parameters={"n": n, "module": module.name, "degree": n - 1},
                computed=list(computed),
                predicted=list(predicted),
                agrees=tuple(computed) == tuple(predicted),
            ))
            logger.info(f"conjecture-cyclic n={n} {module.name}: computed {computed}, predicted {predicted}")
    return table


DEFAULT_CORES_RES_CASES = (
    ("cyclic:4", "gen:2", "trivial:Z", "sym-cohomology", 2),
    ("cyclic:4", "gen:2", "trivial:Z", "ext-cohomology", 2),
    ("cyclic:4", "gen:2", "trivial:Z/2", "sym-cohomology", 1),
    ("cyclic:4", "gen:2", "trivial:Z", "classical-cohomology", 2),
)


def cores_res_index(cases: Optional[List[Tuple[str, str, str, str, int]]] = None) -> ExperimentTable:
    """cores∘res next to multiplication by the index."""
    table = ExperimentTable(
        name="cores-res-index",
        description="Composite of corestriction and restriction compared with multiplication by [G:H]",
    )
    for group_spec, sub_spec, module_spec, theory, n in cases or DEFAULT_CORES_RES_CASES:
        group = parse_group(group_spec)
        ctx = transfer_context(group, parse_subgroup(sub_spec, group), parse_module(module_spec, group))
        hom = cores_res(ctx, TheoryId(theory), n)
        payload = hom.matrix.to_payload()
        table.rows.append(ExperimentRow(
            parameters={"group": group_spec, "subgroup": sub_spec, "module": module_spec, "theory": theory,
                        "degree": n, "index": ctx.index},
            computed=list(hom.source.invariant_factors),
            agrees=is_index_multiplication(hom, ctx.index),
            matrix=MatrixPayload(**payload),
        ))
    return table


EXPERIMENTS = {
    "conjecture-cyclic": conjecture_cyclic,
    "cores-res-index": cores_res_index,
}
