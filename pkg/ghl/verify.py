"""Reproduction and property suites behind ``ghl verify``.

Each check returns an ``Outcome``; ``run_suite`` times it, turns engine
errors into failed checks and collects a ``VerifyReport``.
"""
import logging
import random
import time
from contextlib import nullcontext
from dataclasses import dataclass
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ghl.cochains import CochainFamily, delta_on_functions, psi_inverse_matrix, psi_matrix, top_coboundary_closed_form
from ghl.coeffmod import GModule, regular_module, trivial_module
from ghl.complexes import (
    BasisKind,
    bar_boundary,
    basis_module,
    cyclic_periodic_complex,
    ext_boundary,
    ext_sign_mutation,
    hom_over_G,
    lambda_matrix,
    mu_matrix,
    nu_matrix,
    tensor_over_G,
    top_boundary_closed_form,
    top_coboundary_block,
)
from ghl.config import settings
from ghl.errors import GhlError, UsageError
from ghl.exactlinalg import FpAbGroup, IntMatrix, Lattice
from ghl.groups import CATALOG_SPECS, FiniteGroup
from ghl.homology import TheoryId, compute_theory, homology_at, long_exact_sequence, top_exterior_closed_form
from ghl.models import CheckResult, VerifyReport
from ghl.specs import parse_group, parse_module
from ghl.transfer import cores_res, is_index_multiplication, transfer_context

logger = logging.getLogger(__name__)

SUITES = ("paper", "properties", "all")
MUTATIONS = ("ext-sign",)
QUICK_CATALOG = ("cyclic:2", "cyclic:3", "cyclic:4", "klein4")
# generators per degree the quick bar-based sweeps build; full sweeps use the budget
QUICK_BLOCK_LIMIT = 5000


@dataclass
class Outcome:
    passed: bool
    expected: Any = None
    computed: Any = None
    witness: Any = None
    note: Optional[str] = None


@dataclass
class VerifyOptions:
    rng: random.Random
    quick: bool = False

    @property
    def catalog(self) -> Sequence[str]:
        return QUICK_CATALOG if self.quick else CATALOG_SPECS

    @property
    def block_limit(self) -> int:
        return QUICK_BLOCK_LIMIT if self.quick else settings.ghl_budget


Check = Callable[[VerifyOptions], Outcome]


def _factors(theory: TheoryId, group: str, module: str, degrees: Sequence[int], route: Optional[str] = None) -> List[List[int]]:
    g = parse_group(group)
    result = compute_theory(theory, parse_module(module, g), list(degrees), route=route)
    return [list(result[n].invariant_factors) for n in degrees]


def _expect(theory: TheoryId, group: str, module: str, degrees: Sequence[int], expected: List[List[int]], note: Optional[str] = None) -> Outcome:
    computed = _factors(theory, group, module, degrees)
    return Outcome(computed == expected, expected, computed, note=note)


def _bar_top(group: FiniteGroup, module: GModule, cap: int, limit: int) -> int:
    """Largest n <= cap with |G|^n·rank within ``limit``."""
    n = 0
    while n < cap and group.order ** (n + 1) * max(module.rank, 1) <= limit:
        n += 1
    return n


def _first_mismatch(pairs: List[Tuple[Any, Any, Any]], scope: Optional[List[str]] = None) -> Outcome:
    note = f"{len(pairs)} comparisons"
    if scope:
        note += "; swept " + ", ".join(scope)
    for label, expected, computed in pairs:
        if expected != computed:
            return Outcome(False, expected, computed, witness=label, note=note)
    return Outcome(True, note=note)


# Reference values


def check_hs_z2_regular(opts: VerifyOptions) -> Outcome:
    return _expect(TheoryId.SYM_HOMOLOGY, "cyclic:2", "regular", [0, 1, 2], [[2, 0], [], []])


def check_hs_z2_trivial_z5(opts: VerifyOptions) -> Outcome:
    return _expect(TheoryId.SYM_HOMOLOGY, "cyclic:2", "trivial:Z/5", [0, 1, 2], [[5], [], []])


def check_hs_z2_trivial_z(opts: VerifyOptions) -> Outcome:
    """HS₁ keeps the A/2A term; see the HS₁(Z₂, trivial Z) entry under open-question decisions in DESIGN.md."""
    return _expect(
        TheoryId.SYM_HOMOLOGY, "cyclic:2", "trivial:Z", [0, 1, 2], [[0], [2], []],
        note="derived: t fixes 1∧t with sign -1, so A⊗_G BS_1 = A/2A; reading it as A, 0 would drop this 2-torsion",
    )


def check_hs_z3_regular(opts: VerifyOptions) -> Outcome:
    computed = _factors(TheoryId.SYM_HOMOLOGY, "cyclic:3", "regular", [0, 1, 2, 3])
    g = parse_group("cyclic:3")
    # Z[G]/2Δ(G) presented directly
    vectors = [{0: -2, h: 2} for h in range(1, g.order)]
    direct = list(FpAbGroup(g.order, Lattice.from_generators(g.order, vectors)).invariant_factors)
    expected = [direct, [3], [], []]
    return Outcome(computed == expected, expected, computed, note="degree 0 compared with Z[G]/2Δ(G)")


def check_hs_z3_trivial(opts: VerifyOptions) -> Outcome:
    expected = {"trivial:Z": [[0], [9], [], []], "trivial:Z/3": [[3], [3], [3], []]}
    pairs = [(m, e, _factors(TheoryId.SYM_HOMOLOGY, "cyclic:3", m, [0, 1, 2, 3])) for m, e in expected.items()]
    return _first_mismatch(pairs)


def check_ext_homology_z3(opts: VerifyOptions) -> Outcome:
    expected = {"trivial:Z": [[0], [3], []], "trivial:Z/3": [[3], [3], [3]]}
    pairs = [(m, e, _factors(TheoryId.EXT_HOMOLOGY, "cyclic:3", m, [0, 1, 2])) for m, e in expected.items()]
    return _first_mismatch(pairs)


def check_ext_cohomology_zp(opts: VerifyOptions) -> Outcome:
    pairs = []
    for p, top in ((2, 3), (3, 4), (5, 5)):
        expected = [[p] if k <= p - 1 else [] for k in range(top + 1)]
        pairs.append((f"Z{p}", expected, _factors(TheoryId.EXT_COHOMOLOGY, f"cyclic:{p}", f"trivial:Z/{p}", range(top + 1))))
    return _first_mismatch(pairs)


def check_hs_cohomology_z2_z2(opts: VerifyOptions) -> Outcome:
    return _expect(TheoryId.SYM_COHOMOLOGY, "cyclic:2", "trivial:Z/2", range(6), [[2], [2], [], [], [], [2]])


def check_hs_cohomology_small(opts: VerifyOptions) -> Outcome:
    pairs = [
        ("HS2(Z4,Z)", [[2]], _factors(TheoryId.SYM_COHOMOLOGY, "cyclic:4", "trivial:Z", [2])),
        ("HS2,HS4(Z2,Z)", [[], []], _factors(TheoryId.SYM_COHOMOLOGY, "cyclic:2", "trivial:Z", [2, 4])),
        ("HS2(Z2,Z2)", [[]], _factors(TheoryId.SYM_COHOMOLOGY, "cyclic:2", "trivial:Z/2", [2])),
        ("HS2(Z2,Z3)", [[]], _factors(TheoryId.SYM_COHOMOLOGY, "cyclic:2", "trivial:Z/3", [2])),
    ]
    return _first_mismatch(pairs)


def check_vanishing(opts: VerifyOptions) -> Outcome:
    pairs = []
    for group, module in (("cyclic:2", "trivial:Z/2"), ("cyclic:3", "trivial:Z"), ("cyclic:4", "trivial:Z")):
        pairs.append((f"clambda {group} {module}", [[], []], _factors(TheoryId.CLAMBDA, group, module, [0, 1])))
        top = 3 if opts.quick and group == "cyclic:4" else 4
        pairs.append((f"slambda {group} {module}", [[]] * (top + 1), _factors(TheoryId.SLAMBDA, group, module, range(top + 1))))
    return _first_mismatch(pairs)


def check_ext_homology_z4_top(opts: VerifyOptions) -> Outcome:
    return _expect(TheoryId.EXT_HOMOLOGY, "cyclic:4", "trivial:Z", [3], [[2]], note="derived regression value")


REFERENCE_CHECKS: List[Tuple[str, Check]] = [
    ("HS_*(Z2, Z[Z2])", check_hs_z2_regular),
    ("HS_*(Z2, Z5)", check_hs_z2_trivial_z5),
    ("HS_*(Z2, Z)", check_hs_z2_trivial_z),
    ("HS_*(Z3, Z[Z3])", check_hs_z3_regular),
    ("HS_*(Z3, trivial)", check_hs_z3_trivial),
    ("H^λ_*(Z3, trivial)", check_ext_homology_z3),
    ("H^k_λ(Zp, Zp)", check_ext_cohomology_zp),
    ("HS^k(Z2, Z2)", check_hs_cohomology_z2_z2),
    ("HS^2 small cases", check_hs_cohomology_small),
    ("H_cλ and H_sλ vanishing", check_vanishing),
    ("H^λ_3(Z4, Z)", check_ext_homology_z4_top),
]


# Properties


def check_boundary_squares(opts: VerifyOptions) -> Outcome:
    """Every complex is built with its ∂∂ = 0 check; full-basis boundaries are multiplied out too."""
    built = 0
    for spec in opts.catalog:
        g = parse_group(spec)
        z = trivial_module(g)
        cap = min(g.order + 1, 3 if opts.quick else 6)
        for kind in (BasisKind.EXT, BasisKind.BS, BasisKind.BS_DIRECT):
            top = min(cap, g.order)
            tensor_over_G(z, kind, range(0, top + 1))
            hom_over_G(kind, z, range(0, top + 1))
            built += 2
        bar_top = _bar_top(g, z, cap, opts.block_limit)
        tensor_over_G(z, BasisKind.BAR, range(0, bar_top + 1))
        family = CochainFamily(z, range(0, bar_top + 1))
        for member in ("C", "K", "KS", "K_lambda"):
            getattr(family, member)
        for sub, whole in (("K_lambda", "KS"), ("K_lambda", "K"), ("KS", "K")):
            family.quotient(sub, whole)
        built += 8
        for n in range(1, min(g.order - 1, 3)):
            product = ext_boundary(g, n) @ ext_boundary(g, n + 1)
            if not product.is_zero():
                return Outcome(False, "zero", "nonzero", witness={"group": spec, "degree": n})
        if g.order ** 3 <= opts.block_limit:
            if not (bar_boundary(g, 1) @ bar_boundary(g, 2)).is_zero():
                return Outcome(False, "zero", "nonzero", witness={"group": spec, "complex": "bar"})
    return Outcome(True, note=f"{built} complexes built")


def check_lemma_identities(opts: VerifyOptions) -> Outcome:
    for spec in opts.catalog:
        g = parse_group(spec)
        top = min(4, g.order - 1, 2 if opts.quick else 4)
        for n in range(1, top + 1):
            if g.order ** (n + 1) > opts.block_limit:
                break
            lam, nu, mu = lambda_matrix(g, n), nu_matrix(g, n), mu_matrix(g, n)
            lam0, nu0, mu0 = lambda_matrix(g, n - 1), nu_matrix(g, n - 1), mu_matrix(g, n - 1)
            d_bar, d_ext = bar_boundary(g, n), ext_boundary(g, n)
            identities = {
                "λν": (lam @ nu, IntMatrix.scalar(lam.rows, factorial(n + 1))),
                "λ∂": (lam0 @ d_bar, d_ext @ lam),
                "∂μ": (d_bar @ mu, (mu0 @ d_bar).scale(n + 1)),
                "∂ν": (d_bar @ nu, (nu0 @ d_ext).scale(n + 1)),
            }
            for name, (left, right) in identities.items():
                if left != right:
                    return Outcome(False, witness={"group": spec, "degree": n, "identity": name})
    return Outcome(True)


def check_top_degree_formulas(opts: VerifyOptions) -> Outcome:
    for spec in opts.catalog:
        g = parse_group(spec)
        n = g.order
        closed = top_boundary_closed_form(g)
        generic = ext_boundary(g, n - 1).column(0)
        if closed != generic:
            return Outcome(False, closed, generic, witness={"group": spec, "theorem": "top boundary"})
        for module in (trivial_module(g), regular_module(g, "left")):
            block = top_coboundary_block(BasisKind.EXT, module)[0]
            formula = top_coboundary_closed_form(g, module)
            diff = block - formula
            if not all(module.relations.contains(diff.column(j)) for j in range(diff.cols)):
                return Outcome(False, witness={"group": spec, "module": module.name, "theorem": "top coboundary"})
        # n·f(β) or 0, up to the sign relating β to its orbit representative
        trivial_value = abs(top_coboundary_block(BasisKind.EXT, trivial_module(g))[0][0, 0])
        expected = n if g.is_oriented() else 0
        if trivial_value != expected:
            return Outcome(False, expected, trivial_value, witness={"group": spec, "case": "trivial"})
        if not g.is_oriented() and n % 2:
            return Outcome(False, witness={"group": spec, "corollary": "non-oriented of odd order"})
        perm = [0] + opts.rng.sample(range(1, n), n - 1)
        if g.relabel(perm).is_oriented() != g.is_oriented():
            return Outcome(False, witness={"group": spec, "relabel": perm})
        z = trivial_module(g)
        if homology_at(tensor_over_G(z, BasisKind.EXT, range(n - 2, n)), n - 1).invariant_factors != top_exterior_closed_form(g, z).invariant_factors:
            return Outcome(False, witness={"group": spec, "theorem": "top homology"})
    return Outcome(True)


def check_periodic_oracle(opts: VerifyOptions) -> Outcome:
    pairs = []
    scope = []
    for m in range(2, 5 if opts.quick else 7):
        for module_spec in ("trivial:Z", f"trivial:Z/{m}"):
            g = parse_group(f"cyclic:{m}")
            module = parse_module(module_spec, g)
            top = min(3 if opts.quick else 4, _bar_top(g, module, 5, opts.block_limit) - 1)
            degrees = list(range(top + 1))
            scope.append(f"Z{m} {module_spec} 0..{top}")
            for theory, kind in ((TheoryId.CLASSICAL_HOMOLOGY, "chain"), (TheoryId.CLASSICAL_COHOMOLOGY, "cochain")):
                oracle = cyclic_periodic_complex(module, kind, top + 1)
                expected = [list(homology_at(oracle, n).invariant_factors) for n in degrees]
                computed = [list(x.invariant_factors) for x in compute_theory(theory, module, degrees).values()]
                pairs.append((f"{theory.value} Z{m} {module_spec}", expected, computed))
    return _first_mismatch(pairs, scope)


TRANSFER_PAIRS = (("cyclic:4", [0, 2]), ("cyclic:6", [0, 2, 4]), ("cyclic:6", [0, 3]), ("cyclic:2", [0]), ("klein4", [0, 1]))


def _random_member(lattice: Lattice, rng: random.Random) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for v in lattice.vectors():
        c = rng.randint(-3, 3)
        for i, x in v.items():
            out[i] = out.get(i, 0) + c * x
    return {i: x for i, x in out.items() if x}


def check_transfer(opts: VerifyOptions) -> Outcome:
    pairs = TRANSFER_PAIRS[:2] if opts.quick else TRANSFER_PAIRS
    for spec, sub in pairs:
        g = parse_group(spec)
        for module_spec in ("trivial:Z", "trivial:Z/2"):
            ctx = transfer_context(g, sub, parse_module(module_spec, g))
            label = {"group": spec, "subgroup": sub, "module": module_spec}
            top = 2 if g.order > 4 else 3
            for n in range(top + 1):
                conj = psi_inverse_matrix(ctx.module, n) @ ctx.tr_matrix(n) @ psi_matrix(ctx.restricted_module, n)
                if ctx.Tr_matrix(n) != conj:
                    return Outcome(False, witness={**label, "degree": n, "identity": "Tr = ψ⁻¹ tr ψ"})
                if n < top:
                    left = delta_on_functions(ctx.module, n) @ ctx.tr_matrix(n)
                    right = ctx.tr_matrix(n + 1) @ delta_on_functions(ctx.restricted_module, n)
                    if left != right:
                        return Outcome(False, witness={**label, "degree": n, "identity": "δ tr = tr δ"})
            big = ctx.family("G", top)
            small = ctx.family("H", top)
            for n in range(top + 1):
                if n < top:
                    left = big.equivariant_ambient.coboundary[n] @ ctx.Tr_matrix(n)
                    right = ctx.Tr_matrix(n + 1) @ small.equivariant_ambient.coboundary[n]
                    if left != right:
                        return Outcome(False, witness={**label, "degree": n, "identity": "δ Tr = Tr δ"})
                for member in ("KS", "K_lambda"):
                    sigma = _random_member(getattr(small, member).lattices[n], opts.rng)
                    image = ctx.Tr_matrix(n).apply(sigma)
                    if not getattr(big, member).contains(n, image):
                        return Outcome(False, witness={**label, "degree": n, "subcomplex": member, "sigma": sigma})
            for n in range(3):
                hom = cores_res(ctx, TheoryId.CLASSICAL_COHOMOLOGY, n)
                if not is_index_multiplication(hom, ctx.index):
                    return Outcome(False, witness={**label, "degree": n, "identity": "cores∘res = index"})
    return Outcome(True)


def check_long_exact_sequences(opts: VerifyOptions) -> Outcome:
    exact_nodes = 0
    for spec, module_spec in (("cyclic:2", "trivial:Z/2"), ("cyclic:3", "trivial:Z")):
        g = parse_group(spec)
        family = CochainFamily(parse_module(module_spec, g), range(0, 5))
        for sub, whole in (("K_lambda", "KS"), ("K_lambda", "K"), ("KS", "K")):
            _, ses = family.quotient(sub, whole)
            les = long_exact_sequence(ses, range(0, 4))
            exact_nodes += len(les.exact_at)
    return Outcome(True, note=f"exact at {exact_nodes} nodes")


def check_symmetric_splitting(opts: VerifyOptions) -> Outcome:
    degrees = list(range(6))
    g = parse_group("cyclic:2")
    module = parse_module("trivial:Z/2", g)
    hs = compute_theory(TheoryId.SYM_COHOMOLOGY, module, degrees)
    lam = compute_theory(TheoryId.EXT_COHOMOLOGY, module, degrees, route="klambda")
    slam = compute_theory(TheoryId.SLAMBDA, module, degrees)
    pairs = []
    for n in degrees:
        union = FpAbGroup.from_invariant_factors(list(lam[n].invariant_factors) + list(slam[n].invariant_factors))
        pairs.append((n, list(hs[n].invariant_factors), list(union.invariant_factors)))
    pairs.append(("H^5_sλ", [2], list(slam[5].invariant_factors)))
    return _first_mismatch(pairs)


def _catalog_pairs(opts: VerifyOptions) -> List[Tuple[str, str]]:
    return [(g, m) for g in opts.catalog for m in ("trivial:Z", "trivial:Z/2", "regular")]


def check_symmetric_models_agree(opts: VerifyOptions) -> Outcome:
    pairs = []
    for spec, module_spec in _catalog_pairs(opts):
        g = parse_group(spec)
        module = parse_module(module_spec, g)
        degrees = list(range(min(4, g.order - 1) + 1))
        scaled = compute_theory(TheoryId.SYM_HOMOLOGY, module, degrees, route="scaled")
        direct = compute_theory(TheoryId.SYM_HOMOLOGY, module, degrees, route="direct")
        pairs.append((f"{spec} {module_spec}", [scaled[n].invariant_factors for n in degrees], [direct[n].invariant_factors for n in degrees]))
    return _first_mismatch(pairs)


def check_exterior_routes_agree(opts: VerifyOptions) -> Outcome:
    pairs = []
    scope = []
    for spec, module_spec in _catalog_pairs(opts):
        g = parse_group(spec)
        module = parse_module(module_spec, g)
        top = min(2 if opts.quick else 4, _bar_top(g, module, 5, opts.block_limit) - 1)
        if top < 0:
            continue
        degrees = list(range(top + 1))
        scope.append(f"{spec} {module_spec} 0..{top}")
        orbit = compute_theory(TheoryId.EXT_COHOMOLOGY, module, degrees, route="orbit")
        klam = compute_theory(TheoryId.EXT_COHOMOLOGY, module, degrees, route="klambda")
        pairs.append((f"{spec} {module_spec}", [orbit[n].invariant_factors for n in degrees], [klam[n].invariant_factors for n in degrees]))
    return _first_mismatch(pairs, scope)


PROPERTY_CHECKS: List[Tuple[str, Check]] = [
    ("∂∂ = 0 and δδ = 0", check_boundary_squares),
    ("comparison map identities", check_lemma_identities),
    ("top-degree closed forms", check_top_degree_formulas),
    ("bar complex vs periodic resolution", check_periodic_oracle),
    ("transfer identities", check_transfer),
    ("long exact sequences", check_long_exact_sequences),
    ("HS = H_λ ⊕ H_sλ", check_symmetric_splitting),
    ("BS direct vs scaled", check_symmetric_models_agree),
    ("exterior cohomology routes", check_exterior_routes_agree),
]


def _run_check(name: str, suite: str, check: Check, opts: VerifyOptions) -> CheckResult:
    start = time.time()
    try:
        outcome = check(opts)
    except GhlError as e:
        outcome = Outcome(False, witness=e.to_dict(), note="engine error")
    seconds = time.time() - start
    status = "pass" if outcome.passed else "FAIL"
    logger.info(f"[{suite}] {name}: {status} ({seconds:.2f}s)")
    return CheckResult(
        name=name,
        suite=suite,
        passed=outcome.passed,
        expected=outcome.expected,
        computed=outcome.computed,
        witness=outcome.witness,
        seconds=round(seconds, 3),
        note=outcome.note,
    )


def run_suite(suite: str = "all", seed: int = 42, mutate: Optional[str] = None, quick: bool = False) -> VerifyReport:
    if suite not in SUITES:
        raise UsageError(f"Unknown suite '{suite}', expected one of {', '.join(SUITES)}")
    if mutate is not None and mutate not in MUTATIONS:
        raise UsageError(f"Unknown mutation '{mutate}', expected one of {', '.join(MUTATIONS)}")
    opts = VerifyOptions(rng=random.Random(seed), quick=quick)
    report = VerifyReport(suite=suite, seed=seed, mutation=mutate)
    selected = []
    if suite in ("paper", "all"):
        selected += [(name, "paper", check) for name, check in REFERENCE_CHECKS]
    if suite in ("properties", "all"):
        selected += [(name, "properties", check) for name, check in PROPERTY_CHECKS]
    basis_module.cache_clear()
    with ext_sign_mutation() if mutate == "ext-sign" else nullcontext():
        for name, kind, check in selected:
            report.checks.append(_run_check(name, kind, check, opts))
    if mutate:
        basis_module.cache_clear()
    logger.info(f"Suite {suite}: {len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return report
