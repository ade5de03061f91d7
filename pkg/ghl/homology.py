"""(Co)homology of presented complexes, induced maps and long exact sequences."""
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from ghl.cochains import CochainFamily
from ghl.coeffmod import GModule, GroupRingElement, annihilator_of, twisted_coinvariants
from ghl.complexes import (
    BasisKind,
    ChainMap,
    ComplexOfFp,
    LatticeComplex,
    ShortExactSequence,
    hom_over_G,
    symmetric_to_exterior,
    tensor_over_G,
    working_modulus,
)
from ghl.config import settings
from ghl.errors import DegreeRangeError, StructuralError, UsageError
from ghl.exactlinalg import FpAbGroup, FpHom, IntMatrix, Subquotient, connecting_hom
from ghl.groups import FiniteGroup

logger = logging.getLogger(__name__)


class TheoryId(str, Enum):
    CLASSICAL_HOMOLOGY = "classical-homology"
    CLASSICAL_COHOMOLOGY = "classical-cohomology"
    SYM_HOMOLOGY = "sym-homology"
    SYM_COHOMOLOGY = "sym-cohomology"
    EXT_HOMOLOGY = "ext-homology"
    EXT_COHOMOLOGY = "ext-cohomology"
    SLAMBDA = "slambda"
    CLAMBDA = "clambda"
    CS = "cs"

    @property
    def is_homological(self) -> bool:
        return self in (TheoryId.CLASSICAL_HOMOLOGY, TheoryId.SYM_HOMOLOGY, TheoryId.EXT_HOMOLOGY)


def parse_theory(value: str) -> TheoryId:
    try:
        return TheoryId(value)
    except ValueError:
        choices = ", ".join(t.value for t in TheoryId)
        raise UsageError(f"Unknown theory '{value}', expected one of {choices}")


# Routes an id may be computed by; the first is the default.
ROUTES: Dict[TheoryId, Tuple[str, ...]] = {
    TheoryId.CLASSICAL_HOMOLOGY: ("bar",),
    TheoryId.CLASSICAL_COHOMOLOGY: ("equivariant", "function"),
    TheoryId.SYM_HOMOLOGY: ("scaled", "direct"),
    TheoryId.SYM_COHOMOLOGY: ("skew", "staic"),
    TheoryId.EXT_HOMOLOGY: ("orbit",),
    TheoryId.EXT_COHOMOLOGY: ("orbit", "klambda"),
    TheoryId.SLAMBDA: ("quotient",),
    TheoryId.CLAMBDA: ("quotient",),
    TheoryId.CS: ("quotient",),
}


def default_window(theory: TheoryId, group: FiniteGroup) -> range:
    """0..|G|-1 for exterior/symmetric chains, 0..min(|G|, 5) for function-cochain theories."""
    if theory in (TheoryId.EXT_HOMOLOGY, TheoryId.SYM_HOMOLOGY):
        return range(0, group.order)
    return range(0, min(group.order, 5) + 1)


def theory_complex(
    theory: TheoryId,
    module: GModule,
    top: int,
    route: Optional[str] = None,
    budget: Optional[int] = None,
) -> ComplexOfFp:
    """The complex an id binds to, built far enough to read (co)homology up to ``top``."""
    theory = TheoryId(theory)
    route = route or ROUTES[theory][0]
    if route not in ROUTES[theory]:
        raise UsageError(f"Theory {theory.value} has no route '{route}'")
    degrees = range(0, top + 2)
    if theory == TheoryId.CLASSICAL_HOMOLOGY:
        return tensor_over_G(module, BasisKind.BAR, degrees, budget)
    if theory == TheoryId.SYM_HOMOLOGY:
        kind = BasisKind.BS_DIRECT if route == "direct" else BasisKind.BS
        return tensor_over_G(module, kind, degrees, budget)
    if theory == TheoryId.EXT_HOMOLOGY:
        return tensor_over_G(module, BasisKind.EXT, degrees, budget)
    if theory == TheoryId.EXT_COHOMOLOGY and route == "orbit":
        return hom_over_G(BasisKind.EXT, module, degrees, budget)
    family = CochainFamily(module, degrees, budget)
    if theory == TheoryId.CLASSICAL_COHOMOLOGY:
        return (family.C if route == "function" else family.K).complex
    if theory == TheoryId.SYM_COHOMOLOGY:
        return (family.CS if route == "staic" else family.KS).complex
    if theory == TheoryId.EXT_COHOMOLOGY:
        return family.K_lambda.complex
    sub, whole = {
        TheoryId.SLAMBDA: ("K_lambda", "KS"),
        TheoryId.CLAMBDA: ("K_lambda", "K"),
        TheoryId.CS: ("KS", "K"),
    }[theory]
    quotient, _ = family.quotient(sub, whole)
    return quotient


def _recheck_square(c: ComplexOfFp, n: int) -> None:
    prev, nxt = c.prev_degree(n), c.next_degree(n)
    if prev not in c.degrees or nxt not in c.degrees:
        return
    dd = c.differential(n) @ c.differential(prev)
    rel = c.group(nxt).relations
    for j in range(dd.cols):
        if not rel.contains(dd.column(j)):
            raise StructuralError(
                f"Differential squares to a nonzero map through degree {n} in {c.name}",
                witness={"degree": n, "generator": j},
            )


def homology_at(c: ComplexOfFp, n: int) -> FpAbGroup:
    """Cycles modulo boundaries in degree n, zero outside the complex."""
    if n not in c.degrees:
        return FpAbGroup.trivial()
    _recheck_square(c, n)
    return c.homology_data(n).group


def compute_theory(
    theory: TheoryId,
    module: GModule,
    degrees: Sequence[int],
    route: Optional[str] = None,
    budget: Optional[int] = None,
) -> Dict[int, FpAbGroup]:
    """Invariant-factor groups of one theory in the requested degrees."""
    if not degrees:
        return {}
    if min(degrees) < 0:
        raise DegreeRangeError(f"Degrees must be nonnegative, got {min(degrees)}")
    top = max(degrees)
    start = time.time()
    complex_ = theory_complex(TheoryId(theory), module, top, route=route, budget=budget)
    out = {n: homology_at(complex_, n) for n in degrees}
    logger.info(
        f"{TheoryId(theory).value} of {module.group.name} with {module.name} in degrees "
        f"{min(degrees)}..{top} took {(time.time() - start) * 1000:.0f} ms"
    )
    return out


def induced_on_homology(f: ChainMap, n: int) -> FpHom:
    """[z] ↦ [f(z)] between the (co)homology groups of source and target."""
    nxt = f.source.next_degree(n)
    if n in f.source.degrees and n in f.target.degrees and nxt in f.source.degrees and nxt in f.target.degrees:
        diff = f.target.differential(n) @ f.at(n) - f.at(nxt) @ f.source.differential(n)
        rel = f.target.group(nxt).relations
        for j in range(diff.cols):
            if not rel.contains(diff.column(j)):
                raise StructuralError(
                    f"Map does not commute with differentials in degree {n}", witness={"degree": n, "generator": j}
                )
    if n not in f.source.degrees or n not in f.target.degrees:
        return FpHom.zero(homology_at(f.source, n), homology_at(f.target, n))
    src = f.source.homology_data(n)
    dst = f.target.homology_data(n)
    columns = []
    for k in range(src.group.generators):
        image = f.at(n).apply(src.section.column(k))
        if not dst.numerator.contains(image):
            raise StructuralError(f"Image of a cycle is not a cycle in degree {n}", witness={"degree": n, "generator": k})
        columns.append(dst.coordinates(image))
    return FpHom(src.group, dst.group, IntMatrix(dst.group.generators, src.group.generators, columns))


def inclusion_on_cohomology(sub: LatticeComplex, whole: LatticeComplex, n: int) -> FpHom:
    """Map induced by a subcomplex inclusion, such as CS ⊆ C or K_λ ⊆ K."""
    return induced_on_homology(sub.inclusion_into(whole), n)


def symmetric_to_exterior_on_homology(module: GModule, n: int, budget: Optional[int] = None) -> FpHom:
    """HS_n(G, A) -> H^λ_n(G, A) induced by λ∘ν."""
    f = symmetric_to_exterior(module, range(max(n - 1, 0), n + 2), budget)
    return induced_on_homology(f, n)


@dataclass
class LesNode:
    """One group of a long exact sequence with the map leaving it."""

    label: str
    degree: int
    group: FpAbGroup
    outgoing: Optional[FpHom] = None


@dataclass
class LongExactSequence:
    nodes: List[LesNode] = field(default_factory=list)
    exact_at: List[str] = field(default_factory=list)

    def describe(self) -> List[Tuple[str, str]]:
        return [(f"{n.label}{n.degree}", n.group.describe()) for n in self.nodes]


def _les_maps(ses: ShortExactSequence, n: int) -> Tuple[FpHom, FpHom]:
    return induced_on_homology(ses.inclusion, n), induced_on_homology(ses.projection, n)


def long_exact_sequence(ses: ShortExactSequence, window: range) -> LongExactSequence:
    """Assemble H(sub) -> H(whole) -> H(quotient) -> H(sub) ... over ``window`` and check exactness."""
    whole = ses.whole
    order = list(window) if whole.kind == "cochain" else list(reversed(window))
    les = LongExactSequence()
    for n in order:
        inc, proj = _les_maps(ses, n)
        les.nodes.append(LesNode("sub", n, inc.source, inc))
        les.nodes.append(LesNode("whole", n, inc.target, proj))
        nxt = whole.next_degree(n)
        node = LesNode("quotient", n, proj.target)
        if nxt in window:
            node.outgoing = connecting_hom(ses.sub, whole, ses.quotient, ses.inclusion, ses.projection, n)
        les.nodes.append(node)
    for before, here in zip(les.nodes, les.nodes[1:]):
        if before.outgoing is None or here.outgoing is None:
            continue
        image = before.outgoing.image()
        kernel = here.outgoing.kernel()
        if image != kernel:
            raise StructuralError(
                f"Sequence is not exact at {here.label} in degree {here.degree}",
                witness={"node": here.label, "degree": here.degree},
            )
        les.exact_at.append(f"{here.label}{here.degree}")
    logger.info(f"Long exact sequence exact at {len(les.exact_at)} nodes")
    return les


def top_exterior_closed_form(group: FiniteGroup, module: GModule) -> FpAbGroup:
    """{a : a·S ∈ R} / (R + span(a·g − sign(g)·a)) with S = Σ sign(g)·g.

    This is the exterior homology in the top degree |G|-1; for oriented
    groups S is the norm element.
    """
    A = module.as_right()
    numerator = annihilator_of(A, GroupRingElement.signed_sum(group))
    denominator = twisted_coinvariants(A, group.sign_character)
    return Subquotient(A.rank, numerator, denominator, modulus=working_modulus(A)).group


def check_degree_cutoff(degrees: Sequence[int], cutoff: Optional[int] = None) -> None:
    limit = settings.ghl_max_degree if cutoff is None else cutoff
    if degrees and max(degrees) > limit:
        raise DegreeRangeError(
            f"Degree {max(degrees)} exceeds the cutoff {limit}",
            witness={"degree": max(degrees), "cutoff": limit},
        )
