"""Restriction and corestriction for classical, symmetric and exterior cohomology.

tr^n acts on the function model C^*, Tr^n on the equivariant model K^*;
they correspond under ψ. Coset representatives come from ``CosetSystem``,
so every matrix here is deterministic.
"""
import logging
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from ghl.cochains import CochainFamily, tuple_index, tuples
from ghl.coeffmod import GModule
from ghl.complexes import BlockBuilder, ChainMap, LatticeComplex
from ghl.errors import LatticeContainmentError, StructuralError, UsageError
from ghl.exactlinalg import FpHom, IntMatrix, Vector
from ghl.groups import CosetSystem, FiniteGroup
from ghl.homology import TheoryId, induced_on_homology

logger = logging.getLogger(__name__)

# Cochain model per theory: (family member, uses the function model)
TRANSFER_MODELS: Dict[TheoryId, Tuple[str, bool]] = {
    TheoryId.CLASSICAL_COHOMOLOGY: ("C", True),
    TheoryId.SYM_COHOMOLOGY: ("KS", False),
    TheoryId.EXT_COHOMOLOGY: ("K_lambda", False),
}


class TransferContext:
    """Group G, subgroup H with chosen coset representatives, and a G-module A."""

    def __init__(self, cosets: CosetSystem, module: GModule):
        if module.group is not cosets.group:
            raise UsageError("Module and coset system live over different groups")
        self.cosets = cosets
        self.group: FiniteGroup = cosets.group
        self.sub: FiniteGroup = cosets.sub_group
        self.module = module.as_left()
        self.restricted_module = self.module.restrict(cosets)
        self._families: Dict[Tuple[str, int], CochainFamily] = {}

    @classmethod
    def build(cls, group: FiniteGroup, subgroup: Iterable[int], module: GModule) -> "TransferContext":
        return cls(CosetSystem(group, subgroup), module)

    @property
    def index(self) -> int:
        return self.cosets.index

    def reindexed(self, reps: Sequence[int]) -> "TransferContext":
        return TransferContext(self.cosets.reindexed(reps), self.module)

    def family(self, side: str, top: int) -> CochainFamily:
        key = (side, top)
        if key not in self._families:
            module = self.module if side == "G" else self.restricted_module
            self._families[key] = CochainFamily(module, range(0, top + 2))
        return self._families[key]

    def _sub_tuple(self, elements: Sequence[int]) -> Tuple[int, ...]:
        out = []
        for y in elements:
            if not self.cosets.in_subgroup(y):
                raise StructuralError(
                    f"Transfer argument {self.group.label(y)} is not in the subgroup",
                    witness={"element": y, "arguments": list(elements)},
                )
            out.append(self.cosets.to_sub(y))
        return tuple(out)

    # Cochain-level matrices

    def res_function_matrix(self, n: int) -> IntMatrix:
        """C^n(G, A) -> C^n(H, A), restriction along H^n ⊆ G^n."""
        G, H = self.group, self.sub
        emb = self.cosets.embedding
        ident = IntMatrix.identity(self.module.rank)
        builder = BlockBuilder(H.order ** n, G.order ** n, self.module.rank)
        for row, h in enumerate(tuples(H, n)):
            builder.add(row, tuple_index(G, [emb[y] for y in h]), ident)
        return builder.build()

    def res_equivariant_matrix(self, n: int) -> IntMatrix:
        """K^n(G, A) -> K^n(H, A), restriction along H^{n+1} ⊆ G^{n+1}."""
        # representatives (e, y_1..y_n) restrict to (e, y_1..y_n): same block pattern
        return self.res_function_matrix(n)

    def tr_matrix(self, n: int) -> IntMatrix:
        """tr^n: C^n(H, A) -> C^n(G, A)."""
        G, H = self.group, self.sub
        mul, inv, bar = G.mul, G.inv, self.cosets.bar
        A = self.module
        builder = BlockBuilder(G.order ** n, H.order ** n, A.rank)
        for row, g in enumerate(tuples(G, n)):
            suffix = [0] * (n + 1)
            for k in range(n - 1, -1, -1):
                suffix[k] = mul(g[k], suffix[k + 1])
            for c in self.cosets.reps:
                bars = [bar[mul(suffix[k], c)] for k in range(n)] + [c]
                args = [mul(mul(inv(bars[k]), g[k]), bars[k + 1]) for k in range(n)]
                builder.add(row, tuple_index(H, self._sub_tuple(args)), A.action[bars[0]])
        return builder.build()

    def Tr_matrix(self, n: int) -> IntMatrix:
        """Tr^n: K^n(H, A) -> K^n(G, A), evaluated on the representatives (e, g_1..g_n)."""
        G, H = self.group, self.sub
        mul, inv, bar = G.mul, G.inv, self.cosets.bar
        A = self.module
        builder = BlockBuilder(G.order ** n, H.order ** n, A.rank)
        for row, g in enumerate(tuples(G, n)):
            last = g[-1] if n else 0
            for c in self.cosets.reps:
                u = bar[mul(last, c)]
                u_inv = inv(u)
                args = [mul(mul(u_inv, gt), bar[mul(mul(inv(gt), last), c)]) for gt in g]
                builder.add(row, tuple_index(H, self._sub_tuple(args)), A.action[u])
        return builder.build()

    # Chain maps between cochain models

    def _models(self, theory: TheoryId, top: int) -> Tuple[LatticeComplex, LatticeComplex, bool]:
        theory = TheoryId(theory)
        if theory not in TRANSFER_MODELS:
            supported = ", ".join(t.value for t in TRANSFER_MODELS)
            raise UsageError(f"Transfer is available for {supported}, not {theory.value}")
        member, functional = TRANSFER_MODELS[theory]
        big = getattr(self.family("G", top), member)
        small = getattr(self.family("H", top), member)
        return big, small, functional

    def res_chain_map(self, theory: TheoryId, top: int) -> ChainMap:
        big, small, functional = self._models(theory, top)
        make = self.res_function_matrix if functional else self.res_equivariant_matrix
        return small.map_from(big, {m: make(m) for m in big.degrees})

    def cores_chain_map(self, theory: TheoryId, top: int) -> ChainMap:
        big, small, functional = self._models(theory, top)
        make = self.tr_matrix if functional else self.Tr_matrix
        return big.map_from(small, {m: make(m) for m in big.degrees})


def _member_vector(model: LatticeComplex, n: int, sigma: Mapping[int, int], what: str) -> Vector:
    vec = {i: x for i, x in sigma.items() if x}
    if not model.contains(n, vec):
        raise LatticeContainmentError(f"{what} is not in {model.name} in degree {n}", witness=vec)
    return vec


def res_cochain(ctx: TransferContext, theory: TheoryId, n: int, sigma: Mapping[int, int]) -> Vector:
    """Restrict a G-cochain of the theory's model to H."""
    big, _, functional = ctx._models(theory, n)
    vec = _member_vector(big, n, sigma, "Cochain")
    matrix = ctx.res_function_matrix(n) if functional else ctx.res_equivariant_matrix(n)
    return matrix.apply(vec)


def tr_cochain(ctx: TransferContext, n: int, sigma: Mapping[int, int]) -> Vector:
    return ctx.tr_matrix(n).apply(sigma)


def Tr_cochain(ctx: TransferContext, n: int, sigma: Mapping[int, int]) -> Vector:
    return ctx.Tr_matrix(n).apply(sigma)


def res_on_cohomology(ctx: TransferContext, theory: TheoryId, n: int) -> FpHom:
    """H^n(G, A) -> H^n(H, A)."""
    return induced_on_homology(ctx.res_chain_map(theory, n), n)


def cores_on_cohomology(ctx: TransferContext, theory: TheoryId, n: int) -> FpHom:
    """H^n(H, A) -> H^n(G, A), [σ] ↦ [tr σ] or [Tr σ]."""
    hom = induced_on_homology(ctx.cores_chain_map(theory, n), n)
    logger.info(
        f"cores for {TheoryId(theory).value} in degree {n}, [{ctx.group.name}:{ctx.sub.name}] = {ctx.index}: "
        f"{hom.source.describe()} -> {hom.target.describe()}"
    )
    return hom


def cores_res(ctx: TransferContext, theory: TheoryId, n: int) -> FpHom:
    """cores ∘ res on H^n(G, A)."""
    return cores_on_cohomology(ctx, theory, n).compose(res_on_cohomology(ctx, theory, n))


def is_index_multiplication(hom: FpHom, index: int) -> bool:
    return hom == FpHom.multiplication(hom.source, index)


def map_for(ctx: TransferContext, theory: TheoryId, which: str, n: int) -> FpHom:
    maps = {"res": res_on_cohomology, "cores": cores_on_cohomology, "cores-res": cores_res}
    if which not in maps:
        raise UsageError(f"Unknown transfer map '{which}', expected res, cores or cores-res")
    return maps[which](ctx, theory, n)


SubgroupArg = Union[CosetSystem, Iterable[int]]


def transfer_context(group: FiniteGroup, subgroup: SubgroupArg, module: GModule, reps: Optional[Sequence[int]] = None) -> TransferContext:
    cosets = subgroup if isinstance(subgroup, CosetSystem) else CosetSystem(group, subgroup)
    if reps is not None:
        cosets = cosets.reindexed(reps)
    return TransferContext(cosets, module)
