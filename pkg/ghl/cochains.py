"""Function cochains C^*(G, A), the Staic operators and the skew-symmetric subcomplexes.

Two cochain models live side by side. The function model C^n has one
A-block per tuple in G^n (lexicographic). The equivariant model K^n is
Hom_G(B_n, A) on the bar representatives (e, x_1, ..., x_n), indexed by the
same lexicographic numbering of (x_1, ..., x_n); ψ moves between them.
"""
import logging
from functools import cached_property
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from ghl.coeffmod import GModule
from ghl.complexes import (
    AmbientCochains,
    BasisKind,
    BlockBuilder,
    ChainMap,
    ComplexOfFp,
    LatticeComplex,
    ShortExactSequence,
    basis_module,
    check_budget,
    hom_ambient,
)
from ghl.errors import DegreeRangeError
from ghl.exactlinalg import IntMatrix, Lattice, preimage_lattice
from ghl.groups import FiniteGroup

logger = logging.getLogger(__name__)


def tuple_index(group: FiniteGroup, tup: Sequence[int]) -> int:
    n = group.order
    out = 0
    for x in tup:
        out = out * n + x
    return out


def tuples(group: FiniteGroup, n: int) -> List[Tuple[int, ...]]:
    return list(product(group.elements(), repeat=n))


def face_operator(module: GModule, n: int, j: int) -> IntMatrix:
    """d^j: C^n -> C^{n+1} for 0 <= j <= n+1."""
    if not 0 <= j <= n + 1:
        raise DegreeRangeError(f"Face index {j} outside 0..{n + 1}")
    A = module.as_left()
    G = A.group
    ident = IntMatrix.identity(A.rank)
    builder = BlockBuilder(G.order ** (n + 1), G.order ** n, A.rank)
    for row, g in enumerate(tuples(G, n + 1)):
        if j == 0:
            builder.add(row, tuple_index(G, g[1:]), A.action[g[0]])
        elif j == n + 1:
            builder.add(row, tuple_index(G, g[:n]), ident)
        else:
            merged = g[: j - 1] + (G.mul(g[j - 1], g[j]),) + g[j + 1:]
            builder.add(row, tuple_index(G, merged), ident)
    return builder.build()


def delta_on_functions(module: GModule, n: int) -> IntMatrix:
    """δ^n: C^n -> C^{n+1}, the alternating sum of the face operators."""
    if n < 0:
        raise DegreeRangeError(f"Cochain degree must be nonnegative, got {n}")
    A = module.as_left()
    G = A.group
    ident = IntMatrix.identity(A.rank)
    builder = BlockBuilder(G.order ** (n + 1), G.order ** n, A.rank)
    for row, g in enumerate(tuples(G, n + 1)):
        builder.add(row, tuple_index(G, g[1:]), A.action[g[0]])
        for j in range(1, n + 1):
            merged = g[: j - 1] + (G.mul(g[j - 1], g[j]),) + g[j + 1:]
            builder.add(row, tuple_index(G, merged), ident, -1 if j % 2 else 1)
        builder.add(row, tuple_index(G, g[:n]), ident, -1 if (n + 1) % 2 else 1)
    return builder.build()


def staic_action(module: GModule, n: int, i: int) -> IntMatrix:
    """τ_i on C^n, 1 <= i <= n; the Σ_{n+1}-action whose fixed points are CS^n."""
    if not 1 <= i <= n:
        raise DegreeRangeError(f"τ index {i} outside 1..{n}")
    A = module.as_left()
    G = A.group
    mul, inv = G.mul, G.inv
    ident = IntMatrix.identity(A.rank)
    builder = BlockBuilder(G.order ** n, G.order ** n, A.rank)
    for row, g in enumerate(tuples(G, n)):
        if n == 1:
            builder.add(row, tuple_index(G, (inv(g[0]),)), A.action[g[0]], -1)
        elif i == 1:
            arg = (inv(g[0]), mul(g[0], g[1])) + g[2:]
            builder.add(row, tuple_index(G, arg), A.action[g[0]], -1)
        elif i == n:
            arg = g[: n - 2] + (mul(g[n - 2], g[n - 1]), inv(g[n - 1]))
            builder.add(row, tuple_index(G, arg), ident, -1)
        else:
            # positions i-1, i, i+1 in one-based notation
            a, b, c = g[i - 2], g[i - 1], g[i]
            arg = g[: i - 2] + (mul(a, b), inv(b), mul(b, c)) + g[i + 1:]
            builder.add(row, tuple_index(G, arg), ident, -1)
    return builder.build()


def psi_matrix(module: GModule, n: int) -> IntMatrix:
    """ψ^n: K^n -> C^n, ψ(f)(g_1..g_n) = f(e, g_1, g_1g_2, ..., g_1⋯g_n)."""
    A = module.as_left()
    G = A.group
    ident = IntMatrix.identity(A.rank)
    builder = BlockBuilder(G.order ** n, G.order ** n, A.rank)
    for row, g in enumerate(tuples(G, n)):
        x, partial = [], 0
        for h in g:
            partial = G.mul(partial, h)
            x.append(partial)
        builder.add(row, tuple_index(G, x), ident)
    return builder.build()


def psi_inverse_matrix(module: GModule, n: int) -> IntMatrix:
    """(ψ^n)^{-1}: C^n -> K^n, g_1 = x_1 and g_k = x_{k-1}^{-1} x_k."""
    A = module.as_left()
    G = A.group
    ident = IntMatrix.identity(A.rank)
    builder = BlockBuilder(G.order ** n, G.order ** n, A.rank)
    for row, x in enumerate(tuples(G, n)):
        g, prev = [], 0
        for h in x:
            g.append(G.mul(G.inv(prev), h))
            prev = h
        builder.add(row, tuple_index(G, g), ident)
    return builder.build()


def function_ambient(module: GModule, degrees: range, budget: Optional[int] = None) -> AmbientCochains:
    """C^* on the blocks G^n with coboundary δ^n."""
    A = module.as_left()
    G = A.group
    blocks = {}
    for n in degrees:
        blocks[n] = G.order ** n
        check_budget(f"function cochains in degree {n}", blocks[n] * A.rank, budget)
    coboundary = {n: delta_on_functions(A, n) for n in degrees if n + 1 in degrees}
    return AmbientCochains(A, blocks, coboundary, degrees, name="C")


def _stacked_fixed_lattice(ambient: AmbientCochains, n: int, operators: List[IntMatrix]) -> Lattice:
    """{x : (op − I)x ∈ R for every op}."""
    if not operators:
        return Lattice.full(ambient.rank(n))
    ident = IntMatrix.identity(ambient.rank(n))
    stacked = IntMatrix.vstack(ambient.rank(n), [op - ident for op in operators])
    target = Lattice.direct_sum([ambient.relations(n)] * len(operators))
    return preimage_lattice(stacked, target, modulus=ambient.modulus)


def _adjacent_repeat(tag: Sequence[int]) -> bool:
    return any(a == b for a, b in zip(tag, tag[1:]))


def skew_constraints(group: FiniteGroup, module: GModule, n: int, vanishing: bool) -> Tuple[IntMatrix, int]:
    """Stacked constraint matrix on K^n whose preimage of R is KS^n (or K^n_λ).

    For each representative r and each adjacent swap, with swap_i(r) = g·r'',
    the block row reads action(g)·x_{r''} + x_r. A swap fixing r gives 2·x_r.
    With ``vanishing`` every representative with an adjacent repeat also
    contributes the row x_r.
    """
    A = module.as_left()
    k = A.rank
    bar = basis_module(BasisKind.BAR, group, n)
    ident = IntMatrix.identity(k)
    reps = bar.rep_count()
    rows: List[Tuple[int, IntMatrix, int, IntMatrix]] = []
    for r in range(reps):
        tag = bar.rep(r)
        for i in range(n):
            swapped = tag[:i] + (tag[i + 1], tag[i]) + tag[i + 2:]
            r2, g, _ = bar.locate(swapped)
            rows.append((r, ident, r2, A.action[g]))
        if vanishing and _adjacent_repeat(tag):
            rows.append((r, ident, r, IntMatrix.zero(k, k)))
    builder = BlockBuilder(len(rows), reps, k)
    for row, (r, own, r2, other) in enumerate(rows):
        builder.add(row, r, own)
        builder.add(row, r2, other)
    return builder.build(), len(rows)


def _constraint_lattice(ambient: AmbientCochains, n: int, vanishing: bool) -> Lattice:
    if n == 0:
        return Lattice.full(ambient.rank(0))
    matrix, count = skew_constraints(ambient.group, ambient.module, n, vanishing)
    target = Lattice.direct_sum([ambient.module.relations] * count)
    return preimage_lattice(matrix, target, modulus=ambient.modulus)


class CochainFamily:
    """C, CS, K, KS and K_λ for one module over a degree range, built on demand."""

    def __init__(self, module: GModule, degrees: range, budget: Optional[int] = None):
        self.module = module.as_left()
        self.group = self.module.group
        self.degrees = degrees
        self.budget = budget

    @cached_property
    def function_ambient(self) -> AmbientCochains:
        return function_ambient(self.module, self.degrees, self.budget)

    @cached_property
    def equivariant_ambient(self) -> AmbientCochains:
        ambient, _ = hom_ambient(BasisKind.BAR, self.module, self.degrees, self.budget)
        ambient.name = "K"
        return ambient

    @cached_property
    def C(self) -> LatticeComplex:
        return self.function_ambient.full()

    @cached_property
    def CS(self) -> LatticeComplex:
        amb = self.function_ambient
        lattices = {
            n: _stacked_fixed_lattice(amb, n, [staic_action(self.module, n, i) for i in range(1, n + 1)])
            for n in self.degrees
        }
        logger.info(f"Built CS for {self.group.name} in degrees {self.degrees.start}..{self.degrees.stop - 1}")
        return LatticeComplex(amb, lattices, name="CS")

    @cached_property
    def K(self) -> LatticeComplex:
        return self.equivariant_ambient.full()

    @cached_property
    def KS(self) -> LatticeComplex:
        amb = self.equivariant_ambient
        lattices = {n: _constraint_lattice(amb, n, vanishing=False) for n in self.degrees}
        logger.info(f"Built KS for {self.group.name} in degrees {self.degrees.start}..{self.degrees.stop - 1}")
        return LatticeComplex(amb, lattices, name="KS")

    @cached_property
    def K_lambda(self) -> LatticeComplex:
        amb = self.equivariant_ambient
        lattices = {n: _constraint_lattice(amb, n, vanishing=True) for n in self.degrees}
        logger.info(f"Built K_λ for {self.group.name} in degrees {self.degrees.start}..{self.degrees.stop - 1}")
        return LatticeComplex(amb, lattices, name="K_λ")

    def inclusion(self, sub: str, whole: str) -> ChainMap:
        """Chain map between two members named by attribute, e.g. ("KS", "K")."""
        return getattr(self, sub).inclusion_into(getattr(self, whole))

    def quotient(self, sub: str, whole: str) -> Tuple[ComplexOfFp, ShortExactSequence]:
        return getattr(self, sub).quotient_of(getattr(self, whole))

    def psi_chain_map(self) -> ChainMap:
        """ψ as a chain map K -> C."""
        maps = {n: psi_matrix(self.module, n) for n in self.degrees}
        return self.C.map_from(self.K, maps)


def subcomplexes(module: GModule, degrees: range, budget: Optional[int] = None) -> Dict[str, ComplexOfFp]:
    """CS^*, KS^* and K^*_λ as complexes; inclusions come from ``CochainFamily.inclusion``."""
    family = CochainFamily(module, degrees, budget)
    return {"CS": family.CS.complex, "KS": family.KS.complex, "K_lambda": family.K_lambda.complex}


def top_coboundary_closed_form(group: FiniteGroup, module: GModule) -> IntMatrix:
    """δf(α) = (Σ sign(g)·g)·f(β), written against the orbit representative of β.

    α is the top wedge and β = g_1∧…∧g_{n-1}; the returned k×k block maps
    f(rep) to δf(α).
    """
    A = module.as_left()
    n = group.order
    if n < 2:
        raise DegreeRangeError("The top exterior coboundary needs a group of order at least 2")
    low = basis_module(BasisKind.EXT, group, n - 2)
    _, h, s = low.locate(tuple(range(1, n)))
    signed = IntMatrix.zero(A.rank, A.rank)
    for g in group.elements():
        signed = signed + A.action[g].scale(group.cayley_sign(g))
    return (signed @ A.action[h]).scale(s)
