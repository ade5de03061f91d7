"""Resolutions, comparison maps and the complexes of presented groups built from them.

Three families of signed G-basis modules are modelled: the bar resolution
B_n (tags are (n+1)-tuples), the exterior complex Λ_n (strictly increasing
(n+1)-tuples, signs are sort parities) and the symmetric complex BS_n, held
either on the exterior tags with the degree-n boundary scaled by n+1 or
directly through the alternating sums μ_n.
"""
import logging
from contextlib import contextmanager
from contextvars import ContextVar
from enum import Enum
from functools import cached_property, lru_cache
from itertools import combinations, permutations, product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation

from ghl.coeffmod import GModule
from ghl.config import settings
from ghl.errors import BudgetExceededError, DegreeRangeError, StructuralError
from ghl.exactlinalg import (
    FpAbGroup,
    FpHom,
    IntMatrix,
    Lattice,
    Subquotient,
    Vector,
    image_lattice,
    preimage_lattice,
)
from ghl.groups import FiniteGroup

logger = logging.getLogger(__name__)

Tag = Tuple[int, ...]

_EXT_SIGN_MUTATION: ContextVar[bool] = ContextVar("ghl_ext_sign_mutation", default=False)


@contextmanager
def ext_sign_mutation(enabled: bool = True) -> Iterator[None]:
    """Flip the sign of the last face of every exterior boundary (mutation testing)."""
    token = _EXT_SIGN_MUTATION.set(enabled)
    try:
        yield
    finally:
        _EXT_SIGN_MUTATION.reset(token)


class BasisKind(str, Enum):
    BAR = "bar"
    EXT = "ext"
    BS = "bs"
    BS_DIRECT = "bs-direct"


def sort_with_sign(values: Sequence[int]) -> Tuple[Tag, int]:
    """Sorted tuple and the parity of the sorting permutation (0 on a repeat)."""
    if len(set(values)) != len(values):
        return tuple(sorted(values)), 0
    if len(values) < 2:
        return tuple(values), 1
    order = sorted(range(len(values)), key=values.__getitem__)
    return tuple(values[i] for i in order), Permutation(order).signature()


@lru_cache(maxsize=None)
def signed_permutations(size: int) -> Tuple[Tuple[Tag, int], ...]:
    if size < 2:
        return ((tuple(range(size)), 1),)
    return tuple((p, Permutation(list(p)).signature()) for p in permutations(range(size)))


def alternating_sum(tag: Sequence[int]) -> Dict[Tag, int]:
    """μ(tag) = Σ_π sgn(π)·π·tag as a combination of tuples."""
    out: Dict[Tag, int] = {}
    for perm, sign in signed_permutations(len(tag)):
        key = tuple(tag[i] for i in perm)
        value = out.get(key, 0) + sign
        if value:
            out[key] = value
        else:
            out.pop(key, None)
    return out


def _bar_faces(combo: Mapping[Tag, int]) -> Dict[Tag, int]:
    out: Dict[Tag, int] = {}
    for tup, c in combo.items():
        for j in range(len(tup)):
            face = tup[:j] + tup[j + 1:]
            value = out.get(face, 0) + (c if j % 2 == 0 else -c)
            if value:
                out[face] = value
            else:
                out.pop(face, None)
    return out


class SignedGBasisModule:
    """Free abelian group on tags with G permuting tags up to sign."""

    kind: BasisKind

    def __init__(self, group: FiniteGroup, degree: int):
        if degree < 0:
            raise DegreeRangeError(f"Degree must be nonnegative, got {degree}")
        self.group = group
        self.degree = degree

    # Full basis

    @cached_property
    def tags(self) -> List[Tag]:
        raise NotImplementedError

    @cached_property
    def _tag_positions(self) -> Dict[Tag, int]:
        return {t: k for k, t in enumerate(self.tags)}

    def tag_index(self, tag: Tag) -> int:
        return self._tag_positions[tag]

    # G-action and orbits

    def act(self, g: int, tag: Tag) -> Tuple[Tag, int]:
        raise NotImplementedError

    @cached_property
    def _orbits(self) -> Tuple[List[Tag], Dict[Tag, Tuple[int, int, int]], List[List[Tuple[int, int]]]]:
        reps: List[Tag] = []
        lookup: Dict[Tag, Tuple[int, int, int]] = {}
        stabilizers: List[List[Tuple[int, int]]] = []
        for tag in self.tags:
            if tag in lookup:
                continue
            idx = len(reps)
            reps.append(tag)
            stab = []
            for g in self.group.elements():
                image, sign = self.act(g, tag)
                if image == tag:
                    stab.append((g, sign))
                if image not in lookup:
                    lookup[image] = (idx, g, sign)
            stabilizers.append(stab)
        return reps, lookup, stabilizers

    def rep_count(self) -> int:
        return len(self._orbits[0])

    def rep(self, idx: int) -> Tag:
        return self._orbits[0][idx]

    def locate(self, tag: Tag) -> Tuple[int, int, int]:
        """(rep index, g, sign) with tag = sign·g·rep."""
        return self._orbits[1][tag]

    def stabilizer(self, idx: int) -> List[Tuple[int, int]]:
        """Pairs (g, s) with g·rep = s·rep."""
        return self._orbits[2][idx]

    # Boundary

    def boundary_terms(self, tag: Tag) -> List[Tuple[int, Tag]]:
        """∂(tag) as (coefficient, tag of degree-1) pairs with canonical tags."""
        raise NotImplementedError

    def lower(self) -> "SignedGBasisModule":
        return basis_module(self.kind, self.group, self.degree - 1)

    def boundary_matrix(self) -> IntMatrix:
        """Boundary on full tag bases (rows: degree-1 tags)."""
        if self.degree < 1:
            raise DegreeRangeError("The boundary is defined from degree 1 on")
        low = self.lower()
        columns = []
        for tag in self.tags:
            col: Vector = {}
            for coef, face in self.boundary_terms(tag):
                r = low.tag_index(face)
                col[r] = col.get(r, 0) + coef
            columns.append(col)
        return IntMatrix(len(low.tags), len(self.tags), columns)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.group.name}, degree={self.degree})"


class BarModule(SignedGBasisModule):
    """B_n = Z[G^{n+1}] with diagonal left action; reps are (e, x_1, ..., x_n)."""

    kind = BasisKind.BAR

    @cached_property
    def tags(self) -> List[Tag]:
        return list(product(self.group.elements(), repeat=self.degree + 1))

    def tag_index(self, tag: Tag) -> int:
        n = self.group.order
        out = 0
        for x in tag:
            out = out * n + x
        return out

    def act(self, g: int, tag: Tag) -> Tuple[Tag, int]:
        t = self.group.table[g]
        return tuple(t[x] for x in tag), 1

    def rep_count(self) -> int:
        return self.group.order ** self.degree

    def rep(self, idx: int) -> Tag:
        n = self.group.order
        digits = []
        for _ in range(self.degree):
            idx, r = divmod(idx, n)
            digits.append(r)
        return (0,) + tuple(reversed(digits))

    def rep_index(self, rest: Sequence[int]) -> int:
        n = self.group.order
        out = 0
        for x in rest:
            out = out * n + x
        return out

    def locate(self, tag: Tag) -> Tuple[int, int, int]:
        g = tag[0]
        t = self.group.table[self.group.inv(g)]
        return self.rep_index([t[x] for x in tag[1:]]), g, 1

    def stabilizer(self, idx: int) -> List[Tuple[int, int]]:
        return [(0, 1)]

    def boundary_terms(self, tag: Tag) -> List[Tuple[int, Tag]]:
        if len(tag) < 2:
            return []
        return [(1 if j % 2 == 0 else -1, tag[:j] + tag[j + 1:]) for j in range(len(tag))]


class ExteriorModule(SignedGBasisModule):
    """Λ_n on strictly increasing (n+1)-tuples in element-index order."""

    kind = BasisKind.EXT

    @cached_property
    def tags(self) -> List[Tag]:
        return list(combinations(self.group.elements(), self.degree + 1))

    def act(self, g: int, tag: Tag) -> Tuple[Tag, int]:
        t = self.group.table[g]
        return sort_with_sign([t[x] for x in tag])

    def _face_sign(self, j: int, last: int) -> int:
        sign = 1 if j % 2 == 0 else -1
        if j == last and _EXT_SIGN_MUTATION.get():
            sign = -sign
        return sign

    def boundary_terms(self, tag: Tag) -> List[Tuple[int, Tag]]:
        if len(tag) < 2:
            return []
        last = len(tag) - 1
        return [(self._face_sign(j, last), tag[:j] + tag[j + 1:]) for j in range(len(tag))]


class SymmetricModule(ExteriorModule):
    """BS_n transported to the exterior tags through ν; ∂ is (n+1) times the exterior one."""

    kind = BasisKind.BS

    def boundary_terms(self, tag: Tag) -> List[Tuple[int, Tag]]:
        scale = self.degree + 1
        return [(scale * c, face) for c, face in super().boundary_terms(tag)]


class SymmetricDirectModule(ExteriorModule):
    """BS_n on the generators μ_n(tag), boundary read off the bar complex."""

    kind = BasisKind.BS_DIRECT

    def boundary_terms(self, tag: Tag) -> List[Tuple[int, Tag]]:
        if len(tag) < 2:
            return []
        image = _bar_faces(alternating_sum(tag))
        terms = [(c, t) for t, c in sorted(image.items()) if all(a < b for a, b in zip(t, t[1:]))]
        rebuilt: Dict[Tag, int] = {}
        for c, t in terms:
            for key, v in alternating_sum(t).items():
                value = rebuilt.get(key, 0) + c * v
                if value:
                    rebuilt[key] = value
                else:
                    rebuilt.pop(key, None)
        if rebuilt != image:
            raise StructuralError("Bar boundary of an alternating sum is not a sum of alternating sums", witness=list(tag))
        return terms


_KIND_CLASSES = {
    BasisKind.BAR: BarModule,
    BasisKind.EXT: ExteriorModule,
    BasisKind.BS: SymmetricModule,
    BasisKind.BS_DIRECT: SymmetricDirectModule,
}


@lru_cache(maxsize=256)
def basis_module(kind: BasisKind, group: FiniteGroup, degree: int) -> SignedGBasisModule:
    return _KIND_CLASSES[BasisKind(kind)](group, degree)


def _check_wedge_degree(group: FiniteGroup, n: int, low: int = 1) -> None:
    if not low <= n <= group.order - 1:
        raise DegreeRangeError(
            f"Degree {n} outside {low}..{group.order - 1} for a group of order {group.order}",
            witness={"degree": n, "order": group.order},
        )


def bar_boundary(group: FiniteGroup, n: int) -> IntMatrix:
    if n < 1:
        raise DegreeRangeError(f"Bar boundary needs n >= 1, got {n}")
    return basis_module(BasisKind.BAR, group, n).boundary_matrix()


def ext_boundary(group: FiniteGroup, n: int) -> IntMatrix:
    _check_wedge_degree(group, n)
    return basis_module(BasisKind.EXT, group, n).boundary_matrix()


def bs_boundary(group: FiniteGroup, n: int, direct: bool = False) -> IntMatrix:
    _check_wedge_degree(group, n)
    kind = BasisKind.BS_DIRECT if direct else BasisKind.BS
    return basis_module(kind, group, n).boundary_matrix()


def lambda_matrix(group: FiniteGroup, n: int) -> IntMatrix:
    """λ_n: B_n -> Λ_n, zero on repeated entries, sort parity otherwise."""
    bar = basis_module(BasisKind.BAR, group, n)
    ext = basis_module(BasisKind.EXT, group, n)
    columns = []
    for tag in bar.tags:
        wedge, sign = sort_with_sign(tag)
        columns.append({ext.tag_index(wedge): sign} if sign else {})
    return IntMatrix(len(ext.tags), len(bar.tags), columns)


def nu_matrix(group: FiniteGroup, n: int) -> IntMatrix:
    """ν_n: Λ_n -> B_n, a wedge goes to its alternating sum."""
    bar = basis_module(BasisKind.BAR, group, n)
    ext = basis_module(BasisKind.EXT, group, n)
    columns = [{bar.tag_index(t): c for t, c in alternating_sum(tag).items()} for tag in ext.tags]
    return IntMatrix(len(bar.tags), len(ext.tags), columns)


def mu_matrix(group: FiniteGroup, n: int) -> IntMatrix:
    """μ_n: B_n -> B_n, the alternating sum over Σ_{n+1}."""
    bar = basis_module(BasisKind.BAR, group, n)
    columns = [{bar.tag_index(t): c for t, c in alternating_sum(tag).items()} for tag in bar.tags]
    return IntMatrix(len(bar.tags), len(bar.tags), columns)


def comparison_maps(group: FiniteGroup, n: int) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """(λ_n, ν_n, μ_n) on full tag bases."""
    _check_wedge_degree(group, n, low=0)
    return lambda_matrix(group, n), nu_matrix(group, n), mu_matrix(group, n)


def top_boundary_closed_form(group: FiniteGroup) -> Vector:
    """(Σ sign(g)·g)·β on the exterior tags one below the top, β = g_1∧…∧g_{n-1}."""
    n = group.order
    if n < 2:
        raise DegreeRangeError("The top exterior boundary needs a group of order at least 2")
    low = basis_module(BasisKind.EXT, group, n - 2)
    beta = tuple(range(1, n))
    out: Vector = {}
    for g in group.elements():
        tag, s = low.act(g, beta)
        r = low.tag_index(tag)
        value = out.get(r, 0) + group.cayley_sign(g) * s
        if value:
            out[r] = value
        else:
            out.pop(r, None)
    return out


# Complexes of presented groups


class ComplexOfFp:
    """Bounded chain or cochain complex of presented groups.

    ``differentials[n]`` leaves degree n: towards n-1 for chains, n+1 for
    cochains. Degrees outside ``degrees`` carry the zero group.
    """

    def __init__(
        self,
        kind: str,
        degrees: range,
        groups: Mapping[int, FpAbGroup],
        differentials: Mapping[int, IntMatrix],
        modulus: int = 0,
        name: str = "complex",
        check: bool = True,
    ):
        if kind not in ("chain", "cochain"):
            raise ValueError(f"Complex kind must be chain or cochain, got '{kind}'")
        self.kind = kind
        self.degrees = degrees
        self.groups = dict(groups)
        self.differentials = dict(differentials)
        self.modulus = modulus
        self.name = name
        self._homology: Dict[int, Subquotient] = {}
        for n in degrees:
            if n not in self.groups:
                raise ValueError(f"Complex {name} has no group in degree {n}")
        if check:
            self.check()

    def next_degree(self, n: int) -> int:
        return n - 1 if self.kind == "chain" else n + 1

    def prev_degree(self, n: int) -> int:
        return n + 1 if self.kind == "chain" else n - 1

    def group(self, n: int) -> FpAbGroup:
        return self.groups.get(n) or FpAbGroup.trivial()

    def differential(self, n: int) -> IntMatrix:
        d = self.differentials.get(n)
        if d is not None:
            return d
        return IntMatrix.zero(self.group(self.next_degree(n)).generators, self.group(n).generators)

    def check(self) -> None:
        for n in self.degrees:
            nxt = self.next_degree(n)
            d = self.differential(n)
            if d.shape != (self.group(nxt).generators, self.group(n).generators):
                raise StructuralError(f"Differential out of degree {n} has shape {d.shape}", witness={"degree": n})
            if nxt in self.degrees:
                FpHom(self.group(n), self.group(nxt), d)
            nn = self.next_degree(nxt)
            if nxt in self.degrees and nn in self.degrees:
                dd = self.differential(nxt) @ d
                rel = self.group(nn).relations
                for j in range(dd.cols):
                    col = dd.column(j)
                    if not rel.contains(col):
                        raise StructuralError(
                            f"Differential squares to a nonzero map out of degree {n} in {self.name}",
                            witness={"degree": n, "generator": j, "image": col},
                        )

    def homology_data(self, n: int) -> Subquotient:
        """Cycles modulo boundaries in degree n as a subquotient of the generators."""
        if n in self._homology:
            return self._homology[n]
        gens = self.group(n).generators
        rel = self.group(n).relations
        nxt = self.next_degree(n)
        if nxt in self.degrees and self.group(nxt).generators:
            cycles = preimage_lattice(self.differential(n), self.group(nxt).relations, modulus=self.modulus)
        else:
            cycles = Lattice.full(gens)
        prev = self.prev_degree(n)
        if prev in self.degrees and self.group(prev).generators:
            boundaries = image_lattice(self.differential(prev), extra=rel, modulus=self.modulus)
        else:
            boundaries = rel
        data = Subquotient(gens, cycles, boundaries, modulus=self.modulus)
        self._homology[n] = data
        logger.debug(f"{self.name}: degree {n} -> {data.group.describe()}")
        return data

    def to_payload(self) -> List[Dict[str, object]]:
        return [
            {
                "degree": n,
                "group": list(self.group(n).invariant_factors),
                "boundary": self.differential(n).to_payload()["triplets"],
            }
            for n in self.degrees
        ]

    def __repr__(self) -> str:
        return f"ComplexOfFp({self.name}, {self.kind}, degrees={self.degrees.start}..{self.degrees.stop - 1})"


class ChainMap:
    """Degree-wise matrices between two complexes of the same kind."""

    def __init__(self, source: ComplexOfFp, target: ComplexOfFp, maps: Mapping[int, IntMatrix], check: bool = True):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if check:
            self.check()

    def at(self, n: int) -> IntMatrix:
        m = self.maps.get(n)
        if m is not None:
            return m
        return IntMatrix.zero(self.target.group(n).generators, self.source.group(n).generators)

    def check(self) -> None:
        for n in self.source.degrees:
            if n not in self.target.degrees:
                continue
            f = self.at(n)
            FpHom(self.source.group(n), self.target.group(n), f)
            nxt = self.source.next_degree(n)
            if nxt not in self.source.degrees or nxt not in self.target.degrees:
                continue
            diff = self.target.differential(n) @ f - self.at(nxt) @ self.source.differential(n)
            rel = self.target.group(nxt).relations
            for j in range(diff.cols):
                if not rel.contains(diff.column(j)):
                    raise StructuralError(
                        f"Map does not commute with differentials out of degree {n}",
                        witness={"degree": n, "generator": j},
                    )

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """self ∘ inner."""
        degrees = [n for n in inner.source.degrees if n in self.target.degrees]
        return ChainMap(inner.source, self.target, {n: self.at(n) @ inner.at(n) for n in degrees}, check=False)


class ShortExactSequence:
    """0 -> sub -> whole -> quotient -> 0, degree-wise."""

    def __init__(self, sub: ComplexOfFp, whole: ComplexOfFp, quotient: ComplexOfFp, inclusion: ChainMap, projection: ChainMap):
        self.sub = sub
        self.whole = whole
        self.quotient = quotient
        self.inclusion = inclusion
        self.projection = projection


def quotient_complex(sub: ComplexOfFp, whole: ComplexOfFp, inclusion: ChainMap) -> Tuple[ComplexOfFp, ShortExactSequence]:
    """whole / image(sub) on the same generators, plus the short exact sequence."""
    groups = {}
    for n in whole.degrees:
        g = whole.group(n)
        hom = FpHom(sub.group(n), g, inclusion.at(n))
        if not hom.is_injective():
            raise StructuralError(f"Inclusion is not injective in degree {n}", witness={"degree": n})
        groups[n] = FpAbGroup(g.generators, image_lattice(inclusion.at(n), extra=g.relations, modulus=whole.modulus))
    quotient = ComplexOfFp(
        whole.kind, whole.degrees, groups, whole.differentials, modulus=whole.modulus,
        name=f"{whole.name}/{sub.name}",
    )
    projection = ChainMap(
        whole, quotient, {n: IntMatrix.identity(whole.group(n).generators) for n in whole.degrees}, check=False
    )
    return quotient, ShortExactSequence(sub, whole, quotient, inclusion, projection)


def working_modulus(module: GModule) -> int:
    """Exponent of A when the torsion fast path is enabled, otherwise 0 (exact path)."""
    return module.exponent() if settings.ghl_modular else 0


def check_budget(what: str, generators: int, budget: Optional[int] = None) -> None:
    limit = settings.ghl_budget if budget is None else budget
    if generators > limit:
        raise BudgetExceededError(what, generators, limit)


class BlockBuilder:
    """Accumulates k×k blocks into a sparse matrix, column by column."""

    def __init__(self, row_blocks: int, col_blocks: int, k: int):
        self.k = k
        self.rows = row_blocks * k
        self.columns: List[Vector] = [{} for _ in range(col_blocks * k)]

    def add(self, row_block: int, col_block: int, block: IntMatrix, coef: int = 1) -> None:
        k = self.k
        for j in range(k):
            col = self.columns[col_block * k + j]
            for i, v in block.column(j).items():
                r = row_block * k + i
                value = col.get(r, 0) + coef * v
                if value:
                    col[r] = value
                else:
                    col.pop(r, None)

    def build(self) -> IntMatrix:
        return IntMatrix(self.rows, len(self.columns), self.columns)


def tensor_over_G(module: GModule, kind: BasisKind, degrees: range, budget: Optional[int] = None) -> ComplexOfFp:
    """A ⊗_G M_* with one copy of A per orbit representative."""
    A = module.as_right()
    G = A.group
    k = A.rank
    ident = IntMatrix.identity(k)
    groups: Dict[int, FpAbGroup] = {}
    diffs: Dict[int, IntMatrix] = {}
    modulus = working_modulus(A)
    for n in degrees:
        M = basis_module(kind, G, n)
        reps = M.rep_count()
        check_budget(f"{kind.value} chains in degree {n}", reps * k, budget)
        vectors: List[Vector] = []
        for r in range(reps):
            offset = r * k
            vectors.extend({offset + i: x for i, x in v.items()} for v in A.relations.vectors())
            for g, s in M.stabilizer(r):
                if g == 0 and s == 1:
                    continue
                rel = A.action[g] - ident.scale(s)
                vectors.extend({offset + i: x for i, x in col.items()} for col in rel.columns())
        groups[n] = FpAbGroup(reps * k, Lattice.from_generators(reps * k, vectors, modulus=modulus))
        if n - 1 in degrees and n >= 1:
            low = M.lower()
            builder = BlockBuilder(low.rep_count(), reps, k)
            for r in range(reps):
                for coef, face in M.boundary_terms(M.rep(r)):
                    r2, h, s = low.locate(face)
                    builder.add(r2, r, A.action[h], coef * s)
            diffs[n] = builder.build()
    logger.info(f"Built {kind.value} chain complex for {G.name} with {A.name} in degrees {degrees.start}..{degrees.stop - 1}")
    return ComplexOfFp("chain", degrees, groups, diffs, modulus=modulus, name=f"A⊗{kind.value}")


def tensor_map_over_G(
    source: ComplexOfFp,
    target: ComplexOfFp,
    module: GModule,
    kinds: Tuple[BasisKind, BasisKind],
    full_maps: Mapping[int, IntMatrix],
) -> ChainMap:
    """1_A ⊗_G f for G-equivariant f given on full tag bases.

    A column of f at rep r is pushed through locate: a target tag
    s·h·rep(r2) contributes s·action(h) to block (r2, r).
    """
    A = module.as_right()
    G = A.group
    k = A.rank
    maps: Dict[int, IntMatrix] = {}
    for n, full in full_maps.items():
        M = basis_module(kinds[0], G, n)
        N = basis_module(kinds[1], G, n)
        builder = BlockBuilder(N.rep_count(), M.rep_count(), k)
        for r in range(M.rep_count()):
            for t, c in full.column(M.tag_index(M.rep(r))).items():
                r2, h, s = N.locate(N.tags[t])
                builder.add(r2, r, A.action[h], c * s)
        maps[n] = builder.build()
    return ChainMap(source, target, maps)


def symmetric_to_exterior(module: GModule, degrees: range, budget: Optional[int] = None) -> ChainMap:
    """A ⊗_G BS_* -> A ⊗_G Λ_* induced by λ∘ν, which is (n+1)! on each wedge."""
    G = module.group
    degrees = range(degrees.start, min(degrees.stop, G.order))
    source = tensor_over_G(module, BasisKind.BS, degrees, budget)
    target = tensor_over_G(module, BasisKind.EXT, degrees, budget)
    full = {n: lambda_matrix(G, n) @ nu_matrix(G, n) for n in degrees}
    return tensor_map_over_G(source, target, module, (BasisKind.BS, BasisKind.EXT), full)


class AmbientCochains:
    """Block spaces A^{blocks_n} with coboundaries, before any sublattice is imposed."""

    def __init__(self, module: GModule, blocks: Mapping[int, int], coboundary: Mapping[int, IntMatrix], degrees: range, name: str):
        self.module = module
        self.group = module.group
        self.k = module.rank
        self.blocks = dict(blocks)
        self.coboundary = dict(coboundary)
        self.degrees = degrees
        self.name = name
        self.modulus = working_modulus(module)
        self._relations: Dict[int, Lattice] = {}

    def rank(self, n: int) -> int:
        return self.blocks[n] * self.k

    def relations(self, n: int) -> Lattice:
        if n not in self._relations:
            self._relations[n] = Lattice.direct_sum([self.module.relations] * self.blocks[n])
        return self._relations[n]

    def full(self) -> "LatticeComplex":
        return LatticeComplex(self, {n: Lattice.full(self.rank(n)) for n in self.degrees}, name=self.name)

    def block_constraints(self, n: int, constraints: Mapping[int, List[IntMatrix]]) -> Lattice:
        """Direct sum over blocks of {x : c·x ∈ R_A for every c listed for that block}."""
        parts = []
        rel = self.module.relations
        for b in range(self.blocks[n]):
            mats = constraints.get(b)
            if not mats:
                parts.append(Lattice.full(self.k))
                continue
            stacked = IntMatrix.vstack(self.k, mats)
            parts.append(preimage_lattice(stacked, Lattice.direct_sum([rel] * len(mats)), modulus=self.modulus))
        return Lattice.direct_sum(parts)


class LatticeComplex:
    """Cochain complex carved out of an ambient by one sublattice per degree.

    Generators in degree n are the basis vectors of the sublattice;
    relations are the ambient relations written in that basis.
    """

    def __init__(self, ambient: AmbientCochains, lattices: Mapping[int, Lattice], name: str):
        self.ambient = ambient
        self.lattices = dict(lattices)
        self.name = name
        modulus = ambient.modulus
        groups: Dict[int, FpAbGroup] = {}
        self._full = {n: self.lattices[n].is_full() for n in ambient.degrees}
        for n in ambient.degrees:
            lat = self.lattices[n]
            witness = lat.containment_witness(ambient.relations(n))
            if witness is not None:
                raise StructuralError(f"Sublattice of {name} misses ambient relations in degree {n}", witness=witness)
            if self._full[n]:
                groups[n] = FpAbGroup(lat.rank, ambient.relations(n))
            else:
                coords = [self.coordinates(n, v) for v in ambient.relations(n).vectors()]
                groups[n] = FpAbGroup(lat.rank, Lattice.from_generators(lat.rank, coords, modulus=modulus if lat.rank else 0))
        diffs: Dict[int, IntMatrix] = {}
        for n in ambient.degrees:
            if n + 1 not in ambient.degrees:
                continue
            delta = ambient.coboundary[n]
            columns = []
            for j, b in enumerate(self.lattices[n].vectors()):
                columns.append(self.coordinates(n + 1, delta.apply(b), what=f"coboundary of generator {j} from degree {n}"))
            diffs[n] = IntMatrix(self.lattices[n + 1].rank, self.lattices[n].rank, columns)
        self.complex = ComplexOfFp("cochain", ambient.degrees, groups, diffs, modulus=modulus, name=name)

    @property
    def degrees(self) -> range:
        return self.ambient.degrees

    def basis(self, n: int) -> IntMatrix:
        return self.lattices[n].basis

    def coordinates(self, n: int, vec: Mapping[int, int], what: str = "vector") -> Vector:
        if self._full.get(n):
            return {i: x for i, x in vec.items() if x}
        coords = self.lattices[n].coordinates(vec)
        if coords is None:
            raise StructuralError(f"{what} leaves {self.name} in degree {n}", witness=dict(vec))
        return {i: x for i, x in enumerate(coords) if x}

    def contains(self, n: int, vec: Mapping[int, int]) -> bool:
        return self.lattices[n].contains(vec)

    def map_from(self, other: "LatticeComplex", ambient_maps: Mapping[int, IntMatrix], check: bool = True) -> ChainMap:
        """Chain map other -> self induced by ambient matrices."""
        maps = {}
        for n in self.degrees:
            if n not in other.degrees:
                continue
            F = ambient_maps[n]
            cols = [self.coordinates(n, F.apply(b), what="mapped generator") for b in other.lattices[n].vectors()]
            maps[n] = IntMatrix(self.lattices[n].rank, other.lattices[n].rank, cols)
        return ChainMap(other.complex, self.complex, maps, check=check)

    def inclusion_into(self, whole: "LatticeComplex") -> ChainMap:
        ident = {n: IntMatrix.identity(self.ambient.rank(n)) for n in self.degrees}
        return whole.map_from(self, ident)

    def quotient_of(self, whole: "LatticeComplex") -> Tuple[ComplexOfFp, ShortExactSequence]:
        """whole / self as a complex, with the short exact sequence."""
        return quotient_complex(self.complex, whole.complex, self.inclusion_into(whole))


def hom_ambient(kind: BasisKind, module: GModule, degrees: range, budget: Optional[int] = None) -> Tuple[AmbientCochains, Dict[int, Lattice]]:
    """Hom_G(M_*, A) on orbit representatives, with the stabilizer sublattices."""
    A = module.as_left()
    G = A.group
    k = A.rank
    ident = IntMatrix.identity(k)
    blocks: Dict[int, int] = {}
    coboundary: Dict[int, IntMatrix] = {}
    for n in degrees:
        M = basis_module(kind, G, n)
        blocks[n] = M.rep_count()
        check_budget(f"{kind.value} cochains in degree {n}", blocks[n] * k, budget)
    for n in degrees:
        if n + 1 not in degrees:
            continue
        upper = basis_module(kind, G, n + 1)
        low = basis_module(kind, G, n)
        builder = BlockBuilder(blocks[n + 1], blocks[n], k)
        for r in range(blocks[n + 1]):
            for coef, face in upper.boundary_terms(upper.rep(r)):
                r2, h, s = low.locate(face)
                builder.add(r, r2, A.action[h], coef * s)
        coboundary[n] = builder.build()
    ambient = AmbientCochains(A, blocks, coboundary, degrees, name=f"Hom({kind.value},A)")
    lattices = {}
    for n in degrees:
        M = basis_module(kind, G, n)
        constraints: Dict[int, List[IntMatrix]] = {}
        if kind != BasisKind.BAR:
            for r in range(blocks[n]):
                mats = [A.action[g] - ident.scale(s) for g, s in M.stabilizer(r) if not (g == 0 and s == 1)]
                if mats:
                    constraints[r] = mats
        lattices[n] = ambient.block_constraints(n, constraints)
    return ambient, lattices


def hom_over_G_model(kind: BasisKind, module: GModule, degrees: range, budget: Optional[int] = None) -> LatticeComplex:
    ambient, lattices = hom_ambient(kind, module, degrees, budget)
    logger.info(f"Built Hom({kind.value}, A) for {ambient.group.name} in degrees {degrees.start}..{degrees.stop - 1}")
    return LatticeComplex(ambient, lattices, name=ambient.name)


def hom_over_G(kind: BasisKind, module: GModule, degrees: range, budget: Optional[int] = None) -> ComplexOfFp:
    """Hom_G(M_*, A): equivariant maps determined by their values on orbit representatives."""
    return hom_over_G_model(kind, module, degrees, budget).complex


def top_coboundary_block(kind: BasisKind, module: GModule) -> Dict[int, IntMatrix]:
    """Blocks of δ into the top exterior degree, keyed by source representative."""
    A = module.as_left()
    G = A.group
    n = G.order
    top = basis_module(kind, G, n - 1)
    low = basis_module(kind, G, n - 2)
    out: Dict[int, IntMatrix] = {}
    for coef, face in top.boundary_terms(top.rep(0)):
        r2, h, s = low.locate(face)
        block = A.action[h].scale(coef * s)
        out[r2] = out[r2] + block if r2 in out else block
    return out


def cyclic_periodic_complex(module: GModule, kind: str, top: int) -> ComplexOfFp:
    """2-periodic resolution of Z over Z[Z_m] with coefficients in A.

    The generator t of the cyclic group is element 1. Chains alternate
    t-1 and the norm; cochains start with t-1 out of degree 0.
    """
    G = module.group
    m = G.order
    A = module.as_right() if kind == "chain" else module.as_left()
    k = A.rank
    t = 1 % m
    step = A.action[t] - IntMatrix.identity(k)
    norm = IntMatrix.zero(k, k)
    for g in G.elements():
        norm = norm + A.action[g]
    degrees = range(0, top + 1)
    groups = {n: A.underlying for n in degrees}
    diffs: Dict[int, IntMatrix] = {}
    for n in degrees:
        if kind == "chain" and n >= 1:
            diffs[n] = step if n % 2 == 1 else norm
        elif kind == "cochain" and n + 1 in degrees:
            diffs[n] = step if n % 2 == 0 else norm
    return ComplexOfFp(kind, degrees, groups, diffs, modulus=working_modulus(A), name=f"periodic Z{m}")
