"""Coefficient G-modules: presentations with an integral G-action."""
import hashlib
import json
import logging
from typing import Any, Dict, List, Mapping, Sequence

from ghl.errors import StructuralError, UsageError, WellDefinednessError
from ghl.exactlinalg import (
    FpAbGroup,
    FpHom,
    IntMatrix,
    Lattice,
    Subquotient,
    Vector,
    preimage_lattice,
)
from ghl.groups import CosetSystem, FiniteGroup

logger = logging.getLogger(__name__)

SIDES = ("left", "right", "both")


class GModule:
    """Abelian group Z^free_rank ⊕ ⊕Z/torsion with one action matrix per element.

    Right modules satisfy action(g)·action(h) = action(hg), left modules
    action(g)·action(h) = action(gh), both modulo relations. ``both`` is
    reserved for modules where the two agree, such as trivial ones.
    """

    def __init__(
        self,
        group: FiniteGroup,
        free_rank: int,
        torsion: Sequence[int],
        action: Sequence[IntMatrix],
        side: str = "right",
        name: str = "module",
        check: bool = True,
    ):
        if side not in SIDES:
            raise UsageError(f"Module side must be one of {SIDES}, got '{side}'")
        if any(int(d) < 2 for d in torsion):
            raise UsageError(f"Torsion orders must be at least 2, got {list(torsion)}")
        self.group = group
        self.free_rank = int(free_rank)
        self.torsion = tuple(int(d) for d in torsion)
        self.side = side
        self.name = name
        k = self.free_rank + len(self.torsion)
        relations = Lattice.from_generators(k, [{self.free_rank + i: d} for i, d in enumerate(self.torsion)])
        self.underlying = FpAbGroup(k, relations)
        self.action = tuple(action)
        if len(self.action) != group.order:
            raise UsageError(f"Expected {group.order} action matrices, got {len(self.action)}")
        for g, a in enumerate(self.action):
            if a.shape != (k, k):
                raise UsageError(f"Action of {group.label(g)} has shape {a.shape}, expected {(k, k)}")
        if check:
            self.validate_action()

    @property
    def rank(self) -> int:
        """Number of generators of the underlying group."""
        return self.underlying.generators

    @property
    def relations(self) -> Lattice:
        return self.underlying.relations

    def exponent(self) -> int:
        """Least m killing the module, 0 when it has a free part."""
        if self.free_rank:
            return 0
        return self.underlying.exponent()

    def validate_action(self) -> None:
        rel = self.relations
        k = self.rank
        for g, a in enumerate(self.action):
            try:
                FpHom(self.underlying, self.underlying, a)
            except WellDefinednessError as e:
                raise WellDefinednessError(
                    f"Action of {self.group.label(g)} does not preserve the relations", witness=e.witness
                )
        ident = IntMatrix.identity(k)
        if not _congruent(self.action[0], ident, rel):
            raise StructuralError("Identity element does not act trivially", witness={"element": 0})
        t = self.group.table
        for g in self.group.elements():
            for h in self.group.elements():
                product = self.action[g] @ self.action[h]
                expected = self.action[t[h][g]] if self.side == "right" else self.action[t[g][h]]
                if not _congruent(product, expected, rel):
                    raise StructuralError(
                        f"Action is not compatible with the table on ({self.group.label(g)}, {self.group.label(h)})",
                        witness={"pair": [g, h], "side": self.side},
                    )

    def act(self, g: int, vec: Mapping[int, int]) -> Vector:
        return self.action[g].apply(vec)

    def side_convert(self) -> "GModule":
        """Flip sides through action'(g) = action(g⁻¹)."""
        if self.side == "both":
            return self
        flipped = "left" if self.side == "right" else "right"
        action = [self.action[self.group.inv(g)] for g in self.group.elements()]
        return GModule(self.group, self.free_rank, self.torsion, action, flipped, name=self.name, check=False)

    def as_left(self) -> "GModule":
        return self.side_convert() if self.side == "right" else self

    def as_right(self) -> "GModule":
        return self.side_convert() if self.side == "left" else self

    def restrict(self, cosets: CosetSystem) -> "GModule":
        """The same module viewed over the subgroup of ``cosets``."""
        action = [self.action[g] for g in cosets.embedding]
        return GModule(cosets.sub_group, self.free_rank, self.torsion, action, self.side, name=self.name, check=False)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "side": self.side,
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "action": {self.group.label(g): a.to_payload()["triplets"] for g, a in enumerate(self.action)},
        }

    def hash(self) -> str:
        m = hashlib.sha256()
        m.update(json.dumps(self.to_payload(), sort_keys=True).encode())
        return m.hexdigest()

    def __repr__(self) -> str:
        return f"GModule({self.name}, side={self.side}, underlying={self.underlying.describe()})"


def _congruent(a: IntMatrix, b: IntMatrix, rel: Lattice) -> bool:
    diff = a - b
    return all(rel.contains(diff.column(j)) for j in range(diff.cols))


class GroupRingElement:
    """Integer combination of group elements."""

    def __init__(self, group: FiniteGroup, coefficients: Sequence[int]):
        if len(coefficients) != group.order:
            raise UsageError(f"Expected {group.order} coefficients, got {len(coefficients)}")
        self.group = group
        self.coefficients = tuple(int(c) for c in coefficients)

    @classmethod
    def norm(cls, group: FiniteGroup) -> "GroupRingElement":
        return cls(group, [1] * group.order)

    @classmethod
    def signed_sum(cls, group: FiniteGroup) -> "GroupRingElement":
        """Σ sign(g)·g for the Cayley sign character."""
        return cls(group, list(group.sign_character))

    @classmethod
    def basis_difference(cls, group: FiniteGroup, g: int) -> "GroupRingElement":
        """g − e, a generator of the augmentation ideal."""
        coeffs = [0] * group.order
        coeffs[g] += 1
        coeffs[0] -= 1
        return cls(group, coeffs)

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        return GroupRingElement(self.group, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        out = [0] * self.group.order
        for g, a in enumerate(self.coefficients):
            if not a:
                continue
            for h, b in enumerate(other.coefficients):
                if b:
                    out[self.group.mul(g, h)] += a * b
        return GroupRingElement(self.group, out)

    def augmentation(self) -> int:
        return sum(self.coefficients)

    def matrix(self, module: GModule) -> IntMatrix:
        """Σ c_g·action(g) on the module's generators."""
        out = IntMatrix.zero(module.rank, module.rank)
        for g, c in enumerate(self.coefficients):
            if c:
                out = out + module.action[g].scale(c)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group is other.group and self.coefficients == other.coefficients

    def __repr__(self) -> str:
        terms = [f"{c}·{self.group.label(g)}" for g, c in enumerate(self.coefficients) if c]
        return " + ".join(terms) if terms else "0"


def _permutation_action(group: FiniteGroup, side: str) -> List[IntMatrix]:
    n = group.order
    t = group.table
    if side == "right":
        return [IntMatrix(n, n, [{t[h][g]: 1} for h in range(n)]) for g in range(n)]
    return [IntMatrix(n, n, [{t[g][h]: 1} for h in range(n)]) for g in range(n)]


def trivial_module(group: FiniteGroup, base: Any = None) -> GModule:
    """``base`` is an FpAbGroup, a list of invariant factors, or None for Z."""
    if base is None:
        factors: Sequence[int] = (0,)
    elif isinstance(base, FpAbGroup):
        factors = base.invariant_factors
    else:
        factors = tuple(base)
    free_rank = sum(1 for d in factors if d == 0)
    torsion = [d for d in factors if d > 1]
    k = free_rank + len(torsion)
    action = [IntMatrix.identity(k)] * group.order
    name = "Z" if list(factors) == [0] else "+".join("Z" if d == 0 else f"Z/{d}" for d in factors) or "0"
    return GModule(group, free_rank, torsion, action, side="both", name=f"trivial:{name}", check=False)


def regular_module(group: FiniteGroup, side: str = "right") -> GModule:
    """Z[G] with G acting by multiplication on the given side."""
    if side not in ("left", "right"):
        raise UsageError(f"Regular module side must be left or right, got '{side}'")
    return GModule(group, group.order, (), _permutation_action(group, side), side=side, name="regular")


def augmentation_ideal(group: FiniteGroup, side: str = "right") -> GModule:
    """Δ(G) on the basis f_i = g_i − e, i ≥ 1; f_e stands for 0."""
    n = group.order
    t = group.table
    action = []
    for g in range(n):
        columns = []
        for i in range(1, n):
            target = t[i][g] if side == "right" else t[g][i]
            col: Vector = {}
            if target:
                col[target - 1] = col.get(target - 1, 0) + 1
            if g:
                col[g - 1] = col.get(g - 1, 0) - 1
            columns.append({r: v for r, v in col.items() if v})
        action.append(IntMatrix(n - 1, n - 1, columns))
    return GModule(group, n - 1, (), action, side=side, name="augideal")


def module_from_payload(group: FiniteGroup, payload: Mapping[str, Any]) -> GModule:
    free_rank = int(payload.get("free_rank", 0))
    torsion = [int(d) for d in payload.get("torsion", [])]
    k = free_rank + len(torsion)
    raw = payload.get("action", {})
    action = []
    for g in group.elements():
        label = group.label(g)
        if label in raw:
            action.append(IntMatrix.from_triplets(k, k, raw[label]))
        elif g == 0:
            action.append(IntMatrix.identity(k))
        else:
            raise UsageError(f"Module file has no action for element '{label}'")
    return GModule(group, free_rank, torsion, action, side=payload.get("side", "right"), name="file")


def invariants_data(module: GModule) -> Subquotient:
    """A^G as a subquotient of the generator space."""
    k = module.rank
    g_count = module.group.order
    rel = module.relations
    ident = IntMatrix.identity(k)
    stacked = IntMatrix.vstack(k, [module.action[g] - ident for g in range(1, g_count)])
    target = Lattice.direct_sum([rel] * (g_count - 1))
    modulus = module.exponent()
    numerator = preimage_lattice(stacked, target, modulus=modulus) if g_count > 1 else Lattice.full(k)
    return Subquotient(k, numerator, rel, modulus=modulus)


def invariants(module: GModule) -> FpAbGroup:
    return invariants_data(module).group


def coinvariants(module: GModule) -> FpAbGroup:
    """A / span{a·g − a}."""
    k = module.rank
    ident = IntMatrix.identity(k)
    vectors = module.relations.vectors()
    for g in range(1, module.group.order):
        vectors.extend((module.action[g] - ident).columns())
    return FpAbGroup(k, Lattice.from_generators(k, vectors, modulus=module.exponent()))


def side_convert(module: GModule) -> GModule:
    return module.side_convert()


def twisted_coinvariants(module: GModule, character: Sequence[int]) -> Lattice:
    """Relations plus span{a·g − χ(g)·a}; used by top-degree exterior formulas."""
    k = module.rank
    vectors = module.relations.vectors()
    for g in range(1, module.group.order):
        vectors.extend((module.action[g] - IntMatrix.scalar(k, character[g])).columns())
    return Lattice.from_generators(k, vectors, modulus=module.exponent())


def annihilator_of(module: GModule, element: GroupRingElement) -> Lattice:
    """{a : element acting on a lies in the relations}."""
    return preimage_lattice(element.matrix(module), module.relations, modulus=module.exponent())
