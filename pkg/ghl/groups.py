"""Finite groups as multiplication tables, subgroups, cosets and orientation."""
import hashlib
import json
import logging
import random
from functools import cached_property
from itertools import product
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation
from sympy.combinatorics.named_groups import SymmetricGroup

from ghl.config import settings
from ghl.errors import GroupAxiomError, UsageError

logger = logging.getLogger(__name__)


class FiniteGroup:
    """Group on the indices 0..n-1 with identity 0 and table[i][j] = g_i g_j."""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        labels: Optional[Sequence[str]] = None,
        name: str = "group",
        check: bool = True,
    ):
        self.table: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(x) for x in row) for row in table)
        n = len(self.table)
        self.labels: Tuple[str, ...] = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        self.name = name
        if len(self.labels) != n:
            raise GroupAxiomError(f"Expected {n} labels, got {len(self.labels)}")
        if check:
            self._validate()
        self.inverse: Tuple[int, ...] = tuple(row.index(0) for row in self.table)

    def _validate(self) -> None:
        n = len(self.table)
        if n == 0:
            raise GroupAxiomError("A group needs at least one element")
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise GroupAxiomError(f"Table is not square: row {i} has {len(row)} entries", witness=[i])
            for j, x in enumerate(row):
                if not 0 <= x < n:
                    raise GroupAxiomError(f"Entry ({i}, {j}) = {x} is not an element index", witness=[i, j])
        for j in range(n):
            if self.table[0][j] != j or self.table[j][0] != j:
                raise GroupAxiomError(f"Index 0 is not the identity (fails on element {j})", witness=[0, j])
        for i, row in enumerate(self.table):
            if 0 not in row:
                raise GroupAxiomError(f"Element {i} has no right inverse", witness=[i])
            inv = row.index(0)
            if self.table[inv][i] != 0:
                raise GroupAxiomError(f"Element {i} has no two-sided inverse", witness=[i, inv])
        t = self.table
        if n <= settings.ghl_associativity_check_limit:
            triples: Iterable[Tuple[int, int, int]] = product(range(n), repeat=3)
        else:
            rng = random.Random(0)
            count = settings.ghl_associativity_samples
            logger.warning(f"Order {n} exceeds the exhaustive limit; sampling {count} triples for associativity")
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(count))
        for a, b, c in triples:
            if t[a][t[b][c]] != t[t[a][b]][c]:
                raise GroupAxiomError(f"Table is not associative on ({a}, {b}, {c})", witness=[a, b, c])

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, elements: Iterable[int]) -> int:
        out = 0
        for g in elements:
            out = self.table[out][g]
        return out

    def element_order(self, a: int) -> int:
        x, k = a, 1
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def label(self, a: int) -> str:
        return self.labels[a]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UsageError(f"Unknown element label '{label}' in {self.name}")

    # Orientation

    @cached_property
    def sign_character(self) -> Tuple[int, ...]:
        """Sign of left multiplication h -> gh as a permutation of the elements."""
        return tuple(Permutation(list(row)).signature() for row in self.table)

    def cayley_sign(self, g: int) -> int:
        return self.sign_character[g]

    def is_oriented(self) -> bool:
        return all(s == 1 for s in self.sign_character)

    # Relabeling and serialization

    def relabel(self, perm: Sequence[int]) -> "FiniteGroup":
        """Isomorphic copy where old element i gets index perm[i]; perm[0] must be 0."""
        n = self.order
        if sorted(perm) != list(range(n)) or perm[0] != 0:
            raise UsageError("Relabeling must be a permutation fixing the identity")
        table = [[0] * n for _ in range(n)]
        labels = [""] * n
        for i in range(n):
            labels[perm[i]] = self.labels[i]
            for j in range(n):
                table[perm[i]][perm[j]] = perm[self.table[i][j]]
        return FiniteGroup(table, labels, name=f"{self.name}'", check=False)

    def hash(self) -> str:
        m = hashlib.sha256()
        m.update(json.dumps(self.table).encode())
        return m.hexdigest()

    def to_payload(self) -> Dict[str, Any]:
        return {"order": self.order, "table": [list(r) for r in self.table], "labels": list(self.labels)}

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any], name: str = "group") -> "FiniteGroup":
        table = payload["table"]
        if "order" in payload and int(payload["order"]) != len(table):
            raise GroupAxiomError(f"Declared order {payload['order']} does not match table size {len(table)}")
        return cls(table, payload.get("labels"), name=name)

    # Subgroups

    def subgroup_witness(self, elements: Iterable[int]) -> Optional[Tuple[int, ...]]:
        """A pair (a, b) with a·b⁻¹ outside the set, or (a,) for a bad index; None for subgroups."""
        h = set(elements)
        for a in h:
            if not 0 <= a < self.order:
                return (a,)
        if 0 not in h:
            return (0,)
        for a in h:
            for b in h:
                if self.table[a][self.inverse[b]] not in h:
                    return (a, b)
        return None

    def generated_subgroup(self, generators: Iterable[int]) -> frozenset:
        out = {0}
        frontier = [0]
        gens = list(generators)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in out:
                    out.add(y)
                    frontier.append(y)
        return frozenset(out)

    def subgroup(self, elements: Iterable[int]) -> Tuple["FiniteGroup", Tuple[int, ...]]:
        """The subgroup as a group of its own, plus its embedding (sorted, identity first)."""
        elems = sorted(set(elements))
        witness = self.subgroup_witness(elems)
        if witness is not None:
            raise GroupAxiomError(f"Element set is not a subgroup of {self.name}", witness=list(witness))
        position = {g: k for k, g in enumerate(elems)}
        table = [[position[self.table[a][b]] for b in elems] for a in elems]
        labels = [self.labels[g] for g in elems]
        return FiniteGroup(table, labels, name=f"subgroup of {self.name}", check=False), tuple(elems)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


class CosetSystem:
    """Left cosets cH with canonical representatives; bar(g) is the rep of gH."""

    def __init__(self, group: FiniteGroup, subgroup: Iterable[int]):
        elems = frozenset(subgroup)
        witness = group.subgroup_witness(elems)
        if witness is not None:
            raise GroupAxiomError(f"Element set is not a subgroup of {group.name}", witness=list(witness))
        bar = [-1] * group.order
        reps: List[int] = []
        for g in group.elements():
            if bar[g] >= 0:
                continue
            reps.append(g)
            for h in elems:
                bar[group.mul(g, h)] = g
        self.group = group
        self.subgroup = elems
        self.reps: Tuple[int, ...] = tuple(reps)
        self.bar: Tuple[int, ...] = tuple(bar)
        self.sub_group, self.embedding = group.subgroup(elems)
        self._sub_index = {g: k for k, g in enumerate(self.embedding)}

    @property
    def index(self) -> int:
        return len(self.reps)

    def in_subgroup(self, g: int) -> bool:
        return g in self.subgroup

    def to_sub(self, g: int) -> int:
        """Index of g inside the subgroup's own numbering."""
        return self._sub_index[g]

    def reindexed(self, reps: Sequence[int]) -> "CosetSystem":
        """Same cosets with a different choice of representatives."""
        other = CosetSystem.__new__(CosetSystem)
        other.group = self.group
        other.subgroup = self.subgroup
        other.sub_group, other.embedding, other._sub_index = self.sub_group, self.embedding, self._sub_index
        chosen = {self.bar[r]: r for r in reps}
        if sorted(chosen) != sorted(self.reps) or len(reps) != len(self.reps):
            raise UsageError("Representatives must pick one element of every coset")
        other.reps = tuple(chosen[c] for c in self.reps)
        other.bar = tuple(chosen[self.bar[g]] for g in self.group.elements())
        return other


def coset_system(group: FiniteGroup, subgroup: Iterable[int]) -> CosetSystem:
    return CosetSystem(group, subgroup)


# Constructors


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise UsageError(f"Cyclic group order must be positive, got {n}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    labels = ["1", "t"] + [f"t^{k}" for k in range(2, n)]
    return FiniteGroup(table, labels[:n], name=f"cyclic:{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon: r^a s^e has index a + n·e."""
    if n < 1:
        raise UsageError(f"Dihedral parameter must be positive, got {n}")

    def mult(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
        a, e = x
        b, f = y
        return ((a + (b if e == 0 else -b)) % n, (e + f) % 2)

    elements = [(a, e) for e in range(2) for a in range(n)]
    labels = [("1" if a == 0 else f"r^{a}") if e == 0 else ("s" if a == 0 else f"r^{a}s") for a, e in elements]
    return from_func(elements, mult, labels, name=f"dihedral:{n}")


def symmetric(n: int) -> FiniteGroup:
    if n < 1:
        raise UsageError(f"Symmetric group degree must be positive, got {n}")
    perms = sorted(SymmetricGroup(n).generate(), key=lambda p: p.array_form)
    labels = [str(p.cyclic_form) if p.cyclic_form else "()" for p in perms]
    # g_i g_j means apply g_j first, which sympy writes g_j * g_i
    return from_func(perms, lambda a, b: b * a, labels, name=f"sym:{n}")


def klein4() -> FiniteGroup:
    table = [[i ^ j for j in range(4)] for i in range(4)]
    return FiniteGroup(table, ["e", "a", "b", "ab"], name="klein4")


def quaternion8() -> FiniteGroup:
    units = [(1, 0, 0, 0), (-1, 0, 0, 0), (0, 1, 0, 0), (0, -1, 0, 0),
             (0, 0, 1, 0), (0, 0, -1, 0), (0, 0, 0, 1), (0, 0, 0, -1)]

    def mult(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
        a1, b1, c1, d1 = p
        a2, b2, c2, d2 = q
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return from_func(units, mult, labels, name="q8")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Pairs (x, y) with index x·|b| + y."""
    nb = b.order
    table = [
        [a.table[i // nb][j // nb] * nb + b.table[i % nb][j % nb] for j in range(a.order * nb)]
        for i in range(a.order * nb)
    ]
    labels = [f"({a.labels[i // nb]},{b.labels[i % nb]})" for i in range(a.order * nb)]
    return FiniteGroup(table, labels, name=f"{a.name}x{b.name}", check=False)


def from_table(raw: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None) -> FiniteGroup:
    return FiniteGroup(raw, labels, name="table")


def from_func(elements: Sequence[Any], mult: Any, labels: Optional[Sequence[str]] = None, name: str = "group") -> FiniteGroup:
    position = {e: k for k, e in enumerate(elements)}
    table = [[position[mult(a, b)] for b in elements] for a in elements]
    return FiniteGroup(table, labels, name=name)


def make_group(kind: str, *args: Any) -> FiniteGroup:
    """Dispatch on a constructor name: cyclic, dihedral, symmetric, klein4, quaternion8, direct_product, from_table."""
    builders = {
        "cyclic": cyclic,
        "dihedral": dihedral,
        "symmetric": symmetric,
        "klein4": klein4,
        "quaternion8": quaternion8,
        "direct_product": direct_product,
        "from_table": from_table,
    }
    if kind not in builders:
        raise UsageError(f"Unknown group kind '{kind}'")
    return builders[kind](*args)


CATALOG_SPECS = ("cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5", "cyclic:6", "klein4", "sym:3", "dihedral:4")
