"""Exact integer linear algebra.

Sparse integer matrices, column Hermite and Smith normal forms, lattices in
Z^n, finitely presented abelian groups, subquotients, homomorphisms between
presented groups and the snake-lemma connecting homomorphism.

Vectors are plain ``dict`` objects mapping a row index to a nonzero Python
integer. Every value handed out by this module is immutable by convention:
callers receive copies of internal dictionaries.
"""
import logging
from functools import cached_property
from math import gcd
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ghl.errors import LatticeContainmentError, StructuralError, WellDefinednessError

logger = logging.getLogger(__name__)

DENSE_SNF_LIMIT = 64

Vector = Dict[int, int]


def _axpy(dst: Vector, coef: int, src: Mapping[int, int]) -> None:
    """dst += coef * src, in place, dropping zeros."""
    if not coef:
        return
    for i, v in src.items():
        w = dst.get(i, 0) + coef * v
        if w:
            dst[i] = w
        else:
            dst.pop(i, None)


def _combine(a: int, u: Mapping[int, int], b: int, v: Mapping[int, int]) -> Vector:
    out: Vector = {}
    if a:
        for i, x in u.items():
            out[i] = a * x
    _axpy(out, b, v)
    if not a:
        return out
    return {i: x for i, x in out.items() if x}


def _reduce_mod(v: Vector, modulus: int) -> Vector:
    if not modulus:
        return v
    return {i: x % modulus for i, x in v.items() if x % modulus}


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with g = a*x + b*y = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _lcm(a: int, b: int) -> int:
    if not a or not b:
        return 0
    return abs(a * b) // gcd(a, b)


class IntMatrix:
    """Immutable sparse integer matrix stored column by column."""

    __slots__ = ("rows", "cols", "_columns")

    def __init__(self, rows: int, cols: int, columns: Optional[Sequence[Mapping[int, int]]] = None):
        if rows < 0 or cols < 0:
            raise ValueError(f"Matrix shape must be nonnegative, got {rows}x{cols}")
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise ValueError(f"Expected {cols} columns, got {len(columns)}")
        stored = []
        for j, col in enumerate(columns):
            clean = {}
            for i, v in col.items():
                if not 0 <= i < rows:
                    raise IndexError(f"Row index {i} out of range in column {j}")
                if v:
                    clean[int(i)] = int(v)
            stored.append(clean)
        self.rows = rows
        self.cols = cols
        self._columns: Tuple[Vector, ...] = tuple(stored)

    # Constructors

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [{j: 1} for j in range(n)])

    @classmethod
    def scalar(cls, n: int, c: int) -> "IntMatrix":
        return cls(n, n, [{j: c} for j in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls(n, n, [{j: v} for j, v in enumerate(values)])

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        columns: List[Vector] = [{} for _ in range(cols)]
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError(f"Ragged row {i}: expected {cols} entries")
            for j, v in enumerate(row):
                if v:
                    columns[j][i] = int(v)
        return cls(rows, cols, columns)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, int]]) -> "IntMatrix":
        return cls(rows, len(columns), columns)

    @classmethod
    def from_triplets(cls, rows: int, cols: int, triplets: Iterable[Sequence[Any]]) -> "IntMatrix":
        columns: List[Vector] = [{} for _ in range(cols)]
        for i, j, v in triplets:
            i, j, v = int(i), int(j), int(v)
            if not 0 <= j < cols:
                raise IndexError(f"Column index {j} out of range")
            columns[j][i] = columns[j].get(i, 0) + v
        return cls(rows, cols, columns)

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "IntMatrix":
        return cls.from_triplets(int(payload["rows"]), int(payload["cols"]), payload["triplets"])

    @classmethod
    def hstack(cls, rows: int, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        columns: List[Mapping[int, int]] = []
        for block in blocks:
            if block.rows != rows:
                raise ValueError(f"hstack row mismatch: {block.rows} != {rows}")
            columns.extend(block._columns)
        return cls(rows, len(columns), columns)

    @classmethod
    def vstack(cls, cols: int, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        columns: List[Vector] = [{} for _ in range(cols)]
        offset = 0
        for block in blocks:
            if block.cols != cols:
                raise ValueError(f"vstack column mismatch: {block.cols} != {cols}")
            for j, col in enumerate(block._columns):
                for i, v in col.items():
                    columns[j][offset + i] = v
            offset += block.rows
        return cls(offset, cols, columns)

    @classmethod
    def block_diagonal(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        rows = sum(b.rows for b in blocks)
        columns: List[Vector] = []
        offset = 0
        for block in blocks:
            for col in block._columns:
                columns.append({offset + i: v for i, v in col.items()})
            offset += block.rows
        return cls(rows, len(columns), columns)

    # Access

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, key: Tuple[int, int]) -> int:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"Entry ({i}, {j}) out of range for {self.rows}x{self.cols}")
        return self._columns[j].get(i, 0)

    def column(self, j: int) -> Vector:
        return dict(self._columns[j])

    def columns(self) -> List[Vector]:
        return [dict(c) for c in self._columns]

    def nnz(self) -> int:
        return sum(len(c) for c in self._columns)

    def is_zero(self) -> bool:
        return not any(self._columns)

    def to_dense(self) -> List[List[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self._columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=object)
        for j, col in enumerate(self._columns):
            for i, v in col.items():
                out[i, j] = v
        return out

    @classmethod
    def from_numpy(cls, array: np.ndarray) -> "IntMatrix":
        return cls.from_dense([[int(x) for x in row] for row in array], cols=array.shape[1])

    def triplets(self) -> List[Tuple[int, int, int]]:
        out = [(i, j, v) for j, col in enumerate(self._columns) for i, v in col.items()]
        out.sort()
        return out

    def to_payload(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "triplets": [[i, j, str(v)] for i, j, v in self.triplets()],
        }

    # Arithmetic

    def apply(self, vec: Mapping[int, int]) -> Vector:
        """Matrix times sparse column vector."""
        out: Vector = {}
        for j, x in vec.items():
            if x:
                _axpy(out, x, self._columns[j])
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Shape mismatch: {self.shape} @ {other.shape}")
        return IntMatrix(self.rows, other.cols, [self.apply(c) for c in other._columns])

    def _entrywise(self, other: "IntMatrix", sign: int) -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch: {self.shape} vs {other.shape}")
        columns = []
        for a, b in zip(self._columns, other._columns):
            c = dict(a)
            _axpy(c, sign, b)
            columns.append(c)
        return IntMatrix(self.rows, self.cols, columns)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return self._entrywise(other, 1)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self._entrywise(other, -1)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [{i: c * v for i, v in col.items()} for col in self._columns])

    def transpose(self) -> "IntMatrix":
        columns: List[Vector] = [{} for _ in range(self.rows)]
        for j, col in enumerate(self._columns):
            for i, v in col.items():
                columns[i][j] = v
        return IntMatrix(self.cols, self.rows, columns)

    def select_columns(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self.rows, len(indices), [self._columns[j] for j in indices])

    def reduce_mod(self, modulus: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [_reduce_mod(dict(c), modulus) for c in self._columns])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._columns == other._columns

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(tuple(sorted(c.items())) for c in self._columns)))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            return f"IntMatrix({self.to_dense()})"
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


class _Echelon:
    """Incremental column echelon basis keyed by pivot row.

    The pivot of a vector is its smallest nonzero row. With ``modulus`` set,
    entries are kept reduced mod m; that is only valid for lattices that
    contain m*Z^n, so ``close_modulus`` must be called before reading the
    basis. With ``track`` set, every basis vector carries its combination of
    the inserted vectors.
    """

    def __init__(self, modulus: int = 0, track: bool = False):
        if modulus and track:
            raise ValueError("Transform tracking is only available on the exact path")
        self.modulus = modulus
        self.track = track
        self.pivots: Dict[int, Vector] = {}
        self.combos: Dict[int, Vector] = {}
        self.null_combos: List[Vector] = []

    def insert(self, vec: Mapping[int, int], combo: Optional[Mapping[int, int]] = None) -> None:
        m = self.modulus
        v = _reduce_mod(dict(vec), m) if m else {i: x for i, x in vec.items() if x}
        c = dict(combo) if self.track and combo is not None else {}
        pivots = self.pivots
        while v:
            p = min(v)
            b = pivots.get(p)
            if b is None:
                if v[p] < 0:
                    v = {i: -x for i, x in v.items()}
                    c = {i: -x for i, x in c.items()}
                pivots[p] = v
                if self.track:
                    self.combos[p] = c
                return
            bp, vp = b[p], v[p]
            if vp % bp == 0:
                q = vp // bp
                _axpy(v, -q, b)
                if self.track:
                    _axpy(c, -q, self.combos[p])
                if m:
                    v = _reduce_mod(v, m)
                continue
            g, x, y = _xgcd(bp, vp)
            new_b = _combine(x, b, y, v)
            new_v = _combine(bp // g, v, -(vp // g), b)
            if self.track:
                cb = self.combos[p]
                self.combos[p] = _combine(x, cb, y, c)
                c = _combine(bp // g, c, -(vp // g), cb)
            if m:
                new_b = _reduce_mod(new_b, m)
                new_v = _reduce_mod(new_v, m)
            pivots[p] = new_b
            v = new_v
        if self.track:
            self.null_combos.append(c)

    def close_modulus(self, ambient_rank: int) -> None:
        """Add m·e_i for every row, in ascending order."""
        m = self.modulus
        if not m:
            return
        for i in range(ambient_rank):
            b = self.pivots.get(i)
            if b is None:
                self.pivots[i] = {i: m}
                continue
            bp = b[i]
            if len(b) == 1 and m % bp == 0:
                continue
            g, x, _ = _xgcd(bp, m)
            new_b = _reduce_mod({r: x * v for r, v in b.items() if r != i}, m)
            new_b[i] = g
            self.pivots[i] = new_b
            # m/g·b - (bp/g)·m·e_i has nothing left in row i
            self.insert({r: -(m // g) * v for r, v in b.items() if r != i})

    def canonicalize(self) -> None:
        order = sorted(self.pivots)
        m = self.modulus
        for idx, p in enumerate(order):
            b = self.pivots[p]
            piv = b[p]
            for q in order[:idx]:
                other = self.pivots[q]
                e = other.get(p)
                if e is None:
                    continue
                f = e // piv
                if not f:
                    continue
                _axpy(other, -f, b)
                if self.track:
                    _axpy(self.combos[q], -f, self.combos[p])
                if m:
                    self.pivots[q] = _reduce_mod(other, m)

    def sorted_vectors(self) -> List[Vector]:
        return [self.pivots[p] for p in sorted(self.pivots)]


class Lattice:
    """Sublattice of Z^n held in canonical column Hermite normal form.

    Basis vectors are ordered by pivot row; each pivot entry is positive and
    every other basis vector has its entry in that row reduced into
    [0, pivot). Two lattices are equal iff their bases coincide.
    """

    __slots__ = ("ambient_rank", "_vectors", "_pivot_rows", "_index", "__weakref__")

    def __init__(self, ambient_rank: int, canonical_vectors: Sequence[Vector]):
        self.ambient_rank = ambient_rank
        self._vectors: Tuple[Vector, ...] = tuple(canonical_vectors)
        self._pivot_rows: Tuple[int, ...] = tuple(min(v) for v in self._vectors)
        self._index = {p: k for k, p in enumerate(self._pivot_rows)}

    @classmethod
    def from_generators(cls, ambient_rank: int, vectors: Iterable[Mapping[int, int]], modulus: int = 0) -> "Lattice":
        """Lattice spanned by ``vectors`` (plus m*Z^n when a modulus is given)."""
        ech = _Echelon(modulus=modulus)
        for v in vectors:
            ech.insert(v)
        ech.close_modulus(ambient_rank)
        ech.canonicalize()
        return cls(ambient_rank, ech.sorted_vectors())

    @classmethod
    def from_matrix(cls, m: IntMatrix, modulus: int = 0) -> "Lattice":
        return cls.from_generators(m.rows, m.columns(), modulus=modulus)

    @classmethod
    def zero(cls, ambient_rank: int) -> "Lattice":
        return cls(ambient_rank, [])

    @classmethod
    def full(cls, ambient_rank: int) -> "Lattice":
        return cls(ambient_rank, [{i: 1} for i in range(ambient_rank)])

    @classmethod
    def scaled_full(cls, ambient_rank: int, m: int) -> "Lattice":
        if m == 0:
            return cls.zero(ambient_rank)
        return cls(ambient_rank, [{i: abs(m)} for i in range(ambient_rank)])

    @classmethod
    def direct_sum(cls, parts: Sequence["Lattice"]) -> "Lattice":
        vectors: List[Vector] = []
        offset = 0
        for part in parts:
            vectors.extend({offset + i: x for i, x in v.items()} for v in part._vectors)
            offset += part.ambient_rank
        # concatenated canonical blocks are canonical: blocks do not share rows
        return cls(offset, vectors)

    @property
    def rank(self) -> int:
        return len(self._vectors)

    @property
    def pivot_rows(self) -> Tuple[int, ...]:
        return self._pivot_rows

    def vectors(self) -> List[Vector]:
        return [dict(v) for v in self._vectors]

    @property
    def basis(self) -> IntMatrix:
        return IntMatrix(self.ambient_rank, self.rank, self._vectors)

    def is_full(self) -> bool:
        return self.rank == self.ambient_rank and all(v[p] == 1 for v, p in zip(self._vectors, self._pivot_rows))

    def coordinates(self, vec: Mapping[int, int]) -> Optional[List[int]]:
        """Coefficients of ``vec`` in the basis, or None if it is not a member."""
        v = {i: x for i, x in vec.items() if x}
        coords = [0] * self.rank
        while v:
            p = min(v)
            k = self._index.get(p)
            if k is None:
                return None
            b = self._vectors[k]
            q, r = divmod(v[p], b[p])
            if r:
                return None
            coords[k] = q
            _axpy(v, -q, b)
        return coords

    def contains(self, vec: Mapping[int, int]) -> bool:
        return self.coordinates(vec) is not None

    def __contains__(self, vec: Mapping[int, int]) -> bool:
        return self.contains(vec)

    def containment_witness(self, other: "Lattice") -> Optional[Vector]:
        """First basis vector of ``other`` outside this lattice, if any."""
        for v in other._vectors:
            if not self.contains(v):
                return dict(v)
        return None

    def contains_lattice(self, other: "Lattice") -> bool:
        return self.containment_witness(other) is None

    def __add__(self, other: "Lattice") -> "Lattice":
        if self.ambient_rank != other.ambient_rank:
            raise ValueError("Lattices live in different ambients")
        return Lattice.from_generators(self.ambient_rank, list(self._vectors) + list(other._vectors))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.ambient_rank == other.ambient_rank and self._vectors == other._vectors

    def __hash__(self) -> int:
        return hash((self.ambient_rank, tuple(tuple(sorted(v.items())) for v in self._vectors)))

    def __repr__(self) -> str:
        return f"Lattice(ambient={self.ambient_rank}, rank={self.rank})"


def image_lattice(m: IntMatrix, extra: Optional[Lattice] = None, modulus: int = 0) -> Lattice:
    """Column span of ``m``, optionally plus another lattice."""
    vectors = m.columns()
    if extra is not None:
        vectors.extend(extra.vectors())
    return Lattice.from_generators(m.rows, vectors, modulus=modulus)


def preimage_lattice(m: IntMatrix, target: Lattice, modulus: int = 0) -> Lattice:
    """All integer v with m·v in ``target``.

    Stacks [m; I] next to [T; 0] and keeps the echelon vectors whose pivot
    falls in the lower block. The modular path needs target ⊇ m·Z^rows.
    """
    t, s = m.rows, m.cols
    if target.ambient_rank != t:
        raise ValueError(f"Target lattice ambient {target.ambient_rank} does not match {t} rows")
    ech = _Echelon(modulus=modulus)
    for v in target.vectors():
        ech.insert(v)
    for j in range(s):
        col = m.column(j)
        col[t + j] = 1
        ech.insert(col)
    ech.close_modulus(t + s)
    ech.canonicalize()
    lower = [{i - t: x for i, x in v.items()} for v in ech.sorted_vectors() if min(v) >= t]
    return Lattice(s, lower)


def kernel_lattice(m: IntMatrix) -> Lattice:
    """Lattice of integer vectors v with m·v = 0."""
    return preimage_lattice(m, Lattice.zero(m.rows))


def hnf(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix]:
    """Canonical column Hermite normal form h = m·u with u unimodular."""
    ech = _Echelon(track=True)
    for j in range(m.cols):
        ech.insert(m.column(j), {j: 1})
    ech.canonicalize()
    order = sorted(ech.pivots)
    h_cols = [ech.pivots[p] for p in order] + [{} for _ in ech.null_combos]
    u_cols = [ech.combos[p] for p in order] + ech.null_combos
    return IntMatrix(m.rows, m.cols, h_cols), IntMatrix(m.cols, m.cols, u_cols)


def _dense_snf(a: np.ndarray, track: bool = True) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Smith form on an object-dtype array: s = p·a·q."""
    a = a.astype(object).copy()
    rows, cols = a.shape
    p = np.eye(rows, dtype=object) if track else None
    q = np.eye(cols, dtype=object) if track else None

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            a[[i, j], :] = a[[j, i], :]
            if track:
                p[[i, j], :] = p[[j, i], :]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            a[:, [i, j]] = a[:, [j, i]]
            if track:
                q[:, [i, j]] = q[:, [j, i]]

    for t in range(min(rows, cols)):
        nz = [(abs(a[i, j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i, j] != 0]
        if not nz:
            break
        _, i0, j0 = min(nz)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            piv = a[t, t]
            clean = True
            for i in range(t + 1, rows):
                if a[i, t] != 0:
                    f = a[i, t] // piv
                    a[i, :] = a[i, :] - f * a[t, :]
                    if track:
                        p[i, :] = p[i, :] - f * p[t, :]
                    if a[i, t] != 0:
                        clean = False
            for j in range(t + 1, cols):
                if a[t, j] != 0:
                    f = a[t, j] // piv
                    a[:, j] = a[:, j] - f * a[:, t]
                    if track:
                        q[:, j] = q[:, j] - f * q[:, t]
                    if a[t, j] != 0:
                        clean = False
            if not clean:
                edge = [(abs(a[i, t]), i, t) for i in range(t + 1, rows) if a[i, t] != 0]
                edge += [(abs(a[t, j]), t, j) for j in range(t + 1, cols) if a[t, j] != 0]
                _, i1, j1 = min(edge)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i, j] % piv != 0),
                None,
            )
            if bad is None:
                break
            a[t, :] = a[t, :] + a[bad, :]
            if track:
                p[t, :] = p[t, :] + p[bad, :]
        if a[t, t] < 0:
            a[t, :] = -a[t, :]
            if track:
                p[t, :] = -p[t, :]
    return a, p, q


def snf(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form s = p·m·q with p, q unimodular and d1 | d2 | ...

    Below DENSE_SNF_LIMIT in both dimensions the dense kernel runs on m.
    Larger matrices are first column-reduced on sparse columns, h = m·u,
    and only the rank-many nonzero columns of h go to the dense kernel.
    """
    if m.rows == 0 or m.cols == 0:
        return m, IntMatrix.identity(m.rows), IntMatrix.identity(m.cols)
    if m.rows < DENSE_SNF_LIMIT and m.cols < DENSE_SNF_LIMIT:
        s, p, q = _dense_snf(m.to_numpy())
        return IntMatrix.from_numpy(s), IntMatrix.from_numpy(p), IntMatrix.from_numpy(q)
    h, u = hnf(m)
    rank = sum(1 for c in h.columns() if c)
    if rank == 0:
        return IntMatrix.zero(m.rows, m.cols), IntMatrix.identity(m.rows), u
    s_r, p, q_r = _dense_snf(h.select_columns(list(range(rank))).to_numpy())
    logger.debug(f"Sparse SNF reduced {m.rows}x{m.cols} to a dense {m.rows}x{rank} block")
    s = IntMatrix.hstack(m.rows, [IntMatrix.from_numpy(s_r), IntMatrix.zero(m.rows, m.cols - rank)])
    q = u @ IntMatrix.block_diagonal([IntMatrix.from_numpy(q_r), IntMatrix.identity(m.cols - rank)])
    return s, IntMatrix.from_numpy(p), q


def canonical_factors(values: Iterable[int]) -> Tuple[int, ...]:
    """Invariant factors of the group ⊕ Z/values: drop 1s, divisibility chain, zeros last."""
    vals = [abs(int(v)) for v in values]
    zeros = sum(1 for v in vals if v == 0)
    ds = [v for v in vals if v > 1]
    # gcd/lcm sweeps turn any diagonal into a divisibility chain
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            g = gcd(ds[i], ds[j])
            ds[i], ds[j] = g, ds[i] * ds[j] // g
    ds = sorted(d for d in ds if d > 1)
    return tuple(ds) + (0,) * zeros


class FpAbGroup:
    """Finitely presented abelian group Z^generators / relations."""

    def __init__(self, generators: int, relations: Optional[Lattice] = None):
        if relations is None:
            relations = Lattice.zero(generators)
        if relations.ambient_rank != generators:
            raise ValueError(f"Relation lattice lives in Z^{relations.ambient_rank}, expected Z^{generators}")
        self.generators = generators
        self.relations = relations

    @classmethod
    def free(cls, rank: int) -> "FpAbGroup":
        return cls(rank)

    @classmethod
    def trivial(cls) -> "FpAbGroup":
        return cls(0)

    @classmethod
    def from_invariant_factors(cls, factors: Sequence[int]) -> "FpAbGroup":
        n = len(factors)
        return cls(n, Lattice.from_generators(n, [{i: d} for i, d in enumerate(factors) if d]))

    @cached_property
    def invariant_factors(self) -> Tuple[int, ...]:
        vectors = self.relations.vectors()
        unit_rows = {min(v) for v in vectors if v[min(v)] == 1}
        rows = [i for i in range(self.generators) if i not in unit_rows]
        if not rows:
            return ()
        rest = [v for v in vectors if v[min(v)] != 1]
        # canonical HNF leaves zeros in unit-pivot rows of the other vectors
        if all(len(v) == 1 for v in rest):
            diag = [v[min(v)] for v in rest] + [0] * (len(rows) - len(rest))
            return canonical_factors(diag)
        position = {r: k for k, r in enumerate(rows)}
        dense = np.zeros((len(rows), len(rest)), dtype=object)
        for j, v in enumerate(rest):
            for i, x in v.items():
                dense[position[i], j] = x
        s, _, _ = _dense_snf(dense, track=False)
        diag = [s[k, k] for k in range(min(s.shape))]
        diag += [0] * (len(rows) - len(diag))
        return canonical_factors(diag)

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def is_finite(self) -> bool:
        return 0 not in self.invariant_factors

    def order(self) -> int:
        """Group order, 0 for infinite groups."""
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def exponent(self) -> int:
        """Least m with m·G = 0, or 0 when G has a free part."""
        out = 1
        for d in self.invariant_factors:
            out = _lcm(out, d)
        return out

    def is_zero_element(self, vec: Mapping[int, int]) -> bool:
        return self.relations.contains(vec)

    def isomorphic(self, other: "FpAbGroup") -> bool:
        return self.invariant_factors == other.invariant_factors

    def describe(self) -> str:
        factors = self.invariant_factors
        if not factors:
            return "0"
        return " ⊕ ".join("Z" if d == 0 else f"Z{d}" for d in factors)

    def to_payload(self) -> Dict[str, Any]:
        return {"invariant_factors": list(self.invariant_factors)}

    def __repr__(self) -> str:
        return f"FpAbGroup({self.describe()})"


class Subquotient:
    """Presentation of numerator/denominator together with a section.

    Presentation generator k corresponds to the k-th basis vector of the
    numerator, which is column k of ``section``.
    """

    def __init__(self, ambient_rank: int, numerator: Lattice, denominator: Lattice, modulus: int = 0):
        witness = numerator.containment_witness(denominator)
        if witness is not None:
            raise LatticeContainmentError(
                "Denominator is not contained in numerator", witness=witness
            )
        rel_vectors = [numerator.coordinates(v) for v in denominator.vectors()]
        k = numerator.rank
        relations = Lattice.from_generators(
            k,
            [{i: x for i, x in enumerate(c) if x} for c in rel_vectors],
            modulus=modulus if modulus and k else 0,
        )
        self.ambient_rank = ambient_rank
        self.numerator = numerator
        self.denominator = denominator
        self.group = FpAbGroup(k, relations)
        self.section = numerator.basis

    def coordinates(self, vec: Mapping[int, int]) -> Vector:
        coords = self.numerator.coordinates(vec)
        if coords is None:
            raise LatticeContainmentError("Vector is not in the numerator lattice", witness=dict(vec))
        return {i: x for i, x in enumerate(coords) if x}

    def lift(self, coords: Mapping[int, int]) -> Vector:
        return self.section.apply(coords)


def subquotient(ambient_rank: int, numerator: Lattice, denominator: Lattice, modulus: int = 0) -> Tuple[FpAbGroup, IntMatrix]:
    sq = Subquotient(ambient_rank, numerator, denominator, modulus=modulus)
    return sq.group, sq.section


class FpHom:
    """Homomorphism between presented groups, given on generators."""

    def __init__(self, source: FpAbGroup, target: FpAbGroup, matrix: IntMatrix, check: bool = True):
        if matrix.shape != (target.generators, source.generators):
            raise ValueError(
                f"Matrix shape {matrix.shape} does not fit {source.generators} -> {target.generators} generators"
            )
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            for rel in source.relations.vectors():
                image = matrix.apply(rel)
                if not target.relations.contains(image):
                    raise WellDefinednessError(
                        "Matrix does not carry source relations into target relations",
                        witness={"relation": rel, "image": image},
                    )

    @classmethod
    def identity(cls, group: FpAbGroup) -> "FpHom":
        return cls(group, group, IntMatrix.identity(group.generators), check=False)

    @classmethod
    def zero(cls, source: FpAbGroup, target: FpAbGroup) -> "FpHom":
        return cls(source, target, IntMatrix.zero(target.generators, source.generators), check=False)

    @classmethod
    def multiplication(cls, group: FpAbGroup, k: int) -> "FpHom":
        return cls(group, group, IntMatrix.scalar(group.generators, k), check=False)

    def compose(self, inner: "FpHom") -> "FpHom":
        """self ∘ inner."""
        if inner.target.generators != self.source.generators:
            raise ValueError("Composition of incompatible homomorphisms")
        return FpHom(inner.source, self.target, self.matrix @ inner.matrix, check=False)

    def __matmul__(self, inner: "FpHom") -> "FpHom":
        return self.compose(inner)

    def scale(self, k: int) -> "FpHom":
        return FpHom(self.source, self.target, self.matrix.scale(k), check=False)

    def apply(self, vec: Mapping[int, int]) -> Vector:
        return self.matrix.apply(vec)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpHom):
            return NotImplemented
        if self.matrix.shape != other.matrix.shape:
            return False
        diff = self.matrix - other.matrix
        return all(self.target.relations.contains(diff.column(j)) for j in range(diff.cols))

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return all(self.target.relations.contains(self.matrix.column(j)) for j in range(self.matrix.cols))

    def kernel(self) -> Lattice:
        """Preimage of the target relations; contains the source relations."""
        return preimage_lattice(self.matrix, self.target.relations)

    def image(self) -> Lattice:
        """Image plus target relations, as a lattice in the target generators."""
        return image_lattice(self.matrix, extra=self.target.relations)

    def is_injective(self) -> bool:
        return self.kernel() == self.source.relations

    def is_surjective(self) -> bool:
        return self.image().is_full()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def to_payload(self) -> Dict[str, Any]:
        return {
            "matrix": self.matrix.to_payload(),
            "source": self.source.to_payload(),
            "target": self.target.to_payload(),
        }

    def __repr__(self) -> str:
        return f"FpHom({self.source.describe()} -> {self.target.describe()})"


def induced_hom(f: IntMatrix, src: FpAbGroup, dst: FpAbGroup) -> FpHom:
    """Wrap ``f`` as a homomorphism of presented groups, checking it descends."""
    return FpHom(src, dst, f, check=True)


class LinearSolver:
    """Integer solutions of m·x = b for many right-hand sides b."""

    def __init__(self, m: IntMatrix):
        self.matrix = m
        self._ech = _Echelon(track=True)
        for j in range(m.cols):
            self._ech.insert(m.column(j), {j: 1})
        self._ech.canonicalize()

    def solve(self, b: Mapping[int, int]) -> Optional[Vector]:
        v = {i: x for i, x in b.items() if x}
        x: Vector = {}
        pivots, combos = self._ech.pivots, self._ech.combos
        while v:
            p = min(v)
            piv = pivots.get(p)
            if piv is None:
                return None
            q, r = divmod(v[p], piv[p])
            if r:
                return None
            _axpy(v, -q, piv)
            _axpy(x, q, combos[p])
        return x


def solve_integer(m: IntMatrix, b: Mapping[int, int]) -> Optional[Vector]:
    """One integer solution of m·x = b, or None."""
    return LinearSolver(m).solve(b)


def _check_short_exact(sub: Any, whole: Any, quotient: Any, inclusion: Any, projection: Any, degree: int) -> None:
    i_hom = FpHom(sub.group(degree), whole.group(degree), inclusion.at(degree))
    p_hom = FpHom(whole.group(degree), quotient.group(degree), projection.at(degree))
    if not i_hom.is_injective():
        raise StructuralError(f"Inclusion is not injective in degree {degree}", witness={"degree": degree, "spot": "sub"})
    if i_hom.image() != p_hom.kernel():
        raise StructuralError(f"Sequence is not exact in the middle in degree {degree}", witness={"degree": degree, "spot": "middle"})
    if not p_hom.is_surjective():
        raise StructuralError(f"Projection is not surjective in degree {degree}", witness={"degree": degree, "spot": "quotient"})


def connecting_hom(
    sub: Any,
    whole: Any,
    quotient: Any,
    inclusion: Any,
    projection: Any,
    degree: int,
    lift_offsets: Optional[Sequence[Mapping[int, int]]] = None,
) -> FpHom:
    """Snake-lemma map from the (co)homology of ``quotient`` at ``degree``.

    Complexes are duck-typed: ``group(n)``, ``differential(n)``,
    ``next_degree(n)`` and ``homology_data(n)``; chain maps expose ``at(n)``.
    ``lift_offsets`` adds a vector of ker(projection) to each lift; the
    result must not depend on it.
    """
    n1 = whole.next_degree(degree)
    for d in (degree, n1):
        _check_short_exact(sub, whole, quotient, inclusion, projection, d)

    source = quotient.homology_data(degree)
    target = sub.homology_data(n1)

    q_rel = quotient.group(degree).relations.basis
    lifter = LinearSolver(IntMatrix.hstack(projection.at(degree).rows, [projection.at(degree), q_rel]))
    w_rel = whole.group(n1).relations.basis
    descender = LinearSolver(IntMatrix.hstack(inclusion.at(n1).rows, [inclusion.at(n1), w_rel]))
    d_whole = whole.differential(degree)
    whole_gens = whole.group(degree).generators
    sub_gens = sub.group(n1).generators

    columns = []
    for k in range(source.group.generators):
        cycle = source.section.column(k)
        sol = lifter.solve(cycle)
        if sol is None:
            raise StructuralError(f"Cannot lift a cycle through the projection in degree {degree}", witness=cycle)
        lift = {i: x for i, x in sol.items() if i < whole_gens}
        if lift_offsets is not None:
            _axpy(lift, 1, lift_offsets[k % len(lift_offsets)])
        image = d_whole.apply(lift)
        sol = descender.solve(image)
        if sol is None:
            raise StructuralError(f"Boundary of the lift is not in the subcomplex in degree {n1}", witness=image)
        pre = {i: x for i, x in sol.items() if i < sub_gens}
        columns.append(target.coordinates(pre))
    matrix = IntMatrix(target.group.generators, source.group.generators, columns)
    logger.debug(f"Connecting map in degree {degree}: {source.group.describe()} -> {target.group.describe()}")
    return FpHom(source.group, target.group, matrix)
