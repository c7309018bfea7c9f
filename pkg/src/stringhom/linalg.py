"""Exact rational linear algebra for the differentials of the complexes.

Matrices are stored sparsely as ``{(row, col): Fraction}``.  Elimination is
fraction-free: every row is scaled to a primitive integer vector, and row
operations are integer combinations followed by content removal.  Pivots are
chosen by minimal bit length to keep coefficient growth in check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Vector = Dict[int, Fraction]

#: fill ratio above which elimination switches to dense rows
DENSE_THRESHOLD = 0.35


class DimensionError(ValueError):
    pass


class InclusionError(ValueError):
    """Raised when a subspace is not contained in another; carries a witness."""

    def __init__(self, msg: str, witness: Vector):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise DimensionError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
            v = Fraction(v)
            if v:
                clean[(r, c)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = {(i, j): Fraction(x) for i, row in enumerate(rows) for j, x in enumerate(row) if x}
        return cls(nr, nc, ent)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, Fraction]]) -> "SparseMatrix":
        ent = {(r, c): v for c, col in enumerate(columns) for r, v in col.items()}
        return cls(nrows, len(columns), ent)

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def column(self, j: int) -> Vector:
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def row_dicts(self) -> List[Vector]:
        out: List[Vector] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc: Dict[Tuple[int, int], Fraction] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, acc)

    def scale(self, s) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {k: v * s for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, v: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for (r, c), x in self.entries.items():
            if c in v:
                out[r] = out.get(r, 0) + x * v[c]
        return {k: x for k, x in out.items() if x}


@dataclass(frozen=True)
class SubspaceBasis:
    ambient_dim: int
    vectors: Tuple[Vector, ...] = ()

    def __post_init__(self):
        vecs = []
        for v in self.vectors:
            if any(not 0 <= i < self.ambient_dim for i in v):
                raise DimensionError("basis vector has coordinates outside the ambient space")
            vecs.append({i: Fraction(x) for i, x in v.items() if x})
        object.__setattr__(self, "vectors", tuple(vecs))

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)


# -- integer row helpers -----------------------------------------------------


def _primitive(row: Mapping[int, Fraction]) -> Dict[int, int]:
    """Scale a rational row to a primitive integer row with positive leading entry."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    ints = {k: int(Fraction(v) * den) for k, v in row.items() if v}
    if not ints:
        return {}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    return {k: v // g for k, v in ints.items()}


def _combine(target: Dict[int, int], pivot: Dict[int, int], col: int) -> Dict[int, int]:
    a = pivot[col]
    b = target[col]
    g = gcd(a, b)
    fa, fb = a // g, b // g
    out = {k: fa * v for k, v in target.items()}
    for k, v in pivot.items():
        out[k] = out.get(k, 0) - fb * v
    out = {k: v for k, v in out.items() if v}
    if not out:
        return out
    c = 0
    for v in out.values():
        c = gcd(c, v)
    return {k: v // c for k, v in out.items()} if c > 1 else out


def _echelon_sparse(rows: List[Dict[int, int]], ncols: int, reduced: bool):
    rows = [r for r in rows if r]
    pivots: List[Tuple[int, Dict[int, int]]] = []
    remaining = rows
    for col in range(ncols):
        cands = [i for i, r in enumerate(remaining) if col in r]
        if not cands:
            continue
        best = min(cands, key=lambda i: (abs(remaining[i][col]).bit_length(), len(remaining[i]), i))
        prow = remaining[best]
        rest = []
        for i, r in enumerate(remaining):
            if i == best:
                continue
            if col in r:
                r = _combine(r, prow, col)
            if r:
                rest.append(r)
        remaining = rest
        if reduced:
            pivots = [(c, _combine(r, prow, col) if col in r else r) for c, r in pivots]
        pivots.append((col, prow))
    return pivots


def _echelon_dense(rows: List[Dict[int, int]], ncols: int, reduced: bool):
    dense = [[r.get(j, 0) for j in range(ncols)] for r in rows if r]
    pivots: List[Tuple[int, List[int]]] = []
    for col in range(ncols):
        cands = [i for i, r in enumerate(dense) if r[col]]
        if not cands:
            continue
        best = min(cands, key=lambda i: (abs(dense[i][col]).bit_length(), sum(1 for x in dense[i] if x), i))
        prow = dense.pop(best)

        def elim(r):
            a, b = prow[col], r[col]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            out = [fa * x - fb * y for x, y in zip(r, prow)]
            c = 0
            for x in out:
                c = gcd(c, x)
            return [x // c for x in out] if c > 1 else out

        dense = [elim(r) if r[col] else r for r in dense]
        dense = [r for r in dense if any(r)]
        if reduced:
            pivots = [(c, elim(r) if r[col] else r) for c, r in pivots]
        pivots.append((col, prow))
    return [(c, {j: x for j, x in enumerate(r) if x}) for c, r in pivots]


def _echelon(rows: List[Dict[int, int]], ncols: int, reduced: bool = True, dense_threshold: Optional[float] = None):
    threshold = DENSE_THRESHOLD if dense_threshold is None else dense_threshold
    nnz = sum(len(r) for r in rows)
    size = max(1, len(rows) * ncols)
    if rows and nnz / size > threshold:
        return _echelon_dense(rows, ncols, reduced)
    return _echelon_sparse(rows, ncols, reduced)


# -- public operations -------------------------------------------------------


def rank(m: SparseMatrix) -> int:
    rows = [_primitive(r) for r in m.row_dicts()]
    return len(_echelon(rows, m.cols, reduced=False))


def rank_kernel_image(m: SparseMatrix, dense_threshold: Optional[float] = None):
    """Return ``(rank, kernel, image)`` of ``m`` acting on column vectors.

    The kernel basis is read off the reduced row echelon form (one vector per
    free column); the image basis is the set of pivot columns of ``m``.
    """
    rows = [_primitive(r) for r in m.row_dicts()]
    piv = _echelon(rows, m.cols, reduced=True, dense_threshold=dense_threshold)
    pivot_cols = [c for c, _ in piv]
    pset = set(pivot_cols)
    kernel = []
    for f in range(m.cols):
        if f in pset:
            continue
        v: Vector = {f: Fraction(1)}
        for c, r in piv:
            if f in r:
                v[c] = Fraction(-r[f], r[c])
        kernel.append(v)
    image = [m.column(c) for c in pivot_cols]
    return len(piv), SubspaceBasis(m.cols, tuple(kernel)), SubspaceBasis(m.rows, tuple(image))


def span_rank(vectors: Iterable[Mapping[int, Fraction]], ambient_dim: int) -> int:
    rows = [_primitive(v) for v in vectors]
    return len(_echelon(rows, ambient_dim, reduced=False))


def in_span(v: Mapping[int, Fraction], basis: SubspaceBasis) -> bool:
    if any(not 0 <= i < basis.ambient_dim for i in v):
        raise DimensionError("vector does not live in the ambient space of the basis")
    if not any(v.values()):
        return True
    r0 = span_rank(basis.vectors, basis.ambient_dim)
    return span_rank(list(basis.vectors) + [v], basis.ambient_dim) == r0


def solve_in_span(v: Mapping[int, Fraction], vectors: Sequence[Mapping[int, Fraction]], ambient_dim: int) -> Optional[List[Fraction]]:
    """Coefficients ``c`` with ``sum c_i vectors_i == v``, or None if v is not in the span."""
    cols = list(vectors) + [v]
    m = SparseMatrix.from_columns(ambient_dim, cols)
    rows = [_primitive(r) for r in m.row_dicts()]
    piv = _echelon(rows, m.cols, reduced=True)
    last = len(vectors)
    if any(c == last for c, _ in piv):
        return None
    coeffs = [Fraction(0)] * len(vectors)
    for c, r in piv:
        coeffs[c] = Fraction(r.get(last, 0), r[c])
    return coeffs


def quotient_rank(numerator: SubspaceBasis, denominator: SubspaceBasis) -> int:
    """dim(numerator / denominator); the denominator must lie inside the numerator."""
    if numerator.ambient_dim != denominator.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    for w in denominator.vectors:
        if not in_span(w, numerator):
            raise InclusionError("denominator not contained in numerator", w)
    n = span_rank(numerator.vectors, numerator.ambient_dim)
    d = span_rank(denominator.vectors, denominator.ambient_dim)
    return n - d


def cohomology_rank(incoming: Optional[SparseMatrix], outgoing: Optional[SparseMatrix], dim: int) -> int:
    """dim ker(outgoing) - rank(incoming) for the middle space of dimension ``dim``."""
    r_out = rank(outgoing) if outgoing is not None and outgoing.entries else 0
    r_in = rank(incoming) if incoming is not None and incoming.entries else 0
    return dim - r_out - r_in
