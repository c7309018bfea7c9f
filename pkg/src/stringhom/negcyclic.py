"""Negative cyclic bicomplex on plain words and its comparison with necklaces.

Columns sit at horizontal positions p <= -1.  Odd p carries a bar-type column
(differential ``b'``: the reduced structure field acting as a derivation), even
p a Hochschild-type column (``b = b' + wrap`` where the wrap term rotates the
output of ``b'`` on the last letter).  Rows alternate ``N`` (bar -> Hochschild)
and ``1 - z`` (Hochschild -> bar).  A word of degree ``delta`` in column p has
total degree ``p + delta - 1``; the total differential is ``(-1)^p v + h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .frobenius import AInfinityStructure, Derivation
from .graded import Combo, Word, add_into, clean, norm, rotate, word_degree, words_of_degree, words_of_length
from .hochschild import CYCLIC, InvariantBreach, cohomology
from .linalg import SparseMatrix, rank

BAR = "bar"
HOCH = "hoch"


def column_kind(p: int) -> str:
    if p >= 0:
        raise ValueError("columns sit at negative positions")
    return BAR if p % 2 else HOCH


def bar_differential(m: Derivation, w: Word) -> Combo:
    return m.apply({w: Fraction(1)})


def hochschild_differential(m: Derivation, w: Word) -> Combo:
    """``b'`` plus the rotated contribution of the last letter."""
    out = bar_differential(m, w)
    if not w:
        return out
    deg = m.deg
    pre, x = w[:-1], w[-1]
    s = -1 if (m.degree & 1 and word_degree(pre, deg) & 1) else 1
    for u, c in m.images.get(x, {}).items():
        r, sr = rotate(pre + u, deg)
        add_into(out, r, s * sr * c)
    return clean(out)


def one_minus_z(w: Word, deg: Sequence[int]) -> Combo:
    r, s = rotate(w, deg)
    out: Combo = {w: Fraction(1)}
    add_into(out, r, Fraction(-s))
    return clean(out)


def vertical(m: Derivation, p: int, w: Word) -> Combo:
    return bar_differential(m, w) if column_kind(p) == BAR else hochschild_differential(m, w)


def horizontal(deg: Sequence[int], p: int, w: Word) -> Combo:
    """Row operator from column p to column p + 1 (zero out of the last column)."""
    if p == -1:
        return {}
    return norm(w, deg) if column_kind(p) == BAR else one_minus_z(w, deg)


# -- totalization ----------------------------------------------------------------


def column_range(degree: int, columns: Optional[int] = None) -> range:
    """Columns carrying total degree ``degree`` (words need degree <= -1)."""
    lo = degree + 2
    if columns is not None:
        lo = max(lo, -columns)
    return range(lo, 0)


def authoritative_columns(degree: int) -> int:
    """Columns needed to see degrees ``degree - 1 .. degree + 1`` in full."""
    return max(0, -(degree + 1))


@dataclass(frozen=True)
class BicomplexSlice:
    degree: int
    columns: int
    domain: Tuple[Tuple[int, Word], ...]
    codomain: Tuple[Tuple[int, Word], ...]
    matrix: SparseMatrix
    authoritative: bool


def total_basis(structure: AInfinityStructure, degree: int, columns: Optional[int] = None,
                weight_cap: Optional[int] = None) -> List[Tuple[int, Word]]:
    deg = structure.deg
    red = structure.reduced_letters
    out = []
    for p in column_range(degree, columns):
        delta = degree - p + 1
        cap = -delta if weight_cap is None else min(weight_cap, -delta)
        out.extend((p, w) for w in words_of_degree(red, deg, delta, cap, min_len=1))
    return out


def total_differential(structure: AInfinityStructure, p: int, w: Word) -> Dict[Tuple[int, Word], Fraction]:
    m = structure.reduced()
    out: Dict = {}
    sv = -1 if p % 2 else 1
    for u, c in vertical(m, p, w).items():
        add_into(out, (p, u), sv * c)
    for u, c in horizontal(structure.deg, p, w).items():
        add_into(out, (p + 1, u), c)
    return clean(out)


def build_bicomplex(structure: AInfinityStructure, degree: int, columns: Optional[int] = None,
                    weight_cap: Optional[int] = None) -> BicomplexSlice:
    """Matrix of the total differential from ``degree`` to ``degree + 1``."""
    need = authoritative_columns(degree)
    dom = total_basis(structure, degree, columns, weight_cap)
    cod = total_basis(structure, degree + 1, columns, weight_cap)
    index = {k: i for i, k in enumerate(cod)}
    cols = []
    for p, w in dom:
        col = {}
        for key, v in total_differential(structure, p, w).items():
            if key in index:
                col[index[key]] = v
            elif weight_cap is None or len(key[1]) <= weight_cap:
                raise InvariantBreach(f"total differential left the enumerated basis at {key}")
        cols.append(col)
    auth = (columns is None or columns >= need) and weight_cap is None
    return BicomplexSlice(degree, need if columns is None else columns, tuple(dom), tuple(cod),
                          SparseMatrix.from_columns(len(cod), cols), auth)


def total_rank(structure: AInfinityStructure, degree: int, columns: Optional[int] = None) -> int:
    out = build_bicomplex(structure, degree, columns)
    inc = build_bicomplex(structure, degree - 1, columns)
    return len(out.domain) - rank(out.matrix) - rank(inc.matrix)


# -- identities ------------------------------------------------------------------


def _operator_matrix(fn, dom: Sequence[Word], cod: Sequence[Word]) -> SparseMatrix:
    index = {k: i for i, k in enumerate(cod)}
    cols = []
    for w in dom:
        col = {}
        for u, c in fn(w).items():
            if u not in index:
                raise InvariantBreach(f"operator left the enumerated basis at {u}")
            col[index[u]] = c
        cols.append(col)
    return SparseMatrix.from_columns(len(cod), cols)


def check_identities(structure: AInfinityStructure, delta: int) -> Dict[str, bool]:
    """Exact operator identities on words of degree ``delta`` (and ``delta + 1``, ``delta + 2``)."""
    m = structure.reduced()
    deg = structure.deg
    red = structure.reduced_letters
    w0 = words_of_degree(red, deg, delta, -delta, min_len=1)
    w1 = words_of_degree(red, deg, delta + 1, -delta - 1, min_len=1)
    w2 = words_of_degree(red, deg, delta + 2, -delta - 2, min_len=1)
    z1 = lambda w: one_minus_z(w, deg)
    nn = lambda w: norm(w, deg)
    b = lambda w: hochschild_differential(m, w)
    bp = lambda w: bar_differential(m, w)
    N0, Z0 = _operator_matrix(nn, w0, w0), _operator_matrix(z1, w0, w0)
    N1, Z1 = _operator_matrix(nn, w1, w1), _operator_matrix(z1, w1, w1)
    B0, Bp0 = _operator_matrix(b, w0, w1), _operator_matrix(bp, w0, w1)
    B1, Bp1 = _operator_matrix(b, w1, w2), _operator_matrix(bp, w1, w2)
    return {
        "N(1-z)=0": (N0 @ Z0).is_zero(),
        "(1-z)N=0": (Z0 @ N0).is_zero(),
        "b^2=0": (B1 @ B0).is_zero(),
        "b'^2=0": (Bp1 @ Bp0).is_zero(),
        "(1-z)b=b'(1-z)": (Z1 @ B0).to_dense() == (Bp0 @ Z0).to_dense(),
        "bN=Nb'": (B0 @ N0).to_dense() == (N1 @ Bp0).to_dense(),
    }


def check_anticommuting(structure: AInfinityStructure, degree: int) -> bool:
    """Vertical and horizontal parts of the total differential anticommute and square to zero."""
    a = build_bicomplex(structure, degree)
    b = build_bicomplex(structure, degree + 1)
    return (b.matrix @ a.matrix).is_zero()


def unital_bar_acyclic(structure: AInfinityStructure, delta: int, length: int) -> bool:
    """The unital bar complex (all letters, full ``m``) is exact at words of degree ``delta`` and ``length``."""
    m = structure.m
    deg = structure.deg
    letters = structure.letters
    mid = words_of_length(letters, deg, delta, length)
    if not mid:
        return True
    nxt = words_of_length(letters, deg, delta + 1, length + 1)
    prev = words_of_length(letters, deg, delta - 1, length - 1) if length >= 1 else []
    d_out = _operator_matrix(lambda w: bar_differential(m, w), mid, nxt)
    d_in = _operator_matrix(lambda w: bar_differential(m, w), prev, mid)
    return len(mid) - rank(d_out) - rank(d_in) == 0


# -- report ----------------------------------------------------------------------


@dataclass(frozen=True)
class HCMinusEntry:
    degree: int
    rank: int
    cyclic_rank: int
    columns: int
    column_stable: bool

    @property
    def agree(self) -> bool:
        return self.rank == self.cyclic_rank


@dataclass(frozen=True)
class HCMinusReport:
    entries: Tuple[HCMinusEntry, ...]

    def ranks(self) -> Dict[int, int]:
        return {e.degree: e.rank for e in self.entries}

    @property
    def agree(self) -> bool:
        return all(e.agree for e in self.entries)


def hc_minus(structure: AInfinityStructure, degrees: Iterable[int], columns: Optional[int] = None) -> HCMinusReport:
    """HC^- ranks with their CYCLIC comparison and a one-extra-column certificate."""
    degrees = list(degrees)
    cyc = cohomology(structure, CYCLIC, [n + 1 for n in degrees], stabilize=False).ranks()
    out = []
    for n in degrees:
        c = max(authoritative_columns(n - 1), 1) if columns is None else columns
        r = total_rank(structure, n, c)
        r2 = total_rank(structure, n, c + 1)
        out.append(HCMinusEntry(n, r, cyc[n + 1], c, r == r2))
    return HCMinusReport(tuple(out))
