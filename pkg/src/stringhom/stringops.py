"""Loop product, loop bracket and string bracket on top of the algebraic complexes.

Degree bookkeeping (``h`` = HOCH_VV degree, ``c`` = CYCLIC degree):

* loop homology: ``H_P(LM)`` with ``P = d - h``, equivalently the shifted grading
  ``k = P - d = -h``.  Product: ``P1 + P2 - d``; bracket: ``P1 + P2 - d + 1``.
* equivariant homology: ``H^S1_N`` with ``N = -1 - c``; bracket ``N1 + N2 - d + 2``.
  The Lie grading ``L = N + 2 - d`` makes the bracket degree-preserving; ``L``
  equals minus the degree of the Hamiltonian vector field.

Every class records these offsets so nothing is re-derived at use sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from . import hochschild as hh
from .frobenius import AInfinityStructure, FrobeniusAlgebraSpec, SymplecticForm, from_frobenius, necklace_bracket
from .negcyclic import hc_minus
from .spaces import builtin


class DegreeContractError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpaceModel:
    name: str
    spec: FrobeniusAlgebraSpec
    structure: AInfinityStructure
    form: SymplecticForm

    @property
    def d(self) -> int:
        return self.spec.dimension


def model(spec: FrobeniusAlgebraSpec, name: Optional[str] = None) -> SpaceModel:
    structure, form = from_frobenius(spec)
    return SpaceModel(name or spec.name, spec, structure, form)


def builtin_model(name: str) -> SpaceModel:
    return model(builtin(name), name)


# -- loop homology ----------------------------------------------------------------


@dataclass(frozen=True)
class LoopClass:
    """A class of ``H_P(LM)`` carried by a HOCH_VV cocycle of degree ``hh_degree``."""

    lm_degree: int
    hh_degree: int
    representative: Mapping
    offset: int  # lm_degree = offset - hh_degree, offset = d

    @property
    def shifted_degree(self) -> int:
        return self.lm_degree - self.offset

    def hh_class(self) -> hh.HHClass:
        return hh.HHClass(self.hh_degree, self.representative)


def loop_class(space: SpaceModel, x: hh.HHClass) -> LoopClass:
    return LoopClass(space.d - x.degree, x.degree, dict(x.representative), space.d)


@dataclass(frozen=True)
class LoopRow:
    lm_degree: int
    shifted_degree: int
    hh_degree: int
    rank: int
    stabilized: bool


def loop_homology(space: SpaceModel, lm_degrees: Iterable[int], weight_cap: Optional[int] = None) -> List[LoopRow]:
    lm_degrees = list(lm_degrees)
    rep = hh.cohomology(space.structure, hh.HOCH_VV, [space.d - p for p in lm_degrees], weight_cap)
    return [LoopRow(p, p - space.d, space.d - p, rep[space.d - p].rank, rep[space.d - p].stabilized)
            for p in lm_degrees]


def loop_classes(space: SpaceModel, lm_degree: int) -> List[LoopClass]:
    return [loop_class(space, x) for x in hh.classes(space.structure, space.d - lm_degree)]


def loop_product(space: SpaceModel, a: LoopClass, b: LoopClass) -> LoopClass:
    out = loop_class(space, hh.cup_product(space.structure, a.hh_class(), b.hh_class()))
    if out.lm_degree != a.lm_degree + b.lm_degree - space.d:
        raise DegreeContractError(f"loop product landed in degree {out.lm_degree}")
    return out


def loop_bracket(space: SpaceModel, a: LoopClass, b: LoopClass) -> LoopClass:
    out = loop_class(space, hh.gerstenhaber_bracket(space.structure, a.hh_class(), b.hh_class()))
    if out.lm_degree != a.lm_degree + b.lm_degree - space.d + 1:
        raise DegreeContractError(f"loop bracket landed in degree {out.lm_degree}")
    return out


def loop_unit(space: SpaceModel) -> LoopClass:
    return loop_class(space, hh.unit_class(space.structure))


def same_loop_class(space: SpaceModel, a: LoopClass, b: LoopClass) -> bool:
    return hh.same_class(space.structure, a.hh_class(), b.hh_class())


def loop_coordinates(space: SpaceModel, x: LoopClass, basis: Sequence[LoopClass]) -> Optional[List[Fraction]]:
    if not basis:
        return [] if hh.is_coboundary(space.structure, hh.HOCH_VV, x.hh_degree, x.representative) else None
    return hh.class_coordinates(space.structure, hh.HOCH_VV, x.hh_degree, x.representative,
                                [b.representative for b in basis])


# -- equivariant homology ----------------------------------------------------------


@dataclass(frozen=True)
class StringClass:
    """A class of ``H^S1_N(LM)`` carried by a cyclic cocycle of degree ``cyclic_degree``."""

    string_degree: int
    cyclic_degree: int
    representative: Mapping
    offset: int  # string_degree = offset - cyclic_degree, offset = -1
    d: int

    @property
    def lie_degree(self) -> int:
        return self.string_degree + 2 - self.d


def string_class(space: SpaceModel, cyclic_degree: int, rep: Mapping) -> StringClass:
    return StringClass(-1 - cyclic_degree, cyclic_degree, dict(rep), -1, space.d)


def string_degree_of_lie(space: SpaceModel, lie_degree: int) -> int:
    return lie_degree + space.d - 2


@dataclass(frozen=True)
class StringRow:
    string_degree: int
    cyclic_degree: int
    rank: int
    hc_minus_degree: int
    hc_minus_rank: int
    stabilized: bool


def string_homology(space: SpaceModel, string_degrees: Iterable[int]) -> List[StringRow]:
    ns = list(string_degrees)
    cs = [-1 - n for n in ns]
    rep = hh.cohomology(space.structure, hh.CYCLIC, cs)
    neg = hc_minus(space.structure, [c - 1 for c in cs]).ranks()
    return [StringRow(n, c, rep[c].rank, c - 1, neg[c - 1], rep[c].stabilized) for n, c in zip(ns, cs)]


def string_classes(space: SpaceModel, string_degree: int) -> List[StringClass]:
    c = -1 - string_degree
    rep = hh.cohomology(space.structure, hh.CYCLIC, [c], stabilize=False)[c]
    return [string_class(space, c, r) for r in rep.representatives]


def string_bracket(space: SpaceModel, a: StringClass, b: StringClass) -> StringClass:
    q = necklace_bracket(a.representative, b.representative, space.form, space.structure.reduced_letters)
    c = a.cyclic_degree + b.cyclic_degree + space.d - 1
    out = string_class(space, c, q)
    if out.string_degree != a.string_degree + b.string_degree - space.d + 2:
        raise DegreeContractError(f"string bracket landed in degree {out.string_degree}")
    return out


def string_coordinates(space: SpaceModel, x: StringClass, basis: Sequence[StringClass]) -> Optional[List[Fraction]]:
    if not basis:
        ok = hh.is_coboundary(space.structure, hh.CYCLIC, x.cyclic_degree, x.representative)
        return [] if ok else None
    return hh.class_coordinates(space.structure, hh.CYCLIC, x.cyclic_degree, x.representative,
                                [b.representative for b in basis])


@dataclass(frozen=True)
class BracketTable:
    """Structure constants ``[e_i, e_j] = sum_k table[i][j][k] e_k`` on one Lie degree."""

    lie_degree: int
    string_degree: int
    classes: Tuple[StringClass, ...]
    table: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.classes)

    @property
    def abelian(self) -> bool:
        return all(not any(v) for row in self.table for v in row)


def string_bracket_table(space: SpaceModel, lie_degree: int) -> BracketTable:
    n = string_degree_of_lie(space, lie_degree)
    cls = string_classes(space, n)
    rows = []
    for a in cls:
        row = []
        for b in cls:
            coords = string_coordinates(space, string_bracket(space, a, b), cls)
            if coords is None:
                raise hh.InvariantBreach("bracket left the span of the degree's classes")
            row.append(tuple(coords))
        rows.append(tuple(row))
    return BracketTable(lie_degree, n, tuple(cls), tuple(rows))


def find_sl2_basis(table: BracketTable, bound: int = 2) -> Optional[Tuple[List[Fraction], List[Fraction], List[Fraction]]]:
    """Search for ``E, H, F`` with ``[H,E] = 2E``, ``[H,F] = -2F``, ``[E,F] = H``.

    ``E`` ranges over small integer combinations; ``F`` is solved for exactly.
    """
    from .linalg import solve_in_span

    n = table.dimension
    if n != 3:
        return None

    def br(x, y):
        out = [Fraction(0)] * n
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if yj:
                    for k, c in enumerate(table.table[i][j]):
                        out[k] += xi * yj * c
        return out

    def vec(v):
        return {i: x for i, x in enumerate(v) if x}

    rng = range(-bound, bound + 1)
    for e in iproduct(rng, repeat=n):
        if not any(e):
            continue
        e = [Fraction(x) for x in e]
        # [[E, F], E] = 2E is linear in F
        cols = [vec(br(br(e, [Fraction(int(i == j)) for j in range(n)]), e)) for i in range(n)]
        sol = solve_in_span(vec([2 * x for x in e]), cols, n)
        if sol is None:
            continue
        f = sol
        h = br(e, f)
        if br(h, e) == [2 * x for x in e] and br(h, f) == [-2 * x for x in f]:
            return e, h, f
    return None


# -- orientation and rescaling -------------------------------------------------------


def orientation_flip(space: SpaceModel) -> SpaceModel:
    spec = space.spec.with_pairing_scaled(-1)
    return model(spec, f"{space.name}-flipped")


def rescaled(space: SpaceModel, factor) -> SpaceModel:
    return model(space.spec.with_pairing_scaled(factor), f"{space.name}*{factor}")


def diagonal_rescaling_to(src: FrobeniusAlgebraSpec, dst: FrobeniusAlgebraSpec) -> Optional[Tuple[int, ...]]:
    """Signs ``lam`` with ``v_i -> lam_i v_i`` an algebra automorphism carrying ``src``'s pairing to ``dst``'s.

    Tries ``lam_i = (-1)^{|v_i|}`` first, then every sign vector fixing the unit.
    """
    deg = src.degrees
    u = src.unit_index()
    n = len(src)

    def works(lam):
        for (i, j), terms in src.product.items():
            for k in terms:
                if lam[i] * lam[j] != lam[k]:
                    return False
        keys = set(src.pairing) | set(dst.pairing)
        return all(lam[i] * lam[j] * src.pair(i, j) == dst.pair(i, j) for i, j in keys)

    first = tuple(-1 if d & 1 else 1 for d in deg)
    if works(first):
        return first
    free = [i for i in range(n) if i != u]
    for signs in iproduct((1, -1), repeat=len(free)):
        lam = [1] * n
        for i, s in zip(free, signs):
            lam[i] = s
        if works(lam):
            return tuple(lam)
    return None
