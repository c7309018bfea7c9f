"""Derivation, one-form and necklace complexes of a minimal structure field.

All three complexes are graded so that the differential raises the complex
degree by one:

* ``HOCH_VV``: normalized derivations ``sum_k A_k d/dt_k`` with unit-free image
  words; a derivation of degree ``e`` sits in complex degree ``e + 1``.
* ``HOCH_VVDUAL``: cyclic one-forms ``a dt_k`` (``a`` unit-free, ``k`` any
  letter) in complex degree ``deg a + deg t_k - 1``.
* ``CYCLIC``: nonzero necklaces over the reduced letters, in complex degree
  ``deg q - 1``.

Each degree is finite-dimensional, so a weight cap is only a performance knob;
``authoritative_cap`` gives the cap past which nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .frobenius import AInfinityStructure, Derivation, FrobeniusAlgebraSpec, SymplecticForm, hamiltonian
from .graded import Combo, Word, add_into, clean, necklace_combo, necklaces_of_degree, \
    word_degree, words_of_degree
from .linalg import SparseMatrix, rank, rank_kernel_image, span_rank, solve_in_span

HOCH_VV = "HOCH_VV"
HOCH_VVDUAL = "HOCH_VVDUAL"
CYCLIC = "CYCLIC"
COMPLEXES = (HOCH_VV, HOCH_VVDUAL, CYCLIC)

Key = Tuple
Chain = Dict[Key, Fraction]


class InvariantBreach(RuntimeError):
    """An identity that must hold exactly (d^2 = 0, chain map, ...) failed."""


# -- carriers -------------------------------------------------------------------


def _max_len(degree: int) -> int:
    return max(0, -degree)


def basis(structure: AInfinityStructure, complex_id: str, degree: int, weight_cap: Optional[int] = None) -> List[Key]:
    """Deterministic basis of one degree of a complex, optionally truncated by weight."""
    deg = structure.deg
    red = structure.reduced_letters
    out: List[Key] = []
    if complex_id == HOCH_VV:
        e = degree - 1
        for k in structure.letters:
            wd = deg[k] + e
            cap = _max_len(wd) if weight_cap is None else min(weight_cap, _max_len(wd))
            out.extend((k, w) for w in words_of_degree(red, deg, wd, cap))
    elif complex_id == HOCH_VVDUAL:
        for k in structure.letters:
            ad = degree + 1 - deg[k]
            cap = _max_len(ad) if weight_cap is None else min(weight_cap - 1, _max_len(ad))
            if cap < 0:
                continue
            out.extend((w, k) for w in words_of_degree(red, deg, ad, cap))
    elif complex_id == CYCLIC:
        qd = degree + 1
        cap = _max_len(qd) if weight_cap is None else min(weight_cap, _max_len(qd))
        out.extend(necklaces_of_degree(red, deg, qd, cap))
    else:
        raise ValueError(f"unknown complex {complex_id!r}")
    return sorted(out, key=_key_order)


def _key_order(key):
    if isinstance(key[0], tuple):
        w, k = key
        return (len(w), w, k)
    if len(key) == 2 and isinstance(key[1], tuple):
        k, w = key
        return (len(w), k, w)
    return (len(key), key)


def weight(complex_id: str, key: Key) -> int:
    if complex_id == HOCH_VV:
        return len(key[1])
    if complex_id == HOCH_VVDUAL:
        return len(key[0]) + 1
    return len(key)


def authoritative_cap(structure: AInfinityStructure, complex_id: str, degree: int) -> int:
    """Smallest weight cap at which degrees ``degree - 1 .. degree + 1`` are complete."""
    deg = structure.deg
    lo = min(deg)
    hi = max(deg)
    d = degree - 1
    if complex_id == HOCH_VV:
        return _max_len(lo + d - 1)
    if complex_id == HOCH_VVDUAL:
        return _max_len(d + 1 - hi) + 1
    return _max_len(d + 1)


# -- elements -------------------------------------------------------------------


def derivation_of(structure: AInfinityStructure, degree: int, chain: Mapping[Key, Fraction]) -> Derivation:
    """The derivation represented by a HOCH_VV chain of the given complex degree."""
    return Derivation.from_terms(structure.deg, degree - 1, chain)


def chain_of(xi: Derivation) -> Chain:
    return clean(xi.terms())


def _unit_free(structure: AInfinityStructure, words: Iterable[Word]) -> bool:
    u = structure.unit
    return u is None or all(u not in w for w in words)


def lie_derivation(structure: AInfinityStructure, xi: Derivation) -> Derivation:
    """``[m, xi]``, checked to stay normalized."""
    out = structure.m.bracket(xi)
    for k, combo in out.images.items():
        if not _unit_free(structure, combo):
            raise InvariantBreach(f"[m, xi] left the normalized complex at t{k}")
    return out


def one_form_differential(xi: Derivation, form: Mapping[Key, Fraction], unit: Optional[int] = None) -> Chain:
    """Lie derivative of a cyclic one-form ``sum c (a, k) = sum c a dt_k`` along ``xi``."""
    deg = xi.deg
    p = xi.degree & 1
    out: Chain = {}
    for (a, k), c in form.items():
        c = Fraction(c)
        # xi(a) dt_k
        for w, v in xi.apply_word(a, {}, c).items():
            add_into(out, (w, k), v)
        # (-1)^{|xi||a|} a L_xi(dt_k) with L_xi(dt) = (-1)^{|xi|} d(xi t)
        s = c * (-1 if (p and word_degree(a, deg) & 1) else 1) * (-1 if p else 1)
        for w, v in xi.images.get(k, {}).items():
            _add_d_word(out, a, w, s * v, deg)
    return clean(out)


def _add_d_word(out: Chain, a: Word, w: Word, c: Fraction, deg: Sequence[int]) -> None:
    """Add ``c * a d(w)`` brought into the normal form ``b dt_x``."""
    passed = 0
    da = word_degree(a, deg)
    for p, x in enumerate(w):
        s = -1 if passed & 1 else 1
        head, tail = w[:p], w[p + 1:]
        # a head dx tail  ->  tail a head dx, moving tail across a form of degree |a|+|head|+|x|+1
        fdeg = da + word_degree(head, deg) + deg[x] + 1
        if word_degree(tail, deg) & 1 and fdeg & 1:
            s = -s
        add_into(out, (tail + a + head, x), c * s)
        passed += deg[x]


def cyclic_differential(structure: AInfinityStructure, q: Mapping[Word, Fraction]) -> Combo:
    return necklace_combo(structure.m.apply(q), structure.deg)


def differential(structure: AInfinityStructure, complex_id: str, degree: int, chain: Mapping[Key, Fraction]) -> Chain:
    """Image of a chain of complex degree ``degree``."""
    if complex_id == HOCH_VV:
        if not chain:
            return {}
        return chain_of(lie_derivation(structure, derivation_of(structure, degree, chain)))
    if complex_id == HOCH_VVDUAL:
        out = one_form_differential(structure.m, chain)
        if not _unit_free(structure, (w for w, _ in out)):
            raise InvariantBreach("L_m left the normalized one-forms")
        return out
    if complex_id == CYCLIC:
        return cyclic_differential(structure, chain)
    raise ValueError(f"unknown complex {complex_id!r}")


# -- slices ---------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexSlice:
    complex_id: str
    degree: int
    weight_cap: int
    domain: Tuple[Key, ...]
    codomain: Tuple[Key, ...]
    matrix: SparseMatrix
    authoritative: bool


def build_slice(structure: AInfinityStructure, complex_id: str, degree: int,
                weight_cap: Optional[int] = None) -> ComplexSlice:
    """Matrix of the differential from ``degree`` to ``degree + 1``."""
    need = max(authoritative_cap(structure, complex_id, degree), authoritative_cap(structure, complex_id, degree + 1))
    cap = need if weight_cap is None else weight_cap
    dom = basis(structure, complex_id, degree, cap)
    cod = basis(structure, complex_id, degree + 1, cap)
    index = {k: i for i, k in enumerate(cod)}
    cols = []
    for key in dom:
        img = differential(structure, complex_id, degree, {key: Fraction(1)})
        col = {}
        for k2, v in img.items():
            if k2 in index:
                col[index[k2]] = v
            elif weight(complex_id, k2) <= cap:
                raise InvariantBreach(f"differential produced {k2!r} outside the enumerated basis")
        cols.append(col)
    return ComplexSlice(complex_id, degree, cap, tuple(dom), tuple(cod),
                        SparseMatrix.from_columns(len(cod), cols), cap >= need)


def check_square_zero_slices(structure: AInfinityStructure, complex_id: str, degree: int,
                             weight_cap: Optional[int] = None) -> bool:
    """``d o d = 0`` from ``degree`` to ``degree + 2``, as an exact matrix product."""
    if weight_cap is None:
        weight_cap = max(authoritative_cap(structure, complex_id, degree + i) for i in range(3))
    a = build_slice(structure, complex_id, degree, weight_cap)
    b = build_slice(structure, complex_id, degree + 1, weight_cap)
    return (b.matrix @ a.matrix).is_zero()


# -- cohomology -----------------------------------------------------------------


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    rank: int
    representatives: Tuple[Chain, ...]
    weight_cap: int
    authoritative: bool
    stabilized: bool


@dataclass(frozen=True)
class CohomologyReport:
    complex_id: str
    degrees: Tuple[DegreeReport, ...]

    def ranks(self) -> Dict[int, int]:
        return {r.degree: r.rank for r in self.degrees}

    def __getitem__(self, degree: int) -> DegreeReport:
        for r in self.degrees:
            if r.degree == degree:
                return r
        raise KeyError(degree)


def _cohomology_at(structure, complex_id, degree, cap):
    inc = build_slice(structure, complex_id, degree - 1, cap)
    out = build_slice(structure, complex_id, degree, cap)
    dom = out.domain
    r_out, ker, _ = rank_kernel_image(out.matrix)
    img = [inc.matrix.column(j) for j in range(inc.matrix.cols)]
    r_in = span_rank(img, len(dom))
    reps = _complement(ker.vectors, img, len(dom))
    chains = tuple({dom[i]: v for i, v in sorted(vec.items())} for vec in reps)
    if len(chains) != len(dom) - r_out - r_in:
        raise InvariantBreach(f"{complex_id} degree {degree}: image not inside kernel")
    return len(chains), chains, inc.authoritative and out.authoritative


def _complement(kernel, image, dim):
    chosen = list(image)
    base = span_rank(chosen, dim)
    reps = []
    for v in kernel:
        if span_rank(chosen + [v], dim) > base:
            chosen.append(v)
            base += 1
            reps.append(v)
    return reps


def cohomology(structure: AInfinityStructure, complex_id: str, degrees: Iterable[int],
               weight_cap: Optional[int] = None, stabilize: bool = True) -> CohomologyReport:
    """Ranks and representative cocycles; with ``stabilize`` the rank is recomputed at cap + 1."""
    reps = []
    for n in degrees:
        need = max(authoritative_cap(structure, complex_id, n + i) for i in (-1, 0, 1))
        cap = need if weight_cap is None else weight_cap
        r, chains, auth = _cohomology_at(structure, complex_id, n, cap)
        stable = True
        if stabilize:
            r2, _, _ = _cohomology_at(structure, complex_id, n, cap + 1)
            stable = r2 == r
        reps.append(DegreeReport(n, r, chains, cap, auth, stable))
    return CohomologyReport(complex_id, tuple(reps))


def is_coboundary(structure: AInfinityStructure, complex_id: str, degree: int, chain: Mapping[Key, Fraction]) -> bool:
    """Exact membership of a cochain of complex degree ``degree`` in the image of d."""
    if not any(chain.values()):
        return True
    inc = build_slice(structure, complex_id, degree - 1)
    index = {k: i for i, k in enumerate(inc.codomain)}
    if any(k not in index for k in chain):
        raise KeyError("cochain has terms outside the enumerated basis")
    v = {index[k]: Fraction(c) for k, c in chain.items() if c}
    cols = [inc.matrix.column(j) for j in range(inc.matrix.cols)]
    return solve_in_span(v, cols, len(inc.codomain)) is not None


# -- bar oracle -----------------------------------------------------------------


@dataclass(frozen=True)
class _Bimodule:
    degrees: Tuple[int, ...]
    left: Dict[int, Dict[int, Dict[int, Fraction]]]
    right: Dict[int, Dict[int, Dict[int, Fraction]]]


def _bimodule(spec: FrobeniusAlgebraSpec, coefficients: str) -> _Bimodule:
    n = len(spec)
    deg = spec.degrees
    left: Dict[int, Dict[int, Dict[int, Fraction]]] = {i: {} for i in range(n)}
    right: Dict[int, Dict[int, Dict[int, Fraction]]] = {i: {} for i in range(n)}
    if coefficients == "V":
        for (i, j), terms in spec.product.items():
            for k, c in terms.items():
                left[i].setdefault(j, {})[k] = c
                right[j].setdefault(i, {})[k] = c
        return _Bimodule(tuple(deg), left, right)
    if coefficients == "Vdual":
        # basis v_k^*; (phi a)(x) = phi(a x), (a phi)(x) = (-1)^{|a|} phi(x a)
        for (i, x), terms in spec.product.items():
            for k, c in terms.items():
                right[i].setdefault(k, {})[x] = right[i].get(k, {}).get(x, 0) + c
        for (x, i), terms in spec.product.items():
            for k, c in terms.items():
                s = -1 if deg[i] & 1 else 1
                left[i].setdefault(k, {})[x] = left[i].get(k, {}).get(x, 0) + s * c
        return _Bimodule(tuple(-d for d in deg), left, right)
    raise ValueError("coefficients must be 'V' or 'Vdual'")


def _bar_basis(spec, mod: _Bimodule, degree: int):
    deg = spec.degrees
    red = [i for i in range(len(spec)) if deg[i] > 0]
    out = []
    # inputs have degree >= 2, so a cochain of n inputs has degree <= max(module) - n
    for n in range(max(mod.degrees) - degree + 1):
        if n and not red:
            break
        for ins in iproduct(red, repeat=n):
            s = sum(deg[i] for i in ins)
            for k, md in enumerate(mod.degrees):
                if n + md - s == degree:
                    out.append((ins, k))
    return sorted(out, key=lambda t: (len(t[0]), t))


def _bar_differential(spec, mod: _Bimodule, f: Tuple[Tuple[int, ...], int], degree: int) -> Dict:
    """Hochschild coboundary of the elementary cochain ``f``: inputs -> module basis element."""
    deg = spec.degrees
    red = [i for i in range(len(spec)) if deg[i] > 0]
    ins, k = f
    n = len(ins)
    out: Dict = {}
    fd = degree - n  # internal degree
    # (a f)(a1 .. a_{n+1}) = (-1)^{|a1||f|} a1 f(a2..)
    for a in red:
        for kk, c in mod.left[a].get(k, {}).items():
            s = -1 if (deg[a] * fd) & 1 else 1
            add_into(out, ((a,) + ins, kk), s * c)
    # f(.. a_i a_{i+1} ..)
    for p in range(n):
        b = ins[p]
        for x in red:
            for y in red:
                c = spec.product.get((x, y), {}).get(b)
                if c:
                    s = -1 if (p + 1) & 1 else 1
                    add_into(out, (ins[:p] + (x, y) + ins[p + 1:], k), s * c)
    # f(a1..an) a_{n+1}
    for a in red:
        for kk, c in mod.right[a].get(k, {}).items():
            s = -1 if (n + 1) & 1 else 1
            add_into(out, (ins + (a,), kk), s * c)
    return clean(out)


def bar_slice(spec: FrobeniusAlgebraSpec, coefficients: str, degree: int) -> Tuple[List, List, SparseMatrix]:
    mod = _bimodule(spec, coefficients)
    dom = _bar_basis(spec, mod, degree)
    cod = _bar_basis(spec, mod, degree + 1)
    index = {k: i for i, k in enumerate(cod)}
    cols = []
    for f in dom:
        col = {}
        for key, v in _bar_differential(spec, mod, f, degree).items():
            if key not in index:
                raise InvariantBreach(f"bar differential left the enumerated basis at {key}")
            col[index[key]] = v
        cols.append(col)
    return dom, cod, SparseMatrix.from_columns(len(cod), cols)


def bar_oracle(spec: FrobeniusAlgebraSpec, coefficients: str, degrees: Iterable[int]) -> Dict[int, int]:
    """Hochschild cohomology ranks from the normalized Hom(Abar^n, M) complex."""
    out = {}
    for n in degrees:
        dom, _, d_out = bar_slice(spec, coefficients, n)
        _, _, d_in = bar_slice(spec, coefficients, n - 1)
        out[n] = len(dom) - rank(d_out) - rank(d_in)
    return out


# -- duality --------------------------------------------------------------------


def duality_map(form: SymplecticForm, chain: Mapping[Key, Fraction]) -> Chain:
    """Contract a HOCH_VV chain with omega: ``A d/dt_k -> sum_j +-omega[k, j] A dt_j``.

    Sends complex degree ``h`` to ``h - d`` and commutes with the differentials.
    """
    deg = form.deg
    by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (i, j), o in form.omega.items():
        by_row.setdefault(i, []).append((j, o))
    out: Chain = {}
    for (k, w), c in chain.items():
        for j, o in by_row.get(k, ()):
            s = -1 if deg[j] & 1 else 1
            add_into(out, (w, j), s * o * Fraction(c))
    return clean(out)


def duality_matrix(structure: AInfinityStructure, form: SymplecticForm, degree: int) -> SparseMatrix:
    """Matrix of the contraction from HOCH_VV degree ``degree`` to HOCH_VVDUAL."""
    shift = form.degree - 2
    dom = basis(structure, HOCH_VV, degree)
    cod = basis(structure, HOCH_VVDUAL, degree + shift)
    index = {k: i for i, k in enumerate(cod)}
    cols = [{index[k]: v for k, v in duality_map(form, {key: Fraction(1)}).items()} for key in dom]
    return SparseMatrix.from_columns(len(cod), cols)


# -- classes and operations --------------------------------------------------------


@dataclass(frozen=True)
class HHClass:
    """A cocycle of HOCH_VV in complex degree ``degree``."""

    degree: int
    representative: Mapping[Key, Fraction]
    complex_id: str = HOCH_VV

    def is_zero(self) -> bool:
        return not any(self.representative.values())


def is_cocycle(structure: AInfinityStructure, complex_id: str, degree: int, chain: Mapping[Key, Fraction]) -> bool:
    return not differential(structure, complex_id, degree, chain)


def same_class(structure: AInfinityStructure, x: HHClass, y: HHClass) -> bool:
    if x.is_zero() or y.is_zero() or x.degree == y.degree:
        deg = y.degree if x.is_zero() else x.degree
        diff = dict(x.representative)
        for k, v in y.representative.items():
            add_into(diff, k, -Fraction(v))
        return is_coboundary(structure, HOCH_VV, deg, diff)
    return False


def gerstenhaber_bracket(structure: AInfinityStructure, x: HHClass, y: HHClass) -> HHClass:
    """Class of the graded commutator of the representing derivations."""
    a = derivation_of(structure, x.degree, x.representative)
    b = derivation_of(structure, y.degree, y.representative)
    return HHClass(x.degree + y.degree - 1, chain_of(a.bracket(b)))


def cup_product(structure: AInfinityStructure, x: HHClass, y: HHClass) -> HHClass:
    """Cup product as the brace ``m{xi, eta}``.

    Each quadratic term ``t_i t_j`` of ``m(t_k)`` has ``t_i`` replaced by ``xi(t_i)``
    and ``t_j`` by ``eta(t_j)``.  The unit letter takes part, so the identity
    cochain acts as the unit.
    """
    a = derivation_of(structure, x.degree, x.representative)
    b = derivation_of(structure, y.degree, y.representative)
    deg = structure.deg
    ea, eb = a.degree, b.degree
    out: Chain = {}
    for k, combo in structure.m.images.items():
        for w, c in combo.items():
            if len(w) != 2:
                raise NotImplementedError("cup product is implemented for quadratic structure fields")
            i, j = w
            left, right = a.images.get(i), b.images.get(j)
            if not left or not right:
                continue
            s = -1 if (eb * deg[i] + ea + ea * eb) & 1 else 1
            for u, cu in left.items():
                for v, cv in right.items():
                    add_into(out, (k, u + v), s * c * cu * cv)
    return HHClass(x.degree + y.degree, clean(out))


def unit_class(structure: AInfinityStructure) -> HHClass:
    """The class of the identity cochain (``t_u -> 1``), unit of the cup product."""
    if structure.unit is None:
        raise ValueError("structure has no unit letter")
    # with the brace signs above the unit is -d/dt_u rather than +d/dt_u
    return HHClass(0, {(structure.unit, ()): Fraction(-1)})


def classes(structure: AInfinityStructure, degree: int) -> List[HHClass]:
    rep = cohomology(structure, HOCH_VV, [degree], stabilize=False)[degree]
    return [HHClass(degree, r) for r in rep.representatives]


# -- symplectic subcomplex -------------------------------------------------------


def hamiltonian_matrix(structure: AInfinityStructure, form: SymplecticForm, degree: int) -> SparseMatrix:
    """Matrix of ``q -> ham(q)`` from CYCLIC degree ``degree`` to HOCH_VV degree ``degree + d``."""
    shift = 2 - form.degree
    dom = basis(structure, CYCLIC, degree)
    cod = basis(structure, HOCH_VV, degree + shift)
    index = {k: i for i, k in enumerate(cod)}
    cols = []
    for q in dom:
        h = hamiltonian({q: Fraction(1)}, form)
        cols.append({index[k]: v for k, v in chain_of(h).items()})
    return SparseMatrix.from_columns(len(cod), cols)


def symplectic_dimension(structure: AInfinityStructure, form: SymplecticForm, degree: int) -> int:
    """Dimension of the symplectic derivations in HOCH_VV degree ``degree``."""
    dom = basis(structure, HOCH_VV, degree)
    cols = []
    keys: Dict = {}
    for key in dom:
        xi = derivation_of(structure, degree, {key: Fraction(1)})
        img = xi.apply(form.omega_tensor)
        cols.append({keys.setdefault(w, len(keys)): v for w, v in img.items()})
    if not keys:
        return len(dom)
    return len(dom) - rank(SparseMatrix.from_columns(len(keys), cols))


def class_coordinates(structure: AInfinityStructure, complex_id: str, degree: int, chain: Mapping[Key, Fraction],
                      representatives: Sequence[Mapping[Key, Fraction]]) -> Optional[List[Fraction]]:
    """Coordinates of a cocycle in the given representative basis, modulo coboundaries.

    Returns None if the chain is not a combination of the representatives plus a coboundary.
    """
    inc = build_slice(structure, complex_id, degree - 1)
    cod = inc.codomain
    index = {k: i for i, k in enumerate(cod)}
    if any(k not in index for k in chain):
        raise KeyError("chain has terms outside the enumerated basis")
    vecs = [{index[k]: Fraction(v) for k, v in r.items()} for r in representatives]
    vecs += [inc.matrix.column(j) for j in range(inc.matrix.cols)]
    sol = solve_in_span({index[k]: Fraction(v) for k, v in chain.items() if v}, vecs, len(cod))
    if sol is None:
        return None
    return sol[:len(representatives)]
