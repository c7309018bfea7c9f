"""Frobenius algebra data, structure vector fields and the symplectic form.

The free algebra is generated by letters ``t_i`` dual to the basis ``v_i`` of the
cohomology algebra (unit included), with ``deg t_i = 1 - |v_i|``.  With this
grading the structure field ``m`` dual to the product has degree +1.  Reduced
letters (everything but the unit letter) have degree <= -1 on simply-connected
inputs, which makes every word space of fixed degree finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as iproduct
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graded import Combo, GradedBasis, Word, add_into, clean, necklaces_of_degree, shuffle, word_degree
from .linalg import SparseMatrix, rank_kernel_image, solve_in_span


class ValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(f.message for f in report.failures))
        self.report = report


@dataclass(frozen=True)
class Failure:
    kind: str
    witness: Tuple
    message: str


@dataclass
class ValidationReport:
    failures: List[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, kind: str, witness: Tuple, message: str) -> None:
        self.failures.append(Failure(kind, witness, message))


@dataclass(frozen=True)
class FrobeniusAlgebraSpec:
    """Graded commutative algebra with an invariant pairing of degree ``dimension``.

    ``product[(i, j)]`` maps ``k`` to the structure constant of ``v_i v_j`` on ``v_k``;
    ``pairing[(i, j)]`` is ``<v_i, v_j>``.  Missing keys are zero.
    """

    basis: GradedBasis
    dimension: int
    product: Mapping[Tuple[int, int], Mapping[int, Fraction]]
    pairing: Mapping[Tuple[int, int], Fraction]
    name: str = ""

    def __post_init__(self):
        prod = {}
        for key, terms in self.product.items():
            t = {int(k): Fraction(c) for k, c in terms.items() if Fraction(c)}
            if t:
                prod[tuple(key)] = t
        pair = {tuple(k): Fraction(v) for k, v in self.pairing.items() if Fraction(v)}
        object.__setattr__(self, "product", prod)
        object.__setattr__(self, "pairing", pair)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return self.basis.degrees

    def __len__(self):
        return len(self.basis)

    def mul(self, i: int, j: int) -> Dict[int, Fraction]:
        return dict(self.product.get((i, j), {}))

    def pair(self, i: int, j: int) -> Fraction:
        return self.pairing.get((i, j), Fraction(0))

    def unit_index(self) -> Optional[int]:
        zero = [i for i, d in enumerate(self.degrees) if d == 0]
        return zero[0] if len(zero) == 1 else None

    def mul_vec(self, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.product.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v}

    def pair_vec(self, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Fraction:
        return sum((a * b * self.pair(i, j) for i, a in x.items() for j, b in y.items()), Fraction(0))

    def with_pairing_scaled(self, s) -> "FrobeniusAlgebraSpec":
        s = Fraction(s)
        return FrobeniusAlgebraSpec(self.basis, self.dimension, self.product,
                                    {k: v * s for k, v in self.pairing.items()}, self.name)


def validate_frobenius(spec: FrobeniusAlgebraSpec) -> ValidationReport:
    """Check every algebraic invariant exactly; each failure carries a witness."""
    rep = ValidationReport()
    deg = spec.degrees
    n = len(spec)
    for (i, j), terms in spec.product.items():
        for k in terms:
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                rep.add("index", (i, j, k), f"product index out of range in ({i}, {j}) -> {k}")
                return rep
            if deg[k] != deg[i] + deg[j]:
                rep.add("product-degree", (i, j, k), f"v{i} v{j} has a component on v{k} of the wrong degree")
    for (i, j) in spec.pairing:
        if not (0 <= i < n and 0 <= j < n):
            rep.add("index", (i, j), f"pairing index out of range ({i}, {j})")
            return rep
        if deg[i] + deg[j] != spec.dimension:
            rep.add("pairing-degree", (spec.basis.labels[i], spec.basis.labels[j]),
                    f"<{spec.basis.labels[i]}, {spec.basis.labels[j]}> nonzero but degrees do not add to {spec.dimension}")
    if any(d < 0 for d in deg):
        rep.add("negative-degree", tuple(i for i, d in enumerate(deg) if d < 0), "negative degree basis elements")
    zero = [i for i, d in enumerate(deg) if d == 0]
    if len(zero) != 1:
        rep.add("connectivity", tuple(zero), "H^0 must be one-dimensional")
    if any(d == 1 for d in deg):
        rep.add("simple-connectivity", tuple(i for i, d in enumerate(deg) if d == 1), "H^1 must vanish")
    e = {i: Fraction(1) for i in zero[:1]}
    basis_vecs = [{i: Fraction(1)} for i in range(n)]
    if zero:
        for i in range(n):
            x = basis_vecs[i]
            if spec.mul_vec(e, x) != x or spec.mul_vec(x, e) != x:
                rep.add("unit", (i,), f"v{zero[0]} is not a two-sided unit on v{i}")
    for i in range(n):
        for j in range(n):
            a = spec.mul(i, j)
            b = spec.mul(j, i)
            s = -1 if deg[i] * deg[j] % 2 else 1
            if a != {k: s * v for k, v in b.items()}:
                rep.add("commutativity", (i, j), f"v{i} v{j} != (-1)^(|v{i}||v{j}|) v{j} v{i}")
    for i, j, k in iproduct(range(n), repeat=3):
        left = spec.mul_vec(spec.mul(i, j), basis_vecs[k])
        right = spec.mul_vec(basis_vecs[i], spec.mul(j, k))
        if left != right:
            rep.add("associativity", (i, j, k), f"(v{i} v{j}) v{k} != v{i} (v{j} v{k})")
        if spec.pair_vec(spec.mul(i, j), basis_vecs[k]) != spec.pair_vec(basis_vecs[i], spec.mul(j, k)):
            rep.add("invariance", (i, j, k), f"<v{i} v{j}, v{k}> != <v{i}, v{j} v{k}>")
    for i in range(n):
        for j in range(n):
            s = -1 if deg[i] * deg[j] % 2 else 1
            if spec.pair(i, j) != s * spec.pair(j, i):
                rep.add("graded-symmetry", (i, j), f"<v{i}, v{j}> is not graded symmetric")
    gram = SparseMatrix(n, n, {k: v for k, v in spec.pairing.items()})
    r, ker, _ = rank_kernel_image(gram)
    if r < n:
        support = sorted({i for v in ker.vectors for i in v})
        labels = tuple(spec.basis.labels[i] for i in support)
        rep.add("nondegeneracy", labels, f"pairing degenerate; radical supported on {', '.join(labels)}")
    return rep


# -- derivations --------------------------------------------------------------


class Derivation:
    """Continuous derivation of the completed free algebra, stored by generator images.

    ``images[k]`` is the combination of words that ``t_k`` is sent to.
    """

    __slots__ = ("deg", "degree", "images")

    def __init__(self, deg: Sequence[int], degree: int, images: Mapping[int, Combo] = ()):
        self.deg = tuple(deg)
        self.degree = degree
        self.images: Dict[int, Combo] = {}
        for k, combo in dict(images).items():
            c = clean(combo)
            if c:
                self.images[k] = c
        for k, combo in self.images.items():
            for w in combo:
                if word_degree(w, self.deg) != self.deg[k] + degree:
                    raise ValueError(f"image word {w} of t{k} has the wrong degree for a degree-{degree} derivation")

    @classmethod
    def from_terms(cls, deg, degree, terms: Mapping[Tuple[int, Word], Fraction]) -> "Derivation":
        images: Dict[int, Combo] = {}
        for (k, w), c in terms.items():
            add_into(images.setdefault(k, {}), tuple(w), Fraction(c))
        return cls(deg, degree, images)

    def terms(self) -> Dict[Tuple[int, Word], Fraction]:
        return {(k, w): c for k, combo in self.images.items() for w, c in combo.items()}

    def is_zero(self) -> bool:
        return not self.images

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and self.terms() == other.terms() and (
            self.is_zero() or self.degree == other.degree)

    def __repr__(self):
        parts = [f"{c}*{w}@{k}" for (k, w), c in sorted(self.terms().items())]
        return f"Derivation(deg={self.degree}, {' + '.join(parts) or '0'})"

    def weights(self) -> List[int]:
        return sorted({len(w) for combo in self.images.values() for w in combo})

    def weight_component(self, weight: int) -> "Derivation":
        return Derivation(self.deg, self.degree,
                          {k: {w: c for w, c in combo.items() if len(w) == weight} for k, combo in self.images.items()})

    def restrict_letters(self, letters: Iterable[int]) -> "Derivation":
        """Drop generators outside ``letters`` and every image word using such a letter."""
        ls = set(letters)
        return Derivation(self.deg, self.degree,
                          {k: {w: c for w, c in combo.items() if set(w) <= ls}
                           for k, combo in self.images.items() if k in ls})

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise ValueError("cannot add derivations of different degrees")
        images = {k: dict(v) for k, v in self.images.items()}
        for k, combo in other.images.items():
            acc = images.setdefault(k, {})
            for w, c in combo.items():
                add_into(acc, w, c)
        return Derivation(self.deg, self.degree, images)

    def scale(self, s) -> "Derivation":
        s = Fraction(s)
        return Derivation(self.deg, self.degree, {k: {w: c * s for w, c in v.items()} for k, v in self.images.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def apply_word(self, w: Word, acc: Optional[Combo] = None, coeff=Fraction(1)) -> Combo:
        out: Combo = {} if acc is None else acc
        odd = self.degree & 1
        passed = 0
        for p, a in enumerate(w):
            img = self.images.get(a)
            if img:
                s = -coeff if (odd and passed & 1) else coeff
                pre, post = w[:p], w[p + 1:]
                for u, c in img.items():
                    add_into(out, pre + u + post, s * c)
            passed += self.deg[a]
        return out

    def apply(self, combo: Mapping[Word, Fraction]) -> Combo:
        out: Combo = {}
        for w, c in combo.items():
            self.apply_word(w, out, c)
        return clean(out)

    def compose_on_generators(self, other: "Derivation") -> Dict[int, Combo]:
        """Images of ``self o other`` on generators (not itself a derivation)."""
        return {k: self.apply(combo) for k, combo in other.images.items()}

    def bracket(self, other: "Derivation") -> "Derivation":
        """Graded commutator ``[self, other]``."""
        a = self.compose_on_generators(other)
        b = other.compose_on_generators(self)
        s = -1 if (self.degree * other.degree) & 1 else 1
        images: Dict[int, Combo] = {k: dict(v) for k, v in a.items()}
        for k, combo in b.items():
            acc = images.setdefault(k, {})
            for w, c in combo.items():
                add_into(acc, w, -s * c)
        if self.is_zero() or other.is_zero():
            return Derivation(self.deg, self.degree + other.degree, {})
        return Derivation(self.deg, self.degree + other.degree, images)

    def square(self, weight_cap: Optional[int] = None) -> Dict[int, Combo]:
        """``(self o self)`` on generators, optionally truncated at a word length."""
        out = self.compose_on_generators(self)
        if weight_cap is not None:
            out = {k: {w: c for w, c in v.items() if len(w) <= weight_cap} for k, v in out.items()}
        return {k: v for k, v in out.items() if v}


# -- structures ---------------------------------------------------------------


def product_sign(deg_i: int, deg_j: int) -> int:
    """Sign attached to ``t_i t_j`` in the dual of ``v_i v_j`` (cohomological degrees)."""
    return -1 if deg_i & 1 else 1


def structure_field(degrees: Sequence[int], product: Mapping[Tuple[int, int], Mapping[int, Fraction]]) -> Derivation:
    """Quadratic vector field dual to a bilinear product on a graded basis."""
    deg = tuple(1 - d for d in degrees)
    images: Dict[int, Combo] = {}
    for (i, j), terms in product.items():
        for k, c in terms.items():
            add_into(images.setdefault(k, {}), (i, j), product_sign(degrees[i], degrees[j]) * Fraction(c))
    return Derivation(deg, 1, images)


@dataclass(frozen=True)
class AInfinityStructure:
    """Structure field on the free algebra over all letters (unit letter included)."""

    m: Derivation
    unit: Optional[int]
    minimal: bool = True
    cinfinity: bool = True

    @property
    def deg(self) -> Tuple[int, ...]:
        return self.m.deg

    @property
    def letters(self) -> Tuple[int, ...]:
        return tuple(range(len(self.deg)))

    @property
    def reduced_letters(self) -> Tuple[int, ...]:
        return tuple(i for i in self.letters if i != self.unit)

    def reduced(self) -> Derivation:
        """The structure field with the unit letter and all unit terms removed."""
        return self.m.restrict_letters(self.reduced_letters)


@dataclass(frozen=True)
class SymplecticForm:
    """``omega[(i, j)] = <s v_i, s v_j>`` on letters, plus ``[omega]`` and the inverse bivector."""

    deg: Tuple[int, ...]
    omega: Mapping[Tuple[int, int], Fraction]
    omega_tensor: Combo
    poisson: Mapping[Tuple[int, int], Fraction]

    @property
    def degree(self) -> int:
        """Degree of the pairing on letters (``deg t_i + deg t_j`` for paired letters)."""
        (i, j) = next(iter(self.omega))
        return self.deg[i] + self.deg[j]


def symplectic_form(spec: FrobeniusAlgebraSpec) -> SymplecticForm:
    degrees = spec.degrees
    deg = tuple(1 - d for d in degrees)
    n = len(spec)
    omega = {}
    for (i, j), v in spec.pairing.items():
        omega[(i, j)] = (-1 if degrees[i] & 1 else 1) * v
    tensor: Combo = {}
    for (i, j), v in omega.items():
        add_into(tensor, (i, j), v)
        add_into(tensor, (j, i), -(-1 if deg[i] * deg[j] & 1 else 1) * v)
    # inverse matrix: sum_j omega[i, j] poisson[j, k] = delta_ik
    inv = _invert(SparseMatrix(n, n, dict(omega)).to_dense())
    poisson = {(i, j): inv[i][j] for i in range(n) for j in range(n) if inv[i][j]}
    return SymplecticForm(deg, omega, clean(tensor), poisson)


def _invert(a: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            raise ValueError("matrix is singular")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def from_frobenius(spec: FrobeniusAlgebraSpec) -> Tuple[AInfinityStructure, SymplecticForm]:
    rep = validate_frobenius(spec)
    if not rep.ok:
        raise ValidationError(rep)
    m = structure_field(spec.degrees, spec.product)
    structure = AInfinityStructure(m=m, unit=spec.unit_index(), minimal=True, cinfinity=check_cinfinity(m))
    form = symplectic_form(spec)
    return structure, form


def check_square_zero(m: Derivation, weight_cap: Optional[int] = None) -> Tuple[bool, Optional[Tuple[int, Word]]]:
    sq = m.square(weight_cap)
    for k in sorted(sq):
        w = min(sq[k], key=lambda u: (len(u), u))
        return False, (k, w)
    return True, None


def check_cinfinity(m: Derivation) -> bool:
    """True iff every multilinear component of ``m`` kills all proper shuffles."""
    deg = m.deg
    for combo in m.images.values():
        for x in combo:
            n = len(x)
            # (u, v) can only pair nontrivially with the component if u, v split a support word
            for r in range(1, n):
                for pos in combinations(range(n), r):
                    u = tuple(x[p] for p in pos)
                    v = tuple(x[p] for p in range(n) if p not in pos)
                    sh = shuffle(u, v, deg)
                    if sum(combo.get(y, 0) * c for y, c in sh.items()):
                        return False
    return True


def is_symplectic(xi: Derivation, form: SymplecticForm) -> bool:
    return not xi.apply(form.omega_tensor)


# -- Hamiltonian correspondence -------------------------------------------------


def cyclic_derivative(q: Mapping[Word, Fraction], letter: int, deg: Sequence[int]) -> Combo:
    """Cyclic partial derivative of a combination of (necklace) words.

    Each occurrence of ``letter`` is rotated to the front with its Koszul sign and
    then removed.
    """
    out: Combo = {}
    for w, c in q.items():
        n = len(w)
        for p in range(n):
            if w[p] != letter:
                continue
            head, tail = w[:p], w[p:]
            s = -1 if (word_degree(head, deg) & 1) and (word_degree(tail, deg) & 1) else 1
            add_into(out, tail[1:] + head, s * c)
    return clean(out)


def hamiltonian(q: Mapping[Word, Fraction], form: SymplecticForm) -> Derivation:
    """Vector field of a necklace: ``t_i -> sum_j poisson[i, j] * d_j q``."""
    deg = form.deg
    q = {w: Fraction(c) for w, c in q.items() if c}
    if not q:
        return Derivation(deg, 0, {})
    qdeg = {word_degree(w, deg) for w in q}
    if len(qdeg) != 1:
        raise ValueError("necklace combination is not homogeneous")
    (d,) = qdeg
    images: Dict[int, Combo] = {}
    derivs = {j: cyclic_derivative(q, j, deg) for j in range(len(deg))}
    for (i, j), p in form.poisson.items():
        dq = derivs.get(j)
        if not dq:
            continue
        acc = images.setdefault(i, {})
        for w, c in dq.items():
            add_into(acc, w, hamiltonian_sign(deg[i], deg[j], d) * p * c)
    return Derivation(deg, d - form.degree, images)


def hamiltonian_sign(deg_i: int, deg_j: int, qdeg: int) -> int:
    # chosen so that every Hamiltonian kills [omega] and ham(L_m q) = [m, ham q]
    return -1 if (deg_j * (1 + deg_i + qdeg)) & 1 else 1


def necklace_bracket(q1: Mapping[Word, Fraction], q2: Mapping[Word, Fraction], form: SymplecticForm,
                     letters: Sequence[int], max_len: Optional[int] = None) -> Combo:
    """Necklace combination whose Hamiltonian is ``[ham q1, ham q2]``."""
    x, y = hamiltonian(q1, form), hamiltonian(q2, form)
    target = x.bracket(y)
    if target.is_zero():
        return {}
    deg = form.deg
    qdeg = target.degree + form.degree
    cap = -qdeg if max_len is None else max_len
    basis = necklaces_of_degree(letters, deg, qdeg, cap)
    cols = [hamiltonian({w: Fraction(1)}, form).terms() for w in basis]
    keys = sorted({k for col in cols for k in col} | set(target.terms()))
    index = {k: i for i, k in enumerate(keys)}
    vecs = [{index[k]: v for k, v in col.items()} for col in cols]
    tv = {index[k]: v for k, v in target.terms().items()}
    sol = solve_in_span(tv, vecs, len(keys))
    if sol is None:
        raise ArithmeticError("commutator is not Hamiltonian at this truncation; raise the weight cap")
    return clean({w: c for w, c in zip(basis, sol)})
