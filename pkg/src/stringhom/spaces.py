"""Built-in Poincare duality algebras and ways to combine them."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

from .frobenius import FrobeniusAlgebraSpec, ValidationError, validate_frobenius
from .graded import GradedBasis


def _checked(spec: FrobeniusAlgebraSpec) -> FrobeniusAlgebraSpec:
    rep = validate_frobenius(spec)
    if not rep.ok:
        raise ValidationError(rep)
    return spec


def point() -> FrobeniusAlgebraSpec:
    return FrobeniusAlgebraSpec(GradedBasis(("1",), (0,)), 0, {(0, 0): {0: 1}}, {(0, 0): 1}, "point")


def truncated_polynomial(deg_x: int, top: int, name: str) -> FrobeniusAlgebraSpec:
    """Q[x]/(x^(top+1)) with |x| = deg_x and <x^i, x^(top-i)> = 1."""
    labels = tuple("1" if i == 0 else ("x" if i == 1 else f"x^{i}") for i in range(top + 1))
    degrees = tuple(i * deg_x for i in range(top + 1))
    product = {(i, j): {i + j: 1} for i in range(top + 1) for j in range(top + 1) if i + j <= top}
    pairing = {(i, top - i): 1 for i in range(top + 1)}
    return FrobeniusAlgebraSpec(GradedBasis(labels, degrees), top * deg_x, product, pairing, name)


def sphere(n: int) -> FrobeniusAlgebraSpec:
    if n < 2:
        raise ValueError(f"S^{n} is not simply connected; need n >= 2")
    return _checked(truncated_polynomial(n, 1, f"S{n}"))


def complex_projective(n: int) -> FrobeniusAlgebraSpec:
    if n < 1:
        raise ValueError("CP^n needs n >= 1")
    return _checked(truncated_polynomial(2, n, f"CP{n}"))


def product_space(a: FrobeniusAlgebraSpec, b: FrobeniusAlgebraSpec) -> FrobeniusAlgebraSpec:
    """Graded tensor product of algebras and pairings (Koszul signs throughout)."""
    da, db = a.degrees, b.degrees
    idx = [(i, j) for i in range(len(a)) for j in range(len(b))]
    # unit first, then by degree; within a degree the first factor varies fastest
    idx.sort(key=lambda ij: (da[ij[0]] + db[ij[1]], ij[1], ij[0]))
    pos = {ij: k for k, ij in enumerate(idx)}

    def label(i, j):
        la, lb = a.basis.labels[i], b.basis.labels[j]
        if la == "1":
            return lb if lb != "1" else "1"
        if lb == "1":
            return la
        return f"{la}*{lb}"

    labels = [label(i, j) for i, j in idx]
    if len(set(labels)) != len(labels):
        labels = [f"{a.basis.labels[i]}|{b.basis.labels[j]}" for i, j in idx]
    degrees = tuple(da[i] + db[j] for i, j in idx)
    product: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for (i1, j1) in idx:
        for (i2, j2) in idx:
            s = -1 if (db[j1] * da[i2]) & 1 else 1
            out: Dict[int, Fraction] = {}
            for k1, c1 in a.mul(i1, i2).items():
                for k2, c2 in b.mul(j1, j2).items():
                    out[pos[(k1, k2)]] = out.get(pos[(k1, k2)], 0) + s * c1 * c2
            if out:
                product[(pos[(i1, j1)], pos[(i2, j2)])] = out
    pairing = {}
    for (i1, j1) in idx:
        for (i2, j2) in idx:
            s = -1 if (db[j1] * da[i2]) & 1 else 1
            v = s * a.pair(i1, i2) * b.pair(j1, j2)
            if v:
                pairing[(pos[(i1, j1)], pos[(i2, j2)])] = v
    name = f"{a.name}x{b.name}" if a.name and b.name else ""
    return _checked(FrobeniusAlgebraSpec(GradedBasis(tuple(labels), degrees), a.dimension + b.dimension,
                                         product, pairing, name))


def relabelled(spec: FrobeniusAlgebraSpec, labels) -> FrobeniusAlgebraSpec:
    return FrobeniusAlgebraSpec(GradedBasis(tuple(labels), spec.degrees), spec.dimension, spec.product,
                                spec.pairing, spec.name)


BUILTINS = {
    "s2": lambda: sphere(2),
    "s3": lambda: sphere(3),
    "cp2": lambda: complex_projective(2),
    "s3xs3": lambda: relabelled(product_space(sphere(3), sphere(3)), ("1", "a", "b", "ab")),
}


def builtin(name: str) -> FrobeniusAlgebraSpec:
    try:
        spec = BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin space {name!r}; choose from {', '.join(sorted(BUILTINS))}") from None
    return spec
