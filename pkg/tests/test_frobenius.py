from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from stringhom.frobenius import (Derivation, FrobeniusAlgebraSpec, ValidationError, check_cinfinity,
                                 check_square_zero, from_frobenius, hamiltonian, is_symplectic, necklace_bracket,
                                 structure_field, validate_frobenius)
from stringhom.graded import GradedBasis, necklaces_of_degree, word_degree
from stringhom.hochschild import HOCH_VV, CYCLIC, basis, cyclic_differential, derivation_of, lie_derivation
from stringhom.spaces import builtin, complex_projective, point, product_space, sphere

F = Fraction


def s2_spec(pair=1):
    return FrobeniusAlgebraSpec(GradedBasis(("1", "x"), (0, 2)), 2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}},
                                {(0, 1): pair, (1, 0): pair}, "S2")


def test_validate_s2():
    assert validate_frobenius(s2_spec()).ok


def test_degenerate_pairing_names_x():
    rep = validate_frobenius(s2_spec(pair=0))
    assert not rep.ok
    witnesses = [f.witness for f in rep.failures if f.kind == "nondegeneracy"]
    assert witnesses and "x" in witnesses[0]


def test_validate_s3xs3_by_hand():
    gb = GradedBasis(("1", "a", "b", "ab"), (0, 3, 3, 6))
    prod = {(0, i): {i: 1} for i in range(4)}
    prod.update({(i, 0): {i: 1} for i in range(1, 4)})
    prod[(1, 2)] = {3: 1}
    prod[(2, 1)] = {3: -1}
    pair = {(0, 3): 1, (3, 0): 1, (1, 2): 1, (2, 1): -1}
    spec = FrobeniusAlgebraSpec(gb, 6, prod, pair, "S3xS3")
    assert validate_frobenius(spec).ok
    assert spec.product == builtin("s3xs3").product
    assert spec.pairing == builtin("s3xs3").pairing


def test_validation_catches_degree_and_connectivity():
    bad = FrobeniusAlgebraSpec(GradedBasis(("1", "y", "x"), (0, 1, 2)), 2,
                               {(0, 0): {0: 1}, (0, 2): {2: 1}, (2, 0): {2: 1}}, {(0, 2): 1, (2, 0): 1, (0, 1): 1})
    kinds = {f.kind for f in validate_frobenius(bad).failures}
    assert {"pairing-degree", "simple-connectivity"} <= kinds


def test_reduced_structure_of_spheres_is_zero():
    for n in (2, 3, 5):
        structure, _ = from_frobenius(sphere(n))
        assert structure.reduced().is_zero()
        assert structure.deg == (1, 1 - n)


def test_cp2_structure_field():
    structure, _ = from_frobenius(complex_projective(2))
    assert structure.deg == (1, -1, -3)
    assert structure.m.images[2][(1, 1)] == 1


def test_s3xs3_structure_field():
    structure, _ = from_frobenius(builtin("s3xs3"))
    red = structure.reduced()
    top = red.images[3]
    assert set(top) == {(1, 2), (2, 1)} and top[(1, 2)] == -top[(2, 1)]


def test_flipped_cp2_sign_breaks_square_zero():
    spec = complex_projective(2)
    prod = {k: dict(v) for k, v in spec.product.items()}
    prod[(1, 0)][1] = -prod[(1, 0)][1]
    ok, witness = check_square_zero(structure_field(spec.degrees, prod))
    assert not ok and witness is not None


def test_zero_field_predicates():
    m = Derivation((1, -1), 1, {})
    assert check_square_zero(m)[0]
    assert check_cinfinity(m)
    _, form = from_frobenius(sphere(2))
    assert is_symplectic(Derivation(form.deg, 0, {}), form)


def test_noncommutative_product_is_not_cinfinity():
    # upper triangular 2x2 matrices e11, e12, e22 in degree 0
    prod = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 2): {1: 1}, (2, 2): {2: 1}}
    assert not check_cinfinity(structure_field((0, 0, 0), prod))


@pytest.mark.parametrize("name", ["s2", "s3", "cp2", "s3xs3"])
def test_from_frobenius_outputs_pass_checks(name):
    structure, form = from_frobenius(builtin(name))
    assert check_square_zero(structure.m)[0]
    assert check_cinfinity(structure.m)
    assert is_symplectic(structure.m, form)


def _linear(form, a, b, c, e):
    # t_a -> a t_a + b t_b, t_b -> c t_a + e t_b on the S3xS3 letters 1, 2
    return Derivation(form.deg, 0, {1: {(1,): F(a), (2,): F(b)}, 2: {(1,): F(c), (2,): F(e)}})


def test_traceless_linear_fields_are_symplectic():
    _, form = from_frobenius(builtin("s3xs3"))
    for a, b, c in product(range(-2, 3), repeat=3):
        assert is_symplectic(_linear(form, a, b, c, -a), form)
    assert not is_symplectic(_linear(form, 1, 0, 0, 0), form)


def test_hamiltonian_examples():
    _, form = from_frobenius(builtin("s3xs3"))
    xi = hamiltonian({(1, 2): F(1)}, form)
    assert not xi.is_zero() and xi.weights() == [1]
    assert is_symplectic(xi, form)
    assert hamiltonian({}, form).is_zero()
    _, f2 = from_frobenius(sphere(2))
    const = hamiltonian({(1,): F(1)}, f2)
    assert const.weights() == [0] and is_symplectic(const, f2)


def test_necklace_bracket_examples():
    s3, form = from_frobenius(builtin("s3xs3"))
    red = s3.reduced_letters
    e, f = {(1, 1): F(1)}, {(2, 2): F(1)}
    h = necklace_bracket(e, f, form, red)
    assert set(h) == {(1, 2)}
    assert necklace_bracket(e, e, form, red) == {}
    assert necklace_bracket(e, {}, form, red) == {}


def _s3xs3_necklaces():
    structure, form = from_frobenius(builtin("s3xs3"))
    deg = structure.deg
    out = []
    for qd in range(-2, -9, -1):
        out.extend(necklaces_of_degree(structure.reduced_letters, deg, qd, -qd))
    return structure, form, out


S3S3, S3S3_FORM, S3S3_NECKLACES = _s3xs3_necklaces()
necklace = st.sampled_from(S3S3_NECKLACES)


def _ham_degree(q):
    return word_degree(q, S3S3_FORM.deg) - S3S3_FORM.degree


def _lin(*pairs):
    out = {}
    for s, combo in pairs:
        for k, v in combo.items():
            out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v}


@given(necklace, necklace)
def test_necklace_bracket_antisymmetric(p, q):
    red = S3S3.reduced_letters
    s = -1 if _ham_degree(p) * _ham_degree(q) & 1 else 1
    assert necklace_bracket({p: F(1)}, {q: F(1)}, S3S3_FORM, red) == \
        _lin((-s, necklace_bracket({q: F(1)}, {p: F(1)}, S3S3_FORM, red)))


@given(necklace, necklace, necklace)
def test_necklace_bracket_jacobi(p, q, r):
    red = S3S3.reduced_letters

    def br(x, y):
        return necklace_bracket(x, y, S3S3_FORM, red)

    P, Q, R = {p: F(1)}, {q: F(1)}, {r: F(1)}
    s = -1 if _ham_degree(p) * _ham_degree(q) & 1 else 1
    assert br(P, br(Q, R)) == _lin((1, br(br(P, Q), R)), (s, br(Q, br(P, R))))


@given(necklace, necklace)
def test_commutator_of_symplectic_fields_is_symplectic(p, q):
    x, y = hamiltonian({p: F(1)}, S3S3_FORM), hamiltonian({q: F(1)}, S3S3_FORM)
    assert is_symplectic(x.bracket(y), S3S3_FORM)


@pytest.mark.parametrize("name", ["s2", "s3", "cp2", "s3xs3"])
def test_hamiltonian_is_chain_map(name):
    structure, form = from_frobenius(builtin(name))
    for c in range(-9, 0):
        for q in basis(structure, CYCLIC, c):
            left = hamiltonian(cyclic_differential(structure, {q: F(1)}), form)
            right = lie_derivation(structure, hamiltonian({q: F(1)}, form))
            assert left.terms() == right.terms()


def test_builtin_spaces():
    assert [len(builtin(n)) for n in ("s2", "s3", "cp2", "s3xs3")] == [2, 2, 3, 4]
    with pytest.raises(ValueError):
        sphere(1)
    with pytest.raises(KeyError):
        builtin("torus")
    for n in range(1, 7):
        assert validate_frobenius(complex_projective(n)).ok
    cp1 = complex_projective(1)
    assert cp1.degrees == sphere(2).degrees and cp1.product == sphere(2).product


def test_product_with_point_is_identity():
    a = sphere(3)
    p = product_space(a, point())
    assert p.degrees == a.degrees and p.product == a.product and p.pairing == a.pairing


def test_product_space_s3xs3():
    spec = product_space(sphere(3), sphere(3))
    assert validate_frobenius(spec).ok
    a, b, ab = 1, 2, 3
    assert spec.mul(a, b) == {ab: 1} and spec.mul(b, a) == {ab: -1}


def test_from_frobenius_rejects_invalid():
    with pytest.raises(ValidationError):
        from_frobenius(s2_spec(pair=0))


def test_derivation_degree_is_enforced():
    with pytest.raises(ValueError):
        Derivation((1, -1), 0, {1: {(1, 1): F(1)}})
    structure, _ = from_frobenius(sphere(3))
    # complex degree 1 holds the degree-0 field t_x -> t_x
    xi = derivation_of(structure, 1, {(1, (1,)): F(1)})
    assert xi.degree == 0
    assert (1, (1,)) in basis(structure, HOCH_VV, 1)
