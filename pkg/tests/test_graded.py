from itertools import permutations, product

from hypothesis import given, strategies as st

from stringhom.graded import (GradedBasis, canonicalize_necklace, koszul_sign, necklaces_of_degree, norm, rotate,
                              rotations, shuffle, word_degree, words_of_degree)
from stringhom.linalg import SparseMatrix
from stringhom.negcyclic import one_minus_z

# letter degrees used by the generic properties; all <= -1 as in the complexes
DEG = (-1, -2, -3, -1)

words = st.lists(st.integers(0, len(DEG) - 1), min_size=1, max_size=5).map(tuple)


def test_koszul_examples():
    assert koszul_sign((0, 1), (3, 3)) == 1
    assert koszul_sign((1, 0), (3, 3)) == -1
    assert koszul_sign((1, 0), (2, 3)) == 1


def test_shuffle_examples():
    deg = (1, 1)
    assert shuffle((0,), (1,), deg) == {(0, 1): 1, (1, 0): -1}
    assert shuffle((0, 1), (), deg) == {(0, 1): 1}
    assert shuffle((0,), (0,), deg) == {}


def test_rotate_examples():
    assert rotate((0, 1), (2, 2)) == ((1, 0), 1)
    assert rotate((0, 0), (1,)) == ((0, 0), -1)
    assert rotate((0,), (1,)) == ((0,), 1)


def test_norm_examples():
    assert norm((0,), (1,)) == {(0,): 1}
    assert norm((0, 0), (1,)) == {}
    assert norm((0, 1), (2, 2)) == {(0, 1): 1, (1, 0): 1}


def test_canonicalize_examples():
    assert canonicalize_necklace((0, 0), (1,)) is None
    assert canonicalize_necklace((1, 0), (2, 2)) == ((0, 1), 1)
    assert canonicalize_necklace((0,), (1,)) == ((0,), 1)


def test_enumeration_examples():
    # one letter of degree -1: the only word of degree -3 is ttt
    assert words_of_degree((0,), (-1,), -3, 3) == [(0, 0, 0)]
    assert necklaces_of_degree((0,), (-1,), -2, 2) == []
    # two letters of degree -2 (reduced letters of S3xS3): plain words of degree -4
    assert sorted(words_of_degree((0, 1), (-2, -2), -4, 4)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_graded_basis_labels():
    gb = GradedBasis(("1", "x"), (0, 2))
    assert gb.index("x") == 1 and len(gb) == 2


@given(st.permutations(range(4)), st.permutations(range(4)), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_koszul_sign_composes(s, t, degs):
    # rearranging by s and then by t equals rearranging by s o t
    degs_s = [degs[i] for i in s]
    st_ = [s[i] for i in t]
    assert koszul_sign(st_, degs) == koszul_sign(s, degs) * koszul_sign(t, degs_s)


@given(words, words)
def test_shuffle_graded_commutative(a, b):
    s = -1 if word_degree(a, DEG) * word_degree(b, DEG) & 1 else 1
    left = shuffle(a, b, DEG)
    right = {w: s * c for w, c in shuffle(b, a, DEG).items()}
    assert left == right


@given(words)
def test_full_rotation_sign(w):
    cur, sign = w, 1
    for _ in range(len(w)):
        cur, s = rotate(cur, DEG)
        sign *= s
    assert cur == w
    # a full turn is +1 unless the necklace is sign-degenerate
    if canonicalize_necklace(w, DEG) is not None:
        assert sign == 1
    least = min(r for r, _ in rotations(w, DEG))
    assert canonicalize_necklace(w, DEG) is None or canonicalize_necklace(w, DEG)[0] == least


@given(st.integers(-6, -1))
def test_norm_kills_one_minus_z(degree):
    ws = words_of_degree(range(len(DEG)), DEG, degree, -degree, min_len=1)
    index = {w: i for i, w in enumerate(ws)}

    def matrix(op):
        cols = [{index[k]: v for k, v in op(w).items()} for w in ws]
        return SparseMatrix.from_columns(len(ws), cols)

    n = matrix(lambda w: norm(w, DEG))
    z = matrix(lambda w: one_minus_z(w, DEG))
    assert (n @ z).is_zero() and (z @ n).is_zero()


@given(st.integers(-7, -1))
def test_word_degree_bounds_length(degree):
    for w in words_of_degree(range(len(DEG)), DEG, degree, 10):
        assert -word_degree(w, DEG) >= len(w)
        assert word_degree(w, DEG) == degree


def test_enumeration_is_exhaustive():
    deg = (-1, -2)
    brute = sorted(w for n in range(5) for w in product(range(2), repeat=n) if word_degree(w, deg) == -4)
    assert sorted(words_of_degree((0, 1), deg, -4, 4)) == brute


def test_necklace_enumeration_matches_canonical_forms():
    deg = (-1, -2)
    seen = set()
    for n in range(1, 6):
        for w in product(range(2), repeat=n):
            if word_degree(w, deg) == -5:
                c = canonicalize_necklace(w, deg)
                if c is not None:
                    seen.add(c[0])
    assert sorted(necklaces_of_degree((0, 1), deg, -5, 5)) == sorted(seen)


def test_koszul_sign_matches_transposition_count():
    degs = [1, 2, 3]
    for perm in permutations(range(3)):
        odd = sum(1 for i in range(3) for j in range(i + 1, 3)
                  if perm[i] > perm[j] and degs[perm[i]] & 1 and degs[perm[j]] & 1)
        assert koszul_sign(perm, degs) == (-1) ** odd
