"""Graded words, Koszul signs, shuffles and necklaces.

Letters are integer indices into a tuple of letter degrees; a word is a tuple of
letters.  Linear combinations of words are plain dicts ``word -> Fraction``.
Only the parity of a degree ever enters a sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

Word = Tuple[int, ...]
Combo = Dict[Word, Fraction]


@dataclass(frozen=True)
class GradedBasis:
    """Labelled homogeneous basis of a finite graded vector space."""

    labels: Tuple[str, ...]
    degrees: Tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels and degrees differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    def __len__(self):
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


def word_degree(w: Sequence[int], deg: Sequence[int]) -> int:
    return sum(deg[a] for a in w)


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of rearranging graded symbols ``x_0 .. x_{n-1}`` into ``x_perm[0] .. x_perm[n-1]``."""
    if len(perm) != len(degrees):
        raise ValueError("permutation and degree list differ in length")
    odd = 0
    n = len(perm)
    for i in range(n):
        di = degrees[perm[i]] & 1
        if not di:
            continue
        for j in range(i + 1, n):
            if perm[i] > perm[j] and degrees[perm[j]] & 1:
                odd ^= 1
    return -1 if odd else 1


def add_into(acc: Combo, w: Word, c) -> None:
    v = acc.get(w, 0) + c
    if v:
        acc[w] = v
    else:
        acc.pop(w, None)


def clean(acc: Dict) -> Dict:
    return {k: Fraction(v) for k, v in acc.items() if v}


def shuffle(w1: Word, w2: Word, deg: Sequence[int]) -> Combo:
    """Signed sum of all shuffles of two words."""
    n1, n2 = len(w1), len(w2)
    letters = tuple(w1) + tuple(w2)
    ldeg = [deg[a] for a in letters]
    out: Combo = {}
    for pos in combinations(range(n1 + n2), n1):
        pset = set(pos)
        perm = [0] * (n1 + n2)
        it1, it2 = iter(range(n1)), iter(range(n1, n1 + n2))
        for k in range(n1 + n2):
            perm[k] = next(it1) if k in pset else next(it2)
        word = tuple(letters[p] for p in perm)
        add_into(out, word, koszul_sign(perm, ldeg))
    return clean(out)


def rotate(w: Word, deg: Sequence[int]) -> Tuple[Word, int]:
    """Move the last letter to the front, with the sign of passing the others."""
    if not w:
        raise ValueError("cannot rotate the empty word")
    last = w[-1]
    rest = word_degree(w[:-1], deg)
    sign = -1 if (deg[last] & 1) and (rest & 1) else 1
    return (last,) + tuple(w[:-1]), sign


def rotations(w: Word, deg: Sequence[int]) -> List[Tuple[Word, int]]:
    """All ``z^k w`` for ``k = 0 .. len-1`` with accumulated signs."""
    out = [(tuple(w), 1)]
    cur, s = tuple(w), 1
    for _ in range(len(w) - 1):
        cur, t = rotate(cur, deg)
        s *= t
        out.append((cur, s))
    return out


def norm(w: Word, deg: Sequence[int]) -> Combo:
    out: Combo = {}
    if not w:
        return {(): Fraction(1)}
    for r, s in rotations(w, deg):
        add_into(out, r, s)
    return clean(out)


def canonicalize_necklace(w: Word, deg: Sequence[int]) -> Optional[Tuple[Word, int]]:
    """Lexicographically least rotation and its sign, or None for a zero class."""
    if not w:
        raise ValueError("necklaces have length at least one")
    # if some rotation fixes w up to -1, the least rotation shows up with both signs
    best: Optional[Word] = None
    sign = 0
    for r, s in rotations(w, deg):
        if best is None or r < best:
            best, sign = r, s
        elif r == best and s != sign:
            return None
    return best, sign


def necklace_combo(combo: Combo, deg: Sequence[int]) -> Combo:
    """Project a combination of words to canonical necklaces."""
    out: Combo = {}
    for w, c in combo.items():
        if not w:
            continue
        cn = canonicalize_necklace(w, deg)
        if cn is None:
            continue
        add_into(out, cn[0], c * cn[1])
    return clean(out)


def words_of_degree(letters: Sequence[int], deg: Sequence[int], degree: int, max_len: int,
                    min_len: int = 0) -> List[Word]:
    """All words over ``letters`` of the given total degree and length in [min_len, max_len].

    Every letter must have degree <= -1, so the search is finite.
    """
    if any(deg[a] >= 0 for a in letters):
        raise ValueError("word enumeration needs letters of strictly negative degree")
    letters = sorted(letters)
    out: List[Word] = []

    def rec(prefix: List[int], d: int):
        if d == degree and len(prefix) >= min_len:
            out.append(tuple(prefix))
        if len(prefix) >= max_len:
            return
        for a in letters:
            nd = d + deg[a]
            if nd < degree:
                continue
            prefix.append(a)
            rec(prefix, nd)
            prefix.pop()

    if degree <= 0:
        rec([], 0)
    return sorted(out, key=lambda w: (len(w), w))


def words_of_length(letters: Sequence[int], deg: Sequence[int], degree: int, length: int) -> List[Word]:
    """All words of exactly ``length`` letters and total ``degree`` (letters of any degree)."""
    letters = sorted(letters)
    lo = min(deg[a] for a in letters)
    hi = max(deg[a] for a in letters)
    out: List[Word] = []

    def rec(prefix, d, left):
        if left == 0:
            if d == degree:
                out.append(tuple(prefix))
            return
        for a in letters:
            nd = d + deg[a]
            if not (lo * (left - 1) <= degree - nd <= hi * (left - 1)):
                continue
            prefix.append(a)
            rec(prefix, nd, left - 1)
            prefix.pop()

    rec([], 0, length)
    return out


def necklaces_of_degree(letters: Sequence[int], deg: Sequence[int], degree: int, max_len: int) -> List[Word]:
    """Canonical representatives of the nonzero necklaces of a given degree (length >= 1)."""
    seen = set()
    out = []
    for w in words_of_degree(letters, deg, degree, max_len, min_len=1):
        cn = canonicalize_necklace(w, deg)
        if cn is None or cn[0] in seen:
            continue
        seen.add(cn[0])
        out.append(cn[0])
    return sorted(out, key=lambda w: (len(w), w))
