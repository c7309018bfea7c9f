"""Algebra files (JSON with exact "p/q" rationals) and the on-disk result cache."""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .frobenius import FrobeniusAlgebraSpec, ValidationError, validate_frobenius
from .graded import GradedBasis

CACHE_ENV = "STRINGHOM_CACHE"
CACHE_VERSION = 1
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class AlgebraParseError(ValueError):
    """Malformed algebra file; the message names the offending position or JSON path."""


def fmt_q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(text: Any, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise AlgebraParseError(f"{where}: expected an integer or a 'p/q' string, got {text!r}")
    if not _RATIONAL.match(str(text).strip()):
        raise AlgebraParseError(f"{where}: {text!r} is not an integer or 'p/q' fraction")
    try:
        return Fraction(str(text).strip())
    except ZeroDivisionError:
        raise AlgebraParseError(f"{where}: {text!r} has a zero denominator") from None


def _index(ref: Any, labels: List[str], where: str) -> int:
    if isinstance(ref, bool):
        raise AlgebraParseError(f"{where}: expected a basis index or label")
    if isinstance(ref, int):
        if not 0 <= ref < len(labels):
            raise AlgebraParseError(f"{where}: index {ref} outside the basis (size {len(labels)})")
        return ref
    if isinstance(ref, str) and ref in labels:
        return labels.index(ref)
    raise AlgebraParseError(f"{where}: unknown basis element {ref!r}")


def _require(obj: Dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise AlgebraParseError(f"{where}: expected an object")
    if key not in obj:
        raise AlgebraParseError(f"{where}: missing field {key!r}")
    return obj[key]


def algebra_from_document(doc: Any) -> FrobeniusAlgebraSpec:
    """Build (without validating) a spec from a decoded JSON document."""
    basis = _require(doc, "basis", "$")
    if not isinstance(basis, list) or not basis:
        raise AlgebraParseError("$.basis: expected a non-empty list")
    labels, degrees = [], []
    for n, b in enumerate(basis):
        where = f"$.basis[{n}]"
        label = _require(b, "label", where)
        deg = _require(b, "degree", where)
        if not isinstance(label, str) or not isinstance(deg, int) or isinstance(deg, bool):
            raise AlgebraParseError(f"{where}: label must be text and degree an integer")
        labels.append(label)
        degrees.append(deg)
    if len(set(labels)) != len(labels):
        raise AlgebraParseError("$.basis: labels must be unique")
    dim = _require(doc, "dimension", "$")
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise AlgebraParseError("$.dimension: expected an integer")
    product: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for n, entry in enumerate(doc.get("product", [])):
        where = f"$.product[{n}]"
        i = _index(_require(entry, "i", where), labels, where + ".i")
        j = _index(_require(entry, "j", where), labels, where + ".j")
        terms = _require(entry, "terms", where)
        if not isinstance(terms, list):
            raise AlgebraParseError(f"{where}.terms: expected a list")
        acc = product.setdefault((i, j), {})
        for m, t in enumerate(terms):
            tw = f"{where}.terms[{m}]"
            k = _index(_require(t, "k", tw), labels, tw + ".k")
            acc[k] = acc.get(k, 0) + parse_q(_require(t, "coeff", tw), tw + ".coeff")
    pairing: Dict[Tuple[int, int], Fraction] = {}
    for n, entry in enumerate(doc.get("pairing", [])):
        where = f"$.pairing[{n}]"
        i = _index(_require(entry, "i", where), labels, where + ".i")
        j = _index(_require(entry, "j", where), labels, where + ".j")
        pairing[(i, j)] = pairing.get((i, j), 0) + parse_q(_require(entry, "value", where), where + ".value")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise AlgebraParseError("$.name: expected text")
    try:
        gb = GradedBasis(tuple(labels), tuple(degrees))
    except ValueError as e:
        raise AlgebraParseError(f"$.basis: {e}") from None
    return FrobeniusAlgebraSpec(gb, dim, product, pairing, name)


def parse_algebra(path: Union[str, Path]) -> FrobeniusAlgebraSpec:
    """Read, parse and validate an algebra file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise AlgebraParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    spec = algebra_from_document(doc)
    rep = validate_frobenius(spec)
    if not rep.ok:
        raise ValidationError(rep)
    return spec


def algebra_document(spec: FrobeniusAlgebraSpec) -> Dict:
    """Inverse of ``algebra_from_document`` with canonical ordering."""
    labels = spec.basis.labels
    return {
        "name": spec.name,
        "dimension": spec.dimension,
        "basis": [{"label": l, "degree": d} for l, d in zip(labels, spec.degrees)],
        "product": [{"i": i, "j": j, "terms": [{"coeff": fmt_q(c), "k": k} for k, c in sorted(t.items())]}
                    for (i, j), t in sorted(spec.product.items())],
        "pairing": [{"i": i, "j": j, "value": fmt_q(v)} for (i, j), v in sorted(spec.pairing.items())],
    }


def algebra_hash(spec: FrobeniusAlgebraSpec) -> str:
    doc = algebra_document(spec)
    doc.pop("name")
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


# -- cache ------------------------------------------------------------------------


def _to_json(x):
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, tuple):
        return [_to_json(v) for v in x]
    if isinstance(x, list):
        return [_to_json(v) for v in x]
    if isinstance(x, dict):
        return [[_to_json(k), _to_json(v)] for k, v in sorted(x.items())]
    return x


def _tuplify(x):
    return tuple(_tuplify(v) for v in x) if isinstance(x, list) else x


def encode_chain(chain: Dict) -> List:
    return [[_to_json(k), fmt_q(v)] for k, v in sorted(chain.items())]


def decode_chain(data: List) -> Dict:
    return {_tuplify(k): Fraction(v) for k, v in data}


class ResultCache:
    """Content-addressed store: one JSON file per (algebra, complex, degree, cap) key."""

    def __init__(self, root: Optional[Union[str, Path]] = None):
        root = root or os.environ.get(CACHE_ENV)
        self.root = Path(root) if root else None
        self.hits: List[str] = []

    @property
    def enabled(self) -> bool:
        return self.root is not None

    @staticmethod
    def key(algebra: str, complex_id: str, degree: int, weight_cap: int) -> str:
        raw = json.dumps([CACHE_VERSION, algebra, complex_id, degree, weight_cap])
        return hashlib.sha256(raw.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def peek(self, key: str) -> bool:
        return self.enabled and self._path(key).exists()

    def get(self, key: str) -> Optional[Dict]:
        if not self.enabled:
            return None
        p = self._path(key)
        if not p.exists():
            return None
        self.hits.append(key)
        return json.loads(p.read_text(encoding="utf-8"))

    def put(self, key: str, value: Dict) -> None:
        if not self.enabled:
            return
        p = self._path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        # write-then-rename keeps readers from seeing partial files
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(value, fh, sort_keys=True)
        os.replace(tmp, p)
