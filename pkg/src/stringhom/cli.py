"""Command line interface: ``stringhom <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

from . import hochschild as hh
from .frobenius import ValidationError, check_cinfinity, check_square_zero, is_symplectic, validate_frobenius
from .io import AlgebraParseError, ResultCache, algebra_hash, decode_chain, encode_chain, fmt_q, parse_algebra
from .negcyclic import authoritative_columns, hc_minus
from .spaces import builtin
from .stringops import (DegreeContractError, SpaceModel, find_sl2_basis, loop_bracket, loop_classes,
                        loop_coordinates, loop_product, model, string_bracket, string_bracket_table, string_classes,
                        string_coordinates, string_homology)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TRUNCATED = 3
EXIT_INTERNAL = 4

COMMANDS = ("check", "hh", "hc", "hc-minus", "loop-homology", "loop-product", "loop-bracket",
            "string-homology", "string-bracket", "oracle")


class Truncated(Exception):
    def __init__(self, needed: Dict):
        super().__init__("non-authoritative truncation")
        self.needed = needed


class CacheMismatch(Exception):
    pass


# -- space resolution -------------------------------------------------------------


def load_spec(ref: str):
    if ref.startswith("builtin:"):
        return builtin(ref.split(":", 1)[1])
    return parse_algebra(ref)


# -- labels -------------------------------------------------------------------------


def _letter(space: SpaceModel, i: int) -> str:
    return "t_" + space.spec.basis.labels[i]


def _word(space: SpaceModel, w) -> str:
    return " ".join(_letter(space, a) for a in w) or "1"


def render_term(space: SpaceModel, complex_id: str, key) -> str:
    if complex_id == hh.HOCH_VV:
        k, w = key
        return f"[{_word(space, w)}] d/d{_letter(space, k)}"
    if complex_id == hh.HOCH_VVDUAL:
        w, k = key
        return f"[{_word(space, w)}] d{_letter(space, k)}"
    return f"({_word(space, key)})"


def render_chain(space: SpaceModel, complex_id: str, chain) -> List:
    return [[render_term(space, complex_id, k), fmt_q(v)] for k, v in sorted(chain.items())]


def render_chain_text(space: SpaceModel, complex_id: str, chain) -> str:
    parts = [f"{fmt_q(v)}*{render_term(space, complex_id, k)}" for k, v in sorted(chain.items())]
    return " + ".join(parts) or "0"


# -- cached cohomology --------------------------------------------------------------


def _degree_value(structure, complex_id: str, degree: int, cap: int) -> Dict:
    rep = hh.cohomology(structure, complex_id, [degree], cap)[degree]
    return {"rank": rep.rank, "representatives": [encode_chain(c) for c in rep.representatives],
            "weight_cap": rep.weight_cap, "authoritative": rep.authoritative, "stabilized": rep.stabilized}


class Runner:
    def __init__(self, args, space: SpaceModel):
        self.args = args
        self.space = space
        self.cache = ResultCache(args.cache_dir)
        self.algebra = algebra_hash(space.spec)
        self.needed: Dict = {}
        self.served: List = []
        self.computed: Dict = {}

    def _cap(self, complex_id: str, degree: int) -> int:
        need = max(hh.authoritative_cap(self.space.structure, complex_id, degree + i) for i in (-1, 0, 1))
        cap = need if self.args.weight_cap is None else self.args.weight_cap
        if cap < need:
            self.needed[f"{complex_id}:{degree}"] = need
        return cap

    def prefetch(self, complex_id: str, degrees: Sequence[int]) -> None:
        """Compute missing degrees in worker processes; only this process touches the cache."""
        jobs = getattr(self.args, "jobs", 1) or 1
        todo = []
        for n in degrees:
            cap = self._cap(complex_id, n)
            key = ResultCache.key(self.algebra, complex_id, n, cap)
            if (complex_id, n) not in self.computed and (self.args.verify_cache or not self.cache.peek(key)):
                todo.append((n, cap))
        if jobs <= 1 or len(todo) <= 1:
            return
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {n: pool.submit(_degree_value, self.space.structure, complex_id, n, cap) for n, cap in todo}
            for n, fut in futures.items():
                self.computed[(complex_id, n)] = fut.result()

    def degree_report(self, complex_id: str, degree: int) -> Dict:
        cap = self._cap(complex_id, degree)
        key = ResultCache.key(self.algebra, complex_id, degree, cap)
        hit = self.cache.get(key)
        if hit is not None and not self.args.verify_cache:
            self.served.append((complex_id, degree, cap, hit))
            return hit
        value = self.computed.pop((complex_id, degree), None)
        if value is None:
            value = _degree_value(self.space.structure, complex_id, degree, cap)
        if hit is not None and hit != json.loads(json.dumps(value, sort_keys=True)):
            raise CacheMismatch(f"cache entry {key} differs from recomputation")
        self.cache.put(key, value)
        return value

    def spot_check(self) -> None:
        """Recompute one cache hit (chosen deterministically) and compare."""
        if not self.served or self.args.verify_cache:
            return
        cid, degree, cap, hit = sorted(self.served, key=lambda t: (t[0], t[1]))[0]
        rep = hh.cohomology(self.space.structure, cid, [degree], cap)[degree]
        if rep.rank != hit["rank"]:
            raise CacheMismatch(f"cached rank for {cid} degree {degree} is stale")

    def finish(self) -> None:
        if self.needed and not self.args.force:
            raise Truncated(self.needed)


# -- commands -----------------------------------------------------------------------


def _window(args, lo: int, hi: int):
    a = lo if args.min_degree is None else args.min_degree
    b = hi if args.max_degree is None else args.max_degree
    return list(range(a, b + 1))


def cmd_check(args, space: SpaceModel):
    rep = validate_frobenius(space.spec)
    ok_sq, wit = check_square_zero(space.structure.m)
    rows = [
        {"check": "frobenius", "ok": rep.ok},
        {"check": "m^2=0", "ok": ok_sq, "witness": None if wit is None else str(wit)},
        {"check": "cinfinity", "ok": check_cinfinity(space.structure.m)},
        {"check": "symplectic", "ok": is_symplectic(space.structure.m, space.form)},
    ]
    return {"space": space.name, "dimension": space.d, "checks": rows}, all(r["ok"] for r in rows)


def cmd_hh(args, space: SpaceModel, runner: Runner):
    cid = hh.HOCH_VV if args.coefficients == "v" else hh.HOCH_VVDUAL
    hi = space.d if cid == hh.HOCH_VV else 0
    degrees = _window(args, hi - 9, hi)
    runner.prefetch(cid, degrees)
    rows = []
    for n in degrees:
        r = runner.degree_report(cid, n)
        rows.append({"degree": n, "rank": r["rank"], "weight_cap": r["weight_cap"], "stabilized": r["stabilized"],
                     "representatives": [render_chain(space, cid, decode_chain(c)) for c in r["representatives"]]})
    return {"space": space.name, "complex": cid, "rows": rows}, True


def cmd_hc(args, space: SpaceModel, runner: Runner):
    degrees = _window(args, -10, -1)
    runner.prefetch(hh.CYCLIC, degrees)
    rows = []
    for n in degrees:
        r = runner.degree_report(hh.CYCLIC, n)
        rows.append({"degree": n, "rank": r["rank"], "weight_cap": r["weight_cap"], "stabilized": r["stabilized"],
                     "representatives": [render_chain(space, hh.CYCLIC, decode_chain(c))
                                         for c in r["representatives"]]})
    return {"space": space.name, "complex": hh.CYCLIC, "rows": rows}, True


def cmd_hc_minus(args, space: SpaceModel, runner: Runner):
    degrees = _window(args, -11, -2)
    if args.columns is not None:
        for n in degrees:
            need = max(authoritative_columns(n - 1), 1)
            if args.columns < need:
                runner.needed[f"columns:{n}"] = need
    rep = hc_minus(space.structure, degrees, args.columns)
    rows = [{"degree": e.degree, "rank": e.rank, "cyclic_degree": e.degree + 1, "cyclic_rank": e.cyclic_rank,
             "agree": e.agree, "columns": e.columns, "column_stable": e.column_stable} for e in rep.entries]
    ok = rep.agree or bool(runner.needed)
    if not ok:
        raise hh.InvariantBreach("HC^- and cyclic ranks disagree")
    return {"space": space.name, "rows": rows}, True


def cmd_loop_homology(args, space: SpaceModel, runner: Runner):
    lm = _window(args, 0, 9)
    runner.prefetch(hh.HOCH_VV, [space.d - p for p in lm])
    rows = []
    for p in lm:
        r = runner.degree_report(hh.HOCH_VV, space.d - p)
        rows.append({"lm_degree": p, "shifted_degree": p - space.d, "hh_degree": space.d - p, "rank": r["rank"],
                     "stabilized": r["stabilized"]})
    return {"space": space.name, "rows": rows}, True


def _loop_table(args, space: SpaceModel, op, name: str):
    degrees = _window(args, 0, 6)
    basis = {p: loop_classes(space, p) for p in degrees}
    target_basis: Dict[int, list] = {}
    entries = []
    for p1 in degrees:
        for i, a in enumerate(basis[p1]):
            for p2 in degrees:
                for j, b in enumerate(basis[p2]):
                    out = op(space, a, b)
                    if out.lm_degree not in target_basis:
                        target_basis[out.lm_degree] = loop_classes(space, out.lm_degree)
                    coords = loop_coordinates(space, out, target_basis[out.lm_degree])
                    if coords is None:
                        raise hh.InvariantBreach(f"{name} result is not a cocycle combination")
                    entries.append({"left": [p1, i], "right": [p2, j], "degree": out.lm_degree,
                                    "coordinates": [fmt_q(c) for c in coords]})
    classes = {str(p): [render_chain(space, hh.HOCH_VV, c.representative) for c in cls]
               for p, cls in sorted({**basis, **target_basis}.items())}
    return {"space": space.name, "operation": name, "classes": classes, "entries": entries}, True


def cmd_string_homology(args, space: SpaceModel, runner: Runner):
    rows = []
    for r in string_homology(space, _window(args, 0, 10)):
        if r.rank != r.hc_minus_rank:
            raise hh.InvariantBreach("cyclic and negative cyclic tables disagree")
        rows.append({"string_degree": r.string_degree, "cyclic_degree": r.cyclic_degree, "rank": r.rank,
                     "hc_minus_degree": r.hc_minus_degree, "hc_minus_rank": r.hc_minus_rank,
                     "stabilized": r.stabilized})
    return {"space": space.name, "rows": rows}, True


def cmd_string_bracket(args, space: SpaceModel, runner: Runner):
    if args.degree is not None:
        tab = string_bracket_table(space, args.degree)
        sl2 = find_sl2_basis(tab)
        return {
            "space": space.name,
            "lie_degree": tab.lie_degree,
            "string_degree": tab.string_degree,
            "cyclic_degree": -1 - tab.string_degree,
            "hamiltonian_degree": -tab.lie_degree,
            "classes": [render_chain(space, hh.CYCLIC, c.representative) for c in tab.classes],
            "table": [[[fmt_q(v) for v in cell] for cell in row] for row in tab.table],
            "abelian": tab.abelian,
            "sl2_basis": None if sl2 is None else {k: [fmt_q(v) for v in vec] for k, vec in zip("EHF", sl2)},
        }, True
    degrees = _window(args, 0, 10)
    basis = {n: string_classes(space, n) for n in degrees}
    targets: Dict[int, list] = {}
    entries = []
    for n1 in degrees:
        for i, a in enumerate(basis[n1]):
            for n2 in degrees:
                for j, b in enumerate(basis[n2]):
                    out = string_bracket(space, a, b)
                    if out.string_degree not in targets:
                        targets[out.string_degree] = string_classes(space, out.string_degree)
                    coords = string_coordinates(space, out, targets[out.string_degree])
                    if coords is None:
                        raise hh.InvariantBreach("string bracket left the cocycles")
                    entries.append({"left": [n1, i], "right": [n2, j], "degree": out.string_degree,
                                    "coordinates": [fmt_q(c) for c in coords]})
    classes = {str(n): [render_chain(space, hh.CYCLIC, c.representative) for c in cls]
               for n, cls in sorted({**basis, **targets}.items())}
    return {"space": space.name, "classes": classes, "entries": entries}, True


def cmd_oracle(args, space: SpaceModel, runner: Runner):
    rows = []
    ok = True
    for coeff, cid, hi in (("V", hh.HOCH_VV, space.d), ("Vdual", hh.HOCH_VVDUAL, 0)):
        degrees = _window(args, hi - 9, hi) if args.coefficients in (None, coeff.lower()) else []
        runner.prefetch(cid, degrees)
        bar = hh.bar_oracle(space.spec, coeff, degrees)
        for n in degrees:
            r = runner.degree_report(cid, n)["rank"]
            rows.append({"coefficients": coeff, "degree": n, "derivation_rank": r, "bar_rank": bar[n],
                         "agree": r == bar[n]})
            ok = ok and r == bar[n]
    if not ok:
        raise hh.InvariantBreach("derivation and bar models disagree")
    return {"space": space.name, "rows": rows}, True


# -- output -------------------------------------------------------------------------


def _table_text(doc: Dict) -> str:
    lines = [f"space: {doc.get('space')}"]
    for key, value in doc.items():
        if key in ("space", "rows", "entries", "classes", "table", "checks"):
            continue
        lines.append(f"{key}: {value}")
    for key in ("checks", "rows", "entries"):
        rows = doc.get(key)
        if not rows:
            continue
        cols = [c for c in rows[0] if c != "representatives"]
        widths = [max(len(c), *(len(str(r.get(c))) for r in rows)) for c in cols]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        for r in rows:
            lines.append("  ".join(str(r.get(c)).ljust(w) for c, w in zip(cols, widths)))
            for rep in r.get("representatives", []) or []:
                lines.append("    " + " + ".join(f"{c}*{t}" for t, c in rep))
    if "classes" in doc:
        cls = doc["classes"]
        items = cls.items() if isinstance(cls, dict) else [("", cls)]
        for deg, reps in items:
            for i, rep in enumerate(reps):
                lines.append(f"class {deg}[{i}]: " + " + ".join(f"{c}*{t}" for t, c in rep))
    if "table" in doc:
        for i, row in enumerate(doc["table"]):
            for j, cell in enumerate(row):
                lines.append(f"[{i},{j}] = ({', '.join(cell)})")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="builtin:NAME or path to an algebra JSON file")
    common.add_argument("--min-degree", type=int)
    common.add_argument("--max-degree", type=int)
    common.add_argument("--weight-cap", type=int)
    common.add_argument("--columns", type=int)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--cache-dir")
    common.add_argument("--verify-cache", action="store_true")
    common.add_argument("--force", action="store_true")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-degree fan-out")
    p = argparse.ArgumentParser(prog="stringhom", description="Exact string topology of formal Poincare duality spaces.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "check":
            sp.add_argument("path", nargs="?")
        if name in ("hh", "oracle"):
            sp.add_argument("--coefficients", choices=("v", "vdual"), default="v" if name == "hh" else None)
        if name == "string-bracket":
            sp.add_argument("--degree", type=int, help="Lie degree (string degree + 2 - d)")
    return p


HANDLERS = {
    "hh": cmd_hh,
    "hc": cmd_hc,
    "hc-minus": cmd_hc_minus,
    "loop-homology": cmd_loop_homology,
    "loop-product": lambda a, s, r: _loop_table(a, s, loop_product, "loop-product"),
    "loop-bracket": lambda a, s, r: _loop_table(a, s, loop_bracket, "loop-bracket"),
    "string-homology": cmd_string_homology,
    "string-bracket": cmd_string_bracket,
    "oracle": cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    ref = args.space or getattr(args, "path", None)
    if not ref:
        print("error: give --space builtin:NAME or a path", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        spec = load_spec(ref)
        space = model(spec, spec.name or ref)
    except AlgebraParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as e:
        for f in e.report.failures:
            print(f"validation failure [{f.kind}] {f.message} (witness {f.witness})", file=sys.stderr)
        return EXIT_VALIDATION
    except (KeyError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        if args.command == "check":
            doc, ok = cmd_check(args, space)
            code = EXIT_OK if ok else EXIT_INTERNAL
        else:
            runner = Runner(args, space)
            doc, _ = HANDLERS[args.command](args, space, runner)
            runner.spot_check()
            runner.finish()
            code = EXIT_OK
    except Truncated as t:
        for k, v in sorted(t.needed.items()):
            print(f"non-authoritative: {k} needs {'columns' if k.startswith('columns') else 'weight cap'} >= {v}",
                  file=sys.stderr)
        print("rerun with larger caps or pass --force", file=sys.stderr)
        return EXIT_TRUNCATED
    except (hh.InvariantBreach, DegreeContractError, CacheMismatch, ArithmeticError) as e:
        print(f"internal invariant breach: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.format == "json":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(_table_text(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
