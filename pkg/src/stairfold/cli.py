"""Command line entry point.

Exit codes: 0 success, 1 the input is well formed but fails a check,
2 the input cannot be parsed, 3 the requested tube is too thin.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import documents as docs
from .crooked import chain_check, is_delta_crooked
from .fold import validate_fold
from .graph_core import is_regular
from .render import RenderError, render
from .separator import FaceLabeling, NotSeparatorError, Tube, TubeTooThin
from .stairwell import from_separator, validate_broken, validate_stairwell
from .unfold_engine import reduce_to_height_one

OK, FAILED, PARSE, TUBE = 0, 1, 2, 3
DEFAULT_RADIUS = Fraction(1, 16)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path: str, kind: str | None = None) -> docs.Document:
    doc = docs.load(path)
    if kind is not None and doc.kind != kind:
        raise ValueError(f"expected a {kind} document, found {doc.kind}")
    return doc


def _rational(s: str) -> Fraction:
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def verify_document(doc: docs.Document) -> tuple[bool, str]:
    k, p = doc.kind, doc.payload
    if k == "graph":
        return True, f"graph with {len(p.vertices)} vertices and {len(p.edges)} edges"
    if k == "straight_set":
        if not is_regular(p.graph, p.base):
            return False, "base is not regular"
        return True, f"straight set with {len(p.end_set())} end points"
    if k == "separator":
        if not FaceLabeling(p[0]).separates:
            return False, "complex does not separate bottom from top"
        return True, f"separator with {len(p[0])} segments"
    if k == "stairwell":
        ok, why = validate_stairwell(p.graph, p)
        return ok, (f"stairwell of height {p.height}" if ok else why)
    if k == "broken_stairwell":
        ok, why = validate_broken(p.graph, p)
        return ok, (f"broken stairwell of height {p.height}, pit at level {p.pit}" if ok else why)
    if k == "fold_sequence":
        for n, f in enumerate(p.folds, 1):
            ok, why = validate_fold(f)
            if not ok:
                return False, f"fold {n}: {why}"
        return True, f"{len(p.folds)} valid folds"
    onto = [m.is_onto() for m in p]
    if not all(onto):
        return False, f"map {onto.index(False) + 1} is not onto"
    return True, f"{len(p)} onto maps"


def cmd_verify(args) -> int:
    doc = _load(args.input, args.kind)
    ok, why = verify_document(doc)
    if ok:
        print(f"ok: {why}")
        return OK
    _err(why)
    return FAILED


def cmd_stairwell(args) -> int:
    doc = _load(args.input, "separator")
    M, stored = doc.payload
    radius = args.tube_radius or stored or DEFAULT_RADIUS
    try:
        s = from_separator(M, Tube(M, radius))
    except TubeTooThin as exc:
        _err(f"tube too thin: {exc}; required radius {exc.required}")
        return TUBE
    except NotSeparatorError as exc:
        _err(f"not a separator: {exc}")
        return FAILED
    out = docs.Document("stairwell", s, {"source": os.path.basename(args.input),
                                         "tube_radius": str(radius)})
    if args.out:
        docs.save(out, args.out)
    print(f"height {s.height}")
    return OK


def cmd_unfold(args) -> int:
    doc = _load(args.input, "stairwell")
    s = doc.payload
    rep = reduce_to_height_one(s.graph, s)
    os.makedirs(args.out, exist_ok=True)
    docs.save(docs.Document("fold_sequence", rep.fold_sequence), os.path.join(args.out, "folds.json"))
    docs.save(docs.Document("stairwell", rep.final), os.path.join(args.out, "final.json"))
    with open(os.path.join(args.out, "trace.json"), "w", encoding="utf-8") as fh:
        json.dump(rep.trace, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("step\tevent\theight\tpit\tvertices\tedges")
    for row in rep.trace:
        pit = "-" if row["pit"] is None else row["pit"]
        print(f"{row['step']}\t{row['event']}\t{row['height']}\t{pit}\t{row['vertices']}\t{row['edges']}")
    print(f"folds {rep.fold_count}")
    return OK


def cmd_render(args) -> int:
    doc = _load(args.input)
    try:
        svg = render(doc)
    except RenderError as exc:
        _err(str(exc))
        return FAILED
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return OK


def cmd_crooked(args) -> int:
    doc = _load(args.input, "interval_maps")
    maps = doc.payload
    if not maps:
        _err("no maps in document")
        return FAILED
    if args.chain:
        rep = chain_check(maps)
        print("n\tk\tverified")
        for n, k, v in rep.rows():
            print(f"{n}\t{k}\t{'yes' if v else 'no'}")
        return OK if rep.all_verified else FAILED
    all_ok = True
    for i, m in enumerate(maps, 1):
        cert = is_delta_crooked(m, args.delta)
        net = ",".join(str(y) for y in cert.net)
        print(f"map {i}: delta {cert.delta} {'verified' if cert.verified else 'not verified'} net [{net}]")
        if cert.witness is not None:
            print(f"  failing quadruple {', '.join(str(y) for y in cert.witness)}")
        all_ok &= cert.verified
    return OK if all_ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stairfold",
                                 description="Stairwells, simple folds and crooked maps.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a document against its axioms")
    p.add_argument("input")
    p.add_argument("--kind", choices=docs.KINDS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stairwell", help="build a stairwell from a separator")
    p.add_argument("input")
    p.add_argument("--tube-radius", type=_rational)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stairwell)

    p = sub.add_parser("unfold", help="fold a stairwell down to height one")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("render", help="draw a document as SVG")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("crooked", help="certify crookedness of interval maps")
    p.add_argument("input")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--delta", type=_rational)
    g.add_argument("--chain", action="store_true")
    p.set_defaults(func=cmd_crooked)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return PARSE if exc.code else OK
    try:
        return args.func(args)
    except docs.DocumentError as exc:
        _err(f"parse error: {exc}")
        return PARSE
    except OSError as exc:
        _err(f"cannot read input: {exc}")
        return PARSE
    except ValueError as exc:
        _err(str(exc))
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
