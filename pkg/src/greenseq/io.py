"""JSON documents for matrices, quivers, layerings, sequences and paths."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .exchange import ExchangeMatrix, GreenSeqError, Prime, format_vertex, parse_vertex
from .layering import Layering
from .permpath import ContiguousPath, word_to_path
from .quiver import ValuedArrow, ValuedIceQuiver


class ParseError(GreenSeqError):
    pass


def _label_out(v):
    return format_vertex(v) if isinstance(v, Prime) else v


def matrix_to_doc(B: ExchangeMatrix) -> dict:
    return {
        "ex": [_label_out(v) for v in B.ex],
        "fr": [_label_out(v) for v in B.fr],
        "rows": {format_vertex(v): list(row) for v, row in zip(B.labels, B.rows)},
    }


def matrix_from_doc(doc: Mapping[str, Any]) -> ExchangeMatrix:
    try:
        ex = tuple(parse_vertex(v) for v in doc["ex"])
        fr = tuple(parse_vertex(v) for v in doc.get("fr", []))
        rows_doc = {parse_vertex(k): v for k, v in doc["rows"].items()}
        missing = [v for v in ex + fr if v not in rows_doc]
        if missing:
            raise ParseError(f"no row for {', '.join(map(str, missing))}")
        extra = set(rows_doc) - set(ex + fr)
        if extra:
            raise ParseError(f"rows for unknown labels {sorted(map(str, extra))}")
        rows = tuple(tuple(int(x) for x in rows_doc[v]) for v in ex + fr)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix document: {exc}") from exc
    return ExchangeMatrix(ex, fr, rows)


def quiver_to_doc(Q: ValuedIceQuiver) -> dict:
    return {
        "ex": [_label_out(v) for v in Q.ex],
        "fr": [_label_out(v) for v in Q.fr],
        "arrows": [{"src": _label_out(a.src), "dst": _label_out(a.dst), "v": list(a.labels)}
                   for a in Q.arrows],
    }


def quiver_from_doc(doc: Mapping[str, Any]) -> ValuedIceQuiver:
    try:
        ex = tuple(parse_vertex(v) for v in doc["ex"])
        fr = tuple(parse_vertex(v) for v in doc.get("fr", []))
        arrows = tuple(
            ValuedArrow(parse_vertex(a["src"]), parse_vertex(a["dst"]),
                        tuple(int(x) for x in a.get("v", (1, 1))))
            for a in doc.get("arrows", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed quiver document: {exc}") from exc
    return ValuedIceQuiver(ex, fr, arrows)


def layering_from_doc(doc: Mapping[str, Any]) -> Layering:
    try:
        return Layering.from_doc(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed layering document: {exc}") from exc


def path_to_doc(path: ContiguousPath) -> dict:
    return path.to_doc()


def path_from_doc(doc: Mapping[str, Any]) -> ContiguousPath:
    perms = doc.get("perms")
    N = len(perms[0]) if perms else int(doc["n"])
    path = word_to_path(doc["words"], N)
    if perms is not None and [list(p) for p in path.perms] != [list(p) for p in perms]:
        raise ParseError("path permutations do not match its word")
    return path


def parse_sequence(text: str) -> tuple:
    """``"1,2,3"`` or ``"1 2 3"`` or a JSON array."""
    text = text.strip()
    if not text:
        return ()
    if text.startswith("["):
        try:
            return tuple(int(x) for x in json.loads(text))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad sequence {text!r}: {exc}") from exc
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError as exc:
        raise ParseError(f"bad sequence {text!r}: {exc}") from exc


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def dumps(doc: Any) -> str:
    """Canonical, deterministic JSON text."""
    return json.dumps(doc, sort_keys=True, indent=2)
