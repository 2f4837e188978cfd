"""Plain-text formats: instance files, transcript dumps, truth tables."""
from __future__ import annotations

from typing import Iterable

from .functions import GridInput, make_grid
from .grid import Cell, Entry, SchemaError


class ParseError(ValueError):
    pass


def format_pointer(p) -> str:
    if p is None:
        return "-"
    if isinstance(p, tuple):
        return f"{p[0]},{p[1]}"
    return str(p)


def parse_pointer(tok: str, column: bool = False):
    if tok == "-":
        return None
    try:
        if "," in tok:
            if column:
                raise ParseError(f"expected a column pointer, got {tok!r}")
            r, c = tok.split(",")
            return Cell(int(r), int(c))
        if not column:
            raise ParseError(f"expected a cell pointer, got {tok!r}")
        return int(tok)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad pointer {tok!r}") from exc


def format_entry(e: Entry) -> str:
    return " ".join([str(e.value), format_pointer(e.left), format_pointer(e.right),
                     format_pointer(e.aux)])


def parse_entry(tokens: list[str], family: str) -> Entry:
    if len(tokens) != 4:
        raise ParseError(f"expected 'value left right aux', got {tokens!r}")
    if tokens[0] not in ("0", "1"):
        raise ParseError(f"value must be 0 or 1, got {tokens[0]!r}")
    return Entry(int(tokens[0]), parse_pointer(tokens[1]), parse_pointer(tokens[2]),
                 parse_pointer(tokens[3], column=(family == "f")))


def dump_instance(x: GridInput) -> str:
    lines = [f"{x.family} {x.n} {x.m} {x.k}"]
    for c, e in x.cells():
        lines.append(f"{c.row} {c.col} {format_entry(e)}")
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> GridInput:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty instance file")
    head = lines[0].split()
    if len(head) != 4:
        raise ParseError("header must be 'family n m k'")
    family = head[0]
    try:
        n, m, k = (int(v) for v in head[1:])
    except ValueError as exc:
        raise ParseError(f"bad header {lines[0]!r}") from exc
    if len(lines) - 1 != n * m:
        raise ParseError(f"expected {n * m} cell lines, found {len(lines) - 1}")
    updates = {}
    expected = ((i, j) for i in range(1, n + 1) for j in range(1, m + 1))
    for ln, want in zip(lines[1:], expected):
        tok = ln.split()
        if len(tok) != 6:
            raise ParseError(f"bad cell line {ln!r}")
        try:
            cell = (int(tok[0]), int(tok[1]))
        except ValueError as exc:
            raise ParseError(f"bad cell coordinates in {ln!r}") from exc
        if cell != want:
            raise ParseError(f"cells must be in row-major order; expected {want}, got {cell}")
        updates[Cell(*cell)] = parse_entry(tok[2:], family)
    try:
        return make_grid(family, n, m, k, updates)
    except SchemaError as exc:
        raise ParseError(str(exc)) from exc


def dump_transcript(pairs: Iterable[tuple[Cell, Entry]]) -> str:
    return "".join(f"{t} {c[0]} {c[1]} {format_entry(e)}\n"
                   for t, (c, e) in enumerate(pairs, 1))


def load_transcript(text: str, family: str = "f") -> list[tuple[Cell, Entry]]:
    out = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        tok = ln.split()
        if len(tok) != 7:
            raise ParseError(f"bad transcript line {ln!r}")
        try:
            out.append((Cell(int(tok[1]), int(tok[2])), parse_entry(tok[3:], family)))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad transcript line {ln!r}") from exc
    return out
