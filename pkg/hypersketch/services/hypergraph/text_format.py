"""
Line-oriented text formats.

Hypergraph:  header `n <n> r <r_max>`, then `+ v1,v2,...,vk [weight]` per edge.
Stream:      same header, lines start with `+` (insert) or `-` (delete);
             an optional count repeats the update.
Sparsifier:  `n <n> r <r_max> eps <eps> eps_star <eps*> seed <hex> [size_bound <b>]`,
             then `e v1,...,vk <weight> <stage> [copy]` per emitted copy; the copy
             label is written only when nonzero and each (edge, copy) appears once.
`#` starts a comment; blank lines are ignored.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from hypersketch.core.errors import ArityError, HypergraphFormatError, VertexOutOfRangeError
from hypersketch.schemas.hypergraph import Hyperedge, Hypergraph
from hypersketch.schemas.sparsifier import SparsifierEntry, SparsifierOutput
from hypersketch.schemas.stream import StreamUpdate, UpdateOp


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _column_of(raw: str, token: str, start: int = 0) -> int:
    pos = raw.find(token, start)
    return pos + 1 if pos >= 0 else 1


def _parse_int(token: str, raw: str, lineno: int, source: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise HypergraphFormatError(f"expected integer {what}, got {token!r}", lineno,
                                    _column_of(raw, token), source) from None


def parse_header(raw: str, lineno: int, source: str) -> Tuple[int, int]:
    tokens = _strip_comment(raw).split()
    if len(tokens) != 4 or tokens[0] != "n" or tokens[2] != "r":
        raise HypergraphFormatError("header must read `n <n> r <r_max>`", lineno, 1, source)
    n = _parse_int(tokens[1], raw, lineno, source, "vertex count")
    r_max = _parse_int(tokens[3], raw, lineno, source, "arity bound")
    if n < 2:
        raise HypergraphFormatError(f"vertex count must be at least 2, got {n}", lineno,
                                    _column_of(raw, tokens[1]), source)
    if not 2 <= r_max <= n:
        raise HypergraphFormatError(f"arity bound must lie in [2, n], got {r_max}", lineno,
                                    _column_of(raw, tokens[3], 3), source)
    return n, r_max


def parse_edge_line(raw: str, lineno: int, n: int, r_max: int, source: str,
                    ops: str = "+") -> Tuple[UpdateOp, Hyperedge, int]:
    """Parse `<op> v1,...,vk [count]` into (op, edge, count)."""
    body = _strip_comment(raw)
    tokens = body.split()
    if not tokens:
        raise HypergraphFormatError("empty edge line", lineno, 1, source)
    op_token = tokens[0]
    if op_token not in ops or len(op_token) != 1:
        allowed = " or ".join(f"`{c}`" for c in ops)
        raise HypergraphFormatError(f"line must start with {allowed}", lineno,
                                    _column_of(raw, op_token), source)
    if len(tokens) not in (2, 3):
        raise HypergraphFormatError("expected `<op> v1,...,vk [weight]`", lineno, 1, source)
    vertex_token = tokens[1]
    col = _column_of(raw, vertex_token, raw.find(op_token) + 1)
    edge = parse_vertices(vertex_token, raw, col, lineno, n, r_max, source)
    count = 1
    if len(tokens) == 3:
        count = _parse_int(tokens[2], raw, lineno, source, "weight")
        if count < 1:
            raise HypergraphFormatError(f"weight must be positive, got {count}", lineno,
                                        _column_of(raw, tokens[2], col), source)
    return UpdateOp(op_token), edge, count


def parse_vertices(vertex_token: str, raw: str, col: int, lineno: int, n: int, r_max: int,
                   source: str) -> Hyperedge:
    """`v1,...,vk` starting at column `col` into a validated hyperedge."""
    vertices: List[int] = []
    offset = 0
    for piece in vertex_token.split(","):
        v = _parse_int(piece, raw, lineno, source, "vertex") if piece else None
        if v is None:
            raise HypergraphFormatError("empty vertex id", lineno, col + offset, source)
        if not 0 <= v < n:
            raise HypergraphFormatError(f"vertex {v} out of range for n={n}", lineno,
                                        col + offset, source)
        vertices.append(v)
        offset += len(piece) + 1
    if len(set(vertices)) != len(vertices):
        raise HypergraphFormatError("repeated vertex in hyperedge", lineno, col, source)
    try:
        return Hyperedge.from_vertices(vertices).validate(n, r_max)
    except (ArityError, VertexOutOfRangeError) as e:
        raise HypergraphFormatError(str(e), lineno, col, source) from None


def _content_lines(text: str) -> Iterable[Tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if _strip_comment(raw).strip():
            yield lineno, raw


def parse_hypergraph(text: str, source: str = "<input>") -> Hypergraph:
    lines = _content_lines(text)
    first = next(lines, None)
    if first is None:
        raise HypergraphFormatError("missing header `n <n> r <r_max>`", 1, 1, source)
    n, r_max = parse_header(first[1], first[0], source)
    H = Hypergraph(n, r_max=r_max)
    for lineno, raw in lines:
        _, edge, count = parse_edge_line(raw, lineno, n, r_max, source, ops="+")
        H.add_edge(edge, count)
    return H


def parse_stream(text: str, source: str = "<input>") -> Tuple[int, int, List[StreamUpdate]]:
    lines = _content_lines(text)
    first = next(lines, None)
    if first is None:
        raise HypergraphFormatError("missing header `n <n> r <r_max>`", 1, 1, source)
    n, r_max = parse_header(first[1], first[0], source)
    updates: List[StreamUpdate] = []
    for lineno, raw in lines:
        op, edge, count = parse_edge_line(raw, lineno, n, r_max, source, ops="+-")
        updates.extend(StreamUpdate(op, edge) for _ in range(count))
    return n, r_max, updates


def format_hypergraph(H: Hypergraph, r_max: Optional[int] = None) -> str:
    r = r_max or H.r_max or max((e.arity for e in H.edges), default=2)
    lines = [f"n {H.n} r {max(2, min(r, H.n)) if H.n >= 2 else r}"]
    for e, w in H.items():
        lines.append(f"+ {e}" if w == 1 else f"+ {e} {w}")
    return "\n".join(lines) + "\n"


def format_stream(n: int, r_max: int, updates: Iterable[StreamUpdate]) -> str:
    lines = [f"n {n} r {r_max}"]
    lines.extend(f"{u.op.value} {u.edge}" for u in updates)
    return "\n".join(lines) + "\n"


def format_sparsifier(output: SparsifierOutput) -> str:
    header = (f"n {output.n} r {output.r_max} eps {output.eps} eps_star {output.eps_star} "
              f"seed {output.seed_commitment or '-'}")
    if output.size_bound is not None:
        header += f" size_bound {output.size_bound}"
    lines = [header]
    lines.extend(_format_entry(entry) for entry in output.sorted_entries())
    return "\n".join(lines) + "\n"


def _format_entry(entry: SparsifierEntry) -> str:
    line = f"e {entry.edge} {entry.weight} {entry.stage}"
    return f"{line} {entry.copy}" if entry.copy else line


def _parse_fraction(token: str, raw: str, lineno: int, source: str, what: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise HypergraphFormatError(f"expected rational {what}, got {token!r}", lineno,
                                    _column_of(raw, token), source) from None


def _parse_sparsifier_header(raw: str, lineno: int, source: str) -> Dict[str, str]:
    tokens = _strip_comment(raw).split()
    if not tokens or len(tokens) % 2:
        raise HypergraphFormatError("sparsifier header must be `key value` pairs", lineno, 1, source)
    fields = dict(zip(tokens[::2], tokens[1::2]))
    for key in ("n", "r", "eps", "eps_star"):
        if key not in fields:
            raise HypergraphFormatError(f"sparsifier header is missing `{key}`", lineno, 1, source)
    return fields


def parse_sparsifier(text: str, source: str = "<input>") -> SparsifierOutput:
    lines = _content_lines(text)
    first = next(lines, None)
    if first is None:
        raise HypergraphFormatError("missing sparsifier header", 1, 1, source)
    lineno, raw = first
    fields = _parse_sparsifier_header(raw, lineno, source)
    n = _parse_int(fields["n"], raw, lineno, source, "vertex count")
    r_max = _parse_int(fields["r"], raw, lineno, source, "arity bound")
    if n < 2 or not 2 <= r_max <= n:
        raise HypergraphFormatError(f"invalid shape n={n} r={r_max}", lineno, 1, source)
    output = SparsifierOutput(
        n=n,
        r_max=r_max,
        eps=_parse_fraction(fields["eps"], raw, lineno, source, "eps"),
        eps_star=_parse_fraction(fields["eps_star"], raw, lineno, source, "eps_star"),
        seed_commitment="" if fields.get("seed", "-") == "-" else fields["seed"],
        size_bound=(_parse_int(fields["size_bound"], raw, lineno, source, "size bound")
                    if "size_bound" in fields else None),
    )
    seen = set()
    for lineno, raw in lines:
        tokens = _strip_comment(raw).split()
        if len(tokens) not in (4, 5) or tokens[0] != "e":
            raise HypergraphFormatError("expected `e v1,...,vk weight stage [copy]`", lineno, 1, source)
        col = _column_of(raw, tokens[1], raw.find("e") + 1)
        edge = parse_vertices(tokens[1], raw, col, lineno, n, r_max, source)
        copy = _parse_int(tokens[4], raw, lineno, source, "copy label") if len(tokens) == 5 else 0
        if copy < 0:
            raise HypergraphFormatError(f"copy label must be non-negative, got {copy}", lineno,
                                        _column_of(raw, tokens[4], col), source)
        if (edge, copy) in seen:
            raise HypergraphFormatError(f"edge {edge} copy {copy} listed twice", lineno, col, source)
        seen.add((edge, copy))
        weight = _parse_int(tokens[2], raw, lineno, source, "weight")
        stage = _parse_int(tokens[3], raw, lineno, source, "stage")
        if weight < 1:
            raise HypergraphFormatError(f"weight must be positive, got {weight}", lineno,
                                        _column_of(raw, tokens[2], col), source)
        if stage < 0:
            raise HypergraphFormatError(f"stage must be non-negative, got {stage}", lineno,
                                        _column_of(raw, tokens[3], col), source)
        output.add(edge, weight, stage, copy)
    return output
