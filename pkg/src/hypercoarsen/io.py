"""hMETIS ``.hgr`` hypergraphs, hMETIS-style partition files and run reports.

Readers accept ``bytes`` or ``str``; writers return ``bytes``.  Ids are
1-based in files and 0-based in memory.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Hypergraph, Partition
from .exceptions import ParseError

FMT_PLAIN, FMT_EDGE_WEIGHTS, FMT_NODE_WEIGHTS, FMT_BOTH = 0, 1, 10, 11
_FMT_CODES = (FMT_PLAIN, FMT_EDGE_WEIGHTS, FMT_NODE_WEIGHTS, FMT_BOTH)


@dataclass(frozen=True)
class HmetisHeader:
    num_edges: int
    num_nodes: int
    fmt: int = FMT_PLAIN

    @property
    def has_edge_weights(self) -> bool:
        return self.fmt in (FMT_EDGE_WEIGHTS, FMT_BOTH)

    @property
    def has_node_weights(self) -> bool:
        return self.fmt in (FMT_NODE_WEIGHTS, FMT_BOTH)


def _text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        try:
            return data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError(f"non-ASCII input: {exc}") from None
    return data


def _content_lines(text: str):
    """Yield ``(lineno, tokens)`` for non-blank, non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        yield lineno, line.split()


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"malformed {what} {tok!r}", lineno) from None


def _weight(tok: str, lineno: int, what: str) -> float:
    try:
        w = float(int(tok))
    except ValueError:
        try:
            w = float(tok)
        except ValueError:
            raise ParseError(f"malformed {what} {tok!r}", lineno) from None
    if not math.isfinite(w) or w <= 0:
        raise ParseError(f"{what} must be positive, got {tok!r}", lineno)
    return w


def _parse_header(tokens, lineno) -> HmetisHeader:
    if len(tokens) not in (2, 3):
        raise ParseError("header must be 'num_edges num_nodes [fmt]'", lineno)
    e = _int(tokens[0], lineno, "edge count")
    v = _int(tokens[1], lineno, "node count")
    fmt = _int(tokens[2], lineno, "format code") if len(tokens) == 3 else FMT_PLAIN
    if e < 0 or v < 1:
        raise ParseError("edge count must be >= 0 and node count >= 1", lineno)
    if fmt not in _FMT_CODES:
        raise ParseError(f"unknown format code {fmt}", lineno)
    return HmetisHeader(e, v, fmt)


def read_hmetis(data) -> Hypergraph:
    """Parse an hMETIS hypergraph.  Duplicate pins are dropped with a warning."""
    lines = list(_content_lines(_text(data)))
    if not lines:
        raise ParseError("empty input")
    header = _parse_header(lines[0][1], lines[0][0])
    body = lines[1:]
    expected = header.num_edges + (header.num_nodes if header.has_node_weights else 0)
    if len(body) < expected:
        last = body[-1][0] if body else lines[0][0]
        raise ParseError(f"expected {expected} lines after the header, found {len(body)}", last)
    if len(body) > expected:
        raise ParseError(f"unexpected extra line (header announces {expected})", body[expected][0])

    eptr = [0]
    pins: list[int] = []
    weights: list[float] = []
    for lineno, toks in body[:header.num_edges]:
        if header.has_edge_weights:
            weights.append(_weight(toks[0], lineno, "hyperedge weight"))
            toks = toks[1:]
        if not toks:
            raise ParseError("hyperedge without pins", lineno)
        seen = set()
        for t in toks:
            p = _int(t, lineno, "pin id")
            if not 1 <= p <= header.num_nodes:
                raise ParseError(f"pin id {p} outside 1..{header.num_nodes}", lineno)
            if p in seen:
                warnings.warn(f"line {lineno}: duplicate pin {p} dropped", stacklevel=2)
                continue
            seen.add(p)
            pins.append(p - 1)
        eptr.append(len(pins))

    node_weights = None
    if header.has_node_weights:
        node_weights = []
        for lineno, toks in body[header.num_edges:]:
            if len(toks) != 1:
                raise ParseError("node weight line must hold exactly one value", lineno)
            node_weights.append(_weight(toks[0], lineno, "node weight"))
    return Hypergraph(header.num_nodes, eptr, pins,
                      weights if header.has_edge_weights else None, node_weights)


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(x)


def write_hmetis(h: Hypergraph) -> bytes:
    """Canonical hMETIS text using the smallest format code that keeps all weights."""
    ew = not np.all(h.edge_weights == 1.0)
    nw = not np.all(h.node_weights == 1.0)
    fmt = (FMT_EDGE_WEIGHTS if ew else 0) + (FMT_NODE_WEIGHTS if nw else 0)
    out = [f"{h.num_edges} {h.num_nodes}" + (f" {fmt}" if fmt else "")]
    for e in range(h.num_edges):
        toks = [format_number(h.edge_weights[e])] if ew else []
        toks.extend(str(p + 1) for p in h.edge(e))
        out.append(" ".join(toks))
    if nw:
        out.extend(format_number(w) for w in h.node_weights)
    return ("\n".join(out) + "\n").encode("ascii")


def write_partition(p: Partition) -> bytes:
    return "".join(f"{b}\n" for b in p.block_of.tolist()).encode("ascii")


def read_partition(data, num_nodes: int, k: int | None = None, epsilon: float = 0.0) -> Partition:
    """Parse one block id per line.  ``k`` defaults to ``max(block) + 1``."""
    lines = list(_content_lines(_text(data)))
    if len(lines) != num_nodes:
        where = lines[-1][0] if lines else None
        raise ParseError(f"expected {num_nodes} block ids, found {len(lines)}", where)
    blocks = []
    for lineno, toks in lines:
        if len(toks) != 1:
            raise ParseError("partition line must hold exactly one block id", lineno)
        b = _int(toks[0], lineno, "block id")
        if b < 0 or (k is not None and b >= k):
            raise ParseError(f"block id {b} out of range", lineno)
        blocks.append(b)
    if k is None:
        k = max(blocks) + 1 if blocks else 1
    return Partition(np.array(blocks, dtype=np.int64), k, epsilon)


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items() if v is not None}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return int(f) if f.is_integer() and abs(f) < 2 ** 53 else f
    if isinstance(value, Path):
        return str(value)
    return value


def write_report(metrics: dict) -> bytes:
    """Deterministic report: sorted ``key: value`` lines, then a JSON block.

    Entries whose value is ``None`` are omitted.
    """
    clean = _plain(metrics)
    lines = []
    for key in sorted(clean):
        val = clean[key]
        text = json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else \
            ("true" if val is True else "false" if val is False else str(val))
        lines.append(f"{key}: {text}")
    body = "\n".join(lines)
    block = json.dumps(clean, sort_keys=True, indent=2)
    return f"{body}\n\n{block}\n".encode("ascii")


def load_hypergraph(path) -> Hypergraph:
    return read_hmetis(Path(path).read_bytes())


def save_hypergraph(h: Hypergraph, path) -> None:
    Path(path).write_bytes(write_hmetis(h))
