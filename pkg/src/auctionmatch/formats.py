"""Text form of solver output: ``m``/``d``/``s`` lines, plus move traces."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

from .auction import MoveRecord, SolveResult
from .graph import BipartiteGraph, ParseError, format_weight


def format_result(result: SolveResult, graph: BipartiteGraph) -> str:
    lines = []
    for u, v in result.matching.pairs():
        lines.append(f"m {u + 1} {v + 1} {format_weight(graph.weight(u, v))}\n")
    for u in result.discarded:
        lines.append(f"d {u + 1}\n")
    lines.append(
        f"s weight {format_weight(result.total_weight)} matched {result.matched} "
        f"discarded {len(result.discarded)} moves {result.moves}\n"
    )
    return "".join(lines)


def format_trace(trace: list[MoveRecord]) -> str:
    """One ``t`` line per move: index, left, right, label before/after,
    displaced left vertex (0 if none), locked flag. Vertices are 1-based."""
    out = io.StringIO()
    for r in trace:
        disp = 0 if r.displaced is None else r.displaced + 1
        out.write(
            f"t {r.index} {r.left + 1} {r.right + 1} {r.label_before!r} "
            f"{r.label_after!r} {disp} {int(r.locked)}\n"
        )
    return out.getvalue()


@dataclass
class MatchingFile:
    pairs: list[tuple[int, int, float, int]] = field(default_factory=list)  # u, v, w, lineno
    discarded: list[tuple[int, int]] = field(default_factory=list)  # u, lineno
    summary: Optional[dict[str, str]] = None
    summary_line: int = 0


def parse_matching(text: str) -> MatchingFile:
    """Read ``m``/``d``/``s`` lines (0-based indices in the result).

    Lines starting with ``c`` or ``a`` (audit verdicts) are skipped.
    """
    mf = MatchingFile()
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        toks = raw.split()
        if not toks or toks[0] in ("c", "a"):
            continue
        tag = toks[0]
        try:
            if tag == "m" and len(toks) == 4:
                mf.pairs.append((int(toks[1]) - 1, int(toks[2]) - 1, float(toks[3]), lineno))
            elif tag == "d" and len(toks) == 2:
                mf.discarded.append((int(toks[1]) - 1, lineno))
            elif tag == "s" and len(toks) % 2 == 1:
                if mf.summary is not None:
                    raise ParseError("duplicate summary line", lineno)
                mf.summary = dict(zip(toks[1::2], toks[2::2]))
                mf.summary_line = lineno
            else:
                raise ParseError(f"unrecognized line {raw.strip()!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    return mf
