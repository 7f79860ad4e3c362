"""Canonical trace and schedule serialization.

Byte determinism is part of the contract: floats render with 9 significant
digits via %g, an absent distance is an empty CSV field or JSON null, and
JSON output is one object per line with keys in column order.  Rerunning
the same seed must reproduce files exactly, so everything here is
hand-rendered rather than delegated to a serializer with its own float
formatting.

Rows may be BlockTrace/PhaseState values or plain mappings with the same
field names (as returned by the HTTP service), so the CLI can serialize
without reconstructing domain objects.
"""

from __future__ import annotations

from dataclasses import asdict, is_dataclass
from typing import Iterable, Mapping

from .window import PhaseState

TRACE_COLUMNS = (
    "block_index",
    "first_frame",
    "segment_index",
    "age",
    "distance",
    "window",
    "read_budget",
    "bridge_norm",
    "switch_flag",
    "anchors_count",
)

SCHEDULE_COLUMNS = ("t", "segment", "age", "distance", "w_post", "w_pre", "w", "window")


def fmt9(x: float) -> str:
    """%.9g: enough digits to pin behavior, stable across runs."""
    return "%.9g" % float(x)


def _as_mapping(row) -> Mapping:
    if isinstance(row, Mapping):
        return row
    if is_dataclass(row):
        return asdict(row)
    raise TypeError(f"cannot serialize row of type {type(row)!r}")


def schedule_row(ps: PhaseState) -> dict:
    """PhaseState to the canonical schedule-row mapping."""
    return {
        "t": ps.t,
        "segment": ps.segment_index,
        "age": ps.age,
        "distance": ps.distance,
        "w_post": ps.w_post,
        "w_pre": ps.w_pre,
        "w": ps.w,
        "window": ps.window,
    }


def trace_csv_lines(traces: Iterable) -> list[str]:
    lines = [",".join(TRACE_COLUMNS)]
    for t in traces:
        row = _as_mapping(t)
        distance = row["distance"]
        lines.append(
            ",".join(
                (
                    str(row["block_index"]),
                    str(row["first_frame"]),
                    str(row["segment_index"]),
                    str(row["age"]),
                    "" if distance is None else str(distance),
                    str(row["window"]),
                    str(row["read_budget"]),
                    fmt9(row["bridge_norm"]),
                    "true" if row["switch_flag"] else "false",
                    str(row["anchors_count"]),
                )
            )
        )
    return lines


def trace_json_lines(traces: Iterable) -> list[str]:
    lines = []
    for t in traces:
        row = _as_mapping(t)
        distance = row["distance"]
        parts = (
            f'"block_index": {row["block_index"]}',
            f'"first_frame": {row["first_frame"]}',
            f'"segment_index": {row["segment_index"]}',
            f'"age": {row["age"]}',
            f'"distance": {"null" if distance is None else distance}',
            f'"window": {row["window"]}',
            f'"read_budget": {row["read_budget"]}',
            f'"bridge_norm": {fmt9(row["bridge_norm"])}',
            f'"switch_flag": {"true" if row["switch_flag"] else "false"}',
            f'"anchors_count": {row["anchors_count"]}',
        )
        lines.append("{" + ", ".join(parts) + "}")
    return lines


def schedule_csv_lines(states: Iterable) -> list[str]:
    lines = [",".join(SCHEDULE_COLUMNS)]
    for s in states:
        row = schedule_row(s) if isinstance(s, PhaseState) else _as_mapping(s)
        distance = row["distance"]
        lines.append(
            ",".join(
                (
                    str(row["t"]),
                    str(row["segment"]),
                    str(row["age"]),
                    "" if distance is None else str(distance),
                    fmt9(row["w_post"]),
                    fmt9(row["w_pre"]),
                    fmt9(row["w"]),
                    str(row["window"]),
                )
            )
        )
    return lines


def render(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render(lines))
