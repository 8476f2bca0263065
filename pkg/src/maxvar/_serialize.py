"""Deterministic JSON/number rendering used by reports and the CLI.

Numbers are printed with 17 significant digits so every double round-trips
bit-exactly; key order is insertion order, never hash order.
"""

from __future__ import annotations

import json


def format_number(x: float | int) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{x:.17g}"


def render_json(doc, indent: int = 2) -> str:
    """Render dicts/lists/str/float/int/bool/None with stable formatting."""
    out: list[str] = []
    _render(doc, out, 0, indent)
    out.append("\n")
    return "".join(out)


def _render(node, out: list[str], level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if isinstance(node, dict):
        if not node:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(node.items()):
            out.append(f"{pad}{json.dumps(str(key))}: ")
            _render(value, out, level + 1, indent)
            out.append(",\n" if i + 1 < len(node) else "\n")
        out.append(f"{close_pad}}}")
    elif isinstance(node, (list, tuple)):
        if not len(node):
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(node):
            out.append(pad)
            _render(value, out, level + 1, indent)
            out.append(",\n" if i + 1 < len(node) else "\n")
        out.append(f"{close_pad}]")
    elif isinstance(node, str):
        out.append(json.dumps(node))
    elif node is None:
        out.append("null")
    elif isinstance(node, (bool, int, float)):
        out.append(format_number(node))
    else:
        raise TypeError(f"cannot serialize {type(node).__name__}")
