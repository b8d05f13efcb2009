"""Evaluate the symbolic matrix tables stored under ``golden/``.

Entries are sums of terms ``[+-] [i*] name[#]`` (or ``0``).  A name such as
``a14`` is looked up in an assignment mapping names to Supernumbers; ``#``
applies the superstar.
"""

from __future__ import annotations

import re
from importlib import resources


from .grassmann import AlgebraContext, Supernumber
from .supermatrix import Supermatrix

_TERM = re.compile(r"\s*([+-])?\s*(i\*)?\s*([A-Za-z]+\d*)(#)?\s*")


def parse_entry(text: str):
    """List of (coefficient, name, starred) terms."""
    text = text.strip()
    if text == "0":
        return []
    terms = []
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse symbolic entry {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = sign * (1j if m.group(2) else 1)
        terms.append((coeff, m.group(3), bool(m.group(4))))
        pos = m.end()
    return terms


def load_table(name: str):
    if not name.endswith(".txt"):
        name += ".txt"
    text = resources.files("superqubits.golden").joinpath(name).read_text()
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("%"):
            continue
        rows.append([parse_entry(cell) for cell in line.split(",")])
    return rows


def symbols(table) -> set:
    return {name for row in table for cell in row for _, name, _ in cell}


def evaluate(table, assignment: dict, ctx: AlgebraContext, row_parity, col_parity=None) -> Supermatrix:
    col_parity = row_parity if col_parity is None else col_parity
    cells = []
    for row in table:
        out_row = []
        for cell in row:
            total = ctx.zero()
            for coeff, name, starred in cell:
                value = assignment.get(name)
                if value is None:
                    continue
                if not isinstance(value, Supernumber):
                    value = ctx.scalar(value)
                total = total + (value.superstar() if starred else value) * coeff
            out_row.append(total)
        cells.append(out_row)
    return Supermatrix.from_entries(ctx, row_parity, col_parity, cells)
