"""Plain-text circuit diagrams."""

from __future__ import annotations

from .qcore import Circuit, Gate

_CLOSED = "●"
_OPEN = "○"
_OPLUS = "⊕"
_CROSS = "×"


def _fmt(a: float) -> str:
    return f"{a:.4g}"


def gate_label(g: Gate) -> str:
    k = g.kind
    if k in ("h", "x", "y", "z"):
        return k.upper()
    if k == "ry":
        return f"Ry({_fmt(g.params[0])})"
    if k == "rz":
        return f"Rz({_fmt(g.params[0])})"
    if k == "phasez":
        return f"eZ({_fmt(g.params[0])})"
    if k == "p":
        return f"P({_fmt(g.params[0])})"
    return "SWAP"


def _layers(c: Circuit) -> list[list[Gate]]:
    # greedy packing: a gate blocks every wire between its extreme qubits
    frontier = [0] * c.width
    layers: list[list[Gate]] = []
    for g in c.gates:
        lo, hi = min(g.qubits), max(g.qubits)
        col = max(frontier[lo : hi + 1])
        if col == len(layers):
            layers.append([])
        layers[col].append(g)
        for q in range(lo, hi + 1):
            frontier[q] = col + 1
    return layers


def _cells(g: Gate) -> dict[int, str]:
    cells = {}
    for q, v in g.controls:
        cells[q] = _CLOSED if v else _OPEN
    if g.kind == "swap":
        for q in g.targets:
            cells[q] = _CROSS
    elif g.kind == "x" and g.controls:
        cells[g.targets[0]] = _OPLUS
    else:
        cells[g.targets[0]] = f"[{gate_label(g)}]"
    return cells


def draw_ascii(c: Circuit) -> str:
    """Render ``c`` as layered text, one wire per qubit, top wire = qubit 0.

    Rows between wires carry the vertical connectors of multi-qubit gates.
    The output depends only on the gate list, so equal circuits render to
    identical strings.
    """
    if c.width == 0:
        return ""
    nrows = 2 * c.width - 1
    prefix_w = len(f"q{c.width - 1}: ")
    rows = [
        (f"q{r // 2}: ".ljust(prefix_w) if r % 2 == 0 else " " * prefix_w)
        for r in range(nrows)
    ]
    rows = [list(r) for r in rows]
    for layer in _layers(c):
        cell_map: dict[int, str] = {}
        bars: set[int] = set()
        for g in layer:
            cells = _cells(g)
            cell_map.update(cells)
            lo, hi = min(g.qubits), max(g.qubits)
            if hi > lo:
                for r in range(2 * lo + 1, 2 * hi):
                    bars.add(r)
        width = max(len(s) for s in cell_map.values()) + 2
        for r in range(nrows):
            if r % 2 == 0:
                q = r // 2
                if q in cell_map:
                    text = cell_map[q].center(width, "─")
                elif r in bars:
                    text = "┼".center(width, "─")
                else:
                    text = "─" * width
            else:
                text = ("│" if r in bars else " ").center(width)
            rows[r].extend(text)
            rows[r].append("─" if r % 2 == 0 else " ")
    return "\n".join("".join(r).rstrip() for r in rows) + "\n"
