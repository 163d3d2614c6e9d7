"""OpenQASM 3 export and re-import for the gate set of :mod:`blockenc.qcore`.

Multi-controlled gates keep their controls as ``ctrl @`` / ``negctrl @``
modifiers, one gate per line, operands listed controls first. PhaseZ has no
standard-library counterpart and is declared once as ``phasez(theta)``,
equal to ``rz(2 * theta)``.
"""

from __future__ import annotations

import json
import re

from .errors import InvalidGateError
from .qcore import Circuit, Gate

HEADER = "OPENQASM 3.0;"
_PHASEZ_DEF = "gate phasez(theta) a { rz(2 * theta) a; }"

_NAMES = {"h": "h", "x": "x", "y": "y", "z": "z", "ry": "ry", "rz": "rz",
          "phasez": "phasez", "p": "p", "swap": "swap"}
_KINDS = {v: k for k, v in _NAMES.items()}


def _gate_line(g: Gate) -> str:
    mods = "".join("ctrl @ " if v else "negctrl @ " for _, v in g.controls)
    params = f"({', '.join(repr(p) for p in g.params)})" if g.params else ""
    operands = [q for q, _ in g.controls] + list(g.targets)
    ops = ", ".join(f"q[{q}]" for q in operands)
    return f"{mods}{_NAMES[g.kind]}{params} {ops};"


def to_qasm(c: Circuit, metadata: dict | None = None) -> str:
    """Serialize ``c``; ``metadata`` goes into leading comment lines, sorted by key."""
    lines = [HEADER]
    for key in sorted(metadata or {}):
        lines.append(f"// {key}: {json.dumps(metadata[key])}")
    lines += ['include "stdgates.inc";', _PHASEZ_DEF, f"qubit[{c.width}] q;"]
    lines += [_gate_line(g) for g in c.gates]
    return "\n".join(lines) + "\n"


_LINE = re.compile(
    r"^(?P<mods>(?:(?:neg)?ctrl\s*@\s*)*)"
    r"(?P<name>[a-z]+)\s*(?:\((?P<params>[^)]*)\))?\s+(?P<ops>[^;]+);$"
)
_MOD = re.compile(r"(neg)?ctrl")
_QUBIT = re.compile(r"q\[(\d+)\]")


def from_qasm(text: str) -> Circuit:
    """Parse the dialect written by :func:`to_qasm` back into a Circuit."""
    width = None
    gates = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("//") or line.startswith(("OPENQASM", "include", "gate ")):
            continue
        m = re.fullmatch(r"qubit\[(\d+)\]\s+q;", line)
        if m:
            width = int(m.group(1))
            continue
        m = _LINE.match(line)
        if not m or m.group("name") not in _KINDS:
            raise InvalidGateError(f"cannot parse QASM line: {raw!r}")
        polarity = [0 if neg else 1 for neg in _MOD.findall(m.group("mods"))]
        qubits = [int(q) for q in _QUBIT.findall(m.group("ops"))]
        params = tuple(float(p) for p in m.group("params").split(",")) if m.group("params") else ()
        nctl = len(polarity)
        controls = tuple(zip(qubits[:nctl], polarity))
        gates.append(Gate(_KINDS[m.group("name")], tuple(qubits[nctl:]), controls, params))
    if width is None:
        raise InvalidGateError("missing qubit register declaration")
    return Circuit(width, tuple(gates))
