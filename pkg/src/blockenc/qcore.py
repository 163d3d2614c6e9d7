"""Gate/circuit IR, dense simulation and block-encoding verification.

Bit ordering is fixed for the whole package: qubit 0 is the most significant
bit of a basis index, so ``|j>`` on an n-qubit register puts ``j_{n-1}`` on
the lowest-numbered qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidGateError, WidthError

DEFAULT_TOL = 1e-12

_SQRT1_2 = 1.0 / math.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# kind -> (number of targets, number of real parameters)
GATE_KINDS = {
    "h": (1, 0),
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "ry": (1, 1),
    "rz": (1, 1),
    "phasez": (1, 1),
    "p": (1, 1),
    "swap": (2, 0),
}

_SELF_INVERSE = {"h", "x", "y", "z", "swap"}


def ry_matrix(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(phi):
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def phasez_matrix(phi):
    """``exp(-i phi Z)``; note: full angle, unlike :func:`rz_matrix`."""
    return np.diag([np.exp(-1j * phi), np.exp(1j * phi)])


def p_matrix(phi):
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


@dataclass(frozen=True)
class Gate:
    """One primitive operation.

    ``controls`` holds ``(qubit, value)`` pairs: value 1 is a closed (solid)
    control, value 0 an open control.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidGateError(f"unknown gate kind {self.kind!r}")
        ntarg, npar = GATE_KINDS[self.kind]
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), int(v)) for q, v in self.controls)
        )
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.targets) != ntarg:
            raise InvalidGateError(f"{self.kind} takes {ntarg} target(s)")
        if len(self.params) != npar:
            raise InvalidGateError(f"{self.kind} takes {npar} parameter(s)")
        if not all(math.isfinite(p) for p in self.params):
            raise InvalidGateError(f"non-finite parameter in {self.kind}")
        if any(v not in (0, 1) for _, v in self.controls):
            raise InvalidGateError("control values must be 0 (open) or 1 (closed)")
        qubits = self.qubits
        if len(set(qubits)) != len(qubits):
            raise InvalidGateError(f"overlapping qubits in {self}")
        if min(qubits) < 0:
            raise WidthError("negative qubit index")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    @property
    def control_qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls)

    def matrix(self) -> np.ndarray:
        """Target operator (without controls) in the target order."""
        k = self.kind
        if k == "h":
            return H
        if k == "x":
            return X
        if k == "y":
            return Y
        if k == "z":
            return Z
        if k == "swap":
            return SWAP
        (a,) = self.params
        if k == "ry":
            return ry_matrix(a)
        if k == "rz":
            return rz_matrix(a)
        if k == "phasez":
            return phasez_matrix(a)
        return p_matrix(a)

    def adjoint(self) -> "Gate":
        if self.kind in _SELF_INVERSE:
            return self
        return Gate(self.kind, self.targets, self.controls, tuple(-p for p in self.params))

    def with_controls(self, controls) -> "Gate":
        return Gate(self.kind, self.targets, self.controls + tuple(controls), self.params)

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return Gate(
            self.kind,
            tuple(mapping[q] for q in self.targets),
            tuple((mapping[q], v) for q, v in self.controls),
            self.params,
        )


# Convenience constructors; ``controls`` accepts (qubit, value) pairs.
def h(q, controls=()):
    return Gate("h", (q,), tuple(controls))


def x(q, controls=()):
    return Gate("x", (q,), tuple(controls))


def y(q, controls=()):
    return Gate("y", (q,), tuple(controls))


def z(q, controls=()):
    return Gate("z", (q,), tuple(controls))


def ry(q, theta, controls=()):
    return Gate("ry", (q,), tuple(controls), (theta,))


def rz(q, phi, controls=()):
    return Gate("rz", (q,), tuple(controls), (phi,))


def phasez(q, phi, controls=()):
    return Gate("phasez", (q,), tuple(controls), (phi,))


def phase(q, phi, controls=()):
    return Gate("p", (q,), tuple(controls), (phi,))


def swap(a, b, controls=()):
    return Gate("swap", (a, b), tuple(controls))


def closed(*qubits):
    return tuple((q, 1) for q in qubits)


def opened(*qubits):
    return tuple((q, 0) for q in qubits)


def pattern(qubits: Sequence[int], value: int):
    """Controls on ``qubits`` (MSB first) matching the integer ``value``."""
    k = len(qubits)
    return tuple((q, (value >> (k - 1 - i)) & 1) for i, q in enumerate(qubits))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.width < 0:
            raise WidthError("negative width")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.width:
                raise WidthError(f"{g} does not fit in width {self.width}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        if other.width != self.width:
            raise WidthError(f"cannot concatenate width {self.width} and {other.width}")
        return Circuit(self.width, self.gates + other.gates)

    def then(self, *others: "Circuit") -> "Circuit":
        return reduce(lambda a, b: a + b, others, self)

    def adjoint(self) -> "Circuit":
        return adjoint(self)

    def controlled(self, controls) -> "Circuit":
        return controlled(self, controls)

    def repeat(self, k: int) -> "Circuit":
        return Circuit(self.width, self.gates * k)

    def count(self, kind=None, min_controls=0) -> int:
        return sum(
            1
            for g in self.gates
            if (kind is None or g.kind == kind) and len(g.controls) >= min_controls
        )


def adjoint(c: Circuit) -> Circuit:
    return Circuit(c.width, tuple(g.adjoint() for g in reversed(c.gates)))


def controlled(c: Circuit, controls) -> Circuit:
    """Apply ``c`` only when every ``(qubit, value)`` control matches."""
    controls = tuple((int(q), int(v)) for q, v in controls)
    cq = {q for q, _ in controls}
    for g in c.gates:
        if cq & set(g.qubits):
            raise InvalidGateError(f"control qubits {sorted(cq)} collide with {g}")
    return Circuit(c.width, tuple(g.with_controls(controls) for g in c.gates))


def tensor_pad(c: Circuit, offset: int, width: int) -> Circuit:
    """Embed ``c`` into a wider circuit, shifting qubit q to q + offset."""
    if offset < 0 or offset + c.width > width:
        raise WidthError(f"cannot place width {c.width} at offset {offset} in {width}")
    return place(c, range(offset, offset + c.width), width)


def place(c: Circuit, qubits: Iterable[int], width: int) -> Circuit:
    """Embed ``c`` with its qubit q sent to ``qubits[q]``."""
    mapping = list(qubits)
    if len(mapping) != c.width:
        raise WidthError("qubit map length must equal circuit width")
    if len(set(mapping)) != len(mapping):
        raise WidthError("qubit map must be injective")
    return Circuit(width, tuple(g.remap(mapping) for g in c.gates))


# -- simulation -------------------------------------------------------------


def _check_fits(g: Gate, width: int):
    if max(g.qubits) >= width:
        raise WidthError(f"{g} does not fit in width {width}")


def _apply_gate_tensor(psi: np.ndarray, g: Gate, width: int) -> None:
    """In-place application on a tensor of shape (2,)*width + (batch,)."""
    idx = [slice(None)] * (width + 1)
    for q, v in g.controls:
        idx[q] = v
    idx = tuple(idx)
    sub = psi[idx]
    cset = sorted(g.control_qubits)
    axes = [q - sum(1 for c in cset if c < q) for q in g.targets]
    t = len(g.targets)
    op = g.matrix().reshape((2,) * (2 * t))
    out = np.tensordot(op, sub, axes=(list(range(t, 2 * t)), axes))
    out = np.moveaxis(out, list(range(t)), axes)
    psi[idx] = out


def apply(c: Circuit, state) -> np.ndarray:
    """Apply ``c`` to a state vector (or to the columns of a matrix)."""
    state = np.asarray(state, dtype=complex)
    dim = 1 << c.width
    if state.shape[0] != dim or state.ndim not in (1, 2):
        raise DimensionError(f"state of shape {state.shape} for width {c.width}")
    vec = state.ndim == 1
    psi = state.reshape((2,) * c.width + (-1,)).copy()
    for g in c.gates:
        _apply_gate_tensor(psi, g, c.width)
    out = psi.reshape(dim, -1)
    return out[:, 0] if vec else out


def circuit_unitary(c: Circuit) -> np.ndarray:
    return apply(c, np.eye(1 << c.width, dtype=complex))


def basis_state(index: int, width: int) -> np.ndarray:
    v = np.zeros(1 << width, dtype=complex)
    v[index] = 1.0
    return v


_PAULIS = (I2, X, Y, Z)


def _pauli_expansion(op: np.ndarray):
    """Coefficients of ``op`` in the Pauli basis, keyed by index tuples."""
    t = int(round(math.log2(op.shape[0])))
    terms = []
    for labels in np.ndindex(*(4,) * t):
        basis = reduce(np.kron, (_PAULIS[a] for a in labels))
        coef = np.trace(basis.conj().T @ op) / (1 << t)
        if abs(coef) > 1e-15:
            terms.append((labels, coef))
    return terms


def gate_unitary(g: Gate, width: int) -> np.ndarray:
    """Dense 2^width embedding of ``g`` built from Kronecker products.

    Independent of the tensor-contraction path used by :func:`apply`:
    U = (I - P) + P (op embedded), with P the control-pattern projector.
    """
    _check_fits(g, width)
    proj_factors = [I2] * width
    for q, v in g.controls:
        proj_factors[q] = np.diag([1.0 - v, float(v)]).astype(complex)
    proj = reduce(np.kron, proj_factors, np.eye(1, dtype=complex))
    embedded = np.zeros((1 << width, 1 << width), dtype=complex)
    for labels, coef in _pauli_expansion(g.matrix()):
        factors = [I2] * width
        for q, a in zip(g.targets, labels):
            factors[q] = _PAULIS[a]
        embedded += coef * reduce(np.kron, factors, np.eye(1, dtype=complex))
    eye = np.eye(1 << width, dtype=complex)
    return eye - proj + proj @ embedded


def circuit_unitary_by_products(c: Circuit) -> np.ndarray:
    """Slow reference: ordered product of :func:`gate_unitary` embeddings."""
    u = np.eye(1 << c.width, dtype=complex)
    for g in c.gates:
        u = gate_unitary(g, c.width) @ u
    return u


# -- block encodings --------------------------------------------------------


@dataclass(frozen=True)
class BlockEncoding:
    """A circuit claiming ``<0^m| U |0^m> = A / scale``.

    Ancillas are the leading ``m`` qubits; the system register is the last
    ``n`` qubits.
    """

    circuit: Circuit
    n: int
    m: int
    scale: float
    hermitian: bool = False
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.circuit.width != self.n + self.m:
            raise WidthError(
                f"circuit width {self.circuit.width} != n + m = {self.n + self.m}"
            )
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def width(self) -> int:
        return self.circuit.width

    def unitary(self) -> np.ndarray:
        return circuit_unitary(self.circuit)

    def block(self) -> np.ndarray:
        return block_extract(self.unitary(), self.m, self.n)

    def encoded(self) -> np.ndarray:
        """``scale * block``, i.e. the matrix this circuit claims to encode."""
        return self.scale * self.block()


def block_extract(u: np.ndarray, m: int, n: int) -> np.ndarray:
    dim = u.shape[0]
    if u.ndim != 2 or u.shape[1] != dim or dim & (dim - 1):
        raise DimensionError(f"matrix of shape {u.shape} is not 2^k square")
    if dim != 1 << (m + n):
        raise DimensionError(f"dimension {dim} != 2^(m+n) = {1 << (m + n)}")
    size = 1 << n
    return u[:size, :size]


def spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def encoding_error(be: BlockEncoding, a) -> float:
    a = np.asarray(a)
    if a.shape != (1 << be.n, 1 << be.n):
        raise DimensionError(f"target shape {a.shape} for n = {be.n}")
    return spectral_norm(a - be.encoded())


def unitarity_residual(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def phase_aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Max-norm distance after removing a global phase.

    The phase is read from the first entry of ``v`` whose magnitude exceeds
    1e-9 of ``max|v|``.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"shapes {u.shape} and {v.shape} differ")
    flat_v = v.ravel()
    flat_u = u.ravel()
    big = np.flatnonzero(np.abs(flat_v) > 1e-9 * np.max(np.abs(flat_v)))
    if big.size == 0:
        return float(np.max(np.abs(u)))
    i = big[0]
    ratio = flat_u[i] / flat_v[i]
    if abs(ratio) == 0:
        return float(np.max(np.abs(u - v)))
    return float(np.max(np.abs(u / (ratio / abs(ratio)) - v)))


def perturb_first_rotation(c: Circuit, delta: float) -> Circuit:
    """Copy of ``c`` with ``delta`` added to the first parameterized gate."""
    gates = list(c.gates)
    for i, g in enumerate(gates):
        if g.params:
            gates[i] = Gate(g.kind, g.targets, g.controls, (g.params[0] + delta,) + g.params[1:])
            return Circuit(c.width, tuple(gates))
    raise InvalidGateError("circuit has no parameterized gate to perturb")
