"""Markov chains, the O_P oracle and quantum-walk block encodings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import null_space

from .arith import add_register
from .errors import DimensionError, InfeasibleParametersError
from .qcore import (
    BlockEncoding,
    Circuit,
    circuit_unitary,
    closed,
    opened,
    phase,
    phasez,
    place,
    ry,
    swap,
    x,
)
from .sparse_enc import circulant_matrix

STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class StochasticReport:
    square: bool
    nonnegative: bool
    max_row_sum_error: float
    ok: bool


def _square(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {p.shape}")
    return p


def check_stochastic(p, tol: float = STOCHASTIC_TOL) -> StochasticReport:
    p = _square(p)
    nonneg = bool(np.all(p >= -tol))
    err = float(np.max(np.abs(p.sum(axis=1) - 1.0))) if p.size else 0.0
    return StochasticReport(True, nonneg, err, nonneg and err <= tol)


def stationary_state(p) -> np.ndarray:
    """A probability vector pi with pi^T P = pi^T.

    When the fixed space has several dimensions (P = I, reducible chains),
    the uniform vector is projected onto it, which picks a canonical member.
    """
    p = _square(p)
    basis = null_space(p.T - np.eye(p.shape[0]), rcond=1e-10)
    if basis.shape[1] == 0:
        raise ValueError("no stationary vector found; is P stochastic?")
    uniform = np.full(p.shape[0], 1.0 / p.shape[0])
    pi = basis @ (basis.T @ uniform)
    if abs(pi.sum()) < 1e-14:
        pi = basis[:, 0]
    pi = pi / pi.sum()
    return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()


def discriminant(p) -> np.ndarray:
    """D_ij = sqrt(P_ij P_ji); similar to P when the chain is reversible."""
    p = _square(p)
    return np.sqrt(np.clip(p * p.T, 0.0, None))


def reversible_chain(weights) -> np.ndarray:
    """Random walk on a symmetric nonnegative weight matrix: P_ij = W_ij / sum_k W_ik.

    Its stationary distribution is proportional to the row sums of W, and
    detailed balance holds by construction.
    """
    w = _square(weights)
    if not np.allclose(w, w.T) or np.any(w < 0):
        raise ValueError("weights must be symmetric and nonnegative")
    return w / w.sum(axis=1, keepdims=True)


def classical_walk(p, v, k: int) -> np.ndarray:
    """Distribution after k steps of the chain started from ``v``: (P^T)^k v."""
    p = _square(p)
    v = np.asarray(v, dtype=float)
    if v.shape != (p.shape[0],):
        raise DimensionError("vector length does not match P")
    if np.any(v < -STOCHASTIC_TOL) or abs(v.sum() - 1.0) > STOCHASTIC_TOL:
        raise ValueError("v must be a probability vector")
    if k < 0:
        raise ValueError("k must be non-negative")
    w = v.copy()
    for _ in range(k):
        w = p.T @ w
    return w


def load_matrix(source) -> np.ndarray:
    """Dense matrix from whitespace-separated rows (a path or the text itself)."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        source = Path(source).read_text()
    rows = [line.split() for line in source.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise DimensionError("empty matrix text")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionError("rows have different lengths")
    return np.array([[float(v) for v in r] for r in rows])


def dump_matrix(p) -> str:
    p = np.asarray(p, dtype=float)
    return "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in p)


# -- circuits ---------------------------------------------------------------


def _check_weights(a, b, c):
    if min(a, b, c) <= 0:
        raise InfeasibleParametersError("weights must be positive")
    if abs(a + b + c - 1.0) > 1e-12:
        raise InfeasibleParametersError(f"weights sum to {a + b + c!r}, not 1")


def prep_circuit_K(alpha: float, beta: float, gamma: float, n: int) -> Circuit:
    """K|0^n> = sqrt(alpha)|0> + sqrt(beta)|1> + sqrt(gamma)|N-1>.

    Two rotations on the low qubits give amplitudes on |0>, |1>, |3>, and a
    multi-controlled X on the remaining qubits lifts |3> to |N-1>.
    """
    if n < 2:
        raise ValueError("K needs n >= 2")
    _check_weights(alpha, beta, gamma)
    lo, nxt = n - 1, n - 2
    t1 = 2 * math.atan(math.sqrt((beta + gamma) / alpha))
    t2 = 2 * math.atan(math.sqrt(gamma / beta))
    gates = [ry(lo, t1), ry(nxt, t2, closed(lo))]
    if n > 2:
        gates += [x(q, closed(nxt, lo)) for q in range(n - 2)]
    return Circuit(n, tuple(gates))


def stochastic_circulant(n: int, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Row-stochastic banded circulant: stay alpha, step down beta, step up gamma."""
    _check_weights(alpha, beta, gamma)
    return circulant_matrix(n, alpha, beta, gamma)


def op_oracle(alpha: float, beta: float, gamma: float, n: int) -> Circuit:
    """O_P|0^n>|j> = sum_k sqrt(P_jk)|k>|j> on 2n qubits, no extra ancilla.

    Row j of a circulant P is row 0 shifted by j, so prepare row 0 with K and
    add j into the first register.
    """
    k = place(prep_circuit_K(alpha, gamma, beta, n), range(n), 2 * n)
    return k + add_register(n)


def reflector_zpi(m: int, n: int) -> Circuit:
    """2 Pi - I with Pi the projector onto ancillas (first m qubits) in |0>.

    X . P(pi) . X with open controls flips the sign of |0^m>; the trailing
    e^{-i pi Z} = -I turns that into +1 on Pi and -1 elsewhere.
    """
    if m < 1:
        raise ValueError("need at least one ancilla")
    width = m + n
    ctl = opened(*range(1, m))
    gates = (x(0), phase(0, math.pi, ctl), x(0), phasez(0, math.pi))
    return Circuit(width, gates)


def register_swap(n: int) -> Circuit:
    return Circuit(2 * n, tuple(swap(k, n + k) for k in range(n)))


@dataclass(frozen=True)
class WalkOperators:
    op: Circuit
    up: BlockEncoding
    zpi: Circuit
    p: np.ndarray
    n: int


def up_encoding(alpha: float, beta: float, gamma: float, n: int) -> WalkOperators:
    """U_P = O_P^dagger SWAP O_P, a Hermitian block encoding of P at scale 1."""
    if not math.isclose(beta, gamma, rel_tol=0.0, abs_tol=1e-15):
        raise ValueError(
            "U_P encodes sqrt(P_ij P_ji); for beta != gamma that is the "
            "discriminant matrix, not P. Use discriminant(P) for the target."
        )
    p = stochastic_circulant(n, alpha, beta, gamma)
    op = op_oracle(alpha, beta, gamma, n)
    circuit = op.then(register_swap(n), op.adjoint())
    up = BlockEncoding(circuit, n=n, m=n, scale=1.0, hermitian=True, label="walk")
    return WalkOperators(op=op, up=up, zpi=reflector_zpi(n, n), p=p, n=n)


def walk_operator(w: WalkOperators, k: int) -> BlockEncoding:
    """(U_P Z_Pi)^k, whose block is T_k(P)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    step = w.zpi + w.up.circuit
    return BlockEncoding(step.repeat(k), n=w.n, m=w.n, scale=1.0, label=f"walk_T{k}")


def reflection_ur(w: WalkOperators) -> Circuit:
    """U_R = O_P Z_Pi O_P^dagger."""
    return w.op.adjoint().then(w.zpi, w.op)


def szegedy_operator(w: WalkOperators) -> Circuit:
    """One Szegedy step U_Z = (SWAP U_R)^2, a product of two reflections."""
    half = reflection_ur(w) + register_swap(w.n)
    return half + half


def szegedy_equivalence_error(w: WalkOperators) -> float:
    op = circuit_unitary(w.op)
    uz = circuit_unitary(szegedy_operator(w))
    lhs = op.conj().T @ uz @ op
    rhs = walk_operator(w, 2).unitary()
    return float(np.max(np.abs(lhs - rhs)))


def szegedy_equivalence_check(w: WalkOperators, tol: float = 1e-12) -> bool:
    """O_P^dagger U_Z O_P == (U_P Z_Pi)^2 as unitaries."""
    return szegedy_equivalence_error(w) <= tol
