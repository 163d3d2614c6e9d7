"""Reversible integer arithmetic on computational-basis registers.

Every constructor returns a permutation circuit made of (multi-controlled)
X and SWAP gates. Registers are MSB-first: qubit 0 of a register holds its
most significant bit.
"""

from __future__ import annotations

import numpy as np

from .qcore import Circuit, circuit_unitary, closed, place, swap, x


def _check_n(n):
    if n < 1:
        raise ValueError("register size must be at least 1")


def left_shift(n: int) -> Circuit:
    """|j> -> |j+1 mod 2^n>: the carry cascade, most significant bit first."""
    _check_n(n)
    gates = [x(q, closed(*range(q + 1, n))) for q in range(n)]
    return Circuit(n, tuple(gates))


def right_shift(n: int) -> Circuit:
    """|j> -> |j-1 mod 2^n>."""
    return left_shift(n).adjoint()


def shift_power(n: int, j: int) -> Circuit:
    """L^j built from the binary digits of j: L_n^{2^k} = L_{n-k} on the top n-k qubits."""
    _check_n(n)
    j %= 1 << n
    c = Circuit(n)
    for k in range(n):
        if (j >> k) & 1:
            c = c + place(left_shift(n - k), range(n - k), n)
    return c


def shift_square_identity_check(n: int) -> bool:
    """Check L_n^2 == L_{n-1} (x) I_2 exactly."""
    if n < 2:
        raise ValueError("identity needs n >= 2")
    ln = circuit_unitary(left_shift(n)).real
    lhs = ln @ ln
    rhs = np.kron(circuit_unitary(left_shift(n - 1)).real, np.eye(2))
    return bool(np.array_equal(np.rint(lhs), rhs) and np.allclose(lhs, rhs, atol=1e-14))


def add_register(n: int) -> Circuit:
    """|l>|j> -> |l+j mod 2^n>|j> on 2n qubits (target register first).

    Bit j_k of the control register (a closed control) drives L_{n-k} on the
    leading n-k qubits of the target register, which adds 2^k.
    """
    _check_n(n)
    gates = []
    for k in range(n):
        ctrl = (n + (n - 1 - k), 1)
        for g in left_shift(n - k).gates:
            gates.append(g.with_controls((ctrl,)))
    return Circuit(2 * n, tuple(gates))


def subtract_register(n: int) -> Circuit:
    """|l>|j> -> |l-j mod 2^n>|j>."""
    return add_register(n).adjoint()


def mul2(n_plus_1: int) -> Circuit:
    """Carry qubit 0 on top of n data qubits: |0>|j> -> |j_{n-1}>|2j mod 2^n>."""
    if n_plus_1 < 2:
        raise ValueError("mul2 needs a carry plus at least one data qubit")
    gates = [swap(q, q + 1) for q in range(n_plus_1 - 1)]
    return Circuit(n_plus_1, tuple(gates))


def div2(n_plus_1: int) -> Circuit:
    """Inverse of :func:`mul2`; for odd j the low bit lands on the carry."""
    return mul2(n_plus_1).adjoint()
