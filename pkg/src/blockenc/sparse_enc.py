"""Standard block encodings of structured sparse matrices.

A column-sparse matrix with at most s = 2^m nonzeros per column is encoded as

    U_A = (I (x) D_s (x) I) (I (x) O_C) O_A (I (x) D_s (x) I)

where D_s puts Hadamards on the m index qubits, O_A writes the value of the
l-th nonzero of column j into the amplitude of a flag qubit, and O_C moves
|l>|j> to |l>|c(j, l)> (the row of that nonzero). Projecting flag and index
qubits onto |0> leaves A / s.

Qubit layout, top to bottom: flag, l_{m-1} .. l_0, optional work qubits,
data register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import div2, left_shift, mul2, right_shift
from .errors import InfeasibleParametersError, WidthError
from .qcore import (
    BlockEncoding,
    Circuit,
    closed,
    controlled,
    h,
    opened,
    pattern,
    place,
    ry,
    tensor_pad,
    x,
)

OC_ORDERINGS = ("cjlcyc", "cjlcyc2")
OA_STYLES = ("multi_controlled", "uniformly_controlled")
VARIANTS = ("cyclic", "tridiagonal")


def _arccos_angle(value: float, what: str) -> float:
    """2 arccos(value); the flag amplitude cos(theta/2) then equals value."""
    if not -1.0 <= value <= 1.0 or not math.isfinite(value):
        raise InfeasibleParametersError(f"{what} = {value!r} lies outside [-1, 1]")
    return 2.0 * math.acos(value)


# -- parameter records and dense reference matrices -------------------------


@dataclass(frozen=True)
class CirculantParams:
    n: int
    alpha: float
    beta: float
    gamma: float
    variant: str = "cyclic"
    oc_ordering: str = "cjlcyc2"
    oa_style: str = "multi_controlled"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("circulant encodings need n >= 2")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.oc_ordering not in OC_ORDERINGS:
            raise ValueError(f"oc_ordering must be one of {OC_ORDERINGS}")
        if self.oa_style not in OA_STYLES:
            raise ValueError(f"oa_style must be one of {OA_STYLES}")

    def matrix(self) -> np.ndarray:
        if self.variant == "tridiagonal":
            return tridiagonal_matrix(self.n, self.alpha, self.beta, self.gamma)
        return circulant_matrix(self.n, self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class EbtreeParams:
    n: int
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("the extended binary tree needs n >= 2")

    def matrix(self) -> np.ndarray:
        return ebtree_matrix(self.n, self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class Sym2x2Params:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        for a in (self.alpha1, self.alpha2):
            if not abs(a) <= 1.0:
                raise InfeasibleParametersError(f"|{a}| > 1 in 2x2 family")

    @property
    def beta1(self) -> float:
        return math.sqrt(1.0 - self.alpha1**2)

    @property
    def beta2(self) -> float:
        return math.sqrt(1.0 - self.alpha2**2)

    @property
    def phi1(self) -> float:
        return math.acos(self.alpha1) + math.acos(self.alpha2)

    @property
    def phi2(self) -> float:
        return math.acos(self.alpha1) - math.acos(self.alpha2)

    def matrix(self) -> np.ndarray:
        return sym2x2_matrix(self.alpha1, self.alpha2)


def circulant_matrix(n, alpha, beta, gamma) -> np.ndarray:
    """alpha on the diagonal, gamma above it, beta below it, cyclic corners."""
    size = 1 << n
    a = np.zeros((size, size))
    for j in range(size):
        a[j, j] += alpha
        a[(j + 1) % size, j] += beta
        a[(j - 1) % size, j] += gamma
    return a


def tridiagonal_matrix(n, alpha, beta, gamma) -> np.ndarray:
    a = circulant_matrix(n, alpha, beta, gamma)
    size = 1 << n
    a[0, size - 1] = 0.0
    a[size - 1, 0] = 0.0
    return a


def ebtree_matrix(n, alpha, beta, gamma) -> np.ndarray:
    """Adjacency of a complete binary tree on vertices 1..N-1 with root 0 on top.

    Root 0 and the leaves (j >= N/2) weigh gamma, other vertices alpha, and
    every parent/child edge beta.
    """
    size = 1 << n
    a = np.zeros((size, size))
    a[0, 0] = gamma
    a[0, 1] = a[1, 0] = beta
    for j in range(1, size):
        a[j, j] = gamma if j >= size // 2 else alpha
        for child in (2 * j, 2 * j + 1):
            if child < size:
                a[child, j] = a[j, child] = beta
    return a


def sym2x2_matrix(alpha1, alpha2) -> np.ndarray:
    return np.array([[alpha1, alpha2], [alpha2, alpha1]], dtype=float)


# -- generic assembly --------------------------------------------------------


def diffusion(m: int, width: int, offset: int = 1) -> Circuit:
    return Circuit(width, tuple(h(q) for q in range(offset, offset + m)))


def assemble_sparse_encoding(
    oc: Circuit, oa: Circuit, m: int, n: int, work: int = 0, label: str = ""
) -> BlockEncoding:
    """Compose D_s, O_A, O_C, D_s into a block encoding of A / 2^m.

    ``oc`` acts on the index, work and data qubits (width m + work + n);
    ``oa`` additionally sees the flag as its qubit 0.
    """
    width = 1 + m + work + n
    if oa.width != width:
        raise WidthError(f"O_A width {oa.width} != {width}")
    if oc.width != width - 1:
        raise WidthError(f"O_C width {oc.width} != {width - 1}")
    ds = diffusion(m, width)
    oc_full = place(oc, range(1, width), width)
    circuit = ds.then(oa, oc_full, ds)
    return BlockEncoding(circuit, n=n, m=1 + m + work, scale=float(1 << m), label=label)


# -- uniformly controlled rotations -------------------------------------------


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def ucr_angles(thetas) -> np.ndarray:
    """Ladder angles phi with theta_l = sum_i (-1)^{popcount(l & g_i)} phi_i."""
    thetas = np.asarray(thetas, dtype=float)
    size = thetas.size
    if size == 0 or size & (size - 1):
        raise ValueError("number of angles must be a power of two")
    signs = np.array(
        [[(-1) ** bin(l & _gray(i)).count("1") for i in range(size)] for l in range(size)]
    )
    return signs.T @ thetas / size


def ucr_ry(thetas) -> Circuit:
    """Uniformly controlled Ry: target qubit 0, control register on qubits 1..k.

    Conditioned on the control register holding l, the target sees
    Ry(thetas[l]). Built as an Ry/CNOT ladder whose CNOT controls follow the
    Gray code.
    """
    phis = ucr_angles(thetas)
    size = phis.size
    k = size.bit_length() - 1
    if k == 0:
        return Circuit(1, (ry(0, float(phis[0])),))
    gates = []
    for i in range(size):
        gates.append(ry(0, float(phis[i])))
        changed = _gray(i) ^ _gray((i + 1) % size)
        bit = changed.bit_length() - 1
        gates.append(x(0, closed(1 + (k - 1 - bit))))
    return Circuit(k + 1, tuple(gates))


# -- circulant family --------------------------------------------------------


def _circulant_slots(p: CirculantParams):
    """(slot angles theta_0..theta_3, slot of the L shift, slot of the R shift)."""
    diag = _arccos_angle(p.alpha - 1.0, "alpha - 1")
    if not 0.0 < p.alpha < 2.0:
        raise InfeasibleParametersError("alpha must lie in (0, 2)")
    sub = _arccos_angle(p.beta, "beta")
    sup = _arccos_angle(p.gamma, "gamma")
    if p.oc_ordering == "cjlcyc2":
        # l=0 diagonal, l=1 j+1 (beta), l=2 j-1 (gamma), l=3 identity
        return (diag, sub, sup, 0.0), 1, 2
    # l=0 j-1 (gamma), l=1 diagonal, l=2 j+1 (beta), l=3 identity
    return (sup, diag, sub, 0.0), 2, 0


def circulant_oc(p: CirculantParams) -> Circuit:
    """O_C on [l_1, l_0, data]."""
    n = p.n
    width = 2 + n
    data = range(2, width)
    lsh = place(left_shift(n), data, width)
    rsh = place(right_shift(n), data, width)
    if p.oc_ordering == "cjlcyc2":
        # L on l_0 = 1 and R on l_1 = 1; for l = 3 the two shifts cancel
        return controlled(lsh, closed(1)) + controlled(rsh, closed(0))
    return controlled(rsh, pattern((0, 1), 0)) + controlled(lsh, pattern((0, 1), 2))


def circulant_oa(p: CirculantParams) -> Circuit:
    """O_A on [flag, l_1, l_0, data]; rotations depend on l (and corners for tridiagonal)."""
    thetas, l_slot, r_slot = _circulant_slots(p)
    n = p.n
    width = 3 + n
    if p.oa_style == "uniformly_controlled":
        c = place(ucr_ry(thetas), range(3), width)
    else:
        gates = [ry(0, thetas[l], pattern((1, 2), l)) for l in range(3)]
        c = Circuit(width, tuple(gates))
    if p.variant == "tridiagonal":
        # Top up the rotation to pi where the shift wraps around, so the
        # flag amplitude cos(pi/2) kills the two corner entries.
        data = tuple(range(3, width))
        top = (1 << n) - 1
        extra = (
            ry(0, math.pi - thetas[l_slot], pattern((1, 2), l_slot) + pattern(data, top)),
            ry(0, math.pi - thetas[r_slot], pattern((1, 2), r_slot) + pattern(data, 0)),
        )
        c = c + Circuit(width, extra)
    return c


def circulant_encoding(p: CirculantParams) -> BlockEncoding:
    """Block encoding of the banded circulant (or tridiagonal) matrix / 4."""
    label = "tridiagonal" if p.variant == "tridiagonal" else "circulant"
    return assemble_sparse_encoding(circulant_oc(p), circulant_oa(p), 2, p.n, label=label)


def tridiagonal_encoding(p: CirculantParams) -> BlockEncoding:
    if p.variant != "tridiagonal":
        p = CirculantParams(p.n, p.alpha, p.beta, p.gamma, "tridiagonal", p.oc_ordering, p.oa_style)
    return circulant_encoding(p)


# -- 2x2 symmetric family ----------------------------------------------------


def sym2x2_encoding(p: Sym2x2Params) -> BlockEncoding:
    """Three-qubit encoding of [[a1, a2], [a2, a1]] / 2.

    O_A is a one-control uniformly controlled rotation carrying
    2 arccos(a1) on l = 0 and 2 arccos(a2) on l = 1; O_C is a CNOT from l
    onto the data qubit.
    """
    oa = tensor_pad(ucr_ry((2 * math.acos(p.alpha1), 2 * math.acos(p.alpha2))), 0, 3)
    oc = Circuit(2, (x(1, closed(0)),))
    return assemble_sparse_encoding(oc, oa, 1, 1, label="sym2x2")


# -- extended binary tree ----------------------------------------------------

EBTREE_INDEX_QUBITS = 3


def ebtree_oc(p: EbtreeParams) -> Circuit:
    """O_C on [l_2, l_1, l_0, carry, data].

    l = 0: 2j, l = 1: 2j + 1, l = 2: j / 2, l = 3: (j - 1) / 2, l >= 4: j.
    Transitions leaving the tree (2j >= N, or halving an odd/even index of
    the wrong parity) end with the carry set, which removes them from the
    encoded block.
    """
    n = p.n
    width = EBTREE_INDEX_QUBITS + 1 + n
    idx = (0, 1, 2)
    carry_data = range(3, width)
    data = range(4, width)
    m2 = place(mul2(n + 1), carry_data, width)
    d2 = place(div2(n + 1), carry_data, width)
    lsh = place(left_shift(n), data, width)
    rsh = place(right_shift(n), data, width)
    return Circuit(width).then(
        controlled(m2, pattern(idx, 0)),
        controlled(m2, pattern(idx, 1)),
        controlled(lsh, pattern(idx, 1)),
        controlled(d2, pattern(idx, 2)),
        controlled(rsh, pattern(idx, 3)),
        controlled(d2, pattern(idx, 3)),
    )


def ebtree_oa(p: EbtreeParams) -> Circuit:
    """O_A on [flag, l_2, l_1, l_0, carry, data].

    The four slots with l_2 = 0 carry beta. The four identity slots
    (l_2 = 1) each add a quarter of the diagonal weight: alpha/4 for
    internal vertices, gamma/4 for leaves (top data bit set). The root
    already collects two beta hits (2*0 = 0 and 0/2 = 0), so its identity
    slots are rotated on to gamma/4 - beta/2 by an extra rotation
    controlled on j = 0.
    """
    n = p.n
    width = 1 + EBTREE_INDEX_QUBITS + 1 + n
    l2 = 1
    data = tuple(range(5, width))
    t0 = _arccos_angle(p.beta, "beta")
    t1 = _arccos_angle(p.alpha / 4, "alpha/4")
    t2 = _arccos_angle(p.gamma / 4, "gamma/4")
    t3 = _arccos_angle(p.gamma / 4 - p.beta / 2, "gamma/4 - beta/2") - t1
    gates = (
        ry(0, t0, opened(l2)),
        ry(0, t1, closed(l2) + opened(data[0])),
        ry(0, t2, closed(l2, data[0])),
        ry(0, t3, closed(l2) + opened(*data)),
    )
    return Circuit(width, gates)


def ebtree_encoding(p: EbtreeParams) -> BlockEncoding:
    """Block encoding of the extended-binary-tree adjacency matrix / 8.

    The carry qubit is an ancilla: the block is read with it in |0>.
    """
    return assemble_sparse_encoding(
        ebtree_oc(p), ebtree_oa(p), EBTREE_INDEX_QUBITS, p.n, work=1, label="ebtree"
    )
