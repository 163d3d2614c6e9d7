"""Hermitian block encodings U = W^dagger S W of Hermitian sparse matrices.

Layout (width 2 + 2n): flag_1, flag_2, row register (n qubits, the index l
lives in its low m qubits), column register (n qubits).

    W = O_C . (O_A on flag_2) . D_s
    S = SWAP(flag_1, flag_2) (x) SWAP(row register, column register)

S is a Hermitian involution, so U is Hermitian for any O_A and O_C.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .arith import add_register, right_shift
from .errors import DimensionError, InfeasibleParametersError, WidthError
from .qcore import BlockEncoding, Circuit, h, pattern, phase, place, ry, swap, x

TAU = 2.0 * math.pi


def sqrt_entry(a: complex) -> complex:
    """sqrt|a| * exp(i theta / 2) with theta = arg(a) taken in [0, 2 pi)."""
    a = complex(a)
    r = abs(a)
    if r > 1.0 + 1e-15:
        raise InfeasibleParametersError(f"|{a}| > 1 cannot be a flag amplitude")
    theta = cmath.phase(a) % TAU if r else 0.0
    return math.sqrt(r) * cmath.exp(0.5j * theta)


def hermitian_sqrt(a) -> np.ndarray:
    """Entrywise roots S with conj(S[j, i]) * S[i, j] == A[i, j].

    The bra/ket pairing in U = W^dagger S W multiplies the loaded amplitude of
    (i, j) by the conjugated amplitude of (j, i). A single branch for every
    entry returns -A_ij off the positive real axis, so the roots are split
    antisymmetrically: the lower triangle takes the principal root (phase in
    (-pi, pi]) and the upper triangle its conjugate. Diagonal entries must be
    real and non-negative.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("expected a square matrix")
    if not np.allclose(a, a.conj().T, atol=1e-12):
        raise ValueError("matrix is not Hermitian")
    if np.any(np.abs(a) > 1 + 1e-15):
        raise InfeasibleParametersError("entries must satisfy |A_ij| <= 1")
    if np.any(a.diagonal().real < -1e-15):
        raise InfeasibleParametersError("diagonal entries must be non-negative")
    s = np.sqrt(np.abs(a)) * np.exp(0.5j * np.angle(a))
    upper = np.triu_indices(a.shape[0], 1)
    s[upper] = s.T[upper].conj()
    return s


def amplitude_loader(amps, controls: list[int], width: int, target: int = 0) -> Circuit:
    """Set the |0> amplitude of ``target`` to amps[k] when ``controls`` hold k.

    Ry(2 arccos|a|) fixes the magnitude. A complex phase is put on the |0>
    component with X . P(arg a) . X, all under the same control pattern.
    """
    amps = np.asarray(amps, dtype=complex).ravel()
    if amps.size != 1 << len(controls):
        raise DimensionError("need one amplitude per control pattern")
    gates = []
    for k, a in enumerate(amps):
        mag = abs(a)
        if mag > 1 + 1e-15:
            raise InfeasibleParametersError(f"amplitude {a} has modulus > 1")
        ctl = pattern(controls, k)
        theta = 2.0 * math.acos(min(mag, 1.0))
        if theta:
            gates.append(ry(target, theta, ctl))
        phi = cmath.phase(a) if mag else 0.0
        if phi:
            gates += [x(target, ctl), phase(target, phi, ctl), x(target, ctl)]
    return Circuit(width, tuple(gates))


def hermitian_sparse_encoding(oc_sym: Circuit, oa_sqrt: Circuit, n: int, m: int) -> BlockEncoding:
    """Assemble W^dagger S W.

    ``oc_sym`` acts on [row register, column register] and must map
    |l>|j> to |c(j, l)>|j>. ``oa_sqrt`` acts on [flag, row register,
    column register] and loads sqrt(A_{c(j,l), j}) into the flag's |0>
    amplitude.
    """
    if not 0 <= m <= n:
        raise WidthError("need 0 <= m <= n")
    if oc_sym.width != 2 * n:
        raise WidthError(f"O_C width {oc_sym.width} != {2 * n}")
    if oa_sqrt.width != 1 + 2 * n:
        raise WidthError(f"O_A width {oa_sqrt.width} != {1 + 2 * n}")
    width = 2 + 2 * n
    row = range(2, 2 + n)
    ds = Circuit(width, tuple(h(q) for q in row[n - m :]))
    w = ds.then(place(oa_sqrt, range(1, width), width), place(oc_sym, range(2, width), width))
    s_layer = Circuit(width, (swap(0, 1),) + tuple(swap(2 + k, 2 + n + k) for k in range(n)))
    circuit = w.then(s_layer, w.adjoint())
    return BlockEncoding(
        circuit, n=n, m=n + 2, scale=float(1 << m), hermitian=True, label="hermitian"
    )


def circulant_oc_sym(n: int) -> Circuit:
    """|l>|j> -> |l + j - 1 mod 2^n>|j>: R on the row register, then add j."""
    return place(right_shift(n), range(n), 2 * n) + add_register(n)


def hermitian_circulant_amplitudes(alpha: float, beta: float) -> tuple[float, ...]:
    """Flag amplitudes for slots l = 0..3 (rows j-1, j, j+1, unused j+2)."""
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0.0 <= v <= 1.0:
            raise InfeasibleParametersError(f"{name} = {v} outside [0, 1]")
    return (math.sqrt(beta), math.sqrt(alpha), math.sqrt(beta), 0.0)


def hermitian_circulant_oa(alpha: float, beta: float, n: int) -> Circuit:
    """O_A on [flag, row register, column register], controlled on l only.

    Angles come from cos(theta/2) = sqrt(entry). The diagonal rotation gets
    an extra 2 pi, which flips the sign of its amplitude; the flip appears in
    both the bra and the ket and cancels. The unused slot l = 3 is rotated by
    pi so it loads amplitude 0, which keeps n = 2 (where j + 2 wraps onto
    j - 2) correct.
    """
    amps = hermitian_circulant_amplitudes(alpha, beta)
    thetas = [2.0 * math.acos(a) for a in amps]
    thetas[1] += TAU
    width = 1 + 2 * n
    l_qubits = (n - 1, n)  # low two qubits of the row register
    gates = tuple(ry(0, t, pattern(l_qubits, l)) for l, t in enumerate(thetas))
    return Circuit(width, gates)


def hermitian_circulant_encoding(alpha: float, beta: float, n: int, gamma: float | None = None) -> BlockEncoding:
    """Hermitian encoding of the symmetric banded circulant (beta == gamma) / 4."""
    if n < 2:
        raise ValueError("the circulant Hermitian encoding needs n >= 2")
    if gamma is not None and not math.isclose(gamma, beta, rel_tol=0, abs_tol=1e-15):
        raise ValueError("the Hermitian scheme needs beta == gamma")
    return hermitian_sparse_encoding(
        circulant_oc_sym(n), hermitian_circulant_oa(alpha, beta, n), n, 2
    )
