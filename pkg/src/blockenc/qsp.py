"""Quantum signal processing: evaluation, phase solving and QET circuits.

QSP convention used throughout::

    U_Phi(t) = e^{i phi_0 Z} prod_{j=1}^{d} [ U(t) e^{i phi_j Z} ],
    U(t) = [[t, sqrt(1-t^2)], [sqrt(1-t^2), -t]],

and p(t) is the (0, 0) entry.

The solver works internally with the W(t) = e^{i arccos(t) X} convention,
where symmetric phases and the (pi/4, 0, ..., 0, pi/4) starting point are
well conditioned, and maps the result back. Since
U(t) = -i e^{i pi/4 Z} W(t) e^{i pi/4 Z}, shifting the interior phases by
-pi/2 and both end phases by (d - 1) pi / 4 gives identical p(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import least_squares

from .errors import DimensionError, InvalidTargetError, PhaseSolverError
from .qcore import BlockEncoding, Circuit, opened, phasez, h, place, x

GRID_POINTS = 1001


@dataclass(frozen=True)
class PhaseFactors:
    phases: tuple[float, ...]

    def __post_init__(self):
        ph = tuple(float(p) for p in self.phases)
        if not ph:
            raise ValueError("need at least one phase")
        if not all(math.isfinite(p) for p in ph):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", ph)

    @property
    def degree(self) -> int:
        return len(self.phases) - 1

    def __len__(self):
        return len(self.phases)

    def __iter__(self):
        return iter(self.phases)

    def __getitem__(self, i):
        return self.phases[i]

    def to_text(self) -> str:
        return "".join(f"{p!r}\n" for p in self.phases)

    @classmethod
    def from_text(cls, text: str) -> "PhaseFactors":
        vals = [float(line) for line in text.split() if line.strip()]
        return cls(tuple(vals))


@dataclass(frozen=True)
class TargetPolynomial:
    """Real polynomial in the Chebyshev basis with definite parity and |p| <= 1."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c:
            raise InvalidTargetError("empty coefficient list")
        # drop trailing zeros so the degree is meaningful
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)
        d = len(c) - 1
        wrong = c[1 - d % 2 :: 2]
        if any(abs(v) > 1e-12 for v in wrong):
            raise InvalidTargetError(f"degree {d} target must have parity {d % 2}")
        peak = float(np.max(np.abs(self(chebyshev_grid()))))
        if peak > 1.0 + 1e-12:
            raise InvalidTargetError(f"max |p(t)| on [-1, 1] is {peak:.6g} > 1")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def parity(self) -> str:
        return "odd" if self.degree % 2 else "even"

    def __call__(self, t):
        return C.chebval(t, self.coeffs)


def chebyshev_grid(points: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(-1.0, 1.0, points)


def chebyshev_t(k: int, t):
    return C.chebval(t, [0] * k + [1])


# -- evaluation -------------------------------------------------------------


def _ez(phi):
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def _signal(t):
    s = math.sqrt(max(0.0, 1.0 - t * t))
    return np.array([[t, s], [s, -t]], dtype=complex)


def _check_t(t):
    if not -1.0 <= t <= 1.0:
        raise ValueError(f"t = {t} outside [-1, 1]")


def qsp_unitary(phi: PhaseFactors | Sequence[float], t: float) -> np.ndarray:
    phases = tuple(phi)
    t = float(t)
    _check_t(t)
    u = _signal(t)
    m = _ez(phases[0])
    for p in phases[1:]:
        m = m @ u @ _ez(p)
    return m


def qsp_poly(phi, t) -> complex:
    return complex(qsp_unitary(phi, t)[0, 0])


def qsp_poly_values(phi, ts) -> np.ndarray:
    """p_Phi at many points (vectorized over t)."""
    phases = np.asarray(tuple(phi), dtype=float)
    ts = np.asarray(ts, dtype=float)
    s = np.sqrt(np.clip(1.0 - ts**2, 0.0, None))
    # row vector e_0^T propagated through the product, shape (T, 2)
    row = np.zeros((ts.size, 2), dtype=complex)
    row[:, 0] = np.exp(1j * phases[0])
    for p in phases[1:]:
        a = row[:, 0] * ts + row[:, 1] * s
        b = row[:, 0] * s - row[:, 1] * ts
        row = np.stack([a * np.exp(1j * p), b * np.exp(-1j * p)], axis=1)
    return row[:, 0]


def cheb_phases(d: int) -> PhaseFactors:
    """Phases whose p(t) is i^d T_d(t)."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return PhaseFactors((math.pi / 4,) + (math.pi / 2,) * (d - 1) + (math.pi / 4,))


def walk_phases(k: int) -> PhaseFactors:
    """(pi/2, ..., pi/2, 0): in a QET circuit without the H sandwich these
    realise the plain walk (U Z_Pi)^k up to a global phase."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return PhaseFactors((math.pi / 2,) * k + (0.0,))


# -- rescaling --------------------------------------------------------------


class RescaledChebyshev(NamedTuple):
    coeffs: tuple[float, ...]
    norm: float
    target: TargetPolynomial


def rescale_chebyshev(k: int, s: float) -> RescaledChebyshev:
    """Chebyshev coefficients of t' -> T_k(s t') and the normalized target.

    ``norm`` is the value at t' = 1, i.e. the sum of the coefficients.
    """
    if k < 1 or s < 1:
        raise ValueError("need k >= 1 and s >= 1")
    raw = C.chebinterpolate(lambda tp: chebyshev_t(k, s * tp), k)
    scale = max(1.0, float(np.max(np.abs(raw))))
    raw = np.where(np.abs(raw) < 1e-12 * scale, 0.0, raw)
    # the coefficients are integers for integer s; strip interpolation noise
    rounded = np.rint(raw)
    if float(s).is_integer() and np.allclose(raw, rounded, rtol=0, atol=1e-9 * scale):
        raw = rounded
    coeffs = tuple(float(v) for v in raw)
    norm = float(sum(coeffs))
    target = TargetPolynomial(tuple(v / abs(norm) for v in coeffs))
    return RescaledChebyshev(coeffs, norm, target)


# -- phase solving ------------------------------------------------------------

_PI4 = math.pi / 4


def _w_to_r(psi: np.ndarray) -> np.ndarray:
    d = psi.size - 1
    if d == 0:
        return psi.copy()
    phi = psi - math.pi / 2
    shift = (d - 1) * _PI4
    phi[0] = psi[0] + shift
    phi[-1] = psi[-1] + shift
    return phi


def _r_to_w(phi: np.ndarray) -> np.ndarray:
    d = phi.size - 1
    if d == 0:
        return phi.copy()
    psi = phi + math.pi / 2
    shift = (d - 1) * _PI4
    psi[0] = phi[0] - shift
    psi[-1] = phi[-1] - shift
    return psi


def _expand_symmetric(half: np.ndarray, d: int) -> np.ndarray:
    return np.array([half[min(j, d - j)] for j in range(d + 1)], dtype=float)


def _w_mats(t):
    s = math.sqrt(max(0.0, 1.0 - t * t))
    return np.array([[t, 1j * s], [1j * s, t]])


_IZ = np.diag([1j, -1j])


def _w_residual_jac(half, d, nodes, values):
    """Residuals Re p_W(t_k) - f(t_k) and their Jacobian in the free phases."""
    psi = _expand_symmetric(half, d)
    ez = [_ez(p) for p in psi]
    nfree = half.size
    res = np.empty(nodes.size)
    jac = np.zeros((nodes.size, nfree))
    for k, t in enumerate(nodes):
        w = _w_mats(t)
        # factors F_0 = e^{i psi_0 Z}, F_j = W e^{i psi_j Z}
        factors = [ez[0]] + [w @ e for e in ez[1:]]
        prefix = [np.eye(2, dtype=complex)]
        for f in factors:
            prefix.append(prefix[-1] @ f)
        suffix = [np.eye(2, dtype=complex)]
        for f in reversed(factors):
            suffix.append(f @ suffix[-1])
        suffix = suffix[::-1]  # suffix[j] = F_j ... F_d
        res[k] = prefix[-1][0, 0].real - values[k]
        for j in range(d + 1):
            # d/dpsi_j inserts iZ right after the e^{i psi_j Z} factor
            dj = (prefix[j + 1] @ _IZ @ suffix[j + 1])[0, 0].real
            jac[k, min(j, d - j)] += dj
    return res, jac


def solve_phases(
    target: TargetPolynomial,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    restarts: int = 5,
    seed: int = 0,
) -> PhaseFactors:
    """Phases whose Re p(t) matches ``target`` (least squares at Chebyshev nodes).

    The objective is sum_k (Re p(t_k) - f(t_k))^2 over the ceil((d+1)/2)
    positive roots of T_{2 ceil((d+1)/2)}. Raises PhaseSolverError when the
    objective stays above ``tol``.
    """
    d = target.degree
    if d > 64:
        raise InvalidTargetError("degrees above 64 are not supported")
    if d == 0:
        c0 = target.coeffs[0]
        return PhaseFactors((math.acos(c0),))
    dt = (d + 2) // 2
    nodes = np.cos((2 * np.arange(1, dt + 1) - 1) * math.pi / (4 * dt))
    values = target(nodes)
    x0 = np.zeros(dt)
    x0[0] = _PI4
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(restarts + 1):
        start = x0 if attempt == 0 else x0 + 0.1 * rng.standard_normal(dt)
        sol = least_squares(
            lambda h: _w_residual_jac(h, d, nodes, values)[0],
            start,
            jac=lambda h: _w_residual_jac(h, d, nodes, values)[1],
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=max_iter,
        )
        obj = float(np.sum(sol.fun**2))
        if best is None or obj < best[0]:
            best = (obj, sol.x)
        if obj <= tol:
            break
    obj, half = best
    phases = PhaseFactors(tuple(_w_to_r(_expand_symmetric(half, d))))
    if obj > tol:
        raise PhaseSolverError(
            f"phase solver stalled at objective {obj:.3e} > {tol:.1e}", obj, phases
        )
    return phases


def objective(phi: PhaseFactors, target: TargetPolynomial) -> float:
    """Least-squares objective of ``phi`` at the solver's Chebyshev nodes."""
    d = target.degree
    dt = (d + 2) // 2
    nodes = np.cos((2 * np.arange(1, dt + 1) - 1) * math.pi / (4 * dt))
    r = qsp_poly_values(phi, nodes).real - target(nodes)
    return float(np.sum(r**2))


def grid_error(phi: PhaseFactors, target: TargetPolynomial, points: int = GRID_POINTS) -> float:
    ts = chebyshev_grid(points)
    return float(np.max(np.abs(qsp_poly_values(phi, ts).real - target(ts))))


# -- QET circuit --------------------------------------------------------------


def _pi_rotation(phi: float, m: int, width: int) -> Circuit:
    """e^{i phi Z_Pi} on the flag-0 branch: open-CX, e^{-i phi Z}, open-CX."""
    anc = tuple(range(1, m + 1))
    cx = x(0, opened(*anc))
    return Circuit(width, (cx, phasez(0, phi), cx))


def qet_circuit(be: BlockEncoding, phi: PhaseFactors, real_part: bool = True) -> BlockEncoding:
    """Eigenvalue (singular value) transform of ``be`` by the QSP phases.

    A fresh flag qubit goes on top. With ``real_part`` the flag is
    Hadamard-conjugated and the block is Re p(A) = (p(A) + conj p(A)) / 2,
    otherwise it is p_Phi(A). Here A means the block of ``be``, i.e. the
    target divided by ``be.scale``. U and U^dagger alternate, which is the
    singular-value form for non-Hermitian encodings.
    """
    phi = PhaseFactors(tuple(phi))
    width = be.width + 1
    m = be.m
    u = place(be.circuit, range(1, width), width)
    u_dag = u.adjoint()
    phases = phi.phases
    d = len(phases) - 1
    c = Circuit(width, (h(0),)) if real_part else Circuit(width)
    c = c + _pi_rotation(phases[d], m, width)
    for step, j in enumerate(range(d - 1, -1, -1)):
        c = c + (u if step % 2 == 0 else u_dag) + _pi_rotation(phases[j], m, width)
    if real_part:
        c = c + Circuit(width, (h(0),))
    return BlockEncoding(c, n=be.n, m=m + 1, scale=1.0, hermitian=False, label="qet")


def matrix_poly(coeffs: Sequence[float], a: np.ndarray) -> np.ndarray:
    """Chebyshev series sum_k c_k T_k(A) by the three-term recurrence."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("expected a square matrix")
    eye = np.eye(a.shape[0], dtype=a.dtype)
    t_prev, t_cur = eye, a
    out = coeffs[0] * eye
    if len(coeffs) > 1:
        out = out + coeffs[1] * a
    for c in coeffs[2:]:
        t_prev, t_cur = t_cur, 2 * a @ t_cur - t_prev
        out = out + c * t_cur
    return out
