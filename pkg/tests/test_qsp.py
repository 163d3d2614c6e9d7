import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockenc.errors import InvalidTargetError, PhaseSolverError
from blockenc.qcore import phase_aligned_distance, spectral_norm
from blockenc.qsp import (
    PhaseFactors,
    TargetPolynomial,
    _expand_symmetric,
    _r_to_w,
    _w_residual_jac,
    _w_to_r,
    cheb_phases,
    chebyshev_grid,
    chebyshev_t,
    grid_error,
    matrix_poly,
    objective,
    qet_circuit,
    qsp_poly,
    qsp_poly_values,
    qsp_unitary,
    rescale_chebyshev,
    solve_phases,
    walk_phases,
)
from blockenc.sparse_enc import CirculantParams, circulant_encoding

GRID = chebyshev_grid()


# -- evaluation -------------------------------------------------------------------------------


def test_example_phases_give_identity_polynomial():
    assert qsp_poly((math.pi / 4, math.pi / 2, math.pi / 4), 0.5) == pytest.approx(0.5, abs=1e-15)


def test_cheb_phases_degree_three_value():
    assert qsp_poly(cheb_phases(3), 0.3) == pytest.approx(0.792j, abs=1e-15)


@pytest.mark.parametrize("d", range(1, 7))
def test_cheb_phases_magnitude(d):
    p = qsp_poly_values(cheb_phases(d), GRID)
    assert np.max(np.abs(np.abs(p) - np.abs(chebyshev_t(d, GRID)))) <= 1e-12
    np.testing.assert_allclose(p, (1j) ** d * chebyshev_t(d, GRID), atol=1e-12)


def _qsp_conditions(phi, t):
    """Structural QSP facts: unitarity, the P/Q form and its norm identity."""
    u = qsp_unitary(phi, t)
    s = math.sqrt(1 - t * t)
    p, q = u[0, 0], (u[0, 1] / s if s > 0 else 0.0)
    assert np.max(np.abs(u @ u.conj().T - np.eye(2))) <= 1e-12
    assert abs(abs(p) ** 2 + (1 - t * t) * abs(q) ** 2 - 1) <= 1e-12


@settings(max_examples=60)
@given(
    st.lists(st.floats(-math.pi, math.pi, allow_nan=False), min_size=1, max_size=8),
    st.floats(-1, 1, allow_nan=False),
)
def test_qsp_norm_condition_any_phases(phases, t):
    _qsp_conditions(phases, t)


@given(st.lists(st.floats(-math.pi, math.pi, allow_nan=False), min_size=1, max_size=8))
def test_parity_of_generated_polynomial(phases):
    d = len(phases) - 1
    ts = np.linspace(0, 1, 11)
    p, pm = qsp_poly_values(phases, ts), qsp_poly_values(phases, -ts)
    np.testing.assert_allclose(pm, (-1) ** d * p, atol=1e-12)


def test_vectorized_matches_scalar(rng):
    phi = rng.uniform(-3, 3, 6)
    ts = rng.uniform(-1, 1, 9)
    np.testing.assert_allclose(qsp_poly_values(phi, ts), [qsp_poly(phi, t) for t in ts], atol=1e-14)


def test_signal_outside_interval_rejected():
    with pytest.raises(ValueError):
        qsp_unitary(cheb_phases(2), 1.5)


def test_phase_factor_text_round_trip():
    phi = PhaseFactors((0.1, -2.5, math.pi))
    assert PhaseFactors.from_text(phi.to_text()) == phi
    assert phi.degree == 2
    with pytest.raises(ValueError):
        PhaseFactors(())


def test_walk_phases_shape():
    assert walk_phases(3).phases == (math.pi / 2,) * 3 + (0.0,)
    with pytest.raises(ValueError):
        walk_phases(0)
    with pytest.raises(ValueError):
        cheb_phases(0)


# -- targets and rescaling ----------------------------------------------------------------------


def test_target_validation():
    assert TargetPolynomial((0.0, 1.0, 0.0)).degree == 1
    assert TargetPolynomial((0.0, 1.0)).parity == "odd"
    with pytest.raises(InvalidTargetError):
        TargetPolynomial((0.5, 0.5))
    with pytest.raises(InvalidTargetError):
        TargetPolynomial((0.0, 1.5))
    with pytest.raises(InvalidTargetError):
        TargetPolynomial(())


def test_rescale_degree_two():
    r = rescale_chebyshev(2, 4)
    assert r.coeffs == (15.0, 0.0, 16.0) and r.norm == 31.0
    # T_2(4 t) = 32 t^2 - 1 = 15 + 16 T_2(t)
    ts = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(r.target(ts), (32 * ts**2 - 1) / 31, atol=1e-15)


def test_rescale_degree_three():
    r = rescale_chebyshev(3, 2)
    assert r.coeffs == (0.0, 18.0, 0.0, 8.0) and r.norm == 26.0


def test_rescale_validation():
    with pytest.raises(ValueError):
        rescale_chebyshev(0, 2)
    with pytest.raises(ValueError):
        rescale_chebyshev(2, 0.5)


def test_matrix_poly_matches_scalar_on_diagonal():
    d = np.diag([0.1, -0.4, 0.9])
    out = matrix_poly([0.2, 0.0, 0.3, 0.0, 0.1], d)
    expected = [0.2 + 0.3 * chebyshev_t(2, v) + 0.1 * chebyshev_t(4, v) for v in (0.1, -0.4, 0.9)]
    np.testing.assert_allclose(np.diag(out), expected, atol=1e-15)


# -- solver internals ---------------------------------------------------------------------------


@given(st.lists(st.floats(-math.pi, math.pi, allow_nan=False), min_size=1, max_size=7))
def test_convention_mapping_preserves_polynomial(phases):
    phi = np.array(phases)
    assert np.allclose(_r_to_w(_w_to_r(phi)), phi)
    ts = np.linspace(-1, 1, 9)
    # W-convention evaluation by explicit products
    w_vals = []
    for t in ts:
        s = math.sqrt(1 - t * t)
        w = np.array([[t, 1j * s], [1j * s, t]])
        m = np.diag([np.exp(1j * phi[0]), np.exp(-1j * phi[0])])
        for p in phi[1:]:
            m = m @ w @ np.diag([np.exp(1j * p), np.exp(-1j * p)])
        w_vals.append(m[0, 0])
    r_vals = qsp_poly_values(_w_to_r(phi), ts)
    np.testing.assert_allclose(r_vals, w_vals, atol=1e-12)


def test_analytic_jacobian_matches_finite_differences(rng):
    for d in (2, 3, 6, 7):
        dt = (d + 2) // 2
        half = rng.uniform(-1, 1, dt)
        nodes = np.cos((2 * np.arange(1, dt + 1) - 1) * math.pi / (4 * dt))
        values = rng.uniform(-0.5, 0.5, dt)
        _, jac = _w_residual_jac(half, d, nodes, values)
        eps = 1e-7
        for j in range(dt):
            e = np.zeros(dt)
            e[j] = eps
            rp, _ = _w_residual_jac(half + e, d, nodes, values)
            rm, _ = _w_residual_jac(half - e, d, nodes, values)
            np.testing.assert_allclose(jac[:, j], (rp - rm) / (2 * eps), atol=1e-7)


def test_expand_symmetric():
    assert list(_expand_symmetric(np.array([1.0, 2.0]), 3)) == [1.0, 2.0, 2.0, 1.0]
    assert list(_expand_symmetric(np.array([1.0, 2.0]), 2)) == [1.0, 2.0, 1.0]


# -- solver -----------------------------------------------------------------------------------------


def test_solver_degree_two_rescaled():
    target = rescale_chebyshev(2, 4).target
    phi = solve_phases(target)
    assert objective(phi, target) <= 1e-10
    assert grid_error(phi, target) <= 1e-8
    assert phi.phases[0] == pytest.approx(phi.phases[2], abs=1e-12)
    reduced = [p % math.pi for p in phi.phases]
    np.testing.assert_allclose(reduced, [1.17, 0.80, 1.17], atol=5e-3)


@pytest.mark.parametrize(
    "coeffs",
    [
        (0.0, 1.0),
        (0.3, 0.0, 0.5),
        (0.0, 0.4, 0.0, -0.3),
        (0.1, 0.0, 0.2, 0.0, 0.3),
        (0.0, 0.2, 0.0, 0.2, 0.0, 0.4),
    ],
)
def test_solver_generic_targets(coeffs):
    target = TargetPolynomial(coeffs)
    phi = solve_phases(target)
    assert phi.degree == target.degree
    assert grid_error(phi, target) <= 1e-8


def test_solver_degree_zero():
    phi = solve_phases(TargetPolynomial((0.6,)))
    assert qsp_poly(phi, 0.2).real == pytest.approx(0.6)


def test_solver_higher_degree():
    target = rescale_chebyshev(3, 2).target
    assert grid_error(solve_phases(target), target) <= 1e-8
    r = TargetPolynomial(tuple(0.9 * c for c in (0.0, 0.5, 0.0, 0.2, 0.0, 0.1, 0.0, 0.1, 0.0, 0.1)))
    assert grid_error(solve_phases(r), r) <= 1e-8


def test_solver_failure_reports_residual():
    target = rescale_chebyshev(2, 4).target
    with pytest.raises(PhaseSolverError) as info:
        solve_phases(target, tol=0.0, max_iter=1, restarts=0)
    assert info.value.best_residual > 0
    assert info.value.phases.degree == 2


def test_degree_limit():
    with pytest.raises(InvalidTargetError):
        solve_phases(TargetPolynomial((0.0,) * 65 + (1.0,)))


# -- QET --------------------------------------------------------------------------------------


def _circulant_quarter():
    p = CirculantParams(3, 0.5, 0.25, 0.25)
    return circulant_encoding(p), p.matrix() / 4


def test_qet_degree_one_returns_block():
    be, a = _circulant_quarter()
    q = qet_circuit(be, cheb_phases(1), real_part=False)
    assert q.m == be.m + 1 and q.scale == 1.0
    assert phase_aligned_distance(q.block(), a) <= 1e-12


def test_qet_real_part_with_solved_phases():
    be, a = _circulant_quarter()
    r = rescale_chebyshev(2, 4)
    q = qet_circuit(be, solve_phases(r.target), real_part=True)
    expected = matrix_poly(r.target.coeffs, a)
    assert spectral_norm(q.block() - expected) <= 1e-8


def test_qet_complex_polynomial_without_sandwich(rng):
    be, a = _circulant_quarter()
    phi = rng.uniform(-2, 2, 4)
    q = qet_circuit(be, phi, real_part=False)
    w, v = np.linalg.eigh(a)
    expected = v @ np.diag(qsp_poly_values(phi, w)) @ v.T
    assert spectral_norm(q.block() - expected) <= 1e-10
