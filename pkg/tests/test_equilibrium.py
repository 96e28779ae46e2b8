import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fastkinetic.equilibrium import (
    ColdStateError,
    ConservedState,
    DegenerateGridError,
    ProjectionOperator,
    VacuumError,
    build_projection,
    compute_moments,
    discrete_equilibrium,
    maxwellian,
    moment_matrix,
    project_conserve,
)
from fastkinetic.grids import build_velocity_grid

G1 = build_velocity_grid(1, 100, -15, 15)
P1 = build_projection(G1)


def test_single_node_concentration():
    f = np.zeros(G1.N)
    g = build_velocity_grid(1, 31, -15, 15)  # node at v=2
    f = np.zeros(g.N)
    k = int(np.argmin(np.abs(g.axis_values - 2.0)))
    f[k] = 1.0 / g.dv
    s = compute_moments(f, g)
    assert s.rho == pytest.approx(1.0)
    assert s.u[0] == pytest.approx(2.0)
    assert abs(s.theta) < 1e-12


def test_maxwellian_quadrature_moments():
    M = maxwellian(ConservedState.from_primitive(1.0, 0.0, 5.0), G1)
    s = compute_moments(M, G1)
    assert np.allclose(s.as_vector(), [1.0, 0.0, 2.5], atol=1e-8)


def test_vacuum_rejected():
    with pytest.raises(VacuumError):
        compute_moments(np.zeros(G1.N), G1)


def test_maxwellian_peak_values():
    g = build_velocity_grid(1, 3, -1, 1)
    M = maxwellian(ConservedState.from_primitive(1.0, 0.0, 1.0), g)
    assert M[1] == pytest.approx((2 * np.pi) ** -0.5, rel=1e-14)
    g3 = build_velocity_grid(3, 3, -1, 1)
    M3 = maxwellian(ConservedState.from_primitive(1.0, np.zeros(3), 5.0), g3)
    assert M3[13] == pytest.approx((10 * np.pi) ** -1.5, rel=1e-14)


def test_maxwellian_even_about_mean():
    g = build_velocity_grid(1, 41, -10, 10)
    M = maxwellian(ConservedState.from_primitive(1.0, 1.0, 2.0), g)
    k0 = int(np.argmin(np.abs(g.axis_values - 1.0)))
    for w in range(1, 10):
        assert M[k0 + w] == M[k0 - w]


def test_cold_state_rejected():
    with pytest.raises(ColdStateError):
        maxwellian(ConservedState(1.0, np.array([1.0]), 0.5), G1)


@pytest.mark.parametrize("d,K,lim", [(1, 100, 15), (1, 5, 2), (2, 8, 4), (3, 12, 10)])
def test_projection_identity(d, K, lim):
    g = build_velocity_grid(d, K, -lim, lim)
    p = build_projection(g)
    assert np.max(np.abs(p.C @ p.P - np.eye(d + 2))) <= 1e-12


def _three_node_oracle(ftilde, U):
    # C is square here, so the constrained minimiser is the unique solution of C f = U
    C = np.array([[1.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [0.5, 0.0, 0.5]])
    return np.linalg.solve(C, U), C


def test_three_node_projection_against_oracle():
    p = ProjectionOperator.from_nodes(np.array([-1.0, 0.0, 1.0]), 1.0)
    oracle_P = np.linalg.solve(p.C @ p.C.T, p.C).T
    assert np.allclose(p.P, oracle_P, atol=1e-14)
    ft = np.array([0.1, 0.2, 0.3])
    U = np.array([0.6, 0.2, 0.25])
    f = p.project(ft, U)
    expected, C = _three_node_oracle(ft, U)
    assert np.allclose(f, expected, atol=1e-14)
    assert np.allclose(f, [0.15, 0.1, 0.35], atol=1e-14)
    assert np.allclose(C @ f, U, atol=1e-14)


def test_degenerate_two_node_grid():
    with pytest.raises(DegenerateGridError):
        ProjectionOperator.from_nodes(np.array([-1.0, 1.0]), 1.0)


def test_energy_row_carries_half():
    C = moment_matrix(np.array([[2.0]]), 1.0)
    assert C[:, 0].tolist() == [1.0, 2.0, 2.0]


def test_already_exact_input_unchanged():
    M = maxwellian(ConservedState.from_primitive(1.0, 0.3, 2.0), G1)
    U = P1.C @ M
    assert np.array_equal(P1.project(M, U), M)


rng = np.random.default_rng(7)


def _random_pair(rng, g):
    ft = rng.random(g.N)
    rho = 0.5 + rng.random()
    u = rng.normal(size=g.d)
    theta = 0.5 + 3 * rng.random()
    return ft, ConservedState.from_primitive(rho, u, theta).as_vector()


def test_projection_is_minimal_against_nullspace_samples():
    ft, U = _random_pair(rng, G1)
    f = project_conserve(ft, U, P1)
    # nullspace basis of C from the SVD
    _, _, Vt = np.linalg.svd(P1.C)
    null = Vt[P1.C.shape[0]:]
    base = np.linalg.norm(f - ft)
    for _ in range(100):
        g = f + null.T @ rng.normal(size=null.shape[0]) * 0.01
        assert np.allclose(P1.C @ g, U, rtol=1e-10)
        assert base <= np.linalg.norm(g - ft)


@settings(max_examples=60, deadline=None)
@given(
    ft=arrays(np.float64, 100, elements=st.floats(0, 10)),
    rho=st.floats(0.01, 10),
    u=st.floats(-3, 3),
    theta=st.floats(0.2, 10),
    scale=st.floats(0.1, 10),
)
def test_projection_exact_and_idempotent(ft, rho, u, theta, scale):
    U = ConservedState.from_primitive(rho, u, theta).as_vector()
    # the candidate carries a density of the same order as the target
    if ft.sum() > 0:
        ft = ft * (scale * rho / (ft.sum() * G1.dv))
    f = P1.project(ft, U)
    assert np.all(np.abs(P1.C @ f - U) <= 1e-12 * np.abs(U).max())
    assert np.array_equal(P1.project(f, U), f)


@settings(max_examples=40, deadline=None)
@given(rho=st.floats(0.05, 5), u=st.floats(-2, 2), theta=st.floats(0.3, 8))
def test_discrete_equilibrium_moments(rho, u, theta):
    s = ConservedState.from_primitive(rho, u, theta)
    E = discrete_equilibrium(s, G1, P1)
    got = compute_moments(E, G1).as_vector()
    assert np.allclose(got, s.as_vector(), rtol=1e-12, atol=1e-12 * rho)


def test_discrete_equilibrium_close_to_maxwellian():
    s = ConservedState.from_primitive(1.0, 0.0, 1.0)
    E = discrete_equilibrium(s, G1, P1)
    assert np.max(np.abs(E - maxwellian(s, G1))) <= 1e-6


def test_sod_left_equilibrium_moments():
    E = discrete_equilibrium(ConservedState.from_primitive(1.0, 0.0, 5.0), G1, P1)
    assert np.allclose(P1.C @ E, [1.0, 0.0, 2.5], atol=1e-12)


def _equilibrium_gap(K):
    s = ConservedState.from_primitive(1.0, 0.0, 5.0)
    g = build_velocity_grid(1, K, -15, 15)
    E = discrete_equilibrium(s, g, build_projection(g))
    return np.max(np.abs(E - maxwellian(s, g)))


def test_equilibrium_error_decreases_with_refinement():
    errs = [_equilibrium_gap(K) for K in (6, 8, 10, 12, 14)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    # the Gaussian quadrature error is already at rounding level from K=20 on
    assert max(_equilibrium_gap(K) for K in (20, 50, 100)) <= 1e-11
