import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liftlab.errors import (
    InconsistentAlpha,
    InfeasibleCoupling,
    InvalidInput,
    InvalidParameter,
    SingularNormalization,
)
from liftlab.graphs import Graph, build_barbell, build_cycle, build_torus, factor_graph, laplacian
from liftlab.operators import (
    AdmmParams,
    alpha_from_edge,
    build_A,
    build_B,
    build_lifting_pair,
    build_M,
    build_Q,
    build_T_A,
    build_T_G,
    check_alpha_consistency,
    default_DA,
    max_alpha_nonneg,
    solve_DG,
)

ONE_EDGE = factor_graph(Graph(2, ((0, 1),), (1.0,)))


def dense_A(fg, q, rho):
    """Oracle: generic inverse of I + D_rho^{-1} Q."""
    Q = build_Q(fg, q)
    return np.linalg.inv(np.eye(fg.size) + Q / np.broadcast_to(rho, (fg.size,))[:, None])


def dense_B(fg, rho):
    S = fg.S
    D = np.diag(np.broadcast_to(rho, (fg.size,)))
    return S @ np.linalg.inv(S.T @ D @ S) @ S.T @ D


# -- Q ------------------------------------------------------------------------


def test_Q_single_edge():
    assert np.array_equal(build_Q(ONE_EDGE), [[1, -1], [-1, 1]])


def test_Q_c4_rank(c4):
    Q = build_Q(c4)
    assert Q.shape == (8, 8)
    ev = np.linalg.eigvalsh(Q)
    assert np.sum(ev > 1e-12) == 4
    assert np.all(ev > -1e-12)


def test_Q_annihilates_ones(family_fg):
    Q = build_Q(family_fg)
    assert np.array_equal(Q @ np.ones(family_fg.size), np.zeros(family_fg.size))
    assert np.array_equal(Q, Q.T)


def test_Q_rejects_nonpositive_weight(c4):
    with pytest.raises(InvalidParameter):
        build_Q(c4, [1, 1, 0, 1])


# -- A ------------------------------------------------------------------------


def test_A_single_edge():
    A = build_A(ONE_EDGE, None, [1.0, 1.0])
    assert np.allclose(A, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-15)
    assert np.allclose(A, dense_A(ONE_EDGE, None, np.ones(2)), atol=1e-15)


def test_A_weak_coupling_tends_to_identity(c4):
    A = build_A(c4, 1e-12, 1.0)
    assert np.max(np.abs(A - np.eye(8))) < 1e-11


def test_A_matches_dense_inverse_random_rho(c4, rng):
    rho = rng.uniform(0.05, 20, size=8)
    A = build_A(c4, None, rho)
    assert np.max(np.abs(A - dense_A(c4, None, rho))) < 1e-12
    assert np.max(np.abs(A @ np.ones(8) - 1)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([build_cycle(5), build_torus(3), build_barbell(4)]),
    st.integers(0, 2**32 - 1),
)
def test_A_matches_dense_inverse_property(g, seed):
    r = np.random.default_rng(seed)
    fg = factor_graph(g)
    rho = np.exp(r.uniform(-3, 3, fg.size))
    q = np.exp(r.uniform(-2, 2, g.m))
    assert np.max(np.abs(build_A(fg, q, rho) - dense_A(fg, q, rho))) < 1e-11


# -- B ------------------------------------------------------------------------


def test_B_uniform_degree_two(c4):
    B = build_B(c4, 1.0)
    copies = c4.copies(0)
    for r in copies:
        assert np.allclose(B[r, copies], [0.5, 0.5])
        assert np.isclose(B[r].sum(), 1.0)


def test_B_weighted_copies(c4):
    rho = np.ones(8)
    a, b = c4.copies(0)
    rho[a], rho[b] = 1.0, 3.0
    B = build_B(c4, rho)
    # (S^T D S)^{-1} S^T D on vertex 0: (1*x_a + 3*x_b) / 4
    assert np.allclose(B[a, [a, b]], [0.25, 0.75], atol=1e-15)
    assert np.allclose(B, dense_B(c4, rho), atol=1e-14)


def test_B_is_projection(family_fg, rng):
    rho = rng.uniform(0.1, 10, family_fg.size)
    B = build_B(family_fg, rho)
    assert np.max(np.abs(B @ B - B)) < 1e-12
    assert np.max(np.abs(B @ family_fg.S - family_fg.S)) < 1e-12
    assert np.max(np.abs(B @ np.ones(family_fg.size) - 1)) < 1e-12


# -- T_G ----------------------------------------------------------------------


def test_StQS_is_laplacian(family_fg, rng):
    q = rng.uniform(0.5, 2, family_fg.base.m)
    L = family_fg.S.T @ build_Q(family_fg, q) @ family_fg.S
    assert np.allclose(L, laplacian(family_fg.base.with_weights(q)), atol=1e-14)


def test_T_G_c4(c4):
    L = c4.S.T @ build_Q(c4) @ c4.S
    assert np.array_equal(np.diag(L), [2, 2, 2, 2])
    assert np.array_equal(build_T_G(c4, None, 0.0), np.eye(4))
    T = build_T_G(c4, None, 1 / 3)
    assert np.allclose(np.sort(np.linalg.eigvalsh(T)), [-1 / 3, 1 / 3, 1 / 3, 1], atol=1e-14)
    assert np.array_equal(T, T.T)
    assert np.allclose(T @ np.ones(4), 1, atol=1e-15)


# -- T_A ----------------------------------------------------------------------


def test_T_A_gamma_zero_is_identity(c4):
    # gamma = 0 is outside AdmmParams' open interval; evaluate the formula directly
    A, B = build_A(c4, None, 1.0), build_B(c4, 1.0)
    T = np.eye(8) - 0.0 * (A + B - 2 * B @ A)
    assert np.array_equal(T, np.eye(8))


def test_T_A_row_sums(family_fg, rng):
    params = AdmmParams(rng.uniform(0.1, 1.9), rng.uniform(0.1, 10, family_fg.size))
    T = build_T_A(family_fg, None, params)
    assert np.max(np.abs(T @ np.ones(family_fg.size) - 1)) < 1e-12


def test_T_A_c4_unit_row_sums(c4):
    T = build_T_A(c4, None, AdmmParams.uniform(c4, 1.0, 1.0))
    assert np.max(np.abs(T.sum(1) - 1)) < 1e-12


def test_params_validation(c4):
    for gamma in (0.0, 2.0, -1.0):
        with pytest.raises(InvalidParameter):
            AdmmParams(gamma, np.ones(8))
    with pytest.raises(InvalidParameter):
        AdmmParams(1.0, [1, 1, 0, 1, 1, 1, 1, 1])
    with pytest.raises(InvalidInput):
        build_T_A(c4, None, AdmmParams(1.0, np.ones(6)))


# -- D_A, D_G, M --------------------------------------------------------------


def test_default_DA_regular(c4):
    rho = 2.5
    D_A = default_DA(c4, rho)
    assert np.allclose(D_A, 1 - 1 / (rho * 8))
    v_A = (1 - D_A) * rho
    assert np.allclose(v_A, 1 / 8) and np.isclose(v_A.sum(), 1)
    assert np.all(D_A < 1)


def test_solve_DG_regular(c4):
    D_G = solve_DG(c4, 1.7, default_DA(c4, 1.7))
    assert np.allclose(D_G, 0.75, atol=1e-15)
    fg = factor_graph(build_torus(3))
    assert np.allclose(solve_DG(fg, 3.0, default_DA(fg, 3.0)), 1 - 1 / 9)


def test_solve_DG_general_degrees(rng):
    fg = factor_graph(build_barbell(4))
    rho = rng.uniform(0.2, 5, fg.size)
    D_G = solve_DG(fg, rho, default_DA(fg, rho))
    assert np.allclose(1 - D_G, fg.deg / fg.size, atol=1e-15)


def test_solve_DG_infeasible(c4):
    with pytest.raises(InfeasibleCoupling):
        solve_DG(c4, 1.0, np.full(8, 1.5))


def test_build_M_basics(c4):
    T = build_T_G(c4, None, 0.1)
    assert np.array_equal(build_M(T, np.zeros(4)), T)
    with pytest.raises(SingularNormalization):
        build_M(T, [0.0, 1.0, 0.0, 0.0])
    assert np.allclose(build_M(T, np.diag([0.1, 0.2, 0.3, 0.4])) @ np.ones(4), 1)


@pytest.mark.parametrize("alpha", [0.01, 0.05, 1 / 8])
def test_M_G_c4_closed_form(c4, alpha):
    M = build_M(build_T_G(c4, None, alpha), np.full(4, 0.75))
    x, y = 1 - 8 * alpha, 4 * alpha
    expected = np.array([[x, y, 0, y], [y, x, y, 0], [0, y, x, y], [y, 0, y, x]])
    assert np.allclose(M, expected, atol=1e-14)
    assert np.isclose(x + 2 * y, 1)


# -- alpha coupling -----------------------------------------------------------


def test_alpha_from_edge_values():
    assert alpha_from_edge(1.0, 2.0, 2.0, 1.0) == 0.5
    for gamma, rho in [(0.3, 0.1), (1.2, 7.0)]:
        assert np.isclose(alpha_from_edge(gamma, rho, rho), gamma * rho / (2 + rho))
    assert alpha_from_edge(1e-14, 1.0, 1.0) < 1e-14


def test_alpha_consistency_uniform(c4):
    assert np.isclose(check_alpha_consistency(c4, None, AdmmParams.uniform(c4, 0.8, 3.0)), 0.8 * 3 / 5)


def test_alpha_consistency_mixed_q(c4):
    with pytest.raises(InconsistentAlpha) as info:
        check_alpha_consistency(c4, [1, 2, 1, 2], AdmmParams.uniform(c4, 1.0, 1.0))
    assert info.value.spread > 0
    assert len(info.value.offending) >= 2


def test_alpha_consistency_single_edge(rng):
    params = AdmmParams(1.3, rng.uniform(0.1, 9, 2))
    a = check_alpha_consistency(ONE_EDGE, None, params)
    assert np.isclose(a, alpha_from_edge(1.3, *params.rho))


def test_alpha_consistency_heterogeneous_rho_can_match():
    # with q_e = 1 edge (r, r') gives alpha = gamma r r' / (r r' + r + r');
    # pick each edge's pair so the value is the same everywhere
    fg = factor_graph(build_cycle(4))
    r = np.array([1.0, 1.0, 2.0, 2 / 3, 1.0, 1.0, 2 / 3, 2.0])
    a = check_alpha_consistency(fg, None, AdmmParams(1.0, r))
    assert np.isclose(a, 1 / 3)


# -- nonnegativity bound -------------------------------------------------------


def test_max_alpha_nonneg_c4(c4):
    D_G = np.full(4, 0.75)
    bound = max_alpha_nonneg(c4, None, D_G)
    assert np.isclose(bound, 1 / 8)
    for a in (bound, bound / 2):
        assert build_M(build_T_G(c4, None, a), D_G).min() >= -1e-15
    assert build_M(build_T_G(c4, None, 10 * bound), D_G).min() < 0


def test_max_alpha_nonneg_is_tight(rng):
    fg = factor_graph(build_barbell(4))
    D_G = rng.uniform(-0.5, 0.9, fg.n)
    bound = max_alpha_nonneg(fg, None, D_G)
    assert build_M(build_T_G(fg, None, bound), D_G).min() >= -1e-14
    assert build_M(build_T_G(fg, None, bound * 1.01), D_G).min() < 0


# -- the pair -----------------------------------------------------------------


def test_lifting_pair_consistency(family_fg):
    pair = build_lifting_pair(family_fg, None, AdmmParams.uniform(family_fg, 0.9, 1.3))
    assert np.allclose(pair.v_G, 1 - pair.D_G)
    assert np.allclose(pair.v_A, (1 - pair.D_A) * 1.3)
    assert np.all(pair.D_G < 1) and np.all(pair.D_A < 1)
    assert np.max(np.abs(pair.M_G @ np.ones(family_fg.n) - 1)) < 1e-12
    assert np.max(np.abs(pair.M_A @ np.ones(family_fg.size) - 1)) < 1e-12


@pytest.mark.parametrize("qval", [0.5, 2.0, 3.0])
def test_weighted_edge_coupling_gives_exact_lifting(qval):
    from liftlab.lifting import verify_lifting

    fg = factor_graph(build_cycle(4))
    q = np.full(fg.base.m, qval)
    params = AdmmParams.uniform(fg, 0.8, 1.5)
    a = check_alpha_consistency(fg, q, params)
    assert np.isclose(a, 0.8 * 2.25 / (2.25 + qval * 3.0))
    cert = verify_lifting(build_lifting_pair(fg, q, params), fg.S)
    assert cert.residual_mat < 1e-12
