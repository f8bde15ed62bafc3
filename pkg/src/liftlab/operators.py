"""Linear operators of distributed over-relaxed ADMM and gradient descent.

All matrices are dense ``numpy`` arrays. Diagonal matrices (``D_A``, ``D_G``)
are carried as 1-D arrays of their diagonal entries; functions that accept a
diagonal also take a square diagonal matrix.

Shapes, with ``n = |V|`` and ``E = |Ê| = 2|E|``::

    Q, A, B, T_A, M_A : (E, E)
    T_G, M_G          : (n, n)
    rho, v_A, D_A     : (E,)
    v_G, D_G          : (n,)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InconsistentAlpha,
    InfeasibleCoupling,
    InvalidInput,
    InvalidParameter,
    SingularNormalization,
)
from .graphs import FactorGraph

__all__ = [
    "AdmmParams",
    "LiftingPair",
    "edge_weights",
    "build_Q",
    "build_F",
    "build_A",
    "build_B",
    "build_T_G",
    "build_T_A",
    "default_DA",
    "solve_DG",
    "build_M",
    "alpha_from_edge",
    "check_alpha_consistency",
    "max_alpha_nonneg",
    "build_lifting_pair",
]


@dataclass(frozen=True)
class AdmmParams:
    """Relaxation ``gamma`` in (0, 2) and one penalty per extended edge.

    A scalar ``rho`` is broadcast with :meth:`uniform`.
    """

    gamma: float
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float).reshape(-1)
        if not 0.0 < self.gamma < 2.0:
            raise InvalidParameter(f"gamma must lie in (0, 2), got {self.gamma}")
        if rho.size == 0 or not np.all(np.isfinite(rho)) or np.any(rho <= 0):
            raise InvalidParameter("every rho entry must be finite and strictly positive")
        rho.setflags(write=False)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "rho", rho)

    @classmethod
    def uniform(cls, fg: FactorGraph, gamma: float, rho: float) -> AdmmParams:
        return cls(gamma, np.full(fg.size, float(rho)))

    def check(self, fg: FactorGraph) -> None:
        if self.rho.shape != (fg.size,):
            raise InvalidInput(f"rho has {self.rho.size} entries, graph has |Ê| = {fg.size}")


@dataclass(frozen=True)
class LiftingPair:
    """GD and ADMM evolution matrices together with their normalizations."""

    T_G: np.ndarray = field(repr=False)
    T_A: np.ndarray = field(repr=False)
    D_G: np.ndarray = field(repr=False)
    D_A: np.ndarray = field(repr=False)
    M_G: np.ndarray = field(repr=False)
    M_A: np.ndarray = field(repr=False)
    v_G: np.ndarray = field(repr=False)
    v_A: np.ndarray = field(repr=False)
    alpha: float
    gamma: float
    rho: np.ndarray = field(repr=False)


def edge_weights(fg: FactorGraph, q=None) -> np.ndarray:
    """Resolve ``q`` (None, scalar or per-edge array) against the base graph."""
    if q is None:
        w = fg.base.weights
    else:
        w = np.broadcast_to(np.asarray(q, dtype=float), (fg.base.m,)).copy()
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InvalidParameter("edge weights must be finite and strictly positive")
    return w


def _rho(fg: FactorGraph, rho) -> np.ndarray:
    if isinstance(rho, AdmmParams):
        rho.check(fg)
        return rho.rho
    r = np.broadcast_to(np.asarray(rho, dtype=float), (fg.size,))
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise InvalidParameter("every rho entry must be finite and strictly positive")
    return r


def _diag(D, size: int, name: str) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim == 2:
        if D.shape != (size, size) or np.any(D - np.diag(np.diag(D))):
            raise InvalidInput(f"{name} must be a {size}x{size} diagonal matrix")
        D = np.diag(D)
    if D.shape != (size,):
        raise InvalidInput(f"{name} must have {size} diagonal entries")
    return D


def build_Q(fg: FactorGraph, q=None) -> np.ndarray:
    """Block-diagonal curvature, one ``q_e [[1, -1], [-1, 1]]`` block per edge."""
    w = edge_weights(fg, q)
    Q = np.zeros((fg.size, fg.size))
    for k, qe in enumerate(w):
        s = slice(2 * k, 2 * k + 2)
        Q[s, s] = qe * np.array([[1.0, -1.0], [-1.0, 1.0]])
    return Q


def build_F(fg: FactorGraph, q, rho) -> np.ndarray:
    """Block-diagonal F with ``A = I - F Q``.

    For edge ``e`` with copies penalized by ``r_i`` and ``r_j``::

        F_e = diag(r_j, r_i) / (r_i r_j + q_e (r_i + r_j))

    The weight enters only through the denominator; ``Q`` already carries it.
    """
    w = edge_weights(fg, q)
    r = _rho(fg, rho)
    F = np.zeros((fg.size, fg.size))
    for k, qe in enumerate(w):
        ri, rj = r[2 * k], r[2 * k + 1]
        scale = 1.0 / (ri * rj + qe * (ri + rj))
        F[2 * k, 2 * k] = scale * rj
        F[2 * k + 1, 2 * k + 1] = scale * ri
    return F


def build_A(fg: FactorGraph, q, rho) -> np.ndarray:
    """``(I + D_rho^{-1} Q)^{-1}``, assembled from closed-form 2x2 blocks."""
    return np.eye(fg.size) - build_F(fg, q, rho) @ build_Q(fg, q)


def build_B(fg: FactorGraph, rho) -> np.ndarray:
    """Projection ``S (S^T D_rho S)^{-1} S^T D_rho``.

    Row ``(e, b)`` of ``B`` is the rho-weighted average over all copies of
    vertex ``b``.
    """
    r = _rho(fg, rho)
    S = fg.S
    totals = S.T @ r  # S^T D_rho S is diagonal with these entries
    return (S / totals) @ (S.T * r)


def build_T_G(fg: FactorGraph, q, alpha: float) -> np.ndarray:
    """Gradient-descent map ``I - alpha S^T Q S``."""
    if alpha < 0:
        raise InvalidParameter(f"alpha must be non-negative, got {alpha}")
    S = fg.S
    return np.eye(fg.n) - alpha * (S.T @ build_Q(fg, q) @ S)


def build_T_A(fg: FactorGraph, q, params: AdmmParams) -> np.ndarray:
    """ADMM map ``I - gamma (A + B - 2 B A)`` acting on the ``n`` variable."""
    params.check(fg)
    A = build_A(fg, q, params.rho)
    B = build_B(fg, params.rho)
    return np.eye(fg.size) - params.gamma * (A + B - 2.0 * B @ A)


def default_DA(fg: FactorGraph, rho) -> np.ndarray:
    """Diagonal ``1 - 1/(rho_e |Ê|)``; makes ``v_A`` uniform, ``1/|Ê|`` per entry."""
    r = _rho(fg, rho)
    return 1.0 - 1.0 / (r * fg.size)


def solve_DG(fg: FactorGraph, rho, D_A) -> np.ndarray:
    """Solve ``S^T D_rho (I - D_A) S = I - D_G`` for the diagonal ``D_G``."""
    r = _rho(fg, rho)
    D_A = _diag(D_A, fg.size, "D_A")
    if np.any(D_A >= 1):
        raise InfeasibleCoupling("every D_A entry must be < 1")
    D_G = 1.0 - fg.S.T @ (r * (1.0 - D_A))
    if np.any(D_G >= 1):
        bad = np.flatnonzero(D_G >= 1).tolist()
        raise InfeasibleCoupling(f"D_G >= 1 at vertices {bad}")
    return D_G


def build_M(T: np.ndarray, D) -> np.ndarray:
    """Normalized matrix ``(I - D)^{-1} (T - D)``."""
    T = np.asarray(T, dtype=float)
    D = _diag(D, T.shape[0], "D")
    if np.any(D == 1.0):
        raise SingularNormalization(f"D has unit entries at {np.flatnonzero(D == 1.0).tolist()}")
    return (T - np.diag(D)) / (1.0 - D)[:, None]


def alpha_from_edge(gamma: float, rho_i: float, rho_j: float, q_e: float = 1.0) -> float:
    """GD step size matched to ADMM on one edge.

    >>> alpha_from_edge(1.0, 2.0, 2.0)
    0.5
    """
    if min(rho_i, rho_j, q_e) <= 0 or gamma < 0:
        raise InvalidParameter("rho, q must be positive and gamma non-negative")
    prod = rho_i * rho_j
    return gamma * prod / (prod + q_e * (rho_i + rho_j))


def check_alpha_consistency(fg: FactorGraph, q, params: AdmmParams, rtol: float = 1e-12) -> float:
    """Return the common GD step implied by every edge, or raise InconsistentAlpha."""
    params.check(fg)
    w = edge_weights(fg, q)
    r = params.rho
    alphas = np.array([
        alpha_from_edge(params.gamma, r[2 * k], r[2 * k + 1], w[k]) for k in range(fg.base.m)
    ])
    ref = np.median(alphas)
    spread = float(alphas.max() - alphas.min())
    if spread > rtol * abs(ref):
        offending = [fg.base.edges[k] for k in np.flatnonzero(np.abs(alphas - ref) > rtol * abs(ref))]
        raise InconsistentAlpha(
            f"per-edge alpha values disagree (spread {spread:.3e}); offending edges {offending}",
            spread,
            offending,
        )
    return float(alphas[0])


def max_alpha_nonneg(fg: FactorGraph, q, D_G) -> float:
    """Largest step size keeping ``M_G`` entrywise non-negative.

    Off-diagonal entries of ``T_G`` are non-negative for every alpha, so only
    the diagonal of ``T_G - D_G`` matters: ``1 - alpha w_b - D_b >= 0`` with
    ``w_b = sum_{e in I_b} Q_ee`` the weighted degree. The bound is
    ``min_b (1 - D_b) / w_b``, which equals ``(1 - D_G,max) / Q_max`` when
    ``D_G`` is constant.
    """
    D_G = _diag(D_G, fg.n, "D_G")
    if np.any(D_G >= 1):
        raise InvalidParameter("D_G entries must be < 1")
    Q_diag = np.diag(build_Q(fg, q))
    w = fg.S.T @ Q_diag
    return float(np.min((1.0 - D_G) / w))


def build_lifting_pair(fg: FactorGraph, q, params: AdmmParams, *, alpha=None, D_A=None) -> LiftingPair:
    """Assemble ``(M_G, v_G, D_G)`` and ``(M_A, v_A, D_A)``.

    ``alpha`` defaults to the consistent per-edge value; ``D_A`` defaults to
    :func:`default_DA`. Passing an explicit ``alpha`` skips the consistency
    check, which is how deliberately mismatched pairs are produced.
    """
    params.check(fg)
    if alpha is None:
        alpha = check_alpha_consistency(fg, q, params)
    if D_A is None:
        D_A = default_DA(fg, params.rho)
        D_G = solve_DG(fg, params.rho, D_A)
        # the default gauge makes v_A uniform; use that directly so dyadic
        # values such as 1/8 come out exact instead of one ulp off
        v_A = np.full(fg.size, 1.0 / fg.size)
        v_G = fg.S.T @ v_A
        D_G = 1.0 - v_G
    else:
        D_A = _diag(D_A, fg.size, "D_A")
        D_G = solve_DG(fg, params.rho, D_A)
        v_A = (1.0 - D_A) * params.rho
        v_G = 1.0 - D_G
    T_G = build_T_G(fg, q, alpha)
    T_A = build_T_A(fg, q, params)
    return LiftingPair(
        T_G=T_G,
        T_A=T_A,
        D_G=D_G,
        D_A=D_A,
        M_G=build_M(T_G, D_G),
        M_A=build_M(T_A, D_A),
        v_G=v_G,
        v_A=v_A,
        alpha=float(alpha),
        gamma=params.gamma,
        rho=params.rho,
    )
