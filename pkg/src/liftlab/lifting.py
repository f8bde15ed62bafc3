"""Lifting checks between ADMM and GD, and finite Markov-chain lifting.

A matrix ``M_hat`` on an expanded state space lifts ``M`` through a 0/1
map ``S`` (one 1 per row) when

    pi = S^T pi_hat,   D_pi M = S^T D_pi_hat M_hat S.

:func:`verify_lifting` checks this for the ADMM/GD pair, where ``M_A`` may
carry negative entries and is then a lifting only in the algebraic sense.
The remaining functions handle genuine Markov chains: collapsing a lifted
chain, the direction-persistent lift of a cycle walk, and worst-case mixing
times.

For irreducible chains a lift can at best achieve a square-root speedup of
the mixing time, and for reversible ones no asymptotic speedup at all; the
constants in those bounds are not modeled here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCollapse, InvalidInput, InvalidParameter, NotMixed
from .graphs import FactorGraph
from .operators import LiftingPair

__all__ = [
    "NEG_TOL",
    "LiftingCertificate",
    "FiniteChain",
    "verify_lifting",
    "min_entry",
    "witness_indices",
    "opposite_signs_witness",
    "collapse",
    "lift_cycle_chain",
    "lazy_cycle_chain",
    "mixing_time",
]

NEG_TOL = 1e-12


@dataclass(frozen=True)
class LiftingCertificate:
    residual_vec: float
    residual_mat: float
    alpha_used: float
    gamma_used: float
    rho_summary: dict
    min_entry_MA: float
    min_entry_index: tuple[int, int]
    is_markov_lifting: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual_vec <= self.tol and self.residual_mat <= self.tol

    def to_dict(self, graph: str | None = None, n: int | None = None) -> dict:
        d = {"graph": graph, "n": n}
        rho = self.rho_summary
        d.update(
            gamma=self.gamma_used,
            rho=rho["min"] if rho["min"] == rho["max"] else rho,
            alpha=self.alpha_used,
            residual_vec=self.residual_vec,
            residual_mat=self.residual_mat,
            min_entry=self.min_entry_MA,
            is_markov_lifting=self.is_markov_lifting,
        )
        return d


def min_entry(M) -> tuple[float, int, int]:
    """Smallest entry of ``M`` and its (row, col); first occurrence on ties."""
    M = np.asarray(M)
    k = int(np.argmin(M))
    r, c = divmod(k, M.shape[1])
    return float(M[r, c]), r, c


def verify_lifting(pair: LiftingPair, S, tol: float = 1e-10) -> LiftingCertificate:
    """Measure how far ``(M_A, v_A)`` is from lifting ``(M_G, v_G)`` through ``S``.

    Both residuals are max-abs entrywise deviations.
    """
    S = np.asarray(S, dtype=float)
    E, n = S.shape
    if pair.M_A.shape != (E, E) or pair.M_G.shape != (n, n):
        raise InvalidInput(
            f"S is {E}x{n} but M_A is {pair.M_A.shape} and M_G is {pair.M_G.shape}"
        )
    if pair.v_A.shape != (E,) or pair.v_G.shape != (n,):
        raise InvalidInput("stationary vectors do not match S")
    res_vec = float(np.max(np.abs(pair.v_G - S.T @ pair.v_A)))
    lhs = pair.v_G[:, None] * pair.M_G
    rhs = S.T @ (pair.v_A[:, None] * pair.M_A) @ S
    res_mat = float(np.max(np.abs(lhs - rhs)))
    val, r, c = min_entry(pair.M_A)
    rho = np.asarray(pair.rho)
    return LiftingCertificate(
        residual_vec=res_vec,
        residual_mat=res_mat,
        alpha_used=pair.alpha,
        gamma_used=pair.gamma,
        rho_summary={"min": float(rho.min()), "max": float(rho.max()), "mean": float(rho.mean())},
        min_entry_MA=val,
        min_entry_index=(r, c),
        is_markov_lifting=val >= -NEG_TOL,
        tol=tol,
    )


# -- negative entries on K4 minus an edge ---------------------------------------


def witness_indices(fg: FactorGraph) -> tuple[int, int, int, int]:
    """Extended-edge positions ``(p1, p2, p3, p4)`` used by the sign witness.

    The graph must be K4 minus one edge. Pick a degree-2 vertex ``b`` with
    incident edges ``e = (a, b)`` and ``e' = (b, c)`` (lower vertex first).
    Then ``p1 = (e, a)``, ``p2 = (e, b)``, ``p3 = (e', b)``, ``p4 = (e', c)``.
    On the canonical labeling (missing edge (2, 3)) this is ``b = 2``.
    """
    g = fg.base
    if g.n != 4 or g.m != 5:
        raise InvalidInput("witness requires K4 with exactly one edge removed")
    b = int(np.flatnonzero(fg.deg == 2)[0])
    e1, e2 = sorted(k for k, edge in enumerate(g.edges) if b in edge)

    def pos(edge_idx, vertex):
        return fg.ehat.index((edge_idx, vertex))

    a = next(v for v in g.edges[e1] if v != b)
    c = next(v for v in g.edges[e2] if v != b)
    return pos(e1, a), pos(e1, b), pos(e2, b), pos(e2, c)


def opposite_signs_witness(fg: FactorGraph, rho, gamma: float) -> tuple[float, float, float, float]:
    """Closed-form entries ``(t21, t24, t31, t34)`` of ``T_A`` on K4 minus an edge.

    With the positions ``p1..p4`` of :func:`witness_indices`, ``tij`` is
    ``T_A[p_i, p_j]``. Unit edge weights are assumed. The shared vertex has
    degree two, so ``t21`` and ``t34`` carry the factors ``(r12 - r22)`` and
    ``-(r12 - r22)`` and cannot both be negative or both positive, while
    ``t24`` and ``t31`` are strictly positive. Since a diagonal rescaling
    cannot flip signs inside a row, ``M_A`` has a negative entry for every
    ``D_A`` unless ``r12 == r22``.
    """
    if np.any(fg.base.weights != 1.0):
        raise InvalidInput("closed-form witness assumes unit edge weights")
    r = np.broadcast_to(np.asarray(rho, dtype=float), (fg.size,))
    if np.any(r <= 0):
        raise InvalidParameter("rho must be strictly positive")
    p1, p2, p3, p4 = witness_indices(fg)
    r11, r12, r22, r23 = r[p1], r[p2], r[p3], r[p4]
    s = r12 + r22
    t21 = gamma * r11 * (r12 - r22) / (s * (r11 + r12 + r11 * r12))
    t24 = 2 * gamma / (s * (1 + 1 / r22 + 1 / r23))
    t31 = 2 * gamma / (s * (1 + 1 / r11 + 1 / r12))
    t34 = -gamma * r23 * (r12 - r22) / (s * (r22 + r23 + r22 * r23))
    assert t21 * t34 <= 0 and t24 > 0 and t31 > 0
    return t21, t24, t31, t34


# -- Markov chains --------------------------------------------------------------


@dataclass(frozen=True)
class FiniteChain:
    """Row-stochastic transition matrix with a stationary distribution."""

    P: np.ndarray = field(repr=False)
    pi: np.ndarray = field(repr=False)

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or pi.shape != (P.shape[0],):
            raise InvalidInput("P must be square and pi must match its size")
        if np.any(P < -NEG_TOL) or np.max(np.abs(P.sum(axis=1) - 1)) > 1e-12:
            raise InvalidInput("P must be non-negative with unit row sums")
        if np.any(pi < 0) or abs(pi.sum() - 1) > 1e-12:
            raise InvalidInput("pi must be a probability vector")
        if np.max(np.abs(pi @ P - pi)) > 1e-10:
            raise InvalidInput("pi is not stationary for P")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)

    @property
    def size(self) -> int:
        return self.P.shape[0]

    @classmethod
    def from_matrix(cls, P) -> FiniteChain:
        """Attach the stationary distribution (left Perron vector) to ``P``."""
        P = np.asarray(P, dtype=float)
        w, V = np.linalg.eig(P.T)
        k = int(np.argmin(np.abs(w - 1)))
        pi = np.real(V[:, k])
        return cls(P, pi / pi.sum())


def _check_lifting_map(S: np.ndarray) -> None:
    if np.any((S != 0) & (S != 1)) or np.any(S.sum(axis=1) != 1):
        raise InvalidInput("S must be 0/1 with exactly one 1 per row")


def collapse(chain: FiniteChain, S) -> FiniteChain:
    """Project a lifted chain onto the base states selected by ``S``."""
    S = np.asarray(S, dtype=float)
    _check_lifting_map(S)
    if S.shape[0] != chain.size:
        raise InvalidInput(f"S has {S.shape[0]} rows, chain has {chain.size} states")
    pi = S.T @ chain.pi
    if np.any(pi == 0):
        raise DegenerateCollapse(f"base states {np.flatnonzero(pi == 0).tolist()} carry no mass")
    P = (S.T @ (chain.pi[:, None] * chain.P) @ S) / pi[:, None]
    return FiniteChain(P, pi)


def lift_cycle_chain(n: int, switch_prob: float) -> tuple[FiniteChain, np.ndarray]:
    """Direction-persistent walk on the cycle, lifted to ``2n`` states.

    State ``i`` is site ``i`` moving clockwise, state ``n + i`` is site ``i``
    moving counter-clockwise. Each step moves one site along the current
    direction with probability ``1 - switch_prob`` and otherwise stays put
    while reversing direction. The stationary law is uniform and the chain
    collapses onto :func:`lazy_cycle_chain` with ``stay = switch_prob``.
    These transition probabilities are a modeling choice, not derived data.
    """
    if n < 3:
        raise InvalidParameter(f"cycle needs n >= 3, got {n}")
    if not 0.0 < switch_prob < 1.0:
        raise InvalidParameter(f"switch_prob must lie in (0, 1), got {switch_prob}")
    P = np.zeros((2 * n, 2 * n))
    for i in range(n):
        P[i, (i + 1) % n] = 1 - switch_prob
        P[i, n + i] = switch_prob
        P[n + i, n + (i - 1) % n] = 1 - switch_prob
        P[n + i, i] = switch_prob
    S = np.vstack([np.eye(n), np.eye(n)])
    return FiniteChain(P, np.full(2 * n, 1.0 / (2 * n))), S


def lazy_cycle_chain(n: int, stay: float = 0.5) -> FiniteChain:
    """Walk on C_n holding with probability ``stay``, else a uniform neighbor step."""
    if n < 3:
        raise InvalidParameter(f"cycle needs n >= 3, got {n}")
    if not 0.0 <= stay <= 1.0:
        raise InvalidParameter(f"stay must lie in [0, 1], got {stay}")
    P = stay * np.eye(n)
    for i in range(n):
        P[i, (i + 1) % n] += (1 - stay) / 2
        P[i, (i - 1) % n] += (1 - stay) / 2
    return FiniteChain(P, np.full(n, 1.0 / n))


def mixing_time(chain: FiniteChain, eps: float = 0.25, t_max: int = 100_000) -> int:
    """Smallest ``t`` with ``max_{i,j} |(P^t)_{ji} - pi_i| < eps``.

    Row ``j`` of ``P^t`` is the law after ``t`` steps from state ``j``; the
    worst case over all initial laws is attained at these point masses
    because the deviation is convex in the initial law.
    """
    if eps <= 0:
        raise InvalidParameter("eps must be positive")
    P = chain.P
    Pt = np.eye(chain.size)
    for t in range(1, t_max + 1):
        Pt = Pt @ P
        if np.max(np.abs(Pt - chain.pi)) < eps:
            return t
    raise NotMixed(f"chain did not mix within {t_max} steps", t_max)
