"""Direct simulation of distributed ADMM and gradient descent.

ADMM is run through its five-variable recursion rather than through the
reduced map ``T_A``, so agreement between the two is a real check::

    x <- A n
    m <- gamma x + u
    s' <- (1 - gamma) s + B m
    u <- u + gamma x + (1 - gamma) s - s'
    n <- s' - u
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInput, InvalidParameter
from .graphs import FactorGraph
from .operators import AdmmParams, build_A, build_B, build_T_G

__all__ = [
    "AdmmState",
    "Trajectory",
    "admm_init",
    "admm_step",
    "projection_errors",
    "run_admm",
    "run_gd",
    "fixed_point_residual",
    "write_trajectory_csv",
]

DIVERGENCE_NORM = 1e12


@dataclass(frozen=True)
class AdmmState:
    x: np.ndarray
    m: np.ndarray
    s: np.ndarray
    u: np.ndarray
    n: np.ndarray


@dataclass
class Trajectory:
    """States (ADMM) or iterates (GD) for ``t = 0 .. steps``."""

    states: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    relation_errors: list = field(default_factory=list)
    diverged: bool = False

    @property
    def final(self):
        return self.states[-1]

    def vectors(self) -> np.ndarray:
        """The evolving vector per step: ``n`` for ADMM, ``z`` for GD."""
        return np.array([s.n if isinstance(s, AdmmState) else s for s in self.states])


def fixed_point_residual(v) -> float:
    """Max-abs distance from ``v`` (or ``v.n``) to the consensus line ``c 1``."""
    if isinstance(v, AdmmState):
        v = v.n
    v = np.asarray(v, dtype=float)
    return float(np.max(np.abs(v - v.mean())))


def admm_init(fg: FactorGraph, z0) -> AdmmState:
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (fg.n,):
        raise InvalidInput(f"z0 must have {fg.n} entries")
    s = fg.S @ z0
    zero = np.zeros(fg.size)
    return AdmmState(x=zero, m=zero.copy(), s=s, u=zero.copy(), n=s.copy())


def admm_step(state: AdmmState, A: np.ndarray, B: np.ndarray, gamma: float) -> AdmmState:
    x = A @ state.n
    m = gamma * x + state.u
    s = (1 - gamma) * state.s + B @ m
    u = state.u + gamma * x + (1 - gamma) * state.s - s
    return AdmmState(x=x, m=m, s=s, u=u, n=s - u)


def projection_errors(state: AdmmState, B: np.ndarray) -> dict[str, float]:
    """Deviations from ``Bn = s``, ``(I-B)n = -u``, ``Bs = s``, ``Bu = 0``."""
    Bn, Bs, Bu = B @ state.n, B @ state.s, B @ state.u
    return {
        "Bn-s": float(np.max(np.abs(Bn - state.s))),
        "Bperp_n+u": float(np.max(np.abs(state.n - Bn + state.u))),
        "Bs-s": float(np.max(np.abs(Bs - state.s))),
        "Bu": float(np.max(np.abs(Bu))),
    }


def run_admm(fg, q, params: AdmmParams, z0=None, steps: int = 100, *, state=None, tol=1e-8) -> Trajectory:
    """Iterate ADMM for ``steps`` steps from ``z0`` (or a prepared state).

    A supplied ``state`` must already satisfy ``B u = 0`` and ``B s = s``
    within ``tol``; it is rejected rather than projected.
    ``relation_errors[t]`` records the largest deviation from the projection
    identities at step ``t``.
    """
    if steps < 0:
        raise InvalidParameter("steps must be non-negative")
    params.check(fg)
    A = build_A(fg, q, params.rho)
    B = build_B(fg, params.rho)
    if state is None:
        if z0 is None:
            raise InvalidInput("either z0 or state is required")
        state = admm_init(fg, z0)
    else:
        errs = projection_errors(state, B)
        if max(errs.values()) > tol:
            raise InvalidInput(f"initial state is off the invariant manifold: {errs}")
    traj = Trajectory([state], [fixed_point_residual(state)], [max(projection_errors(state, B).values())])
    for _ in range(steps):
        state = admm_step(state, A, B, params.gamma)
        traj.states.append(state)
        traj.residuals.append(fixed_point_residual(state))
        traj.relation_errors.append(max(projection_errors(state, B).values()))
        if np.max(np.abs(state.n)) > DIVERGENCE_NORM:
            traj.diverged = True
            break
    return traj


def run_gd(fg, q, alpha: float, z0, steps: int = 100) -> Trajectory:
    if steps < 0:
        raise InvalidParameter("steps must be non-negative")
    T = build_T_G(fg, q, alpha)
    z = np.asarray(z0, dtype=float)
    if z.shape != (fg.n,):
        raise InvalidInput(f"z0 must have {fg.n} entries")
    traj = Trajectory([z], [fixed_point_residual(z)])
    for _ in range(steps):
        z = T @ z
        traj.states.append(z)
        traj.residuals.append(fixed_point_residual(z))
        if np.max(np.abs(z)) > DIVERGENCE_NORM:
            traj.diverged = True
            break
    return traj


def write_trajectory_csv(traj: Trajectory, path, full_state: bool = False) -> None:
    """Write ``t,residual`` rows, plus ``v0..`` columns when ``full_state``."""
    vecs = traj.vectors() if full_state else None
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        header = ["t", "residual"]
        if full_state:
            header += [f"v{k}" for k in range(vecs.shape[1])]
        w.writerow(header)
        for t, r in enumerate(traj.residuals):
            row = [t, repr(float(r))]
            if full_state:
                row += [repr(float(x)) for x in vecs[t]]
            w.writerow(row)
