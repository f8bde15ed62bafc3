"""Step-size and penalty tuning that minimizes the asymptotic rate.

GD has a closed-form optimum because ``T_G = I - alpha L`` is symmetric:
with ``lam2`` the algebraic connectivity and ``lam_max`` the largest Laplacian
eigenvalue, ``alpha* = 2 / (lam_max + lam2)`` and
``tau* = (lam_max - lam2) / (lam_max + lam2)``. A one-dimensional search over
alpha using the full spectrum of ``T_G`` serves as a cross-check.

ADMM is tuned over ``(gamma, rho)`` with ``rho`` broadcast to every extended
edge: an exhaustive coarse grid followed by derivative-free refinement, since
the rate is non-smooth wherever the dominant eigenvalue changes branch.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy.optimize

from .errors import DegenerateSpectrum, InvalidInput, InvalidParameter
from .graphs import FactorGraph, laplacian
from .operators import build_A, build_B, build_T_G, edge_weights
from .spectral import convergence_rate

__all__ = [
    "SearchSpec",
    "TuneResult",
    "laplacian_extremes",
    "gd_rate",
    "admm_rate",
    "tune_gd_closed_form",
    "tune_gd_search",
    "tune_admm",
]


@dataclass(frozen=True)
class SearchSpec:
    """Search domain and budget for :func:`tune_admm`.

    ``gamma_max`` defaults to 1.99 rather than something further from 2:
    on large cycles the optimal relaxation approaches 2 and the optimal rate
    sits at roughly ``gamma - 1``, so a tighter cap would pin the rate.
    """

    gamma_min: float = 0.05
    gamma_max: float = 1.99
    gamma_points: int = 25
    rho_min: float = 1e-3
    rho_max: float = 1e3
    rho_points: int = 41
    refine_tol: float = 1e-8
    refine_budget: int = 200

    def __post_init__(self):
        if not 0 < self.gamma_min <= self.gamma_max < 2:
            raise InvalidParameter("need 0 < gamma_min <= gamma_max < 2")
        if not 0 < self.rho_min <= self.rho_max:
            raise InvalidParameter("need 0 < rho_min <= rho_max")
        if self.gamma_points < 1 or self.rho_points < 1:
            raise InvalidParameter("grid needs at least one point per axis")
        if self.refine_budget < 0 or self.refine_tol <= 0:
            raise InvalidParameter("refine_budget must be >= 0 and refine_tol > 0")

    @property
    def gammas(self) -> np.ndarray:
        return np.linspace(self.gamma_min, self.gamma_max, self.gamma_points)

    @property
    def rhos(self) -> np.ndarray:
        return np.logspace(np.log10(self.rho_min), np.log10(self.rho_max), self.rho_points)

    @classmethod
    def from_file(cls, path, **overrides) -> SearchSpec:
        """Read ``key=value`` lines; ``#`` starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = (s.strip() for s in line.partition("="))
            if not sep or key not in types:
                raise InvalidInput(f"{path}:{lineno}: unrecognized line {raw!r}")
            values[key] = int(val) if types[key] == "int" else float(val)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TuneResult:
    params_opt: dict
    tau_opt: float
    R_opt: float
    evaluations: int
    refinements: int = 0
    status: str = "converged"  # converged | boundary | failed
    grid_best: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _R(tau: float) -> float:
    return 1.0 / (1.0 - tau) if tau < 1 else math.inf


def laplacian_extremes(fg: FactorGraph, q=None) -> tuple[float, float]:
    """``(lam2, lam_max)`` of the weighted Laplacian ``S^T Q S``."""
    g = fg.base.with_weights(edge_weights(fg, q))
    lam = np.linalg.eigvalsh(laplacian(g))
    if lam[1] < 1e-12 * max(lam[-1], 1.0):
        raise InvalidInput("Laplacian has multiple zero eigenvalues; graph is disconnected")
    return float(lam[1]), float(lam[-1])


def gd_rate(fg: FactorGraph, q, alpha: float) -> float:
    return convergence_rate(build_T_G(fg, q, alpha))


def tune_gd_closed_form(fg: FactorGraph, q=None) -> TuneResult:
    lam2, lam_max = laplacian_extremes(fg, q)
    alpha = 2.0 / (lam_max + lam2)
    tau = (lam_max - lam2) / (lam_max + lam2)
    return TuneResult({"alpha": alpha}, tau, _R(tau), evaluations=0)


def tune_gd_search(fg: FactorGraph, q=None, xatol: float = 1e-12) -> TuneResult:
    """Bounded scalar minimization of the spectral rate over ``(0, 2 / lam_max)``."""
    _, lam_max = laplacian_extremes(fg, q)
    hi = 2.0 / lam_max
    res = scipy.optimize.minimize_scalar(
        lambda a: gd_rate(fg, q, a),
        bounds=(0.0, hi),
        method="bounded",
        options={"xatol": xatol * hi, "maxiter": 500},
    )
    tau = float(res.fun)
    return TuneResult(
        {"alpha": float(res.x)},
        tau,
        _R(tau),
        evaluations=int(res.nfev),
        status="converged" if res.success else "failed",
    )


class _AdmmRate:
    """Rate of ``T_A`` as a function of scalar ``(gamma, rho)`` for a fixed graph.

    With a constant penalty ``B`` is the plain per-vertex average, independent
    of the penalty's value, so it is built once.
    """

    def __init__(self, fg: FactorGraph, q):
        self.fg = fg
        self.q = edge_weights(fg, q)
        self.B = build_B(fg, 1.0)
        self.I = np.eye(fg.size)
        self.count = 0

    def __call__(self, gamma: float, rho: float) -> float:
        self.count += 1
        A = build_A(self.fg, self.q, rho)
        T = self.I - gamma * (A + self.B - 2.0 * self.B @ A)
        try:
            tau = convergence_rate(T)
        except DegenerateSpectrum:
            return math.inf
        return tau if tau < 1.0 else math.inf


def admm_rate(fg: FactorGraph, q, gamma: float, rho: float) -> float:
    """Spectral rate of ADMM with ``rho`` broadcast; ``inf`` when not convergent."""
    return _AdmmRate(fg, q)(gamma, rho)


def _grid_row(args):
    fg, q, gammas, rho = args
    f = _AdmmRate(fg, q)
    return [f(g, rho) for g in gammas]


def _grid(fg, q, spec: SearchSpec, jobs: int) -> np.ndarray:
    tasks = [(fg, q, spec.gammas, r) for r in spec.rhos]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_grid_row, tasks))
    else:
        rows = [_grid_row(t) for t in tasks]
    return np.array(rows)  # shape (rho_points, gamma_points)


def tune_admm(fg: FactorGraph, q=None, spec: SearchSpec | None = None, *, jobs: int = 1) -> TuneResult:
    """Coarse grid over ``(gamma, rho)`` then derivative-free refinement.

    The grid is scanned in ``rho``-major order with a strict comparison, so
    ties go to the smallest ``rho`` and then the smallest ``gamma``.
    Refinement runs Nelder-Mead in ``(gamma, log rho)`` followed by a
    shrinking compass search, sharing ``spec.refine_budget`` evaluations and
    stopping once an iteration gains less than ``spec.refine_tol``.
    """
    spec = spec or SearchSpec()
    q = edge_weights(fg, q)
    table = _grid(fg, q, spec, jobs)
    n_grid = table.size
    if not np.isfinite(table).any():
        return TuneResult({}, math.inf, math.inf, n_grid, status="failed")
    ir, ig = np.unravel_index(int(np.argmin(table)), table.shape)
    g0, r0, t0 = float(spec.gammas[ig]), float(spec.rhos[ir]), float(table[ir, ig])

    f = _AdmmRate(fg, q)
    lo = np.array([spec.gamma_min, math.log(spec.rho_min)])
    hi = np.array([spec.gamma_max, math.log(spec.rho_max)])

    def obj(p):
        p = np.clip(p, lo, hi)
        return f(p[0], math.exp(p[1]))

    best_p, best_t = np.array([g0, math.log(r0)]), t0
    rounds = 0
    if spec.refine_budget > 0:
        res = scipy.optimize.minimize(
            obj,
            best_p,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={
                "maxfev": spec.refine_budget,
                "fatol": spec.refine_tol,
                "xatol": 1e-10,
                "initial_simplex": [
                    best_p,
                    best_p + [0.5 * (spec.gammas[1] - spec.gammas[0]) if spec.gamma_points > 1 else 0.01, 0],
                    best_p + [0, 0.5 * math.log(spec.rhos[1] / spec.rhos[0]) if spec.rho_points > 1 else 0.01],
                ],
            },
        )
        rounds += 1
        if res.fun < best_t:
            best_p, best_t = np.clip(res.x, lo, hi), float(res.fun)
        step = np.array([1e-2, 1e-2])
        while f.count < spec.refine_budget and step.max() > 1e-9:
            improved = False
            for d in ([1, 0], [-1, 0], [0, 1], [0, -1]):
                if f.count >= spec.refine_budget:
                    break
                cand = np.clip(best_p + step * d, lo, hi)
                t = obj(cand)
                if t < best_t - spec.refine_tol:
                    best_p, best_t, improved = cand, t, True
                    break
                if t < best_t:
                    best_p, best_t = cand, t
            rounds += 1
            if not improved:
                step = step / 2

    gamma, rho = float(best_p[0]), float(math.exp(best_p[1]))
    at_edge = (
        math.isclose(gamma, spec.gamma_min, abs_tol=1e-9)
        or math.isclose(gamma, spec.gamma_max, abs_tol=1e-9)
        or math.isclose(best_p[1], lo[1], abs_tol=1e-9)
        or math.isclose(best_p[1], hi[1], abs_tol=1e-9)
    )
    status = "failed" if not best_t < 1 else ("boundary" if at_edge else "converged")
    return TuneResult(
        {"gamma": gamma, "rho": rho},
        best_t,
        _R(best_t),
        evaluations=n_grid + f.count,
        refinements=rounds,
        status=status,
        grid_best={"gamma": g0, "rho": r0, "tau": t0},
    )
