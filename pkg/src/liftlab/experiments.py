"""Family sweeps comparing optimally tuned ADMM against optimally tuned GD.

For each graph in a family both algorithms are tuned and their convergence
times ``R = 1 / (1 - tau*)`` recorded. Two estimators of the exponent
``beta`` in ``R_A ~ R_G ** beta`` are then formed::

    beta1(n) = log R_A(n) / log R_G(n)
    beta2(n) = (R_G / R_A) * (R_A(n') - R_A(n)) / (R_G(n') - R_G(n))

where ``n'`` is the next index of the sweep (families such as the torus are
not defined at every vertex count, so differences run over consecutive
indices rather than ``n + 1``). ``beta2`` is attached to the later index.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import InvalidInput
from .graphs import build_barbell, build_complete_minus_edge, build_cycle, build_torus, factor_graph
from .tuning import SearchSpec, tune_admm, tune_gd_closed_form

__all__ = [
    "FAMILIES",
    "CSV_COLUMNS",
    "SweepRecord",
    "BetaSeries",
    "build_family",
    "sweep_one",
    "sweep",
    "beta_hats",
    "write_csv",
    "read_csv",
    "sweep_summary",
]

FAMILIES = {
    "cycle": build_cycle,
    "torus": build_torus,
    "barbell": build_barbell,
    "k4minus": lambda n: build_complete_minus_edge(n),
}

CSV_COLUMNS = [
    "family", "index", "n", "alpha_star", "tau_G_star", "R_G",
    "gamma_star", "rho_star", "tau_A_star", "R_A", "beta1", "beta2",
]


@dataclass(frozen=True)
class SweepRecord:
    family: str
    index: int
    n: int
    alpha_star: float
    tau_G_star: float
    R_G: float
    gamma_star: float
    rho_star: float
    tau_A_star: float
    R_A: float
    status: str = "converged"

    @property
    def dominates(self) -> bool:
        """ADMM is at least as fast as GD on this graph."""
        return self.tau_A_star <= self.tau_G_star


@dataclass
class BetaSeries:
    indices: list
    beta1: list
    beta2: list  # aligned with ``indices``; None where undefined
    skipped: list

    def last(self, which: str = "beta1"):
        vals = [v for v in getattr(self, which) if v is not None]
        return vals[-1] if vals else None


def build_family(family: str, index: int):
    if family not in FAMILIES:
        raise InvalidInput(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[family](index)


def sweep_one(family: str, index: int, spec: SearchSpec | None = None) -> SweepRecord:
    g = build_family(family, index)
    fg = factor_graph(g)
    gd = tune_gd_closed_form(fg)
    admm = tune_admm(fg, spec=spec)
    return SweepRecord(
        family=family,
        index=index,
        n=g.n,
        alpha_star=gd.params_opt["alpha"],
        tau_G_star=gd.tau_opt,
        R_G=gd.R_opt,
        gamma_star=admm.params_opt.get("gamma", math.nan),
        rho_star=admm.params_opt.get("rho", math.nan),
        tau_A_star=admm.tau_opt,
        R_A=admm.R_opt,
        status=admm.status,
    )


def _sweep_task(args):
    return sweep_one(*args)


def sweep(family: str, indices, spec: SearchSpec | None = None, *, jobs: int = 1) -> list[SweepRecord]:
    """Tune both algorithms at every index; output order follows ``indices``."""
    indices = [int(i) for i in indices]
    for i in indices:
        build_family(family, i)  # validate sizes before spending time
    tasks = [(family, i, spec) for i in indices]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_task, tasks))
    return [_sweep_task(t) for t in tasks]


def beta_hats(records, parity: bool = False) -> BetaSeries:
    """Exponent estimators for one family's records, sorted by index.

    With ``parity`` set, ``beta2`` differences pair each index with the
    previous index of the same parity.
    """
    recs = sorted(records, key=lambda r: r.index)
    if len(recs) < 2:
        raise InvalidInput("beta estimates need at least two records")
    beta1, beta2, skipped = [], [], []
    for k, r in enumerate(recs):
        ok = r.R_G > 1 and r.R_A > 1 and math.isfinite(r.R_A)
        beta1.append(math.log(r.R_A) / math.log(r.R_G) if ok else None)
        prev = None
        for p in reversed(recs[:k]):
            if not parity or (p.index - r.index) % 2 == 0:
                prev = p
                break
        if prev is None:
            beta2.append(None)
            continue
        dG = r.R_G - prev.R_G
        dA = r.R_A - prev.R_A
        if dG == 0 or not (math.isfinite(dA) and ok):
            beta2.append(None)
            skipped.append(r.index)
            continue
        beta2.append((r.R_G / r.R_A) * (dA / dG))
    return BetaSeries([r.index for r in recs], beta1, beta2, skipped)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def write_csv(records, betas: dict | BetaSeries | None, path) -> None:
    """Write records and their beta estimates in full double precision.

    ``betas`` is a single :class:`BetaSeries` or a mapping family -> series;
    when omitted it is computed per family from ``records``.
    """
    records = list(records)
    if betas is None:
        betas = {}
        for fam in dict.fromkeys(r.family for r in records):
            fam_recs = [r for r in records if r.family == fam]
            if len(fam_recs) >= 2:
                betas[fam] = beta_hats(fam_recs)
    elif isinstance(betas, BetaSeries):
        fams = {r.family for r in records}
        if len(fams) != 1:
            raise InvalidInput("a single BetaSeries needs records from one family")
        betas = {fams.pop(): betas}
    lookup = {}
    for fam, series in betas.items():
        for i, b1, b2 in zip(series.indices, series.beta1, series.beta2):
            lookup[(fam, i)] = (b1, b2)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            b1, b2 = lookup.get((r.family, r.index), (None, None))
            w.writerow([
                r.family, r.index, r.n,
                _fmt(r.alpha_star), _fmt(r.tau_G_star), _fmt(r.R_G),
                _fmt(r.gamma_star), _fmt(r.rho_star), _fmt(r.tau_A_star), _fmt(r.R_A),
                _fmt(b1), _fmt(b2),
            ])


def read_csv(path) -> list[dict]:
    rows = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            out = {"family": row["family"], "index": int(row["index"]), "n": int(row["n"])}
            for col in CSV_COLUMNS[3:]:
                out[col] = float(row[col]) if row[col] != "" else None
            rows.append(out)
    return rows


def sweep_summary(family: str, records, betas: BetaSeries) -> dict:
    b1 = [v for v in betas.beta1 if v is not None]
    return {
        "family": family,
        "indices": [r.index for r in records],
        "beta1_last": betas.last("beta1"),
        "beta2_last": betas.last("beta2"),
        "max_beta1": max(b1) if b1 else None,
    }


def summary_json(family: str, records, betas: BetaSeries) -> str:
    return json.dumps(sweep_summary(family, records, betas))


def record_dict(r: SweepRecord) -> dict:
    return asdict(r)
