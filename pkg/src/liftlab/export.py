"""Dense CSV matrices and the JSON manifest describing a lifting pair."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .graphs import FactorGraph
from .operators import LiftingPair, build_A, build_B, build_Q

__all__ = ["write_matrix_csv", "read_matrix_csv", "export_lifting_pair"]


def write_matrix_csv(M, path) -> None:
    """Row-major dense CSV, every entry in ``%.17e`` (round-trips exactly)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    np.savetxt(path, M, delimiter=",", fmt="%.17e")


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def export_lifting_pair(pair: LiftingPair, fg: FactorGraph, q, outdir, graph_label: str = "") -> dict:
    """Write every operator of ``pair`` to ``outdir`` and return the manifest.

    Diagonal matrices and vectors are written as single-row CSVs.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    mats = {
        "S": fg.S,
        "Q": build_Q(fg, q),
        "A": build_A(fg, q, pair.rho),
        "B": build_B(fg, pair.rho),
        "T_G": pair.T_G,
        "T_A": pair.T_A,
        "M_G": pair.M_G,
        "M_A": pair.M_A,
        "D_G": pair.D_G,
        "D_A": pair.D_A,
        "v_G": pair.v_G,
        "v_A": pair.v_A,
        "rho": pair.rho,
    }
    files = {}
    for name, M in mats.items():
        fname = f"{name}.csv"
        write_matrix_csv(M, out / fname)
        files[name] = {"file": fname, "shape": list(np.atleast_2d(M).shape)}
    manifest = {
        "graph": graph_label,
        "n_vertices": fg.n,
        "n_ehat": fg.size,
        "alpha": pair.alpha,
        "gamma": pair.gamma,
        "rho": pair.rho.tolist(),
        "matrices": files,
    }
    (out / "lifting_pair.json").write_text(json.dumps(manifest, indent=2))
    return manifest
