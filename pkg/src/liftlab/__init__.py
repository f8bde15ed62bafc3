"""Exact linear operators of distributed ADMM and gradient descent on
graph-consensus quadratics, their lifting relation, and rate experiments."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .graphs import (
    FactorGraph,
    Graph,
    build_barbell,
    build_complete,
    build_complete_minus_edge,
    build_cycle,
    build_torus,
    factor_graph,
    laplacian,
    parse_graph_spec,
    read_edge_list,
    write_edge_list,
)
from .operators import (
    AdmmParams,
    LiftingPair,
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
from .spectral import convergence_rate, convergence_time, spectrum, spectrum_report
from .lifting import (
    FiniteChain,
    LiftingCertificate,
    collapse,
    lazy_cycle_chain,
    lift_cycle_chain,
    min_entry,
    mixing_time,
    opposite_signs_witness,
    verify_lifting,
)
from .dynamics import admm_init, admm_step, fixed_point_residual, run_admm, run_gd
from .tuning import SearchSpec, TuneResult, tune_admm, tune_gd_closed_form, tune_gd_search
from .experiments import SweepRecord, beta_hats, sweep, write_csv
