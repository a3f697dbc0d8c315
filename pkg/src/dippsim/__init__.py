"""Distributed greedy pursuit over simulated sensor networks, plus the
restricted-isometry analysis toolkit that certifies its bounds."""

from .core import (
    SingularSystemError,
    SupportSet,
    least_squares_on_support,
    residual_projection,
    supp_select,
    vote_accumulate,
)
from .signals import (
    Scenario,
    ScenarioConfig,
    SparseSignal,
    dump_scenario,
    gen_matrix,
    gen_noise,
    gen_scenario,
    gen_signal,
    gen_supports,
    load_scenario,
    stream,
)
from .network import (
    NetworkTopology,
    build_complete,
    build_ring,
    build_watts_strogatz,
    is_connected,
    topology_from_edges,
    write_edge_list,
)
from .pursuit import SippOptions, SippResult, sipp_run, sp_run
from .fusion import AssumptionReport, FusionOutput, assumption_checks, consensus, expansion
from .engine import DippOptions, NodeState, RunTrace, dipp_round, dipp_run
from .metrics import TrialMetrics, asce, measure_trial, srer, support_distortion
from .analysis import (
    ACoRatio,
    BoundConstants,
    DippBound,
    InequalityCheck,
    LemmaInstance,
    RicEnumerationError,
    SippBound,
    a_co_measure,
    bound_constants,
    convergence_root,
    dipp_bound,
    lemma_suite,
    ric_exact,
    ric_sample,
    sipp_bound,
)
from .experiment import ExperimentConfig, analyze_bounds, paper_examples, run_sweep, write_csv

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
