"""Distribution-feeder volt/VAR control toolkit.

Graph-matrix LinDistFlow modeling, centralized box-constrained QP
references, local droop/scaled/delayed controllers with eigenvalue
stability certification, and closed-loop static/dynamic scenario replay.
"""

from ._core import (
    AcSolution,
    Bus,
    ControlConfig,
    ControlState,
    DailyProfile,
    DynamicControl,
    DynamicResult,
    DynamicScenario,
    FeederNetwork,
    GraphMatrices,
    Line,
    LoopResult,
    MinuteSummary,
    Objective,
    Plant,
    QpProblem,
    QpSolution,
    Scheme,
    StabilityReport,
    TraceRecord,
    VvcError,
    analyze,
    baseline_voltage,
    dynamic_summary_json,
    gradient,
    graph_matrices,
    h_matrix,
    kkt_residual,
    lambda_max_sym,
    make_delayed_droop,
    make_delayed_scaled,
    make_droop,
    make_generic,
    make_qp,
    make_scaled,
    project,
    qp_mismatch_norm,
    run_closed_loop,
    run_dynamic,
    run_static,
    scaled_epsilon_bound,
    solve_acpf,
    solve_lindistflow,
    solve_qp,
    step,
    var_limits_at,
)

__version__ = "0.1.0"
