"""Least squares without matrix inversion, by sequential rank-one projections."""
from .baselines import (
    IterativeConfig,
    gram_condition,
    householder_qr_solve,
    lsmr_solve,
    lsqr_solve,
    normal_equations_oracle,
    randomized_kaczmarz,
)
from .bench import (
    BenchConfig,
    BenchReport,
    TrialResult,
    complexity_audit,
    render_table,
    run_sweep,
    run_trial,
    write_csv,
)
from .errors import (
    AuditFailure,
    DimensionError,
    ParseError,
    ProjsolveError,
    SingularGram,
    SingularPivot,
    SolverError,
    UnknownMethod,
    ZeroDenominator,
    ZeroRow,
)
from .fileio import parse_matrix_file, parse_vector_file
from .linalg import (
    OpCounter,
    PivotProjector,
    apply_projector,
    dot,
    materialize_projector,
    norm2,
    project_columns,
)
from .mimo import ChannelInstance, build_problem, gen_channel, gen_input, zf_estimate
from .solver import (
    CoefficientLedger,
    EliminationRecord,
    QrFactors,
    Solution,
    build_c_matrix,
    eliminate_column,
    extract_qr,
    inverse_vector,
    ratio_dot,
    ratio_sum,
    reduce,
    solve_all,
    solve_single,
)

__version__ = "0.1.0"
