"""Max-plus algebra toolkit for tandem queueing system simulation."""

from .core import (
    E,
    EPS,
    MaxPlusMatrix,
    NotInvertibleError,
    ShapeError,
    approx_equal,
    format_matrix,
    inverse,
    oplus,
    otimes,
    parse_matrix,
)
from .engine import (
    OpLedger,
    Trajectory,
    oracle_lindley,
    simulate,
    simulate_batched,
    simulate_closed_sparse,
    simulate_serial,
    simulate_vectorized,
)
from .models import (
    ModelConfigError,
    ServiceTimes,
    TandemSpec,
    build_transition,
    service_diag,
    shift_matrix,
    transition_closed,
    transition_closed_c2,
    transition_comm_b0,
    transition_mfg_b0,
    transition_open_infinite,
    transition_blocking_b1,
)
from .solver import (
    NilpotencyCertificate,
    NotNilpotentError,
    nilpotency_index,
    solve_implicit,
    star_truncated,
)
from .sources import ServiceTimeSource, dump_trace, load_trace

__version__ = "0.1.0"
