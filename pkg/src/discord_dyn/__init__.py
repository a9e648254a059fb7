"""Discord-like correlations of Bell-diagonal states under local decoherence."""

from .bellstate import (
    BellDiagonalState,
    EigenQuad,
    coefficients,
    coefficients_from_density_matrix,
    eigenvalues,
    from_density_matrix,
    is_physical,
    sample_physical,
    to_density_matrix,
)
from .channels import (
    SUPPORTED_PAIRS,
    ChannelKind,
    KrausSet,
    apply_one_sided,
    apply_two_sided,
    coefficient_map_one_sided,
    coefficient_map_two_sided,
    kraus_set,
)
from .dynamics import (
    ConstraintCurve,
    ScpReport,
    SweepConfig,
    SweepResult,
    branch_split_q0,
    constraint_curve_two_sided,
    detect_revival,
    detect_sudden_changes,
    freeze_interval,
    predict_scp_one_sided,
    scp_reports,
    sweep_one_sided,
    sweep_two_sided,
)
from .errors import (
    DiscordDynError,
    DomainError,
    NonPhysicalState,
    NotBellDiagonal,
    NumericalError,
    OrderingViolation,
    UnsupportedChannel,
    UnsupportedPair,
)
from .measures import (
    BDD,
    QD,
    TDD,
    MeasureKind,
    bures_distance_discord,
    bures_fmax,
    quantum_discord,
    quantum_discord_oracle,
    trace_distance_discord,
    uhlmann_fidelity,
)

__version__ = "0.1.0"
