"""Nilpotent completely positive maps on matrix algebras."""
from .cpmap import (
    ChoiMatrix,
    KrausMap,
    Superoperator,
    apply,
    conjugate,
    from_choi,
    identity_channel,
    index,
    power_apply,
    reduce_kraus,
    to_choi,
    to_superoperator,
    unit_image,
    zero_map,
)
from .errors import (
    CPNilpError,
    IllConditioned,
    InvalidType,
    LengthMismatch,
    NotARoot,
    NotContractive,
    NotInCone,
    NotInvariant,
    NotNilpotent,
)
from .majorization import (
    check_theorem_3_1,
    compress,
    cone_membership,
    extreme_points,
    split,
    verify_extreme,
)
from .nilpotency import (
    FlagDecomposition,
    adjoint_type,
    check_basic_inequalities,
    check_theorem_2_7,
    commuting_flags_report,
    cp_type,
    flag,
    linear_nilpotent_type,
    nilpotency_order,
    synthesize,
)
from .numerics import DEFAULT_TOL, Subspace, Tolerance
from .roots import RootCandidate, build_root, compress_to_nilpotent, is_root_of_state

__version__ = "0.1.0"
