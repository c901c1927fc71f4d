"""School-choice mechanisms, fairness diagnostics, and claim verification.

Public surface re-exported here; the compiled/pure kernel choice is made in
``schoolmatch._kernels`` (see ``kernel_backend``).
"""

from ._kernels import BACKEND_NAME as kernel_backend
from .claims import ClaimReport, check_claim, claim_ids, replay_counterexample
from .errors import (
    CommonPriorityError,
    FixtureMismatchError,
    InstanceValidationError,
    LemmaViolationError,
    SizeGuardError,
    SmallMarketWarning,
    UnknownClaimError,
)
from .fairness import (
    BlockingPair,
    FairnessVerdict,
    blocking_pairs,
    blocking_students,
    compare_at,
    count_blocking,
    is_individually_rational,
    is_stable,
    stable_set_bruteforce,
)
from .families import FamilyConfig, enumerate_instances, random_instance
from .fixtures import FIXTURE_IDS, build_fixture, fixture_instance, reproduce_fixture
from .mechanisms import (
    Mechanism,
    MechanismSpec,
    RoundTrace,
    boston,
    chinese_parallel,
    deferred_acceptance,
    first_preference_first,
    fpf_adjusted_priorities,
    run_mechanism,
    serial_dictatorship,
)
from .model import (
    Instance,
    Matching,
    UNMATCHED,
    rank_of,
    truncate_preferences,
    truncate_profile,
    uniform_limits,
    validate_instance,
)
from .serialize import load_instance, save_instance
from .strategy import (
    EquilibriumOutcome,
    SophisticationPartition,
    all_reports,
    boston_equilibrium_outcome,
    competitive_schools,
    gs_manipulating_students_fast,
    is_nash_equilibrium,
    manipulating_students,
    sd_equilibrium_outcome,
    semi_sophisticated_outcome,
    semi_sophisticated_profile,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
