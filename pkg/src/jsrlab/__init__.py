"""jsrlab: deterministic and Markovian joint spectral radii of switched linear systems."""

from .errors import (
    BudgetExceededError,
    DegenerateDistributionError,
    DimensionError,
    IllConditionedError,
    IndexOutOfRangeError,
    JsrlabError,
    NonFiniteError,
    NotPositiveDefiniteError,
    NumericalFailureError,
    StateExplosionError,
)
from .higher_order import (
    FinitenessWitness,
    HigherOrderChain,
    build_cycle_chain,
    distinct_window_check,
    finiteness_search,
    lift_states,
    lift_to_order_one,
)
from .jsr_deterministic import (
    BarabanovApprox,
    JsrBracket,
    barabanov_approx,
    jsr_bounds_bruteforce,
    jsr_gripenberg,
)
from .jsr_probabilistic import (
    ExpectationCurve,
    McEstimate,
    exact_expectation,
    mc_estimate,
    prob_jsr_upper,
)
from .linalg import (
    induced_norm,
    solve_spd_system,
    spd_sqrt,
    spectral_radius,
)
from .markov import (
    CycleRecord,
    InvariantStructure,
    MarkovChain,
    SccDecomposition,
    enumerate_closed_walks,
    enumerate_simple_cycles,
    invariant_probabilities,
    sample_path,
    scc_decompose,
)
from .equality import (
    EqualityVerdict,
    GapConfig,
    OrthogonalCertificate,
    check_cycle_condition,
    check_distinct_cycle,
    gap_report,
    orthogonal_similarity,
    semigroup_irreducibility,
)
from .system import (
    IrreducibilityVerdict,
    MatrixTuple,
    canonical_rotation,
    irreducibility_check,
    minimal_period,
    word_product,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
