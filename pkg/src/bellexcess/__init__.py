"""LHV values of bipartite Bell inequalities through the excess of a matrix."""

from .bounds import (
    BoundsReport,
    best_bounds,
    bounds_report,
    conference_excess_bound,
    hermitian_eigen,
    is_normal,
    nu,
    nu_saturated,
    numerical_radius,
    quadratic_residue_family_excess,
    quantum_witness,
    rotated_observable,
    skew_conference_family_excess,
    spectral_norm,
    spectral_radius,
)
from .catalog import (
    CatalogEntry,
    builtin,
    detect_regular_equivalent,
    pairing_fixture,
    parse_catalogue_text,
    strategy_fixture,
)
from .constructions import (
    MquwmParams,
    circulant,
    fourier_square,
    gyni_tensor,
    is_conference,
    is_hadamard,
    is_skew_type,
    mquwm_check,
    paley_hadamard,
    sylvester,
    weighing_weight,
)
from .core import (
    CorrelationCore,
    GameMatrix,
    GameTensor,
    Relabeling,
    SymmetryError,
    apply_relabeling,
    check_symmetry,
    constant_row_sum,
    core_of,
    embed_core,
    excess,
    game_matrix_from_tensor,
    is_correlation_matrix,
    tensor_from_game_matrix,
    validate_symmetry,
)
from .lhv import (
    BudgetExceeded,
    LhvResult,
    OptimizerCapExceeded,
    Strategy,
    brute_force,
    enumerate_optimizers,
    evaluate,
    lhv_value,
    normalize,
    normalize_to_allplus,
    tensor_game,
)
from .tightness import (
    TABLE_I,
    TightnessReport,
    Vertex,
    affine_rank,
    bareiss_rank,
    collect_vertices,
    tightness_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
