"""Full total independent sets, level recurrences and fractional total colouring."""

__version__ = "0.1.0"

from .graphs import (
    Graph,
    Matching,
    OrientedTwoFactor,
    complement_two_factor,
    generate,
    girth,
    mates,
    neighbourhood,
    parse_graph,
    perfect_matchings,
    total_distance,
    two_factorize_even,
    write_graph,
)
from .recurrence import (
    OdeSolution,
    RecurrenceTable,
    calibrate_xi,
    integrate_even_ode,
    limit_profile,
    pq_table,
    verify_limit_convergence,
)
from .decompose import (
    BoundarySet,
    ConstraintGraph,
    SparseParams,
    decompose,
    greedy_boundary,
    path_partition,
    strong_colour,
    ternary_sequence,
    verify_sparse,
)
from .sampler import (
    ConflictRecord,
    LevelAssignment,
    SamplerParams,
    TotalSet,
    assign_levels,
    classify_type,
    detect_conflicts,
    phase1,
    resolve_conflicts,
    sample_full_tis,
)
from .mean_field import junction_conflict_frequencies, mean_field_process
from .assemble import (
    LPSolution,
    PMCover,
    WeightEstimate,
    assemble_final,
    average_over_decomposition,
    bridge_glue,
    estimate_weights,
    exact_chi_f,
    fractional_total_chromatic_number,
    uniform_pm_cover,
)

