"""Monte Carlo lab for vertex counts of random polygons in convex containers."""

from .geometry import (
    AffineMap,
    DegenerateHull,
    HalfPlane,
    Polygon,
    PolygonMetrics,
    canonical_triangle,
    convex_hull,
    map_triangle_to_canonical,
    normalize_to_unit_area,
    orient,
    polygon_area,
    polygon_metrics,
    regular_polygon,
    unit_area_triangle,
    unit_square,
    vertex_count,
)
from .sampling import (
    PointSample,
    RandomStream,
    binomial_sample,
    poisson_sample,
    uniform_point,
    uniform_points,
)
from .floating_body import (
    EventParams,
    FloatingEvents,
    cap_area,
    floating_body_probes,
    floating_events,
    v_value,
    v_values,
    wet_part_area,
)
from .chain import (
    ChainStats,
    chain_vertex_count,
    exact_chain_mean,
    exact_chain_var,
    harmonic,
    harmonic2,
    poisson_chain_expansion,
    simulate_chain_batch,
)
from .corners import (
    CornerDecomposition,
    build_decomposition,
    decomposed_vertex_count,
    regularity_event_rate,
    log_moment_estimates,
    tail_probability_check,
)
from .experiments import (
    ExperimentConfig,
    ExperimentSummary,
    IdentityCheck,
    PredictedMoments,
    berry_esseen_curve,
    buchta_check,
    efron_check,
    ks_to_normal,
    predicted_moments,
    run_experiment,
    vervaat_check,
    vervaat_default_grid,
)

__version__ = "0.1.0"
