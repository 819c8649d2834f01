"""Self-reconfiguring V-formation control and simulation toolkit."""

from .behaviors import (
    ACTIVATION_EPS,
    BehaviorBreakdown,
    Gains,
    ReconfigMode,
    SensingRanges,
    collision_behavior,
    combine_control,
    formation_behavior,
    goal_behavior,
    obstacle_behavior,
    reconfiguration_behavior,
)
from .formation import (
    FormationSpec,
    UavState,
    Wing,
    desired_offset,
    desired_pair_distance,
    desired_position,
    leader_index,
    same_wing,
    wing_of,
)
from .geometry import (
    EPS_ZERO,
    Circle,
    ConvexPolygon,
    Obstacle,
    Vec2,
    closest_boundary_point,
    norm,
    obstacle_distance,
    unit,
)
from .metrics import (
    MetricsSeries,
    RunSummary,
    TerminationReason,
    avg_consecutive_distance,
    avg_formation_error,
    order_metric,
    pairwise_stats,
    reconfig_activation_count,
    summarize,
)
from .scenario_io import (
    Scenario,
    ScenarioError,
    load_scenario,
    parse_scenario,
    read_trajectory,
    recompute_series,
    scenario_from_dict,
    scenario_to_dict,
    serialize_scenario,
    write_logs,
)
from .simulator import (
    SimConfig,
    SpawnError,
    TrajectoryLog,
    TrajectoryRow,
    WorldState,
    run,
    sense_obstacles,
    spawn,
    tick,
)

__version__ = "0.1.0"
