from .costs import (ACTION_DIM, STATE_DIM, CostConfig, TargetCost,
                    cost_control, cost_state, state_error)
from .dynamics import LearnedDynamics
from .experiments import (RepositionResult, run_repositioning,
                          settling_metrics)
from .ilqg import TrajectoryPlan, fd_jacobians, ilqg, simulate
from .navigator import (ClosedLoopExecutor, NavigatorConfig, RunLog,
                        SegmentRecord, navigate_maze)
from .pd import PdGains, pd_action
from .transitions import (ClusterPair, learn_transition_clusters,
                          pairs_from_geometry, transition_action)

__all__ = [
    "ACTION_DIM", "STATE_DIM", "CostConfig", "TargetCost", "cost_control",
    "cost_state", "state_error", "LearnedDynamics", "RepositionResult",
    "run_repositioning", "settling_metrics", "TrajectoryPlan",
    "fd_jacobians", "ilqg", "simulate", "ClosedLoopExecutor",
    "NavigatorConfig", "RunLog", "SegmentRecord", "navigate_maze",
    "PdGains", "pd_action", "ClusterPair", "learn_transition_clusters",
    "pairs_from_geometry", "transition_action",
]
