//! Sampling-based expert motion planning with anytime refinement, shortcut
//! and cubic-spline smoothing under kinematic limits, and the
//! data-augmentation transforms (hindsight relabeling, reversal).

mod augment;
mod rrt;
mod shortcut;
mod spline;

pub use augment::{relabel_hindsight, reverse_trajectory};
pub use rrt::plan;
pub use shortcut::shortcut;
pub use spline::{smooth_spline, CubicSpline, SmoothParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::robot::RobotError;
use crate::{JointConfig, JointVector, Real};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("start configuration is in collision")]
    StartInCollision,
    #[error("planning budget {0} s outside the configured [{1}, {2}] s window")]
    BadBudget(f64, f64, f64),
    #[error("hindsight relabeling requires an approximate result, got {0:?}")]
    RelabelMisuse(PlanStatus),
    #[error("trajectory does not end at the reached configuration")]
    RelabelEndpointMismatch,
    #[error("path spans {arc:.3} rad (max-norm); {max_waypoints} waypoints at {max_spacing} rad cannot cover it")]
    PathTooLong { arc: Real, max_waypoints: usize, max_spacing: Real },
    #[error("smoothed trajectory collides even after the linear fallback")]
    CollidingAfterSmoothing,
    #[error(transparent)]
    Robot(#[from] RobotError),
}

/// Ordered waypoints with every consecutive pair connectable. A single
/// waypoint is the degenerate start-equals-goal case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<JointConfig>,
}

impl Path {
    pub fn new(waypoints: Vec<JointConfig>) -> Self {
        assert!(!waypoints.is_empty(), "a path has at least one waypoint");
        Self { waypoints }
    }

    /// Joint-space length in radians (L2 per segment).
    pub fn cost(&self) -> Real {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Total max-norm arc length.
    pub fn max_norm_arc(&self) -> Real {
        self.waypoints.windows(2).map(|w| w[0].max_norm_distance(&w[1])).sum()
    }
}

/// Waypoint sequence with per-waypoint times; `deltas()[i]` is the action
/// taking waypoint i to i+1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<JointConfig>,
    /// Seconds, starting at 0, strictly increasing for multi-waypoint
    /// trajectories.
    pub times: Vec<Real>,
    /// Set when spline smoothing fell back to linear interpolation.
    pub linear_fallback: bool,
}

impl Trajectory {
    pub fn new(waypoints: Vec<JointConfig>, times: Vec<Real>) -> Self {
        assert_eq!(waypoints.len(), times.len());
        assert!(!waypoints.is_empty());
        Self { waypoints, times, linear_fallback: false }
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> &JointConfig {
        self.waypoints.first().expect("non-empty")
    }

    pub fn end(&self) -> &JointConfig {
        self.waypoints.last().expect("non-empty")
    }

    pub fn deltas(&self) -> Vec<JointVector> {
        self.waypoints.windows(2).map(|w| w[1].0 - w[0].0).collect()
    }

    pub fn duration(&self) -> Real {
        *self.times.last().expect("non-empty")
    }

    /// Largest per-step max-norm action.
    pub fn max_step(&self) -> Real {
        self.deltas().iter().map(|d| d.amax()).fold(0.0, Real::max)
    }

    /// Joins a continuation trajectory whose first waypoint equals this
    /// trajectory's last; the duplicate junction waypoint is dropped.
    pub fn concatenate(&self, other: &Trajectory) -> Trajectory {
        assert_eq!(
            self.end().0,
            other.start().0,
            "continuation must start where this trajectory ends"
        );
        let mut waypoints = self.waypoints.clone();
        waypoints.extend(other.waypoints[1..].iter().copied());
        let t0 = self.duration();
        let mut times = self.times.clone();
        times.extend(other.times[1..].iter().map(|t| t0 + t));
        Trajectory { waypoints, times, linear_fallback: self.linear_fallback || other.linear_fallback }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanStatus {
    Exact,
    Approximate,
    Failure,
}

/// Planner output. `planning_time` is deterministic virtual time: the
/// number of collision checks spent, scaled by a nominal per-check cost,
/// so identical seeds replan identically regardless of wall clock.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanResult {
    pub status: PlanStatus,
    pub path: Option<Path>,
    /// Configuration actually attained (the goal for exact plans).
    pub reached: Option<JointConfig>,
    pub planning_time: Real,
    /// Joint-space path length in radians.
    pub cost: Real,
    /// (virtual time, best cost) at each improvement; non-increasing cost.
    pub cost_history: Vec<(Real, Real)>,
}

/// Planner knobs. Budgets are virtual seconds (see [`PlanResult`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerParams {
    pub budget_seconds: Real,
    pub min_budget_seconds: Real,
    pub max_budget_seconds: Real,
    /// Joint-space edge validation resolution (max-norm radians).
    pub edge_resolution: Real,
    /// RRT extension step (L2 radians).
    pub extend_step: Real,
    /// Per-joint tolerance for the Exact status.
    pub goal_tolerance: Real,
    /// Refinement stops after this many non-improving informed samples.
    pub stall_iters: usize,
    /// Refinement stops once cost is within this fraction of the
    /// straight-line lower bound.
    pub optimality_margin: Real,
    /// Shortcut iterations interleaved into refinement.
    pub shortcut_iters: usize,
    /// Virtual seconds charged per collision check.
    pub virtual_check_cost: Real,
    /// Fraction of single-tree samples aimed directly at the goal.
    pub goal_bias: Real,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            budget_seconds: 2.0,
            min_budget_seconds: 0.05,
            max_budget_seconds: 80.0,
            edge_resolution: 0.05,
            extend_step: 0.7,
            goal_tolerance: 1e-6,
            stall_iters: 300,
            optimality_margin: 0.02,
            shortcut_iters: 30,
            virtual_check_cost: 2e-5,
            goal_bias: 0.1,
        }
    }
}

/// Deterministic budget meter: one unit per collision check.
#[derive(Debug, Default)]
pub(crate) struct Meter {
    checks: u64,
}

impl Meter {
    pub fn charge(&mut self) {
        self.checks += 1;
    }

    pub fn elapsed(&self, params: &PlannerParams) -> Real {
        self.checks as Real * params.virtual_check_cost
    }
}
