//! Data-augmentation transforms: hindsight relabeling of approximate plans
//! and trajectory reversal.

use super::{PlanResult, PlanStatus, PlannerError, Trajectory};
use crate::scenegen::PlanningProblem;

/// Converts an approximate plan into a valid example by declaring the
/// configuration actually reached to be the goal. The smoothed trajectory
/// must already end at that configuration (smoothing preserves endpoints
/// exactly).
pub fn relabel_hindsight(
    result: &PlanResult,
    problem: &PlanningProblem,
    trajectory: &Trajectory,
) -> Result<(PlanningProblem, Trajectory), PlannerError> {
    if result.status != PlanStatus::Approximate {
        return Err(PlannerError::RelabelMisuse(result.status));
    }
    let reached = result.reached.expect("approximate results carry the reached configuration");
    if trajectory.end().0 != reached.0 {
        return Err(PlannerError::RelabelEndpointMismatch);
    }
    let mut relabeled = problem.clone();
    relabeled.goal = reached;
    Ok((relabeled, trajectory.clone()))
}

/// Reverses a trajectory: waypoints in reverse order, deltas negated and
/// reversed, times mirrored so interval lengths are preserved.
pub fn reverse_trajectory(traj: &Trajectory) -> Trajectory {
    let total = traj.duration();
    let waypoints: Vec<_> = traj.waypoints.iter().rev().copied().collect();
    let times: Vec<_> = traj.times.iter().rev().map(|t| total - t).collect();
    let mut out = Trajectory::new(waypoints, times);
    out.linear_fallback = traj.linear_fallback;
    out
}
