//! Test-time optimization: draw N rollouts, score each by predicted
//! robot-scene intersections under the static-world model, execute the
//! minimum.

use rayon::prelude::*;

use super::rollout::{rollout, RolloutParams, RolloutResult};
use super::{PolicyError, Proposer};
use crate::cloudsim::{CloudParams, SegmentedCloud};
use crate::collision::{cloud_collision_count_with_spheres, RobotGeometry};
use crate::planner::Trajectory;
use crate::seeding::derive_rng;
use crate::{AttachedObject, JointConfig, Point3, Real};

/// Predicted intersection count of a trajectory against an obstacle cloud:
/// for every waypoint after the start, the number of cloud points whose
/// minimum robot-sphere SDF falls below `eps` (the start state is
/// collision-free by construction of the segmented cloud).
pub fn score_trajectory(
    trajectory: &Trajectory,
    obstacle_points: &[Point3],
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    eps: Real,
) -> Result<usize, PolicyError> {
    assert!(eps > 0.0);
    let mut total = 0;
    for q in trajectory.waypoints.iter().skip(1) {
        let spheres = robot.spheres_at(q, attached)?;
        total += cloud_collision_count_with_spheres(&spheres, obstacle_points, eps);
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct TtoOutcome {
    pub best: RolloutResult,
    pub best_index: usize,
    pub best_score: usize,
    /// Every sample's score, for diagnostics and histograms.
    pub scores: Vec<usize>,
}

/// Draws `n_samples` independent rollouts (parallel, each on its own RNG
/// stream derived from `(seed, sample index)`) and selects the one with the
/// fewest predicted intersections; ties break toward the lowest index, so
/// parallel and serial runs select identically.
#[allow(clippy::too_many_arguments)]
pub fn tto_select(
    proposer: &dyn Proposer,
    q0: &JointConfig,
    goal: &JointConfig,
    obs0: &SegmentedCloud,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    cloud_params: &CloudParams,
    rollout_params: &RolloutParams,
    n_samples: usize,
    eps: Real,
    seed: u64,
) -> Result<TtoOutcome, PolicyError> {
    assert!(n_samples >= 1);
    let sampled: Result<Vec<(RolloutResult, usize)>, PolicyError> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(seed, i as u64);
            let result = rollout(
                proposer,
                q0,
                goal,
                obs0,
                robot,
                attached,
                cloud_params,
                rollout_params,
                &mut rng,
            )?;
            let score =
                score_trajectory(&result.trajectory, &obs0.obstacle_points, robot, attached, eps)?;
            Ok((result, score))
        })
        .collect();
    let sampled = sampled?;

    let scores: Vec<usize> = sampled.iter().map(|(_, s)| *s).collect();
    let best_index = scores
        .iter()
        .enumerate()
        .min_by_key(|(i, s)| (**s, *i))
        .expect("n_samples >= 1")
        .0;
    let best_score = scores[best_index];
    let best = sampled.into_iter().nth(best_index).expect("index in range").0;
    Ok(TtoOutcome { best, best_index, best_score, scores })
}
