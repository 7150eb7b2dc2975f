//! Open-loop rollout under the linear forward model, and ground-truth
//! re-validation of committed trajectories.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sample_gmm, HistoryEntry, PolicyError, ProposeContext, Proposer, HISTORY_LEN};
use crate::cloudsim::{update_observation, CloudParams, SegmentedCloud};
use crate::collision::{count_trajectory_collisions, CollisionWorld, RobotGeometry};
use crate::planner::Trajectory;
use crate::robot::ee_pose;
use crate::{AttachedObject, JointConfig, Real};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RolloutParams {
    /// Maximum number of actions.
    pub horizon: usize,
    /// Rollout stops once the max-norm joint error to the goal is within
    /// this tolerance.
    pub goal_tolerance: Real,
    /// Nominal control period used to stamp waypoint times.
    pub step_period: Real,
}

impl Default for RolloutParams {
    fn default() -> Self {
        Self { horizon: 60, goal_tolerance: 0.01, step_period: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct RolloutResult {
    pub trajectory: Trajectory,
    pub reached_goal: bool,
    pub steps: usize,
}

/// Rolls the proposer forward against its own predicted states: sample an
/// action, step `q += delta` (saturated at the joint limits), refresh the
/// current-robot segment of the observation, stop on goal or horizon. The
/// obstacle and goal segments are never touched.
pub fn rollout(
    proposer: &dyn Proposer,
    q0: &JointConfig,
    goal: &JointConfig,
    obs0: &SegmentedCloud,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    cloud_params: &CloudParams,
    params: &RolloutParams,
    rng: &mut ChaCha8Rng,
) -> Result<RolloutResult, PolicyError> {
    assert!(params.horizon >= 1);
    let mut q = *q0;
    let mut obs = obs0.clone();
    let mut waypoints = vec![q];
    let mut history: Vec<HistoryEntry> = Vec::with_capacity(HISTORY_LEN);
    let mut reached_goal = q.max_norm_distance(goal) <= params.goal_tolerance;

    for step in 0..params.horizon {
        if reached_goal {
            break;
        }
        let action = proposer.propose(&ProposeContext {
            observation: &obs,
            current: &q,
            goal,
            step,
            history: &history,
        });
        let delta = sample_gmm(&action, rng);
        q = robot.chain.clamp(&crate::robot::JointConfig(q.0 + delta));
        waypoints.push(q);
        if history.len() == HISTORY_LEN {
            history.remove(0);
        }
        history.push(HistoryEntry { config: q, action: delta });
        obs = update_observation(&obs, robot, &q, attached, cloud_params, rng)?;
        reached_goal = q.max_norm_distance(goal) <= params.goal_tolerance;
    }

    let steps = waypoints.len() - 1;
    let times = (0..waypoints.len()).map(|i| i as Real * params.step_period).collect();
    Ok(RolloutResult { trajectory: Trajectory::new(waypoints, times), reached_goal, steps })
}

/// Ground-truth evaluation of a committed rollout against the exact
/// collision world (not the point cloud): dense re-validation plus goal
/// metrics. This is the reality check the cloud-based score approximates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub ground_truth_collisions: usize,
    pub collided: bool,
    pub ee_pos_error: Real,
    pub ee_rot_error_deg: Real,
    pub joint_error_max: Real,
    pub reached_goal: bool,
}

pub fn execute_open_loop(
    result: &RolloutResult,
    goal: &JointConfig,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    world: &CollisionWorld<Real>,
    resolution: Real,
    goal_tolerance: Real,
) -> Result<ExecutionRecord, PolicyError> {
    let collisions = count_trajectory_collisions(
        robot,
        &result.trajectory.waypoints,
        attached,
        world,
        resolution,
    )?;
    let final_q = result.trajectory.end();
    let reached = ee_pose(&robot.chain, final_q)?;
    let target = ee_pose(&robot.chain, goal)?;
    let (pos, rot) = reached.errors_to(&target);
    Ok(ExecutionRecord {
        ground_truth_collisions: collisions,
        collided: collisions > 0,
        ee_pos_error: pos,
        ee_rot_error_deg: rot.to_degrees(),
        joint_error_max: final_q.max_norm_distance(goal),
        reached_goal: final_q.max_norm_distance(goal) <= goal_tolerance,
    })
}
