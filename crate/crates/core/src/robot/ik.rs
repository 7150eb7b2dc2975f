//! Damped least-squares inverse kinematics with random restarts.

use nalgebra::{Matrix6, SMatrix, SVector, Vector3, Vector6};
use rand::Rng;

use super::{ee_pose, forward_kinematics, EePose, JointConfig, KinematicChain, NUM_JOINTS};
use crate::scalar::Scalar;

/// Solver knobs. The damping keeps steps bounded near singularities.
#[derive(Debug, Clone, Copy)]
pub struct IkParams<S: Scalar> {
    pub max_iters: usize,
    pub tol_pos: S,
    pub tol_rot: S,
    pub damping: S,
    pub max_restarts: usize,
    /// Per-iteration step clamp (max-norm, radians).
    pub max_step: S,
}

impl<S: Scalar> Default for IkParams<S> {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol_pos: S::from_config(1e-4),
            tol_rot: S::from_config(1e-3),
            damping: S::from_config(0.05),
            max_restarts: 20,
            max_step: S::from_config(0.3),
        }
    }
}

/// Outcome of an IK query; failure is a value, not a panic.
#[derive(Debug, Clone)]
pub enum IkResult<S: Scalar> {
    Solved(JointConfig<S>),
    Failed { residual_pos: S, residual_rot: S, best: JointConfig<S> },
}

impl<S: Scalar> IkResult<S> {
    pub fn solved(&self) -> Option<&JointConfig<S>> {
        match self {
            IkResult::Solved(q) => Some(q),
            IkResult::Failed { .. } => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.solved().is_some()
    }
}

/// Geometric Jacobian of the end-effector at `q` (rows: linear, angular).
fn jacobian<S: Scalar>(
    chain: &KinematicChain<S>,
    q: &JointConfig<S>,
) -> (SMatrix<S, 6, NUM_JOINTS>, EePose<S>) {
    let frames = forward_kinematics(chain, q).expect("caller keeps q within limits");
    let ee = frames[NUM_JOINTS - 1] * chain.ee_offset;
    let p_ee = ee.translation.vector;

    let mut jac = SMatrix::<S, 6, NUM_JOINTS>::zeros();
    for j in 0..NUM_JOINTS {
        // Rotating about the joint axis leaves the axis direction and the
        // frame origin fixed, so the post-rotation frame works here.
        let axis: Vector3<S> = frames[j].rotation * chain.links[j].axis.into_inner();
        let origin = frames[j].translation.vector;
        let lin = axis.cross(&(p_ee - origin));
        for r in 0..3 {
            jac[(r, j)] = lin[r];
            jac[(r + 3, j)] = axis[r];
        }
    }
    (jac, EePose::from_isometry(&ee))
}

fn pose_error<S: Scalar>(current: &EePose<S>, target: &EePose<S>) -> Vector6<S> {
    let pos = target.position - current.position;
    let rot = (target.orientation * current.orientation.inverse()).scaled_axis();
    Vector6::new(pos.x, pos.y, pos.z, rot.x, rot.y, rot.z)
}

/// Solves for joint angles reaching `target`, starting from `seed` and
/// retrying from random in-limit configurations on failure.
///
/// On success the returned config is within limits and its pose is within
/// `(tol_pos, tol_rot)` of the target; otherwise the closest attempt and
/// its residuals are reported.
pub fn inverse_kinematics<S: Scalar, R: Rng + ?Sized>(
    chain: &KinematicChain<S>,
    target: &EePose<S>,
    seed: &JointConfig<S>,
    params: &IkParams<S>,
    rng: &mut R,
) -> IkResult<S> {
    assert!(params.tol_pos > S::zero() && params.tol_rot > S::zero());
    let mut best: Option<(S, S, JointConfig<S>)> = None;

    for restart in 0..=params.max_restarts {
        let start = if restart == 0 { chain.clamp(seed) } else { chain.sample_uniform(rng) };
        match descend(chain, target, start, params) {
            Ok(q) => return IkResult::Solved(q),
            Err((pos, rot, q)) => {
                let better = best.as_ref().map_or(true, |(bp, _, _)| pos < *bp);
                if better {
                    best = Some((pos, rot, q));
                }
            }
        }
    }
    let (residual_pos, residual_rot, best) = best.expect("at least one attempt ran");
    IkResult::Failed { residual_pos, residual_rot, best }
}

fn descend<S: Scalar>(
    chain: &KinematicChain<S>,
    target: &EePose<S>,
    start: JointConfig<S>,
    params: &IkParams<S>,
) -> Result<JointConfig<S>, (S, S, JointConfig<S>)> {
    let mut q = start;
    let lambda_sq = params.damping * params.damping;
    let mut residual = (S::max_value().unwrap(), S::max_value().unwrap());

    for _ in 0..params.max_iters {
        let (jac, current) = jacobian(chain, &q);
        let (pos_err, rot_err) = current.errors_to(target);
        residual = (pos_err, rot_err);
        if pos_err <= params.tol_pos && rot_err <= params.tol_rot {
            return Ok(q);
        }

        let e = pose_error(&current, target);
        let jjt = jac * jac.transpose() + Matrix6::identity() * lambda_sq;
        let Some(chol) = jjt.cholesky() else {
            break;
        };
        let y = chol.solve(&e);
        let mut step: SVector<S, NUM_JOINTS> = jac.transpose() * y;

        let amax = step.amax();
        if amax > params.max_step {
            step *= params.max_step / amax;
        }
        q = chain.clamp(&JointConfig(q.0 + step));
    }

    // Final residual check in case the last step converged.
    let current = ee_pose(chain, &q).expect("clamped q is within limits");
    let (pos_err, rot_err) = current.errors_to(target);
    if pos_err <= params.tol_pos && rot_err <= params.tol_rot {
        return Ok(q);
    }
    Err((pos_err.min(residual.0), rot_err, q))
}
