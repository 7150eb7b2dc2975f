//! Deployment stack around a trajectory proposer: GMM action sampling,
//! linear-forward-model rollouts, SDF-scored test-time optimization, and
//! open-loop execution with ground-truth re-validation.

mod proposers;
mod rollout;
mod tto;

pub use proposers::{NoisyExpertProposer, TraceProposer, ZeroProposer};
pub use rollout::{execute_open_loop, rollout, ExecutionRecord, RolloutParams, RolloutResult};
pub use tto::{score_trajectory, tto_select, TtoOutcome};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloudsim::SegmentedCloud;
use crate::{JointConfig, JointVector, Real};

/// Modes in the action mixture.
pub const GMM_MODES: usize = 5;
/// Largest max-norm action, matching the smoothing bound of the training
/// distribution.
pub const ACTION_CLAMP: Real = 0.1;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("invalid GMM action: {0}")]
    BadGmm(String),
    #[error(transparent)]
    Robot(#[from] crate::robot::RobotError),
    #[error("trace file: {0}")]
    TraceFormat(String),
}

/// A 5-mode Gaussian mixture over 7-dim delta joint angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmAction {
    pub weights: [Real; GMM_MODES],
    pub means: [JointVector; GMM_MODES],
    pub stds: [JointVector; GMM_MODES],
}

impl GmmAction {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let sum: Real = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(PolicyError::BadGmm(format!("weights sum to {sum}")));
        }
        if self.weights.iter().any(|w| *w < 0.0) {
            return Err(PolicyError::BadGmm("negative weight".into()));
        }
        for std in &self.stds {
            if std.iter().any(|s| *s <= 0.0) {
                return Err(PolicyError::BadGmm("non-positive std".into()));
            }
        }
        Ok(())
    }

    /// Single-mode mixture (remaining modes carry zero weight and tiny,
    /// strictly positive stds).
    pub fn single_mode(mean: JointVector, std: JointVector) -> Self {
        let floor = 1e-12;
        let mut weights = [0.0; GMM_MODES];
        weights[0] = 1.0;
        let mut means = [JointVector::zeros(); GMM_MODES];
        means[0] = mean;
        let mut stds = [JointVector::repeat(floor); GMM_MODES];
        stds[0] = std.map(|s| s.max(floor));
        Self { weights, means, stds }
    }
}

/// Everything a proposer sees at one step. The history window holds the
/// most recent (configuration, action) pairs, newest last, at most
/// [`HISTORY_LEN`] entries.
pub const HISTORY_LEN: usize = 2;

#[derive(Debug, Clone, Copy)]
pub struct HistoryEntry {
    pub config: JointConfig,
    pub action: JointVector,
}

pub struct ProposeContext<'a> {
    pub observation: &'a SegmentedCloud,
    pub current: &'a JointConfig,
    pub goal: &'a JointConfig,
    pub step: usize,
    pub history: &'a [HistoryEntry],
}

/// A trajectory proposer: deterministic given the context (randomness
/// enters only through GMM sampling downstream).
pub trait Proposer: Sync {
    fn propose(&self, ctx: &ProposeContext<'_>) -> GmmAction;
}

/// Draws a delta-joint action: mode by categorical weight, then a diagonal
/// Gaussian, clamped so its max-norm stays within the action bound
/// (direction-preserving rescale).
pub fn sample_gmm(action: &GmmAction, rng: &mut ChaCha8Rng) -> JointVector {
    debug_assert!(action.validate().is_ok());
    let x: Real = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    let mut mode = GMM_MODES - 1;
    for (i, w) in action.weights.iter().enumerate() {
        acc += w;
        if x < acc {
            mode = i;
            break;
        }
    }
    let mut delta = JointVector::zeros();
    for j in 0..delta.len() {
        let z: Real = rng.sample(rand_distr::StandardNormal);
        delta[j] = action.means[mode][j] + action.stds[mode][j] * z;
    }
    let amax = delta.amax();
    if amax > ACTION_CLAMP {
        delta *= ACTION_CLAMP / amax;
    }
    delta
}
