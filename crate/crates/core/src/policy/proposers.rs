//! Non-neural proposers: a noisy expert stand-in (so the optimization stack
//! is testable without a trained network), a trace replayer for externally
//! produced policies, and a zero-action baseline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GmmAction, PolicyError, ProposeContext, Proposer, ACTION_CLAMP};
use crate::planner::Trajectory;
use crate::{JointConfig, JointVector, Real};

/// Tracks an expert trajectory waypoint-by-waypoint with Gaussian action
/// noise.
///
/// At step t the mean action steers to the expert's next waypoint from the
/// rollout's *current* state (so noise does not accumulate into a drift),
/// and the noise tapers to zero over the final approach so every rollout
/// converges onto the expert's goal; collisions along the way remain noise
/// dependent, which is what test-time optimization prunes.
#[derive(Debug, Clone)]
pub struct NoisyExpertProposer {
    waypoints: Vec<JointConfig>,
    noise_std: Real,
    taper_steps: usize,
}

impl NoisyExpertProposer {
    pub fn new(expert: &Trajectory, noise_std: Real) -> Self {
        assert!(noise_std >= 0.0);
        Self { waypoints: expert.waypoints.clone(), noise_std, taper_steps: 3 }
    }

    pub fn noise_std(&self) -> Real {
        self.noise_std
    }
}

impl Proposer for NoisyExpertProposer {
    fn propose(&self, ctx: &ProposeContext<'_>) -> GmmAction {
        let last = self.waypoints.len() - 1;
        let target_idx = (ctx.step + 1).min(last);
        let target = &self.waypoints[target_idx];
        let mut mean = target.0 - ctx.current.0;
        let amax = mean.amax();
        if amax > ACTION_CLAMP {
            mean *= ACTION_CLAMP / amax;
        }
        // Steps remaining after the targeted waypoint; sigma fades over the
        // taper window and is zero at (and past) the final waypoint.
        let remaining = last.saturating_sub(target_idx);
        let envelope = (remaining as Real / self.taper_steps as Real).min(1.0);
        let sigma = self.noise_std * envelope;
        GmmAction::single_mode(mean, JointVector::repeat(sigma))
    }
}

/// Replays a file of per-step GMM action records, so externally trained
/// policies can be driven through the optimization stack without linking a
/// learning runtime. Steps past the end emit a zero-mean action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceProposer {
    pub steps: Vec<GmmAction>,
}

impl TraceProposer {
    pub fn new(steps: Vec<GmmAction>) -> Result<Self, PolicyError> {
        for (i, s) in steps.iter().enumerate() {
            s.validate().map_err(|e| PolicyError::TraceFormat(format!("step {i}: {e}")))?;
        }
        Ok(Self { steps })
    }

    pub fn from_json(text: &str) -> Result<Self, PolicyError> {
        let steps: Vec<GmmAction> =
            serde_json::from_str(text).map_err(|e| PolicyError::TraceFormat(e.to_string()))?;
        Self::new(steps)
    }

    pub fn from_path(path: &Path) -> Result<Self, PolicyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PolicyError::TraceFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.steps).expect("trace serializes")
    }

    /// Open-loop trace of an expert trajectory: one single-mode record per
    /// expert delta.
    pub fn from_expert(expert: &Trajectory, noise_std: Real) -> Self {
        let steps = expert
            .deltas()
            .into_iter()
            .map(|d| GmmAction::single_mode(d, JointVector::repeat(noise_std)))
            .collect();
        Self { steps }
    }
}

impl Proposer for TraceProposer {
    fn propose(&self, ctx: &ProposeContext<'_>) -> GmmAction {
        self.steps.get(ctx.step).cloned().unwrap_or_else(|| {
            GmmAction::single_mode(JointVector::zeros(), JointVector::repeat(1e-12))
        })
    }
}

/// Always proposes the zero action; the do-nothing baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroProposer;

impl Proposer for ZeroProposer {
    fn propose(&self, _ctx: &ProposeContext<'_>) -> GmmAction {
        GmmAction::single_mode(JointVector::zeros(), JointVector::repeat(1e-12))
    }
}
