//! Robot description file: kinematic parameters, limits, collision spheres,
//! and self-collision exemptions, loaded from versioned TOML.
//!
//! The kinematics of the shipped 7-DOF arm follow the published Panda
//! parameters; the sphere placements are this project's own decomposition
//! (the count and radius band are fixed, the placements are a choice).

use std::path::Path;

use nalgebra::{Unit, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{JointVector, KinematicChain, Link, SelfCollisionPairs, SphereModel, SphereSpec};
use crate::geom::iso_from_rpy;
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

/// Bundled description of the default 7-DOF arm.
pub const BUILTIN_PANDA: &str = include_str!("panda.toml");

#[derive(Debug, Error)]
pub enum DescriptionError {
    #[error("failed to read robot description: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse robot description: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid robot description: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameEntry {
    pub xyz: [f64; 3],
    pub rpy: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkEntry {
    pub xyz: [f64; 3],
    pub rpy: [f64; 3],
    pub axis: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitsEntry {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereEntry {
    pub link: usize,
    pub offset: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfCollisionEntry {
    pub excluded_link_pairs: Vec<[usize; 2]>,
}

/// On-disk schema of a robot description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotDescription {
    pub schema_version: u32,
    pub name: String,
    pub base: FrameEntry,
    pub end_effector: FrameEntry,
    pub links: Vec<LinkEntry>,
    pub limits: LimitsEntry,
    pub spheres: Vec<SphereEntry>,
    pub self_collision: SelfCollisionEntry,
}

impl RobotDescription {
    pub fn from_toml_str(text: &str) -> Result<Self, DescriptionError> {
        let desc: RobotDescription = toml::from_str(text)?;
        desc.validate()?;
        Ok(desc)
    }

    pub fn from_path(path: &Path) -> Result<Self, DescriptionError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// The description bundled with the toolkit.
    pub fn builtin_panda() -> Self {
        Self::from_toml_str(BUILTIN_PANDA).expect("bundled description is valid")
    }

    fn validate(&self) -> Result<(), DescriptionError> {
        let fail = |msg: String| Err(DescriptionError::Invalid(msg));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let n = super::NUM_JOINTS;
        if self.links.len() != n {
            return fail(format!("expected {n} links, found {}", self.links.len()));
        }
        for field in [&self.limits.lower, &self.limits.upper, &self.limits.velocity, &self.limits.acceleration]
        {
            if field.len() != n {
                return fail(format!("limit arrays must have {n} entries"));
            }
        }
        for i in 0..n {
            if self.limits.lower[i] >= self.limits.upper[i] {
                return fail(format!("joint {i}: lower limit must be below upper limit"));
            }
            if self.limits.velocity[i] <= 0.0 || self.limits.acceleration[i] <= 0.0 {
                return fail(format!("joint {i}: velocity/acceleration limits must be positive"));
            }
        }
        for (k, s) in self.spheres.iter().enumerate() {
            if s.link >= n {
                return fail(format!("sphere {k} references link {}", s.link));
            }
            if !(0.02..=0.10).contains(&s.radius) {
                return fail(format!("sphere {k} radius {} outside [0.02, 0.10] m", s.radius));
            }
        }
        for pair in &self.self_collision.excluded_link_pairs {
            if pair[0] >= n || pair[1] >= n {
                return fail(format!("excluded pair {pair:?} references a missing link"));
            }
        }
        Ok(())
    }

    pub fn chain<S: Scalar>(&self) -> KinematicChain<S> {
        let conv3 = |a: &[f64; 3]| [S::from_config(a[0]), S::from_config(a[1]), S::from_config(a[2])];
        let links = self
            .links
            .iter()
            .map(|l| Link {
                origin: iso_from_rpy(conv3(&l.xyz), conv3(&l.rpy)),
                axis: Unit::new_normalize(Vector3::new(
                    S::from_config(l.axis[0]),
                    S::from_config(l.axis[1]),
                    S::from_config(l.axis[2]),
                )),
            })
            .collect();
        let vec7 = |v: &[f64]| JointVector::<S>::from_iterator(v.iter().map(|&x| S::from_config(x)));
        KinematicChain::new(
            iso_from_rpy(conv3(&self.base.xyz), conv3(&self.base.rpy)),
            links,
            vec7(&self.limits.lower),
            vec7(&self.limits.upper),
            vec7(&self.limits.velocity),
            vec7(&self.limits.acceleration),
            iso_from_rpy(conv3(&self.end_effector.xyz), conv3(&self.end_effector.rpy)),
        )
    }

    pub fn sphere_model<S: Scalar>(&self) -> SphereModel<S> {
        let spheres = self
            .spheres
            .iter()
            .map(|s| SphereSpec {
                link: s.link,
                offset: Vector3::new(
                    S::from_config(s.offset[0]),
                    S::from_config(s.offset[1]),
                    S::from_config(s.offset[2]),
                ),
                radius: S::from_config(s.radius),
            })
            .collect();
        SphereModel::new(spheres).expect("validated description")
    }

    pub fn self_collision_pairs(&self) -> SelfCollisionPairs {
        SelfCollisionPairs {
            excluded_link_pairs: self
                .self_collision
                .excluded_link_pairs
                .iter()
                .map(|p| (p[0], p[1]))
                .collect(),
        }
    }
}
