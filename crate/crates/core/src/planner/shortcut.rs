//! Random shortcutting: replace path sections with straight segments when
//! they validate collision-free. Cost never increases and endpoints are
//! untouched.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Meter, Path, PlannerError, PlannerParams};
use crate::collision::{config_in_collision, CollisionWorld, RobotGeometry};
use crate::{AttachedObject, JointConfig, Real};

pub(crate) fn shortcut_with_meter(
    waypoints: &[JointConfig],
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    world: &CollisionWorld<Real>,
    iters: usize,
    resolution: Real,
    rng: &mut ChaCha8Rng,
    meter: &mut Meter,
) -> Result<Vec<JointConfig>, PlannerError> {
    let mut path: Vec<JointConfig> = waypoints.to_vec();
    for _ in 0..iters {
        if path.len() < 3 {
            break;
        }
        let i = rng.random_range(0..path.len() - 2);
        let j = rng.random_range(i + 2..path.len());
        let direct = path[i].distance(&path[j]);
        let through: Real = path[i..=j].windows(2).map(|w| w[0].distance(&w[1])).sum();
        if direct >= through - 1e-12 {
            continue;
        }
        let span = path[i].max_norm_distance(&path[j]);
        let steps = (span / resolution).ceil().max(1.0) as usize;
        let mut free = true;
        for k in 0..=steps {
            meter.charge();
            let q = path[i].lerp(&path[j], k as Real / steps as Real);
            if config_in_collision(robot, &q, attached, world)? {
                free = false;
                break;
            }
        }
        if free {
            path.drain(i + 1..j);
        }
    }
    Ok(path)
}

/// Shortcuts `path` for `iters` random attempts; endpoints are preserved
/// and the joint-space cost is non-increasing.
pub fn shortcut(
    path: &Path,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    world: &CollisionWorld<Real>,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Path, PlannerError> {
    let params = PlannerParams::default();
    let mut meter = Meter::default();
    let waypoints = shortcut_with_meter(
        &path.waypoints,
        robot,
        attached,
        world,
        iters,
        params.edge_resolution,
        rng,
        &mut meter,
    )?;
    Ok(Path::new(waypoints))
}
