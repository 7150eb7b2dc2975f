//! Cubic-spline smoothing: geometry from a natural cubic spline through
//! the path waypoints, resampled to at most 50 waypoints with bounded
//! per-step size, re-timed uniformly so finite-difference velocities and
//! accelerations respect the robot limits.

use nalgebra::SVector;

use super::{PlannerError, Trajectory};
use crate::collision::{motion_in_collision, CollisionWorld, RobotGeometry};
use crate::robot::NUM_JOINTS;
use crate::scalar::Scalar;
use crate::{AttachedObject, JointConfig, Path, Real};

/// Natural cubic spline through vector-valued knots (one spline per joint
/// over shared knot parameters).
#[derive(Debug, Clone)]
pub struct CubicSpline<S: Scalar> {
    ts: Vec<S>,
    ys: Vec<SVector<S, NUM_JOINTS>>,
    /// Second derivatives at the knots (natural boundary: zero at ends).
    ms: Vec<SVector<S, NUM_JOINTS>>,
}

impl<S: Scalar> CubicSpline<S> {
    /// Knot parameters must be strictly increasing; two knots give the
    /// linear segment.
    pub fn natural(ts: Vec<S>, ys: Vec<SVector<S, NUM_JOINTS>>) -> Self {
        assert_eq!(ts.len(), ys.len());
        assert!(ts.len() >= 2);
        assert!(ts.windows(2).all(|w| w[0] < w[1]), "knots must strictly increase");
        let n = ts.len();
        let mut ms = vec![SVector::<S, NUM_JOINTS>::zeros(); n];
        if n > 2 {
            // Thomas algorithm on the tridiagonal system for interior
            // second derivatives.
            let m = n - 2;
            let h: Vec<S> = ts.windows(2).map(|w| w[1] - w[0]).collect();
            let six_inv = S::from_config(1.0 / 6.0);
            let third = S::from_config(1.0 / 3.0);
            let mut diag = vec![S::zero(); m];
            let mut upper = vec![S::zero(); m];
            let mut rhs = vec![SVector::<S, NUM_JOINTS>::zeros(); m];
            for i in 0..m {
                diag[i] = (h[i] + h[i + 1]) * third;
                upper[i] = h[i + 1] * six_inv;
                rhs[i] = (ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i];
            }
            for i in 1..m {
                let lower = h[i] * six_inv;
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] = rhs[i] - rhs[i - 1] * w;
            }
            ms[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                ms[i + 1] = (rhs[i] - ms[i + 2] * upper[i]) / diag[i];
            }
        }
        Self { ts, ys, ms }
    }

    pub fn domain(&self) -> (S, S) {
        (self.ts[0], *self.ts.last().expect("non-empty"))
    }

    fn segment_of(&self, t: S) -> usize {
        match self.ts.binary_search_by(|x| x.partial_cmp(&t).expect("finite")) {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(i) => i.clamp(1, self.ts.len() - 1) - 1,
        }
    }

    pub fn evaluate(&self, t: S) -> SVector<S, NUM_JOINTS> {
        let i = self.segment_of(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        let six_inv = S::from_config(1.0 / 6.0);
        let h2 = h * h * six_inv;
        self.ys[i] * a
            + self.ys[i + 1] * b
            + (self.ms[i] * (a * a * a - a) + self.ms[i + 1] * (b * b * b - b)) * h2
    }
}

#[derive(Debug, Clone)]
pub struct SmoothParams {
    pub max_waypoints: usize,
    /// Largest per-step max-norm action after resampling.
    pub max_spacing: Real,
    /// Edge re-validation resolution.
    pub edge_resolution: Real,
    /// Dense samples per input segment when measuring spline arc length.
    pub samples_per_segment: usize,
}

impl Default for SmoothParams {
    fn default() -> Self {
        Self { max_waypoints: 50, max_spacing: 0.1, edge_resolution: 0.05, samples_per_segment: 24 }
    }
}

fn dedup_waypoints(waypoints: &[JointConfig]) -> Vec<JointConfig> {
    let mut out: Vec<JointConfig> = Vec::with_capacity(waypoints.len());
    for w in waypoints {
        if out.last().is_none_or(|l| l.max_norm_distance(w) > 1e-12) {
            out.push(*w);
        }
    }
    out
}

/// Resamples a dense polyline to `n` points at equal max-norm arc spacing,
/// forcing the first and last points bit-exactly.
fn resample_polyline(dense: &[JointConfig], n: usize) -> Vec<JointConfig> {
    let mut cumulative = Vec::with_capacity(dense.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in dense.windows(2) {
        acc += w[0].max_norm_distance(&w[1]);
        cumulative.push(acc);
    }
    let total = acc;
    let mut out = Vec::with_capacity(n);
    out.push(dense[0]);
    let mut seg = 0usize;
    for k in 1..n - 1 {
        let target = total * k as Real / (n - 1) as Real;
        while seg + 1 < cumulative.len() - 1 && cumulative[seg + 1] < target {
            seg += 1;
        }
        let span = cumulative[seg + 1] - cumulative[seg];
        let t = if span > 0.0 { (target - cumulative[seg]) / span } else { 0.0 };
        out.push(dense[seg].lerp(&dense[seg + 1], t));
    }
    out.push(*dense.last().expect("non-empty"));
    out
}

fn waypoint_count(arc: Real, params: &SmoothParams) -> Result<usize, PlannerError> {
    let needed = (arc / params.max_spacing).ceil() as usize + 1;
    if needed > params.max_waypoints {
        return Err(PlannerError::PathTooLong {
            arc,
            max_waypoints: params.max_waypoints,
            max_spacing: params.max_spacing,
        });
    }
    Ok(needed.max(2))
}

fn max_norm_arc(dense: &[JointConfig]) -> Real {
    dense.windows(2).map(|w| w[0].max_norm_distance(&w[1])).sum()
}

/// Uniform time step making finite-difference velocities and accelerations
/// respect the per-joint limits.
fn retime(waypoints: &[JointConfig], robot: &RobotGeometry<Real>) -> Vec<Real> {
    let mut dt: Real = 1e-3;
    for w in waypoints.windows(2) {
        let delta = w[1].0 - w[0].0;
        for j in 0..NUM_JOINTS {
            dt = dt.max(delta[j].abs() / robot.chain.velocity_limit[j]);
        }
    }
    for w in waypoints.windows(3) {
        for j in 0..NUM_JOINTS {
            let acc = ((w[2].0[j] - w[1].0[j]) - (w[1].0[j] - w[0].0[j])).abs();
            dt = dt.max((acc / robot.chain.acceleration_limit[j]).sqrt());
        }
    }
    (0..waypoints.len()).map(|i| i as Real * dt).collect()
}

fn validated(
    waypoints: &[JointConfig],
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    world: &CollisionWorld<Real>,
    resolution: Real,
) -> Result<bool, PlannerError> {
    for w in waypoints.windows(2) {
        if motion_in_collision(robot, &w[0], &w[1], attached, world, resolution)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smooths a collision-free path into a trajectory of at most
/// `max_waypoints` waypoints with per-step max-norm at most `max_spacing`,
/// endpoints preserved bit-exactly, finite-difference velocity and
/// acceleration within the robot limits, and every resampled edge
/// re-validated. Falls back to linear interpolation of the input path when
/// the spline excursion collides.
pub fn smooth_spline(
    path: &Path,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    world: &CollisionWorld<Real>,
    params: &SmoothParams,
) -> Result<Trajectory, PlannerError> {
    let knots = dedup_waypoints(&path.waypoints);
    if knots.len() < 2 {
        return Ok(Trajectory::new(vec![knots[0]], vec![0.0]));
    }

    // Chord-length parameterization by cumulative max-norm distance.
    let mut ts = Vec::with_capacity(knots.len());
    let mut acc = 0.0;
    ts.push(0.0);
    for w in knots.windows(2) {
        acc += w[0].max_norm_distance(&w[1]);
        ts.push(acc);
    }
    let spline = CubicSpline::natural(ts.clone(), knots.iter().map(|q| q.0).collect());

    // Dense geometry of the spline.
    let m = params.samples_per_segment * (knots.len() - 1);
    let mut dense: Vec<JointConfig> = (0..=m)
        .map(|k| crate::robot::JointConfig(spline.evaluate(acc * k as Real / m as Real)))
        .collect();
    dense[0] = knots[0];
    *dense.last_mut().expect("non-empty") = *knots.last().expect("non-empty");

    let spline_ok = dense.iter().all(|q| robot.chain.within_limits(q));
    let mut linear_fallback = false;

    let waypoints = if spline_ok {
        let n = waypoint_count(max_norm_arc(&dense), params)?;
        let resampled = resample_polyline(&dense, n);
        if validated(&resampled, robot, attached, world, params.edge_resolution)? {
            Some(resampled)
        } else {
            None
        }
    } else {
        None
    };

    let waypoints = match waypoints {
        Some(w) => w,
        None => {
            // Linear fallback: resample each original segment on its own
            // so the geometry never leaves the validated polyline.
            linear_fallback = true;
            let mut fallback = vec![knots[0]];
            for w in knots.windows(2) {
                let span = w[0].max_norm_distance(&w[1]);
                let steps = (span / params.max_spacing).ceil().max(1.0) as usize;
                for k in 1..=steps {
                    fallback.push(w[0].lerp(&w[1], k as Real / steps as Real));
                }
            }
            *fallback.last_mut().expect("non-empty") = *knots.last().expect("non-empty");
            if fallback.len() > params.max_waypoints {
                return Err(PlannerError::PathTooLong {
                    arc: max_norm_arc(&fallback),
                    max_waypoints: params.max_waypoints,
                    max_spacing: params.max_spacing,
                });
            }
            if !validated(&fallback, robot, attached, world, params.edge_resolution)? {
                return Err(PlannerError::CollidingAfterSmoothing);
            }
            fallback
        }
    };

    let times = retime(&waypoints, robot);
    let mut traj = Trajectory::new(waypoints, times);
    traj.linear_fallback = linear_fallback;
    Ok(traj)
}
