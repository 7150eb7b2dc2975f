//! Bidirectional tree search (connect heuristic) with informed anytime
//! refinement: after the first solution, samples are drawn from the
//! joint-space ellipsoid bounded by the current best cost and spliced into
//! both trees; interleaved shortcutting tightens the incumbent.

use nalgebra::SMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::shortcut::shortcut_with_meter;
use super::{Meter, Path, PlanResult, PlanStatus, PlannerError, PlannerParams};
use crate::collision::{config_in_collision, CollisionWorld, RobotGeometry};
use crate::robot::NUM_JOINTS;
use crate::scenegen::PlanningProblem;
use crate::{AttachedObject, JointConfig, JointVector, Real};

struct Node {
    q: JointConfig,
    parent: Option<usize>,
}

struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn new(root: JointConfig) -> Self {
        Self { nodes: vec![Node { q: root, parent: None }] }
    }

    fn nearest(&self, q: &JointConfig) -> usize {
        let mut best = 0;
        let mut best_d = Real::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = n.q.distance(q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn push(&mut self, q: JointConfig, parent: usize) -> usize {
        self.nodes.push(Node { q, parent: Some(parent) });
        self.nodes.len() - 1
    }

    fn path_to_root(&self, mut idx: usize) -> Vec<JointConfig> {
        let mut out = vec![self.nodes[idx].q];
        while let Some(p) = self.nodes[idx].parent {
            idx = p;
            out.push(self.nodes[idx].q);
        }
        out
    }
}

enum Extend {
    Trapped,
    Advanced(usize),
    Reached(usize),
}

struct Search<'a> {
    robot: &'a RobotGeometry<Real>,
    world: &'a CollisionWorld<Real>,
    attached: Option<&'a AttachedObject>,
    params: &'a PlannerParams,
    meter: Meter,
}

impl<'a> Search<'a> {
    fn config_free(&mut self, q: &JointConfig) -> Result<bool, PlannerError> {
        self.meter.charge();
        Ok(!config_in_collision(self.robot, q, self.attached, self.world)?)
    }

    /// Straight-segment validation at the edge resolution, both endpoints
    /// included.
    fn edge_free(&mut self, a: &JointConfig, b: &JointConfig) -> Result<bool, PlannerError> {
        let span = a.max_norm_distance(b);
        let steps = (span / self.params.edge_resolution).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let q = a.lerp(b, k as Real / steps as Real);
            if !self.config_free(&q)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn extend(&mut self, tree: &mut Tree, target: &JointConfig) -> Result<Extend, PlannerError> {
        let near_idx = tree.nearest(target);
        let near = tree.nodes[near_idx].q;
        let dist = near.distance(target);
        if dist < 1e-12 {
            return Ok(Extend::Reached(near_idx));
        }
        let reached = dist <= self.params.extend_step;
        // Land exactly on the target when within one step, preserving
        // bit-exact roots and junctions.
        let q_new = if reached { *target } else { near.lerp(target, self.params.extend_step / dist) };
        if !self.edge_free(&near, &q_new)? {
            return Ok(Extend::Trapped);
        }
        let idx = tree.push(q_new, near_idx);
        Ok(if reached { Extend::Reached(idx) } else { Extend::Advanced(idx) })
    }

    fn connect(&mut self, tree: &mut Tree, target: &JointConfig) -> Result<Option<usize>, PlannerError> {
        loop {
            match self.extend(tree, target)? {
                Extend::Trapped => return Ok(None),
                Extend::Reached(idx) => return Ok(Some(idx)),
                Extend::Advanced(_) => {}
            }
        }
    }
}

/// Uniform sample from the unit n-ball.
fn sample_unit_ball(rng: &mut ChaCha8Rng) -> JointVector {
    let mut v = JointVector::zeros();
    for i in 0..NUM_JOINTS {
        v[i] = rng.sample(rand_distr::StandardNormal);
    }
    let norm = v.norm().max(1e-12);
    let radius: Real = rng.random_range(0.0..1.0f64).powf(1.0 / NUM_JOINTS as Real);
    v * (radius / norm)
}

/// Informed sampler: uniform over the prolate hyperspheroid with foci
/// start/goal, transverse diameter `c_best`.
struct InformedSampler {
    center: JointVector,
    rotation: SMatrix<Real, NUM_JOINTS, NUM_JOINTS>,
    c_min: Real,
}

impl InformedSampler {
    fn new(start: &JointConfig, goal: &JointConfig) -> Self {
        let d = goal.0 - start.0;
        let c_min = d.norm();
        let dir = d / c_min;
        // Householder reflection mapping e1 onto the transverse axis.
        let mut e1 = JointVector::zeros();
        e1[0] = 1.0;
        let v = e1 - dir;
        let rotation = if v.norm_squared() > 1e-16 {
            SMatrix::identity() - (v * v.transpose()) * (2.0 / v.norm_squared())
        } else {
            SMatrix::identity()
        };
        Self { center: (start.0 + goal.0) * 0.5, rotation, c_min }
    }

    fn sample(&self, c_best: Real, rng: &mut ChaCha8Rng) -> JointConfig {
        let r1 = c_best / 2.0;
        let r_rest = (c_best * c_best - self.c_min * self.c_min).max(0.0).sqrt() / 2.0;
        let mut x = sample_unit_ball(rng);
        x[0] *= r1;
        for i in 1..NUM_JOINTS {
            x[i] *= r_rest;
        }
        crate::robot::JointConfig(self.center + self.rotation * x)
    }
}

fn assemble(tree_a: &Tree, idx_a: usize, tree_b: &Tree, idx_b: usize) -> Vec<JointConfig> {
    // Both indices hold the same junction configuration.
    let mut fwd = tree_a.path_to_root(idx_a);
    fwd.reverse();
    let bwd = tree_b.path_to_root(idx_b);
    fwd.extend(bwd.into_iter().skip(1));
    fwd
}

fn path_cost(waypoints: &[JointConfig]) -> Real {
    waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Plans from `problem.q0` to `problem.goal`.
///
/// Bidirectional connect to the first solution, then informed refinement
/// until the virtual budget, a stall, or near-optimality. Every returned
/// edge has been validated at the edge resolution. When no exact solution
/// exists the closest tree node to the goal (max-norm) is returned as an
/// approximate plan.
pub fn plan(
    problem: &PlanningProblem,
    robot: &RobotGeometry<Real>,
    world: &CollisionWorld<Real>,
    params: &PlannerParams,
    rng: &mut ChaCha8Rng,
) -> Result<PlanResult, PlannerError> {
    if params.budget_seconds < params.min_budget_seconds
        || params.budget_seconds > params.max_budget_seconds
    {
        return Err(PlannerError::BadBudget(
            params.budget_seconds,
            params.min_budget_seconds,
            params.max_budget_seconds,
        ));
    }

    let mut search = Search {
        robot,
        world,
        attached: problem.attached.as_ref(),
        params,
        meter: Meter::default(),
    };

    if !search.config_free(&problem.q0)? {
        return Err(PlannerError::StartInCollision);
    }

    let start = problem.q0;
    let goal = problem.goal;

    if start.max_norm_distance(&goal) <= params.goal_tolerance {
        return Ok(PlanResult {
            status: PlanStatus::Exact,
            path: Some(Path::new(vec![start])),
            reached: Some(goal),
            planning_time: search.meter.elapsed(params),
            cost: 0.0,
            cost_history: vec![(search.meter.elapsed(params), 0.0)],
        });
    }

    let goal_free = search.config_free(&goal)?;
    let mut start_tree = Tree::new(start);
    let mut goal_tree = Tree::new(goal);

    let informed = InformedSampler::new(&start, &goal);
    let c_min = start.distance(&goal);
    let mut best: Option<Vec<JointConfig>> = None;
    let mut best_cost = Real::INFINITY;
    let mut history: Vec<(Real, Real)> = Vec::new();
    let mut stall = 0usize;
    let mut start_is_a = true;

    macro_rules! improve {
        ($waypoints:expr, $search:expr) => {{
            let mut w = $waypoints;
            w = shortcut_with_meter(&w, robot, problem.attached.as_ref(), world, params.shortcut_iters, params.edge_resolution, rng, &mut $search.meter)?;
            let c = path_cost(&w);
            if c < best_cost {
                best_cost = c;
                best = Some(w);
                history.push(($search.meter.elapsed(params), c));
                stall = 0;
            } else {
                stall += 1;
            }
        }};
    }

    while search.meter.elapsed(params) < params.budget_seconds {
        if best.is_some() {
            // Near-optimal: the straight segment is the lower bound.
            if best_cost <= c_min * (1.0 + params.optimality_margin) {
                break;
            }
            if stall >= params.stall_iters {
                break;
            }
            let x = informed.sample(best_cost, rng);
            if !robot.chain.within_limits(&x) {
                stall += 1;
                continue;
            }
            let Some(ia) = search.connect(&mut start_tree, &x)? else {
                stall += 1;
                continue;
            };
            let Some(ib) = search.connect(&mut goal_tree, &x)? else {
                stall += 1;
                continue;
            };
            let candidate = assemble(&start_tree, ia, &goal_tree, ib);
            improve!(candidate, search);
        } else if goal_free {
            // RRT-Connect toward the first solution.
            let x = robot.chain.sample_uniform(rng);
            let (tree_a, tree_b): (&mut Tree, &mut Tree) = if start_is_a {
                (&mut start_tree, &mut goal_tree)
            } else {
                (&mut goal_tree, &mut start_tree)
            };
            let step = search.extend(tree_a, &x)?;
            if let Extend::Advanced(ia) | Extend::Reached(ia) = step {
                let q_new = tree_a.nodes[ia].q;
                if let Some(ib) = search.connect(tree_b, &q_new)? {
                    let (si, gi) = if start_is_a { (ia, ib) } else { (ib, ia) };
                    let candidate = assemble(&start_tree, si, &goal_tree, gi);
                    improve!(candidate, search);
                }
            }
            start_is_a = !start_is_a;
        } else {
            // Goal in collision: grow a single tree toward it and accept
            // an approximate result.
            let x = if rng.random_range(0.0..1.0) < params.goal_bias {
                goal
            } else {
                robot.chain.sample_uniform(rng)
            };
            let _ = search.extend(&mut start_tree, &x)?;
        }
    }

    let planning_time = search.meter.elapsed(params);
    if let Some(waypoints) = best {
        debug_assert_eq!(waypoints.last().unwrap().0, goal.0);
        return Ok(PlanResult {
            status: PlanStatus::Exact,
            path: Some(Path::new(waypoints)),
            reached: Some(goal),
            planning_time,
            cost: best_cost,
            cost_history: history,
        });
    }

    if start_tree.nodes.len() <= 1 {
        return Ok(PlanResult {
            status: PlanStatus::Failure,
            path: None,
            reached: None,
            planning_time,
            cost: Real::INFINITY,
            cost_history: history,
        });
    }

    // Approximate: closest node to the goal in max-norm.
    let mut best_idx = 0;
    let mut best_d = Real::INFINITY;
    for (i, n) in start_tree.nodes.iter().enumerate() {
        let d = n.q.max_norm_distance(&goal);
        if d < best_d {
            best_d = d;
            best_idx = i;
        }
    }
    let mut waypoints = start_tree.path_to_root(best_idx);
    waypoints.reverse();
    let waypoints = shortcut_with_meter(
        &waypoints,
        robot,
        problem.attached.as_ref(),
        world,
        params.shortcut_iters,
        params.edge_resolution,
        rng,
        &mut search.meter,
    )?;
    let cost = path_cost(&waypoints);
    Ok(PlanResult {
        status: PlanStatus::Approximate,
        reached: Some(*waypoints.last().expect("non-empty")),
        path: Some(Path::new(waypoints)),
        planning_time: search.meter.elapsed(params),
        cost,
        cost_history: history,
    })
}
