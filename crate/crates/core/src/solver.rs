//! Graph flows on labeled metric graphs: propagation along a spanning tree,
//! closure residuals on the remaining edges, and root finding for the
//! constrained moduli set.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::graph::{AutomorphismGroup, EdgeImage, LeafKind, OrientedGraph, UnionFind};
use crate::linalg::{cross, dot, norm, scale, sub, sym2_eigen, V3};
use crate::metric::{MetricError, MetricStructure};
use crate::morse::{
    find_critical_points, flow_point, limit_critical_point_with, seeds, trace_to_limit, BackendConfig,
    CriticalPoint, Direction, Manifold, MorseBackend, MorseError, MorseFunction, Point, Tolerances, Trajectory,
};
use crate::par_map;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("undetermined vertex `{0}`: spanning tree does not reach it")]
    Undetermined(String),
    #[error("unknown leaf `{0}`")]
    UnknownLeaf(String),
    #[error("unknown critical point `{point}` for the function on leaf `{leaf}`")]
    UnknownCriticalPoint { leaf: String, point: String },
    #[error("edge functions live on different manifolds")]
    MixedManifolds,
    #[error("unknown solver config key `{0}`")]
    UnknownConfigKey(String),
    #[error("invalid value for `{key}`: {value}")]
    InvalidValue { key: String, value: String },
    #[error("automorphism does not act on this graph")]
    ForeignAutomorphism,
}

/// A spanning tree of the graph and the edges left out of it.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleData {
    /// Tree edges, ascending.
    pub tree: Vec<usize>,
    /// `(edge, source, target)` for each non-tree edge.
    pub cycle_edges: Vec<(usize, usize, usize)>,
    /// Breadth-first order from the basepoint: `(known vertex, edge, new vertex)`.
    order: Vec<(usize, usize, usize)>,
}

/// Minimum spanning tree for the lexicographic order on edge ids.
pub fn spanning_tree(g: &OrientedGraph) -> CycleData {
    let mut by_id: Vec<usize> = (0..g.edge_count()).collect();
    by_id.sort_by(|a, b| g.edge(*a).id.cmp(&g.edge(*b).id));
    let mut uf = UnionFind::new(g.vertex_count());
    let mut in_tree = alloc::vec![false; g.edge_count()];
    for e in by_id {
        let ed = g.edge(e);
        if uf.union(ed.src, ed.dst) {
            in_tree[e] = true;
        }
    }
    let mut seen = alloc::vec![false; g.vertex_count()];
    let mut order = Vec::new();
    let mut queue = alloc::collections::VecDeque::new();
    seen[g.basepoint()] = true;
    queue.push_back(g.basepoint());
    while let Some(v) = queue.pop_front() {
        for &e in g.incident_edges(v) {
            if !in_tree[e] {
                continue;
            }
            let w = g.edge(e).other_end(v);
            if !seen[w] {
                seen[w] = true;
                order.push((v, e, w));
                queue.push_back(w);
            }
        }
    }
    let cycle_edges = (0..g.edge_count())
        .filter(|&e| !in_tree[e])
        .map(|e| (e, g.edge(e).src, g.edge(e).dst))
        .collect();
    CycleData {
        tree: (0..g.edge_count()).filter(|&e| in_tree[e]).collect(),
        cycle_edges,
        order,
    }
}

impl CycleData {
    /// Whether every vertex is reached from the basepoint.
    pub fn spans(&self, g: &OrientedGraph) -> bool {
        self.order.len() + 1 == g.vertex_count()
    }
}

/// A labeled metric graph with the Morse function of every edge resolved.
#[derive(Clone, Debug)]
pub struct FlowProblem {
    structure: MetricStructure,
    manifold: Manifold,
    functions: Vec<MorseFunction>,
    tol: Tolerances,
    cycles: CycleData,
    /// critical points of each leaf edge's function, keyed by leaf vertex
    leaf_critical: BTreeMap<usize, Vec<CriticalPoint>>,
}

impl FlowProblem {
    /// Resolves every edge label through the backend configuration.
    pub fn new(structure: MetricStructure, cfg: &BackendConfig) -> Result<Self, SolverError> {
        let labels = structure.require_labels()?;
        let mut cache: BTreeMap<&str, MorseFunction> = BTreeMap::new();
        let mut functions = Vec::with_capacity(labels.len());
        for l in &labels {
            if !cache.contains_key(l) {
                cache.insert(l, cfg.label_backend(l)?.function().clone());
            }
            functions.push(cache[l].clone());
        }
        Self::with_functions(structure, functions, cfg.tol.clone())
    }

    pub fn with_functions(
        structure: MetricStructure,
        functions: Vec<MorseFunction>,
        tol: Tolerances,
    ) -> Result<Self, SolverError> {
        let g = structure.graph().clone();
        let manifold = functions.first().map(|f| f.manifold()).unwrap_or(Manifold::Torus);
        if functions.iter().any(|f| f.manifold() != manifold) {
            return Err(SolverError::MixedManifolds);
        }
        let cycles = spanning_tree(&g);
        if let Some(v) = (0..g.vertex_count()).find(|&v| {
            v != g.basepoint() && !cycles.order.iter().any(|&(_, _, w)| w == v)
        }) {
            return Err(SolverError::Undetermined(g.vertex(v).id.clone()));
        }
        let mut by_function: Vec<(MorseFunction, Vec<CriticalPoint>)> = Vec::new();
        let mut leaf_critical = BTreeMap::new();
        for leaf in (0..g.vertex_count()).filter(|&v| g.is_leaf(v)) {
            let e = g.leaf_edge(leaf).expect("leaf has an edge");
            let f = &functions[e];
            let crit = match by_function.iter().find(|(h, _)| h == f) {
                Some((_, c)) => c.clone(),
                None => {
                    let c = find_critical_points(&MorseBackend::new(f.clone(), tol.clone())?)?;
                    by_function.push((f.clone(), c.clone()));
                    c
                }
            };
            leaf_critical.insert(leaf, crit);
        }
        Ok(FlowProblem {
            structure,
            manifold,
            functions,
            tol,
            cycles,
            leaf_critical,
        })
    }

    pub fn structure(&self) -> &MetricStructure {
        &self.structure
    }

    pub fn graph(&self) -> &OrientedGraph {
        self.structure.graph()
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn function(&self, e: usize) -> &MorseFunction {
        &self.functions[e]
    }

    pub fn functions(&self) -> &[MorseFunction] {
        &self.functions
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn cycles(&self) -> &CycleData {
        &self.cycles
    }

    /// Critical points of the function on the edge of leaf vertex `leaf`.
    pub fn leaf_critical_points(&self, leaf: usize) -> Option<&[CriticalPoint]> {
        self.leaf_critical.get(&leaf).map(Vec::as_slice)
    }

    fn flow_edge(&self, e: usize, p: Point, forward: bool) -> Point {
        let l = self.structure.length(e);
        flow_point(&self.functions[e], p, if forward { l } else { -l }, self.tol.h)
    }

    /// Values at every vertex reached through the tree; leaf vertices are
    /// skipped unless `leaves` is set.
    fn tree_values(&self, x: Point, leaves: bool) -> Vec<Option<Point>> {
        let g = self.graph();
        let mut val = alloc::vec![None; g.vertex_count()];
        val[g.basepoint()] = Some(x);
        for &(v, e, w) in &self.cycles.order {
            if !leaves && g.is_leaf(w) {
                continue;
            }
            let p = val[v].expect("parent precedes child in breadth-first order");
            val[w] = Some(self.flow_edge(e, p, g.edge(e).src == v));
        }
        val
    }

    fn cycle_residual_from(&self, val: &[Option<Point>]) -> Vec<f64> {
        let mut r = Vec::with_capacity(2 * self.cycles.cycle_edges.len());
        for &(e, v0, v1) in &self.cycles.cycle_edges {
            let a = self.flow_edge(e, val[v0].expect("internal vertex"), true);
            let d = self.manifold.chart_diff(val[v1].expect("internal vertex"), a);
            r.extend_from_slice(&d);
        }
        r
    }
}

/// A flow on the whole graph, determined by its basepoint value.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFlow {
    pub x: Point,
    pub vertex_values: Vec<Point>,
    /// Per edge, samples over `[0, ℓ(E)]` from the source end. Non-tree edges
    /// carry the flow from their source value, whose endpoint the residual
    /// compares against the target value.
    pub edge_paths: Vec<Trajectory>,
    pub residual_norm: f64,
}

impl GraphFlow {
    /// Largest mismatch at a vertex between an internal edge's path endpoint
    /// and the value recorded there.
    pub fn vertex_mismatch(&self, problem: &FlowProblem) -> f64 {
        let g = problem.graph();
        let m = problem.manifold();
        (0..g.edge_count())
            .filter(|&e| !g.is_leaf_edge(e))
            .map(|e| m.distance(self.edge_paths[e].endpoint(), self.vertex_values[g.edge(e).dst]))
            .fold(0.0, f64::max)
    }
}

fn edge_samples(f: &MorseFunction, start: Point, length: f64, h: f64, backward: bool) -> Vec<(f64, Point)> {
    let n = ((length / h).ceil() as usize).max(1);
    let dt = length / n as f64;
    let mut p = start;
    let mut out = Vec::with_capacity(n + 1);
    out.push(p);
    for _ in 0..n {
        p = crate::morse::rk4_step(f, p, if backward { -dt } else { dt });
        out.push(p);
    }
    if backward {
        out.reverse();
    }
    out.into_iter().enumerate().map(|(i, p)| (i as f64 * dt, p)).collect()
}

/// Propagates the basepoint value `x` through the spanning tree: forward
/// along edges leaving a known vertex, backward along edges entering it.
pub fn propagate_tree_flow(problem: &FlowProblem, x: Point) -> GraphFlow {
    let g = problem.graph();
    let x = problem.manifold().project(x);
    let val = problem.tree_values(x, true);
    let values: Vec<Point> = val.iter().map(|v| v.expect("spanning tree reaches every vertex")).collect();
    let mut paths: Vec<Option<Trajectory>> = alloc::vec![None; g.edge_count()];
    let mk = |e: usize, samples| Trajectory {
        samples,
        function: problem.functions[e].key().to_string(),
        direction: Direction::Forward,
    };
    let h = problem.tol.h;
    for &(v, e, _) in &problem.cycles.order {
        let l = problem.structure.length(e);
        let backward = g.edge(e).src != v;
        paths[e] = Some(mk(e, edge_samples(&problem.functions[e], values[v], l, h, backward)));
    }
    for &(e, v0, _) in &problem.cycles.cycle_edges {
        let l = problem.structure.length(e);
        paths[e] = Some(mk(e, edge_samples(&problem.functions[e], values[v0], l, h, false)));
    }
    let r = problem.cycle_residual_from(&val);
    GraphFlow {
        x,
        vertex_values: values,
        edge_paths: paths.into_iter().map(|p| p.expect("every edge is tree or cycle")).collect(),
        residual_norm: norm_of(&r),
    }
}

/// Stacked chart differences `chartdiff(γ(v₁), α_E(v₁))` over the non-tree
/// edges; empty for trees.
pub fn cycle_residual(problem: &FlowProblem, x: Point) -> Vec<f64> {
    let val = problem.tree_values(problem.manifold().project(x), false);
    problem.cycle_residual_from(&val)
}

fn norm_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A leaf constrained to the unstable (incoming) or stable (outgoing)
/// manifold of a critical point of its edge function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LeafConstraint {
    pub leaf: usize,
    /// Position in [`FlowProblem::leaf_critical_points`].
    pub critical: usize,
}

/// Codimension of a constraint at a leaf of the given kind.
pub fn constraint_codimension(kind: LeafKind, index: usize, d: usize) -> usize {
    match kind {
        LeafKind::Incoming => d - index,
        LeafKind::Outgoing => index,
    }
}

/// Solver settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Seeds per chart side.
    pub seed_grid: usize,
    pub newton_tol: f64,
    pub newton_maxiter: usize,
    pub dedup_radius: f64,
    /// leaf id to critical-point id
    pub constraints: BTreeMap<String, String>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed_grid: 16,
            newton_tol: 1e-8,
            newton_maxiter: 50,
            dedup_radius: 1e-5,
            constraints: BTreeMap::new(),
        }
    }
}

impl SolverConfig {
    /// Keys: `seed.grid`, `newton.tol`, `newton.maxiter`, `dedup.radius`,
    /// `constraint.<leaf-id>`.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, SolverError> {
        let mut cfg = SolverConfig::default();
        for (key, value) in entries {
            let (key, value) = (key.trim(), value.trim());
            let bad = || SolverError::InvalidValue {
                key: key.to_string(),
                value: value.to_string(),
            };
            let count = || match value.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(bad()),
            };
            let real = || match value.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
                _ => Err(bad()),
            };
            match key {
                "seed.grid" => cfg.seed_grid = count()?,
                "newton.tol" => cfg.newton_tol = real()?,
                "newton.maxiter" => cfg.newton_maxiter = count()?,
                "dedup.radius" => cfg.dedup_radius = real()?,
                _ => match key.strip_prefix("constraint.") {
                    Some(leaf) if !leaf.is_empty() => {
                        cfg.constraints.insert(leaf.to_string(), value.to_string());
                    }
                    _ => return Err(SolverError::UnknownConfigKey(key.to_string())),
                },
            }
        }
        Ok(cfg)
    }

    /// Resolves leaf and critical-point ids against a problem.
    pub fn resolve(&self, problem: &FlowProblem) -> Result<Vec<LeafConstraint>, SolverError> {
        let g = problem.graph();
        self.constraints
            .iter()
            .map(|(leaf, point)| {
                let v = g
                    .vertex_idx(leaf)
                    .filter(|&v| g.is_leaf(v))
                    .ok_or_else(|| SolverError::UnknownLeaf(leaf.clone()))?;
                let crit = problem.leaf_critical_points(v).expect("leaf");
                let critical = crit.iter().position(|c| &c.id == point).ok_or_else(|| {
                    SolverError::UnknownCriticalPoint {
                        leaf: leaf.clone(),
                        point: point.clone(),
                    }
                })?;
                Ok(LeafConstraint { leaf: v, critical })
            })
            .collect()
    }
}

/// A separatrix as a polyline through its saddle, on the sphere lift for RP².
#[derive(Clone, Debug)]
struct Curve {
    points: Vec<Point>,
    /// Per run of `CHUNK` segments: a center point and a radius covering the run.
    chunks: Vec<(Point, f64)>,
    torus: bool,
}

/// Spacing of the stored separatrix polylines.
const CURVE_SPACING: f64 = 5e-4;
const CHUNK: usize = 32;

impl Curve {
    fn trace(f: &MorseFunction, crit: &[CriticalPoint], saddle: &CriticalPoint, kind: LeafKind, tol: &Tolerances) -> Result<Self, MorseError> {
        let m = f.manifold();
        let lifted = f.lifted();
        let lm = lifted.manifold();
        let (dir, flow) = match kind {
            LeafKind::Incoming => (saddle.unstable_directions()[0], Direction::Forward),
            LeafKind::Outgoing => (saddle.stable_directions()[0], Direction::Backward),
        };
        let mut targets: Vec<Point> = crit.iter().map(|c| c.location).collect();
        if m == Manifold::Rp2 {
            targets.extend(crit.iter().map(|c| scale(-1.0, c.location)));
        }
        let mut branches = Vec::new();
        for sign in [-1.0, 1.0] {
            let x0 = lm.exp(saddle.location, scale(sign * tol.shoot_radius, dir));
            let (pts, hit) = trace_to_limit(&lifted, &targets, x0, flow, tol.h, tol.eps, tol.t_max);
            if hit.is_none() {
                return Err(MorseError::NoConvergence { t_max: tol.t_max });
            }
            branches.push(pts);
        }
        let mut raw: Vec<Point> = branches[0].iter().rev().copied().collect();
        raw.push(saddle.location);
        raw.extend(branches[1].iter().copied());
        let mut points: Vec<Point> = Vec::with_capacity(raw.len());
        for p in raw {
            match points.last() {
                Some(&q) if lm.distance(q, p) < CURVE_SPACING => {}
                _ => points.push(p),
            }
        }
        let torus = m == Manifold::Torus;
        let geom = if torus { Manifold::Torus } else { Manifold::Sphere };
        let chunks = (0..points.len().saturating_sub(1))
            .step_by(CHUNK)
            .map(|start| {
                let run = &points[start..(start + CHUNK + 1).min(points.len())];
                let c = run[run.len() / 2];
                let r = run.iter().map(|&p| geom.distance(c, p)).fold(0.0, f64::max);
                (c, r)
            })
            .collect();
        Ok(Curve { points, chunks, torus })
    }

    /// Signed distance from `y` to the polyline, sign taken from the nearest
    /// segment's normal.
    fn signed_distance(&self, y: Point) -> f64 {
        let (geom, up_fixed) = if self.torus {
            (Manifold::Torus, Some([0.0, 0.0, 1.0]))
        } else {
            (Manifold::Sphere, None)
        };
        let mut best = f64::INFINITY;
        let mut signed = 0.0;
        let consider = |a: Point, b: Point, best: &mut f64, signed: &mut f64| {
            let w = geom.log(a, y);
            let d = geom.log(a, b);
            let len2 = dot(d, d);
            let t = if len2 > 0.0 { (dot(w, d) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let diff = sub(w, scale(t, d));
            let dist = norm(diff);
            if dist < *best {
                let up: V3 = up_fixed.unwrap_or(a);
                let s = dot(diff, cross(up, d));
                *best = dist;
                *signed = if s >= 0.0 { dist } else { -dist };
            }
        };
        // (lower bound, chunk, antipodal copy), nearest first
        let mut order: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * self.chunks.len());
        for (k, &(c, r)) in self.chunks.iter().enumerate() {
            order.push((geom.distance(c, y) - r, k, false));
            if !self.torus {
                // the antipodal copy (only distinct on RP²; harmless on the sphere)
                order.push((geom.distance(scale(-1.0, c), y) - r, k, true));
            }
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (lower, k, flip) in order {
            if lower > best + CURVE_SPACING {
                break;
            }
            let start = k * CHUNK;
            let end = (start + CHUNK).min(self.points.len() - 1);
            for i in start..end {
                let (a, b) = (self.points[i], self.points[i + 1]);
                if flip {
                    consider(scale(-1.0, a), scale(-1.0, b), &mut best, &mut signed);
                } else {
                    consider(a, b, &mut best, &mut signed);
                }
            }
        }
        signed
    }
}

enum Condition {
    /// `W^u`/`W^s` is open: checked by following the flow.
    Open { crit: Vec<CriticalPoint>, target: usize, direction: Direction },
    /// A single point.
    Point(Point),
    Curve(Curve),
}

struct Objective<'a> {
    problem: &'a FlowProblem,
    /// (body vertex, function edge, condition)
    conditions: Vec<(usize, usize, Condition)>,
    rows: usize,
}

impl<'a> Objective<'a> {
    fn new(problem: &'a FlowProblem, constraints: &[LeafConstraint]) -> Result<Self, SolverError> {
        let g = problem.graph();
        let d = problem.manifold.dim();
        let mut conditions = Vec::new();
        let mut rows = 2 * problem.cycles.cycle_edges.len();
        for c in constraints {
            let kind = g.vertex(c.leaf).leaf.ok_or_else(|| SolverError::UnknownLeaf(g.vertex(c.leaf).id.clone()))?;
            let e = g.leaf_edge(c.leaf).expect("leaf edge");
            let body = g.leaf_body_vertex(c.leaf).expect("leaf body");
            let crit = problem.leaf_critical_points(c.leaf).expect("leaf");
            let a = &crit[c.critical];
            let cond = match constraint_codimension(kind, a.index, d) {
                0 => Condition::Open {
                    crit: crit.to_vec(),
                    target: c.critical,
                    direction: match kind {
                        LeafKind::Incoming => Direction::Backward,
                        LeafKind::Outgoing => Direction::Forward,
                    },
                },
                k if k == d => {
                    rows += d;
                    Condition::Point(a.location)
                }
                _ => {
                    rows += 1;
                    Condition::Curve(Curve::trace(&problem.functions[e], crit, a, kind, &problem.tol)?)
                }
            };
            conditions.push((body, e, cond));
        }
        Ok(Objective {
            problem,
            conditions,
            rows,
        })
    }

    fn residual(&self, x: Point) -> Vec<f64> {
        let p = self.problem;
        let val = p.tree_values(x, false);
        let mut r = p.cycle_residual_from(&val);
        for (body, _, cond) in &self.conditions {
            let y = val[*body].expect("internal vertex");
            match cond {
                Condition::Open { .. } => {}
                Condition::Point(a) => r.extend_from_slice(&p.manifold.chart_diff(*a, y)),
                Condition::Curve(c) => r.push(c.signed_distance(y)),
            }
        }
        r
    }

    fn open_conditions_hold(&self, x: Point) -> bool {
        let p = self.problem;
        let val = p.tree_values(x, false);
        self.conditions.iter().all(|(body, e, cond)| match cond {
            Condition::Open { crit, target, direction } => {
                let t = &p.tol;
                let y = val[*body].expect("internal vertex");
                limit_critical_point_with(&p.functions[*e], crit, y, *direction, t.h, t.eps, t.t_max)
                    .is_ok_and(|i| i == *target)
            }
            _ => true,
        })
    }

    /// Central-difference Jacobian in the tangent frame at `x`.
    fn jacobian(&self, x: Point) -> Vec<[f64; 2]> {
        let m = self.problem.manifold;
        let step = 1e-7;
        let mut cols = [Vec::new(), Vec::new()];
        for (k, col) in cols.iter_mut().enumerate() {
            let mut v = [0.0; 2];
            v[k] = step;
            let rp = self.residual(m.exp_frame(x, v));
            v[k] = -step;
            let rm = self.residual(m.exp_frame(x, v));
            *col = rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * step)).collect();
        }
        (0..self.rows).map(|i| [cols[0][i], cols[1][i]]).collect()
    }

    /// One-sided differences reusing the residual `r` at `x`; used for steps.
    fn forward_jacobian(&self, x: Point, r: &[f64]) -> Vec<[f64; 2]> {
        let m = self.problem.manifold;
        let step = 1e-7;
        let c0 = self.residual(m.exp_frame(x, [step, 0.0]));
        let c1 = self.residual(m.exp_frame(x, [0.0, step]));
        (0..self.rows)
            .map(|i| [(c0[i] - r[i]) / step, (c1[i] - r[i]) / step])
            .collect()
    }
}

fn normal_equations(j: &[[f64; 2]], r: &[f64]) -> ([[f64; 2]; 2], [f64; 2]) {
    let mut a = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for (row, ri) in j.iter().zip(r) {
        for p in 0..2 {
            b[p] += row[p] * ri;
            for q in 0..2 {
                a[p][q] += row[p] * row[q];
            }
        }
    }
    (a, b)
}

/// Numerical rank of an `m x 2` matrix from the singular values of `JᵀJ`.
fn rank2(j: &[[f64; 2]]) -> usize {
    let (a, _) = normal_equations(j, &alloc::vec![0.0; j.len()]);
    let (eig, _) = sym2_eigen(a[0][0], a[0][1], a[1][1]);
    let s: Vec<f64> = eig.iter().map(|l| l.max(0.0).sqrt()).collect();
    let top = s[1];
    if top < 1e-9 {
        return 0;
    }
    s.iter().filter(|&&v| v > 1e-6 * top).count()
}

/// Levenberg–Marquardt on the basepoint value.
fn levenberg_marquardt(obj: &Objective, seed: Point, cfg: &SolverConfig) -> Option<(Point, f64)> {
    let m = obj.problem.manifold;
    let max_step = match m {
        Manifold::Torus => 0.1,
        _ => 0.3,
    };
    let mut x = seed;
    let mut r = obj.residual(x);
    let mut rn = norm_of(&r);
    let mut mu = 1e-6;
    for _ in 0..cfg.newton_maxiter {
        if rn < cfg.newton_tol {
            return Some((x, rn));
        }
        if !rn.is_finite() {
            return None;
        }
        let j = obj.forward_jacobian(x, &r);
        let (a, b) = normal_equations(&j, &r);
        let scale_a = (a[0][0] + a[1][1]).max(1e-300);
        let mut accepted = false;
        for _ in 0..12 {
            let l = mu * scale_a;
            let (p, q, s) = (a[0][0] + l, a[0][1], a[1][1] + l);
            let det = p * s - q * q;
            if det.abs() < 1e-300 {
                mu *= 10.0;
                continue;
            }
            let mut step = [-(s * b[0] - q * b[1]) / det, -(-q * b[0] + p * b[1]) / det];
            let sn = (step[0] * step[0] + step[1] * step[1]).sqrt();
            if sn > max_step {
                step = [step[0] * max_step / sn, step[1] * max_step / sn];
            }
            let xn = m.exp_frame(x, step);
            let rnew = obj.residual(xn);
            let nn = norm_of(&rnew);
            if nn < rn {
                x = xn;
                r = rnew;
                rn = nn;
                mu = (mu / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    (rn < cfg.newton_tol).then_some((x, rn))
}

/// An isolated graph flow satisfying the leaf constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub flow: GraphFlow,
    /// Norm of the full objective (closure residual plus leaf conditions).
    pub residual_norm: f64,
    /// Rank of the objective's Jacobian at the solution.
    pub rank: usize,
    /// `(leaf id, critical-point id)` for each constrained leaf.
    pub limits: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Isolated(Vec<Solution>),
    /// Newton converged along a family; `dimension` is estimated from the
    /// local Jacobian rank.
    PositiveDimensional { dimension: usize, samples: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    /// `d - Σ codimensions - b₁ d`.
    pub expected_dimension: i64,
    pub seeds: usize,
    pub converged: usize,
}

impl SolveReport {
    /// Number of isolated solutions, `None` for a positive-dimensional set.
    pub fn count(&self) -> Option<usize> {
        match &self.outcome {
            SolveOutcome::Isolated(s) => Some(s.len()),
            SolveOutcome::PositiveDimensional { .. } => None,
        }
    }
}

/// Expected dimension of the constrained solution set.
pub fn expected_dimension(problem: &FlowProblem, constraints: &[LeafConstraint]) -> i64 {
    let g = problem.graph();
    let d = problem.manifold.dim();
    let (b1, _) = g.betti_and_euler();
    let codim: usize = constraints
        .iter()
        .map(|c| {
            let kind = g.vertex(c.leaf).leaf.expect("leaf");
            let index = problem.leaf_critical_points(c.leaf).expect("leaf")[c.critical].index;
            constraint_codimension(kind, index, d)
        })
        .sum();
    d as i64 - (b1 * d) as i64 - codim as i64
}

/// Minimum number of rank-deficient solutions that signal a family.
const FAMILY_WITNESSES: usize = 8;

/// Finds all graph flows meeting the leaf constraints by seeding
/// Levenberg–Marquardt on a grid of basepoint values.
pub fn solve_graph_flows(
    problem: &FlowProblem,
    constraints: &[LeafConstraint],
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    let obj = Objective::new(problem, constraints)?;
    let m = problem.manifold;
    let d = m.dim();
    let seed_points = seeds(m, cfg.seed_grid);
    let results: Vec<Option<(Point, f64)>> = par_map(seed_points.len(), |i| {
        levenberg_marquardt(&obj, seed_points[i], cfg)
    });
    let mut found: Vec<(Point, f64)> = Vec::new();
    for (x, rn) in results.iter().flatten() {
        let x = m.canonical(*x);
        if !found.iter().any(|(y, _)| m.distance(*y, x) < cfg.dedup_radius) {
            found.push((x, *rn));
        }
    }
    // open conditions are properties of the point, so checking after the merge suffices
    let admissible = par_map(found.len(), |i| obj.open_conditions_hold(found[i].0));
    let converged = results
        .iter()
        .flatten()
        .filter(|(x, _)| {
            let x = m.canonical(*x);
            found
                .iter()
                .zip(&admissible)
                .any(|((y, _), ok)| *ok && m.distance(*y, x) < cfg.dedup_radius)
        })
        .count();
    let found: Vec<(Point, f64)> = found.into_iter().zip(admissible).filter(|(_, ok)| *ok).map(|(f, _)| f).collect();
    let ranks: Vec<usize> = found.iter().map(|(x, _)| rank2(&obj.jacobian(*x))).collect();
    let expected_dimension = expected_dimension(problem, constraints);

    // a family: many rank-deficient solutions spread well beyond the dedup radius
    let mut spread: Vec<Point> = Vec::new();
    let mut family_dim = 0;
    for (i, (x, _)) in found.iter().enumerate() {
        if ranks[i] < d && spread.iter().all(|y| m.distance(*y, *x) > 10.0 * cfg.dedup_radius) {
            spread.push(*x);
            family_dim = family_dim.max(d - ranks[i]);
        }
    }
    if spread.len() >= FAMILY_WITNESSES {
        spread.sort_by(|a, b| cmp_points(*a, *b));
        return Ok(SolveReport {
            outcome: SolveOutcome::PositiveDimensional {
                dimension: family_dim,
                samples: spread,
            },
            expected_dimension,
            seeds: seed_points.len(),
            converged,
        });
    }

    let g = problem.graph();
    let mut solutions: Vec<Solution> = found
        .iter()
        .zip(&ranks)
        .map(|(&(x, rn), &rank)| Solution {
            flow: propagate_tree_flow(problem, x),
            residual_norm: rn,
            rank,
            limits: constraints
                .iter()
                .map(|c| {
                    (
                        g.vertex(c.leaf).id.clone(),
                        problem.leaf_critical_points(c.leaf).expect("leaf")[c.critical].id.clone(),
                    )
                })
                .collect(),
        })
        .collect();
    solutions.sort_by(|a, b| cmp_points(a.flow.x, b.flow.x));
    Ok(SolveReport {
        outcome: SolveOutcome::Isolated(solutions),
        expected_dimension,
        seeds: seed_points.len(),
        converged,
    })
}

fn cmp_points(a: Point, b: Point) -> core::cmp::Ordering {
    let q = |p: Point| p.map(|c| (c * 1e6).round() as i64);
    q(a).cmp(&q(b))
}

/// Outcome of applying every automorphism to every accepted flow.
#[derive(Clone, Debug, PartialEq)]
pub struct AutActionReport {
    pub group_order: usize,
    pub checked: usize,
    pub failures: Vec<String>,
    /// Orbits of the solution set under the automorphisms fixing the
    /// structure and the constraints.
    pub orbits: usize,
    pub orbit_sizes: Vec<usize>,
}

impl AutActionReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.orbit_sizes.iter().all(|s| self.group_order % s == 0)
    }
}

/// Tolerance for accepting a transported flow.
const TRANSPORT_TOL: f64 = 1e-6;

/// Transports each solution along each automorphism `φ` (vertex values
/// `γ'(φ v) = γ(v)`, lengths, labels and constraints carried along) and
/// checks that the result is an accepted flow of the transported problem.
pub fn check_aut_action(
    problem: &FlowProblem,
    constraints: &[LeafConstraint],
    solutions: &[Solution],
    group: &AutomorphismGroup,
) -> Result<AutActionReport, SolverError> {
    let g = problem.graph();
    if **group.graph() != *g {
        return Err(SolverError::ForeignAutomorphism);
    }
    let m = problem.manifold;
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut uf = UnionFind::new(solutions.len());
    for phi in group.elements() {
        let emap: Vec<usize> = phi
            .edge_map()
            .iter()
            .map(|im| match im {
                EdgeImage::Edge(e) => Ok(*e),
                EdgeImage::Collapsed => Err(SolverError::ForeignAutomorphism),
            })
            .collect::<Result<_, _>>()?;
        let vmap = phi.vertex_map();
        let n = g.edge_count();
        let mut lengths = alloc::vec![0.0; n];
        let mut labels = alloc::vec![None; n];
        let mut functions = problem.functions.clone();
        for e in 0..n {
            lengths[emap[e]] = problem.structure.length(e);
            labels[emap[e]] = problem.structure.labels()[e].clone();
            functions[emap[e]] = problem.functions[e].clone();
        }
        let moved = MetricStructure::with_parts(problem.structure.graph().clone(), lengths, labels);
        let fixes_structure = moved == problem.structure;
        let moved = FlowProblem::with_functions(moved, functions, problem.tol.clone())?;
        let moved_constraints: Vec<LeafConstraint> = constraints
            .iter()
            .map(|c| LeafConstraint {
                leaf: vmap[c.leaf],
                critical: c.critical,
            })
            .collect();
        let mut sorted_a = moved_constraints.clone();
        sorted_a.sort();
        let mut sorted_b = constraints.to_vec();
        sorted_b.sort();
        let stabilizes = fixes_structure && sorted_a == sorted_b;
        let obj = Objective::new(&moved, &moved_constraints)?;
        for (i, s) in solutions.iter().enumerate() {
            checked += 1;
            let mut values = s.flow.vertex_values.clone();
            for v in 0..g.vertex_count() {
                values[vmap[v]] = s.flow.vertex_values[v];
            }
            let x = values[g.basepoint()];
            // edge equations of the transported structure, edge by edge
            let mismatch = (0..n)
                .filter(|&e| !g.is_leaf_edge(e))
                .map(|e| {
                    let ed = g.edge(e);
                    m.distance(moved.flow_edge(e, values[ed.src], true), values[ed.dst])
                })
                .fold(0.0, f64::max);
            let rn = norm_of(&obj.residual(x));
            if mismatch > TRANSPORT_TOL || rn > TRANSPORT_TOL || !obj.open_conditions_hold(x) {
                failures.push(format!(
                    "automorphism {:?} sends solution {i} to a non-flow (vertex mismatch {mismatch:e}, residual {rn:e})",
                    vmap
                ));
                continue;
            }
            if stabilizes {
                if let Some(j) = solutions
                    .iter()
                    .position(|t| m.distance(t.flow.x, x) < 10.0 * TRANSPORT_TOL)
                {
                    uf.union(i, j);
                } else {
                    failures.push(format!("automorphism {:?} sends solution {i} outside the solution set", vmap));
                }
            }
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..solutions.len() {
        *sizes.entry(uf.find(i)).or_default() += 1;
    }
    Ok(AutActionReport {
        group_order: group.order(),
        checked,
        failures,
        orbits: sizes.len(),
        orbit_sizes: sizes.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{compute_automorphisms, shapes};
    use crate::metric::assign_labels;
    use alloc::sync::Arc;
    use core::f64::consts::PI;

    const AMP: f64 = 1.0 / (4.0 * PI * PI);

    /// Three shifted torus cosines with unit Hessian eigenvalues.
    fn torus_cfg() -> BackendConfig {
        let amp = alloc::format!("{AMP}");
        BackendConfig::from_entries([
            ("manifold", "torus"),
            ("function", "cos"),
            ("param.amp", amp.as_str()),
            ("label.f1", "cos"),
            ("label.f1.param.amp", amp.as_str()),
            ("label.f1.param.shift_x", "0.1"),
            ("label.f1.param.shift_y", "0.2"),
            ("label.f2", "cos"),
            ("label.f2.param.amp", amp.as_str()),
            ("label.f2.param.shift_x", "0.3"),
            ("label.f2.param.shift_y", "0.05"),
            ("label.f3", "cos"),
            ("label.f3.param.amp", amp.as_str()),
            ("label.f3.param.shift_x", "0.15"),
            ("label.f3.param.shift_y", "0.35"),
        ])
        .unwrap()
    }

    /// `dx/dt = 2πA sin(2π(x - s))` in closed form.
    fn cos_flow(x0: f64, shift: f64, t: f64) -> f64 {
        let phi0 = 2.0 * PI * (x0 - shift);
        let phi = 2.0 * ((phi0 / 2.0).tan() * (4.0 * PI * PI * AMP * t).exp()).atan();
        (phi / (2.0 * PI) + shift).rem_euclid(1.0)
    }

    fn y_problem(lengths: &[(&str, f64)]) -> FlowProblem {
        let g = Arc::new(shapes::y_merge());
        let ms = MetricStructure::from_lengths(g, lengths.iter().copied()).unwrap();
        let cfg = torus_cfg();
        let ms = assign_labels(&ms, [("a1", "f1"), ("a2", "f2"), ("b", "f3")], |k| cfg.is_known_label(k)).unwrap();
        FlowProblem::new(ms, &cfg).unwrap()
    }

    fn constraints(p: &FlowProblem, pairs: &[(&str, &str)]) -> Vec<LeafConstraint> {
        let mut sc = SolverConfig::default();
        for (l, c) in pairs {
            sc.constraints.insert((*l).into(), (*c).into());
        }
        sc.resolve(p).unwrap()
    }

    #[test]
    fn spanning_tree_is_lexicographic() {
        let g = shapes::lollipop();
        let c = spanning_tree(&g);
        let ids: Vec<&str> = c.tree.iter().map(|&e| g.edge(e).id.as_str()).collect();
        assert_eq!(ids, ["A", "C"]);
        assert_eq!(c.cycle_edges.len(), 1);
        assert_eq!(g.edge(c.cycle_edges[0].0).id, "B");
        assert!(c.spans(&g));
        let f8 = shapes::figure_eight();
        assert_eq!(spanning_tree(&f8).cycle_edges.len(), 2);
    }

    #[test]
    fn y_leaves_match_closed_form() {
        let p = y_problem(&[("a1", 0.7), ("a2", 0.4), ("b", 0.9)]);
        let x = [0.25, 0.25, 0.0];
        let fl = propagate_tree_flow(&p, x);
        let g = p.graph();
        let at = |id: &str| fl.vertex_values[g.vertex_idx(id).unwrap()];
        // incoming leaves sit upstream: flow backward
        let i1 = at("i1");
        assert!((i1[0] - cos_flow(0.25, 0.1, -0.7)).abs() < 1e-6);
        assert!((i1[1] - cos_flow(0.25, 0.2, -0.7)).abs() < 1e-6);
        let i2 = at("i2");
        assert!((i2[0] - cos_flow(0.25, 0.3, -0.4)).abs() < 1e-6);
        let o = at("o");
        assert!((o[1] - cos_flow(0.25, 0.35, 0.9)).abs() < 1e-6);
        assert!(cycle_residual(&p, x).is_empty());
        assert!(fl.vertex_mismatch(&p) < 1e-9);
    }

    #[test]
    fn lollipop_residual_closed_form() {
        let g = Arc::new(shapes::lollipop());
        let cfg = torus_cfg();
        let ms = MetricStructure::from_lengths(g, [("A", 0.3), ("B", 0.5)]).unwrap();
        let ms = assign_labels(&ms, [("A", "f1"), ("B", "f2"), ("C", "f3")], |k| cfg.is_known_label(k)).unwrap();
        let p = FlowProblem::new(ms, &cfg).unwrap();
        let x = [0.4, 0.7, 0.0];
        let r = cycle_residual(&p, x);
        // γ(v1) = f1-flow of x for 0.3, α = f2-flow of x for 0.5
        let want = [
            wrap_half(cos_flow(0.4, 0.3, 0.5) - cos_flow(0.4, 0.1, 0.3)),
            wrap_half(cos_flow(0.7, 0.05, 0.5) - cos_flow(0.7, 0.2, 0.3)),
        ];
        assert!((r[0] - want[0]).abs() < 1e-9 && (r[1] - want[1]).abs() < 1e-9, "{r:?} {want:?}");
    }

    fn wrap_half(x: f64) -> f64 {
        crate::morse::wrap_half(x)
    }

    #[test]
    fn intersection_of_saddle_curves() {
        let p = y_problem(&[]);
        let cfg = SolverConfig::default();
        let crit = p.leaf_critical_points(p.graph().vertex_idx("i1").unwrap()).unwrap();
        assert_eq!(crit.iter().map(|c| c.index).collect::<Vec<_>>(), [0, 1, 1, 2]);
        // horizontal unstable curve of f1 against vertical one of f2
        let c = constraints(&p, &[("i1", "c1.0"), ("i2", "c1.1"), ("o", "c0.0")]);
        assert_eq!(expected_dimension(&p, &c), 0);
        let rep = solve_graph_flows(&p, &c, &cfg).unwrap();
        assert_eq!(rep.count(), Some(1));
        let SolveOutcome::Isolated(s) = &rep.outcome else { unreachable!() };
        let x = s[0].flow.x;
        assert!((x[0] - 0.8).abs() < 1e-5 && (x[1] - 0.7).abs() < 1e-5, "{x:?}");
        // parallel curves miss each other
        let c = constraints(&p, &[("i1", "c1.0"), ("i2", "c1.0"), ("o", "c0.0")]);
        assert_eq!(solve_graph_flows(&p, &c, &cfg).unwrap().count(), Some(0));
    }

    #[test]
    fn open_constraint_gives_family() {
        let p = y_problem(&[]);
        let c = constraints(&p, &[("i1", "c2.0")]);
        assert_eq!(expected_dimension(&p, &c), 2);
        let rep = solve_graph_flows(&p, &c, &SolverConfig::default()).unwrap();
        assert!(matches!(rep.outcome, SolveOutcome::PositiveDimensional { dimension: 2, .. }));
        let c = constraints(&p, &[("i1", "c1.1")]);
        let rep = solve_graph_flows(&p, &c, &SolverConfig::default()).unwrap();
        assert!(matches!(rep.outcome, SolveOutcome::PositiveDimensional { dimension: 1, .. }));
    }

    #[test]
    fn aut_action_on_symmetric_y() {
        let g = Arc::new(shapes::y_merge());
        let cfg = torus_cfg();
        let ms = MetricStructure::unit(g.clone());
        let ms = assign_labels(&ms, [("a1", "f1"), ("a2", "f2"), ("b", "f3")], |k| cfg.is_known_label(k)).unwrap();
        let p = FlowProblem::new(ms, &cfg).unwrap();
        let c = constraints(&p, &[("i1", "c1.0"), ("i2", "c1.1"), ("o", "c0.0")]);
        let rep = solve_graph_flows(&p, &c, &SolverConfig::default()).unwrap();
        let SolveOutcome::Isolated(s) = rep.outcome else { unreachable!() };
        let group = compute_automorphisms(&g);
        assert_eq!(group.order(), 2);
        let aut = check_aut_action(&p, &c, &s, &group).unwrap();
        assert!(aut.holds(), "{aut:?}");
        assert_eq!(aut.checked, 2 * s.len());
    }

    #[test]
    fn config_keys() {
        let c = SolverConfig::from_entries([("seed.grid", "8"), ("constraint.i1", "c1.0"), ("dedup.radius", "1e-4")]).unwrap();
        assert_eq!(c.seed_grid, 8);
        assert_eq!(c.constraints["i1"], "c1.0");
        assert!(matches!(
            SolverConfig::from_entries([("seed.size", "8")]),
            Err(SolverError::UnknownConfigKey(_))
        ));
        assert!(SolverConfig::from_entries([("newton.tol", "-1")]).is_err());
    }
}
