//! Operation tables assembled from zero-dimensional graph-flow counts, the
//! expected-dimension formulas, and the homotopy-invariance and gluing checks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{glue, EdgeImage, GraphError, GraphMorphism, LeafKind, OrientedGraph};
use crate::metric::MetricStructure;
use crate::solver::{
    solve_graph_flows, FlowProblem, LeafConstraint, SolveOutcome, SolverConfig, SolverError,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OpsError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("index {index} outside [0, {d}]")]
    IndexOutOfRange { index: i64, d: i64 },
    #[error("incompatible labelings: {0}")]
    IncompatibleLabels(String),
    #[error("basis mismatch at glued leaves `{out_leaf}`/`{in_leaf}`: different edge functions")]
    BasisMismatch { out_leaf: String, in_leaf: String },
    #[error("morphism does not match the given structures")]
    ForeignMorphism,
}

/// Indices of the critical points at the leaves plus `χ(Γ)` and `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionQuery {
    pub in_indices: Vec<i64>,
    pub out_indices: Vec<i64>,
    pub chi: i64,
    pub d: i64,
}

impl DimensionQuery {
    pub fn validate(&self) -> Result<(), OpsError> {
        match self
            .in_indices
            .iter()
            .chain(&self.out_indices)
            .find(|&&i| i < 0 || i > self.d)
        {
            Some(&index) => Err(OpsError::IndexOutOfRange { index, d: self.d }),
            None => Ok(()),
        }
    }

    fn index_difference(&self) -> i64 {
        self.in_indices.iter().sum::<i64>() - self.out_indices.iter().sum::<i64>()
    }
}

/// `Σ_in Ind(aᵢ) − Σ_out Ind(aⱼ) + χ·d`.
pub fn expected_dimension_loopspace(q: &DimensionQuery) -> i64 {
    q.index_difference() + q.chi * q.d
}

/// `d·(χ − p) + Σ_in Ind(aᵢ) − Σ_out Ind(aⱼ)` for `p` incoming leaves, every
/// leaf constrained.
pub fn expected_dimension_finite(q: &DimensionQuery, p: i64) -> i64 {
    q.d * (q.chi - p) + q.index_difference()
}

/// Local dimension of the solver's solution set: the family dimension when a
/// family is detected, else `d − rank J` at the first isolated solution.
/// `None` when nothing converged.
pub fn dimension_probe(
    problem: &FlowProblem,
    constraints: &[LeafConstraint],
    cfg: &SolverConfig,
) -> Result<Option<usize>, OpsError> {
    let rep = solve_graph_flows(problem, constraints, cfg)?;
    let d = problem.manifold().dim();
    Ok(match rep.outcome {
        SolveOutcome::PositiveDimensional { dimension, .. } => Some(dimension),
        SolveOutcome::Isolated(s) => s.first().map(|s| d - s.rank),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum EntryStatus {
    Ok,
    /// Skipped: the solver found a family of this dimension.
    PositiveDimensional(usize),
    Failed(String),
}

impl core::fmt::Display for EntryStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EntryStatus::Ok => f.write_str("ok"),
            EntryStatus::PositiveDimensional(k) => write!(f, "positive-dimensional({k})"),
            EntryStatus::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

/// One leaf tuple of an operation table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    /// Critical-point ids at the incoming leaves, in [`OperationTable::incoming`] order.
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub in_indices: Vec<usize>,
    pub out_indices: Vec<usize>,
    pub expdim: i64,
    /// Raw number of isolated solutions.
    pub count: Option<usize>,
    pub status: EntryStatus,
}

impl TableEntry {
    pub fn count_mod2(&self) -> Option<u8> {
        self.count.map(|c| (c % 2) as u8)
    }
}

/// Operation table over the Morse bases of the leaf functions.
#[derive(Clone, Debug, PartialEq)]
pub struct OperationTable {
    /// Incoming leaf ids, sorted.
    pub incoming: Vec<String>,
    /// Outgoing leaf ids, sorted.
    pub outgoing: Vec<String>,
    /// Per leaf id, the critical points `(id, index)` of its edge function.
    pub basis: BTreeMap<String, Vec<(String, usize)>>,
    /// Every tuple of expected dimension zero, in lexicographic order.
    pub entries: Vec<TableEntry>,
    pub d: usize,
}

impl OperationTable {
    /// Whether some tuple failed or was skipped.
    pub fn is_partial(&self) -> bool {
        self.entries.iter().any(|e| e.status != EntryStatus::Ok)
    }

    /// Entry for an assignment leaf id to critical-point id.
    pub fn entry(&self, assignment: &BTreeMap<String, String>) -> Option<&TableEntry> {
        let ins: Option<Vec<&String>> = self.incoming.iter().map(|l| assignment.get(l)).collect();
        let outs: Option<Vec<&String>> = self.outgoing.iter().map(|l| assignment.get(l)).collect();
        let (ins, outs) = (ins?, outs?);
        self.entries.iter().find(|e| {
            e.inputs.iter().zip(&ins).all(|(a, b)| a == *b) && e.outputs.iter().zip(&outs).all(|(a, b)| a == *b)
        })
    }

    /// The entry's leaf assignment.
    pub fn assignment(&self, e: &TableEntry) -> BTreeMap<String, String> {
        self.incoming
            .iter()
            .zip(&e.inputs)
            .chain(self.outgoing.iter().zip(&e.outputs))
            .map(|(l, c)| (l.clone(), c.clone()))
            .collect()
    }

    /// Nonzero mod-2 entries of successful tuples.
    pub fn support(&self) -> Vec<&TableEntry> {
        self.entries.iter().filter(|e| e.count_mod2() == Some(1)).collect()
    }

    /// Row strings: in-tuple, out-tuple, in-indices, out-indices, expdim,
    /// count-mod-2, status.
    pub fn rows(&self) -> Vec<[String; 7]> {
        let join = |v: &[String]| v.join(" ");
        let joini = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        self.entries
            .iter()
            .map(|e| {
                [
                    join(&e.inputs),
                    join(&e.outputs),
                    joini(&e.in_indices),
                    joini(&e.out_indices),
                    e.expdim.to_string(),
                    e.count_mod2().map_or_else(String::new, |c| c.to_string()),
                    e.status.to_string(),
                ]
            })
            .collect()
    }
}

pub const TABLE_COLUMNS: [&str; 7] = [
    "in-tuple",
    "out-tuple",
    "in-indices",
    "out-indices",
    "expdim",
    "count-mod-2",
    "status",
];

fn sorted_leaves(g: &OrientedGraph, kind: LeafKind) -> Vec<usize> {
    let mut v = g.leaves(kind);
    v.sort_by(|a, b| g.vertex(*a).id.cmp(&g.vertex(*b).id));
    v
}

/// Runs the solver on every leaf tuple of expected dimension zero and records
/// the counts. Tuples whose solve fails or yields a family are kept with that
/// status.
pub fn build_operation_table(problem: &FlowProblem, cfg: &SolverConfig) -> OperationTable {
    let g = problem.graph();
    let d = problem.manifold().dim();
    let ins = sorted_leaves(g, LeafKind::Incoming);
    let outs = sorted_leaves(g, LeafKind::Outgoing);
    let leaves: Vec<usize> = ins.iter().chain(&outs).copied().collect();
    let (_, chi) = g.betti_and_euler();
    let basis: BTreeMap<String, Vec<(String, usize)>> = leaves
        .iter()
        .map(|&l| {
            let crit = problem.leaf_critical_points(l).expect("leaf");
            (
                g.vertex(l).id.clone(),
                crit.iter().map(|c| (c.id.clone(), c.index)).collect(),
            )
        })
        .collect();
    let sizes: Vec<usize> = leaves
        .iter()
        .map(|&l| problem.leaf_critical_points(l).expect("leaf").len())
        .collect();
    let mut entries = Vec::new();
    let mut choice = alloc::vec![0usize; leaves.len()];
    loop {
        let idx: Vec<usize> = leaves
            .iter()
            .zip(&choice)
            .map(|(&l, &c)| problem.leaf_critical_points(l).expect("leaf")[c].index)
            .collect();
        let q = DimensionQuery {
            in_indices: idx[..ins.len()].iter().map(|&i| i as i64).collect(),
            out_indices: idx[ins.len()..].iter().map(|&i| i as i64).collect(),
            chi,
            d: d as i64,
        };
        let expdim = expected_dimension_finite(&q, ins.len() as i64);
        if expdim == 0 {
            let constraints: Vec<LeafConstraint> = leaves
                .iter()
                .zip(&choice)
                .map(|(&leaf, &critical)| LeafConstraint { leaf, critical })
                .collect();
            let ids: Vec<String> = leaves
                .iter()
                .zip(&choice)
                .map(|(&l, &c)| problem.leaf_critical_points(l).expect("leaf")[c].id.clone())
                .collect();
            let (count, status) = match solve_graph_flows(problem, &constraints, cfg) {
                Ok(rep) => match rep.outcome {
                    SolveOutcome::Isolated(s) => (Some(s.len()), EntryStatus::Ok),
                    SolveOutcome::PositiveDimensional { dimension, .. } => {
                        log::info!("tuple {ids:?}: positive-dimensional ({dimension}), skipped");
                        (None, EntryStatus::PositiveDimensional(dimension))
                    }
                },
                Err(e) => (None, EntryStatus::Failed(e.to_string())),
            };
            entries.push(TableEntry {
                inputs: ids[..ins.len()].to_vec(),
                outputs: ids[ins.len()..].to_vec(),
                in_indices: idx[..ins.len()].to_vec(),
                out_indices: idx[ins.len()..].to_vec(),
                expdim,
                count,
                status,
            });
        }
        // odometer over the leaf bases, last leaf fastest
        let mut k = leaves.len();
        loop {
            if k == 0 {
                return OperationTable {
                    incoming: ins.iter().map(|&l| g.vertex(l).id.clone()).collect(),
                    outgoing: outs.iter().map(|&l| g.vertex(l).id.clone()).collect(),
                    basis,
                    entries,
                    d,
                };
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < sizes[k] {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Differences found when comparing two tables.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// Entries compared (both sides successful).
    pub compared: usize,
    /// Entries skipped because one side was not successful.
    pub skipped: usize,
    pub mismatches: Vec<String>,
}

impl ComparisonReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn render(a: &BTreeMap<String, String>) -> String {
    a.iter().map(|(l, c)| format!("{l}={c}")).collect::<Vec<_>>().join(" ")
}

/// Compares mod-2 counts of `t` against `u` after renaming the leaves of `t`
/// through `leaf_map`. A tuple absent from one side counts as zero there.
pub fn compare_tables(
    t: &OperationTable,
    u: &OperationTable,
    leaf_map: &BTreeMap<String, String>,
) -> ComparisonReport {
    let mut compared = 0;
    let mut skipped = 0;
    let mut mismatches = Vec::new();
    let rename = |a: BTreeMap<String, String>| -> BTreeMap<String, String> {
        a.into_iter()
            .map(|(l, c)| (leaf_map.get(&l).cloned().unwrap_or(l), c))
            .collect()
    };
    let mut seen = Vec::new();
    for e in &t.entries {
        let a = rename(t.assignment(e));
        let other = u.entry(&a);
        seen.push(a.clone());
        let lhs = e.count_mod2();
        let rhs = match other {
            Some(o) => o.count_mod2(),
            None => Some(0),
        };
        match (lhs, rhs) {
            (Some(x), Some(y)) => {
                compared += 1;
                if x != y {
                    mismatches.push(format!("{}: {x} vs {y}", render(&a)));
                }
            }
            _ => skipped += 1,
        }
    }
    for e in &u.entries {
        let a = u.assignment(e);
        if seen.contains(&a) {
            continue;
        }
        match e.count_mod2() {
            Some(1) => {
                compared += 1;
                mismatches.push(format!("{}: 0 vs 1", render(&a)));
            }
            Some(_) => compared += 1,
            None => skipped += 1,
        }
    }
    ComparisonReport {
        compared,
        skipped,
        mismatches,
    }
}

/// Compares the tables of `Γ` and `Γ'` for a morphism `φ: Γ → Γ'`, leaves
/// identified through `φ`. Edge functions must push forward along `φ`.
pub fn check_homotopy_invariance(
    phi: &GraphMorphism,
    source: &FlowProblem,
    target: &FlowProblem,
    cfg: &SolverConfig,
) -> Result<ComparisonReport, OpsError> {
    let (t, u, map) = invariance_tables(phi, source, target, cfg)?;
    Ok(compare_tables(&t, &u, &map))
}

/// The two tables and the leaf renaming used by [`check_homotopy_invariance`].
pub fn invariance_tables(
    phi: &GraphMorphism,
    source: &FlowProblem,
    target: &FlowProblem,
    cfg: &SolverConfig,
) -> Result<(OperationTable, OperationTable, BTreeMap<String, String>), OpsError> {
    let g = source.graph();
    let h = target.graph();
    if **phi.source() != *g || **phi.target() != *h {
        return Err(OpsError::ForeignMorphism);
    }
    if source.manifold() != target.manifold() {
        return Err(OpsError::IncompatibleLabels("different manifolds".into()));
    }
    for e in 0..g.edge_count() {
        if let EdgeImage::Edge(f) = phi.map_edge(e) {
            if source.function(e) != target.function(f) {
                return Err(OpsError::IncompatibleLabels(format!(
                    "edge `{}` and its image `{}` carry different functions",
                    g.edge(e).id,
                    h.edge(f).id
                )));
            }
        }
    }
    let map: BTreeMap<String, String> = (0..g.vertex_count())
        .filter(|&v| g.is_leaf(v))
        .map(|v| (g.vertex(v).id.clone(), h.vertex(phi.map_vertex(v)).id.clone()))
        .collect();
    let t = build_operation_table(source, cfg);
    let u = build_operation_table(target, cfg);
    Ok((t, u, map))
}

/// Result of a gluing check.
#[derive(Clone, Debug, PartialEq)]
pub struct GluingReport {
    pub comparison: ComparisonReport,
    pub composite: OperationTable,
    pub glued: OperationTable,
}

/// Builds the glued problem: `g1` keeps its ids, `g2` is renamed as by
/// [`glue`], and every edge keeps its length and function.
pub fn glue_problems(
    p1: &FlowProblem,
    p2: &FlowProblem,
    matching: &[(String, String)],
) -> Result<FlowProblem, OpsError> {
    let g1 = p1.graph();
    let g2 = p2.graph();
    for (o, i) in matching {
        let e1 = g1.vertex_idx(o).and_then(|v| g1.leaf_edge(v));
        let e2 = g2.vertex_idx(i).and_then(|v| g2.leaf_edge(v));
        if let (Some(e1), Some(e2)) = (e1, e2) {
            if p1.function(e1) != p2.function(e2) {
                return Err(OpsError::BasisMismatch {
                    out_leaf: o.clone(),
                    in_leaf: i.clone(),
                });
            }
        }
    }
    let gl = glue(g1, g2, matching)?;
    let g = Arc::new(gl.graph.clone());
    let n = g.edge_count();
    let mut lengths = alloc::vec![0.0; n];
    let mut labels = alloc::vec![None; n];
    let mut functions = alloc::vec![None; n];
    for e in 0..g1.edge_count() {
        let k = g.edge_idx(&g1.edge(e).id).expect("g1 edge survives");
        lengths[k] = p1.structure().length(e);
        labels[k] = p1.structure().labels()[e].clone();
        functions[k] = Some(p1.function(e).clone());
    }
    for e in 0..g2.edge_count() {
        let id = gl.g2_edge(&g2.edge(e).id).expect("g2 edge survives");
        let k = g.edge_idx(id).expect("renamed edge");
        lengths[k] = p2.structure().length(e);
        labels[k] = p2.structure().labels()[e].clone();
        functions[k] = Some(p2.function(e).clone());
    }
    let ms = MetricStructure::with_parts(g, lengths, labels);
    let functions = functions.into_iter().map(|f| f.expect("every edge assigned")).collect();
    Ok(FlowProblem::with_functions(ms, functions, p1.tol().clone())?)
}

/// Contracts the matched slots: `Σ_b t₁(…→…, b) · t₂(b, …→…)` over F₂, with
/// `t₂`'s leaves renamed as in the glued graph.
pub fn compose_tables(
    t1: &OperationTable,
    t2: &OperationTable,
    matching: &[(String, String)],
    g2_rename: &BTreeMap<String, String>,
) -> OperationTable {
    let renamed = |l: &String| g2_rename.get(l).cloned().unwrap_or_else(|| l.clone());
    let matched_out: Vec<&String> = matching.iter().map(|(o, _)| o).collect();
    let matched_in: Vec<&String> = matching.iter().map(|(_, i)| i).collect();
    let mut incoming: Vec<String> = t1.incoming.clone();
    incoming.extend(t2.incoming.iter().filter(|l| !matched_in.contains(l)).map(renamed));
    incoming.sort();
    let mut outgoing: Vec<String> = t1.outgoing.iter().filter(|l| !matched_out.contains(l)).cloned().collect();
    outgoing.extend(t2.outgoing.iter().map(renamed));
    outgoing.sort();
    let mut basis = BTreeMap::new();
    for (l, b) in &t1.basis {
        if !matched_out.contains(&l) {
            basis.insert(l.clone(), b.clone());
        }
    }
    for (l, b) in &t2.basis {
        if !matched_in.contains(&l) {
            basis.insert(renamed(l), b.clone());
        }
    }
    // accumulate over F2, with status tracking for skipped summands
    let mut acc: BTreeMap<BTreeMap<String, String>, (u8, bool)> = BTreeMap::new();
    for e1 in &t1.entries {
        let a1 = t1.assignment(e1);
        for e2 in &t2.entries {
            let a2 = t2.assignment(e2);
            if !matching.iter().all(|(o, i)| a1.get(o) == a2.get(i)) {
                continue;
            }
            let mut key: BTreeMap<String, String> = a1
                .iter()
                .filter(|(l, _)| !matched_out.contains(l))
                .map(|(l, c)| (l.clone(), c.clone()))
                .collect();
            key.extend(
                a2.iter()
                    .filter(|(l, _)| !matched_in.contains(l))
                    .map(|(l, c)| (renamed(l), c.clone())),
            );
            let slot = acc.entry(key).or_insert((0, true));
            match (e1.count_mod2(), e2.count_mod2()) {
                (Some(x), Some(y)) => slot.0 ^= x & y,
                _ => slot.1 = false,
            }
        }
    }
    let index_of = |l: &String, c: &String| {
        basis[l].iter().find(|(id, _)| id == c).map(|(_, i)| *i).expect("basis element")
    };
    let entries = acc
        .into_iter()
        .map(|(a, (v, ok))| {
            let inputs: Vec<String> = incoming.iter().map(|l| a[l].clone()).collect();
            let outputs: Vec<String> = outgoing.iter().map(|l| a[l].clone()).collect();
            TableEntry {
                in_indices: incoming.iter().zip(&inputs).map(|(l, c)| index_of(l, c)).collect(),
                out_indices: outgoing.iter().zip(&outputs).map(|(l, c)| index_of(l, c)).collect(),
                inputs,
                outputs,
                expdim: 0,
                count: ok.then_some(v as usize),
                status: if ok {
                    EntryStatus::Ok
                } else {
                    EntryStatus::Failed("composite of a skipped entry".into())
                },
            }
        })
        .collect();
    OperationTable {
        incoming,
        outgoing,
        basis,
        entries,
        d: t1.d,
    }
}

/// Compares the composite of the two tables with the table of the glued graph.
pub fn check_gluing(
    p1: &FlowProblem,
    p2: &FlowProblem,
    matching: &[(String, String)],
    cfg: &SolverConfig,
) -> Result<GluingReport, OpsError> {
    let glued_problem = glue_problems(p1, p2, matching)?;
    let gl = glue(p1.graph(), p2.graph(), matching)?;
    let t1 = build_operation_table(p1, cfg);
    let t2 = build_operation_table(p2, cfg);
    let composite = compose_tables(&t1, &t2, matching, &gl.g2_vertices);
    let glued = build_operation_table(&glued_problem, cfg);
    let comparison = compare_tables(&composite, &glued, &BTreeMap::new());
    Ok(GluingReport {
        comparison,
        composite,
        glued,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: &[i64], o: &[i64], chi: i64, d: i64) -> DimensionQuery {
        DimensionQuery {
            in_indices: i.to_vec(),
            out_indices: o.to_vec(),
            chi,
            d,
        }
    }

    #[test]
    fn loopspace_formula() {
        assert_eq!(expected_dimension_loopspace(&q(&[2], &[2], -1, 2)), -2);
        assert_eq!(expected_dimension_loopspace(&q(&[1, 1], &[2], -1, 2)), -2);
        for d in 1..5 {
            assert_eq!(expected_dimension_loopspace(&q(&[d], &[], 1, d)), 2 * d);
        }
    }

    #[test]
    fn finite_formula() {
        assert_eq!(expected_dimension_finite(&q(&[1, 1], &[0], 1, 2), 2), 0);
        assert_eq!(expected_dimension_finite(&q(&[2], &[], 0, 2), 1), 0);
        assert_eq!(expected_dimension_finite(&q(&[], &[], 1, 2), 0), 2);
        assert!(q(&[3], &[], 1, 2).validate().is_err());
    }

    use crate::graph::shapes;
    use crate::metric::assign_labels;
    use crate::morse::BackendConfig;
    use core::f64::consts::PI;

    fn torus_cfg() -> BackendConfig {
        let amp = format!("{}", 1.0 / (4.0 * PI * PI));
        let mut e: Vec<(String, String)> = alloc::vec![
            ("manifold".into(), "torus".into()),
            ("function".into(), "cos".into()),
            ("param.amp".into(), amp.clone()),
        ];
        for (l, sx, sy) in [("f1", "0.1", "0.2"), ("f2", "0.3", "0.05"), ("f3", "0.15", "0.35")] {
            e.push((format!("label.{l}"), "cos".into()));
            e.push((format!("label.{l}.param.amp"), amp.clone()));
            e.push((format!("label.{l}.param.shift_x"), sx.into()));
            e.push((format!("label.{l}.param.shift_y"), sy.into()));
        }
        BackendConfig::from_entries(e.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap()
    }

    fn problem(g: OrientedGraph, labels: &[(&str, &str)]) -> FlowProblem {
        let cfg = torus_cfg();
        let ms = MetricStructure::unit(Arc::new(g));
        let ms = assign_labels(&ms, labels.iter().copied(), |k| cfg.is_known_label(k)).unwrap();
        FlowProblem::new(ms, &cfg).unwrap()
    }

    fn assignment(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect()
    }

    #[test]
    fn y_table_is_intersection_product() {
        let p = problem(shapes::y_merge(), &[("a1", "f1"), ("a2", "f2"), ("b", "f3")]);
        let t = build_operation_table(&p, &SolverConfig::default());
        assert!(!t.is_partial(), "{:?}", t.rows());
        assert!(t.entries.iter().all(|e| e.expdim == 0));
        assert!(t.entries.iter().all(|e| e.in_indices.iter().sum::<usize>() == 2 + e.out_indices[0]));
        let count = |pairs: &[(&str, &str)]| t.entry(&assignment(pairs)).and_then(|e| e.count_mod2());
        assert_eq!(count(&[("i1", "c1.0"), ("i2", "c1.1"), ("o", "c0.0")]), Some(1));
        assert_eq!(count(&[("i1", "c1.0"), ("i2", "c1.0"), ("o", "c0.0")]), Some(0));
        assert_eq!(count(&[("i1", "c2.0"), ("i2", "c0.0"), ("o", "c0.0")]), Some(1));
        assert_eq!(count(&[("i1", "c2.0"), ("i2", "c2.0"), ("o", "c2.0")]), Some(1));
        assert_eq!(count(&[("i1", "c2.0"), ("i2", "c1.0"), ("o", "c1.0")]), Some(1));
        assert_eq!(count(&[("i1", "c2.0"), ("i2", "c1.0"), ("o", "c1.1")]), Some(0));
        assert_eq!(t.rows()[0].len(), TABLE_COLUMNS.len());
    }

    #[test]
    fn gluing_a_path_onto_the_output() {
        let p1 = problem(shapes::y_merge(), &[("a1", "f1"), ("a2", "f2"), ("b", "f3")]);
        let p2 = problem(shapes::path(), &[("a", "f3"), ("b", "f1")]);
        let m = alloc::vec![("o".to_string(), "i".to_string())];
        let rep = check_gluing(&p1, &p2, &m, &SolverConfig::default()).unwrap();
        assert!(rep.comparison.compared > 0);
        assert!(rep.comparison.agrees(), "{:?}", rep.comparison.mismatches);
        let bad = alloc::vec![("o".to_string(), "i".to_string())];
        let p3 = problem(shapes::path(), &[("a", "f2"), ("b", "f1")]);
        assert!(matches!(check_gluing(&p1, &p3, &bad, &SolverConfig::default()), Err(OpsError::BasisMismatch { .. })));
    }
}

