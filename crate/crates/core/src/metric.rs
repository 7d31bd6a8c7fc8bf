//! Edge lengths and Morse-function labels on oriented graphs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{collapse_edges, validate_morphism, EdgeImage, GraphError, GraphMorphism, OrientedGraph};

/// Length given to leaf edges when none is specified. Leaf edges are
/// half-infinite for the solver; this only sets where their values are probed.
pub const DEFAULT_LEAF_LENGTH: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MetricError {
    #[error("nonpositive length {length} on edge `{edge}`")]
    NonpositiveLength { edge: String, length: f64 },
    #[error("no length for edge `{0}`")]
    MissingLength(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("labels not distinct at vertex `{vertex}` (label `{label}`)")]
    LabelsNotDistinct { vertex: String, label: String },
    #[error("unknown catalog key `{0}`")]
    UnknownLabel(String),
    #[error("edge `{0}` has no label")]
    MissingLabel(String),
    #[error("simplex coordinates invalid: {0}")]
    BadSimplex(String),
    #[error("chain is not composable: {0}")]
    NotComposable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Lengths and labels on the edges of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricStructure {
    graph: Arc<OrientedGraph>,
    lengths: Vec<f64>,
    labels: Vec<Option<String>>,
}

impl MetricStructure {
    /// All lengths must be positive; leaf edges may be given any positive value.
    pub fn new(graph: Arc<OrientedGraph>, lengths: Vec<f64>) -> Result<Self, MetricError> {
        if lengths.len() != graph.edge_count() {
            return Err(MetricError::BadSimplex(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.edge_count()
            )));
        }
        for (e, &l) in lengths.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(MetricError::NonpositiveLength {
                    edge: graph.edge(e).id.clone(),
                    length: l,
                });
            }
        }
        let n = graph.edge_count();
        Ok(MetricStructure {
            graph,
            lengths,
            labels: alloc::vec![None; n],
        })
    }

    /// Lengths by edge id; leaf edges default to [`DEFAULT_LEAF_LENGTH`].
    pub fn from_lengths<'a>(
        graph: Arc<OrientedGraph>,
        lengths: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self, MetricError> {
        let mut out = alloc::vec![None; graph.edge_count()];
        for (id, l) in lengths {
            let e = graph
                .edge_idx(id)
                .ok_or_else(|| MetricError::UnknownEdge(id.to_string()))?;
            out[e] = Some(l);
        }
        let lengths = out
            .into_iter()
            .enumerate()
            .map(|(e, l)| match l {
                Some(l) => Ok(l),
                None if graph.is_leaf_edge(e) => Ok(DEFAULT_LEAF_LENGTH),
                None => Err(MetricError::MissingLength(graph.edge(e).id.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(graph, lengths)
    }

    /// Every edge gets length 1.
    pub fn unit(graph: Arc<OrientedGraph>) -> Self {
        let n = graph.edge_count();
        Self::new(graph, alloc::vec![1.0; n]).expect("unit lengths are positive")
    }

    pub fn graph(&self) -> &Arc<OrientedGraph> {
        &self.graph
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> Option<&str> {
        self.labels[e].as_deref()
    }

    /// Leaf edges are treated as half-infinite by the solver.
    pub fn is_half_infinite(&self, e: usize) -> bool {
        self.graph.is_leaf_edge(e)
    }

    /// Labels for every edge, or the first unlabeled edge.
    pub fn require_labels(&self) -> Result<Vec<&str>, MetricError> {
        self.labels
            .iter()
            .enumerate()
            .map(|(e, l)| {
                l.as_deref()
                    .ok_or_else(|| MetricError::MissingLabel(self.graph.edge(e).id.clone()))
            })
            .collect()
    }

    /// Same structure with lengths and labels replaced, for internal rewiring.
    pub(crate) fn with_parts(
        graph: Arc<OrientedGraph>,
        lengths: Vec<f64>,
        labels: Vec<Option<String>>,
    ) -> Self {
        MetricStructure {
            graph,
            lengths,
            labels,
        }
    }
}

/// Installs labels and checks that edges meeting at a vertex of valence at
/// least three carry pairwise distinct labels. Bivalent vertices are exempt:
/// they only subdivide an edge, and gluing produces them with equal labels.
pub fn assign_labels<'a>(
    ms: &MetricStructure,
    assignment: impl IntoIterator<Item = (&'a str, &'a str)>,
    is_known: impl Fn(&str) -> bool,
) -> Result<MetricStructure, MetricError> {
    let g = &ms.graph;
    let mut labels = ms.labels.clone();
    for (edge, key) in assignment {
        let e = g
            .edge_idx(edge)
            .ok_or_else(|| MetricError::UnknownEdge(edge.to_string()))?;
        if !is_known(key) {
            return Err(MetricError::UnknownLabel(key.to_string()));
        }
        labels[e] = Some(key.to_string());
    }
    check_label_distinctness(g, &labels)?;
    Ok(MetricStructure {
        graph: g.clone(),
        lengths: ms.lengths.clone(),
        labels,
    })
}

pub fn check_label_distinctness(
    g: &OrientedGraph,
    labels: &[Option<String>],
) -> Result<(), MetricError> {
    for v in 0..g.vertex_count() {
        if g.valence(v) < 3 {
            continue;
        }
        let mut edges: Vec<usize> = g.incident_edges(v).to_vec();
        edges.dedup();
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for &e in &edges {
            if let Some(l) = labels[e].as_deref() {
                if seen.insert(l, e).is_some() {
                    return Err(MetricError::LabelsNotDistinct {
                        vertex: g.vertex(v).id.clone(),
                        label: l.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// A point `(t_0..t_k)` of the simplex over a chain
/// `Γ_k -> Γ_{k-1} -> ... -> Γ_0`. `chain[j]` maps `Γ_{k-j}` to `Γ_{k-j-1}`.
#[derive(Clone, Debug)]
pub struct SimplexPoint {
    t: Vec<f64>,
    graph: Arc<OrientedGraph>,
    chain: Vec<GraphMorphism>,
}

impl SimplexPoint {
    pub fn new(
        t: Vec<f64>,
        graph: Arc<OrientedGraph>,
        chain: Vec<GraphMorphism>,
    ) -> Result<Self, MetricError> {
        if t.len() != chain.len() + 1 {
            return Err(MetricError::BadSimplex(format!(
                "{} coordinates for a chain of {} morphisms",
                t.len(),
                chain.len()
            )));
        }
        if t.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(MetricError::BadSimplex("coordinates must be nonnegative".into()));
        }
        let sum: f64 = t.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MetricError::BadSimplex(format!("coordinates sum to {sum}")));
        }
        let mut cur = graph.clone();
        for (j, m) in chain.iter().enumerate() {
            if **m.source() != *cur {
                return Err(MetricError::NotComposable(format!(
                    "morphism {j} does not start where the previous one ends"
                )));
            }
            if let Err(v) = validate_morphism(m) {
                return Err(MetricError::NotComposable(format!(
                    "morphism {j} is invalid: {}",
                    v[0]
                )));
            }
            cur = m.target().clone();
        }
        Ok(SimplexPoint { t, graph, chain })
    }

    /// Builds from a chain alone; the graph is the first morphism's source.
    pub fn from_chain(t: Vec<f64>, chain: Vec<GraphMorphism>) -> Result<Self, MetricError> {
        let graph = chain
            .first()
            .map(|m| m.source().clone())
            .ok_or_else(|| MetricError::BadSimplex("empty chain needs an explicit graph".into()))?;
        Self::new(t, graph, chain)
    }

    pub fn k(&self) -> usize {
        self.chain.len()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn graph(&self) -> &Arc<OrientedGraph> {
        &self.graph
    }

    pub fn chain(&self) -> &[GraphMorphism] {
        &self.chain
    }

    /// `λ_i(E)`: 1 when edge `E` of `Γ_k` still maps to an edge of `Γ_i`.
    pub fn lambda(&self, i: usize, e: usize) -> bool {
        let k = self.k();
        let mut img = EdgeImage::Edge(e);
        for m in &self.chain[..k - i] {
            img = match img {
                EdgeImage::Edge(x) => m.map_edge(x),
                EdgeImage::Collapsed => return false,
            };
        }
        matches!(img, EdgeImage::Edge(_))
    }
}

/// Metric induced by a simplex point. Zero-length edges are listed separately;
/// [`SimplexMetric::into_structure`] collapses them.
#[derive(Clone, Debug)]
pub struct SimplexMetric {
    pub graph: Arc<OrientedGraph>,
    pub lengths: Vec<f64>,
    pub zero_length: Vec<usize>,
}

/// `ℓ(E) = Σ t_i λ_i(E)` over the edges of `Γ_k`.
pub fn simplex_metric(p: &SimplexPoint) -> SimplexMetric {
    let g = p.graph.clone();
    let lengths: Vec<f64> = (0..g.edge_count())
        .map(|e| {
            (0..=p.k())
                .filter(|&i| p.lambda(i, e))
                .map(|i| p.t[i])
                .sum()
        })
        .collect();
    let zero_length = (0..g.edge_count()).filter(|&e| lengths[e] == 0.0).collect();
    SimplexMetric {
        graph: g,
        lengths,
        zero_length,
    }
}

impl SimplexMetric {
    /// Collapses zero-length edges and returns the collapse map together with
    /// the metric structure on its target.
    pub fn into_structure(self) -> Result<(GraphMorphism, MetricStructure), MetricError> {
        let ids: Vec<&str> = self
            .zero_length
            .iter()
            .map(|&e| self.graph.edge(e).id.as_str())
            .collect();
        let m = collapse_edges(&self.graph, &ids)?;
        let target = m.target().clone();
        let mut lengths = alloc::vec![0.0; target.edge_count()];
        for (e, img) in m.edge_map().iter().enumerate() {
            if let EdgeImage::Edge(t) = img {
                lengths[*t] = self.lengths[e];
            }
        }
        let ms = MetricStructure::new(target, lengths)?;
        Ok((m, ms))
    }
}
