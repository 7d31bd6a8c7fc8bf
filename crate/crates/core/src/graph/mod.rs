//! Oriented graphs with a basepoint and incoming/outgoing leaves.
//!
//! Vertex and edge ids are opaque strings. Internally every graph keeps its
//! vertices and edges sorted by id, so index order is the canonical
//! (lexicographic) order used everywhere else in the crate.

mod automorphism;
mod glue;
mod morphism;

pub use automorphism::{compute_automorphisms, AutomorphismGroup};
pub use glue::{glue, matching_from, Gluing, LeafMatching};
pub(crate) use morphism::UnionFind;
pub use morphism::{
    collapse_edges, validate_morphism, EdgeImage, GraphMorphism, MorphismClause, Violation,
};

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Role of a univalent vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeafKind {
    /// The leaf edge points away from the leaf, into the body of the graph.
    Incoming,
    /// The leaf edge points toward the leaf.
    Outgoing,
}

impl fmt::Display for LeafKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeafKind::Incoming => f.write_str("in"),
            LeafKind::Outgoing => f.write_str("out"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("unknown vertex `{0}`")]
    NoSuchVertex(String),
    #[error("unknown edge `{0}`")]
    NoSuchEdge(String),
    #[error("no valid basepoint: every vertex is univalent or isolated")]
    NoValidBasepoint,
    #[error("missing basepoint")]
    MissingBasepoint,
    #[error("more than one basepoint (`{0}` and `{1}`)")]
    MultipleBasepoints(String, String),
    #[error("basepoint is univalent (`{0}`)")]
    BasepointUnivalent(String),
    #[error("leaf `{0}` is not univalent")]
    LeafNotUnivalent(String),
    #[error("univalent vertex `{0}` is not declared as a leaf")]
    UndeclaredLeaf(String),
    #[error("leaf `{leaf}` declared {kind} but its edge `{edge}` points the other way")]
    LeafOrientation {
        leaf: String,
        kind: LeafKind,
        edge: String,
    },
    #[error("vertex `{0}` is declared as a leaf twice")]
    DuplicateLeaf(String),
    #[error("graph is disconnected (vertex `{0}` unreachable from the basepoint)")]
    Disconnected(String),
    #[error("gluing arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("leaf matching is not a bijection: {0}")]
    NotABijection(String),
    #[error("cannot collapse edges: {0}")]
    InvalidCollapse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub leaf: Option<LeafKind>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }

    /// The endpoint opposite to `v` (for a loop, `v` itself).
    pub fn other_end(&self, v: usize) -> usize {
        if self.src == v {
            self.dst
        } else {
            self.src
        }
    }
}

/// A connected oriented multigraph with a non-univalent basepoint and
/// labelled leaves. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    basepoint: usize,
    vertex_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    incident: Vec<Vec<usize>>,
}

impl OrientedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn basepoint_id(&self) -> &str {
        &self.vertices[self.basepoint].id
    }

    pub fn vertex(&self, idx: usize) -> &Vertex {
        &self.vertices[idx]
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn vertex_idx(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_idx(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<&Edge> {
        self.edge_idx(id).map(|i| &self.edges[i])
    }

    /// Edge indices incident to `v`; a loop appears twice.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.vertices[v].leaf.is_some()
    }

    /// Leaf vertex indices of one kind, in id order.
    pub fn leaves(&self, kind: LeafKind) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].leaf == Some(kind))
            .collect()
    }

    pub fn incoming_leaves(&self) -> Vec<usize> {
        self.leaves(LeafKind::Incoming)
    }

    pub fn outgoing_leaves(&self) -> Vec<usize> {
        self.leaves(LeafKind::Outgoing)
    }

    /// The unique edge at a leaf vertex.
    pub fn leaf_edge(&self, leaf: usize) -> Option<usize> {
        if self.is_leaf(leaf) {
            self.incident[leaf].first().copied()
        } else {
            None
        }
    }

    /// Whether an edge touches a leaf vertex.
    pub fn is_leaf_edge(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        self.is_leaf(edge.src) || self.is_leaf(edge.dst)
    }

    /// The non-leaf endpoint of a leaf edge.
    pub fn leaf_body_vertex(&self, leaf: usize) -> Option<usize> {
        self.leaf_edge(leaf).map(|e| self.edges[e].other_end(leaf))
    }

    /// Betti number and Euler characteristic.
    pub fn betti_and_euler(&self) -> (usize, i64) {
        betti_and_euler(self)
    }

    /// Returns a copy with every vertex and edge id passed through `rename`.
    pub fn relabeled(
        &self,
        vertex_name: impl Fn(&str) -> String,
        edge_name: impl Fn(&str) -> String,
    ) -> Result<OrientedGraph, GraphError> {
        let mut b = GraphBuilder::default();
        for v in &self.vertices {
            b = b.vertex(vertex_name(&v.id));
            if let Some(kind) = v.leaf {
                b = b.leaf(vertex_name(&v.id), kind);
            }
        }
        b = b.basepoint(vertex_name(self.basepoint_id()));
        for e in &self.edges {
            b = b.edge(
                edge_name(&e.id),
                vertex_name(&self.vertices[e.src].id),
                vertex_name(&self.vertices[e.dst].id),
            );
        }
        b.build()
    }
}

/// `chi = |V| - |E|`, `b1 = 1 - chi` for a connected graph.
pub fn betti_and_euler(g: &OrientedGraph) -> (usize, i64) {
    let chi = g.vertex_count() as i64 - g.edge_count() as i64;
    let b1 = 1 - chi;
    debug_assert!(b1 >= 0);
    (b1 as usize, chi)
}

/// Accumulates declarations in any order and validates them in [`GraphBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    basepoints: Vec<String>,
    leaves: Vec<(String, LeafKind)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: impl Into<String>) -> Self {
        self.vertices.push(id.into());
        self
    }

    pub fn basepoint(mut self, id: impl Into<String>) -> Self {
        self.basepoints.push(id.into());
        self
    }

    pub fn edge(
        mut self,
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
    ) -> Self {
        self.edges.push((id.into(), src.into(), dst.into()));
        self
    }

    pub fn leaf(mut self, id: impl Into<String>, kind: LeafKind) -> Self {
        self.leaves.push((id.into(), kind));
        self
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) {
        self.vertices.push(id.into());
    }

    pub fn add_basepoint(&mut self, id: impl Into<String>) {
        self.basepoints.push(id.into());
    }

    pub fn add_edge(&mut self, id: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) {
        self.edges.push((id.into(), src.into(), dst.into()));
    }

    pub fn add_leaf(&mut self, id: impl Into<String>, kind: LeafKind) {
        self.leaves.push((id.into(), kind));
    }

    pub fn build(self) -> Result<OrientedGraph, GraphError> {
        let mut ids: BTreeSet<String> = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        if ids.is_empty() {
            return Err(GraphError::Empty);
        }
        let vertex_index: BTreeMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

        let mut leaf_of: BTreeMap<usize, LeafKind> = BTreeMap::new();
        for (id, kind) in &self.leaves {
            let v = *vertex_index
                .get(id)
                .ok_or_else(|| GraphError::NoSuchVertex(id.clone()))?;
            if leaf_of.insert(v, *kind).is_some() {
                return Err(GraphError::DuplicateLeaf(id.clone()));
            }
        }
        let vertices: Vec<Vertex> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| Vertex {
                id: id.clone(),
                leaf: leaf_of.get(&i).copied(),
            })
            .collect();

        let mut sorted_edges = self.edges.clone();
        sorted_edges.sort_by(|a, b| a.0.cmp(&b.0));
        let mut edges = Vec::with_capacity(sorted_edges.len());
        let mut edge_index = BTreeMap::new();
        for (id, s, d) in sorted_edges {
            let lookup = |name: &String| {
                vertex_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownVertex {
                        edge: id.clone(),
                        vertex: name.clone(),
                    })
            };
            let src = lookup(&s)?;
            let dst = lookup(&d)?;
            if edge_index.insert(id.clone(), edges.len()).is_some() {
                return Err(GraphError::DuplicateEdge(id));
            }
            edges.push(Edge { id, src, dst });
        }

        let mut incident = alloc::vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incident[e.src].push(i);
            incident[e.dst].push(i);
        }

        if !incident.iter().any(|inc| inc.len() >= 2) {
            return Err(GraphError::NoValidBasepoint);
        }
        let basepoint = match self.basepoints.as_slice() {
            [] => return Err(GraphError::MissingBasepoint),
            [one] => *vertex_index
                .get(one)
                .ok_or_else(|| GraphError::NoSuchVertex(one.clone()))?,
            [a, b, ..] => return Err(GraphError::MultipleBasepoints(a.clone(), b.clone())),
        };
        if incident[basepoint].len() < 2 {
            return Err(GraphError::BasepointUnivalent(vertices[basepoint].id.clone()));
        }

        for (v, vert) in vertices.iter().enumerate() {
            let valence = incident[v].len();
            match vert.leaf {
                Some(kind) => {
                    if valence != 1 {
                        return Err(GraphError::LeafNotUnivalent(vert.id.clone()));
                    }
                    let e = &edges[incident[v][0]];
                    let ok = match kind {
                        LeafKind::Incoming => e.src == v,
                        LeafKind::Outgoing => e.dst == v,
                    };
                    if !ok {
                        return Err(GraphError::LeafOrientation {
                            leaf: vert.id.clone(),
                            kind,
                            edge: e.id.clone(),
                        });
                    }
                }
                None if valence == 1 => return Err(GraphError::UndeclaredLeaf(vert.id.clone())),
                None => {}
            }
        }

        // connectivity from the basepoint
        let mut seen = alloc::vec![false; vertices.len()];
        let mut queue = VecDeque::from([basepoint]);
        seen[basepoint] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &incident[v] {
                let w = edges[e].other_end(v);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(GraphError::Disconnected(vertices[v].id.clone()));
        }

        Ok(OrientedGraph {
            vertices,
            edges,
            basepoint,
            vertex_index,
            edge_index,
            incident,
        })
    }
}

impl fmt::Display for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            write!(f, "vertex {}", v.id)?;
            if v.id == self.basepoint_id() {
                f.write_str(" basepoint")?;
            }
            writeln!(f)?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {} {}",
                e.id, self.vertices[e.src].id, self.vertices[e.dst].id
            )?;
        }
        for v in &self.vertices {
            if let Some(kind) = v.leaf {
                writeln!(f, "leaf {} {}", v.id, kind)?;
            }
        }
        Ok(())
    }
}

/// Small graphs used throughout the tests and documentation.
pub mod shapes {
    use super::*;

    /// Trivalent basepoint `c` with one incoming and two outgoing leaves.
    pub fn y_graph() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("c")
            .basepoint("c")
            .vertex("l0")
            .vertex("l1")
            .vertex("l2")
            .edge("e0", "l0", "c")
            .edge("e1", "c", "l1")
            .edge("e2", "c", "l2")
            .leaf("l0", LeafKind::Incoming)
            .leaf("l1", LeafKind::Outgoing)
            .leaf("l2", LeafKind::Outgoing)
            .build()
            .expect("valid fixture")
    }

    /// Trivalent basepoint `c` with two incoming and one outgoing leaf.
    pub fn y_merge() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("c")
            .basepoint("c")
            .vertex("i1")
            .vertex("i2")
            .vertex("o")
            .edge("a1", "i1", "c")
            .edge("a2", "i2", "c")
            .edge("b", "c", "o")
            .leaf("i1", LeafKind::Incoming)
            .leaf("i2", LeafKind::Incoming)
            .leaf("o", LeafKind::Outgoing)
            .build()
            .expect("valid fixture")
    }

    pub fn figure_eight() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("v")
            .basepoint("v")
            .edge("A", "v", "v")
            .edge("B", "v", "v")
            .build()
            .expect("valid fixture")
    }

    /// Two parallel edges `A`, `B` from the basepoint `v0` to `v1`, plus an
    /// incoming leaf edge `C` at `v0`.
    pub fn lollipop() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("v0")
            .basepoint("v0")
            .vertex("v1")
            .vertex("l")
            .edge("A", "v0", "v1")
            .edge("B", "v0", "v1")
            .edge("C", "l", "v0")
            .leaf("l", LeafKind::Incoming)
            .build()
            .expect("valid fixture")
    }

    /// In-leaf, bivalent basepoint, out-leaf.
    pub fn path() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("i")
            .vertex("m")
            .basepoint("m")
            .vertex("o")
            .edge("a", "i", "m")
            .edge("b", "m", "o")
            .leaf("i", LeafKind::Incoming)
            .leaf("o", LeafKind::Outgoing)
            .build()
            .expect("valid fixture")
    }

    /// Three incoming leaves and one outgoing leaf on one vertex.
    pub fn star4() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("c")
            .basepoint("c")
            .vertex("i1")
            .vertex("i2")
            .vertex("i3")
            .vertex("o")
            .edge("a1", "i1", "c")
            .edge("a2", "i2", "c")
            .edge("a3", "i3", "c")
            .edge("b", "c", "o")
            .leaf("i1", LeafKind::Incoming)
            .leaf("i2", LeafKind::Incoming)
            .leaf("i3", LeafKind::Incoming)
            .leaf("o", LeafKind::Outgoing)
            .build()
            .expect("valid fixture")
    }

    /// Binary tree `((i1 i2) i3) -> o` with internal edge `m` from `c` to `d`.
    pub fn tree4_left() -> OrientedGraph {
        OrientedGraph::builder()
            .vertex("c")
            .basepoint("c")
            .vertex("d")
            .vertex("i1")
            .vertex("i2")
            .vertex("i3")
            .vertex("o")
            .edge("a1", "i1", "c")
            .edge("a2", "i2", "c")
            .edge("m", "c", "d")
            .edge("a3", "i3", "d")
            .edge("b", "d", "o")
            .leaf("i1", LeafKind::Incoming)
            .leaf("i2", LeafKind::Incoming)
            .leaf("i3", LeafKind::Incoming)
            .leaf("o", LeafKind::Outgoing)
            .build()
            .expect("valid fixture")
    }
}
