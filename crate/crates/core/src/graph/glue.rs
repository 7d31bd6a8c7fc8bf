use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{GraphBuilder, GraphError, LeafKind, OrientedGraph};

/// Pairs `(outgoing leaf of g1, incoming leaf of g2)`.
pub type LeafMatching = Vec<(String, String)>;

/// Result of gluing: the new graph plus the renaming applied to `g2`.
/// `g1` keeps all its ids; each glued pair becomes one bivalent vertex
/// carrying the id of the `g1` leaf.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub graph: OrientedGraph,
    pub g2_vertices: BTreeMap<String, String>,
    pub g2_edges: BTreeMap<String, String>,
}

/// Identifies the matched outgoing leaves of `g1` with incoming leaves of `g2`.
/// Unmatched leaves stay leaves of the result.
pub fn glue(
    g1: &OrientedGraph,
    g2: &OrientedGraph,
    matching: &[(String, String)],
) -> Result<Gluing, GraphError> {
    if matching.is_empty() {
        return Err(GraphError::ArityMismatch("gluing requires q >= 1".into()));
    }
    let outs: BTreeSet<&str> = g1
        .outgoing_leaves()
        .into_iter()
        .map(|v| g1.vertex(v).id.as_str())
        .collect();
    let ins: BTreeSet<&str> = g2
        .incoming_leaves()
        .into_iter()
        .map(|v| g2.vertex(v).id.as_str())
        .collect();
    if matching.len() > outs.len() || matching.len() > ins.len() {
        return Err(GraphError::ArityMismatch(format!(
            "q={} but g1 has {} outgoing and g2 has {} incoming leaves",
            matching.len(),
            outs.len(),
            ins.len()
        )));
    }
    let mut used1 = BTreeSet::new();
    let mut used2 = BTreeSet::new();
    for (a, b) in matching {
        if !outs.contains(a.as_str()) {
            return Err(GraphError::NotABijection(format!(
                "`{a}` is not an outgoing leaf of the first graph"
            )));
        }
        if !ins.contains(b.as_str()) {
            return Err(GraphError::NotABijection(format!(
                "`{b}` is not an incoming leaf of the second graph"
            )));
        }
        if !used1.insert(a.as_str()) || !used2.insert(b.as_str()) {
            return Err(GraphError::NotABijection(format!(
                "leaf used twice in pair ({a}, {b})"
            )));
        }
    }

    let taken_v: BTreeSet<String> = g1.vertices().iter().map(|v| v.id.clone()).collect();
    let taken_e: BTreeSet<String> = g1.edges().iter().map(|e| e.id.clone()).collect();
    let fresh = |id: &str, taken: &BTreeSet<String>, extra: &BTreeSet<String>| {
        let mut name = id.to_string();
        while taken.contains(&name) || extra.contains(&name) {
            name.push('\'');
        }
        name
    };

    let glued_to: BTreeMap<&str, &str> = matching
        .iter()
        .map(|(a, b)| (b.as_str(), a.as_str()))
        .collect();
    let mut g2_vertices = BTreeMap::new();
    let mut new_v = BTreeSet::new();
    for v in g2.vertices() {
        let name = match glued_to.get(v.id.as_str()) {
            Some(a) => a.to_string(),
            None => fresh(&v.id, &taken_v, &new_v),
        };
        new_v.insert(name.clone());
        g2_vertices.insert(v.id.clone(), name);
    }
    let mut g2_edges = BTreeMap::new();
    let mut new_e = BTreeSet::new();
    for e in g2.edges() {
        let name = fresh(&e.id, &taken_e, &new_e);
        new_e.insert(name.clone());
        g2_edges.insert(e.id.clone(), name);
    }

    let mut b = GraphBuilder::default();
    for v in g1.vertices() {
        b.add_vertex(v.id.clone());
        if let Some(kind) = v.leaf {
            if !(kind == LeafKind::Outgoing && used1.contains(v.id.as_str())) {
                b.add_leaf(v.id.clone(), kind);
            }
        }
    }
    for v in g2.vertices() {
        if glued_to.contains_key(v.id.as_str()) {
            continue;
        }
        let name = g2_vertices[&v.id].clone();
        b.add_vertex(name.clone());
        if let Some(kind) = v.leaf {
            b.add_leaf(name, kind);
        }
    }
    b.add_basepoint(g1.basepoint_id());
    for e in g1.edges() {
        b.add_edge(
            e.id.clone(),
            g1.vertex(e.src).id.clone(),
            g1.vertex(e.dst).id.clone(),
        );
    }
    for e in g2.edges() {
        b.add_edge(
            g2_edges[&e.id].clone(),
            g2_vertices[&g2.vertex(e.src).id].clone(),
            g2_vertices[&g2.vertex(e.dst).id].clone(),
        );
    }
    Ok(Gluing {
        graph: b.build()?,
        g2_vertices,
        g2_edges,
    })
}

impl Gluing {
    /// Image in the glued graph of an edge id of `g2`.
    pub fn g2_edge(&self, id: &str) -> Option<&str> {
        self.g2_edges.get(id).map(String::as_str)
    }

    pub fn g2_vertex(&self, id: &str) -> Option<&str> {
        self.g2_vertices.get(id).map(String::as_str)
    }
}

/// `(out-leaf, in-leaf)` pairs as owned strings.
pub fn matching_from<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> LeafMatching {
    pairs
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect::<Vec<_>>()
}
