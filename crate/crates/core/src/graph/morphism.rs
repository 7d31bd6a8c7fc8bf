use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{GraphBuilder, GraphError, OrientedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeImage {
    Edge(usize),
    Collapsed,
}

/// Which defining property of a morphism failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MorphismClause {
    /// Edge images respect source/target, collapsed edges have both ends on one vertex.
    Orientation,
    Basepoint,
    /// Leaf vertices go to leaves of the same kind.
    Leaves,
    /// Preimage of every target vertex is a nonempty tree.
    VertexPreimage,
    /// Preimage of every open target edge is exactly one source edge.
    EdgePreimage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: MorphismClause,
    pub message: String,
    pub witnesses: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)?;
        if !self.witnesses.is_empty() {
            write!(f, " [{}]", self.witnesses.join(", "))?;
        }
        Ok(())
    }
}

/// A cellular map between oriented graphs, given by where each vertex goes
/// and whether each edge goes to an edge or collapses to a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    source: Arc<OrientedGraph>,
    target: Arc<OrientedGraph>,
    vertex_map: Vec<usize>,
    edge_map: Vec<EdgeImage>,
}

impl GraphMorphism {
    /// Builds a morphism from index maps without checking the morphism clauses.
    pub fn from_indices(
        source: Arc<OrientedGraph>,
        target: Arc<OrientedGraph>,
        vertex_map: Vec<usize>,
        edge_map: Vec<EdgeImage>,
    ) -> Result<Self, GraphError> {
        if vertex_map.len() != source.vertex_count() || edge_map.len() != source.edge_count() {
            return Err(GraphError::InvalidCollapse(
                "morphism maps do not cover the source graph".into(),
            ));
        }
        if let Some(&v) = vertex_map.iter().find(|&&v| v >= target.vertex_count()) {
            return Err(GraphError::NoSuchVertex(format!("#{v}")));
        }
        for img in &edge_map {
            if let EdgeImage::Edge(e) = img {
                if *e >= target.edge_count() {
                    return Err(GraphError::NoSuchEdge(format!("#{e}")));
                }
            }
        }
        Ok(GraphMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        })
    }

    /// Builds a morphism from id pairs. Every source vertex and edge must be listed;
    /// `None` as an edge image means the edge collapses.
    pub fn from_ids<'a>(
        source: Arc<OrientedGraph>,
        target: Arc<OrientedGraph>,
        vertices: impl IntoIterator<Item = (&'a str, &'a str)>,
        edges: impl IntoIterator<Item = (&'a str, Option<&'a str>)>,
    ) -> Result<Self, GraphError> {
        let mut vmap = alloc::vec![None; source.vertex_count()];
        for (s, t) in vertices {
            let si = source
                .vertex_idx(s)
                .ok_or_else(|| GraphError::NoSuchVertex(s.to_string()))?;
            let ti = target
                .vertex_idx(t)
                .ok_or_else(|| GraphError::NoSuchVertex(t.to_string()))?;
            vmap[si] = Some(ti);
        }
        let mut emap = alloc::vec![None; source.edge_count()];
        for (s, t) in edges {
            let si = source
                .edge_idx(s)
                .ok_or_else(|| GraphError::NoSuchEdge(s.to_string()))?;
            let img = match t {
                Some(t) => EdgeImage::Edge(
                    target
                        .edge_idx(t)
                        .ok_or_else(|| GraphError::NoSuchEdge(t.to_string()))?,
                ),
                None => EdgeImage::Collapsed,
            };
            emap[si] = Some(img);
        }
        let vertex_map = vmap
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| GraphError::NoSuchVertex(source.vertex(i).id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let edge_map = emap
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| GraphError::NoSuchEdge(source.edge(i).id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(source, target, vertex_map, edge_map)
    }

    pub fn identity(g: Arc<OrientedGraph>) -> Self {
        let vertex_map = (0..g.vertex_count()).collect();
        let edge_map = (0..g.edge_count()).map(EdgeImage::Edge).collect();
        GraphMorphism {
            source: g.clone(),
            target: g,
            vertex_map,
            edge_map,
        }
    }

    pub fn source(&self) -> &Arc<OrientedGraph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<OrientedGraph> {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[EdgeImage] {
        &self.edge_map
    }

    pub fn map_vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn map_edge(&self, e: usize) -> EdgeImage {
        self.edge_map[e]
    }

    /// Source edges sent to collapsed cells.
    pub fn collapsed_edges(&self) -> Vec<usize> {
        (0..self.edge_map.len())
            .filter(|&e| self.edge_map[e] == EdgeImage::Collapsed)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
            && self
                .edge_map
                .iter()
                .enumerate()
                .all(|(i, &e)| e == EdgeImage::Edge(i))
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &GraphMorphism) -> Result<GraphMorphism, GraphError> {
        if *self.target != *other.source {
            return Err(GraphError::InvalidCollapse(
                "morphisms are not composable".into(),
            ));
        }
        let vertex_map = self.vertex_map.iter().map(|&v| other.vertex_map[v]).collect();
        let edge_map = self
            .edge_map
            .iter()
            .map(|img| match img {
                EdgeImage::Edge(e) => other.edge_map[*e],
                EdgeImage::Collapsed => EdgeImage::Collapsed,
            })
            .collect();
        Ok(GraphMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            vertex_map,
            edge_map,
        })
    }

    /// Inverse of a bijective endomorphism or isomorphism.
    pub fn inverse(&self) -> Option<GraphMorphism> {
        let mut vinv = alloc::vec![usize::MAX; self.target.vertex_count()];
        for (s, &t) in self.vertex_map.iter().enumerate() {
            if vinv[t] != usize::MAX {
                return None;
            }
            vinv[t] = s;
        }
        let mut einv = alloc::vec![None; self.target.edge_count()];
        for (s, img) in self.edge_map.iter().enumerate() {
            match img {
                EdgeImage::Edge(t) if einv[*t].is_none() => einv[*t] = Some(EdgeImage::Edge(s)),
                _ => return None,
            }
        }
        if vinv.contains(&usize::MAX) {
            return None;
        }
        Some(GraphMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            vertex_map: vinv,
            edge_map: einv.into_iter().collect::<Option<Vec<_>>>()?,
        })
    }

    /// Vertex map as id pairs.
    pub fn vertex_pairs(&self) -> Vec<(String, String)> {
        self.vertex_map
            .iter()
            .enumerate()
            .map(|(s, &t)| {
                (
                    self.source.vertex(s).id.clone(),
                    self.target.vertex(t).id.clone(),
                )
            })
            .collect()
    }

    /// Edge map as id pairs; `None` for collapsed edges.
    pub fn edge_pairs(&self) -> Vec<(String, Option<String>)> {
        self.edge_map
            .iter()
            .enumerate()
            .map(|(s, img)| {
                (
                    self.source.edge(s).id.clone(),
                    match img {
                        EdgeImage::Edge(t) => Some(self.target.edge(*t).id.clone()),
                        EdgeImage::Collapsed => None,
                    },
                )
            })
            .collect()
    }
}

impl fmt::Display for GraphMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, t) in self.vertex_pairs() {
            writeln!(f, "vmap {s} {t}")?;
        }
        for (s, t) in self.edge_pairs() {
            writeln!(f, "emap {s} {}", t.as_deref().unwrap_or("collapse"))?;
        }
        Ok(())
    }
}

/// Checks the morphism clauses and reports every failure found.
pub fn validate_morphism(m: &GraphMorphism) -> Result<(), Vec<Violation>> {
    let src = &*m.source;
    let tgt = &*m.target;
    let mut out = Vec::new();

    let mut bad_orient = Vec::new();
    let mut bad_collapse = Vec::new();
    for (i, e) in src.edges().iter().enumerate() {
        let (a, b) = (m.vertex_map[e.src], m.vertex_map[e.dst]);
        match m.edge_map[i] {
            EdgeImage::Edge(t) => {
                let te = tgt.edge(t);
                if te.src != a || te.dst != b {
                    bad_orient.push(e.id.clone());
                }
            }
            EdgeImage::Collapsed => {
                if a != b {
                    bad_collapse.push(e.id.clone());
                }
            }
        }
    }
    if !bad_orient.is_empty() {
        out.push(Violation {
            clause: MorphismClause::Orientation,
            message: "edge image does not preserve orientation".into(),
            witnesses: bad_orient,
        });
    }
    if !bad_collapse.is_empty() {
        out.push(Violation {
            clause: MorphismClause::Orientation,
            message: "collapsed edge endpoints map to different vertices".into(),
            witnesses: bad_collapse,
        });
    }

    if m.vertex_map[src.basepoint()] != tgt.basepoint() {
        out.push(Violation {
            clause: MorphismClause::Basepoint,
            message: "basepoint not preserved".into(),
            witnesses: alloc::vec![src.basepoint_id().to_string()],
        });
    }

    let mut bad_leaves = Vec::new();
    for (v, vert) in src.vertices().iter().enumerate() {
        if tgt.vertex(m.vertex_map[v]).leaf != vert.leaf {
            bad_leaves.push(vert.id.clone());
        }
    }
    if !bad_leaves.is_empty() {
        out.push(Violation {
            clause: MorphismClause::Leaves,
            message: "leaf labels not preserved".into(),
            witnesses: bad_leaves,
        });
    }

    // Vertex preimages: vertices over w plus the collapsed edges joining them.
    let mut over: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &w) in m.vertex_map.iter().enumerate() {
        over.entry(w).or_default().push(v);
    }
    let mut empty = Vec::new();
    let mut cyclic = Vec::new();
    let mut disconnected = Vec::new();
    for w in 0..tgt.vertex_count() {
        let Some(verts) = over.get(&w) else {
            empty.push(tgt.vertex(w).id.clone());
            continue;
        };
        let collapsed: Vec<usize> = (0..src.edge_count())
            .filter(|&e| {
                m.edge_map[e] == EdgeImage::Collapsed
                    && m.vertex_map[src.edge(e).src] == w
                    && m.vertex_map[src.edge(e).dst] == w
            })
            .collect();
        let mut uf = UnionFind::new(src.vertex_count());
        let mut has_cycle = false;
        for &e in &collapsed {
            let ed = src.edge(e);
            if !uf.union(ed.src, ed.dst) {
                has_cycle = true;
            }
        }
        if has_cycle {
            cyclic.push(tgt.vertex(w).id.clone());
        }
        let root = uf.find(verts[0]);
        if verts.iter().any(|&v| uf.find(v) != root) {
            disconnected.push(tgt.vertex(w).id.clone());
        }
    }
    if !cyclic.is_empty() {
        out.push(Violation {
            clause: MorphismClause::VertexPreimage,
            message: "collapsed subgraph contains a cycle".into(),
            witnesses: cyclic,
        });
    }
    if !disconnected.is_empty() {
        out.push(Violation {
            clause: MorphismClause::VertexPreimage,
            message: "vertex preimage is disconnected".into(),
            witnesses: disconnected,
        });
    }
    if !empty.is_empty() {
        out.push(Violation {
            clause: MorphismClause::VertexPreimage,
            message: "vertex has empty preimage".into(),
            witnesses: empty,
        });
    }

    let mut hits = alloc::vec![0usize; tgt.edge_count()];
    for img in &m.edge_map {
        if let EdgeImage::Edge(t) = img {
            hits[*t] += 1;
        }
    }
    let bad: Vec<String> = hits
        .iter()
        .enumerate()
        .filter(|(_, &n)| n != 1)
        .map(|(t, _)| tgt.edge(t).id.clone())
        .collect();
    if !bad.is_empty() {
        out.push(Violation {
            clause: MorphismClause::EdgePreimage,
            message: "edge preimage is not a single edge".into(),
            witnesses: bad,
        });
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// The quotient map collapsing a forest of non-leaf edges. Each collapsed
/// component is renamed to its least vertex id.
pub fn collapse_edges(g: &Arc<OrientedGraph>, edges: &[&str]) -> Result<GraphMorphism, GraphError> {
    let mut chosen = BTreeSet::new();
    for id in edges {
        let e = g
            .edge_idx(id)
            .ok_or_else(|| GraphError::NoSuchEdge(id.to_string()))?;
        if g.is_leaf_edge(e) {
            return Err(GraphError::InvalidCollapse(format!("`{id}` is a leaf edge")));
        }
        chosen.insert(e);
    }
    let mut uf = UnionFind::new(g.vertex_count());
    for &e in &chosen {
        let ed = g.edge(e);
        if !uf.union(ed.src, ed.dst) {
            return Err(GraphError::InvalidCollapse(format!(
                "collapsed subgraph contains a cycle through `{}`",
                ed.id
            )));
        }
    }
    // representative name: least vertex id in the class (vertex indices are id-sorted)
    let roots: Vec<usize> = (0..g.vertex_count()).map(|v| uf.find(v)).collect();
    let mut name_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for (v, &r) in roots.iter().enumerate() {
        name_of_root.entry(r).or_insert(v);
    }
    let name = |v: usize| g.vertex(name_of_root[&roots[v]]).id.clone();

    let mut b = GraphBuilder::default();
    let mut seen = BTreeSet::new();
    for v in 0..g.vertex_count() {
        let n = name(v);
        if seen.insert(n.clone()) {
            b.add_vertex(n.clone());
            if let Some(kind) = g.vertex(v).leaf {
                b.add_leaf(n, kind);
            }
        }
    }
    b.add_basepoint(name(g.basepoint()));
    for (i, e) in g.edges().iter().enumerate() {
        if !chosen.contains(&i) {
            b.add_edge(e.id.clone(), name(e.src), name(e.dst));
        }
    }
    let target = Arc::new(b.build()?);
    let vertex_map = (0..g.vertex_count())
        .map(|v| target.vertex_idx(&name(v)).expect("vertex present"))
        .collect();
    let edge_map = (0..g.edge_count())
        .map(|e| {
            if chosen.contains(&e) {
                EdgeImage::Collapsed
            } else {
                EdgeImage::Edge(target.edge_idx(&g.edge(e).id).expect("edge present"))
            }
        })
        .collect();
    GraphMorphism::from_indices(g.clone(), target, vertex_map, edge_map)
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
