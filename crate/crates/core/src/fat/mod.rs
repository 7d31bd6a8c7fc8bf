//! Fat (ribbon) graphs: cyclic orders of half-edges at each vertex, boundary
//! cycles, surface invariants and chord diagrams.

mod cylinder;
pub mod random;

pub use cylinder::{build_mapping_cylinder, AttachingSegment, Cylinder, CylinderComplex};

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::OrientedGraph;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FatError {
    #[error("vertex `{0}` has no cyclic order")]
    MissingCyclicOrder(String),
    #[error("cyclic order at `{vertex}` lists half-edge {half_edge} which is not incident to it")]
    ForeignHalfEdge { vertex: String, half_edge: String },
    #[error("half-edge {0} appears more than once in the cyclic orders")]
    RepeatedHalfEdge(String),
    #[error("cyclic order at `{vertex}` omits half-edge {half_edge}")]
    MissingHalfEdge { vertex: String, half_edge: String },
    #[error("unknown edge `{0}` in cyclic order")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}` in cyclic order")]
    UnknownVertex(String),
    #[error("parity violation: (2-chi-n) odd (chi={chi}, n={n})")]
    Parity { chi: i64, n: usize },
    #[error("boundary cycle {0} is unmarked")]
    UnmarkedCycle(usize),
    #[error("mark index {0} out of range")]
    MarkOutOfRange(usize),
    #[error("not a chord diagram (violations: {0})")]
    NotChordDiagram(String),
    #[error("nonpositive length on edge `{0}`")]
    NonpositiveLength(String),
    #[error("length table has {got} entries, graph has {want} edges")]
    LengthCount { got: usize, want: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Src,
    Dst,
}

/// One end of an edge. The involution of the oriented-edge cover is end-swap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: usize,
    pub end: End,
}

impl HalfEdge {
    pub fn src(edge: usize) -> Self {
        HalfEdge { edge, end: End::Src }
    }

    pub fn dst(edge: usize) -> Self {
        HalfEdge { edge, end: End::Dst }
    }

    pub fn vertex(&self, g: &OrientedGraph) -> usize {
        let e = g.edge(self.edge);
        match self.end {
            End::Src => e.src,
            End::Dst => e.dst,
        }
    }

    /// Token form used in fixture files: `A+` for the source end, `A-` for the target end.
    pub fn token(&self, g: &OrientedGraph) -> String {
        let mut s = g.edge(self.edge).id.clone();
        s.push(match self.end {
            End::Src => '+',
            End::Dst => '-',
        });
        s
    }
}

/// An edge traversed forwards (source to target) or backwards. Ordered by
/// edge index, then forward before reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        OrientedEdge {
            edge,
            reversed: false,
        }
    }

    pub fn backward(edge: usize) -> Self {
        OrientedEdge {
            edge,
            reversed: true,
        }
    }

    pub fn bar(self) -> Self {
        OrientedEdge {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }

    /// Half-edge at which this oriented edge starts.
    pub fn start(self) -> HalfEdge {
        if self.reversed {
            HalfEdge::dst(self.edge)
        } else {
            HalfEdge::src(self.edge)
        }
    }

    /// Half-edge at which this oriented edge arrives.
    pub fn arrival(self) -> HalfEdge {
        self.bar().start()
    }

    fn leaving_through(h: HalfEdge) -> Self {
        OrientedEdge {
            edge: h.edge,
            reversed: h.end == End::Dst,
        }
    }

    /// `A` or `~A`.
    pub fn label(&self, g: &OrientedGraph) -> String {
        let mut s = String::new();
        if self.reversed {
            s.push('~');
        }
        s.push_str(&g.edge(self.edge).id);
        s
    }
}

/// Role of a boundary cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CycleMark {
    Incoming,
    Outgoing,
}

impl fmt::Display for CycleMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleMark::Incoming => f.write_str("in"),
            CycleMark::Outgoing => f.write_str("out"),
        }
    }
}

/// Oriented graph with a cyclic order of half-edges at each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatGraph {
    graph: Arc<OrientedGraph>,
    cyclic: Vec<Vec<HalfEdge>>,
    /// position of each half-edge in its vertex's cyclic order: [edge][end]
    position: Vec<[usize; 2]>,
}

impl FatGraph {
    /// `cyclic[v]` lists the half-edges at vertex `v` in cyclic order. An empty
    /// list is accepted for a leaf vertex and filled in.
    pub fn new(graph: Arc<OrientedGraph>, mut cyclic: Vec<Vec<HalfEdge>>) -> Result<Self, FatError> {
        let g = &*graph;
        if cyclic.len() != g.vertex_count() {
            cyclic.resize(g.vertex_count(), Vec::new());
        }
        let mut position = alloc::vec![[usize::MAX; 2]; g.edge_count()];
        for (v, order) in cyclic.iter_mut().enumerate() {
            if order.is_empty() {
                if g.valence(v) == 1 {
                    let e = g.incident_edges(v)[0];
                    let h = if g.edge(e).src == v {
                        HalfEdge::src(e)
                    } else {
                        HalfEdge::dst(e)
                    };
                    order.push(h);
                } else {
                    return Err(FatError::MissingCyclicOrder(g.vertex(v).id.clone()));
                }
            }
            for (i, h) in order.iter().enumerate() {
                if h.edge >= g.edge_count() || h.vertex(g) != v {
                    return Err(FatError::ForeignHalfEdge {
                        vertex: g.vertex(v).id.clone(),
                        half_edge: if h.edge < g.edge_count() {
                            h.token(g)
                        } else {
                            alloc::format!("#{}", h.edge)
                        },
                    });
                }
                let slot = &mut position[h.edge][h.end as usize];
                if *slot != usize::MAX {
                    return Err(FatError::RepeatedHalfEdge(h.token(g)));
                }
                *slot = i;
            }
        }
        for (e, pos) in position.iter().enumerate() {
            for end in [End::Src, End::Dst] {
                if pos[end as usize] == usize::MAX {
                    let h = HalfEdge { edge: e, end };
                    return Err(FatError::MissingHalfEdge {
                        vertex: g.vertex(h.vertex(g)).id.clone(),
                        half_edge: h.token(g),
                    });
                }
            }
        }
        Ok(FatGraph {
            graph,
            cyclic,
            position,
        })
    }

    /// Cyclic orders given as `(vertex id, ["A+", "B-", ...])`.
    pub fn from_tokens<'a>(
        graph: Arc<OrientedGraph>,
        orders: impl IntoIterator<Item = (&'a str, Vec<&'a str>)>,
    ) -> Result<Self, FatError> {
        let mut cyclic = alloc::vec![Vec::new(); graph.vertex_count()];
        for (vid, tokens) in orders {
            let v = graph
                .vertex_idx(vid)
                .ok_or_else(|| FatError::UnknownVertex(vid.into()))?;
            for t in tokens {
                cyclic[v].push(parse_half_edge(&graph, t)?);
            }
        }
        Self::new(graph, cyclic)
    }

    pub fn graph(&self) -> &Arc<OrientedGraph> {
        &self.graph
    }

    pub fn cyclic_order(&self, v: usize) -> &[HalfEdge] {
        &self.cyclic[v]
    }

    /// The half-edge following `h` in its vertex's cyclic order.
    pub fn successor(&self, h: HalfEdge) -> HalfEdge {
        let v = h.vertex(&self.graph);
        let order = &self.cyclic[v];
        let i = self.position[h.edge][h.end as usize];
        order[(i + 1) % order.len()]
    }

    /// Next oriented edge along a boundary cycle: at the head of `e`, take the
    /// successor of the arriving half-edge and leave through it.
    pub fn next_in_cycle(&self, e: OrientedEdge) -> OrientedEdge {
        OrientedEdge::leaving_through(self.successor(e.arrival()))
    }

    /// Rotates every cyclic order by the given offsets (one per vertex).
    pub fn rotated(&self, offsets: &[usize]) -> FatGraph {
        let mut cyclic = self.cyclic.clone();
        for (v, order) in cyclic.iter_mut().enumerate() {
            let k = offsets.get(v).copied().unwrap_or(0) % order.len();
            order.rotate_left(k);
        }
        FatGraph::new(self.graph.clone(), cyclic).expect("rotation preserves validity")
    }
}

/// Parses `A+` (source end) or `A-` (target end).
pub fn parse_half_edge(g: &OrientedGraph, token: &str) -> Result<HalfEdge, FatError> {
    let (name, end) = if let Some(n) = token.strip_suffix('+') {
        (n, End::Src)
    } else if let Some(n) = token.strip_suffix('-') {
        (n, End::Dst)
    } else {
        return Err(FatError::UnknownEdge(token.into()));
    };
    let edge = g
        .edge_idx(name)
        .ok_or_else(|| FatError::UnknownEdge(name.into()))?;
    Ok(HalfEdge { edge, end })
}

/// Canonical boundary cycles with optional in/out marks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCyclePartition {
    pub cycles: Vec<Vec<OrientedEdge>>,
    pub marks: Vec<Option<CycleMark>>,
}

impl BoundaryCyclePartition {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn set_mark(&mut self, cycle: usize, mark: CycleMark) -> Result<(), FatError> {
        let slot = self
            .marks
            .get_mut(cycle)
            .ok_or(FatError::MarkOutOfRange(cycle))?;
        *slot = Some(mark);
        Ok(())
    }

    pub fn with_marks(mut self, marks: &[(usize, CycleMark)]) -> Result<Self, FatError> {
        for &(i, m) in marks {
            self.set_mark(i, m)?;
        }
        Ok(self)
    }

    /// Index of the cycle containing each oriented edge: `[edge][reversed]`.
    pub fn cycle_of(&self, n_edges: usize) -> Vec<[usize; 2]> {
        let mut out = alloc::vec![[usize::MAX; 2]; n_edges];
        for (i, c) in self.cycles.iter().enumerate() {
            for e in c {
                out[e.edge][e.reversed as usize] = i;
            }
        }
        out
    }

    /// `(A,B,C)` style rendering of one cycle.
    pub fn render_cycle(&self, g: &OrientedGraph, i: usize) -> String {
        let parts: Vec<String> = self.cycles[i].iter().map(|e| e.label(g)).collect();
        alloc::format!("({})", parts.join(","))
    }
}

/// Traces all boundary cycles, each rotated to start at its least oriented
/// edge, and sorted by that first element.
pub fn boundary_cycles(fg: &FatGraph) -> BoundaryCyclePartition {
    let ne = fg.graph.edge_count();
    let mut used = alloc::vec![[false; 2]; ne];
    let mut cycles = Vec::new();
    for edge in 0..ne {
        for reversed in [false, true] {
            if used[edge][reversed as usize] {
                continue;
            }
            let start = OrientedEdge { edge, reversed };
            let mut cycle = Vec::new();
            let mut e = start;
            loop {
                used[e.edge][e.reversed as usize] = true;
                cycle.push(e);
                e = fg.next_in_cycle(e);
                if e == start {
                    break;
                }
            }
            // `start` is the least unused edge, and all edges in this cycle were unused.
            cycles.push(cycle);
        }
    }
    for c in cycles.iter_mut() {
        let k = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
        c.rotate_left(k);
    }
    cycles.sort_by_key(|c| c[0]);
    let n = cycles.len();
    BoundaryCyclePartition {
        cycles,
        marks: alloc::vec![None; n],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub genus: usize,
    pub n_boundary: usize,
    pub chi: i64,
}

impl fmt::Display for SurfaceInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "genus={} boundary={} chi={}",
            self.genus, self.n_boundary, self.chi
        )
    }
}

pub fn surface_invariants(fg: &FatGraph) -> Result<SurfaceInvariants, FatError> {
    let n = boundary_cycles(fg).len();
    let (_, chi) = fg.graph.betti_and_euler();
    let twice_g = 2 - chi - n as i64;
    if twice_g % 2 != 0 || twice_g < 0 {
        return Err(FatError::Parity { chi, n });
    }
    Ok(SurfaceInvariants {
        genus: (twice_g / 2) as usize,
        n_boundary: n,
        chi,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordCheck {
    pub is_chord_diagram: bool,
    /// Oriented edges violating `e incoming <=> ē outgoing`, in order.
    pub witnesses: Vec<OrientedEdge>,
}

/// Checks that every oriented edge lies on an incoming cycle exactly when its
/// reverse lies on an outgoing one.
pub fn is_chord_diagram(
    fg: &FatGraph,
    partition: &BoundaryCyclePartition,
) -> Result<ChordCheck, FatError> {
    let marks: Vec<CycleMark> = partition
        .marks
        .iter()
        .enumerate()
        .map(|(i, m)| m.ok_or(FatError::UnmarkedCycle(i)))
        .collect::<Result<_, _>>()?;
    let ne = fg.graph.edge_count();
    let cycle_of = partition.cycle_of(ne);
    let mark_of = |e: OrientedEdge| marks[cycle_of[e.edge][e.reversed as usize]];
    let mut witnesses = Vec::new();
    for edge in 0..ne {
        for reversed in [false, true] {
            let e = OrientedEdge { edge, reversed };
            let lhs = mark_of(e) == CycleMark::Incoming;
            let rhs = mark_of(e.bar()) == CycleMark::Outgoing;
            if lhs != rhs {
                witnesses.push(e);
            }
        }
    }
    Ok(ChordCheck {
        is_chord_diagram: witnesses.is_empty(),
        witnesses,
    })
}

/// Small fat graphs used in tests and documentation.
pub mod shapes {
    use super::*;
    use crate::graph::OrientedGraph;

    fn three_vertex_graph() -> Arc<OrientedGraph> {
        Arc::new(
            OrientedGraph::builder()
                .vertex("v0")
                .vertex("v1")
                .basepoint("v1")
                .vertex("v2")
                .edge("A", "v0", "v1")
                .edge("B", "v1", "v2")
                .edge("C", "v2", "v0")
                .edge("D", "v1", "v0")
                .edge("E", "v1", "v2")
                .build()
                .expect("valid fixture"),
        )
    }

    /// Genus one, two boundary components.
    pub fn gamma2() -> FatGraph {
        FatGraph::from_tokens(
            three_vertex_graph(),
            [
                ("v0", alloc::vec!["A+", "D-", "C-"]),
                ("v1", alloc::vec!["A-", "B+", "D+", "E+"]),
                ("v2", alloc::vec!["B-", "C+", "E-"]),
            ],
        )
        .expect("valid fixture")
    }

    /// Same graph as [`gamma2`] with a planar cyclic order: genus zero, four boundary components.
    pub fn gamma1() -> FatGraph {
        FatGraph::from_tokens(
            three_vertex_graph(),
            [
                ("v0", alloc::vec!["A+", "D-", "C-"]),
                ("v1", alloc::vec!["A-", "B+", "E+", "D+"]),
                ("v2", alloc::vec!["B-", "C+", "E-"]),
            ],
        )
        .expect("valid fixture")
    }

    pub fn figure_eight() -> FatGraph {
        FatGraph::from_tokens(
            Arc::new(crate::graph::shapes::figure_eight()),
            [("v", alloc::vec!["A-", "A+", "B-", "B+"])],
        )
        .expect("valid fixture")
    }

    pub fn single_loop() -> FatGraph {
        let g = OrientedGraph::builder()
            .vertex("v")
            .basepoint("v")
            .edge("A", "v", "v")
            .build()
            .expect("valid fixture");
        FatGraph::from_tokens(Arc::new(g), [("v", alloc::vec!["A+", "A-"])]).expect("valid fixture")
    }
}
