//! Random connected fat graphs for property tests.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{FatGraph, HalfEdge};
use crate::graph::{GraphBuilder, LeafKind};

/// A connected fat graph with between 1 and `max_edges` edges. Self-loops and
/// multi-edges occur; univalent vertices become leaves.
pub fn random_fat_graph<R: Rng + ?Sized>(rng: &mut R, max_edges: usize) -> FatGraph {
    let max_edges = max_edges.max(1);
    loop {
        let n_edges = rng.gen_range(1..=max_edges);
        let n_vertices = rng.gen_range(1..=n_edges + 1);
        let mut ends: Vec<(usize, usize)> = Vec::with_capacity(n_edges);
        // spanning tree first, so the graph is connected
        for v in 1..n_vertices {
            let u = rng.gen_range(0..v);
            ends.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
        }
        while ends.len() < n_edges {
            ends.push((rng.gen_range(0..n_vertices), rng.gen_range(0..n_vertices)));
        }
        let mut valence = alloc::vec![0usize; n_vertices];
        for &(s, d) in &ends {
            valence[s] += 1;
            valence[d] += 1;
        }
        let Some(base) = (0..n_vertices).find(|&v| valence[v] >= 2) else {
            continue;
        };

        let vname = |v: usize| format!("v{v:02}");
        let ename = |e: usize| format!("e{e:02}");
        let mut b = GraphBuilder::default();
        for v in 0..n_vertices {
            b.add_vertex(vname(v));
        }
        b.add_basepoint(vname(base));
        for (e, &(s, d)) in ends.iter().enumerate() {
            b.add_edge(ename(e), vname(s), vname(d));
        }
        for v in 0..n_vertices {
            if valence[v] == 1 {
                let &(s, _) = ends.iter().find(|(s, d)| *s == v || *d == v).expect("incident");
                let kind = if s == v {
                    LeafKind::Incoming
                } else {
                    LeafKind::Outgoing
                };
                b.add_leaf(vname(v), kind);
            }
        }
        let g = Arc::new(b.build().expect("random graph is valid by construction"));

        let mut cyclic = alloc::vec![Vec::new(); g.vertex_count()];
        for (e, edge) in g.edges().iter().enumerate() {
            cyclic[edge.src].push(HalfEdge::src(e));
            cyclic[edge.dst].push(HalfEdge::dst(e));
        }
        for order in cyclic.iter_mut() {
            order.shuffle(rng);
        }
        return FatGraph::new(g, cyclic).expect("every half-edge placed once");
    }
}
