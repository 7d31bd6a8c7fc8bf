use alloc::sync::Arc;
use alloc::vec::Vec;

use super::morphism::{EdgeImage, GraphMorphism};
use super::OrientedGraph;

/// All basepoint- and orientation-preserving self-isomorphisms of a graph.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    graph: Arc<OrientedGraph>,
    elements: Vec<GraphMorphism>,
}

impl AutomorphismGroup {
    pub fn graph(&self) -> &Arc<OrientedGraph> {
        &self.graph
    }

    /// Elements in discovery order; the identity is always first.
    pub fn elements(&self) -> &[GraphMorphism] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn position(&self, m: &GraphMorphism) -> Option<usize> {
        self.elements
            .iter()
            .position(|x| x.vertex_map() == m.vertex_map() && x.edge_map() == m.edge_map())
    }

    /// `table[i][j]` is the index of `elements[j] ∘ elements[i]`, or `None` if
    /// the product falls outside the list.
    pub fn multiplication_table(&self) -> Vec<Vec<Option<usize>>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| a.then(b).ok().and_then(|c| self.position(&c)))
                    .collect()
            })
            .collect()
    }

    /// Closure under composition and inverses, presence of the identity.
    pub fn verify_group_axioms(&self) -> bool {
        if !self.elements.first().is_some_and(|e| e.is_identity()) {
            return false;
        }
        let closed = self
            .multiplication_table()
            .iter()
            .all(|row| row.iter().all(Option::is_some));
        let inverses = self.elements.iter().all(|e| {
            e.inverse()
                .and_then(|inv| self.position(&inv))
                .is_some()
        });
        closed && inverses
    }
}

/// Exhaustive backtracking over edge bijections. Vertices are forced by edge
/// images since every vertex of a valid graph carries an edge.
pub fn compute_automorphisms(g: &Arc<OrientedGraph>) -> AutomorphismGroup {
    let nv = g.vertex_count();
    let ne = g.edge_count();
    let mut vmap = alloc::vec![usize::MAX; nv];
    let mut vused = alloc::vec![false; nv];
    vmap[g.basepoint()] = g.basepoint();
    vused[g.basepoint()] = true;
    let mut emap = alloc::vec![usize::MAX; ne];
    let mut eused = alloc::vec![false; ne];

    // Edges ordered by BFS from the basepoint so vertex images get pinned early.
    let order = bfs_edge_order(g);
    let mut found = Vec::new();
    search(g, &order, 0, &mut vmap, &mut vused, &mut emap, &mut eused, &mut found);

    let mut elements: Vec<GraphMorphism> = found
        .into_iter()
        .map(|(v, e)| {
            GraphMorphism::from_indices(
                g.clone(),
                g.clone(),
                v,
                e.into_iter().map(EdgeImage::Edge).collect(),
            )
            .expect("automorphism maps are in range")
        })
        .collect();
    // identity first, then lexicographic on edge images
    elements.sort_by(|a, b| {
        b.is_identity()
            .cmp(&a.is_identity())
            .then_with(|| a.edge_map().cmp(b.edge_map()))
    });
    AutomorphismGroup {
        graph: g.clone(),
        elements,
    }
}

fn bfs_edge_order(g: &OrientedGraph) -> Vec<usize> {
    let mut seen_e = alloc::vec![false; g.edge_count()];
    let mut seen_v = alloc::vec![false; g.vertex_count()];
    let mut order = Vec::with_capacity(g.edge_count());
    let mut queue = alloc::collections::VecDeque::from([g.basepoint()]);
    seen_v[g.basepoint()] = true;
    while let Some(v) = queue.pop_front() {
        for &e in g.incident_edges(v) {
            if !seen_e[e] {
                seen_e[e] = true;
                order.push(e);
                let w = g.edge(e).other_end(v);
                if !seen_v[w] {
                    seen_v[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

fn vertex_compatible(g: &OrientedGraph, a: usize, b: usize) -> bool {
    g.vertex(a).leaf == g.vertex(b).leaf && g.valence(a) == g.valence(b)
}

#[allow(clippy::too_many_arguments)]
fn search(
    g: &OrientedGraph,
    order: &[usize],
    k: usize,
    vmap: &mut [usize],
    vused: &mut [bool],
    emap: &mut [usize],
    eused: &mut [bool],
    found: &mut Vec<(Vec<usize>, Vec<usize>)>,
) {
    if k == order.len() {
        found.push((vmap.to_vec(), emap.to_vec()));
        return;
    }
    let e = order[k];
    let (s, d) = (g.edge(e).src, g.edge(e).dst);
    for t in 0..g.edge_count() {
        if eused[t] {
            continue;
        }
        let (ts, td) = (g.edge(t).src, g.edge(t).dst);
        if g.edge(e).is_loop() != g.edge(t).is_loop() {
            continue;
        }
        let mut assigned = Vec::new();
        let mut ok = true;
        for (x, y) in [(s, ts), (d, td)] {
            if vmap[x] == usize::MAX {
                if vused[y] || !vertex_compatible(g, x, y) {
                    ok = false;
                    break;
                }
                vmap[x] = y;
                vused[y] = true;
                assigned.push(x);
            } else if vmap[x] != y {
                ok = false;
                break;
            }
        }
        if ok {
            emap[e] = t;
            eused[t] = true;
            search(g, order, k + 1, vmap, vused, emap, eused, found);
            eused[t] = false;
            emap[e] = usize::MAX;
        }
        for x in assigned {
            vused[vmap[x]] = false;
            vmap[x] = usize::MAX;
        }
    }
}
