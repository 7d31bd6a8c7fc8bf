//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest
//! harness so the lines are always printed.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use graphflow::format;
use graphflow_core::fat::{boundary_cycles, random::random_fat_graph, surface_invariants, End, HalfEdge};
use graphflow_core::graph::{compute_automorphisms, validate_morphism, LeafKind};
use graphflow_core::morse::{
    catalog_keys, homology_ranks, morse_boundary, BackendConfig, Manifold, MorseFunction, Point,
};
use graphflow_core::ops::{
    build_operation_table, check_gluing, compare_tables, dimension_probe, expected_dimension_finite,
    expected_dimension_loopspace, DimensionQuery, OperationTable,
};
use graphflow_core::solver::{
    check_aut_action, cycle_residual, expected_dimension, propagate_tree_flow, solve_graph_flows, FlowProblem,
    SolveOutcome, SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracle::{TorusClass, TorusTriangulation};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn config(name: &str) -> BackendConfig {
    format::load_backend_config(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn problem_with(structure: &str, cfg: &BackendConfig) -> FlowProblem {
    let doc = format::load_document(&fixture(structure)).unwrap_or_else(|e| panic!("{structure}: {e}"));
    let g = Arc::new(doc.graph().expect("fixture graph"));
    let ms = doc.structure(g, Some(cfg)).expect("fixture structure");
    FlowProblem::new(ms, cfg).expect("fixture problem")
}

fn problem(structure: &str, cfg: &str) -> FlowProblem {
    problem_with(structure, &config(cfg))
}

fn solver_cfg(pairs: &[(&str, &str)]) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    for (l, c) in pairs {
        cfg.constraints.insert(l.to_string(), c.to_string());
    }
    cfg
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn param(f: &MorseFunction, name: &str) -> f64 {
    f.params()[name]
}

fn torus_shift(f: &MorseFunction) -> [f64; 2] {
    [param(f, "shift_x"), param(f, "shift_y")]
}

/// `Q` of a quadratic catalog function, read off its constant ambient Hessian.
fn quadratic_form(f: &MorseFunction) -> oracle::M3 {
    f.ambient_hessian([0.0, 0.0, 1.0]).map(|r| r.map(|x| x / 2.0))
}

// ---------------------------------------------------------------------------

fn fat_golden() -> Outcome {
    let load = |name: &str| {
        let doc = format::load_document(&fixture(name)).map_err(|e| e.to_string())?;
        let g = Arc::new(doc.graph().map_err(|e| e.to_string())?);
        doc.fat_graph(g).map_err(|e| e.to_string())
    };
    let g2 = load("gamma2.graph")?;
    let part = boundary_cycles(&g2);
    let rendered: Vec<String> = (0..part.len()).map(|i| part.render_cycle(g2.graph(), i)).collect();
    ensure(rendered == ["(A,B,C)", "(~A,~D,E,~B,D,~C,~E)"], || format!("Γ₂ cycles {rendered:?}"))?;
    let mut out = Vec::new();
    for (name, g, n) in [("gamma1.graph", 0, 4), ("gamma2.graph", 1, 2), ("figure8.graph", 0, 3)] {
        let inv = surface_invariants(&load(name)?).map_err(|e| e.to_string())?;
        ensure(inv.genus == g && inv.n_boundary == n, || format!("{name}: {inv}"))?;
        out.push(format!("{name} g={} n={}", inv.genus, inv.n_boundary));
    }
    Ok(out.join(", "))
}

/// Number of orbits of `σ∘ι` on half-edges and their sizes.
fn permutation_cycles(fg: &graphflow_core::fat::FatGraph) -> Vec<usize> {
    let g = fg.graph();
    let idx = |h: HalfEdge| 2 * h.edge + (h.end == End::Dst) as usize;
    let n = 2 * g.edge_count();
    let mut sigma = vec![usize::MAX; n];
    for v in 0..g.vertex_count() {
        let order = fg.cyclic_order(v);
        for k in 0..order.len() {
            sigma[idx(order[k])] = idx(order[(k + 1) % order.len()]);
        }
    }
    let iota = |h: usize| h ^ 1;
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut h = s;
        while !seen[h] {
            seen[h] = true;
            len += 1;
            h = sigma[iota(h)];
        }
        sizes.push(len);
    }
    sizes.sort();
    sizes
}

fn fat_random_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let trials = 600;
    for t in 0..trials {
        let fg = random_fat_graph(&mut rng, 12);
        let g = fg.graph();
        let part = boundary_cycles(&fg);
        let mut seen = BTreeSet::new();
        for c in &part.cycles {
            for e in c {
                ensure(seen.insert(*e), || format!("trial {t}: oriented edge repeated"))?;
            }
        }
        ensure(seen.len() == 2 * g.edge_count(), || format!("trial {t}: partition misses edges"))?;
        let mut sizes: Vec<usize> = part.cycles.iter().map(Vec::len).collect();
        sizes.sort();
        let reference = permutation_cycles(&fg);
        ensure(sizes == reference, || format!("trial {t}: cycle type {sizes:?} vs {reference:?}"))?;
        let (v, e) = (g.vertex_count() as i64, g.edge_count() as i64);
        let two_g = 2 - (v - e) - reference.len() as i64;
        ensure(two_g >= 0 && two_g % 2 == 0, || format!("trial {t}: 2g = {two_g}"))?;
        let inv = surface_invariants(&fg).map_err(|err| format!("trial {t}: {err}"))?;
        ensure(
            2 - 2 * inv.genus as i64 - inv.n_boundary as i64 == v - e && 2 * inv.genus as i64 == two_g,
            || format!("trial {t}: {inv} vs V-E = {}", v - e),
        )?;
    }
    Ok(format!("{trials} random fat graphs"))
}

fn morse_homology() -> Outcome {
    let mut out = Vec::new();
    for (name, ranks, chi) in [
        ("torus.cfg", vec![1, 2, 1], 0),
        ("sphere.cfg", vec![1, 0, 1], 2),
        ("rp2.cfg", vec![1, 1, 1], 1),
    ] {
        let b = config(name).backend().map_err(|e| e.to_string())?;
        let c = morse_boundary(&b).map_err(|e| e.to_string())?;
        let m = b.manifold();
        // independent inventory of critical points with their indices
        let f = b.function();
        let reference: Vec<(Point, usize)> = match m {
            Manifold::Torus => {
                let s = torus_shift(f);
                let mut v = Vec::new();
                for i in 0..2 {
                    for j in 0..2 {
                        let p = [oracle::wrap_unit(s[0] + 0.5 * i as f64), oracle::wrap_unit(s[1] + 0.5 * j as f64), 0.0];
                        v.push((p, (i == 0) as usize + (j == 0) as usize));
                    }
                }
                v
            }
            _ if f.key() == "height" => vec![([0.0, 0.0, 1.0], 2), ([0.0, 0.0, -1.0], 0)],
            _ => {
                let (_, vecs) = oracle::jacobi_eigen(&quadratic_form(f));
                let mut v = Vec::new();
                for (k, e) in vecs.iter().enumerate() {
                    v.push((*e, k));
                    if m == Manifold::Sphere {
                        v.push((e.map(|x| -x), k));
                    }
                }
                v
            }
        };
        ensure(c.critical.len() == reference.len(), || {
            format!("{name}: {} critical points, expected {}", c.critical.len(), reference.len())
        })?;
        for (p, index) in &reference {
            ensure(
                c.critical.iter().any(|cp| cp.index == *index && m.distance(cp.location, *p) < 1e-6),
                || format!("{name}: no index-{index} point at {p:?}"),
            )?;
        }
        let got = homology_ranks(&c);
        ensure(got == ranks, || format!("{name}: ranks {got:?}"))?;
        ensure(c.euler_characteristic() == chi, || format!("{name}: χ = {}", c.euler_characteristic()))?;
        ensure(c.boundary_squares_to_zero(), || format!("{name}: ∂² ≠ 0"))?;
        out.push(format!("{m} {got:?} χ={chi}"));
    }
    Ok(out.join(", "))
}

fn random_point(rng: &mut ChaCha8Rng, m: Manifold) -> Point {
    match m {
        Manifold::Torus => [rng.gen::<f64>(), rng.gen::<f64>(), 0.0],
        _ => loop {
            let p: Point = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let n = oracle::dot(p, p);
            if n > 1e-2 && n <= 1.0 {
                break oracle::normalize(p);
            }
        },
    }
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    diff / scale
}

fn derivative_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut entries = 0;
    for m in [Manifold::Torus, Manifold::Sphere, Manifold::Rp2] {
        for key in catalog_keys(m) {
            let mut params = BTreeMap::new();
            match *key {
                "cos" => {
                    params.insert("shift_x".to_string(), 0.13);
                    params.insert("shift_y".to_string(), 0.71);
                }
                "height" => {
                    params.insert("dir_x".to_string(), 0.3);
                    params.insert("dir_y".to_string(), -0.2);
                }
                _ => {
                    params.insert("alpha".to_string(), 0.4);
                    params.insert("beta".to_string(), 1.1);
                    params.insert("gamma".to_string(), -0.3);
                }
            }
            params.insert("delta".to_string(), 0.05);
            params.insert("seed".to_string(), 3.0);
            let f = MorseFunction::from_catalog(m, key, &params).map_err(|e| e.to_string())?;
            entries += 1;
            let dims = if m == Manifold::Torus { 2 } else { 3 };
            for _ in 0..1000 {
                let p = random_point(&mut rng, m);
                let h = 1e-6;
                let shifted = |p: Point, i: usize, s: f64| {
                    let mut q = p;
                    q[i] += s;
                    q
                };
                // ambient first and second derivatives
                let g = f.ambient_gradient(p);
                let fd: Vec<f64> = (0..dims)
                    .map(|i| (f.value(shifted(p, i, h)) - f.value(shifted(p, i, -h))) / (2.0 * h))
                    .collect();
                let e1 = relative(&g[..dims], &fd);
                let hess = f.ambient_hessian(p);
                let mut e2: f64 = 0.0;
                for i in 0..dims {
                    let gp = f.ambient_gradient(shifted(p, i, h));
                    let gm = f.ambient_gradient(shifted(p, i, -h));
                    let col: Vec<f64> = (0..dims).map(|k| (gp[k] - gm[k]) / (2.0 * h)).collect();
                    let row: Vec<f64> = (0..dims).map(|k| hess[k][i]).collect();
                    e2 = e2.max(relative(&row, &col));
                }
                // Riemannian derivatives along geodesics in the frame at p
                let along = |v: [f64; 2], t: f64| f.value(m.exp_frame(p, [v[0] * t, v[1] * t]));
                let gf = f.gradient_frame(p);
                let fdf: Vec<f64> = [[1.0, 0.0], [0.0, 1.0]]
                    .iter()
                    .map(|&v| (along(v, h) - along(v, -h)) / (2.0 * h))
                    .collect();
                let e3 = relative(&gf, &fdf);
                let k = 1e-3;
                let second = |v: [f64; 2]| {
                    (-along(v, 2.0 * k) + 16.0 * along(v, k) - 30.0 * along(v, 0.0) + 16.0 * along(v, -k)
                        - along(v, -2.0 * k))
                        / (12.0 * k * k)
                };
                let huu = second([1.0, 0.0]);
                let hww = second([0.0, 1.0]);
                let huw = (second([1.0, 1.0]) - second([1.0, -1.0])) / 4.0;
                let hf = f.hessian_frame(p);
                let e4 = relative(&[hf[0][0], hf[0][1], hf[1][0], hf[1][1]], &[huu, huw, huw, hww]);
                let e = e1.max(e2).max(e3).max(e4);
                worst = worst.max(e);
                ensure(e <= 1e-6, || format!("{m}/{key} at {p:?}: errors {e1:e} {e2:e} {e3:e} {e4:e}"))?;
            }
        }
    }
    Ok(format!("{entries} catalog entries × 1000 points, worst relative error {worst:.2e}"))
}

fn tree_moduli() -> Outcome {
    let cfg = config("torus_labels.cfg");
    let p = problem_with("y.struct", &cfg);
    let g = p.graph();
    let ms = p.structure();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = [rng.gen::<f64>(), rng.gen::<f64>(), 0.0];
        ensure(cycle_residual(&p, x).is_empty(), || "tree has a cycle residual".into())?;
        let flow = propagate_tree_flow(&p, x);
        ensure(flow.residual_norm == 0.0, || "nonzero tree residual".into())?;
        for leaf in (0..g.vertex_count()).filter(|&v| g.is_leaf(v)) {
            let e = g.leaf_edge(leaf).expect("leaf edge");
            let label = ms.label(e).expect("labeled");
            let (_, params) = &cfg.labels[label];
            let t = if g.edge(e).src == g.basepoint() { ms.length(e) } else { -ms.length(e) };
            let want = oracle::torus_cos_flow(params["amp"], [params["shift_x"], params["shift_y"]], [x[0], x[1]], t);
            let got = flow.vertex_values[leaf];
            let d = oracle::wrap_half(got[0] - want[0]).hypot(oracle::wrap_half(got[1] - want[1]));
            worst = worst.max(d);
            ensure(d <= 1e-6, || format!("leaf {} at x={x:?}: off by {d:e}", g.vertex(leaf).id))?;
        }
    }
    Ok(format!("100 basepoints, worst leaf error {worst:.2e}"))
}

/// Checks every tuple of the table's basis against the intersection ring of
/// the torus; tuples missing from the table count as zero.
fn check_against_ring(p: &FlowProblem, t: &OperationTable) -> Result<usize, String> {
    let g = p.graph();
    let tri = TorusTriangulation::new(4);
    for k in [TorusClass::LoopX, TorusClass::LoopY] {
        ensure(tri.is_cocycle(&k.dual(&tri)), || "cut cochain is not a cocycle".into())?;
    }
    // (leaf id, outgoing, per critical point: (id, class))
    let mut leaves: Vec<(String, bool, Vec<(String, TorusClass)>)> = Vec::new();
    for (id, out) in t.incoming.iter().map(|l| (l, false)).chain(t.outgoing.iter().map(|l| (l, true))) {
        let v = g.vertex_idx(id).expect("leaf");
        let f = p.function(g.leaf_edge(v).expect("leaf edge"));
        let crit = p.leaf_critical_points(v).expect("leaf");
        let classes = crit
            .iter()
            .map(|c| {
                let (down, up) = oracle::torus_cos_classes(torus_shift(f), [c.location[0], c.location[1]]);
                (c.id.clone(), if out { up } else { down })
            })
            .collect();
        leaves.push((id.clone(), out, classes));
    }
    let mut checked = 0;
    let mut pos = vec![0usize; leaves.len()];
    loop {
        let assignment: BTreeMap<String, String> =
            leaves.iter().zip(&pos).map(|((l, _, c), &i)| (l.clone(), c[i].0.clone())).collect();
        let classes: Vec<TorusClass> = leaves.iter().zip(&pos).map(|((_, _, c), &i)| c[i].1).collect();
        let want = oracle::intersection_number(&tri, &classes);
        let got = match t.entry(&assignment) {
            Some(e) => e.count_mod2().ok_or_else(|| format!("{assignment:?}: {}", e.status))?,
            None => 0,
        };
        ensure(got == want, || format!("{assignment:?}: table {got}, ring {want}"))?;
        checked += 1;
        // odometer, last leaf fastest
        let mut k = leaves.len();
        loop {
            if k == 0 {
                return Ok(checked);
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < leaves[k].2.len() {
                break;
            }
            pos[k] = 0;
        }
    }
}

fn counts(t: &OperationTable) -> Vec<(Vec<String>, Vec<String>, Option<usize>)> {
    t.entries.iter().map(|e| (e.inputs.clone(), e.outputs.clone(), e.count)).collect()
}

fn intersection_product() -> Outcome {
    let mut cfg = config("torus_labels.cfg");
    let base = problem_with("y_merge.struct", &cfg);
    let t = build_operation_table(&base, &SolverConfig::default());
    ensure(!t.is_partial(), || "table is partial".into())?;
    let checked = check_against_ring(&base, &t)?;
    let pick = |a: &str, b: &str, c: &str| {
        let m: BTreeMap<String, String> =
            [("i1", a), ("i2", b), ("o", c)].iter().map(|(l, x)| (l.to_string(), x.to_string())).collect();
        t.entry(&m).and_then(|e| e.count_mod2())
    };
    ensure(pick("c1.0", "c1.1", "c0.0") == Some(1), || "[s1]·[s2] → [min] is not 1".into())?;
    ensure(pick("c1.0", "c1.0", "c0.0") == Some(0), || "[s]·[s] → [min] is not 0".into())?;
    let doubled = build_operation_table(
        &base,
        &SolverConfig {
            seed_grid: 32,
            ..SolverConfig::default()
        },
    );
    cfg.tol.h /= 2.0;
    let halved = build_operation_table(&problem_with("y_merge.struct", &cfg), &SolverConfig::default());
    for (name, other) in [("doubled seed grid", &doubled), ("halved h", &halved)] {
        ensure(counts(&t) == counts(other), || format!("counts change under {name}"))?;
    }
    Ok(format!(
        "{} entries, {checked} tuples match the simplicial ring, counts stable under h/2 and 2× seeds",
        t.entries.len()
    ))
}

fn leaf_map_of(m: &graphflow_core::graph::GraphMorphism) -> BTreeMap<String, String> {
    let g = m.source();
    (0..g.vertex_count())
        .filter(|&v| g.is_leaf(v))
        .map(|v| (g.vertex(v).id.clone(), m.target().vertex(m.map_vertex(v)).id.clone()))
        .collect()
}

fn associativity() -> Outcome {
    let cfg = config("torus_labels.cfg");
    let sc = SolverConfig::default();
    let left = problem_with("tree4_left.struct", &cfg);
    let right = problem_with("tree4_right.struct", &cfg);
    let star = problem_with("star4.struct", &cfg);
    let tl = build_operation_table(&left, &sc);
    let tr = build_operation_table(&right, &sc);
    let ts = build_operation_table(&star, &sc);
    for (n, t) in [("left", &tl), ("right", &tr), ("star", &ts)] {
        ensure(!t.is_partial(), || format!("{n} table is partial"))?;
    }
    let identity: BTreeMap<String, String> = BTreeMap::new();
    let lr = compare_tables(&tl, &tr, &identity);
    ensure(lr.agrees(), || format!("left vs right: {:?}", lr.mismatches))?;
    for (n, t) in [("tree4_left_to_star4.morph", &tl), ("tree4_right_to_star4.morph", &tr)] {
        let m = format::load_morphism(&fixture(n)).map_err(|e| e.to_string())?;
        validate_morphism(&m.morphism).map_err(|v| format!("{n}: {v:?}"))?;
        let r = compare_tables(t, &ts, &leaf_map_of(&m.morphism));
        ensure(r.agrees(), || format!("{n}: {:?}", r.mismatches))?;
    }
    let checked = check_against_ring(&star, &ts)?;
    Ok(format!(
        "{} entries equal across left/right/star, star matches the ring on {checked} tuples",
        lr.compared
    ))
}

fn gluing() -> Outcome {
    let cfg = config("torus_labels.cfg");
    let p1 = problem_with("y_merge.struct", &cfg);
    let p2 = problem_with("y_merge_second.struct", &cfg);
    let matching = vec![("o".to_string(), "i1".to_string())];
    let rep = check_gluing(&p1, &p2, &matching, &SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure(!rep.composite.is_partial() && !rep.glued.is_partial(), || "partial table".into())?;
    ensure(rep.comparison.skipped == 0, || format!("{} entries skipped", rep.comparison.skipped))?;
    ensure(rep.comparison.agrees(), || format!("{:?}", rep.comparison.mismatches))?;
    Ok(format!("composite = glued on {} entries", rep.comparison.compared))
}

fn lollipop_parity() -> Outcome {
    let mut out = Vec::new();
    for (cfg_name, chi) in [("torus_labels.cfg", 0), ("sphere_labels.cfg", 2), ("rp2_labels.cfg", 1)] {
        let p = problem("lollipop.struct", cfg_name);
        let g = p.graph();
        let m = p.manifold();
        let l = g.vertex_idx("l").expect("leaf l");
        // the mod-2 fundamental class is the sum of all index-2 points
        let tops: Vec<String> = p
            .leaf_critical_points(l)
            .expect("leaf")
            .iter()
            .filter(|c| c.index == 2)
            .map(|c| c.id.clone())
            .collect();
        let mut total = 0;
        for c in &tops {
            let sc = solver_cfg(&[("l", c)]);
            let rep = solve_graph_flows(&p, &sc.resolve(&p).map_err(|e| e.to_string())?, &sc)
                .map_err(|e| e.to_string())?;
            total += rep.count().ok_or_else(|| format!("{m}: l={c} is positive-dimensional"))?;
        }
        let e = |id: &str| g.edge_idx(id).expect("edge");
        let (a, b, c) = (e("A"), e("B"), e("C"));
        let (la, lb) = (p.structure().length(a), p.structure().length(b));
        let (fa, fb, fc) = (p.function(a), p.function(b), p.function(c));
        let reference = match m {
            Manifold::Torus => {
                let psi = |x: [f64; 2]| {
                    let y = oracle::torus_cos_flow(param(fa, "amp"), torus_shift(fa), x, la);
                    oracle::torus_cos_flow(param(fb, "amp"), torus_shift(fb), y, -lb)
                };
                let fixed = oracle::torus_fixed_points(psi, 64);
                let s = torus_shift(fc);
                for x in &fixed {
                    ensure(
                        (0..2).all(|i| (oracle::wrap_half(x[i] - s[i]).abs() - 0.5).abs() > 1e-6),
                        || format!("{m}: fixed point {x:?} off the open cell of the maximum"),
                    )?;
                }
                fixed.len()
            }
            _ => {
                let ea = oracle::quadratic_flow_matrix(&quadratic_form(fa), la);
                let eb_inv = oracle::quadratic_flow_matrix(&quadratic_form(fb), -lb);
                let n = oracle::mat_mul(&eb_inv, &ea);
                let fixed = oracle::projective_fixed_points(&n, m == Manifold::Rp2, 48);
                let (_, vecs) = oracle::jacobi_eigen(&quadratic_form(fc));
                for x in &fixed {
                    ensure(oracle::dot(*x, vecs[2]).abs() > 1e-6, || {
                        format!("{m}: fixed point {x:?} on the boundary of the maximum's cells")
                    })?;
                }
                fixed.len()
            }
        };
        ensure(total == reference, || format!("{m}: solver {total}, fixed-point sweep {reference}"))?;
        ensure(total % 2 == (chi % 2) as usize, || format!("{m}: count {total} has the wrong parity"))?;
        out.push(format!("{m} {total}"));
    }
    Ok(out.join(", "))
}

fn dimension_calculators() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let d = rng.gen_range(1..=6i64);
        let n_in = rng.gen_range(0..=4);
        let n_out = rng.gen_range(0..=4);
        let q = DimensionQuery {
            in_indices: (0..n_in).map(|_| rng.gen_range(0..=d)).collect(),
            out_indices: (0..n_out).map(|_| rng.gen_range(0..=d)).collect(),
            chi: rng.gen_range(-4..=1),
            d,
        };
        let mut want = q.chi * q.d;
        for i in &q.in_indices {
            want += i;
        }
        for j in &q.out_indices {
            want -= j;
        }
        ensure(expected_dimension_loopspace(&q) == want, || format!("{q:?}"))?;
    }
    let fixtures: [(&str, &str, &[(&str, &str)]); 13] = [
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c1.0"), ("i2", "c1.1"), ("o", "c0.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c1.1"), ("i2", "c1.0"), ("o", "c0.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c0.0"), ("o", "c0.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c2.0"), ("o", "c2.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c1.0"), ("o", "c1.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c1.0"), ("o", "c0.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c2.0"), ("o", "c1.1")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c2.0"), ("o", "c0.0")]),
        ("lollipop.struct", "torus_labels.cfg", &[("l", "c2.0")]),
        ("lollipop.struct", "sphere_labels.cfg", &[("l", "c2.0")]),
        ("lollipop.struct", "rp2_labels.cfg", &[("l", "c2.0")]),
        ("path.struct", "torus_labels.cfg", &[("i", "c2.0"), ("o", "c0.0")]),
        ("path.struct", "torus_labels.cfg", &[("i", "c1.0"), ("o", "c0.0")]),
    ];
    let mut summary = Vec::new();
    for (structure, cfg, pairs) in fixtures {
        let p = problem(structure, cfg);
        let g = p.graph();
        let sc = solver_cfg(pairs);
        let cons = sc.resolve(&p).map_err(|e| e.to_string())?;
        let index = |c: &graphflow_core::solver::LeafConstraint| {
            p.leaf_critical_points(c.leaf).expect("leaf")[c.critical].index as i64
        };
        let kind = |c: &graphflow_core::solver::LeafConstraint| g.vertex(c.leaf).leaf.expect("leaf");
        let q = DimensionQuery {
            in_indices: cons.iter().filter(|c| kind(c) == LeafKind::Incoming).map(index).collect(),
            out_indices: cons.iter().filter(|c| kind(c) == LeafKind::Outgoing).map(index).collect(),
            chi: g.betti_and_euler().1,
            d: p.manifold().dim() as i64,
        };
        let p_in = g.incoming_leaves().len() as i64;
        let want = expected_dimension_finite(&q, p_in);
        ensure(expected_dimension(&p, &cons) == want, || format!("{structure} {pairs:?}: solver bookkeeping"))?;
        let got = dimension_probe(&p, &cons, &sc).map_err(|e| e.to_string())?;
        ensure(got == Some(want as usize), || {
            format!("{structure} on {cfg} {pairs:?}: formula {want}, probe {got:?}")
        })?;
        summary.push(want.to_string());
    }
    Ok(format!(
        "100 loop-space queries; finite formula = probe on {} fixtures (dims {})",
        fixtures.len(),
        summary.join(" ")
    ))
}

fn aut_action() -> Outcome {
    let runs: [(&str, &str, &[(&str, &str)]); 7] = [
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c1.0"), ("i2", "c1.1"), ("o", "c0.0")]),
        ("y_merge.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c1.0"), ("o", "c1.0")]),
        ("lollipop.struct", "torus_labels.cfg", &[("l", "c2.0")]),
        ("lollipop.struct", "sphere_labels.cfg", &[("l", "c2.0")]),
        ("lollipop.struct", "sphere_labels.cfg", &[("l", "c2.1")]),
        ("lollipop.struct", "rp2_labels.cfg", &[("l", "c2.0")]),
        ("star4.struct", "torus_labels.cfg", &[("i1", "c2.0"), ("i2", "c1.0"), ("i3", "c1.1"), ("o", "c0.0")]),
    ];
    let mut flows = 0;
    let mut out = Vec::new();
    for (structure, cfg, pairs) in runs {
        let p = problem(structure, cfg);
        let sc = solver_cfg(pairs);
        let cons = sc.resolve(&p).map_err(|e| e.to_string())?;
        let rep = solve_graph_flows(&p, &cons, &sc).map_err(|e| e.to_string())?;
        let SolveOutcome::Isolated(solutions) = rep.outcome else {
            return Err(format!("{structure} {pairs:?}: positive-dimensional"));
        };
        ensure(!solutions.is_empty(), || format!("{structure} {pairs:?}: no solutions"))?;
        let group = compute_automorphisms(p.structure().graph());
        let a = check_aut_action(&p, &cons, &solutions, &group).map_err(|e| e.to_string())?;
        ensure(a.holds(), || format!("{structure} on {cfg}: {:?} sizes {:?}", a.failures, a.orbit_sizes))?;
        flows += solutions.len();
        out.push(format!("|Aut|={}", a.group_order));
    }
    Ok(format!("{flows} accepted flows over {} runs ({})", runs.len(), out.join(" ")))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { name: "fat-graph golden cycles and invariants", budget: Duration::from_secs(1), run: fat_golden },
        Criterion { name: "random fat-graph laws", budget: Duration::from_secs(10), run: fat_random_laws },
        Criterion { name: "Morse inventories, ranks, χ and ∂²=0", budget: Duration::from_secs(60), run: morse_homology },
        Criterion { name: "gradient/Hessian finite differences", budget: Duration::from_secs(5), run: derivative_check },
        Criterion { name: "tree moduli closed form", budget: Duration::from_secs(10), run: tree_moduli },
        Criterion { name: "Y table = torus intersection ring", budget: Duration::from_secs(600), run: intersection_product },
        Criterion { name: "4-leaf tree tables equal (associativity)", budget: Duration::from_secs(1200), run: associativity },
        Criterion { name: "gluing Y∘Y", budget: Duration::from_secs(1200), run: gluing },
        Criterion { name: "lollipop parity vs fixed-point sweep", budget: Duration::from_secs(600), run: lollipop_parity },
        Criterion { name: "dimension calculators", budget: Duration::from_secs(60), run: dimension_calculators },
        Criterion { name: "Aut action on solution sets", budget: Duration::from_secs(600), run: aut_action },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > c.budget {
                Err(format!("{detail}; over the {:?} budget", c.budget))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {n:2} PASS  {} [{:.1}s] {detail}", c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n:2} FAIL  {} [{:.1}s] {why}", c.name, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

