//! Reference computations for the acceptance suite. Nothing here calls into
//! the library's flow, solver or Morse code.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

pub type V3 = [f64; 3];
pub type M3 = [[f64; 3]; 3];

pub fn wrap_half(x: f64) -> f64 {
    x - x.round()
}

pub fn wrap_unit(x: f64) -> f64 {
    x - x.floor()
}

// ---------------------------------------------------------------------------
// closed-form gradient flows

/// Time-`t` negative gradient flow of `amp (cos 2π(x - sx) + cos 2π(y - sy))`.
/// Each coordinate obeys `φ' = 4π² amp sin φ` with `φ = 2π(x - s)`, solved by
/// `tan(φ/2) = tan(φ₀/2) exp(4π² amp t)`.
pub fn torus_cos_flow(amp: f64, shift: [f64; 2], p: [f64; 2], t: f64) -> [f64; 2] {
    let k = 4.0 * PI * PI * amp;
    let mut out = [0.0; 2];
    for i in 0..2 {
        let phi0 = 2.0 * PI * wrap_half(p[i] - shift[i]);
        let half = (phi0 / 2.0).sin().atan2((phi0 / 2.0).cos() * (-k * t).exp());
        out[i] = wrap_unit(shift[i] + half / PI);
    }
    out
}

pub fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn mat_vec(a: &M3, v: V3) -> V3 {
    [0, 1, 2].map(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn normalize(a: V3) -> V3 {
    let n = dot(a, a).sqrt();
    a.map(|x| x / n)
}

pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Matrix exponential by scaling and squaring a Taylor series.
pub fn expm(a: &M3) -> M3 {
    let norm: f64 = a.iter().flatten().map(|x| x.abs()).sum();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scale = 2f64.powi(-s);
    let b: M3 = a.map(|r| r.map(|x| x * scale));
    let mut result = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut term = result;
    for k in 1..30 {
        term = mat_mul(&term, &b).map(|r| r.map(|x| x / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        result = mat_mul(&result, &result);
    }
    result
}

/// Linear part of the time-`t` negative gradient flow of `pᵀQp` on the unit
/// sphere: the flow is `p ↦ normalize(exp(-2Qt) p)`.
pub fn quadratic_flow_matrix(q: &M3, t: f64) -> M3 {
    expm(&q.map(|r| r.map(|x| -2.0 * t * x)))
}

/// Eigenvalues (ascending) and unit eigenvectors of a symmetric 3×3 matrix
/// by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &M3) -> ([f64; 3], [V3; 3]) {
    let mut a = *a;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..100 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-15 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut r = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            r[p][p] = c;
            r[q][q] = c;
            r[p][q] = s;
            r[q][p] = -s;
            let rt = transpose(&r);
            a = mat_mul(&mat_mul(&rt, &a), &r);
            v = mat_mul(&v, &r);
        }
    }
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    (
        order.map(|i| a[i][i]),
        order.map(|i| normalize([v[0][i], v[1][i], v[2][i]])),
    )
}

pub fn transpose(a: &M3) -> M3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

// ---------------------------------------------------------------------------
// fixed-point sweeps

fn solve2(j: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det.abs() < 1e-14 {
        return None;
    }
    Some([
        (j[1][1] * r[0] - j[0][1] * r[1]) / det,
        (-j[1][0] * r[0] + j[0][0] * r[1]) / det,
    ])
}

/// Newton on a 2-d residual from `x0` with a forward-difference Jacobian.
/// `step` maps a point and a chart increment to a new point; `residual`
/// is evaluated in a chart at its argument.
fn newton<P: Copy>(
    x0: P,
    residual: impl Fn(P) -> [f64; 2],
    step: impl Fn(P, [f64; 2]) -> P,
) -> Option<P> {
    let mut x = x0;
    for _ in 0..60 {
        let r = residual(x);
        let h = 1e-7;
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut e = [0.0; 2];
            e[k] = h;
            let rk = residual(step(x, e));
            for i in 0..2 {
                j[i][k] = (rk[i] - r[i]) / h;
            }
        }
        if r[0].hypot(r[1]) < 1e-13 {
            return Some(x);
        }
        let mut d = solve2(j, r)?;
        let n = d[0].hypot(d[1]);
        if n > 0.05 {
            d = d.map(|v| v * 0.05 / n);
        }
        x = step(x, d.map(|v| -v));
    }
    let r = residual(x);
    (r[0].hypot(r[1]) < 1e-11).then_some(x)
}

/// Fixed points of the torus map `ψ` found by Newton from every node of a
/// `grid × grid` sweep, merged within `1e-7`.
pub fn torus_fixed_points(psi: impl Fn([f64; 2]) -> [f64; 2], grid: usize) -> Vec<[f64; 2]> {
    let res = |x: [f64; 2]| {
        let y = psi(x);
        [wrap_half(y[0] - x[0]), wrap_half(y[1] - x[1])]
    };
    let step = |x: [f64; 2], d: [f64; 2]| [wrap_unit(x[0] + d[0]), wrap_unit(x[1] + d[1])];
    let mut found: Vec<[f64; 2]> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let x0 = [(i as f64 + 0.5) / grid as f64, (j as f64 + 0.5) / grid as f64];
            if let Some(x) = newton(x0, res, step) {
                if !found.iter().any(|y| wrap_half(y[0] - x[0]).hypot(wrap_half(y[1] - x[1])) < 1e-7) {
                    found.push(x);
                }
            }
        }
    }
    found
}

fn frame(p: V3) -> (V3, V3) {
    let a = if p[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = normalize([a[0] - dot(a, p) * p[0], a[1] - dot(a, p) * p[1], a[2] - dot(a, p) * p[2]]);
    (u, cross(p, u))
}

/// Fixed points of `p ↦ normalize(N p)` on the sphere (`projective = false`)
/// or of `[p] ↦ [N p]` on RP², by Newton from a latitude/longitude sweep.
pub fn projective_fixed_points(n: &M3, projective: bool, grid: usize) -> Vec<V3> {
    let mut found: Vec<V3> = Vec::new();
    for i in 0..grid {
        for j in 0..2 * grid {
            let lat = PI * ((i as f64 + 0.5) / grid as f64 - 0.5);
            let lon = PI * (j as f64 + 0.5) / grid as f64;
            let mut p = [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()];
            let mut ok = false;
            for _ in 0..60 {
                // residual `normalize(N q) - q` in a frame fixed at the current iterate
                let (u, w) = frame(p);
                let res = |q: V3| {
                    let mut y = normalize(mat_vec(n, q));
                    if projective && dot(y, q) < 0.0 {
                        y = y.map(|c| -c);
                    }
                    let d = [y[0] - q[0], y[1] - q[1], y[2] - q[2]];
                    [dot(d, u), dot(d, w)]
                };
                let step = |q: V3, d: [f64; 2]| {
                    normalize([0, 1, 2].map(|k| q[k] + d[0] * u[k] + d[1] * w[k]))
                };
                let r = res(p);
                if r[0].hypot(r[1]) < 1e-13 {
                    ok = true;
                    break;
                }
                let h = 1e-7;
                let mut jac = [[0.0; 2]; 2];
                for k in 0..2 {
                    let mut e = [0.0; 2];
                    e[k] = h;
                    let rk = res(step(p, e));
                    for r2 in 0..2 {
                        jac[r2][k] = (rk[r2] - r[r2]) / h;
                    }
                }
                let Some(mut d) = solve2(jac, r) else { break };
                let nd = d[0].hypot(d[1]);
                if nd > 0.05 {
                    d = d.map(|v| v * 0.05 / nd);
                }
                p = step(p, d.map(|v| -v));
            }
            if !ok {
                continue;
            }
            let y = mat_vec(n, p);
            if !projective && dot(y, p) <= 0.0 {
                continue;
            }
            let same = |q: &V3| {
                let c = dot(*q, p);
                if projective { c.abs() > 1.0 - 1e-12 } else { c > 1.0 - 1e-12 }
            };
            if !found.iter().any(same) {
                found.push(p);
            }
        }
    }
    found
}

// ---------------------------------------------------------------------------
// mod-2 cup products on a triangulated torus

/// The `n × n` grid triangulation of the torus, vertex `(i, j)` numbered
/// `i n + j`, every square split along its diagonal. Simplices are sorted
/// vertex tuples so the global vertex order orients them.
pub struct TorusTriangulation {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

/// A cochain over F₂ given by its support.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub support: BTreeMap<Vec<usize>, u8>,
}

impl Cochain {
    fn value(&self, s: &[usize]) -> u8 {
        self.support.get(s).copied().unwrap_or(0)
    }
}

impl TorusTriangulation {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "smaller grids are not simplicial complexes");
        let id = |i: usize, j: usize| (i % n) * n + (j % n);
        let sorted2 = |a: usize, b: usize| if a < b { [a, b] } else { [b, a] };
        let mut edges = Vec::new();
        let mut triangles = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                edges.push(sorted2(a, b));
                edges.push(sorted2(a, c));
                edges.push(sorted2(a, d));
                for mut t in [[a, b, d], [a, c, d]] {
                    t.sort();
                    triangles.push(t);
                }
            }
        }
        TorusTriangulation { n, edges, triangles }
    }

    fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.n, v % self.n)
    }

    /// Constant 0-cochain 1, dual to the fundamental class.
    pub fn unit(&self) -> Cochain {
        Cochain {
            degree: 0,
            support: (0..self.n * self.n).map(|v| (vec![v], 1)).collect(),
        }
    }

    /// 1-cocycle counting crossings of the cut between the last and first
    /// grid rows in coordinate `axis`; it evaluates to 1 on a loop winding
    /// once in that coordinate. Its Poincaré dual is a loop along the other axis.
    pub fn cut(&self, axis: usize) -> Cochain {
        let c = |v: usize| {
            let (i, j) = self.coords(v);
            if axis == 0 { i } else { j }
        };
        let support = self
            .edges
            .iter()
            .filter(|e| {
                let (a, b) = (c(e[0]), c(e[1]));
                (a == self.n - 1 && b == 0) || (a == 0 && b == self.n - 1)
            })
            .map(|e| (e.to_vec(), 1))
            .collect();
        Cochain { degree: 1, support }
    }

    /// 2-cochain supported on one triangle, dual to a point.
    pub fn point(&self) -> Cochain {
        Cochain {
            degree: 2,
            support: [(self.triangles[0].to_vec(), 1)].into_iter().collect(),
        }
    }

    fn simplices(&self, k: usize) -> Vec<Vec<usize>> {
        match k {
            0 => (0..self.n * self.n).map(|v| vec![v]).collect(),
            1 => self.edges.iter().map(|e| e.to_vec()).collect(),
            2 => self.triangles.iter().map(|t| t.to_vec()).collect(),
            _ => Vec::new(),
        }
    }

    /// Whether `δc = 0`.
    pub fn is_cocycle(&self, c: &Cochain) -> bool {
        self.simplices(c.degree + 1).iter().all(|s| {
            (0..s.len())
                .map(|skip| {
                    let face: Vec<usize> = s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
                    c.value(&face)
                })
                .fold(0, |a, b| a ^ b)
                == 0
        })
    }

    /// Alexander–Whitney cup product.
    pub fn cup(&self, a: &Cochain, b: &Cochain) -> Cochain {
        let k = a.degree + b.degree;
        let support = self
            .simplices(k)
            .into_iter()
            .filter_map(|s| {
                let v = a.value(&s[..=a.degree]) & b.value(&s[a.degree..]);
                (v == 1).then_some((s, 1))
            })
            .collect();
        Cochain { degree: k, support }
    }

    /// Evaluation on the mod-2 fundamental class.
    pub fn evaluate(&self, c: &Cochain) -> u8 {
        if c.degree != 2 {
            return 0;
        }
        self.triangles.iter().map(|t| c.value(t)).fold(0, |x, y| x ^ y)
    }
}

/// Homology class on the torus carried by a descending or ascending manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusClass {
    Point,
    /// A loop winding once in coordinate 0.
    LoopX,
    LoopY,
    Fundamental,
}

impl TorusClass {
    /// Poincaré dual cocycle.
    pub fn dual(self, t: &TorusTriangulation) -> Cochain {
        match self {
            TorusClass::Fundamental => t.unit(),
            // a loop along x meets a cycle as often as the cycle crosses a y-cut
            TorusClass::LoopX => t.cut(1),
            TorusClass::LoopY => t.cut(0),
            TorusClass::Point => t.point(),
        }
    }
}

/// Mod-2 intersection number of classes in general position, computed as the
/// cup product of their duals on the fundamental class.
pub fn intersection_number(t: &TorusTriangulation, classes: &[TorusClass]) -> u8 {
    let mut c = t.unit();
    for k in classes {
        let d = k.dual(t);
        if c.degree + d.degree > 2 {
            return 0;
        }
        c = t.cup(&c, &d);
    }
    t.evaluate(&c)
}

/// Descending and ascending classes of a critical point of
/// `cos 2π(x - sx) + cos 2π(y - sy)` located at `p`.
pub fn torus_cos_classes(shift: [f64; 2], p: [f64; 2]) -> (TorusClass, TorusClass) {
    // coordinate i is a local maximum direction when 2π(p_i - s_i) ≡ 0
    let at_top = |i: usize| wrap_half(p[i] - shift[i]).abs() < 0.25;
    match (at_top(0), at_top(1)) {
        (true, true) => (TorusClass::Fundamental, TorusClass::Point),
        (false, false) => (TorusClass::Point, TorusClass::Fundamental),
        // descending along x, ascending along y
        (true, false) => (TorusClass::LoopX, TorusClass::LoopY),
        (false, true) => (TorusClass::LoopY, TorusClass::LoopX),
    }
}
