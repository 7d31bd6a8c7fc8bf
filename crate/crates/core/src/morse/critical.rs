use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Manifold, MorseBackend, MorseError, MorseFunction, Point};
use crate::linalg::{normalize, sym2_eigen, V3};

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    /// `c<index>.<n>`, numbered within each index in coordinate order.
    pub id: String,
    pub location: Point,
    pub index: usize,
    pub value: f64,
    /// Hessian eigenvalues, ascending.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors matching `eigenvalues`, as ambient tangent vectors.
    pub eigenvectors: [V3; 2],
}

impl CriticalPoint {
    /// Unit tangent directions spanning the unstable manifold.
    pub fn unstable_directions(&self) -> Vec<V3> {
        (0..2)
            .filter(|&i| self.eigenvalues[i] < 0.0)
            .map(|i| self.eigenvectors[i])
            .collect()
    }

    /// Unit tangent directions spanning the stable manifold.
    pub fn stable_directions(&self) -> Vec<V3> {
        (0..2)
            .filter(|&i| self.eigenvalues[i] > 0.0)
            .map(|i| self.eigenvectors[i])
            .collect()
    }
}

pub(crate) fn seeds(m: Manifold, n: usize) -> Vec<Point> {
    let mut out = Vec::new();
    let coord = |i: usize| (i as f64 + 0.5) / n as f64;
    match m {
        Manifold::Torus => {
            for i in 0..n {
                for j in 0..n {
                    out.push([coord(i), coord(j), 0.0]);
                }
            }
        }
        _ => {
            let faces: &[(usize, f64)] = if m == Manifold::Rp2 {
                &[(0, 1.0), (1, 1.0), (2, 1.0)]
            } else {
                &[(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0), (2, 1.0), (2, -1.0)]
            };
            for &(axis, sign) in faces {
                for i in 0..n {
                    for j in 0..n {
                        let mut p = [0.0; 3];
                        p[axis] = sign;
                        p[(axis + 1) % 3] = 2.0 * coord(i) - 1.0;
                        p[(axis + 2) % 3] = 2.0 * coord(j) - 1.0;
                        out.push(normalize(p));
                    }
                }
            }
        }
    }
    out
}

/// Newton iteration on `∇f = 0` in the tangent frame, with the step clamped.
fn newton(f: &MorseFunction, mut p: Point, grad_tol: f64) -> Option<Point> {
    let m = f.manifold();
    let max_step = match m {
        Manifold::Torus => 0.05,
        _ => 0.2,
    };
    for _ in 0..60 {
        let g = f.gradient_frame(p);
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        let h = f.hessian_frame(p);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let mut step = [
            -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
            -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
        ];
        let sn = (step[0] * step[0] + step[1] * step[1]).sqrt();
        if sn > max_step {
            step = [step[0] * max_step / sn, step[1] * max_step / sn];
        }
        p = m.exp_frame(p, step);
        if gn < 0.01 * grad_tol || sn < 1e-15 {
            break;
        }
    }
    let g = f.gradient_frame(p);
    if (g[0] * g[0] + g[1] * g[1]).sqrt() < grad_tol {
        Some(m.canonical(p))
    } else {
        None
    }
}

/// Sort key: coordinates quantized to 1e-6, torus coordinates taken mod 1.
fn sort_key(m: Manifold, p: Point) -> [i64; 3] {
    let q = |x: f64| (x * 1e6).round() as i64;
    match m {
        Manifold::Torus => [q(p[0]).rem_euclid(1_000_000), q(p[1]).rem_euclid(1_000_000), 0],
        _ => [q(p[0]), q(p[1]), q(p[2])],
    }
}

/// Finds all critical points by grid-seeded Newton iteration, merges
/// duplicates, classifies indices and checks the Euler characteristic.
pub fn find_critical_points(b: &MorseBackend) -> Result<Vec<CriticalPoint>, MorseError> {
    let f = b.function();
    let m = f.manifold();
    let tol = b.tol();
    let mut found: Vec<Point> = Vec::new();
    for s in seeds(m, tol.grid) {
        if let Some(p) = newton(f, s, tol.grad) {
            if !found.iter().any(|q| m.distance(*q, p) < tol.dedup) {
                found.push(p);
            }
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for p in found {
        let h = f.hessian_frame(p);
        let (eig, vecs) = sym2_eigen(h[0][0], h[0][1], h[1][1]);
        if let Some(&l) = eig.iter().find(|l| l.abs() <= tol.degenerate) {
            return Err(MorseError::DegenerateCriticalPoint {
                location: p,
                eigenvalue: l,
            });
        }
        let (u, w) = m.tangent_frame(p);
        let amb = |v: [f64; 2]| -> V3 {
            [
                v[0] * u[0] + v[1] * w[0],
                v[0] * u[1] + v[1] * w[1],
                v[0] * u[2] + v[1] * w[2],
            ]
        };
        out.push(CriticalPoint {
            id: String::new(),
            location: p,
            index: eig.iter().filter(|l| **l < 0.0).count(),
            value: f.value(p),
            eigenvalues: eig,
            eigenvectors: [amb(vecs[0]), amb(vecs[1])],
        });
    }
    out.sort_by(|a, b| {
        a.index
            .cmp(&b.index)
            .then_with(|| sort_key(m, a.location).cmp(&sort_key(m, b.location)))
    });
    let mut counter = [0usize; 3];
    for c in out.iter_mut() {
        c.id = format!("c{}.{}", c.index, counter[c.index]);
        counter[c.index] += 1;
    }
    let alt = counter[0] as i64 - counter[1] as i64 + counter[2] as i64;
    if alt != m.euler_characteristic() {
        return Err(MorseError::EulerMismatch {
            got: alt,
            expected: m.euler_characteristic(),
        });
    }
    Ok(out)
}
