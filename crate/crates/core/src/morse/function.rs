use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Manifold, MorseError, Point};
use crate::linalg::{bilinear, dot, euler_zyz, mat_mul, mat_vec, normalize, transpose, M3, V3};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    /// `amp (cos 2π(x - sx) + cos 2π(y - sy))`
    TorusCos { amp: f64, shift: [f64; 2] },
    /// `amp <dir, p>`
    Height { amp: f64, dir: V3 },
    /// `pᵀ Q p`
    Quadratic { q: M3 },
}

/// Low-frequency harmonic added with weight `delta`.
#[derive(Clone, Debug, PartialEq)]
enum Perturbation {
    None,
    /// Σ c cos(2π(i x + j y) + φ)
    Torus(Vec<([f64; 2], f64, f64)>),
    /// `<b, p> + pᵀ S p`
    Sphere { b: V3, s: M3 },
}

/// An entry of the Morse-function catalog with its parameters bound.
#[derive(Clone, Debug, PartialEq)]
pub struct MorseFunction {
    manifold: Manifold,
    key: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
    delta: f64,
    perturbation: Perturbation,
}

/// Catalog keys available on a manifold.
pub fn catalog_keys(m: Manifold) -> &'static [&'static str] {
    match m {
        Manifold::Torus => &["cos"],
        Manifold::Sphere => &["height", "quadratic"],
        Manifold::Rp2 => &["quadratic"],
    }
}

/// Parameter names and defaults of a catalog entry.
pub fn catalog_params(m: Manifold, key: &str) -> Option<&'static [(&'static str, f64)]> {
    match (m, key) {
        (Manifold::Torus, "cos") => Some(&[
            ("amp", 1.0),
            ("shift_x", 0.0),
            ("shift_y", 0.0),
            ("delta", 0.0),
            ("seed", 0.0),
        ]),
        (Manifold::Sphere, "height") => Some(&[
            ("amp", 1.0),
            ("dir_x", 0.0),
            ("dir_y", 0.0),
            ("dir_z", 1.0),
            ("delta", 0.0),
            ("seed", 0.0),
        ]),
        (Manifold::Sphere | Manifold::Rp2, "quadratic") => Some(&[
            ("a", 1.0),
            ("b", 2.0),
            ("c", 3.0),
            ("alpha", 0.0),
            ("beta", 0.0),
            ("gamma", 0.0),
            ("delta", 0.0),
            ("seed", 0.0),
        ]),
        _ => None,
    }
}

impl MorseFunction {
    /// Looks up `key` in the catalog of `manifold` and binds parameters,
    /// rejecting unknown parameter names.
    pub fn from_catalog(
        manifold: Manifold,
        key: &str,
        params: &BTreeMap<String, f64>,
    ) -> Result<Self, MorseError> {
        let spec = catalog_params(manifold, key).ok_or_else(|| MorseError::UnknownFunction {
            manifold,
            key: key.to_string(),
        })?;
        for name in params.keys() {
            if !spec.iter().any(|(n, _)| n == name) {
                return Err(MorseError::UnknownParameter {
                    key: key.to_string(),
                    param: name.clone(),
                });
            }
        }
        let mut full = BTreeMap::new();
        for (name, default) in spec {
            let v = params.get(*name).copied().unwrap_or(*default);
            if !v.is_finite() {
                return Err(MorseError::UnknownParameter {
                    key: key.to_string(),
                    param: name.to_string(),
                });
            }
            full.insert(name.to_string(), v);
        }
        let p = |n: &str| full[n];
        let kind = match key {
            "cos" => Kind::TorusCos {
                amp: p("amp"),
                shift: [p("shift_x"), p("shift_y")],
            },
            "height" => {
                let dir = [p("dir_x"), p("dir_y"), p("dir_z")];
                if crate::linalg::norm(dir) < 1e-12 {
                    return Err(MorseError::UnknownParameter {
                        key: key.into(),
                        param: "dir".into(),
                    });
                }
                Kind::Height {
                    amp: p("amp"),
                    dir: normalize(dir),
                }
            }
            _ => {
                let r = euler_zyz(p("alpha"), p("beta"), p("gamma"));
                let d: M3 = [[p("a"), 0.0, 0.0], [0.0, p("b"), 0.0], [0.0, 0.0, p("c")]];
                Kind::Quadratic {
                    q: mat_mul(&mat_mul(&r, &d), &transpose(&r)),
                }
            }
        };
        let delta = p("delta");
        let seed = p("seed") as u64;
        let perturbation = if delta == 0.0 {
            Perturbation::None
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match manifold {
                Manifold::Torus => Perturbation::Torus(
                    [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
                        .into_iter()
                        .map(|mode| (mode, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TWO_PI)))
                        .collect(),
                ),
                _ => {
                    let mut s = [[0.0; 3]; 3];
                    for i in 0..3 {
                        for j in i..3 {
                            let x = rng.gen_range(-1.0..1.0);
                            s[i][j] = x;
                            s[j][i] = x;
                        }
                    }
                    // linear terms would break antipodal symmetry on RP²
                    let b = if manifold == Manifold::Sphere {
                        [
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                        ]
                    } else {
                        [0.0; 3]
                    };
                    Perturbation::Sphere { b, s }
                }
            }
        };
        Ok(MorseFunction {
            manifold,
            key: key.to_string(),
            params: full,
            kind,
            delta,
            perturbation,
        })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    /// Parameters with defaults filled in.
    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn value(&self, p: Point) -> f64 {
        let base = match &self.kind {
            Kind::TorusCos { amp, shift } => {
                amp * ((TWO_PI * (p[0] - shift[0])).cos() + (TWO_PI * (p[1] - shift[1])).cos())
            }
            Kind::Height { amp, dir } => amp * dot(*dir, p),
            Kind::Quadratic { q } => bilinear(q, p, p),
        };
        base + self.delta
            * match &self.perturbation {
                Perturbation::None => 0.0,
                Perturbation::Torus(terms) => terms
                    .iter()
                    .map(|(m, c, ph)| c * (TWO_PI * (m[0] * p[0] + m[1] * p[1]) + ph).cos())
                    .sum(),
                Perturbation::Sphere { b, s } => dot(*b, p) + bilinear(s, p, p),
            }
    }

    /// Euclidean gradient in ambient coordinates (third entry zero on the torus).
    pub fn ambient_gradient(&self, p: Point) -> V3 {
        let mut g = match &self.kind {
            Kind::TorusCos { amp, shift } => [
                -TWO_PI * amp * (TWO_PI * (p[0] - shift[0])).sin(),
                -TWO_PI * amp * (TWO_PI * (p[1] - shift[1])).sin(),
                0.0,
            ],
            Kind::Height { amp, dir } => [amp * dir[0], amp * dir[1], amp * dir[2]],
            Kind::Quadratic { q } => {
                let v = mat_vec(q, p);
                [2.0 * v[0], 2.0 * v[1], 2.0 * v[2]]
            }
        };
        match &self.perturbation {
            Perturbation::None => {}
            Perturbation::Torus(terms) => {
                for (m, c, ph) in terms {
                    let s = (TWO_PI * (m[0] * p[0] + m[1] * p[1]) + ph).sin();
                    g[0] -= self.delta * TWO_PI * m[0] * c * s;
                    g[1] -= self.delta * TWO_PI * m[1] * c * s;
                }
            }
            Perturbation::Sphere { b, s } => {
                let sp = mat_vec(s, p);
                for i in 0..3 {
                    g[i] += self.delta * (b[i] + 2.0 * sp[i]);
                }
            }
        }
        g
    }

    /// Euclidean Hessian in ambient coordinates.
    pub fn ambient_hessian(&self, p: Point) -> M3 {
        let mut h = match &self.kind {
            Kind::TorusCos { amp, shift } => {
                let k = -TWO_PI * TWO_PI * amp;
                [
                    [k * (TWO_PI * (p[0] - shift[0])).cos(), 0.0, 0.0],
                    [0.0, k * (TWO_PI * (p[1] - shift[1])).cos(), 0.0],
                    [0.0, 0.0, 0.0],
                ]
            }
            Kind::Height { .. } => [[0.0; 3]; 3],
            Kind::Quadratic { q } => {
                let mut out = *q;
                for row in out.iter_mut() {
                    for x in row.iter_mut() {
                        *x *= 2.0;
                    }
                }
                out
            }
        };
        match &self.perturbation {
            Perturbation::None => {}
            Perturbation::Torus(terms) => {
                for (m, c, ph) in terms {
                    let cs = (TWO_PI * (m[0] * p[0] + m[1] * p[1]) + ph).cos();
                    let k = -self.delta * TWO_PI * TWO_PI * c * cs;
                    h[0][0] += k * m[0] * m[0];
                    h[0][1] += k * m[0] * m[1];
                    h[1][0] += k * m[0] * m[1];
                    h[1][1] += k * m[1] * m[1];
                }
            }
            Perturbation::Sphere { s, .. } => {
                for i in 0..3 {
                    for j in 0..3 {
                        h[i][j] += 2.0 * self.delta * s[i][j];
                    }
                }
            }
        }
        h
    }

    /// Riemannian gradient as an ambient tangent vector.
    #[inline]
    pub fn gradient(&self, p: Point) -> V3 {
        let g = self.ambient_gradient(p);
        match self.manifold {
            Manifold::Torus => g,
            _ => {
                let c = dot(g, p);
                [g[0] - c * p[0], g[1] - c * p[1], g[2] - c * p[2]]
            }
        }
    }

    /// Riemannian gradient in the tangent frame at `p`.
    pub fn gradient_frame(&self, p: Point) -> [f64; 2] {
        let g = self.gradient(p);
        let (u, w) = self.manifold.tangent_frame(p);
        [dot(g, u), dot(g, w)]
    }

    /// Riemannian Hessian `[[h_uu, h_uw], [h_wu, h_ww]]` in the tangent frame at `p`.
    pub fn hessian_frame(&self, p: Point) -> [[f64; 2]; 2] {
        let h = self.ambient_hessian(p);
        let (u, w) = self.manifold.tangent_frame(p);
        let shift = match self.manifold {
            Manifold::Torus => 0.0,
            _ => dot(self.ambient_gradient(p), p),
        };
        let huu = bilinear(&h, u, u) - shift;
        let huw = bilinear(&h, u, w);
        let hww = bilinear(&h, w, w) - shift;
        [[huu, huw], [huw, hww]]
    }

    /// The same function viewed on the sphere double cover (identity off RP²).
    pub fn lifted(&self) -> MorseFunction {
        let mut f = self.clone();
        if f.manifold == Manifold::Rp2 {
            f.manifold = Manifold::Sphere;
        }
        f
    }

    /// Whether the function is invariant under `p -> -p` (required on RP²).
    pub fn is_even(&self) -> bool {
        match (&self.kind, &self.perturbation) {
            (Kind::Quadratic { .. }, Perturbation::None) => true,
            (Kind::Quadratic { .. }, Perturbation::Sphere { b, .. }) => *b == [0.0; 3],
            _ => false,
        }
    }
}
