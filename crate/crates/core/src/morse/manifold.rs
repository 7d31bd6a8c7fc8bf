use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use super::{MorseError, Point};
use crate::linalg::{add, axpy, cross, dot, norm, normalize, scale, sub, V3};

/// The closed surfaces in the catalog.
///
/// Torus points are `[x, y, 0]` with coordinates mod 1 and the flat metric of
/// the unit square. Sphere points are unit vectors. Projective-plane points are
/// unit vectors up to sign; everything is computed on the sphere lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Manifold {
    Torus,
    Sphere,
    Rp2,
}

impl FromStr for Manifold {
    type Err = MorseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "torus" => Ok(Manifold::Torus),
            "sphere" => Ok(Manifold::Sphere),
            "rp2" => Ok(Manifold::Rp2),
            other => Err(MorseError::UnknownManifold(other.into())),
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::Torus => "torus",
            Manifold::Sphere => "sphere",
            Manifold::Rp2 => "rp2",
        })
    }
}

fn wrap_unit(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Wraps into `(-1/2, 1/2]`.
pub fn wrap_half(x: f64) -> f64 {
    let y = x - x.round();
    if y <= -0.5 {
        y + 1.0
    } else {
        y
    }
}

impl Manifold {
    pub fn dim(&self) -> usize {
        2
    }

    pub fn euler_characteristic(&self) -> i64 {
        match self {
            Manifold::Torus => 0,
            Manifold::Sphere => 2,
            Manifold::Rp2 => 1,
        }
    }

    /// Number of coordinates in the stored representation.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Manifold::Torus => 2,
            _ => 3,
        }
    }

    pub fn is_spherical(&self) -> bool {
        !matches!(self, Manifold::Torus)
    }

    /// Canonical representative: torus coordinates in `[0,1)`, unit vectors,
    /// and for the projective plane the sign with first nonzero coordinate positive.
    pub fn canonical(&self, p: Point) -> Point {
        match self {
            Manifold::Torus => [wrap_unit(p[0]), wrap_unit(p[1]), 0.0],
            Manifold::Sphere => normalize(p),
            Manifold::Rp2 => {
                let q = normalize(p);
                let first = q.iter().copied().find(|c| *c != 0.0).unwrap_or(1.0);
                if first < 0.0 {
                    scale(-1.0, q)
                } else {
                    q
                }
            }
        }
    }

    /// Orthonormal tangent frame at `p`. On the sphere the frame is built from
    /// the coordinate axis least aligned with `p`.
    pub fn tangent_frame(&self, p: Point) -> (V3, V3) {
        match self {
            Manifold::Torus => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            _ => {
                let k = (0..3)
                    .min_by(|&i, &j| p[i].abs().partial_cmp(&p[j].abs()).unwrap_or(core::cmp::Ordering::Equal))
                    .unwrap_or(0);
                let mut a = [0.0; 3];
                a[k] = 1.0;
                let u = normalize(axpy(a, -dot(a, p), p));
                let w = cross(p, u);
                (u, w)
            }
        }
    }

    /// Exponential map: move from `p` along the ambient tangent vector `v`.
    pub fn exp(&self, p: Point, v: V3) -> Point {
        match self {
            Manifold::Torus => [wrap_unit(p[0] + v[0]), wrap_unit(p[1] + v[1]), 0.0],
            _ => {
                let t = norm(v);
                if t < 1e-300 {
                    return p;
                }
                let (s, c) = t.sin_cos();
                normalize(add(scale(c, p), scale(s / t, v)))
            }
        }
    }

    /// Exponential map in frame coordinates at `p`.
    pub fn exp_frame(&self, p: Point, v: [f64; 2]) -> Point {
        let (u, w) = self.tangent_frame(p);
        self.exp(p, add(scale(v[0], u), scale(v[1], w)))
    }

    /// Logarithm at `p` as an ambient tangent vector. On the sphere an exactly
    /// antipodal `q` has no unique logarithm; the first frame direction is used.
    pub fn log(&self, p: Point, q: Point) -> V3 {
        match self {
            Manifold::Torus => [wrap_half(q[0] - p[0]), wrap_half(q[1] - p[1]), 0.0],
            Manifold::Sphere => sphere_log(p, q, || self.tangent_frame(p).0),
            Manifold::Rp2 => {
                let q = if dot(p, q) < 0.0 { scale(-1.0, q) } else { q };
                sphere_log(p, q, || self.tangent_frame(p).0)
            }
        }
    }

    /// Chart difference `log_p(q)` in frame coordinates at `p`.
    pub fn chart_diff(&self, p: Point, q: Point) -> [f64; 2] {
        let v = self.log(p, q);
        match self {
            Manifold::Torus => [v[0], v[1]],
            _ => {
                let (u, w) = self.tangent_frame(p);
                [dot(v, u), dot(v, w)]
            }
        }
    }

    pub fn distance(&self, p: Point, q: Point) -> f64 {
        match self {
            Manifold::Torus => {
                let dx = wrap_half(q[0] - p[0]);
                let dy = wrap_half(q[1] - p[1]);
                (dx * dx + dy * dy).sqrt()
            }
            Manifold::Sphere => sphere_angle(p, q),
            Manifold::Rp2 => sphere_angle(p, q).min(PI - sphere_angle(p, q)),
        }
    }

    /// Projects a tangent-space perturbation of an ambient point back onto the
    /// manifold (renormalization on the sphere, wrapping on the torus).
    pub fn project(&self, p: Point) -> Point {
        match self {
            Manifold::Torus => [wrap_unit(p[0]), wrap_unit(p[1]), 0.0],
            _ => normalize(p),
        }
    }
}

fn sphere_angle(p: Point, q: Point) -> f64 {
    norm(cross(p, q)).atan2(dot(p, q))
}

fn sphere_log(p: Point, q: Point, fallback: impl Fn() -> V3) -> V3 {
    let c = dot(p, q);
    let perp = sub(q, scale(c, p));
    let s = norm(perp);
    let theta = s.atan2(c);
    if s < 1e-300 {
        if c > 0.0 {
            return [0.0; 3];
        }
        return scale(PI, fallback());
    }
    scale(theta / s, perp)
}
