//! Small fixed-size vector helpers on `[f64; 3]`.

#[allow(unused_imports)]
use num_traits::Float;

pub type V3 = [f64; 3];
pub type M3 = [[f64; 3]; 3];

#[inline]
pub fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(s: f64, a: V3) -> V3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// `a + s b`
#[inline]
pub fn axpy(a: V3, s: f64, b: V3) -> V3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn normalize(a: V3) -> V3 {
    scale(1.0 / norm(a), a)
}

pub fn mat_vec(m: &M3, v: V3) -> V3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// `uᵀ M w`
pub fn bilinear(m: &M3, u: V3, w: V3) -> f64 {
    dot(u, mat_vec(m, w))
}

/// Eigenvalues and unit eigenvectors of a symmetric 2x2 matrix, ascending.
pub fn sym2_eigen(a: f64, b: f64, c: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    // [[a, b], [b, c]]
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l0, l1) = (mean - r, mean + r);
    let vec_for = |l: f64| -> [f64; 2] {
        // (a - l) x + b y = 0, pick the better-conditioned row
        let (x, y) = if (a - l).abs() + b.abs() >= (c - l).abs() + b.abs() {
            (b, l - a)
        } else {
            (l - c, b)
        };
        let n = (x * x + y * y).sqrt();
        if n < 1e-300 {
            [1.0, 0.0]
        } else {
            [x / n, y / n]
        }
    };
    let v0 = if r < 1e-300 { [1.0, 0.0] } else { vec_for(l0) };
    let v1 = [-v0[1], v0[0]];
    ([l0, l1], [v0, v1])
}

/// Rotation from z-y-z Euler angles.
pub fn euler_zyz(alpha: f64, beta: f64, gamma: f64) -> M3 {
    let rz = |t: f64| -> M3 {
        let (s, c) = t.sin_cos();
        [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
    };
    let (s, c) = beta.sin_cos();
    let ry: M3 = [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]];
    mat_mul(&mat_mul(&rz(alpha), &ry), &rz(gamma))
}
