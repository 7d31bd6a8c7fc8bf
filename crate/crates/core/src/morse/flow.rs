use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{CriticalPoint, Manifold, MorseBackend, MorseError, MorseFunction, Point};
use crate::linalg::{axpy, normalize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Along `-∇f`.
    Forward,
    /// Along `+∇f`.
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, Point)>,
    pub function: alloc::string::String,
    pub direction: Direction,
}

impl Trajectory {
    pub fn endpoint(&self) -> Point {
        self.samples.last().expect("trajectory has a sample").1
    }
}

#[inline]
fn velocity(f: &MorseFunction, p: Point, sign: f64) -> Point {
    let q = match f.manifold() {
        Manifold::Torus => p,
        _ => normalize(p),
    };
    let g = f.gradient(q);
    [-sign * g[0], -sign * g[1], -sign * g[2]]
}

/// One classical RK4 step of `dp/dt = -∇f` with signed step `dt`
/// (negative `dt` flows backward). Sphere points are renormalized.
#[inline]
pub fn rk4_step(f: &MorseFunction, p: Point, dt: f64) -> Point {
    let k1 = velocity(f, p, 1.0);
    let k2 = velocity(f, axpy(p, 0.5 * dt, k1), 1.0);
    let k3 = velocity(f, axpy(p, 0.5 * dt, k2), 1.0);
    let k4 = velocity(f, axpy(p, dt, k3), 1.0);
    let mut q = p;
    for i in 0..3 {
        q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    f.manifold().project(q)
}

fn steps_for(t: f64, h: f64) -> usize {
    ((t.abs() / h).ceil() as usize).max(1)
}

/// Time-`t` flow of `-∇f` from `p`, using steps of at most `h`. Negative `t`
/// flows backward.
pub fn flow_point(f: &MorseFunction, p: Point, t: f64, h: f64) -> Point {
    if t == 0.0 {
        return p;
    }
    let n = steps_for(t, h);
    let dt = t / n as f64;
    let mut q = p;
    for _ in 0..n {
        q = rk4_step(f, q, dt);
    }
    q
}

/// Samples of the flow from `x0` for duration `t` in the given direction.
pub fn integrate_trajectory(
    b: &MorseBackend,
    x0: Point,
    t: f64,
    direction: Direction,
) -> Result<Trajectory, MorseError> {
    if t < 0.0 {
        return Err(MorseError::NegativeDuration(t));
    }
    let f = b.function();
    let mut samples = Vec::new();
    samples.push((0.0, x0));
    if t > 0.0 {
        let n = steps_for(t, b.tol().h);
        let dt = t / n as f64;
        let mut q = x0;
        for i in 1..=n {
            q = rk4_step(f, q, direction.sign() * dt);
            if q.iter().any(|c| !c.is_finite()) {
                return Err(MorseError::NonFinite);
            }
            samples.push((i as f64 * dt, q));
        }
    }
    Ok(Trajectory {
        samples,
        function: f.key().into(),
        direction,
    })
}

/// Follows the flow until it comes within `eps` of a critical point, returning
/// that point's position in `crit`.
pub fn limit_critical_point(
    b: &MorseBackend,
    crit: &[CriticalPoint],
    x: Point,
    direction: Direction,
) -> Result<usize, MorseError> {
    let t = b.tol();
    limit_critical_point_with(b.function(), crit, x, direction, t.h, t.eps, t.t_max)
}

pub fn limit_critical_point_with(
    f: &MorseFunction,
    crit: &[CriticalPoint],
    x: Point,
    direction: Direction,
    h: f64,
    eps: f64,
    t_max: f64,
) -> Result<usize, MorseError> {
    let m = f.manifold();
    let near = |p: Point| crit.iter().position(|c| m.distance(c.location, p) < eps);
    let mut p = x;
    if let Some(i) = near(p) {
        return Ok(i);
    }
    let n = (t_max / h).ceil() as usize;
    let dt = direction.sign() * h;
    for _ in 0..n {
        p = rk4_step(f, p, dt);
        if p.iter().any(|c| !c.is_finite()) {
            return Err(MorseError::NonFinite);
        }
        if let Some(i) = near(p) {
            return Ok(i);
        }
    }
    Err(MorseError::NoConvergence { t_max })
}

/// Polyline of the flow from `x0` with step `h` until it reaches a point of
/// `targets` (within `eps`), which is appended. Returns the polyline and the
/// reached index, or `None` if `t_max` ran out.
pub fn trace_to_limit(
    f: &MorseFunction,
    targets: &[Point],
    x0: Point,
    direction: Direction,
    h: f64,
    eps: f64,
    t_max: f64,
) -> (Vec<Point>, Option<usize>) {
    let m = f.manifold();
    let mut p = x0;
    let mut out = Vec::new();
    out.push(p);
    let n = (t_max / h).ceil() as usize;
    for _ in 0..n {
        p = rk4_step(f, p, direction.sign() * h);
        out.push(p);
        if let Some(i) = targets.iter().position(|c| m.distance(*c, p) < eps) {
            out.push(targets[i]);
            return (out, Some(i));
        }
    }
    (out, None)
}
