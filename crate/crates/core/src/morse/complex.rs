use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::flow::rk4_step;
use super::{
    find_critical_points, wrap_half, CriticalPoint, Direction, Manifold, MorseBackend, MorseError, MorseFunction,
    Point, Tolerances,
};
use crate::f2::F2Matrix;
use crate::linalg::{add, scale};
use crate::par_map;

/// Morse chain complex over F₂ with the raw trajectory counts behind it.
#[derive(Clone, Debug)]
pub struct MorseComplex {
    pub manifold: Manifold,
    pub critical: Vec<CriticalPoint>,
    /// `generators[k]` lists positions in `critical` of the index-`k` points.
    pub generators: Vec<Vec<usize>>,
    /// `counts[k][i][j]`: trajectories from `generators[k][i]` to
    /// `generators[k-1][j]` (empty for `k = 0`).
    pub counts: Vec<Vec<Vec<u32>>>,
    /// `boundary[k]`: `C_k -> C_{k-1}`, rows indexed by `generators[k-1]`.
    pub boundary: Vec<F2Matrix>,
}

impl MorseComplex {
    pub fn dim(&self) -> usize {
        self.generators.len() - 1
    }

    /// Alternating count of generators.
    pub fn euler_characteristic(&self) -> i64 {
        self.generators
            .iter()
            .enumerate()
            .map(|(k, g)| if k % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
            .sum()
    }

    /// Whether every composite `∂_{k-1} ∘ ∂_k` vanishes.
    pub fn boundary_squares_to_zero(&self) -> bool {
        (2..self.boundary.len()).all(|k| self.boundary[k - 1].mul(&self.boundary[k]).is_zero())
    }
}

/// Critical points lifted to the sphere double cover; torus and sphere points
/// are their own lift.
struct Lifts {
    points: Vec<Point>,
    owner: Vec<usize>,
}

fn lifts(m: Manifold, crit: &[CriticalPoint]) -> Lifts {
    let mut points = Vec::new();
    let mut owner = Vec::new();
    for (i, c) in crit.iter().enumerate() {
        points.push(c.location);
        owner.push(i);
        if m == Manifold::Rp2 {
            points.push(scale(-1.0, c.location));
            owner.push(i);
        }
    }
    Lifts { points, owner }
}

/// Follows `x` to within `eps` of one of `targets` (by lifted distance).
fn follow(
    f: &MorseFunction,
    targets: &[Point],
    x: Point,
    direction: Direction,
    h: f64,
    eps: f64,
    t_max: f64,
) -> Result<usize, MorseError> {
    let m = f.manifold();
    let mut p = x;
    let n = (t_max / h).ceil() as usize;
    for _ in 0..n {
        p = rk4_step(f, p, direction.sign() * h);
        if let Some(i) = targets.iter().position(|t| m.distance(*t, p) < eps) {
            return Ok(i);
        }
    }
    Err(MorseError::NoConvergence { t_max })
}

/// Where a forward trajectory from near an index-2 point ends, read in the
/// universal cover: a minimum lift plus the torus deck translation, or a
/// saddle lift if it lands on a stable separatrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Limit {
    Min(usize, [i64; 2]),
    Saddle(usize),
}

struct Shot {
    limit: Limit,
    /// saddle lift passed most closely, with the distance
    nearest: Option<(usize, f64)>,
}

fn shoot(f: &MorseFunction, lf: &Lifts, crit: &[CriticalPoint], x: Point, tol: &Tolerances) -> Result<Shot, MorseError> {
    let m = f.manifold();
    let mut p = x;
    let mut unwrapped = x;
    let mut nearest: Option<(usize, f64)> = None;
    let n = (tol.t_max / tol.h).ceil() as usize;
    for _ in 0..n {
        let q = rk4_step(f, p, tol.h);
        if m == Manifold::Torus {
            unwrapped[0] += wrap_half(q[0] - p[0]);
            unwrapped[1] += wrap_half(q[1] - p[1]);
        }
        p = q;
        for (j, c) in lf.points.iter().enumerate() {
            let idx = crit[lf.owner[j]].index;
            if idx == 2 {
                continue;
            }
            let d = m.distance(*c, p);
            if idx == 1 && nearest.map_or(true, |(_, best)| d < best) {
                nearest = Some((j, d));
            }
            if d < tol.eps {
                let limit = if idx == 1 {
                    Limit::Saddle(j)
                } else if m == Manifold::Torus {
                    let k = |i: usize| (unwrapped[i] - c[i]).round() as i64;
                    Limit::Min(j, [k(0), k(1)])
                } else {
                    Limit::Min(j, [0, 0])
                };
                return Ok(Shot { limit, nearest });
            }
        }
    }
    Err(MorseError::NoConvergence { t_max: tol.t_max })
}

/// Smallest angular gap at which separatrix bisection stops.
const MIN_GAP: f64 = 1e-13;

/// Counts trajectories from an index-2 point to each saddle. The unstable
/// circle is swept; neighbouring directions whose limits differ in the
/// universal cover straddle a stable separatrix, which bisection locates
/// and attributes to the saddle it runs into.
fn sweep_counts(
    b: &MorseBackend,
    f: &MorseFunction,
    lf: &Lifts,
    crit: &[CriticalPoint],
    top: usize,
) -> Result<Vec<u32>, MorseError> {
    let m = f.manifold();
    let tol = b.tol();
    let p = crit[top].location;
    let (u, w) = m.tangent_frame(p);
    let n = tol.sweep;
    let r = tol.shoot_radius;
    // torus starts stay unwrapped so every direction shares one sheet of the cover
    let start = |th: f64| {
        let v = add(scale(r * th.cos(), u), scale(r * th.sin(), w));
        match m {
            Manifold::Torus => add(p, v),
            _ => m.exp(p, v),
        }
    };
    let angle = |k: usize| core::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
    let base: Vec<Result<Shot, MorseError>> = par_map(n, |k| shoot(f, lf, crit, start(angle(k)), tol));
    let base: Vec<Shot> = base.into_iter().collect::<Result<_, _>>()?;

    let on_saddle = |s: &Shot| match s.limit {
        Limit::Saddle(j) => Some(j),
        Limit::Min(..) => None,
    };
    if base.iter().all(|s| on_saddle(s).is_some()) {
        return Err(MorseError::Transversality(
            "entire unstable circle flows into a saddle".into(),
        ));
    }
    let mut counts = alloc::vec![0u32; crit.len()];
    // directions already on a separatrix: one trajectory per run
    for k in 0..n {
        if let Some(j) = on_saddle(&base[k]) {
            if on_saddle(&base[(k + n - 1) % n]) != Some(j) {
                counts[lf.owner[j]] += 1;
            }
        }
    }
    // gaps between directions with different minimum limits
    let gaps: Vec<usize> = (0..n)
        .filter(|&k| {
            let (a, c) = (&base[k], &base[(k + 1) % n]);
            on_saddle(a).is_none() && on_saddle(c).is_none() && a.limit != c.limit
        })
        .collect();
    let found: Vec<Result<Vec<usize>, MorseError>> = par_map(gaps.len(), |g| {
        let k = gaps[g];
        let lo = angle(k);
        let hi = lo + core::f64::consts::TAU / n as f64;
        let mut out = Vec::new();
        bisect(f, lf, crit, tol, &start, (lo, base[k].limit), (hi, base[(k + 1) % n].limit), &mut out)?;
        Ok(out)
    });
    for hits in found {
        for j in hits? {
            counts[lf.owner[j]] += 1;
        }
    }
    Ok(counts)
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    f: &MorseFunction,
    lf: &Lifts,
    crit: &[CriticalPoint],
    tol: &Tolerances,
    start: &dyn Fn(f64) -> Point,
    lo: (f64, Limit),
    hi: (f64, Limit),
    out: &mut Vec<usize>,
) -> Result<(), MorseError> {
    let mid = 0.5 * (lo.0 + hi.0);
    let shot = shoot(f, lf, crit, start(mid), tol)?;
    if let Limit::Saddle(j) = shot.limit {
        out.push(j);
        return Ok(());
    }
    if hi.0 - lo.0 < MIN_GAP {
        return match shot.nearest {
            Some((j, d)) if d < tol.sweep_radius => {
                out.push(j);
                Ok(())
            }
            _ => Err(MorseError::Transversality(format!(
                "sweep limits change at angle {mid} away from any saddle"
            ))),
        };
    }
    if shot.limit != lo.1 {
        bisect(f, lf, crit, tol, start, lo, (mid, shot.limit), out)?;
    }
    if shot.limit != hi.1 {
        bisect(f, lf, crit, tol, start, (mid, shot.limit), hi, out)?;
    }
    Ok(())
}

/// Builds the Morse complex: index-1 points by shooting along both unstable
/// branches, index-2 points by sweeping the unstable circle.
pub fn morse_boundary(b: &MorseBackend) -> Result<MorseComplex, MorseError> {
    let crit = find_critical_points(b)?;
    let m = b.manifold();
    let f = b.function().lifted();
    let lf = lifts(m, &crit);
    let lifted_m = f.manifold();
    let tol = b.tol();
    let d = m.dim();
    let mut generators = alloc::vec![Vec::new(); d + 1];
    for (i, c) in crit.iter().enumerate() {
        generators[c.index].push(i);
    }
    let mut counts: Vec<Vec<Vec<u32>>> = alloc::vec![Vec::new(); d + 1];

    let min_lifts: Vec<(Point, usize)> = lf
        .points
        .iter()
        .zip(&lf.owner)
        .filter(|(_, &o)| crit[o].index == 0)
        .map(|(p, &o)| (*p, o))
        .collect();
    let others: Vec<(Point, usize)> = lf
        .points
        .iter()
        .zip(&lf.owner)
        .filter(|(_, &o)| crit[o].index != 0)
        .map(|(p, &o)| (*p, o))
        .collect();
    for &s in &generators[1] {
        let c = &crit[s];
        let e = c.unstable_directions()[0];
        let mut row = alloc::vec![0u32; generators[0].len()];
        for sign in [1.0, -1.0] {
            let x = lifted_m.exp(c.location, scale(sign * tol.shoot_radius, e));
            let mut targets: Vec<Point> = min_lifts.iter().map(|t| t.0).collect();
            targets.extend(others.iter().map(|t| t.0));
            let hit = follow(&f, &targets, x, Direction::Forward, tol.h, tol.eps, tol.t_max)?;
            if hit >= min_lifts.len() {
                return Err(MorseError::Transversality(format!(
                    "unstable branch of {} ends at {}",
                    c.id,
                    crit[others[hit - min_lifts.len()].1].id
                )));
            }
            let target = min_lifts[hit].1;
            let j = generators[0].iter().position(|&g| g == target).expect("minimum");
            row[j] += 1;
        }
        counts[1].push(row);
    }
    for &t in &generators[2] {
        let all = sweep_counts(b, &f, &lf, &crit, t)?;
        counts[2].push(generators[1].iter().map(|&s| all[s]).collect());
    }

    let mut boundary = Vec::with_capacity(d + 1);
    boundary.push(F2Matrix::zeros(0, generators[0].len()));
    for k in 1..=d {
        // counts are stored row-per-upper-generator; the matrix is its transpose
        let rows = generators[k - 1].len();
        let cols = generators[k].len();
        let mut mat = F2Matrix::zeros(rows, cols);
        for (i, row) in counts[k].iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                mat.set(j, i, c % 2 == 1);
            }
        }
        boundary.push(mat);
    }
    let complex = MorseComplex {
        manifold: m,
        critical: crit,
        generators,
        counts,
        boundary,
    };
    if !complex.boundary_squares_to_zero() {
        return Err(MorseError::Transversality("boundary does not square to zero".into()));
    }
    Ok(complex)
}

/// Independent count of index-2 to index-1 trajectories: follow both stable
/// branches of each saddle backward to the index-2 point they came from.
/// Returns `counts[t][s]` indexed like `MorseComplex::counts[2]`.
pub fn separatrix_boundary_counts(b: &MorseBackend) -> Result<Vec<Vec<u32>>, MorseError> {
    let crit = find_critical_points(b)?;
    let m = b.manifold();
    let f = b.function().lifted();
    let lf = lifts(m, &crit);
    let tol = b.tol();
    let tops: Vec<usize> = (0..crit.len()).filter(|&i| crit[i].index == 2).collect();
    let saddles: Vec<usize> = (0..crit.len()).filter(|&i| crit[i].index == 1).collect();
    let mut counts = alloc::vec![alloc::vec![0u32; saddles.len()]; tops.len()];
    for (j, &s) in saddles.iter().enumerate() {
        let c = &crit[s];
        let e = c.stable_directions()[0];
        for sign in [1.0, -1.0] {
            let x = f.manifold().exp(c.location, scale(sign * tol.shoot_radius, e));
            let hit = follow(&f, &lf.points, x, Direction::Backward, tol.h, tol.eps, tol.t_max)?;
            let owner = lf.owner[hit];
            match tops.iter().position(|&t| t == owner) {
                Some(i) => counts[i][j] += 1,
                None => {
                    return Err(MorseError::Transversality(format!(
                        "stable branch of {} comes from {}",
                        c.id, crit[owner].id
                    )))
                }
            }
        }
    }
    Ok(counts)
}

/// Betti numbers over F₂: `dim ker ∂_k - rank ∂_{k+1}`.
pub fn homology_ranks(c: &MorseComplex) -> Vec<usize> {
    let d = c.dim();
    let rank: Vec<usize> = c.boundary.iter().map(F2Matrix::rank).collect();
    (0..=d)
        .map(|k| {
            let n = c.generators[k].len();
            let next = if k < d { rank[k + 1] } else { 0 };
            n - rank[k] - next
        })
        .collect()
}
