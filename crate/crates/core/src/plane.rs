//! Plane domains bounded by the unit circle (or nothing) and round holes or
//! punctures: boundary distance, quasihyperbolic length and distance,
//! round-annulus moduli and model Poincaré densities.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Error, Result};

/// Relative change between successive quadrature estimates that stops refinement.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Smallest inner radius, relative to the domain scale, tried by the modulus search.
pub const MIN_ANNULUS_RADIUS: f64 = 1e-6;
/// Coarsest endpoint attachment cell, as a fraction of the grid box width.
const COARSEST_ATTACHMENT: usize = 16;
/// Largest outer radius, relative to the domain scale, tried when the outer boundary is at infinity.
pub const MAX_ANNULUS_RADIUS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outer {
    UnitDisk,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneHole {
    Disk { center: Complex64, radius: f64 },
    Point(Complex64),
}

impl PlaneHole {
    fn center(&self) -> Complex64 {
        match *self {
            Self::Disk { center, .. } => center,
            Self::Point(p) => p,
        }
    }

    fn radius(&self) -> f64 {
        match *self {
            Self::Disk { radius, .. } => radius,
            Self::Point(_) => 0.0,
        }
    }
}

/// `outer` minus closed round disks and points. `grid` is the number of
/// cells per side used by [`quasihyperbolic_distance`] (a power of two, at least 16).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneDomain {
    outer: Outer,
    holes: Vec<PlaneHole>,
    grid: usize,
}

fn seg_point_distance(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (c - a).norm();
    }
    let t = (((c - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - c).norm()
}

impl PlaneDomain {
    pub fn new(outer: Outer, holes: Vec<PlaneHole>, grid: usize) -> Result<Self> {
        if grid < COARSEST_ATTACHMENT || !grid.is_power_of_two() {
            return param(format!("grid must be a power of two ≥ {COARSEST_ATTACHMENT}, got {grid}"));
        }
        for (i, h) in holes.iter().enumerate() {
            let (c, r) = (h.center(), h.radius());
            if !(c.re.is_finite() && c.im.is_finite() && r.is_finite() && r >= 0.0) {
                return param(format!("hole {i} is malformed"));
            }
            if matches!(h, PlaneHole::Disk { .. }) && r <= 0.0 {
                return param(format!("disk hole {i} needs a positive radius"));
            }
            if outer == Outer::UnitDisk && c.norm() + r >= 1.0 {
                return param(format!("hole {i} is not strictly inside the unit disk"));
            }
            for (j, g) in holes[..i].iter().enumerate() {
                if (c - g.center()).norm() <= r + g.radius() {
                    return param(format!("holes {j} and {i} intersect"));
                }
            }
        }
        if outer == Outer::Plane && holes.is_empty() {
            return param("the whole plane has no finite boundary");
        }
        Ok(Self { outer, holes, grid })
    }

    pub fn unit_disk() -> Self {
        Self::new(Outer::UnitDisk, Vec::new(), 256).expect("valid")
    }

    pub fn outer(&self) -> Outer {
        self.outer
    }

    pub fn holes(&self) -> &[PlaneHole] {
        &self.holes
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn with_grid(&self, grid: usize) -> Result<Self> {
        Self::new(self.outer, self.holes.clone(), grid)
    }

    /// Signed distance to the boundary (non-positive outside the domain).
    fn raw_distance(&self, z: Complex64) -> f64 {
        let mut d = match self.outer {
            Outer::UnitDisk => 1.0 - z.norm(),
            Outer::Plane => f64::INFINITY,
        };
        for h in &self.holes {
            d = d.min((z - h.center()).norm() - h.radius());
        }
        d
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.raw_distance(z) > 0.0
    }

    fn segment_inside(&self, a: Complex64, b: Complex64) -> bool {
        self.contains(a)
            && self.contains(b)
            && self
                .holes
                .iter()
                .all(|h| seg_point_distance(a, b, h.center()) > h.radius())
    }

    /// Quasihyperbolic length of the segment `[a, b]`, assumed inside the domain.
    fn segment_length(&self, a: Complex64, b: Complex64) -> f64 {
        let len = (b - a).norm();
        if len == 0.0 {
            return 0.0;
        }
        let midpoint = |n: usize| {
            let step = 1.0 / n as f64;
            (0..n)
                .map(|i| 1.0 / self.raw_distance(a + (b - a) * ((i as f64 + 0.5) * step)))
                .sum::<f64>()
                * len
                * step
        };
        let mut n = 1;
        let mut coarse = midpoint(n);
        let mut prev: Option<f64> = None;
        loop {
            n *= 2;
            let fine = midpoint(n);
            let est = fine + (fine - coarse) / 3.0;
            if let Some(p) = prev {
                if (est - p).abs() <= QUADRATURE_TOL * est.abs() || n >= 1 << 20 {
                    return est;
                }
            }
            prev = Some(est);
            coarse = fine;
        }
    }

    fn scale(&self) -> f64 {
        match self.outer {
            Outer::UnitDisk => 1.0,
            Outer::Plane => self
                .holes
                .iter()
                .flat_map(|h| self.holes.iter().map(move |g| (h.center() - g.center()).norm() + h.radius() + g.radius()))
                .fold(0.0, f64::max)
                .max(self.holes.iter().map(|h| h.radius()).fold(0.0, f64::max))
                .max(1.0),
        }
    }
}

/// `δ_Ω(z)`, the Euclidean distance from `z` to the boundary.
pub fn boundary_distance(domain: &PlaneDomain, z: Complex64) -> Result<f64> {
    let d = domain.raw_distance(z);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::Domain(format!("{z} is not in the domain")))
    }
}

/// `∫_γ |dz| / δ_Ω(z)` along a polyline, with adaptive midpoint quadrature
/// on each segment.
pub fn quasihyperbolic_length(domain: &PlaneDomain, polyline: &[Complex64]) -> Result<f64> {
    if let [p] = polyline {
        boundary_distance(domain, *p)?;
    }
    let mut total = 0.0;
    for (i, w) in polyline.windows(2).enumerate() {
        if !domain.segment_inside(w[0], w[1]) {
            return Err(Error::Domain(format!(
                "segment {i} from {} to {} leaves the domain",
                w[0], w[1]
            )));
        }
        total += domain.segment_length(w[0], w[1]);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinLenReport {
    pub quasihyperbolic_length: f64,
    pub euclidean_length: f64,
    pub start_distance: f64,
    /// `log(1 + s / δ(x))`.
    pub bound: f64,
    pub pass: bool,
}

/// Compares the quasihyperbolic length of a curve starting at `x` with
/// `log(1 + s/δ_Ω(x))`, `s` its Euclidean length.
pub fn check_minlen_bound(domain: &PlaneDomain, polyline: &[Complex64]) -> Result<MinLenReport> {
    let Some(&x) = polyline.first() else {
        return param("empty polyline");
    };
    let k = quasihyperbolic_length(domain, polyline)?;
    let s: f64 = polyline.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let dx = boundary_distance(domain, x)?;
    let bound = (s / dx).ln_1p();
    Ok(MinLenReport {
        quasihyperbolic_length: k,
        euclidean_length: s,
        start_distance: dx,
        bound,
        pass: k >= bound - 1e-9,
    })
}

/// `count` random polylines in the domain with up to `max_segments` segments
/// of Euclidean length at most `max_step` each. Polyline `i` is drawn from
/// stream `i` of a generator seeded with `seed`.
pub fn random_polylines(
    domain: &PlaneDomain,
    count: usize,
    max_segments: usize,
    max_step: f64,
    seed: u64,
) -> Result<Vec<Vec<Complex64>>> {
    if max_segments == 0 || !(max_step > 0.0) {
        return param("need at least one segment and a positive step");
    }
    let (center, half) = match domain.outer {
        Outer::UnitDisk => (Complex64::new(0.0, 0.0), 1.0),
        Outer::Plane => {
            let c = domain.holes.iter().map(|h| h.center()).sum::<Complex64>() / domain.holes.len() as f64;
            (c, domain.scale())
        }
    };
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut start = None;
            for _ in 0..10_000 {
                let z = center + Complex64::new(rng.random_range(-half..half), rng.random_range(-half..half));
                if domain.contains(z) {
                    start = Some(z);
                    break;
                }
            }
            let mut line = vec![start.ok_or_else(|| Error::Domain("could not sample a start point".into()))?];
            let segments = rng.random_range(1..=max_segments);
            for _ in 0..segments {
                let last = *line.last().unwrap();
                for _ in 0..100 {
                    let step = Complex64::from_polar(rng.random_range(0.0..max_step), rng.random_range(0.0..2.0 * PI));
                    if domain.segment_inside(last, last + step) {
                        line.push(last + step);
                        break;
                    }
                }
            }
            Ok(line)
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

struct Grid {
    cells: usize,
    origin: Complex64,
    step: f64,
}

impl Grid {
    fn new(domain: &PlaneDomain, z: Complex64, w: Complex64) -> Self {
        let cells = domain.grid;
        let (origin, width) = match domain.outer {
            Outer::UnitDisk => (Complex64::new(-1.0, -1.0), 2.0),
            Outer::Plane => {
                let pts: Vec<Complex64> = domain.holes.iter().map(|h| h.center()).chain([z, w]).collect();
                let c = pts.iter().sum::<Complex64>() / pts.len() as f64;
                let half = 2.0 * pts.iter().map(|p| (p - c).norm()).fold(0.0, f64::max) + domain.scale();
                (c - Complex64::new(half, half), 2.0 * half)
            }
        };
        Self {
            cells,
            origin,
            step: width / cells as f64,
        }
    }

    fn point(&self, v: usize) -> Complex64 {
        let n = self.cells + 1;
        self.origin + Complex64::new((v % n) as f64, (v / n) as f64) * self.step
    }

    /// Corners of the cells containing `z` at every dyadic coarsening of the
    /// grid down to cells of `1/COARSEST_ATTACHMENT` of the box.
    fn attachments(&self, z: Complex64) -> Vec<usize> {
        let n = self.cells + 1;
        let rel = (z - self.origin) / self.step;
        let mut out = Vec::new();
        let mut stride = 1;
        while stride <= self.cells / COARSEST_ATTACHMENT {
            let cell = |x: f64| ((x / stride as f64).floor().max(0.0) as usize).min(self.cells / stride - 1) * stride;
            let (i, j) = (cell(rel.re), cell(rel.im));
            for (di, dj) in [(0, 0), (stride, 0), (0, stride), (stride, stride)] {
                out.push((j + dj) * n + i + di);
            }
            stride *= 2;
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Quasihyperbolic distance along the 8-neighbour grid graph of the domain,
/// with each edge weighted by its quasihyperbolic length. The endpoints are
/// joined to the corners of their grid cells at every dyadic level, so a
/// finer power-of-two grid contains every path of a coarser one.
pub fn quasihyperbolic_distance(domain: &PlaneDomain, z: Complex64, w: Complex64) -> Result<f64> {
    boundary_distance(domain, z)?;
    boundary_distance(domain, w)?;
    if z == w {
        return Ok(0.0);
    }
    let grid = Grid::new(domain, z, w);
    let n = grid.cells + 1;
    let count = n * n;
    let (src, dst) = (count, count + 1);
    let mut dist = vec![f64::INFINITY; count + 2];
    let mut done = vec![false; count + 2];
    let mut heap = BinaryHeap::new();
    let mut to_target = std::collections::HashMap::new();
    for v in grid.attachments(w) {
        let p = grid.point(v);
        if domain.segment_inside(p, w) {
            to_target.insert(v, domain.segment_length(p, w));
        }
    }
    dist[src] = 0.0;
    heap.push(Item(0.0, src));
    while let Some(Item(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == dst {
            return Ok(d);
        }
        let mut relax = |v: usize, len: f64, heap: &mut BinaryHeap<Item>| {
            if d + len < dist[v] {
                dist[v] = d + len;
                heap.push(Item(d + len, v));
            }
        };
        if u == src {
            for v in grid.attachments(z) {
                let p = grid.point(v);
                if domain.segment_inside(z, p) {
                    relax(v, domain.segment_length(z, p), &mut heap);
                }
            }
            continue;
        }
        if let Some(&len) = to_target.get(&u) {
            relax(dst, len, &mut heap);
        }
        let (i, j) = ((u % n) as isize, (u / n) as isize);
        let pu = grid.point(u);
        for (di, dj) in [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
            let (a, b) = (i + di, j + dj);
            if a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                continue;
            }
            let v = b as usize * n + a as usize;
            if done[v] {
                continue;
            }
            let pv = grid.point(v);
            if domain.segment_inside(pu, pv) {
                relax(v, domain.segment_length(pu, pv), &mut heap);
            }
        }
    }
    Err(Error::Domain(format!("{w} is unreachable from {z} on the grid")))
}

/// [`quasihyperbolic_distance`] for several endpoint pairs, computed in parallel.
pub fn quasihyperbolic_distances(domain: &PlaneDomain, pairs: &[(Complex64, Complex64)]) -> Result<Vec<f64>> {
    pairs
        .par_iter()
        .map(|&(z, w)| quasihyperbolic_distance(domain, z, w))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundAnnulus {
    pub center: [f64; 2],
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformlyPerfectReport {
    /// Largest modulus `log(outer/inner)/2π` of a separating round annulus found;
    /// a lower bound for the supremum over all separating annuli.
    pub modulus: f64,
    pub witness: RoundAnnulus,
    /// The witness radius hit the inner floor or outer cap, so moduli are unbounded.
    pub unbounded: bool,
}

/// Searches round annuli that lie in the domain and separate its boundary,
/// centred at the origin (for the disk), at hole centres and at midpoints
/// between hole centres. For a fixed centre the radii are exact: the best
/// annulus is the widest gap between the radial shadows of the boundary components.
pub fn uniformly_perfect_constant(domain: &PlaneDomain) -> Result<UniformlyPerfectReport> {
    let components = domain.holes.len() + 1;
    if components < 2 {
        return Err(Error::Domain("simply connected domain: no separating annulus".into()));
    }
    let scale = domain.scale();
    let floor = MIN_ANNULUS_RADIUS * scale;
    let cap = MAX_ANNULUS_RADIUS * scale;
    let mut centers: Vec<Complex64> = Vec::new();
    if domain.outer == Outer::UnitDisk {
        centers.push(Complex64::new(0.0, 0.0));
    }
    for (i, h) in domain.holes.iter().enumerate() {
        centers.push(h.center());
        for g in &domain.holes[..i] {
            centers.push((h.center() + g.center()) / 2.0);
        }
    }
    let mut best: Option<UniformlyPerfectReport> = None;
    for a in centers {
        let mut shadows: Vec<(f64, f64)> = domain
            .holes
            .iter()
            .map(|h| {
                let d = (h.center() - a).norm();
                ((d - h.radius()).max(0.0), d + h.radius())
            })
            .collect();
        match domain.outer {
            Outer::UnitDisk => shadows.push((1.0 - a.norm(), 1.0 + a.norm())),
            Outer::Plane => shadows.push((f64::INFINITY, f64::INFINITY)),
        }
        shadows.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut reach = shadows[0].1;
        for &(lo, hi) in &shadows[1..] {
            if lo > reach {
                let inner = reach.max(floor);
                let outer = lo.min(cap);
                if outer > inner {
                    let modulus = (outer / inner).ln() / (2.0 * PI);
                    if best.is_none_or(|b| modulus > b.modulus) {
                        best = Some(UniformlyPerfectReport {
                            modulus,
                            witness: RoundAnnulus {
                                center: [a.re, a.im],
                                inner,
                                outer,
                            },
                            unbounded: inner > reach || outer < lo,
                        });
                    }
                }
            }
            reach = reach.max(hi);
        }
    }
    best.ok_or_else(|| Error::Domain("no separating round annulus found".into()))
}

/// Model hyperbolic domains with closed-form Poincaré densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PoincareModel {
    Disk,
    PuncturedDisk,
    /// `{1 < |z| < outer}`.
    Annulus { outer: f64 },
}

/// Density `λ` of the curvature −1 metric `λ|dz|` on a model domain.
pub fn model_poincare_density(model: PoincareModel, z: Complex64) -> Result<f64> {
    let r = z.norm();
    let outside = || Err(Error::Domain(format!("{z} is outside the model domain")));
    match model {
        PoincareModel::Disk if r < 1.0 => Ok(2.0 / (1.0 - r * r)),
        PoincareModel::PuncturedDisk if r > 0.0 && r < 1.0 => Ok(1.0 / (r * (1.0 / r).ln())),
        PoincareModel::Annulus { outer } => {
            if !(outer > 1.0) {
                return param(format!("annulus outer radius must exceed 1, got {outer}"));
            }
            if r <= 1.0 || r >= outer {
                return outside();
            }
            let lr = outer.ln();
            Ok(PI / (lr * r * (PI * r.ln() / lr).sin()))
        }
        _ => outside(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthRatioReport {
    pub rho: f64,
    /// Length of `|z| = ρ` in the disk metric.
    pub length_disk: f64,
    /// Length of `|z| = ρ` in the punctured-disk metric.
    pub length_punctured: f64,
    pub ratio: f64,
    /// Disk distance from the puncture to the circle.
    pub epsilon: f64,
    /// `coth(ε/2)`.
    pub upper: f64,
    pub pass: bool,
}

/// Ratio of the punctured-disk and disk lengths of the circle `|z| = ρ`,
/// checked against `1 < ratio < coth(ε/2)`.
pub fn check_length_ratio_punctured(rho: f64) -> Result<LengthRatioReport> {
    if !(rho > 0.0 && rho < 1.0) {
        return param(format!("rho must lie in (0, 1), got {rho}"));
    }
    let length_disk = 2.0 * PI * rho * 2.0 / (1.0 - rho * rho);
    let length_punctured = 2.0 * PI / (1.0 / rho).ln();
    let ratio = length_punctured / length_disk;
    let epsilon = 2.0 * rho.atanh();
    let upper = 1.0 / (epsilon / 2.0).tanh();
    Ok(LengthRatioReport {
        rho,
        length_disk,
        length_punctured,
        ratio,
        epsilon,
        upper,
        pass: 1.0 < ratio && ratio < upper,
    })
}
