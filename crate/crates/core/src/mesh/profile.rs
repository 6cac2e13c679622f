//! Metric-ball profiles: boundary length, area, Euler characteristic and
//! number of generators of the sublevel sets of a distance field.
//!
//! The distance is extended linearly over every triangle, so each ball is a
//! union of convex triangle pieces. Its cell complex has as vertices the mesh
//! vertices strictly inside plus one crossing point per edge that the level
//! set cuts; as edges the fully-inside mesh edges, the inside fragments of cut
//! edges, and one level segment per cut triangle; and one face per triangle
//! that meets the ball.

use std::io::Write;

use serde::Serialize;

use super::{DistanceField, TriMesh};
use crate::comparison::{topology_bound, ComparisonParams};
use crate::error::{param, Result};
use crate::graph::UnionFind;
use crate::ode::{ProfileKind, ScalarProfile};

const TIE_EPS: f64 = 1e-9;

/// Measurements of one metric ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSample {
    pub r: f64,
    /// Radius actually used after breaking ties with vertex distances.
    pub r_eval: f64,
    pub ell: f64,
    pub area: f64,
    /// `V − E + F` of the whole sublevel set.
    pub chi: i64,
    /// Number of generators of π₁ of the component containing the source.
    pub n: i64,
    pub components: usize,
    /// Whether the source component has non-empty boundary.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallProfile {
    pub source: usize,
    pub samples: Vec<BallSample>,
}

impl BallProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.r).collect()
    }

    pub fn area_profile(&self) -> Result<ScalarProfile> {
        ScalarProfile::new(
            self.radii(),
            self.samples.iter().map(|s| s.area).collect(),
            ProfileKind::Area,
        )
    }

    pub fn length_profile(&self) -> Result<ScalarProfile> {
        ScalarProfile::new(
            self.radii(),
            self.samples.iter().map(|s| s.ell).collect(),
            ProfileKind::BoundaryLength,
        )
    }

    pub fn euler_profile(&self) -> Result<ScalarProfile> {
        ScalarProfile::new(
            self.radii(),
            self.samples.iter().map(|s| s.chi as f64).collect(),
            ProfileKind::EulerChar,
        )
    }

    /// Discretisation error scale for second differences of `a(r)`: the
    /// largest mismatch between the difference quotient of the area and the
    /// measured boundary length at interior points, divided by the local grid
    /// step. Points next to a change of topology are ignored.
    pub fn second_difference_error(&self) -> f64 {
        let s = &self.samples;
        let mut worst: f64 = 0.0;
        for i in 1..s.len().saturating_sub(1) {
            if s[i - 1].chi != s[i].chi || s[i].chi != s[i + 1].chi {
                continue;
            }
            let h = s[i + 1].r - s[i - 1].r;
            let da = (s[i + 1].area - s[i - 1].area) / h;
            worst = worst.max((da - s[i].ell).abs() / (0.5 * h));
        }
        worst
    }

    /// CSV with header `r,ell,area,chi,n,components`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,ell,area,chi,n,components")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.r, s.ell, s.area, s.chi, s.n, s.components
            )?;
        }
        Ok(())
    }
}

/// Profile of the balls around `field.source` at each radius of `radii`.
pub fn ball_profile(mesh: &TriMesh, field: &DistanceField, radii: &[f64]) -> Result<BallProfile> {
    if field.dist.len() != mesh.vertex_count() {
        return param("distance field does not belong to this mesh");
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return param("radii must be strictly increasing");
    }
    let max = field.max_distance();
    if let Some(&r) = radii.iter().find(|&&r| !(r.is_finite() && r > 0.0 && r <= max)) {
        return param(format!("radius {r} outside (0, {max}]"));
    }
    let samples = radii
        .iter()
        .map(|&r| ball_profile_at(mesh, field, r))
        .collect();
    Ok(BallProfile {
        source: field.source,
        samples,
    })
}

fn untie(mesh: &TriMesh, field: &DistanceField, r: f64) -> f64 {
    let step = TIE_EPS * mesh.min_edge_length();
    let mut r_eval = r;
    while field.dist.iter().any(|&d| d == r_eval) {
        r_eval += step.max(r_eval * f64::EPSILON * 4.0);
    }
    r_eval
}

fn lerp(p: [f64; 2], q: [f64; 2], t: f64) -> [f64; 2] {
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

fn dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn polygon_area(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    let s: f64 = (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    0.5 * s.abs()
}

/// Single-radius ball measurement. `r` must be positive; ties with vertex
/// distances are broken by a tiny upward perturbation.
pub fn ball_profile_at(mesh: &TriMesh, field: &DistanceField, r: f64) -> BallSample {
    let r_eval = untie(mesh, field, r);
    let d = &field.dist;
    let nv = mesh.vertex_count();
    let inside: Vec<bool> = d.iter().map(|&x| x < r_eval).collect();

    let mut uf = UnionFind::new(nv);
    for e in mesh.edges() {
        if inside[e[0]] && inside[e[1]] {
            uf.union(e[0], e[1]);
        }
    }
    let comp = |uf: &mut UnionFind, v: usize| uf.find(v);
    let src_root = uf.find(field.source);

    // per-root counters: V, E, F and boundary flag
    let mut v_cnt = vec![0i64; nv];
    let mut e_cnt = vec![0i64; nv];
    let mut f_cnt = vec![0i64; nv];
    let mut bounded = vec![false; nv];
    let mut roots = Vec::new();
    for v in 0..nv {
        if inside[v] {
            let root = comp(&mut uf, v);
            if v_cnt[root] == 0 {
                roots.push(root);
            }
            v_cnt[root] += 1;
        }
    }
    for (ei, e) in mesh.edges().iter().enumerate() {
        let (a, b) = (inside[e[0]], inside[e[1]]);
        if a || b {
            let root = comp(&mut uf, if a { e[0] } else { e[1] });
            e_cnt[root] += 1;
            if a != b {
                // crossing point
                v_cnt[root] += 1;
            }
            if mesh.is_boundary_edge(ei) {
                bounded[root] = true;
            }
        }
    }

    let mut ell = 0.0;
    let mut area = 0.0;
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangles()[t];
        let ins = tri.map(|v| inside[v]);
        let k = ins.iter().filter(|&&x| x).count();
        if k == 0 {
            continue;
        }
        let root = comp(&mut uf, tri[ins.iter().position(|&x| x).unwrap()]);
        f_cnt[root] += 1;
        if k == 3 {
            area += mesh.triangle_area(t);
            continue;
        }
        e_cnt[root] += 1;
        bounded[root] = true;
        let p = mesh.triangle_layout(t);
        let dv = tri.map(|v| d[v]);
        let cross = |i: usize, j: usize| lerp(p[i], p[j], (r_eval - dv[i]) / (dv[j] - dv[i]));
        if k == 1 {
            let i = ins.iter().position(|&x| x).unwrap();
            let (j, l) = ((i + 1) % 3, (i + 2) % 3);
            let (a, b) = (cross(i, j), cross(i, l));
            ell += dist2(a, b);
            area += polygon_area(&[p[i], a, b]);
        } else {
            let o = ins.iter().position(|&x| !x).unwrap();
            let (i, j) = ((o + 1) % 3, (o + 2) % 3);
            let (a, b) = (cross(j, o), cross(i, o));
            ell += dist2(a, b);
            area += polygon_area(&[p[i], p[j], a, b]);
        }
    }

    let chi: i64 = roots.iter().map(|&r| v_cnt[r] - e_cnt[r] + f_cnt[r]).sum();
    let src_chi = v_cnt[src_root] - e_cnt[src_root] + f_cnt[src_root];
    let n = if bounded[src_root] { 1 - src_chi } else { 2 - src_chi };
    BallSample {
        r,
        r_eval,
        ell,
        area,
        chi,
        n,
        components: roots.len(),
        bounded: bounded[src_root],
    }
}

/// Result of searching `(r0, r0 + c/k)` for a radius satisfying the topology bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyScan {
    pub params: ComparisonParams,
    pub outer_radius: f64,
    pub ell_outer: f64,
    pub bound: f64,
    pub slack: f64,
    /// Radius in the open interval with the smallest `n`.
    pub r_prime: f64,
    pub n_r_prime: i64,
    pub samples: Vec<(f64, i64)>,
    pub pass: bool,
}

/// Looks for `r'` strictly inside `(r0, r0 + c/k)` (on a grid of `interior`
/// points, end points excluded) with `n(r') ≤ bound + slack`, where the bound
/// uses the measured boundary length at `r0 + c/k`.
pub fn scan_topology_bound(
    mesh: &TriMesh,
    field: &DistanceField,
    params: &ComparisonParams,
    interior: usize,
    slack: f64,
) -> Result<TopologyScan> {
    let params = ComparisonParams::new(params.k, params.c, params.r0)?;
    if interior == 0 {
        return param("need at least one interior radius");
    }
    let outer = params.outer_radius();
    let max = field.max_distance();
    if outer > max {
        return param(format!(
            "r0 + c/k = {outer} exceeds the range {max} of the distance field"
        ));
    }
    let ell_outer = ball_profile_at(mesh, field, outer).ell;
    let bound = topology_bound(&params, ell_outer)?;
    let step = (outer - params.r0) / (interior + 1) as f64;
    let samples: Vec<(f64, i64)> = (1..=interior)
        .map(|j| {
            let r = params.r0 + step * j as f64;
            (r, ball_profile_at(mesh, field, r).n)
        })
        .collect();
    let &(r_prime, n_r_prime) = samples
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.total_cmp(&b.0)))
        .unwrap();
    Ok(TopologyScan {
        params,
        outer_radius: outer,
        ell_outer,
        bound,
        slack,
        r_prime,
        n_r_prime,
        samples,
        pass: (n_r_prime as f64) <= bound + slack,
    })
}
