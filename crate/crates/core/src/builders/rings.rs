//! Rotationally symmetric surfaces triangulated by concentric vertex rings.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Ring positions `t_i` with vertex counts. Consecutive counts must be equal
/// or differ by a factor of two so that vertices stay angularly aligned.
pub(crate) struct RingLayout {
    pub params: Vec<f64>,
    pub counts: Vec<usize>,
    /// Whether a single apex vertex at `t = 0` precedes the first ring.
    pub apex: bool,
}

/// Mesh plus per-vertex `(t, θ)` coordinates and the vertex ids of each ring.
pub(crate) struct RingMesh {
    pub mesh: TriMesh,
    pub coords: Vec<(f64, f64)>,
    pub rings: Vec<Vec<usize>>,
}

/// Signed angle difference wrapped into `[−π, π]`.
pub(crate) fn wrap_angle(d: f64) -> f64 {
    let x = d.rem_euclid(2.0 * PI);
    if x > PI {
        x - 2.0 * PI
    } else {
        x
    }
}

fn stitch(a: &[usize], b: &[usize], tris: &mut Vec<[usize; 3]>) {
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let advance_a = j == nb || (i < na && (i + 1) * nb <= (j + 1) * na);
        if advance_a {
            tris.push([a[i % na], b[j % nb], a[(i + 1) % na]]);
            i += 1;
        } else {
            tris.push([a[i % na], b[j % nb], b[(j + 1) % nb]]);
            j += 1;
        }
    }
}

pub(crate) fn ring_mesh(
    layout: &RingLayout,
    dist: impl Fn((f64, f64), (f64, f64)) -> f64,
) -> Result<RingMesh> {
    let mut coords = Vec::new();
    let mut rings = Vec::new();
    if layout.apex {
        coords.push((0.0, 0.0));
    }
    for (&t, &n) in layout.params.iter().zip(&layout.counts) {
        if n < 3 {
            return Err(Error::Build(format!("ring at {t} has only {n} vertices")));
        }
        let start = coords.len();
        coords.extend((0..n).map(|j| (t, 2.0 * PI * j as f64 / n as f64)));
        rings.push((start..start + n).collect::<Vec<_>>());
    }
    for w in layout.counts.windows(2) {
        let (p, q) = (w[0].min(w[1]), w[0].max(w[1]));
        if q != p && q != 2 * p {
            return Err(Error::Build(format!("ring counts {} and {} are not aligned", w[0], w[1])));
        }
    }
    let mut tris = Vec::new();
    if layout.apex {
        let r = &rings[0];
        for j in 0..r.len() {
            tris.push([0, r[j], r[(j + 1) % r.len()]]);
        }
    }
    for w in rings.windows(2) {
        stitch(&w[0], &w[1], &mut tris);
    }
    let mesh = TriMesh::with_length_fn(coords.len(), tris, |a, b| dist(coords[a], coords[b]))?;
    Ok(RingMesh {
        mesh,
        coords,
        rings,
    })
}

/// Ring counts growing (or shrinking) by doubling so that the arc between
/// neighbours, `circumference(t) / count`, stays at most `arc_max`.
pub(crate) fn doubling_counts(
    params: &[f64],
    first: usize,
    arc_max: f64,
    shrink: bool,
    circumference: impl Fn(f64) -> f64,
) -> Vec<usize> {
    let mut counts = Vec::with_capacity(params.len());
    let mut n = first;
    for &t in params {
        let c = circumference(t);
        while c / n as f64 > arc_max {
            n *= 2;
        }
        while shrink && n % 2 == 0 && n / 2 >= 3 && 2.0 * c / n as f64 <= arc_max * 0.5 {
            n /= 2;
        }
        counts.push(n);
    }
    counts
}

/// Uniform grid of `ceil(len / step)` intervals on `[a, a + len]`.
pub(crate) fn uniform_params(a: f64, len: f64, step: f64) -> Vec<f64> {
    let n = (len / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + len * i as f64 / n as f64).collect()
}

pub(crate) fn with_labels(mut mesh: TriMesh, labels: BTreeMap<String, Vec<usize>>) -> Result<TriMesh> {
    for (k, v) in labels {
        mesh.set_label(k, v)?;
    }
    Ok(mesh)
}

/// Retries `make` with a shrinking spacing factor until every edge is at most `h`.
pub(crate) fn fit_max_edge<T>(
    h: f64,
    mut make: impl FnMut(f64) -> Result<T>,
    mesh_of: impl Fn(&T) -> &TriMesh,
) -> Result<T> {
    let mut factor = 0.7;
    for _ in 0..12 {
        let out = make(factor)?;
        if mesh_of(&out).max_edge_length() <= h {
            return Ok(out);
        }
        factor *= 0.9;
    }
    Err(Error::Build(format!("could not reach maximum edge length {h}")))
}

/// Geodesic distance in the hyperbolic plane between polar points `(r, θ)`.
pub(crate) fn hyperbolic_polar_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let s = ((p.0 - q.0) / 2.0).sinh();
    let a = (wrap_angle(p.1 - q.1) / 2.0).sin();
    2.0 * (s * s + p.0.sinh() * q.0.sinh() * a * a).sqrt().asinh()
}

pub(crate) fn hyperbolic_disk(radius: f64, h: f64) -> Result<RingMesh> {
    let first = 8usize.max((1.0 / h).ceil() as usize);
    fit_max_edge(
        h,
        |f| {
            let params: Vec<f64> = uniform_params(0.0, radius, f * h)[1..].to_vec();
            let counts = doubling_counts(&params, first, f * h, false, |r| 2.0 * PI * r.sinh());
            ring_mesh(
                &RingLayout {
                    params,
                    counts,
                    apex: true,
                },
                hyperbolic_polar_distance,
            )
        },
        |m| &m.mesh,
    )
}

pub(crate) fn flat_cylinder(circumference: f64, height: f64, h: f64) -> Result<RingMesh> {
    let radius = circumference / (2.0 * PI);
    fit_max_edge(
        h,
        |f| {
            let params = uniform_params(0.0, height, f * h);
            let n = 3usize.max((circumference / (f * h)).ceil() as usize);
            let counts = vec![n; params.len()];
            ring_mesh(
                &RingLayout {
                    params,
                    counts,
                    apex: false,
                },
                |p, q| (p.0 - q.0).hypot(radius * wrap_angle(p.1 - q.1)),
            )
        },
        |m| &m.mesh,
    )
}

/// Funnel `t ∈ [0, t_max]` with metric `dt² + (L/2π)² cosh²t dθ²`; `t = 0` is the closed geodesic.
pub(crate) fn funnel(length: f64, t_max: f64, h: f64) -> Result<RingMesh> {
    let a = length / (2.0 * PI);
    fit_max_edge(
        h,
        |f| {
            let params = uniform_params(0.0, t_max, f * h);
            let first = 3usize.max((length / (f * h)).ceil() as usize);
            let counts = doubling_counts(&params, first, f * h, false, |t| length * t.cosh());
            ring_mesh(
                &RingLayout {
                    params,
                    counts,
                    apex: false,
                },
                |p, q| {
                    let s = (a * wrap_angle(p.1 - q.1) / 2.0).sinh();
                    let u = ((p.0 - q.0) / 2.0).sinh();
                    2.0 * (p.0.cosh() * q.0.cosh() * s * s + u * u).sqrt().asinh()
                },
            )
        },
        |m| &m.mesh,
    )
}

/// Cusp `t ∈ [0, t_max]` with metric `dt² + (ℓ0/2π)² e^{−2t} dθ²`.
pub(crate) fn cusp(ell0: f64, t_max: f64, h: f64) -> Result<RingMesh> {
    let scale = ell0 / (2.0 * PI);
    fit_max_edge(
        h,
        |f| {
            let params = uniform_params(0.0, t_max, f * h);
            let mut first = 3usize;
            while ell0 / first as f64 > f * h {
                first *= 2;
            }
            let counts = doubling_counts(&params, first, f * h, true, |t| ell0 * (-t).exp());
            ring_mesh(
                &RingLayout {
                    params,
                    counts,
                    apex: false,
                },
                |p, q| {
                    // upper half-plane with y = e^t, x = scale·θ
                    let dx = scale * wrap_angle(p.1 - q.1);
                    let dy = p.0.exp() - q.0.exp();
                    let y = ((p.0 + q.0) / 2.0).exp();
                    2.0 * (dx.hypot(dy) / (2.0 * y)).asinh()
                },
            )
        },
        |m| &m.mesh,
    )
}
