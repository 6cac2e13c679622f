use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use super::TriMesh;
use crate::error::{Error, Result};

/// Both sides of the discrete Gauss–Bonnet identity on a triangle region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussBonnetReport {
    /// Sum of angle defects `2π − Σ angles` over interior vertices of the region.
    pub curvature_term: f64,
    /// Sum of `π − Σ angles` over boundary vertices of the region.
    pub turning_term: f64,
    pub lhs: f64,
    pub chi: i64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates `Σ interior defects + Σ boundary turning = 2πχ` on the triangles in `region`.
pub fn discrete_gauss_bonnet(mesh: &TriMesh, region: &[usize]) -> Result<GaussBonnetReport> {
    let tris: BTreeSet<usize> = region.iter().copied().collect();
    if tris.is_empty() {
        return Err(Error::Mesh("empty region".into()));
    }
    if let Some(&t) = tris.iter().find(|&&t| t >= mesh.triangle_count()) {
        return Err(Error::Mesh(format!("triangle {t} out of range")));
    }
    let mut verts = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for &t in &tris {
        verts.extend(mesh.triangles()[t]);
        edges.extend(mesh.triangle_edges(t));
    }
    let mut curvature_term = 0.0;
    let mut turning_term = 0.0;
    for &v in &verts {
        let link = mesh
            .link_within(v, |t| tris.contains(&t))
            .ok_or_else(|| Error::Mesh(format!("region is not a manifold at vertex {v}")))?;
        let angles: f64 = mesh
            .vertex_triangles(v)
            .iter()
            .filter(|t| tris.contains(t))
            .map(|&t| {
                let i = mesh.triangles()[t].iter().position(|&x| x == v).unwrap();
                mesh.triangle_angles(t)[i]
            })
            .sum();
        if link.closed {
            curvature_term += 2.0 * PI - angles;
        } else {
            turning_term += PI - angles;
        }
    }
    let chi = verts.len() as i64 - edges.len() as i64 + tris.len() as i64;
    let lhs = curvature_term + turning_term;
    let rhs = 2.0 * PI * chi as f64;
    Ok(GaussBonnetReport {
        curvature_term,
        turning_term,
        lhs,
        chi,
        rhs,
        residual: lhs - rhs,
    })
}
