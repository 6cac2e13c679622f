//! Hyperbolic disks with marked or removed round holes, and shortest curves
//! surrounding a hole.

use std::collections::BTreeMap;

use serde::Serialize;

use super::rings::{hyperbolic_disk, hyperbolic_polar_distance};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::mesh::TriMesh;

/// Round hole in polar coordinates of the hyperbolic disk: centre at
/// distance `r` from the origin in direction `theta`, hyperbolic radius `radius`.
/// A zero radius marks a single vertex (a puncture).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hole {
    pub r: f64,
    pub theta: f64,
    pub radius: f64,
}

pub(crate) fn disk_minus_disks(radius: f64, holes: &[Hole], h: f64, remove: bool) -> Result<TriMesh> {
    for (i, a) in holes.iter().enumerate() {
        if !(a.r >= 0.0 && a.radius >= 0.0 && a.r.is_finite() && a.radius.is_finite()) {
            return Err(Error::Build(format!("hole {i} has invalid parameters")));
        }
        if a.r + a.radius >= radius {
            return Err(Error::Build(format!("hole {i} is not inside the disk")));
        }
        for (j, b) in holes.iter().enumerate().skip(i + 1) {
            let d = hyperbolic_polar_distance((a.r, a.theta), (b.r, b.theta));
            if d <= a.radius + b.radius {
                return Err(Error::Build(format!("holes {i} and {j} overlap")));
            }
        }
    }
    let disk = hyperbolic_disk(radius, h)?;
    let nv = disk.coords.len();
    let mut inside: Vec<Vec<usize>> = Vec::with_capacity(holes.len());
    let mut owner = vec![None; nv];
    for (i, hole) in holes.iter().enumerate() {
        let c = (hole.r, hole.theta);
        let d: Vec<f64> = disk.coords.iter().map(|&p| hyperbolic_polar_distance(p, c)).collect();
        let mut vs: Vec<usize> = (0..nv).filter(|&v| d[v] < hole.radius).collect();
        if vs.is_empty() {
            let nearest = (0..nv).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
            vs.push(nearest);
        }
        for &v in &vs {
            if owner[v].is_some() {
                return Err(Error::Build(format!("holes overlap at vertex {v}")));
            }
            owner[v] = Some(i);
        }
        inside.push(vs);
    }
    let outer = disk.rings.last().unwrap().clone();
    let mut labels = BTreeMap::new();
    labels.insert("boundary".to_string(), outer.clone());
    if !remove {
        let mut mesh = disk.mesh;
        for (k, v) in labels {
            mesh.set_label(k, v)?;
        }
        mesh.set_label("base", vec![0])?;
        for (i, vs) in inside.into_iter().enumerate() {
            mesh.set_label(format!("hole{i}"), vs)?;
        }
        return Ok(mesh);
    }

    let mesh = &disk.mesh;
    let mut removed: Vec<bool> = owner.iter().map(|o| o.is_some()).collect();
    if outer.iter().any(|&v| removed[v]) {
        return Err(Error::Build("a hole touches the outer boundary".into()));
    }
    // drop vertices whose remaining star is not a single fan
    loop {
        let keep = |t: usize| mesh.triangles()[t].iter().all(|&v| !removed[v]);
        let bad: Vec<usize> = (0..nv)
            .filter(|&v| {
                !removed[v]
                    && mesh.vertex_triangles(v).iter().any(|&t| keep(t))
                    && mesh.link_within(v, keep).is_none()
            })
            .collect();
        if bad.is_empty() {
            break;
        }
        for v in bad {
            removed[v] = true;
            // attribute to the hole of a removed neighbour
            let (hole_of, _) = mesh
                .graph()
                .neighbors(v)
                .filter_map(|(w, _)| owner[w].map(|o| (o, w)))
                .min()
                .unwrap_or((0, 0));
            owner[v] = Some(hole_of);
        }
    }
    let base = (0..nv).find(|&v| !removed[v]).unwrap();
    labels.insert("base".to_string(), vec![base]);
    let removed_ref = &removed;
    let (sub, map) = mesh.submesh(|t| mesh.triangles()[t].iter().all(|&v| !removed_ref[v]))?;
    let mut out = sub;
    for (k, vs) in labels {
        let mapped: Option<Vec<usize>> = vs.iter().map(|&v| map[v]).collect();
        let mapped = mapped.ok_or_else(|| Error::Build(format!("label {k} lost vertices")))?;
        out.set_label(k, mapped)?;
    }
    // assign each inner boundary loop to the hole whose removed vertices it borders
    let inverse: Vec<usize> = {
        let mut inv = vec![usize::MAX; out.vertex_count()];
        for (old, new) in map.iter().enumerate() {
            if let Some(n) = new {
                inv[*n] = old;
            }
        }
        inv
    };
    let outer_new: Vec<usize> = outer.iter().map(|&v| map[v].unwrap()).collect();
    let mut assigned: Vec<Option<Vec<usize>>> = vec![None; holes.len()];
    for lp in out.boundary_loops() {
        if lp.contains(&outer_new[0]) {
            continue;
        }
        let hole = lp.iter().find_map(|&v| {
            mesh.graph()
                .neighbors(inverse[v])
                .find_map(|(w, _)| owner[w])
        });
        let Some(i) = hole else {
            return Err(Error::Build("boundary loop not adjacent to any hole".into()));
        };
        if assigned[i].is_some() {
            return Err(Error::Build(format!("hole {i} has more than one boundary loop")));
        }
        assigned[i] = Some(lp);
    }
    for (i, lp) in assigned.into_iter().enumerate() {
        let lp = lp.ok_or_else(|| Error::Build(format!("holes merged around hole {i}")))?;
        out.set_label(format!("hole{i}"), lp)?;
    }
    Ok(out)
}

/// Simple vertex cycle around a hole with its length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurroundingCurve {
    pub vertices: Vec<usize>,
    pub length: f64,
    /// Whether removing the cycle separates the hole from every other
    /// `hole*` label and from the mesh boundary away from the hole.
    pub separated: bool,
}

fn cycle_length(mesh: &TriMesh, cyc: &[usize]) -> f64 {
    (0..cyc.len())
        .map(|i| mesh.edge_length(cyc[i], cyc[(i + 1) % cyc.len()]).unwrap_or(f64::INFINITY))
        .sum()
}

/// Shortest cycle winding once around the vertices of label `hole_label`,
/// searched among vertices within `width` of the hole (default: half the
/// distance to the nearest other hole or boundary vertex). The hole's own
/// vertices are excluded. A single-vertex label yields its one-ring.
pub fn mark_surrounding_curve(
    mesh: &TriMesh,
    hole_label: &str,
    width: Option<f64>,
) -> Result<SurroundingCurve> {
    let hole: Vec<usize> = mesh
        .label(hole_label)
        .ok_or_else(|| Error::Parameter(format!("label {hole_label} not found")))?
        .to_vec();
    let nv = mesh.vertex_count();
    let mut in_hole = vec![false; nv];
    for &v in &hole {
        in_hole[v] = true;
    }
    let mut obstacle = vec![false; nv];
    for (name, vs) in mesh.labels() {
        if name != hole_label && name.starts_with("hole") {
            for &v in vs {
                obstacle[v] = true;
            }
        }
    }
    for lp in mesh.boundary_loops() {
        if !lp.iter().any(|&v| in_hole[v]) {
            for v in lp {
                obstacle[v] = true;
            }
        }
    }

    if hole.len() == 1 && !mesh.is_boundary_vertex(hole[0]) {
        let ring = mesh.link(hole[0])?.ring;
        let length = cycle_length(mesh, &ring);
        let separated = separates(mesh, &ring, &in_hole, &obstacle);
        return Ok(SurroundingCurve {
            vertices: ring,
            length,
            separated,
        });
    }

    let from_hole = mesh.graph().dijkstra(&hole, None).dist;
    let width = match width {
        Some(w) => w,
        None => {
            let near = (0..nv)
                .filter(|&v| obstacle[v])
                .map(|v| from_hole[v])
                .fold(f64::INFINITY, f64::min);
            if near.is_finite() {
                0.5 * near
            } else {
                0.5 * from_hole.iter().copied().fold(0.0, f64::max)
            }
        }
    };
    let in_band: Vec<bool> = (0..nv)
        .map(|v| !in_hole[v] && !obstacle[v] && from_hole[v] <= width)
        .collect();

    // dual path from a triangle touching the hole to one touching a vertex beyond the band
    let nt = mesh.triangle_count();
    let touches = |t: usize, pred: &dyn Fn(usize) -> bool| mesh.triangles()[t].iter().any(|&v| pred(v));
    let mut prev = vec![usize::MAX; nt];
    let mut seen = vec![false; nt];
    let mut queue = std::collections::VecDeque::new();
    for t in 0..nt {
        if touches(t, &|v| in_hole[v]) {
            seen[t] = true;
            queue.push_back(t);
        }
    }
    let mut end = None;
    while let Some(t) = queue.pop_front() {
        if touches(t, &|v| !in_hole[v] && !in_band[v]) {
            end = Some(t);
            break;
        }
        for e in mesh.triangle_edges(t) {
            let (a, b) = mesh.edge_triangles(e);
            for u in [Some(a), b].into_iter().flatten() {
                if !seen[u] {
                    seen[u] = true;
                    prev[u] = t;
                    queue.push_back(u);
                }
            }
        }
    }
    let end = end.ok_or_else(|| Error::Build(format!("no room around {hole_label}")))?;
    let mut crossing = vec![false; mesh.edge_count()];
    let mut t = end;
    while prev[t] != usize::MAX {
        let p = prev[t];
        let shared = mesh
            .triangle_edges(t)
            .into_iter()
            .find(|e| mesh.triangle_edges(p).contains(e))
            .unwrap();
        crossing[shared] = true;
        t = p;
    }

    // two-sheeted cover of the band; odd cycles switch sheets
    let band: Vec<usize> = (0..nv).filter(|&v| in_band[v]).collect();
    let mut local = vec![usize::MAX; nv];
    for (i, &v) in band.iter().enumerate() {
        local[v] = i;
    }
    let nb = band.len();
    let mut edges = Vec::new();
    let mut sources = Vec::new();
    for (e, ev) in mesh.edges().iter().enumerate() {
        let (a, b) = (ev[0], ev[1]);
        if !(in_band[a] && in_band[b]) {
            continue;
        }
        let l = mesh.edge_lengths()[e];
        let (la, lb) = (local[a], local[b]);
        if crossing[e] {
            edges.push((la, lb + nb, l));
            edges.push((la + nb, lb, l));
            sources.push(a);
            sources.push(b);
        } else {
            edges.push((la, lb, l));
            edges.push((la + nb, lb + nb, l));
        }
    }
    sources.sort_unstable();
    sources.dedup();
    let cover = WeightedGraph::from_edges(2 * nb, &edges)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for &s in &sources {
        let sp = cover.dijkstra_until(&[local[s]], None, Some(local[s] + nb));
        let d = sp.dist[local[s] + nb];
        if d.is_finite() && best.as_ref().is_none_or(|b| d < b.0) {
            let path = sp.path_to(local[s] + nb).unwrap();
            let cyc: Vec<usize> = path[..path.len() - 1].iter().map(|&x| band[x % nb]).collect();
            best = Some((d, cyc));
        }
    }
    let (length, vertices) =
        best.ok_or_else(|| Error::Build(format!("no cycle surrounds {hole_label}")))?;
    let separated = separates(mesh, &vertices, &in_hole, &obstacle);
    Ok(SurroundingCurve {
        vertices,
        length,
        separated,
    })
}

fn separates(mesh: &TriMesh, cycle: &[usize], in_hole: &[bool], obstacle: &[bool]) -> bool {
    let mut allowed = vec![true; mesh.vertex_count()];
    for &v in cycle {
        allowed[v] = false;
    }
    let (label, _) = mesh.graph().components(Some(&allowed));
    let hole_comps: Vec<usize> = (0..mesh.vertex_count())
        .filter(|&v| in_hole[v])
        .filter_map(|v| label[v])
        .collect();
    !(0..mesh.vertex_count())
        .any(|v| obstacle[v] && label[v].is_some_and(|c| hole_comps.contains(&c)))
}
