use std::collections::BinaryHeap;

use serde::Serialize;

use super::TriMesh;
use crate::error::{param, Error, Result};

/// Shortest-path distances from one source vertex over the edge graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceField {
    pub source: usize,
    pub dist: Vec<f64>,
}

impl DistanceField {
    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Largest violation of `|d(u) − d(v)| ≤ len(u,v)` over all edges (0 when the invariant holds).
    pub fn lipschitz_violation(&self, mesh: &TriMesh) -> f64 {
        mesh.edges()
            .iter()
            .zip(mesh.edge_lengths())
            .map(|(e, &l)| ((self.dist[e[0]] - self.dist[e[1]]).abs() - l).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// Distances from `source` along mesh edges and straight chords across
/// triangles. A chord update unfolds a triangle `(a, b, c)` whose vertices
/// `a`, `b` are settled into the plane, places a virtual source at distances
/// `d(a)`, `d(b)` on the far side of `ab`, and accepts `|S − c|` when the
/// segment from `S` to `c` crosses `ab`.
pub fn distance_field(mesh: &TriMesh, source: usize) -> Result<DistanceField> {
    if source >= mesh.vertex_count() {
        return param(format!("source {source} out of range"));
    }
    let n = mesh.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Item(0.0, source));
    while let Some(Item(d, v)) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        for (w, len) in mesh.graph().neighbors(v) {
            if !done[w] {
                relax(&mut dist, &mut heap, w, d + len);
            }
        }
        for &t in mesh.vertex_triangles(v) {
            let tri = mesh.triangles()[t];
            let i = tri.iter().position(|&x| x == v).unwrap();
            for (a, c) in [(tri[(i + 1) % 3], tri[(i + 2) % 3]), (tri[(i + 2) % 3], tri[(i + 1) % 3])] {
                if done[a] && !done[c] {
                    if let Some(nd) = unfold(mesh, v, a, c, d, dist[a]) {
                        relax(&mut dist, &mut heap, c, nd);
                    }
                }
            }
        }
    }
    check_reached(source, dist)
}

/// Distances from `source` along mesh edges only.
pub fn edge_distance_field(mesh: &TriMesh, source: usize) -> Result<DistanceField> {
    if source >= mesh.vertex_count() {
        return param(format!("source {source} out of range"));
    }
    check_reached(source, mesh.graph().dijkstra(&[source], None).dist)
}

fn relax(dist: &mut [f64], heap: &mut BinaryHeap<Item>, w: usize, nd: f64) {
    if nd < dist[w] {
        dist[w] = nd;
        heap.push(Item(nd, w));
    }
}

fn check_reached(source: usize, dist: Vec<f64>) -> Result<DistanceField> {
    let unreachable: Vec<usize> = (0..dist.len()).filter(|&v| !dist[v].is_finite()).collect();
    if let Some(&first) = unreachable.first() {
        return Err(Error::Disconnected {
            source_vertex: source,
            first,
            count: unreachable.len(),
        });
    }
    Ok(DistanceField { source, dist })
}

fn unfold(mesh: &TriMesh, a: usize, b: usize, c: usize, da: f64, db: f64) -> Option<f64> {
    let l = mesh.edge_length(a, b)?;
    let lac = mesh.edge_length(a, c)?;
    let lbc = mesh.edge_length(b, c)?;
    // a at the origin, b on the x axis, c above, source below
    let cx = (l * l + lac * lac - lbc * lbc) / (2.0 * l);
    let cy = (lac * lac - cx * cx).max(0.0).sqrt();
    let sx = (da * da - db * db + l * l) / (2.0 * l);
    let sy2 = da * da - sx * sx;
    if sy2 <= 0.0 {
        return None;
    }
    let sy = -sy2.sqrt();
    // crossing of the segment S→c with the x axis
    let t = -sy / (cy - sy);
    let x = sx + t * (cx - sx);
    if !(0.0..=l).contains(&x) {
        return None;
    }
    Some((cx - sx).hypot(cy - sy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
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

/// Intrinsic distance between `u` and `v` using only edges with both endpoints
/// in `allowed`. `Ok(None)` means the two vertices are not connected there.
pub fn subsurface_distance(
    mesh: &TriMesh,
    allowed: &[usize],
    u: usize,
    v: usize,
) -> Result<Option<f64>> {
    let mut mask = vec![false; mesh.vertex_count()];
    for &a in allowed {
        if a >= mesh.vertex_count() {
            return param(format!("allowed vertex {a} out of range"));
        }
        mask[a] = true;
    }
    for x in [u, v] {
        if x >= mesh.vertex_count() || !mask[x] {
            return param(format!("vertex {x} is not in the allowed set"));
        }
    }
    let sp = mesh.graph().dijkstra_until(&[u], Some(&mask), Some(v));
    Ok(sp.dist[v].is_finite().then_some(sp.dist[v]))
}
