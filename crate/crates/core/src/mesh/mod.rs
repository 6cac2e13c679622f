//! Intrinsic triangulated surfaces.
//!
//! A [`TriMesh`] is a connected, orientable, manifold triangle complex with a
//! positive length on every edge. No embedding is stored; angles and areas are
//! those of the flat triangles with the given side lengths, and curvature lives
//! at the vertices as angle defect.

mod distance;
mod gauss_bonnet;
mod io;
mod profile;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

pub use distance::{distance_field, edge_distance_field, subsurface_distance, DistanceField};
pub use gauss_bonnet::{discrete_gauss_bonnet, GaussBonnetReport};
pub use io::{read_trimesh, write_trimesh};
pub use profile::{
    ball_profile, ball_profile_at, scan_topology_bound, BallProfile, BallSample, TopologyScan,
};

use crate::error::{Error, Result};
use crate::graph::{UnionFind, WeightedGraph};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    /// Undirected edges with `e[0] < e[1]`.
    edges: Vec<[usize; 2]>,
    edge_lengths: Vec<f64>,
    /// Edge ids of `(t0,t1)`, `(t1,t2)`, `(t2,t0)`.
    tri_edges: Vec<[usize; 3]>,
    /// Triangles on each side of an edge (`NONE` when on the boundary).
    edge_tris: Vec<[usize; 2]>,
    edge_index: HashMap<(usize, usize), usize>,
    vertex_tris: Vec<Vec<usize>>,
    graph: WeightedGraph,
    labels: BTreeMap<String, Vec<usize>>,
}

/// Ordered one-ring of a vertex: neighbours in the rotation order of the
/// surface orientation, and whether the ring closes up (interior vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLink {
    pub ring: Vec<usize>,
    pub closed: bool,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TriMesh {
    /// Builds and validates a mesh; `length(a, b)` supplies the length of every edge.
    pub fn with_length_fn(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        mut length: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut lengths = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for t in &triangles {
            for i in 0..3 {
                let k = key(t[i], t[(i + 1) % 3]);
                if seen.insert(k) {
                    lengths.push((k, length(k.0, k.1)));
                }
            }
        }
        Self::new(vertex_count, triangles, lengths, BTreeMap::new())
    }

    /// Builds and validates a mesh from triangles, edge lengths and labels.
    pub fn new(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        lengths: Vec<((usize, usize), f64)>,
        labels: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::Mesh(m));
        if triangles.is_empty() {
            return bad("mesh has no triangles".into());
        }
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut edge_tris: Vec<[usize; 2]> = Vec::new();
        // direction in which each edge side was used, to check orientation
        let mut edge_dirs: Vec<[bool; 2]> = Vec::new();
        let mut vertex_tris = vec![Vec::new(); vertex_count];
        for (ti, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertex_count) {
                return bad(format!("triangle {ti} references a vertex out of range"));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return bad(format!("triangle {ti} is degenerate: {t:?}"));
            }
            let mut te = [0; 3];
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let k = key(a, b);
                let e = *edge_index.entry(k).or_insert_with(|| {
                    edges.push([k.0, k.1]);
                    edge_tris.push([NONE, NONE]);
                    edge_dirs.push([false, false]);
                    edges.len() - 1
                });
                let side = if edge_tris[e][0] == NONE {
                    0
                } else if edge_tris[e][1] == NONE {
                    1
                } else {
                    return bad(format!("edge {k:?} borders more than two triangles"));
                };
                edge_tris[e][side] = ti;
                edge_dirs[e][side] = a < b;
                te[i] = e;
            }
            tri_edges.push(te);
            for &v in t {
                vertex_tris[v].push(ti);
            }
        }
        for (e, tris) in edge_tris.iter().enumerate() {
            if tris[1] != NONE && edge_dirs[e][0] == edge_dirs[e][1] {
                return bad(format!(
                    "triangles {} and {} are inconsistently oriented across edge {:?}",
                    tris[0], tris[1], edges[e]
                ));
            }
        }
        if let Some(v) = vertex_tris.iter().position(|t| t.is_empty()) {
            return bad(format!("vertex {v} belongs to no triangle"));
        }

        let mut edge_lengths = vec![f64::NAN; edges.len()];
        for ((a, b), len) in lengths {
            let Some(&e) = edge_index.get(&key(a, b)) else {
                return bad(format!("length given for ({a}, {b}) which is not a triangle edge"));
            };
            if !(len.is_finite() && len > 0.0) {
                return bad(format!("edge ({a}, {b}) has non-positive length {len}"));
            }
            edge_lengths[e] = len;
        }
        if let Some(e) = edge_lengths.iter().position(|l| l.is_nan()) {
            return bad(format!("edge {:?} has no length", edges[e]));
        }
        for (ti, te) in tri_edges.iter().enumerate() {
            let [a, b, c] = te.map(|e| edge_lengths[e]);
            if a >= b + c || b >= a + c || c >= a + b {
                return bad(format!(
                    "triangle {ti} violates the strict triangle inequality ({a}, {b}, {c})"
                ));
            }
        }

        let graph = WeightedGraph::from_edges(
            vertex_count,
            &edges
                .iter()
                .zip(&edge_lengths)
                .map(|(e, &l)| (e[0], e[1], l))
                .collect::<Vec<_>>(),
        )?;
        for (name, vs) in &labels {
            if let Some(v) = vs.iter().find(|&&v| v >= vertex_count) {
                return bad(format!("label {name} references vertex {v} out of range"));
            }
        }
        let mesh = Self {
            vertex_count,
            triangles,
            edges,
            edge_lengths,
            tri_edges,
            edge_tris,
            edge_index,
            vertex_tris,
            graph,
            labels,
        };
        for v in 0..vertex_count {
            mesh.link(v)?;
        }
        let (_, count) = mesh.graph.components(None);
        if count != 1 {
            return bad(format!("mesh has {count} connected components"));
        }
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn edge_triangles(&self, e: usize) -> (usize, Option<usize>) {
        let [a, b] = self.edge_tris[e];
        (a, (b != NONE).then_some(b))
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_tris[e][1] == NONE
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_tris[v]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&key(a, b)).copied()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_id(a, b).map(|e| self.edge_lengths[e])
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// The edge graph weighted by edge length.
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn labels(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<&[usize]> {
        self.labels.get(name).map(|v| v.as_slice())
    }

    pub fn set_label(&mut self, name: impl Into<String>, vertices: Vec<usize>) -> Result<()> {
        if let Some(v) = vertices.iter().find(|&&v| v >= self.vertex_count) {
            return Err(Error::Mesh(format!("label vertex {v} out of range")));
        }
        self.labels.insert(name.into(), vertices);
        Ok(())
    }

    /// Side lengths `(|t0t1|, |t1t2|, |t2t0|)` of triangle `t`.
    pub fn triangle_lengths(&self, t: usize) -> [f64; 3] {
        self.tri_edges[t].map(|e| self.edge_lengths[e])
    }

    /// Corner angles of triangle `t` at `t0`, `t1`, `t2`.
    pub fn triangle_angles(&self, t: usize) -> [f64; 3] {
        let [l01, l12, l20] = self.triangle_lengths(t);
        [
            corner_angle(l01, l20, l12),
            corner_angle(l01, l12, l20),
            corner_angle(l12, l20, l01),
        ]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_lengths(t);
        heron(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Planar coordinates of the corners of triangle `t`, with `t0` at the
    /// origin and `t1` on the positive x axis.
    pub fn triangle_layout(&self, t: usize) -> [[f64; 2]; 3] {
        let [l01, l12, l20] = self.triangle_lengths(t);
        let x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
        let y = (l20 * l20 - x * x).max(0.0).sqrt();
        [[0.0, 0.0], [l01, 0.0], [x, y]]
    }

    /// Sum of corner angles at `v`.
    pub fn angle_sum(&self, v: usize) -> f64 {
        self.vertex_tris[v]
            .iter()
            .map(|&t| {
                let i = self.triangles[t].iter().position(|&x| x == v).unwrap();
                self.triangle_angles(t)[i]
            })
            .sum()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_tris[v].iter().any(|&t| {
            self.tri_edges[t]
                .iter()
                .any(|&e| self.is_boundary_edge(e) && self.edges[e].contains(&v))
        })
    }

    /// Angle defect `2π − Σ angles` at interior vertices, `None` on the boundary.
    pub fn angle_defects(&self) -> Vec<Option<f64>> {
        (0..self.vertex_count)
            .map(|v| (!self.is_boundary_vertex(v)).then(|| 2.0 * PI - self.angle_sum(v)))
            .collect()
    }

    /// Barycentric dual-cell area: a third of the area of every incident triangle.
    pub fn dual_areas(&self) -> Vec<f64> {
        let mut area = vec![0.0; self.vertex_count];
        for (t, tri) in self.triangles.iter().enumerate() {
            let a = self.triangle_area(t) / 3.0;
            for &v in tri {
                area[v] += a;
            }
        }
        area
    }

    /// `V − E + F` of the whole complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Ordered one-ring of `v`. Fails if the star of `v` is not a single fan.
    pub fn link(&self, v: usize) -> Result<VertexLink> {
        self.link_within(v, |_| true)
            .ok_or_else(|| Error::Mesh(format!("vertex {v} is not a manifold vertex")))
    }

    /// One-ring of `v` using only triangles accepted by `keep`; `None` if those
    /// triangles do not form a single fan around `v` (or there are none).
    pub fn link_within(&self, v: usize, keep: impl Fn(usize) -> bool) -> Option<VertexLink> {
        // in each triangle (v, a, b) in orientation order the link has a directed edge a -> b
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut has_prev: HashMap<usize, bool> = HashMap::new();
        let mut count = 0;
        for &t in &self.vertex_tris[v] {
            if !keep(t) {
                continue;
            }
            let tri = self.triangles[t];
            let i = tri.iter().position(|&x| x == v).unwrap();
            let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            if next.insert(a, b).is_some() {
                return None;
            }
            if has_prev.insert(b, true) == Some(true) {
                return None;
            }
            has_prev.entry(a).or_insert(false);
            count += 1;
        }
        if count == 0 {
            return None;
        }
        let starts: Vec<usize> = has_prev
            .iter()
            .filter(|(_, &p)| !p)
            .map(|(&x, _)| x)
            .collect();
        let (start, closed) = match starts.len() {
            0 => (*next.keys().min().unwrap(), true),
            1 => (starts[0], false),
            _ => return None,
        };
        let mut ring = vec![start];
        let mut cur = start;
        while let Some(&n) = next.get(&cur) {
            if n == start {
                break;
            }
            ring.push(n);
            cur = n;
            if ring.len() > count + 1 {
                return None;
            }
        }
        let expected = if closed { count } else { count + 1 };
        (ring.len() == expected).then_some(VertexLink { ring, closed })
    }

    /// Boundary loops as vertex cycles, each traversed in the direction the
    /// boundary edges have in their triangles. Loops are sorted by smallest vertex.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for (e, tris) in self.edge_tris.iter().enumerate() {
            if tris[1] != NONE {
                continue;
            }
            let t = self.triangles[tris[0]];
            let [a, b] = self.edges[e];
            let i = t.iter().position(|&x| x == a).unwrap();
            if t[(i + 1) % 3] == b {
                next.insert(a, b);
            } else {
                next.insert(b, a);
            }
        }
        let mut loops = Vec::new();
        let mut used = std::collections::BTreeSet::new();
        for &s in next.keys() {
            if used.contains(&s) {
                continue;
            }
            let mut cyc = vec![s];
            used.insert(s);
            let mut cur = next[&s];
            while cur != s {
                cyc.push(cur);
                used.insert(cur);
                cur = next[&cur];
            }
            loops.push(cyc);
        }
        loops
    }

    /// First Betti number of the whole complex, `b1 = 1 − χ` with boundary or `2 − χ` when closed.
    pub fn first_betti(&self) -> i64 {
        let closed = self.edge_tris.iter().all(|t| t[1] != NONE);
        (if closed { 2 } else { 1 }) - self.euler_characteristic()
    }

    /// Sub-mesh on the triangles accepted by `keep`, with vertices renumbered in
    /// increasing order. Labels are carried over (restricted to surviving vertices).
    /// Returns the mesh and the old→new vertex map.
    pub fn submesh(&self, keep: impl Fn(usize) -> bool) -> Result<(TriMesh, Vec<Option<usize>>)> {
        let kept: Vec<usize> = (0..self.triangles.len()).filter(|&t| keep(t)).collect();
        let mut map = vec![None; self.vertex_count];
        let mut n = 0;
        let mut used = vec![false; self.vertex_count];
        for &t in &kept {
            for &v in &self.triangles[t] {
                used[v] = true;
            }
        }
        for v in 0..self.vertex_count {
            if used[v] {
                map[v] = Some(n);
                n += 1;
            }
        }
        let triangles: Vec<[usize; 3]> = kept
            .iter()
            .map(|&t| self.triangles[t].map(|v| map[v].unwrap()))
            .collect();
        let mut lengths = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &t in &kept {
            for &e in &self.tri_edges[t] {
                if seen.insert(e) {
                    let [a, b] = self.edges[e];
                    lengths.push(((map[a].unwrap(), map[b].unwrap()), self.edge_lengths[e]));
                }
            }
        }
        let labels = self
            .labels
            .iter()
            .map(|(k, vs)| (k.clone(), vs.iter().filter_map(|&v| map[v]).collect()))
            .collect();
        Ok((TriMesh::new(n, triangles, lengths, labels)?, map))
    }

    /// Identifies vertices according to `target` (an equivalence given by a
    /// union-find over the current vertices) and rebuilds the mesh. Edges that
    /// become identified must carry equal lengths up to `length_tol` (relative).
    pub(crate) fn quotient(
        vertex_count: usize,
        triangles: &[[usize; 3]],
        length: &HashMap<(usize, usize), f64>,
        labels: &BTreeMap<String, Vec<usize>>,
        uf: &mut UnionFind,
        length_tol: f64,
    ) -> Result<(TriMesh, Vec<usize>)> {
        let mut rep_index = HashMap::new();
        let mut map = vec![0; vertex_count];
        for (v, slot) in map.iter_mut().enumerate() {
            let r = uf.find(v);
            let next = rep_index.len();
            *slot = *rep_index.entry(r).or_insert(next);
        }
        let n = rep_index.len();
        let tris: Vec<[usize; 3]> = triangles.iter().map(|t| t.map(|v| map[v])).collect();
        let mut merged: HashMap<(usize, usize), f64> = HashMap::new();
        let mut keys: Vec<&(usize, usize)> = length.keys().collect();
        keys.sort();
        for k in keys {
            let l = length[k];
            let nk = key(map[k.0], map[k.1]);
            if nk.0 == nk.1 {
                return Err(Error::Build(format!("gluing collapses edge {k:?}")));
            }
            if let Some(&old) = merged.get(&nk) {
                if (old - l).abs() > length_tol * old.max(l) {
                    return Err(Error::Build(format!(
                        "glued edges {nk:?} have different lengths {old} and {l}"
                    )));
                }
            } else {
                merged.insert(nk, l);
            }
        }
        let mut lengths: Vec<((usize, usize), f64)> = merged.into_iter().collect();
        lengths.sort_by(|a, b| a.0.cmp(&b.0));
        let labels = labels
            .iter()
            .map(|(k, vs)| {
                let mut seen = std::collections::HashSet::new();
                let out: Vec<usize> = vs.iter().map(|&v| map[v]).filter(|&m| seen.insert(m)).collect();
                (k.clone(), out)
            })
            .collect();
        Ok((TriMesh::new(n, tris, lengths, labels)?, map))
    }

    /// Glues boundary loop `a` to boundary loop `b` (same vertex count).
    /// Vertex `a[i]` is identified with `b[(n − i) mod n]`, which keeps the
    /// orientation consistent when both loops follow the boundary direction.
    pub fn glue_loops(&self, a: &[usize], b: &[usize]) -> Result<(TriMesh, Vec<usize>)> {
        if a.len() != b.len() || a.len() < 3 {
            return Err(Error::Build(format!(
                "cannot glue loops of lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        let n = a.len();
        let mut uf = UnionFind::new(self.vertex_count);
        for i in 0..n {
            uf.union(a[i], b[(n - i) % n]);
        }
        let length: HashMap<(usize, usize), f64> = self
            .edges
            .iter()
            .zip(&self.edge_lengths)
            .map(|(e, &l)| ((e[0], e[1]), l))
            .collect();
        Self::quotient(self.vertex_count, &self.triangles, &length, &self.labels, &mut uf, 1e-9)
    }
}

/// Angle opposite to side `opp` in a triangle with the two adjacent sides `a`, `b`.
pub(crate) fn corner_angle(a: f64, b: f64, opp: f64) -> f64 {
    let c = ((a * a + b * b - opp * opp) / (2.0 * a * b)).clamp(-1.0, 1.0);
    c.acos()
}

/// Heron's formula in Kahan's numerically stable ordering.
pub(crate) fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> TriMesh {
        // unit square split along the diagonal 0-2
        let d = 2f64.sqrt();
        TriMesh::with_length_fn(4, vec![[0, 1, 2], [0, 2, 3]], |a, b| {
            if (a, b) == (0, 2) {
                d
            } else {
                1.0
            }
        })
        .unwrap()
    }

    #[test]
    fn basic_queries() {
        let m = square();
        assert_eq!(m.edge_count(), 5);
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert!((m.angle_sum(0) - PI / 2.0).abs() < 1e-12);
        assert_eq!(m.boundary_loops(), vec![vec![0, 1, 2, 3]]);
        assert!(m.angle_defects().iter().all(|d| d.is_none()));
        let link = m.link(0).unwrap();
        assert_eq!(link, VertexLink { ring: vec![1, 2, 3], closed: false });
    }

    #[test]
    fn validation_errors() {
        let one = |_: usize, _: usize| 1.0;
        // inconsistent orientation
        assert!(TriMesh::with_length_fn(4, vec![[0, 1, 2], [0, 1, 3]], one).is_err());
        // non-manifold edge
        assert!(
            TriMesh::with_length_fn(5, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]], one).is_err()
        );
        // triangle inequality
        assert!(TriMesh::with_length_fn(3, vec![[0, 1, 2]], |a, b| if (a, b) == (0, 1) {
            2.0
        } else {
            1.0
        })
        .is_err());
        // bow tie at vertex 0
        assert!(TriMesh::with_length_fn(5, vec![[0, 1, 2], [0, 3, 4]], one).is_err());
        // isolated vertex
        assert!(TriMesh::with_length_fn(4, vec![[0, 1, 2]], one).is_err());
        // disconnected
        assert!(TriMesh::with_length_fn(6, vec![[0, 1, 2], [3, 4, 5]], one).is_err());
        // missing and extra lengths
        assert!(TriMesh::new(3, vec![[0, 1, 2]], vec![((0, 1), 1.0)], BTreeMap::new()).is_err());
        assert!(TriMesh::new(
            3,
            vec![[0, 1, 2]],
            vec![((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), 1.0), ((0, 3), 1.0)],
            BTreeMap::new()
        )
        .is_err());
    }

    #[test]
    fn heron_matches_layout() {
        let m = square();
        let p = m.triangle_layout(0);
        let shoelace = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        assert!((shoelace - m.triangle_area(0)).abs() < 1e-12);
        assert!((heron(3.0, 4.0, 5.0) - 6.0).abs() < 1e-12);
    }
}
