use serde::Serialize;

use crate::error::{param, Result};
use crate::graph::UnionFind;
use crate::mesh::TriMesh;

/// Removed sets `E_n` with neighbourhoods `V_n ⊃ E_n` on a mesh, and the
/// clearance `r`, boundary length `s` and loop count `n_max` to certify.
///
/// The boundary of each `V_n` inside the surface must stay away from the mesh
/// boundary, so that it is a union of closed curves.
#[derive(Debug, Clone)]
pub struct SeparationSpec<'a> {
    pub host: &'a TriMesh,
    pub e_sets: Vec<Vec<usize>>,
    pub v_sets: Vec<Vec<usize>>,
    pub r: f64,
    pub s: f64,
    pub n_max: usize,
}

impl SeparationSpec<'_> {
    pub fn validate(&self) -> Result<()> {
        let n = self.host.vertex_count();
        if self.e_sets.len() != self.v_sets.len() {
            return param(format!(
                "{} removed sets but {} neighbourhoods",
                self.e_sets.len(),
                self.v_sets.len()
            ));
        }
        if !(self.r >= 0.0 && self.s >= 0.0) {
            return param("r and s must be non-negative");
        }
        let mut owner = vec![None; n];
        for (i, v) in self.v_sets.iter().enumerate() {
            for &x in v {
                if x >= n {
                    return param(format!("vertex {x} out of range"));
                }
                if let Some(j) = owner[x] {
                    if j != i {
                        return param(format!("neighbourhoods {j} and {i} share vertex {x}"));
                    }
                }
                owner[x] = Some(i);
            }
        }
        for (i, e) in self.e_sets.iter().enumerate() {
            if e.is_empty() {
                return param(format!("removed set {i} is empty"));
            }
            if let Some(&x) = e.iter().find(|&&x| x >= n || owner[x] != Some(i)) {
                return param(format!("vertex {x} of removed set {i} is not in its neighbourhood"));
            }
        }
        for (i, v) in self.v_sets.iter().enumerate() {
            let (edges, _) = region_boundary(self.host, &mask(n, &[v]));
            if let Some(x) = edges
                .iter()
                .flat_map(|&e| self.host.edges()[e])
                .find(|&x| self.host.is_boundary_vertex(x))
            {
                return param(format!(
                    "boundary of neighbourhood {i} reaches the mesh boundary at vertex {x}, so it is not a union of closed curves"
                ));
            }
        }
        Ok(())
    }
}

fn mask(n: usize, sets: &[&[usize]]) -> Vec<bool> {
    let mut m = vec![false; n];
    for s in sets {
        for &v in *s {
            m[v] = true;
        }
    }
    m
}

/// Boundary of the triangles spanned by `inside` that is not part of the
/// mesh boundary: its edges and its loops (vertex sets of the connected
/// components of those edges).
pub fn region_boundary(mesh: &TriMesh, inside: &[bool]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let in_region = |t: usize| mesh.triangles()[t].iter().all(|&v| inside[v]);
    let mut edges = Vec::new();
    for e in 0..mesh.edge_count() {
        if let (t0, Some(t1)) = mesh.edge_triangles(e) {
            if in_region(t0) != in_region(t1) {
                edges.push(e);
            }
        }
    }
    let mut uf = UnionFind::new(mesh.vertex_count());
    for &e in &edges {
        let [a, b] = mesh.edges()[e];
        uf.union(a, b);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut seen = vec![false; mesh.vertex_count()];
    for &e in &edges {
        for v in mesh.edges()[e] {
            if !seen[v] {
                seen[v] = true;
                groups.entry(uf.find(v)).or_default().push(v);
            }
        }
    }
    let mut loops: Vec<Vec<usize>> = groups
        .into_values()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    loops.sort();
    (edges, loops)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetReport {
    /// Distance from `∂V_n` to `E_n` (`None` when `V_n` has no inner boundary).
    pub clearance: Option<f64>,
    pub boundary_length: f64,
    pub loops: usize,
    /// Whether `V_n ∖ E_n` is connected.
    pub connected: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub r: f64,
    pub s: f64,
    pub n_max: usize,
    pub sets: Vec<SetReport>,
    /// Smallest distance between two different neighbourhoods.
    pub min_gap: Option<f64>,
    pub gap_pass: bool,
    /// Extremal measured values: the `(r, s, N)` this configuration certifies.
    pub r_measured: Option<f64>,
    pub s_measured: f64,
    pub n_measured: usize,
    pub pass: bool,
}

/// Checks the uniform separation conditions. Distances are shortest paths in
/// the edge graph of the mesh.
pub fn validate_uniform_separation(spec: &SeparationSpec) -> Result<SeparationReport> {
    spec.validate()?;
    let mesh = spec.host;
    let g = mesh.graph();
    let n = mesh.vertex_count();
    let mut sets = Vec::new();
    let mut gaps = Vec::new();
    for (i, (e, v)) in spec.e_sets.iter().zip(&spec.v_sets).enumerate() {
        let vm = mask(n, &[v]);
        let (edges, loops) = region_boundary(mesh, &vm);
        let boundary_length: f64 = edges.iter().map(|&k| mesh.edge_lengths()[k]).sum();
        let from_e = g.dijkstra(e, None);
        let clearance = loops
            .iter()
            .flatten()
            .map(|&x| from_e.dist[x])
            .min_by(f64::total_cmp);
        let mut rest = vm.clone();
        for &x in e {
            rest[x] = false;
        }
        let (_, count) = g.components(Some(&rest));
        let connected = count <= 1;
        let pass = clearance.is_none_or(|c| c >= spec.r)
            && boundary_length <= spec.s
            && loops.len() <= spec.n_max
            && connected;
        sets.push(SetReport {
            clearance,
            boundary_length,
            loops: loops.len(),
            connected,
            pass,
        });
        if i + 1 < spec.v_sets.len() {
            let from_v = g.dijkstra(v, None);
            for w in &spec.v_sets[i + 1..] {
                gaps.push(w.iter().map(|&x| from_v.dist[x]).fold(f64::INFINITY, f64::min));
            }
        }
    }
    let min_gap = gaps.into_iter().min_by(f64::total_cmp);
    let gap_pass = min_gap.is_none_or(|d| d >= spec.r);
    let r_measured = sets
        .iter()
        .filter_map(|s| s.clearance)
        .chain(min_gap)
        .min_by(f64::total_cmp);
    let s_measured = sets.iter().map(|s| s.boundary_length).fold(0.0, f64::max);
    let n_measured = sets.iter().map(|s| s.loops).max().unwrap_or(0);
    let pass = gap_pass && sets.iter().all(|s| s.pass);
    Ok(SeparationReport {
        r: spec.r,
        s: spec.s,
        n_max: spec.n_max,
        sets,
        min_gap,
        gap_pass,
        r_measured,
        s_measured,
        n_measured,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DStarReport {
    /// Largest finite distance over qualifying loop pairs (0 when there are none).
    pub d_star: f64,
    /// Some qualifying pair cannot be joined inside `V_n ∖ E_n`.
    pub infinite: bool,
    pub qualifying_pairs: usize,
    /// `(n, i, j)`: neighbourhood and loop indices attaining `d_star`.
    pub witness: Option<(usize, usize, usize)>,
}

/// Supremum over neighbourhoods `V_n` and pairs of boundary loops of `V_n`
/// that lie in one component of the complement of its interior, of their
/// intrinsic distance in `V_n ∖ E_n`.
pub fn estimate_d_star(spec: &SeparationSpec) -> Result<DStarReport> {
    spec.validate()?;
    let mesh = spec.host;
    let n = mesh.vertex_count();
    let mut report = DStarReport {
        d_star: 0.0,
        infinite: false,
        qualifying_pairs: 0,
        witness: None,
    };
    for (k, (e, v)) in spec.e_sets.iter().zip(&spec.v_sets).enumerate() {
        let vm = mask(n, &[v]);
        let (_, loops) = region_boundary(mesh, &vm);
        if loops.len() < 2 {
            continue;
        }
        // components of the closed complement, joined through outside triangles
        let mut uf = UnionFind::new(n);
        for t in mesh.triangles() {
            if t.iter().any(|&x| !vm[x]) {
                uf.union(t[0], t[1]);
                uf.union(t[1], t[2]);
            }
        }
        let mut rest = vm.clone();
        for &x in e {
            rest[x] = false;
        }
        for i in 0..loops.len() {
            let root = uf.find(loops[i][0]);
            let sources: Vec<usize> = loops[i].iter().copied().filter(|&x| rest[x]).collect();
            let sp = mesh.graph().dijkstra(&sources, Some(&rest));
            for j in i + 1..loops.len() {
                if uf.find(loops[j][0]) != root {
                    continue;
                }
                report.qualifying_pairs += 1;
                let d = loops[j].iter().map(|&x| sp.dist[x]).fold(f64::INFINITY, f64::min);
                if !d.is_finite() {
                    report.infinite = true;
                } else if d > report.d_star {
                    report.d_star = d;
                    report.witness = Some((k, i, j));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build, BuildSpec};

    fn disk() -> TriMesh {
        build(&BuildSpec::HyperbolicDisk { radius: 2.0, h: 0.2 }).unwrap()
    }

    fn ball(mesh: &TriMesh, c: usize, r: f64) -> Vec<usize> {
        let sp = mesh.graph().dijkstra(&[c], None);
        (0..mesh.vertex_count()).filter(|&v| sp.dist[v] <= r).collect()
    }

    #[test]
    fn annulus_around_centre() {
        let m = disk();
        let spec = SeparationSpec {
            host: &m,
            e_sets: vec![ball(&m, 0, 0.3)],
            v_sets: vec![ball(&m, 0, 1.0)],
            r: 0.5,
            s: 20.0,
            n_max: 1,
        };
        let rep = validate_uniform_separation(&spec).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.sets[0].loops, 1);
        let len = rep.sets[0].boundary_length;
        assert!((len - 2.0 * std::f64::consts::PI * 1f64.sinh()).abs() < 1.0, "{len}");
        assert_eq!(estimate_d_star(&spec).unwrap().d_star, 0.0);
    }

    #[test]
    fn ring_has_two_loops_in_different_components() {
        let m = disk();
        let inner = ball(&m, 0, 0.5);
        let v: Vec<usize> = ball(&m, 0, 1.2).into_iter().filter(|x| !inner.contains(x)).collect();
        let far = *v.last().unwrap();
        let spec = SeparationSpec {
            host: &m,
            e_sets: vec![vec![far]],
            v_sets: vec![v],
            r: 0.0,
            s: 100.0,
            n_max: 1,
        };
        let rep = validate_uniform_separation(&spec).unwrap();
        assert_eq!(rep.sets[0].loops, 2);
        assert!(!rep.pass);
        let d = estimate_d_star(&spec).unwrap();
        assert_eq!((d.qualifying_pairs, d.d_star), (0, 0.0));
    }

    #[test]
    fn spec_errors() {
        let m = disk();
        let spec = SeparationSpec {
            host: &m,
            e_sets: vec![vec![0]],
            v_sets: vec![vec![1, 2]],
            r: 0.0,
            s: 1.0,
            n_max: 1,
        };
        assert!(spec.validate().is_err());
    }
}
