//! Pairs of pants from doubled right-angled hexagons, and trees of them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::UnionFind;
use crate::mesh::TriMesh;

type Point = [f64; 3];

fn mink(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

fn comb(s: f64, a: Point, t: f64, b: Point) -> Point {
    [s * a[0] + t * b[0], s * a[1] + t * b[1], s * a[2] + t * b[2]]
}

/// Hyperbolic distance between hyperboloid points.
pub(crate) fn hyperboloid_distance(a: Point, b: Point) -> f64 {
    let d = comb(1.0, a, -1.0, b);
    2.0 * (mink(d, d).max(0.0).sqrt() / 2.0).asinh()
}

/// Point at fraction `s` along the geodesic from `a` to `b`.
fn interpolate(a: Point, b: Point, s: f64) -> Point {
    if s == 0.0 {
        return a;
    }
    if s == 1.0 {
        return b;
    }
    let d = hyperboloid_distance(a, b);
    let w = d.sinh();
    comb(((1.0 - s) * d).sinh() / w, a, (s * d).sinh() / w, b)
}

/// Lengths `b_i` of the sides opposite `a_i` in a right-angled hexagon with
/// alternate sides `a_1, a_2, a_3`.
pub fn hexagon_opposite_sides(a: [f64; 3]) -> Result<[f64; 3]> {
    if a.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Build(format!("hexagon sides must be positive, got {a:?}")));
    }
    let mut b = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let c = (a[j].cosh() * a[k].cosh() + a[i].cosh()) / (a[j].sinh() * a[k].sinh());
        b[i] = c.acosh();
        if !(b[i].is_finite() && b[i] > 0.0) {
            return Err(Error::Build(format!("infeasible hexagon for sides {a:?}")));
        }
    }
    Ok(b)
}

/// Corners of the right-angled hexagon with sides `a1, b3, a2, b1, a3, b2`
/// in counter-clockwise order, traced by walking and turning left.
fn hexagon_corners(a: [f64; 3], b: [f64; 3]) -> Result<[Point; 6]> {
    let sides = [a[0], b[2], a[1], b[0], a[2], b[1]];
    let mut p: Point = [0.0, 0.0, 1.0];
    let mut v: Point = [1.0, 0.0, 0.0];
    let mut corners = [p; 6];
    for (k, &s) in sides.iter().enumerate() {
        corners[k] = p;
        let (ch, sh) = (s.cosh(), s.sinh());
        let np = comb(ch, p, sh, v);
        let nv = comb(sh, p, ch, v);
        // left normal: Lorentz cross product of position and direction
        let w = [
            np[1] * nv[2] - np[2] * nv[1],
            np[2] * nv[0] - np[0] * nv[2],
            -(np[0] * nv[1] - np[1] * nv[0]),
        ];
        let norm = mink(w, w).sqrt();
        p = np;
        v = [w[0] / norm, w[1] / norm, w[2] / norm];
    }
    // rounding in the walk grows with the square of the coordinate size
    let size = corners.iter().map(|c| c[2]).fold(1.0, f64::max);
    let gap = hyperboloid_distance(p, corners[0]);
    if gap > 1e-9 * (1.0 + sides.iter().sum::<f64>()) + 1e-12 * size * size {
        return Err(Error::Build(format!("hexagon does not close (gap {gap})")));
    }
    Ok(corners)
}

/// Triangulated pair of pants: vertices with hyperboloid coordinates (the
/// mirrored half reuses the coordinates of its twin), triangles, cuff loops
/// in boundary order starting at a seam corner, and the centre of the first hexagon.
pub(crate) struct Pants {
    pub coords: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub cuffs: [Vec<usize>; 3],
    pub center: usize,
}

impl Pants {
    pub fn lengths(&self) -> HashMap<(usize, usize), f64> {
        let mut out = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let k = (a.min(b), a.max(b));
                out.entry(k)
                    .or_insert_with(|| hyperboloid_distance(self.coords[a], self.coords[b]));
            }
        }
        out
    }

    pub fn to_mesh(&self) -> Result<TriMesh> {
        let mut lengths: Vec<_> = self.lengths().into_iter().collect();
        lengths.sort_by(|a, b| a.0.cmp(&b.0));
        let mut labels = BTreeMap::new();
        for (i, c) in self.cuffs.iter().enumerate() {
            labels.insert(format!("cuff{i}"), c.clone());
        }
        labels.insert("base".to_string(), vec![self.center]);
        TriMesh::new(self.coords.len(), self.triangles.clone(), lengths, labels)
    }
}

/// Unit spacelike normal of the geodesic through `a` and `b`, signed so that
/// `inside` has a positive product with it.
fn side_normal(a: Point, b: Point, inside: Point) -> Point {
    let w = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        -(a[0] * b[1] - a[1] * b[0]),
    ];
    let norm = mink(w, w).sqrt();
    let sign = if mink(w, inside) >= 0.0 { 1.0 } else { -1.0 };
    [sign * w[0] / norm, sign * w[1] / norm, sign * w[2] / norm]
}

fn to_disk(p: Point) -> [f64; 2] {
    [p[0] / (1.0 + p[2]), p[1] / (1.0 + p[2])]
}

/// Candidate interior points on geodesic circles about `center`, spaced
/// about `step` apart in every direction, nearest first.
fn lattice_candidates(center: Point, radius: f64, step: f64) -> Vec<Point> {
    // orthonormal tangent frame at `center`
    let e1 = {
        let t = comb(1.0, [1.0, 0.0, 0.0], mink([1.0, 0.0, 0.0], center), center);
        let n = mink(t, t).sqrt();
        [t[0] / n, t[1] / n, t[2] / n]
    };
    let e2 = {
        let w = [
            center[1] * e1[2] - center[2] * e1[1],
            center[2] * e1[0] - center[0] * e1[2],
            -(center[0] * e1[1] - center[1] * e1[0]),
        ];
        let n = mink(w, w).sqrt();
        [w[0] / n, w[1] / n, w[2] / n]
    };
    // rings at geodesic distance r carry points every `step` of arc length
    let mut out: Vec<(f64, Point)> = Vec::new();
    let rings = (radius / step).ceil() as usize;
    for j in 1..=rings {
        let r = j as f64 * step;
        let count = ((2.0 * PI * r.sinh() / step).ceil() as usize).max(6);
        let offset = if j % 2 == 0 { 0.5 } else { 0.0 };
        for i in 0..count {
            let theta = 2.0 * PI * (i as f64 + offset) / count as f64;
            let dir = comb(theta.cos(), e1, theta.sin(), e2);
            out.push((r, comb(r.cosh(), center, r.sinh(), dir)));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.into_iter().map(|(_, p)| p).collect()
}

/// Constrained Delaunay triangulation of the hexagon points in the Poincaré
/// disk chart, keeping the faces inside the hexagon.
fn triangulate(
    coords: &[Point],
    side_pts: &[Vec<usize>],
    on_side: &[u8],
    normals: &[Point],
) -> Result<Vec<[usize; 3]>> {
    use spade::Triangulation;
    let mut cdt: spade::ConstrainedDelaunayTriangulation<spade::Point2<f64>> = Default::default();
    let mut handles = Vec::with_capacity(coords.len());
    let mut id_of = HashMap::new();
    for (i, &p) in coords.iter().enumerate() {
        let [x, y] = to_disk(p);
        let h = cdt
            .insert(spade::Point2::new(x, y))
            .map_err(|e| Error::Build(format!("triangulation failed: {e:?}")))?;
        if id_of.insert(h.index(), i).is_some() {
            return Err(Error::Build("two pants vertices coincide in the chart".into()));
        }
        handles.push(h);
    }
    for side in side_pts {
        for w in side.windows(2) {
            cdt.add_constraint(handles[w[0]], handles[w[1]]);
        }
    }
    let mut tris = Vec::new();
    for face in cdt.inner_faces() {
        let t = face.vertices().map(|v| id_of[&v.fix().index()]);
        // three points of one side are collinear, so such a face lies outside
        if on_side[t[0]] & on_side[t[1]] & on_side[t[2]] != 0 {
            continue;
        }
        let g = t.iter().fold([0.0; 3], |s, &v| comb(1.0, s, 1.0, coords[v]));
        if normals.iter().all(|&nk| mink(g, nk) > 0.0) {
            tris.push(t);
        }
    }
    Ok(tris)
}

/// Doubled hexagon with boundary points every `spacing` at most and interior
/// points greedily kept at least `spacing` apart, triangulated by constrained
/// Delaunay in the Poincaré disk chart (whose circles are hyperbolic circles).
fn pants_with_spacing(corners: &[Point; 6], spacing: f64) -> Result<Pants> {
    let sum = corners.iter().fold([0.0; 3], |s, c| comb(1.0, s, 1.0, *c));
    let n = (-mink(sum, sum)).sqrt();
    let center = [sum[0] / n, sum[1] / n, sum[2] / n];
    let normals: Vec<Point> = (0..6)
        .map(|k| side_normal(corners[k], corners[(k + 1) % 6], center))
        .collect();

    let mut coords: Vec<Point> = Vec::new();
    let mut on_side: Vec<u8> = Vec::new();
    let mut side_pts: Vec<Vec<usize>> = vec![Vec::new(); 6];
    for k in 0..6 {
        let (a, b) = (corners[k], corners[(k + 1) % 6]);
        // a cuff side needs an interior point or its two copies would coincide
        let least = if k % 2 == 0 { 2 } else { 1 };
        let segments = ((hyperboloid_distance(a, b) / spacing).ceil() as usize).max(least);
        for j in 0..segments {
            if j == 0 && k > 0 {
                // corner k was added as the end of side k − 1
                let id = *side_pts[k - 1].last().unwrap();
                on_side[id] |= 1 << k;
                side_pts[k].push(id);
                continue;
            }
            coords.push(interpolate(a, b, j as f64 / segments as f64));
            on_side.push(1 << k);
            side_pts[k].push(coords.len() - 1);
        }
        if k == 5 {
            on_side[0] |= 1 << 5;
            side_pts[5].push(0);
        } else {
            coords.push(b);
            on_side.push(1 << k);
            side_pts[k].push(coords.len() - 1);
        }
    }
    let center_id = coords.len();
    coords.push(center);
    on_side.push(0);

    let radius = corners
        .iter()
        .map(|&c| hyperboloid_distance(center, c))
        .fold(0.0, f64::max);
    for p in lattice_candidates(center, radius, spacing / 3.0) {
        let inside = normals.iter().all(|&nk| mink(p, nk).asinh() >= 0.5 * spacing);
        if inside && coords.iter().all(|&q| hyperboloid_distance(p, q) >= spacing) {
            coords.push(p);
            on_side.push(0);
        }
    }

    // an inner edge joining two seam vertices would be shared by both copies
    // and border four triangles, so such edges get their midpoint added
    let seam_mask: u8 = 0b101010;
    let seam_segments: HashSet<(usize, usize)> = [1, 3, 5]
        .iter()
        .flat_map(|&k| side_pts[k].windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
        .collect();
    let chords = |tris: &[[usize; 3]], on_side: &[u8]| -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = tris
            .iter()
            .flat_map(|t| (0..3).map(move |i| (t[i].min(t[(i + 1) % 3]), t[i].max(t[(i + 1) % 3]))))
            .filter(|&(u, v)| on_side[u] & seam_mask != 0 && on_side[v] & seam_mask != 0)
            .filter(|e| !seam_segments.contains(e))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let mut tris = triangulate(&coords, &side_pts, &on_side, &normals)?;
    for _ in 0..20 {
        let split = chords(&tris, &on_side);
        if split.is_empty() {
            break;
        }
        for (u, v) in split {
            coords.push(interpolate(coords[u], coords[v], 0.5));
            on_side.push(0);
        }
        tris = triangulate(&coords, &side_pts, &on_side, &normals)?;
    }
    if !chords(&tris, &on_side).is_empty() {
        return Err(Error::Build("pants hexagon too thin for this resolution".into()));
    }

    // mirror copy glued along the seam sides 1, 3, 5
    let base = coords.len();
    let mut twin = vec![0usize; base];
    let mut next = base;
    for v in 0..base {
        if on_side[v] & seam_mask != 0 {
            twin[v] = v;
        } else {
            twin[v] = next;
            next += 1;
        }
    }
    let mut all_coords = coords.clone();
    all_coords.resize(next, [0.0; 3]);
    for v in 0..base {
        all_coords[twin[v]] = coords[v];
    }
    let mirrored: Vec<[usize; 3]> = tris.iter().map(|t| [twin[t[0]], twin[t[2]], twin[t[1]]]).collect();
    tris.extend(mirrored);

    // cuff i is side 2i on the first copy followed by its twin backwards
    let cuffs = [0, 1, 2].map(|i| {
        let side = &side_pts[2 * i];
        let m = side.len() - 1;
        let mut lp: Vec<usize> = side.clone();
        lp.extend(side[1..m].iter().rev().map(|&v| twin[v]));
        lp
    });
    Ok(Pants {
        coords: all_coords,
        triangles: tris,
        cuffs,
        center: center_id,
    })
}

/// Pants with cuff lengths `l`, every edge at most `h`.
pub(crate) fn ypiece(l: [f64; 3], h: f64) -> Result<Pants> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Build(format!("resolution must be positive, got {h}")));
    }
    let a = l.map(|x| x / 2.0);
    let b = hexagon_opposite_sides(a)?;
    let corners = hexagon_corners(a, b)?;
    let mut spacing = 0.5 * h;
    loop {
        let p = pants_with_spacing(&corners, spacing)?;
        let max = p.lengths().values().copied().fold(0.0, f64::max);
        if max <= h {
            return Ok(orient_cuffs(p));
        }
        spacing *= 0.9;
        if spacing < 1e-4 * h {
            return Err(Error::Build("pants subdivision did not converge".into()));
        }
    }
}

/// Reverses each cuff if needed so that it follows the boundary direction of
/// its triangles, keeping the seam corner first.
fn orient_cuffs(mut p: Pants) -> Pants {
    let mut dir: HashMap<(usize, usize), ()> = HashMap::new();
    for t in &p.triangles {
        for i in 0..3 {
            dir.insert((t[i], t[(i + 1) % 3]), ());
        }
    }
    for c in p.cuffs.iter_mut() {
        if !dir.contains_key(&(c[0], c[1])) {
            c[1..].reverse();
        }
    }
    p
}

/// Complete binary tree of pants, all cuffs of length `l`. Node `n` has
/// children `2n+1` (glued to its cuff 1) and `2n+2` (cuff 2); a child's
/// cuff 0 faces its parent.
pub(crate) fn pants_tree(depth: u32, l: f64, h: f64) -> Result<TriMesh> {
    if depth > 12 {
        return Err(Error::Build(format!("depth {depth} too large")));
    }
    let piece = ypiece([l; 3], h)?;
    let nodes = (1usize << (depth + 1)) - 1;
    let nv = piece.coords.len();
    let local = piece.lengths();
    let mut length = HashMap::with_capacity(local.len() * nodes);
    let mut triangles = Vec::with_capacity(piece.triangles.len() * nodes);
    for n in 0..nodes {
        let off = n * nv;
        triangles.extend(piece.triangles.iter().map(|t| t.map(|v| v + off)));
        for (&(a, b), &d) in &local {
            length.insert((a + off, b + off), d);
        }
    }
    let mut uf = UnionFind::new(nv * nodes);
    let mut labels: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let cuff = |n: usize, i: usize| -> Vec<usize> { piece.cuffs[i].iter().map(|v| v + n * nv).collect() };
    for child in 1..nodes {
        let parent = (child - 1) / 2;
        let slot = if child % 2 == 1 { 1 } else { 2 };
        let (a, b) = (cuff(parent, slot), cuff(child, 0));
        let k = a.len();
        for i in 0..k {
            uf.union(a[i], b[(k - i) % k]);
        }
        labels.insert(format!("glue{child}"), a);
    }
    let mut free = 0;
    for n in 0..nodes {
        let slots: &[usize] = match (n, 2 * n + 1 < nodes) {
            (0, true) => &[0],
            (0, false) => &[0, 1, 2],
            (_, true) => &[],
            (_, false) => &[1, 2],
        };
        for &i in slots {
            labels.insert(format!("cuff{free}"), cuff(n, i));
            free += 1;
        }
        labels.insert(format!("piece{n}"), (n * nv..(n + 1) * nv).collect());
    }
    labels.insert("base".into(), vec![piece.center]);
    let (mesh, _) = TriMesh::quotient(nv * nodes, &triangles, &length, &labels, &mut uf, 1e-9)?;
    Ok(mesh)
}
