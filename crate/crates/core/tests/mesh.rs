use std::collections::BTreeMap;
use std::f64::consts::PI;

use hypball::{
    ball_profile, ball_profile_at, basepoint, build, comparison_area, comparison_boundary_length,
    discrete_gauss_bonnet, distance_field, edge_distance_field, read_trimesh, scan_topology_bound,
    subsurface_distance, write_trimesh, BuildSpec, ComparisonParams, TriMesh,
};
use proptest::prelude::*;

/// Planar triangulated grid with `n × n` vertices at unit spacing, every
/// square cut along the diagonal that runs from lower left to upper right.
fn flat_grid(n: usize) -> (TriMesh, Vec<[f64; 2]>) {
    let id = |i: usize, j: usize| i * n + j;
    let pos: Vec<[f64; 2]> = (0..n * n).map(|v| [(v % n) as f64, (v / n) as f64]).collect();
    let mut tris = Vec::new();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            tris.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    let p = pos.clone();
    let mesh = TriMesh::with_length_fn(n * n, tris, |a, b| {
        ((p[a][0] - p[b][0]).powi(2) + (p[a][1] - p[b][1]).powi(2)).sqrt()
    })
    .unwrap();
    (mesh, pos)
}

fn octahedron() -> TriMesh {
    // 0:+x 1:+y 2:−x 3:−y 4:+z 5:−z
    let tris = vec![
        [0, 1, 4],
        [1, 2, 4],
        [2, 3, 4],
        [3, 0, 4],
        [1, 0, 5],
        [2, 1, 5],
        [3, 2, 5],
        [0, 3, 5],
    ];
    TriMesh::with_length_fn(6, tris, |_, _| 1.0).unwrap()
}

/// Plain Dijkstra over mesh edges, kept independent of the library's graph code.
fn reference_dijkstra(mesh: &TriMesh, source: usize) -> Vec<f64> {
    let n = mesh.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for (e, &l) in mesh.edges().iter().zip(mesh.edge_lengths()) {
        adj[e[0]].push((e[1], l));
        adj[e[1]].push((e[0], l));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !done[v])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .unwrap();
        done[u] = true;
        for &(v, l) in &adj[u] {
            dist[v] = dist[v].min(dist[u] + l);
        }
    }
    dist
}

/// `V − E + F` of the sublevel set `{d ≤ r}` with `d` linear on triangles,
/// counted directly from the clipped cells.
fn clipped_euler(mesh: &TriMesh, d: &[f64], r: f64) -> i64 {
    let inside = |v: usize| d[v] < r;
    let crosses = |e: [usize; 2]| inside(e[0]) != inside(e[1]);
    let mut v = (0..mesh.vertex_count()).filter(|&x| inside(x)).count() as i64;
    let mut e = 0i64;
    for &ed in mesh.edges() {
        if inside(ed[0]) && inside(ed[1]) {
            e += 1;
        } else if crosses(ed) {
            v += 1;
            e += 1;
        }
    }
    let mut f = 0i64;
    for t in mesh.triangles() {
        let k = t.iter().filter(|&&x| inside(x)).count();
        if k > 0 {
            f += 1;
        }
        if k == 1 || k == 2 {
            e += 1;
        }
    }
    v - e + f
}

#[test]
fn distance_examples() {
    let (mesh, pos) = flat_grid(21);
    let field = distance_field(&mesh, 0).unwrap();
    assert_eq!(field.dist[0], 0.0);
    let graph = edge_distance_field(&mesh, 0).unwrap();
    let oracle = reference_dijkstra(&mesh, 0);
    for (a, b) in graph.dist.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }
    let far = 21 * 21 - 1;
    let euclid = 20.0 * 2f64.sqrt();
    assert!((graph.dist[far] - euclid).abs() <= 0.09 * euclid);
    // the corner that no diagonal points at is where edge paths are worst
    let corner = 20;
    assert!((graph.dist[corner] - 20.0).abs() < 1e-12);
    let worst = (0..mesh.vertex_count())
        .skip(1)
        .map(|v| graph.dist[v] / pos[v][0].hypot(pos[v][1]))
        .fold(0.0, f64::max);
    assert!(worst <= 2f64.sqrt() + 1e-12, "{worst}");
    // chords across the flat triangles recover straight lines
    let chord_worst = (1..mesh.vertex_count())
        .map(|v| field.dist[v] / pos[v][0].hypot(pos[v][1]))
        .fold(0.0, f64::max);
    assert!(chord_worst <= 1.0 + 1e-9, "{chord_worst}");

    let g = hypball::WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
    assert_eq!(g.dijkstra(&[0], None).dist[3], 3.0);
}

#[test]
fn tiny_ball_is_a_disk() {
    let (mesh, _) = flat_grid(9);
    let centre = 4 * 9 + 4;
    let field = distance_field(&mesh, centre).unwrap();
    let r = 0.25;
    let s = ball_profile_at(&mesh, &field, r);
    assert_eq!((s.chi, s.n, s.components), (1, 0, 1));
    // the one-ring polygon: perimeter between that of the inscribed hexagon and the circle
    assert!(s.ell <= 2.0 * PI * r && s.ell >= 0.8 * 2.0 * PI * r, "{}", s.ell);
}

#[test]
fn cylinder_topology_matches_clipped_count() {
    let mesh = build(&BuildSpec::FlatCylinder { circumference: 2.0, height: 10.0, h: 0.25 }).unwrap();
    let src = basepoint(&mesh);
    let field = distance_field(&mesh, src).unwrap();
    for j in 1..50 {
        let r = 0.1 * j as f64;
        let s = ball_profile_at(&mesh, &field, r);
        assert_eq!(s.chi, clipped_euler(&mesh, &field.dist, s.r_eval), "r = {r}");
        if r < 0.9 {
            assert_eq!((s.chi, s.n), (1, 0), "r = {r}");
        } else if r > 1.2 {
            assert_eq!((s.chi, s.n), (0, 1), "r = {r}");
        }
    }
}

#[test]
fn disk_profile_matches_closed_forms() {
    let mesh = build(&BuildSpec::HyperbolicDisk { radius: 3.0, h: 0.05 }).unwrap();
    let field = distance_field(&mesh, basepoint(&mesh)).unwrap();
    let radii: Vec<f64> = (1..=58).map(|j| 0.05 * j as f64).collect();
    let prof = ball_profile(&mesh, &field, &radii).unwrap();
    for s in &prof.samples {
        let l = comparison_boundary_length(1.0, s.r).unwrap();
        let a = comparison_area(1.0, s.r).unwrap();
        assert!((s.ell - l).abs() <= 0.05 * l, "ell at {}: {} vs {l}", s.r, s.ell);
        assert!((s.area - a).abs() <= 0.05 * a, "area at {}: {} vs {a}", s.r, s.area);
        assert_eq!((s.chi, s.n), (1, 0));
    }
    let p = ComparisonParams::new(1.0, 1.0, 1.0).unwrap();
    let scan = scan_topology_bound(&mesh, &field, &p, 20, 1.0).unwrap();
    assert!(scan.pass);
    assert_eq!(scan.n_r_prime, 0);
    assert!(scan.bound.abs() < 0.2, "{}", scan.bound);
}

#[test]
fn pants_tree_topology_bound() {
    let mesh = build(&BuildSpec::PantsTree { depth: 3, l: 1.0, h: 0.25 }).unwrap();
    let field = distance_field(&mesh, basepoint(&mesh)).unwrap();
    let mut grew = false;
    for j in 0..6 {
        let r0 = 1.0 + 0.5 * j as f64;
        let p = ComparisonParams::new(1.0, 1.0, r0).unwrap();
        let scan = scan_topology_bound(&mesh, &field, &p, 20, 1.0).unwrap();
        assert!(scan.pass, "r0 = {r0}: {} vs {}", scan.n_r_prime, scan.bound);
        grew |= scan.n_r_prime >= 1;
        // crude bound with the boundary length dropped
        let crude = hypball::topology_bound(&p, 0.0).unwrap();
        assert!(scan.n_r_prime as f64 <= crude);
    }
    assert!(grew);
}

#[test]
fn gauss_bonnet_examples() {
    let oct = octahedron();
    let all: Vec<usize> = (0..oct.triangle_count()).collect();
    let rep = discrete_gauss_bonnet(&oct, &all).unwrap();
    assert!((rep.curvature_term - 4.0 * PI).abs() < 1e-12);
    assert_eq!(rep.chi, 2);
    assert!(rep.residual.abs() < 1e-12);

    let (grid, pos) = flat_grid(6);
    let square: Vec<usize> = (0..grid.triangle_count())
        .filter(|&t| grid.triangles()[t].iter().all(|&v| (1.0..=4.0).contains(&pos[v][0]) && (1.0..=4.0).contains(&pos[v][1])))
        .collect();
    let rep = discrete_gauss_bonnet(&grid, &square).unwrap();
    assert!(rep.curvature_term.abs() < 1e-12);
    assert!((rep.turning_term - 2.0 * PI).abs() < 1e-12);
    assert_eq!(rep.chi, 1);

    let disk = build(&BuildSpec::HyperbolicDisk { radius: 3.0, h: 0.05 }).unwrap();
    let field = distance_field(&disk, basepoint(&disk)).unwrap();
    let region: Vec<usize> = (0..disk.triangle_count())
        .filter(|&t| disk.triangles()[t].iter().all(|&v| field.dist[v] <= 2.0))
        .collect();
    let rep = discrete_gauss_bonnet(&disk, &region).unwrap();
    let area: f64 = region.iter().map(|&t| disk.triangle_area(t)).sum();
    assert!(rep.residual.abs() < 1e-9);
    assert!((rep.curvature_term + area).abs() <= 0.05 * area, "{} vs {area}", rep.curvature_term);
    assert!((rep.curvature_term + comparison_area(1.0, 2.0).unwrap()).abs() <= 0.05 * comparison_area(1.0, 2.0).unwrap());
}

#[test]
fn subsurface_examples() {
    let mesh = build(&BuildSpec::FlatCylinder { circumference: 2.0, height: 4.0, h: 0.25 }).unwrap();
    let field = edge_distance_field(&mesh, 0).unwrap();
    let all: Vec<usize> = (0..mesh.vertex_count()).collect();
    for v in [1, 17, mesh.vertex_count() - 1] {
        let d = subsurface_distance(&mesh, &all, 0, v).unwrap().unwrap();
        assert!((d - field.dist[v]).abs() < 1e-12);
    }
    let src = basepoint(&mesh);
    let cut: Vec<usize> = {
        // vertices whose distance to the bottom boundary lies in a thin band
        let bottom = mesh.boundary_loops()[0].clone();
        let sp = mesh.graph().dijkstra(&bottom, None);
        (0..mesh.vertex_count()).filter(|&v| !(1.5..2.5).contains(&sp.dist[v])).collect()
    };
    let bottom = mesh.boundary_loops()[0][0];
    let top = mesh.boundary_loops()[1][0];
    assert_eq!(subsurface_distance(&mesh, &cut, bottom, top).unwrap(), None);
    assert!(subsurface_distance(&mesh, &cut, bottom, src).is_err() || src != bottom);
}

#[test]
fn trimesh_round_trip() {
    let mesh = build(&BuildSpec::Ypiece { lengths: [1.0, 1.5, 2.0], h: 0.3 }).unwrap();
    let mut buf = Vec::new();
    write_trimesh(&mesh, &mut buf).unwrap();
    let back = read_trimesh(&buf[..]).unwrap();
    assert_eq!(back.triangles(), mesh.triangles());
    assert_eq!(back.edge_lengths(), mesh.edge_lengths());
    assert_eq!(back.labels(), mesh.labels());
    assert!(read_trimesh(&b"trimesh v1\nv 3\nt 0 1 7\n"[..]).is_err());
    let labels: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    assert!(TriMesh::new(3, vec![[0, 1, 2]], vec![((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), 3.0)], labels).is_err());
}

fn surfaces() -> Vec<TriMesh> {
    [
        BuildSpec::HyperbolicDisk { radius: 2.5, h: 0.15 },
        BuildSpec::FlatCylinder { circumference: 2.0, height: 6.0, h: 0.2 },
        BuildSpec::Funnel { boundary_length: 1.0, t_max: 3.0, h: 0.15 },
        BuildSpec::Ypiece { lengths: [1.0, 1.0, 1.0], h: 0.2 },
    ]
    .iter()
    .map(|s| build(s).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distance_field_is_lipschitz(which in 0usize..4, pick in 0.0f64..1.0) {
        let meshes = surfaces();
        let mesh = &meshes[which];
        let src = (pick * mesh.vertex_count() as f64) as usize % mesh.vertex_count();
        let field = distance_field(mesh, src).unwrap();
        prop_assert!(field.lipschitz_violation(mesh) <= 1e-12);
        let graph = edge_distance_field(mesh, src).unwrap();
        prop_assert!(field.dist.iter().zip(&graph.dist).all(|(c, g)| *c <= *g + 1e-12));
    }

    #[test]
    fn gauss_bonnet_on_random_regions(which in 0usize..4, pick in 0.0f64..1.0, radius in 0.2f64..2.0) {
        let meshes = surfaces();
        let mesh = &meshes[which];
        let src = (pick * mesh.vertex_count() as f64) as usize % mesh.vertex_count();
        let sp = mesh.graph().dijkstra(&[src], None);
        let region: Vec<usize> = (0..mesh.triangle_count())
            .filter(|&t| mesh.triangles()[t].iter().all(|&v| sp.dist[v] <= radius))
            .collect();
        prop_assume!(!region.is_empty());
        if let Ok(rep) = discrete_gauss_bonnet(mesh, &region) {
            prop_assert!(rep.residual.abs() <= 1e-9);
        }
    }

    #[test]
    fn ball_profile_identities(which in 0usize..4, count in 80usize..160) {
        let meshes = surfaces();
        let mesh = &meshes[which];
        let field = distance_field(mesh, basepoint(mesh)).unwrap();
        let r_max = 0.9 * field.max_distance();
        let radii: Vec<f64> = (1..=count).map(|j| r_max * j as f64 / count as f64).collect();
        let prof = ball_profile(mesh, &field, &radii).unwrap();
        for w in prof.samples.windows(2) {
            prop_assert!(w[1].area >= w[0].area);
        }
        for s in &prof.samples {
            prop_assert!(s.n >= 0);
            if s.bounded && s.components == 1 {
                prop_assert_eq!(s.n, 1 - s.chi);
            }
        }
        // a' = ℓ in integrated form. Within a mesh scale of a topology change
        // the level set runs through cut-locus triangles where the linear
        // distance has slope below one, so those radii are skipped.
        let h = mesh.max_edge_length();
        let events: Vec<f64> = prof
            .samples
            .windows(2)
            .filter(|p| p[0].chi != p[1].chi)
            .map(|p| 0.5 * (p[0].r + p[1].r))
            .collect();
        for w in prof.samples.windows(5) {
            let near_event = events.iter().any(|&e| e >= w[0].r - h && e <= w[4].r + h);
            if !near_event && w[0].r >= 2.0 * h {
                let gained = w[4].area - w[0].area;
                let swept: f64 = w.windows(2).map(|p| 0.5 * (p[0].ell + p[1].ell) * (p[1].r - p[0].r)).sum();
                prop_assert!((gained - swept).abs() <= 0.1 * swept, "{} vs {} at {}", gained, swept, w[2].r);
            }
        }
    }
}
