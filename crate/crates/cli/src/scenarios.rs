use std::collections::BTreeMap;
use std::path::PathBuf;

use hypball::{
    basepoint, build, check_fundamental_inequality, check_length_ratio_punctured, check_minlen_bound,
    check_rips, comparison_area, comparison_boundary_length, delta_four_point, delta_thin,
    distance_field, estimate_d_star, quadruple_delta, quasihyperbolic_distances, random_polylines,
    random_tree, sample_points, scan_topology_bound, uniformly_perfect_constant, validate_tree_decomposition,
    validate_uniform_separation, write_trimesh, BuildSpec, ComparisonParams, Complex64,
    DecompositionSpec, DeltaMode, FiniteMetric, Outer, PlaneDomain, PlaneHole, SeparationSpec, TriMesh,
    WeightedGraph,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{get, number_groups, require, Config};

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub struct Context {
    pub seed: u64,
    pub tol: Option<f64>,
    /// Directory that relative paths in the config are resolved against.
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<(String, Vec<u8>)>,
}

pub struct Scenario {
    pub name: &'static str,
    pub exercises: &'static str,
    pub run: fn(&Config, &Context) -> Res<Outcome>,
}

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "build",
        exercises: "surface construction",
        run: run_build,
    },
    Scenario {
        name: "ball-profile",
        exercises: "ball length and area comparison, the fundamental inequality and the topology bound for balls",
        run: run_ball_profile,
    },
    Scenario {
        name: "delta",
        exercises: "four-point hyperbolicity and the Rips condition",
        run: run_delta,
    },
    Scenario {
        name: "tree-decomp",
        exercises: "tree decompositions of hyperbolic spaces",
        run: run_tree_decomp,
    },
    Scenario {
        name: "separation",
        exercises: "uniformly separated sets",
        run: run_separation,
    },
    Scenario {
        name: "dstar",
        exercises: "handle distance across removed neighbourhoods",
        run: run_dstar,
    },
    Scenario {
        name: "s-vs-sstar",
        exercises: "hyperbolicity of a surface and of the surface with sets removed",
        run: run_s_vs_sstar,
    },
    Scenario {
        name: "domain",
        exercises: "plane domains: uniform perfectness, quasihyperbolic length bound and density ratios",
        run: run_domain,
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

fn surface(cfg: &Config) -> Res<(BuildSpec, TriMesh)> {
    let spec = BuildSpec::from_pairs(cfg.block("surface")?).map_err(err)?;
    let mesh = build(&spec).map_err(err)?;
    Ok((spec, mesh))
}

fn mesh_summary(mesh: &TriMesh) -> Value {
    let labels: BTreeMap<&String, usize> = mesh.labels().iter().map(|(k, v)| (k, v.len())).collect();
    json!({
        "vertices": mesh.vertex_count(),
        "triangles": mesh.triangle_count(),
        "edges": mesh.edge_count(),
        "euler_characteristic": mesh.euler_characteristic(),
        "boundary_loops": mesh.boundary_loops().len(),
        "max_edge_length": mesh.max_edge_length(),
        "total_area": mesh.total_area(),
        "labels": labels,
    })
}

fn genus(mesh: &TriMesh) -> i64 {
    (2 - mesh.euler_characteristic() - mesh.boundary_loops().len() as i64) / 2
}

fn run_build(cfg: &Config, _: &Context) -> Res<Outcome> {
    let (spec, mesh) = surface(cfg)?;
    let mut bytes = Vec::new();
    write_trimesh(&mesh, &mut bytes).map_err(err)?;
    let h = spec.resolution();
    let max_edge = mesh.max_edge_length();
    Ok(Outcome {
        report: json!({ "surface": spec, "mesh": mesh_summary(&mesh) }),
        checks: vec![Check::new(
            "resolution",
            max_edge <= h * (1.0 + 1e-9),
            format!("max edge {max_edge} with h = {h}"),
        )],
        artifacts: vec![("mesh.trimesh".into(), bytes)],
    })
}

fn run_ball_profile(cfg: &Config, ctx: &Context) -> Res<Outcome> {
    let (spec, mesh) = surface(cfg)?;
    let p = cfg.optional("profile");
    let name = "profile";
    let source = match p.and_then(|b| b.get("source")) {
        Some(label) => *mesh
            .label(label)
            .and_then(|l| l.first())
            .ok_or_else(|| format!("unknown source label `{label}`"))?,
        None => basepoint(&mesh),
    };
    let field = distance_field(&mesh, source).map_err(err)?;
    let max = field.max_distance();
    let count: usize = get(p, name, "count", 60)?;
    let r_max: f64 = get(p, name, "r_max", 0.8 * max)?;
    let k: f64 = get(p, name, "k", 1.0)?;
    let tol = match ctx.tol {
        Some(t) => t,
        None => get(p, name, "tol", 0.05)?,
    };
    let factor: f64 = get(p, name, "fundamental_factor", 5.0)?;
    if count < 3 || !(r_max > 0.0 && r_max <= max) {
        return Err(format!("need count ≥ 3 and 0 < r_max ≤ {max}"));
    }
    let radii: Vec<f64> = (1..=count).map(|j| r_max * j as f64 / count as f64).collect();
    let profile = hypball::ball_profile(&mesh, &field, &radii).map_err(err)?;
    let mut csv = Vec::new();
    profile.write_csv(&mut csv).map_err(err)?;

    let mut checks = Vec::new();
    let worst = |f: &dyn Fn(&hypball::BallSample) -> Res<(f64, f64)>| -> Res<(f64, f64)> {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for s in &profile.samples {
            let (measured, bound) = f(s)?;
            let ratio = measured / bound;
            if ratio > best.0 {
                best = (ratio, s.r);
            }
        }
        Ok(best)
    };
    let (len_ratio, len_r) = worst(&|s| Ok((s.ell, comparison_boundary_length(k, s.r).map_err(err)?)))?;
    let (area_ratio, area_r) = worst(&|s| Ok((s.area, comparison_area(k, s.r).map_err(err)?)))?;
    checks.push(Check::new(
        "ball-length",
        len_ratio <= 1.0 + tol,
        format!("max ell/bound = {len_ratio} at r = {len_r}"),
    ));
    checks.push(Check::new(
        "ball-area",
        area_ratio <= 1.0 + tol,
        format!("max area/bound = {area_ratio} at r = {area_r}"),
    ));

    let sde = profile.second_difference_error();
    let fundamental = check_fundamental_inequality(
        &profile.area_profile().map_err(err)?,
        &profile.euler_profile().map_err(err)?,
        k,
        factor * sde,
    )
    .map_err(err)?;
    checks.push(Check::new(
        "fundamental",
        fundamental.pass,
        format!("max violation {} with tol {}", fundamental.max_violation, fundamental.tol),
    ));

    let c: f64 = get(p, name, "c", 1.0)?;
    let r0: f64 = get(p, name, "r0", 1.0)?;
    let params = ComparisonParams::new(k, c, r0).map_err(err)?;
    let top = if params.outer_radius() <= max {
        let scan = scan_topology_bound(&mesh, &field, &params, 20, 1.0).map_err(err)?;
        checks.push(Check::new(
            "top-estimate",
            scan.pass,
            format!("n(r') = {} with bound {}", scan.n_r_prime, scan.bound),
        ));
        serde_json::to_value(&scan).map_err(err)?
    } else {
        Value::Null
    };

    Ok(Outcome {
        report: json!({
            "surface": spec,
            "mesh": mesh_summary(&mesh),
            "source": source,
            "max_distance": max,
            "radii": count,
            "k": k,
            "tol": tol,
            "ball_length": { "max_ratio": len_ratio, "at": len_r },
            "ball_area": { "max_ratio": area_ratio, "at": area_r },
            "second_difference_error": sde,
            "fundamental": fundamental,
            "top_estimate": top,
        }),
        checks,
        artifacts: vec![("profile.csv".into(), csv)],
    })
}

fn run_delta(cfg: &Config, ctx: &Context) -> Res<Outcome> {
    let b = cfg.block("metric")?;
    let name = "metric";
    let source: String = require(b, name, "source")?;
    let mut graph: Option<WeightedGraph> = None;
    let mut artifacts = Vec::new();
    let metric = match source.as_str() {
        "file" => {
            let path: String = require(b, name, "path")?;
            let file = std::fs::File::open(ctx.base_dir.join(&path)).map_err(|e| format!("{path}: {e}"))?;
            FiniteMetric::read_csv(std::io::BufReader::new(file)).map_err(err)?
        }
        "random_tree" => {
            let n: usize = get(Some(b), name, "nodes", 200)?;
            let lo: f64 = get(Some(b), name, "min_length", 0.1)?;
            let hi: f64 = get(Some(b), name, "max_length", 10.0)?;
            let g = random_tree(n, lo, hi, ctx.seed).map_err(err)?;
            let m = FiniteMetric::from_graph(&g, None).map_err(err)?;
            graph = Some(g);
            m
        }
        "cycle" => {
            let n: usize = get(Some(b), name, "n", 4)?;
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let g = WeightedGraph::unweighted(n, &edges).map_err(err)?;
            let m = FiniteMetric::from_graph(&g, None).map_err(err)?;
            graph = Some(g);
            m
        }
        "surface" => {
            let (_, mesh) = surface(cfg)?;
            let points: usize = get(Some(b), name, "points", 150)?;
            let pts = sample_points(mesh.vertex_count(), points, ctx.seed);
            FiniteMetric::from_graph(mesh.graph(), Some(&pts)).map_err(err)?
        }
        other => return Err(format!("unknown metric source `{other}`")),
    };
    if source != "file" {
        let mut csv = Vec::new();
        metric.write_csv(&mut csv).map_err(err)?;
        artifacts.push(("metric.csv".to_string(), csv));
    }
    let mode = match get(Some(b), name, "mode", "auto".to_string())?.as_str() {
        "auto" => DeltaMode::Auto,
        "exact" => DeltaMode::Exact,
        "sampled" => DeltaMode::Sampled,
        other => return Err(format!("unknown mode `{other}`")),
    };
    let budget: u64 = get(Some(b), name, "budget", hypball::gromov::DEFAULT_BUDGET)?;
    let report = delta_four_point(&metric, mode, budget, ctx.seed).map_err(err)?;
    let diam = metric.diameter();
    let mut checks = vec![
        Check::new("nonnegative", report.delta >= 0.0, format!("delta = {}", report.delta)),
        Check::new("within-diameter", report.delta <= diam, format!("diameter = {diam}")),
    ];
    if let Some(w) = report.witness {
        let again = quadruple_delta(&metric, w);
        checks.push(Check::new(
            "witness-reproduces",
            again.to_bits() == report.delta.to_bits(),
            format!("{w:?} gives {again}"),
        ));
    }
    if source == "random_tree" {
        checks.push(Check::new("tree-zero", report.delta == 0.0, format!("delta = {}", report.delta)));
    }
    let mut thin = Value::Null;
    if let Some(g) = graph.filter(|g| g.vertex_count() <= 64) {
        let t = delta_thin(&g).map_err(err)?;
        let rips = check_rips(report.delta, t.delta_thin);
        checks.push(Check::new(
            "rips",
            rips.pass,
            format!("thin {} vs four-point {}", t.delta_thin, report.delta),
        ));
        thin = json!({ "thin": t, "rips": rips });
    }
    let mut delta_json = serde_json::to_vec_pretty(&report).map_err(err)?;
    delta_json.push(b'\n');
    artifacts.push(("four_point.json".to_string(), delta_json));
    Ok(Outcome {
        report: json!({ "points": metric.len(), "diameter": diam, "delta": report, "thin": thin }),
        checks,
        artifacts,
    })
}

fn run_tree_decomp(cfg: &Config, ctx: &Context) -> Res<Outcome> {
    let (spec, mesh) = surface(cfg)?;
    let b = cfg.block("decomposition")?;
    let name = "decomposition";
    let prefix: String = get(Some(b), name, "piece_prefix", "piece".to_string())?;
    let k_claimed: f64 = require(b, name, "k_claimed")?;
    let pieces = labelled_sets(&mesh, &prefix);
    if pieces.is_empty() {
        return Err(format!("surface has no labels starting with `{prefix}`"));
    }
    let rep = validate_tree_decomposition(&DecompositionSpec { pieces, k_claimed }, mesh.graph(), ctx.seed)
        .map_err(err)?;
    Ok(Outcome {
        checks: vec![Check::new("decomposition", rep.valid, rep.reasons.join("; "))],
        report: json!({ "surface": spec, "mesh": mesh_summary(&mesh), "decomposition": rep }),
        artifacts: Vec::new(),
    })
}

/// Labels `prefix0`, `prefix1`, ... in numeric order.
fn labelled_sets(mesh: &TriMesh, prefix: &str) -> Vec<Vec<usize>> {
    let mut found: Vec<(usize, Vec<usize>)> = mesh
        .labels()
        .iter()
        .filter_map(|(k, v)| Some((k.strip_prefix(prefix)?.parse().ok()?, v.clone())))
        .collect();
    found.sort();
    found.into_iter().map(|(_, v)| v).collect()
}

struct Sets {
    e: Vec<Vec<usize>>,
    v: Vec<Vec<usize>>,
    r: f64,
    s: f64,
    n_max: usize,
}

fn separation_sets(cfg: &Config, mesh: &TriMesh) -> Res<Sets> {
    let b = cfg.block("separation")?;
    let name = "separation";
    let prefix: String = get(Some(b), name, "prefix", "hole".to_string())?;
    let e_radius: f64 = get(Some(b), name, "e_radius", 0.0)?;
    let v_radius: f64 = require(b, name, "v_radius")?;
    let seeds = labelled_sets(mesh, &prefix);
    if seeds.is_empty() {
        return Err(format!("surface has no labels starting with `{prefix}`"));
    }
    let ball = |set: &[usize], r: f64| -> Vec<usize> {
        let sp = mesh.graph().dijkstra(set, None);
        (0..mesh.vertex_count()).filter(|&v| sp.dist[v] <= r).collect()
    };
    let e: Vec<Vec<usize>> = seeds.iter().map(|s| ball(s, e_radius)).collect();
    let v: Vec<Vec<usize>> = e.iter().map(|s| ball(s, v_radius)).collect();
    Ok(Sets {
        e,
        v,
        r: require(b, name, "r")?,
        s: require(b, name, "s")?,
        n_max: require(b, name, "n_max")?,
    })
}

fn spec_of<'a>(mesh: &'a TriMesh, sets: &Sets) -> SeparationSpec<'a> {
    SeparationSpec {
        host: mesh,
        e_sets: sets.e.clone(),
        v_sets: sets.v.clone(),
        r: sets.r,
        s: sets.s,
        n_max: sets.n_max,
    }
}

fn run_separation(cfg: &Config, _: &Context) -> Res<Outcome> {
    let (spec, mesh) = surface(cfg)?;
    let sets = separation_sets(cfg, &mesh)?;
    let rep = validate_uniform_separation(&spec_of(&mesh, &sets)).map_err(err)?;
    Ok(Outcome {
        checks: vec![Check::new(
            "uniform-separation",
            rep.pass,
            format!(
                "measured r = {:?}, s = {}, N = {}",
                rep.r_measured, rep.s_measured, rep.n_measured
            ),
        )],
        report: json!({ "surface": spec, "mesh": mesh_summary(&mesh), "separation": rep }),
        artifacts: Vec::new(),
    })
}

fn dstar_checks(mesh: &TriMesh, rep: &hypball::DStarReport) -> Vec<Check> {
    if genus(mesh) == 0 {
        vec![Check::new(
            "genus-zero-empty",
            rep.d_star == 0.0 && !rep.infinite && rep.qualifying_pairs == 0,
            format!("{} qualifying pairs", rep.qualifying_pairs),
        )]
    } else {
        Vec::new()
    }
}

fn run_dstar(cfg: &Config, _: &Context) -> Res<Outcome> {
    let (spec, mesh) = surface(cfg)?;
    let sets = separation_sets(cfg, &mesh)?;
    let rep = estimate_d_star(&spec_of(&mesh, &sets)).map_err(err)?;
    Ok(Outcome {
        checks: dstar_checks(&mesh, &rep),
        report: json!({ "surface": spec, "mesh": mesh_summary(&mesh), "genus": genus(&mesh), "d_star": rep }),
        artifacts: Vec::new(),
    })
}

fn run_s_vs_sstar(cfg: &Config, ctx: &Context) -> Res<Outcome> {
    let (spec, _) = surface(cfg)?;
    let BuildSpec::DiskMinusDisks { radius, holes, h, .. } = &spec else {
        return Err("s-vs-sstar needs a disk_minus_disks surface".into());
    };
    let with = |remove| BuildSpec::DiskMinusDisks {
        radius: *radius,
        holes: holes.clone(),
        remove,
        h: *h,
    };
    let full = build(&with(false)).map_err(err)?;
    let cut = build(&with(true)).map_err(err)?;
    let points: usize = get(cfg.optional("delta"), "delta", "points", 150)?;
    let delta_of = |m: &TriMesh| -> Res<hypball::DeltaReport> {
        let pts = sample_points(m.vertex_count(), points, ctx.seed);
        let metric = FiniteMetric::from_graph(m.graph(), Some(&pts)).map_err(err)?;
        delta_four_point(&metric, DeltaMode::Auto, hypball::gromov::DEFAULT_BUDGET, ctx.seed).map_err(err)
    };
    let (ds, dcut) = (delta_of(&full)?, delta_of(&cut)?);
    let sets = separation_sets(cfg, &full)?;
    let sep = validate_uniform_separation(&spec_of(&full, &sets)).map_err(err)?;
    let dstar = estimate_d_star(&spec_of(&full, &sets)).map_err(err)?;
    let mut checks = vec![Check::new(
        "uniform-separation",
        sep.pass,
        format!("measured r = {:?}, s = {}", sep.r_measured, sep.s_measured),
    )];
    checks.extend(dstar_checks(&full, &dstar));
    Ok(Outcome {
        report: json!({
            "surface": spec,
            "s": { "mesh": mesh_summary(&full), "delta": ds },
            "s_star": { "mesh": mesh_summary(&cut), "delta": dcut },
            "separation": sep,
            "d_star": dstar,
        }),
        checks,
        artifacts: Vec::new(),
    })
}

fn plane_domain(cfg: &Config) -> Res<PlaneDomain> {
    let b = cfg.block("domain")?;
    let name = "domain";
    let outer = match get(Some(b), name, "outer", "disk".to_string())?.as_str() {
        "disk" => Outer::UnitDisk,
        "plane" => Outer::Plane,
        other => return Err(format!("unknown outer boundary `{other}`")),
    };
    let mut holes = Vec::new();
    for g in number_groups(b.get("holes").map_or("", |s| s))? {
        let [x, y, r] = g[..] else {
            return Err("each hole needs x, y and radius".into());
        };
        let center = Complex64::new(x, y);
        holes.push(if r == 0.0 {
            PlaneHole::Point(center)
        } else {
            PlaneHole::Disk { center, radius: r }
        });
    }
    let grid: usize = get(Some(b), name, "grid", 256)?;
    PlaneDomain::new(outer, holes, grid).map_err(err)
}

fn run_domain(cfg: &Config, ctx: &Context) -> Res<Outcome> {
    let domain = plane_domain(cfg)?;
    let c = cfg.optional("checks");
    let name = "checks";
    let mut checks = Vec::new();

    let perfect = match uniformly_perfect_constant(&domain) {
        Ok(r) => serde_json::to_value(r).map_err(err)?,
        Err(e) => json!({ "error": e.to_string() }),
    };

    let pairs: Vec<(Complex64, Complex64)> = number_groups(c.and_then(|b| b.get("pairs")).map_or("", |s| s))?
        .into_iter()
        .map(|g| match g[..] {
            [a, b, x, y] => Ok((Complex64::new(a, b), Complex64::new(x, y))),
            _ => Err("each pair needs four coordinates".to_string()),
        })
        .collect::<Res<_>>()?;
    let distances = quasihyperbolic_distances(&domain, &pairs).map_err(err)?;
    let qh: Vec<Value> = pairs
        .iter()
        .zip(&distances)
        .map(|(p, d)| json!({ "from": [p.0.re, p.0.im], "to": [p.1.re, p.1.im], "distance": d }))
        .collect();

    let count: usize = get(c, name, "polylines", 100)?;
    let segments: usize = get(c, name, "segments", 5)?;
    let step: f64 = get(c, name, "step", 0.3)?;
    let lines = random_polylines(&domain, count, segments, step, ctx.seed).map_err(err)?;
    let mut failures = 0;
    let mut min_margin = f64::INFINITY;
    for line in &lines {
        let r = check_minlen_bound(&domain, line).map_err(err)?;
        failures += usize::from(!r.pass);
        min_margin = min_margin.min(r.quasihyperbolic_length - r.bound);
    }
    checks.push(Check::new(
        "minlen-bound",
        failures == 0,
        format!("{failures} of {count} polylines fail; smallest margin {min_margin}"),
    ));

    let rhos = number_groups(c.and_then(|b| b.get("rho")).map_or("0.1 0.5 0.99", |s| s))?.concat();
    let ratios = rhos
        .iter()
        .map(|&r| check_length_ratio_punctured(r).map_err(err))
        .collect::<Res<Vec<_>>>()?;
    checks.push(Check::new(
        "length-ratio",
        ratios.iter().all(|r| r.pass),
        format!("{} radii", ratios.len()),
    ));

    Ok(Outcome {
        report: json!({
            "outer": domain.outer(),
            "holes": domain.holes().len(),
            "grid": domain.grid(),
            "uniformly_perfect": perfect,
            "quasihyperbolic": qh,
            "minlen": { "polylines": count, "failures": failures, "min_margin": min_margin },
            "length_ratio": ratios,
        }),
        checks,
        artifacts: Vec::new(),
    })
}

/// Small configurations, one per scenario, run by `verify-all`.
pub const BUILTIN: &[(&str, &str)] = &[
    ("build", "[surface]\nkind = ypiece\nlengths = 1 1 1\nh = 0.3\n"),
    (
        "ball-profile",
        "[surface]\nkind = hyperbolic_disk\nradius = 2.5\nh = 0.1\n\n[profile]\ncount = 40\nr_max = 2\n",
    ),
    ("delta", "[metric]\nsource = random_tree\nnodes = 60\n"),
    (
        "tree-decomp",
        "[surface]\nkind = pants_tree\ndepth = 1\nl = 1\nh = 0.3\n\n[decomposition]\nk_claimed = 1.5\n",
    ),
    (
        "separation",
        "[surface]\nkind = disk_minus_disks\nradius = 3\nholes = 1.5 0 0.3; 1.5 3.14159 0.3\nremove = false\nh = 0.15\n\n[separation]\nv_radius = 0.5\nr = 0.3\ns = 10\nn_max = 1\n",
    ),
    (
        "dstar",
        "[surface]\nkind = disk_minus_disks\nradius = 3\nholes = 1.5 0 0.3; 1.5 3.14159 0.3\nremove = false\nh = 0.15\n\n[separation]\nv_radius = 0.5\nr = 0.3\ns = 10\nn_max = 1\n",
    ),
    (
        "s-vs-sstar",
        "[surface]\nkind = disk_minus_disks\nradius = 2.5\nholes = 1.2 0 0.3; 1.2 3.14159 0.3\nremove = true\nh = 0.15\n\n[separation]\nv_radius = 0.4\nr = 0.2\ns = 10\nn_max = 1\n\n[delta]\npoints = 80\n",
    ),
    (
        "domain",
        "[domain]\nouter = disk\nholes = 0.5 0 0.1; -0.4 0.3 0.05; 0 -0.5 0\ngrid = 64\n\n[checks]\npairs = 0 0 0.2 0.6\npolylines = 200\n",
    ),
];
