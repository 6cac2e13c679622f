use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::graph::WeightedGraph;

/// Above this size the triangle inequality is checked on random triples only.
const FULL_VALIDATION_LIMIT: usize = 500;
const SAMPLED_TRIPLES: usize = 2_000_000;

/// Dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetric {
    /// Validates symmetry, zero diagonal, non-negativity and the triangle
    /// inequality (up to a relative rounding slack of `1e−12`).
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return param(format!("expected {} entries, got {}", n * n, d.len()));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return param(format!("d({i},{i}) = {} is not zero", d[i * n + i]));
            }
            for j in 0..i {
                let (a, b) = (d[i * n + j], d[j * n + i]);
                if a != b {
                    return param(format!("d({i},{j}) = {a} but d({j},{i}) = {b}"));
                }
                if !(a.is_finite() && a >= 0.0) {
                    return param(format!("d({i},{j}) = {a} is not a finite non-negative number"));
                }
            }
        }
        let m = Self { n, d };
        m.check_triangles()?;
        Ok(m)
    }

    fn check_triangles(&self) -> Result<()> {
        let n = self.n;
        let bad = |x: usize, y: usize, z: usize| {
            let lhs = self.get(x, z);
            let rhs = self.get(x, y) + self.get(y, z);
            lhs > rhs + 1e-12 * rhs.max(1.0)
        };
        let found = if n <= FULL_VALIDATION_LIMIT {
            (0..n).into_par_iter().find_map_first(|x| {
                for y in 0..n {
                    for z in 0..n {
                        if bad(x, y, z) {
                            return Some((x, y, z));
                        }
                    }
                }
                None
            })
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..SAMPLED_TRIPLES)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)))
                .find(|&(x, y, z)| bad(x, y, z))
        };
        match found {
            Some((x, y, z)) => param(format!("triangle inequality fails for ({x}, {y}, {z})")),
            None => Ok(()),
        }
    }

    /// Builds a metric from a symmetric function of index pairs.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { f(i.min(j), i.max(j)) }).collect())
            .collect();
        Self::new(n, rows.concat())
    }

    /// Shortest-path metric of a connected graph restricted to `points`
    /// (all vertices when `None`).
    pub fn from_graph(g: &WeightedGraph, points: Option<&[usize]>) -> Result<Self> {
        Self::from_subgraph(g, points, None)
    }

    /// As [`from_graph`](Self::from_graph) with paths confined to vertices
    /// where `allowed` is true (the intrinsic metric of an induced subgraph).
    pub fn from_subgraph(
        g: &WeightedGraph,
        points: Option<&[usize]>,
        allowed: Option<&[bool]>,
    ) -> Result<Self> {
        let all: Vec<usize>;
        let pts = match points {
            Some(p) => p,
            None => {
                all = (0..g.vertex_count()).collect();
                &all
            }
        };
        let rows: Vec<Vec<f64>> = pts
            .par_iter()
            .map(|&s| {
                let sp = g.dijkstra(&[s], allowed);
                pts.iter().map(|&t| sp.dist[t]).collect()
            })
            .collect();
        let n = pts.len();
        let mut d = rows.concat();
        // Dijkstra sums can differ in the last bit between directions
        for i in 0..n {
            for j in 0..i {
                let v = d[i * n + j].min(d[j * n + i]);
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "points {} and {} are not connected",
                        pts[i], pts[j]
                    )));
                }
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self::new(n, d)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Same points with every distance multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.n, self.d.iter().map(|x| x * s).collect())
    }

    /// Lower-triangular CSV: line `i` holds `d(i,0), …, d(i,i)`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n {
            let row: Vec<String> = (0..=i).map(|j| format!("{}", self.get(i, j))).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        msg: format!("invalid number `{}`", t.trim()),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != rows.len() + 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {} entries, found {}", rows.len() + 1, row.len()),
                });
            }
            rows.push(row);
        }
        let n = rows.len();
        let mut d = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self::new(n, d)
    }
}

/// `(x|y)_w = ½ (d(x,w) + d(y,w) − d(x,y))`.
pub fn gromov_product(m: &FiniteMetric, x: usize, y: usize, w: usize) -> Result<f64> {
    if let Some(&i) = [x, y, w].iter().find(|&&i| i >= m.len()) {
        return param(format!("index {i} out of range for {} points", m.len()));
    }
    Ok(0.5 * (m.get(x, w) + m.get(y, w) - m.get(x, y)))
}

/// Random tree on `n` vertices: vertex `i > 0` hangs from a uniform earlier
/// vertex with a uniform length in `[min_len, max_len]`. Lengths are rounded
/// to multiples of `2^-20`, so path sums of the tree are exact in `f64`.
pub fn random_tree(n: usize, min_len: f64, max_len: f64, seed: u64) -> Result<WeightedGraph> {
    if !(min_len > 0.0 && max_len >= min_len && max_len.is_finite()) {
        return param(format!("invalid length range [{min_len}, {max_len}]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quantum = (2.0f64).powi(-20);
    let lo = (min_len / quantum).ceil() * quantum;
    let hi = (max_len / quantum).floor() * quantum;
    let edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|i| {
            let parent = rng.random_range(0..i);
            let len = (rng.random_range(min_len..=max_len) / quantum).round() * quantum;
            (parent, i, len.clamp(lo, hi))
        })
        .collect();
    WeightedGraph::from_edges(n, &edges)
}

/// `count` distinct indices below `n` in increasing order (all of them when
/// `n ≤ count`), drawn from a generator seeded with `seed`.
pub fn sample_points(n: usize, count: usize, seed: u64) -> Vec<usize> {
    if n <= count {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = rand::seq::index::sample(&mut rng, n, count).into_vec();
    v.sort_unstable();
    v
}
