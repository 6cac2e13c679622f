use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ShortestPaths, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinReport {
    /// Largest distance from a side vertex to the union of the other two sides.
    pub delta_thin: f64,
    /// Triangle attaining it (`None` with fewer than three vertices).
    pub triangle: Option<[usize; 3]>,
}

fn side(trees: &[ShortestPaths], a: usize, b: usize) -> Vec<usize> {
    let (s, t) = if a < b { (a, b) } else { (b, a) };
    trees[s].path_to(t).expect("connected")
}

/// Thinness of geodesic triangles with one canonical geodesic per vertex pair:
/// the Dijkstra tree of the smaller endpoint, ties going to the smaller
/// predecessor. Only vertices are tested, so the value is a lower bound for
/// the thinness constant of the graph.
pub fn delta_thin(g: &WeightedGraph) -> Result<ThinReport> {
    let n = g.vertex_count();
    let trees: Vec<ShortestPaths> = (0..n).into_par_iter().map(|s| g.dijkstra(&[s], None)).collect();
    if let Some(t) = trees.first().and_then(|sp| sp.dist.iter().position(|d| !d.is_finite())) {
        return Err(Error::Domain(format!("graph is disconnected: vertex {t} unreachable from 0")));
    }
    let dist = |u: usize, v: usize| trees[u].dist[v];
    let gap = |a: &[usize], b: &[usize], c: &[usize]| {
        a.iter()
            .map(|&v| b.iter().chain(c).map(|&w| dist(v, w)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let best = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best = (0.0, None);
            for b in a + 1..n {
                let ab = side(&trees, a, b);
                for c in b + 1..n {
                    let ac = side(&trees, a, c);
                    let bc = side(&trees, b, c);
                    let v = gap(&ab, &ac, &bc).max(gap(&ac, &ab, &bc)).max(gap(&bc, &ab, &ac));
                    if v > best.0 || best.1.is_none() {
                        best = (v, Some([a, b, c]));
                    }
                }
            }
            best
        })
        .reduce(
            || (0.0, None),
            |x, y| match (x.1, y.1) {
                (None, _) => y,
                (_, None) => x,
                (Some(p), Some(q)) if y.0 > x.0 || (y.0 == x.0 && q < p) => y,
                _ => x,
            },
        );
    Ok(ThinReport {
        delta_thin: best.0,
        triangle: best.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RipsCheck {
    /// `delta_thin ≤ 4·delta_hyp`, the direction a lower bound can certify.
    pub pass: bool,
    /// `delta_hyp ≤ 4·delta_thin`, reported only.
    pub converse_holds: bool,
}

/// `delta_hyp` should be the four-point constant of the whole geodesic space.
/// On a weighted graph the value over vertices alone can be smaller: a
/// 6-cycle with one edge of length 3 has a tree metric on its vertices.
pub fn check_rips(delta_hyp: f64, delta_thin_lower: f64) -> RipsCheck {
    RipsCheck {
        pass: delta_thin_lower <= 4.0 * delta_hyp,
        converse_holds: delta_hyp <= 4.0 * delta_thin_lower,
    }
}
