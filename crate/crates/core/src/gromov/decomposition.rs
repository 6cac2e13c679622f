use serde::Serialize;

use super::{delta_four_point, sample_points, DeltaMode, FiniteMetric};
use crate::error::{param, Result};
use crate::graph::WeightedGraph;

/// Points drawn from each piece (and the host) for the four-point estimate.
pub const DELTA_SUBSAMPLE: usize = 120;

/// Candidate tree decomposition of a graph metric into vertex subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSpec {
    pub pieces: Vec<Vec<usize>>,
    pub k_claimed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub valid: bool,
    pub k_measured: f64,
    pub k_claimed: f64,
    /// Piece attaining `k_measured`.
    pub worst_piece: Option<usize>,
    /// `None` for pieces that are empty or disconnected.
    pub delta_pieces: Vec<Option<f64>>,
    pub delta_host: f64,
    /// Pairs `(n, m)` of pieces with nonempty intersection.
    pub adjacent: Vec<(usize, usize)>,
    pub reasons: Vec<String>,
}

fn mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Largest intrinsic distance inside `piece` between two vertices of `set`.
fn diameter_within(g: &WeightedGraph, piece: &[bool], set: &[usize]) -> f64 {
    let mut diam: f64 = 0.0;
    for (i, &s) in set.iter().enumerate() {
        let sp = g.dijkstra(&[s], Some(piece));
        for &t in &set[i + 1..] {
            diam = diam.max(sp.dist[t]);
        }
    }
    diam
}

fn sampled_delta(g: &WeightedGraph, points: &[usize], allowed: Option<&[bool]>, seed: u64) -> Result<f64> {
    let mut pts: Vec<usize> = sample_points(points.len(), DELTA_SUBSAMPLE, seed)
        .into_iter()
        .map(|i| points[i])
        .collect();
    pts.sort_unstable();
    let m = FiniteMetric::from_subgraph(g, Some(&pts), allowed)?;
    Ok(delta_four_point(&m, DeltaMode::Exact, 0, seed)?.delta)
}

/// Checks the separation conditions of a tree decomposition and measures
/// `k = max_n Σ_m diam_{X_n}(X_n ∩ X_m)` with distances intrinsic to each piece.
/// Four-point δ of every piece and of the host is estimated on subsamples of
/// at most [`DELTA_SUBSAMPLE`] points.
pub fn validate_tree_decomposition(
    spec: &DecompositionSpec,
    host: &WeightedGraph,
    seed: u64,
) -> Result<DecompositionReport> {
    let n = host.vertex_count();
    if spec.pieces.iter().flatten().any(|&v| v >= n) {
        return param("piece vertex out of range");
    }
    if !(spec.k_claimed >= 0.0) {
        return param(format!("k_claimed must be non-negative, got {}", spec.k_claimed));
    }
    let mut reasons = Vec::new();
    let masks: Vec<Vec<bool>> = spec.pieces.iter().map(|p| mask(n, p)).collect();
    let mut covered = vec![false; n];
    let mut connected = vec![false; spec.pieces.len()];
    for (i, p) in spec.pieces.iter().enumerate() {
        if p.is_empty() {
            reasons.push(format!("piece {i} is empty"));
            continue;
        }
        for &v in p {
            covered[v] = true;
        }
        let (label, _) = host.components(Some(&masks[i]));
        connected[i] = p.iter().all(|&v| label[v] == label[p[0]]);
        if !connected[i] {
            reasons.push(format!("piece {i} is not connected"));
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        reasons.push(format!("vertex {v} is in no piece"));
    }

    let mut adjacent = Vec::new();
    let mut k_sum = vec![0.0; spec.pieces.len()];
    for a in 0..spec.pieces.len() {
        for b in a + 1..spec.pieces.len() {
            let eta: Vec<usize> = spec.pieces[a].iter().copied().filter(|&v| masks[b][v]).collect();
            if eta.is_empty() {
                continue;
            }
            adjacent.push((a, b));
            let mut rest: Vec<bool> = vec![true; n];
            for &v in &eta {
                rest[v] = false;
            }
            let (label, _) = host.components(Some(&rest));
            let side = |p: usize| -> Vec<usize> {
                let mut s: Vec<usize> = spec.pieces[p].iter().filter_map(|&v| label[v]).collect();
                s.sort_unstable();
                s.dedup();
                s
            };
            let (sa, sb) = (side(a), side(b));
            if sa.is_empty() || sb.is_empty() {
                reasons.push(format!("pieces {a} and {b}: one lies inside their intersection"));
            } else if sa.iter().any(|c| sb.binary_search(c).is_ok()) {
                reasons.push(format!("removing the intersection of pieces {a} and {b} does not separate them"));
            }
            if connected[a] && connected[b] {
                k_sum[a] += diameter_within(host, &masks[a], &eta);
                k_sum[b] += diameter_within(host, &masks[b], &eta);
            }
        }
    }
    let (worst_piece, k_measured) = k_sum
        .iter()
        .copied()
        .enumerate()
        .fold((None, 0.0), |acc, (i, k)| if k > acc.1 { (Some(i), k) } else { acc });
    if k_measured > spec.k_claimed {
        reasons.push(format!("k_measured {k_measured} exceeds k_claimed {}", spec.k_claimed));
    }

    let delta_pieces = spec
        .pieces
        .iter()
        .zip(&masks)
        .zip(&connected)
        .map(|((p, m), &ok)| ok.then(|| sampled_delta(host, p, Some(m), seed)).transpose())
        .collect::<Result<Vec<Option<f64>>>>()?;
    let all: Vec<usize> = (0..n).collect();
    let delta_host = sampled_delta(host, &all, None, seed)?;

    Ok(DecompositionReport {
        valid: reasons.is_empty(),
        k_measured,
        k_claimed: spec.k_claimed,
        worst_piece,
        delta_pieces,
        delta_host,
        adjacent,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_segments() {
        let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let spec = DecompositionSpec {
            pieces: vec![vec![0, 1], vec![1, 2]],
            k_claimed: 0.0,
        };
        let r = validate_tree_decomposition(&spec, &g, 0).unwrap();
        assert!(r.valid, "{:?}", r.reasons);
        assert_eq!(r.k_measured, 0.0);
    }

    #[test]
    fn overlap_without_separation() {
        // the edges of a triangle: no shared vertex cuts the cycle
        let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let spec = DecompositionSpec {
            pieces: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            k_claimed: 10.0,
        };
        let r = validate_tree_decomposition(&spec, &g, 0).unwrap();
        assert!(!r.valid);
    }

    #[test]
    fn disconnected_piece() {
        let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let spec = DecompositionSpec {
            pieces: vec![vec![0, 2], vec![1, 2]],
            k_claimed: 1.0,
        };
        let r = validate_tree_decomposition(&spec, &g, 0).unwrap();
        assert!(r.reasons.iter().any(|s| s.contains("not connected")));
    }
}
