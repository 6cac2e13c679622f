use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::FiniteMetric;
use crate::error::{param, Result};

/// Largest size enumerated exhaustively in [`DeltaMode::Auto`].
pub const EXACT_LIMIT: usize = 300;
/// Sample budget used by [`DeltaMode::Auto`] above [`EXACT_LIMIT`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    Exact,
    Sampled,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaReport {
    pub delta: f64,
    /// Sorted quadruple attaining `delta` (`None` with fewer than four points).
    pub witness: Option<[usize; 4]>,
    /// Mode actually used (never `Auto`).
    pub mode: DeltaMode,
    /// Number of quadruples evaluated.
    pub samples: u64,
}

#[inline(always)]
fn half_gap(s1: f64, s2: f64, s3: f64) -> f64 {
    let hi = s1.max(s2).max(s3);
    let mid = s1.min(s2).max(s1.max(s2).min(s3));
    0.5 * (hi - mid)
}

/// Four-point value of one quadruple: half the gap between the largest and
/// the second largest of the three pair sums.
pub fn quadruple_delta(m: &FiniteMetric, q: [usize; 4]) -> f64 {
    let [i, j, k, l] = q;
    half_gap(
        m.get(i, j) + m.get(k, l),
        m.get(i, k) + m.get(j, l),
        m.get(i, l) + m.get(j, k),
    )
}

type Best = (f64, [usize; 4]);

fn better(a: Best, b: Best) -> Best {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn exact(m: &FiniteMetric) -> Best {
    let n = m.len();
    (0..n.saturating_sub(3))
        .into_par_iter()
        .map(|i| {
            let ri = m.row(i);
            let mut best: Best = (f64::NEG_INFINITY, [0; 4]);
            for j in i + 1..n {
                let rj = m.row(j);
                let dij = ri[j];
                for k in j + 1..n {
                    let rk = m.row(k);
                    let (dik, djk) = (ri[k], rj[k]);
                    let mut local = f64::NEG_INFINITY;
                    let mut arg = 0;
                    for l in k + 1..n {
                        let v = half_gap(dij + rk[l], dik + rj[l], ri[l] + djk);
                        if v > local {
                            local = v;
                            arg = l;
                        }
                    }
                    if local > best.0 {
                        best = (local, [i, j, k, arg]);
                    }
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, [0; 4]), better)
}

fn sampled(m: &FiniteMetric, budget: u64, seed: u64) -> Best {
    let n = m.len();
    let chunks = budget.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(budget - c * CHUNK);
            let mut best: Best = (f64::NEG_INFINITY, [0; 4]);
            for _ in 0..count {
                let mut q = [0usize; 4];
                let mut filled = 0;
                while filled < 4 {
                    let x = rng.random_range(0..n);
                    if !q[..filled].contains(&x) {
                        q[filled] = x;
                        filled += 1;
                    }
                }
                q.sort_unstable();
                best = better(best, (quadruple_delta(m, q), q));
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, [0; 4]), better)
}

/// Four-point hyperbolicity constant. Exact mode enumerates every quadruple;
/// sampled mode evaluates `budget` random quadruples drawn from a generator
/// seeded with `seed` and returns a lower bound. Ties between quadruples go
/// to the lexicographically smallest one.
pub fn delta_four_point(m: &FiniteMetric, mode: DeltaMode, budget: u64, seed: u64) -> Result<DeltaReport> {
    let n = m.len();
    let mode = match mode {
        DeltaMode::Auto if n <= EXACT_LIMIT => DeltaMode::Exact,
        DeltaMode::Auto => DeltaMode::Sampled,
        other => other,
    };
    if mode == DeltaMode::Sampled && budget == 0 {
        return param("sampled mode needs a positive budget");
    }
    if n < 4 {
        return Ok(DeltaReport {
            delta: 0.0,
            witness: None,
            mode,
            samples: 0,
        });
    }
    let (best, samples) = match mode {
        DeltaMode::Exact => {
            let n = n as u64;
            (exact(m), n * (n - 1) * (n - 2) * (n - 3) / 24)
        }
        _ => (sampled(m, budget, seed), budget),
    };
    Ok(DeltaReport {
        delta: best.0,
        witness: Some(best.1),
        mode,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_cycle() -> FiniteMetric {
        FiniteMetric::from_fn(4, |i, j| if (j - i) % 2 == 1 { 1.0 } else { 2.0 }).unwrap()
    }

    #[test]
    fn four_cycle_is_one() {
        let r = delta_four_point(&four_cycle(), DeltaMode::Exact, 0, 0).unwrap();
        assert_eq!(r.delta, 1.0);
        assert_eq!(r.witness, Some([0, 1, 2, 3]));
        let s = delta_four_point(&four_cycle(), DeltaMode::Sampled, 10, 7).unwrap();
        assert_eq!(s.delta, 1.0);
    }

    #[test]
    fn small_spaces_are_zero() {
        let m = FiniteMetric::from_fn(3, |_, _| 1.0).unwrap();
        let r = delta_four_point(&m, DeltaMode::Auto, 0, 0).unwrap();
        assert_eq!(r.delta, 0.0);
        assert!(r.witness.is_none());
        assert!(delta_four_point(&m, DeltaMode::Sampled, 0, 0).is_err());
    }

    #[test]
    fn tie_break_is_lexicographic() {
        // every quadruple of five equidistant points scores 0
        let m = FiniteMetric::from_fn(5, |_, _| 1.0).unwrap();
        let r = delta_four_point(&m, DeltaMode::Exact, 0, 0).unwrap();
        assert_eq!(r.witness, Some([0, 1, 2, 3]));
    }
}
