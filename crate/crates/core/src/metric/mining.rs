use super::batch::EmbeddingBatch;
use super::loss::TripletSpec;

/// Smallest similarity gap that produces a triplet.
pub const DEFAULT_MIN_GAP: f64 = 0.01;

/// Similarity between two batch entries.
pub trait PairSimilarity {
    fn similarity(&self, i: usize, j: usize) -> f64;
}

impl<F: Fn(usize, usize) -> f64> PairSimilarity for F {
    fn similarity(&self, i: usize, j: usize) -> f64 {
        self(i, j)
    }
}

/// Every ordered triple `(a, x1, x2)` of distinct indices with
/// `sim(a, x1) − sim(a, x2) > min_gap`, with `x1` as the relative positive.
///
/// Output is ordered by `(a, x1, x2)`. Negative gaps are treated as zero so
/// that every emitted triplet has `sim_arp > sim_arn`. Batches smaller
/// than three yield nothing.
pub fn mine_relative_triplets(batch: &EmbeddingBatch, sims: &impl PairSimilarity, min_gap: f64) -> Vec<TripletSpec> {
    let b = batch.len();
    let gap = min_gap.max(0.0);
    let mut out = Vec::new();
    if b < 3 {
        return out;
    }
    for a in 0..b {
        let row: Vec<f64> = (0..b).map(|j| if j == a { f64::NAN } else { sims.similarity(a, j) }).collect();
        for x1 in (0..b).filter(|&j| j != a) {
            for x2 in (0..b).filter(|&j| j != a && j != x1) {
                if row[x1] - row[x2] > gap {
                    out.push(TripletSpec {
                        anchor: a,
                        rel_pos: x1,
                        rel_neg: x2,
                        sim_arp: row[x1],
                        sim_arn: row[x2],
                    });
                }
            }
        }
    }
    out
}
