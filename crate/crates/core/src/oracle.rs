//! Exhaustive search over all partitions of small instances.

use serde::Serialize;

use crate::criteria::{within_inertia, CriterionKind, Problem};
use crate::dataset::BinaryDataset;
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Largest `n` enumerated without an explicit override.
pub const DEFAULT_GUARD: usize = 12;
/// Largest `n` enumerated at all.
pub const HARD_GUARD: usize = 14;

/// Streams every partition of `n` objects into exactly `k` non-empty classes
/// as a restricted growth string (`a[0] = 0`, `a[i] <= 1 + max(a[..i])`).
#[derive(Debug, Clone)]
pub struct SetPartitions {
    n: usize,
    k: usize,
    a: Vec<usize>,
    // prefix maxima: m[i] = max(a[..i])
    m: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    fn first(&mut self) {
        // lexicographically smallest RGS with exactly k blocks: 0..0 1 2 .. k-1
        let (n, k) = (self.n, self.k);
        for i in 0..n {
            self.a[i] = i.saturating_sub(n - k);
        }
        self.refresh_maxima(1);
    }

    fn refresh_maxima(&mut self, from: usize) {
        for i in from.max(1)..=self.n {
            self.m[i] = self.m[i - 1].max(self.a[i - 1]);
        }
    }

    fn advance(&mut self) -> bool {
        let (n, k) = (self.n, self.k);
        // find the rightmost position that can grow while still allowing k blocks
        for i in (1..n).rev() {
            let rest = n - i - 1;
            for v in (self.a[i] + 1)..=(self.m[i] + 1).min(k - 1) {
                let max_here = self.m[i].max(v);
                // the suffix must still introduce every missing block
                let missing = k - 1 - max_here;
                if missing > rest {
                    continue;
                }
                self.a[i] = v;
                for j in (i + 1)..n {
                    let from_end = n - j;
                    self.a[j] = if from_end <= missing { k - from_end } else { 0 };
                }
                self.refresh_maxima(i);
                return true;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.first();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.a.clone())
    }
}

fn guard(n: usize, allow_large: bool) -> Result<()> {
    let limit = if allow_large { HARD_GUARD } else { DEFAULT_GUARD };
    if n > limit {
        return Err(Error::Resource(format!(
            "exhaustive search over n = {n} objects exceeds the guard n <= {limit}"
        )));
    }
    Ok(())
}

/// All partitions of `n` objects into exactly `k` classes, as label vectors.
pub fn enumerate_partitions(n: usize, k: usize, allow_large: bool) -> Result<SetPartitions> {
    guard(n, allow_large)?;
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(SetPartitions { n, k, a: vec![0; n], m: vec![0; n + 1], started: false, done: false })
}

/// Stirling number of the second kind by the recurrence
/// `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..=k).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}

/// Global minimizer of `W` over partitions into exactly `k` classes; the
/// first minimizer in enumeration order is returned.
pub fn brute_force_optimum<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    allow_large: bool,
) -> Result<(Partition, T)> {
    let mut best: Option<(Vec<usize>, T)> = None;
    for labels in enumerate_partitions(problem.n(), k, allow_large)? {
        let p = Partition::new(labels, k)?;
        let w = within_inertia(&p, problem);
        if best.as_ref().is_none_or(|(_, bw)| w < *bw) {
            best = Some((p.assign().to_vec(), w));
        }
    }
    let (labels, w) = best.expect("at least one partition");
    Ok((Partition::new(labels, k)?, w))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub k_values: Vec<usize>,
    pub sum_pairwise: Vec<f64>,
    pub l1_median: Vec<f64>,
    pub holds: bool,
}

/// Optimal `W` for `k = 2..=k_max` under both criteria, and whether each
/// sequence is non-increasing in `k`.
pub fn verify_monotonicity<T: Scalar>(
    data: &BinaryDataset,
    d: &DissimilarityMatrix<T>,
    k_max: usize,
    allow_large: bool,
) -> Result<MonotonicityReport> {
    if k_max < 2 || k_max >= data.n() {
        return Err(Error::Parameter(format!("need 2 <= k_max < n, got {k_max}")));
    }
    guard(data.n(), allow_large)?;
    let k_values: Vec<usize> = (2..=k_max).collect();
    let mut sequences = Vec::new();
    for criterion in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
        let problem = Problem::new(data, d, criterion)?;
        let seq = k_values
            .iter()
            .map(|&k| brute_force_optimum(&problem, k, allow_large).map(|(_, w)| w))
            .collect::<Result<Vec<T>>>()?;
        sequences.push(seq);
    }
    let holds = sequences.iter().all(|s| s.windows(2).all(|w| w[1] <= w[0]));
    let to_f64 = |s: &[T]| s.iter().map(|v| v.as_f64()).collect();
    Ok(MonotonicityReport {
        sum_pairwise: to_f64(&sequences[0]),
        l1_median: to_f64(&sequences[1]),
        k_values,
        holds,
    })
}
