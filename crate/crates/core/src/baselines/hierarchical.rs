use serde::{Deserialize, Serialize};

use crate::criteria::{within_inertia, Problem};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::{check_class_count, Partition};
use crate::run::RunResult;
use crate::scalar::Scalar;

/// One agglomeration step. Leaves are labelled `0..n`; the cluster created
/// by merge `s` is labelled `n + s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

/// Average-linkage (UPGMA) agglomerative clustering.
///
/// Clusters are identified by their smallest leaf; among pairs at equal
/// linkage, the lexicographically smallest pair of identifiers merges first.
/// Keeps, for every active cluster, its nearest active cluster with a larger
/// identifier, so a step costs `O(n)` plus rescans of invalidated rows.
pub fn hierarchical_average_linkage<T: Scalar>(d: &DissimilarityMatrix<T>) -> Dendrogram {
    let n = d.n();
    let mut dist: Vec<f64> = (0..n * n).map(|ix| d.get(ix / n, ix % n).as_f64()).collect();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut label: Vec<usize> = (0..n).collect();
    // nearest[i] = (distance, j) over active j > i
    let mut nearest: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); n];

    let rescan = |i: usize, dist: &[f64], active: &[bool]| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (i + 1)..n {
            if active[j] && dist[i * n + j] < best.0 {
                best = (dist[i * n + j], j);
            }
        }
        best
    };
    for i in 0..n {
        nearest[i] = rescan(i, &dist, &active);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let mut pick = (f64::INFINITY, usize::MAX, usize::MAX);
        for i in 0..n {
            if active[i] && nearest[i].1 != usize::MAX && nearest[i].0 < pick.0 {
                pick = (nearest[i].0, i, nearest[i].1);
            }
        }
        let (height, i, j) = pick;
        merges.push(Merge { a: label[i], b: label[j], height, size: size[i] + size[j] });

        let (si, sj) = (size[i] as f64, size[j] as f64);
        active[j] = false;
        for x in 0..n {
            if !active[x] || x == i {
                continue;
            }
            let v = (si * dist[i * n + x] + sj * dist[j * n + x]) / (si + sj);
            dist[i * n + x] = v;
            dist[x * n + i] = v;
        }
        size[i] += size[j];
        label[i] = n + step;

        nearest[i] = rescan(i, &dist, &active);
        for x in 0..i {
            if !active[x] {
                continue;
            }
            let (nd, nj) = nearest[x];
            let v = dist[x * n + i];
            if nj == i || nj == j {
                nearest[x] = rescan(x, &dist, &active);
            } else if v < nd || (v == nd && i < nj) {
                nearest[x] = (v, i);
            }
        }
        for x in (i + 1)..j {
            if active[x] && nearest[x].1 == j {
                nearest[x] = rescan(x, &dist, &active);
            }
        }
    }
    Dendrogram { n, merges }
}

/// Partition into `k` clusters obtained by undoing the last `k - 1` merges.
/// Classes are numbered by order of their smallest member.
pub fn cut_dendrogram(t: &Dendrogram, k: usize) -> Result<Partition> {
    let n = t.n;
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, m) in t.merges.iter().take(n - k).enumerate() {
        let node = n + s;
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        parent[ra] = node;
        parent[rb] = node;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Partition::from_labels(&roots)
}

/// Average-linkage clustering cut at `k`, scored by the problem's criterion.
pub fn hierarchical_run<T: Scalar>(problem: &Problem<'_, T>, k: usize) -> Result<RunResult<T>> {
    check_class_count(problem.n(), k)?;
    let tree = hierarchical_average_linkage(problem.dissim());
    let best_partition = cut_dendrogram(&tree, k)?;
    let best_w = within_inertia(&best_partition, problem);
    Ok(RunResult {
        best_partition,
        best_w,
        trajectory: None,
        iterations: tree.merges.len(),
        seed: 0,
        escapes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::BinaryDataset;
    use crate::dissimilarity::DissimilarityKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Average linkage recomputed from leaf sets at every step.
    fn naive_heights(d: &DissimilarityMatrix<f64>) -> Vec<f64> {
        let n = d.n();
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut heights = Vec::new();
        while clusters.len() > 1 {
            let mut best = (f64::INFINITY, 0, 0);
            for a in 0..clusters.len() {
                for b in (a + 1)..clusters.len() {
                    let mut s = 0.0;
                    for &x in &clusters[a] {
                        for &y in &clusters[b] {
                            s += d.get(x, y);
                        }
                    }
                    let avg = s / (clusters[a].len() * clusters[b].len()) as f64;
                    if avg < best.0 {
                        best = (avg, a, b);
                    }
                }
            }
            heights.push(best.0);
            let merged = clusters.remove(best.2);
            clusters[best.1].extend(merged);
        }
        heights
    }

    #[test]
    fn two_objects() {
        let d = DissimilarityMatrix::from_square(vec![0i64, 3, 3, 0], 2, DissimilarityKind::L1)
            .unwrap();
        let t = hierarchical_average_linkage(&d);
        assert_eq!(t.merges, vec![Merge { a: 0, b: 1, height: 3.0, size: 2 }]);
    }

    #[test]
    fn three_points_by_hand() {
        let d = DissimilarityMatrix::from_square(
            vec![0i64, 1, 5, 1, 0, 5, 5, 5, 0],
            3,
            DissimilarityKind::L1,
        )
        .unwrap();
        let t = hierarchical_average_linkage(&d);
        assert_eq!(t.merges[0], Merge { a: 0, b: 1, height: 1.0, size: 2 });
        assert_eq!(t.merges[1], Merge { a: 3, b: 2, height: 5.0, size: 3 });
    }

    #[test]
    fn heights_match_naive_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let rows: Vec<Vec<u8>> =
                (0..10).map(|_| (0..12).map(|_| rng.random_range(0..=1u8)).collect()).collect();
            let data = BinaryDataset::from_rows(&rows).unwrap();
            let d = DissimilarityMatrix::<f64>::compute(&data, DissimilarityKind::Jaccard).unwrap();
            let fast: Vec<f64> =
                hierarchical_average_linkage(&d).merges.iter().map(|m| m.height).collect();
            let slow = naive_heights(&d);
            assert_eq!(fast.len(), 9);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "{fast:?} vs {slow:?}");
            }
        }
    }

    #[test]
    fn cuts() {
        let mut rows = vec![vec![1u8, 1, 0, 0, 1]; 3];
        rows.extend(vec![vec![0u8, 0, 1, 1, 0]; 4]);
        rows.extend(vec![vec![1u8, 0, 1, 0, 0]; 2]);
        let data = BinaryDataset::from_rows(&rows).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let t = hierarchical_average_linkage(&d);
        assert_eq!(cut_dendrogram(&t, 1).unwrap().k(), 1);
        let all = cut_dendrogram(&t, 9).unwrap();
        assert_eq!(all.assign(), &(0..9).collect::<Vec<_>>()[..]);
        let three = cut_dendrogram(&t, 3).unwrap();
        assert_eq!(three.assign(), &[0, 0, 0, 1, 1, 1, 1, 2, 2]);
        for k in 1..=9 {
            let p = cut_dendrogram(&t, k).unwrap();
            assert_eq!(p.k(), k);
        }
        assert!(cut_dendrogram(&t, 0).is_err());
        assert!(cut_dendrogram(&t, 10).is_err());
    }
}
