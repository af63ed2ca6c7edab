//! Within-class heterogeneity criteria and incremental move evaluation.
//!
//! Pair sums (`delta_sum`, total inertia) run over *ordered* pairs, so every
//! unordered pair contributes twice. With this convention a single-class
//! partition under the pairwise criterion has `W = I`, and `B = I - W >= 0`
//! holds for both criteria.

use serde::{Deserialize, Serialize};

use crate::dataset::BinaryDataset;
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::{Move, Partition};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriterionKind {
    /// Sum of dissimilarities over ordered pairs of class members.
    #[serde(rename = "sum")]
    SumPairwise,
    /// Sum of L1 distances from members to the class median vector.
    #[serde(rename = "l1")]
    L1Median,
}

impl std::str::FromStr for CriterionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(Self::SumPairwise),
            "l1" => Ok(Self::L1Median),
            other => Err(format!("unknown criterion '{other}' (expected sum or l1)")),
        }
    }
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::SumPairwise => "sum",
            Self::L1Median => "l1",
        })
    }
}

/// Everything needed to score partitions of one dataset.
#[derive(Debug, Clone)]
pub struct Problem<'a, T> {
    data: &'a BinaryDataset,
    dissim: &'a DissimilarityMatrix<T>,
    criterion: CriterionKind,
    total: T,
}

impl<'a, T: Scalar> Problem<'a, T> {
    pub fn new(
        data: &'a BinaryDataset,
        dissim: &'a DissimilarityMatrix<T>,
        criterion: CriterionKind,
    ) -> Result<Self> {
        if data.n() != dissim.n() {
            return Err(Error::Dimension { expected: data.n(), found: dissim.n() });
        }
        let total = match criterion {
            CriterionKind::SumPairwise => total_inertia(dissim),
            // medians live in L1 geometry whatever matrix is supplied
            CriterionKind::L1Median => T::from_count(l1_total_inertia(data)),
        };
        Ok(Self { data, dissim, criterion, total })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.data.n()
    }

    #[inline]
    pub fn data(&self) -> &'a BinaryDataset {
        self.data
    }

    #[inline]
    pub fn dissim(&self) -> &'a DissimilarityMatrix<T> {
        self.dissim
    }

    #[inline]
    pub fn criterion(&self) -> CriterionKind {
        self.criterion
    }

    /// Cached `I`.
    #[inline]
    pub fn total_inertia(&self) -> T {
        self.total
    }

    /// Heterogeneity of one class.
    pub fn class_delta(&self, members: &[usize]) -> Result<T> {
        match self.criterion {
            CriterionKind::SumPairwise => delta_sum(members, self.dissim),
            CriterionKind::L1Median => delta_l1(members, self.data).map(T::from_count),
        }
    }
}

fn non_empty(members: &[usize]) -> Result<()> {
    if members.is_empty() {
        return Err(Error::Precondition("cluster must be non-empty".into()));
    }
    Ok(())
}

/// Sum of `d(i, i')` over ordered member pairs.
pub fn delta_sum<T: Scalar>(members: &[usize], d: &DissimilarityMatrix<T>) -> Result<T> {
    non_empty(members)?;
    let mut acc = T::zero();
    for (a, &i) in members.iter().enumerate() {
        let row = d.row(i);
        for &j in &members[a + 1..] {
            acc += row[j];
        }
    }
    Ok(acc + acc)
}

fn one_counts(members: &[usize], data: &BinaryDataset) -> Vec<u32> {
    let mut ones = vec![0u32; data.p()];
    for &i in members {
        for (o, &x) in ones.iter_mut().zip(data.row(i)) {
            *o += u32::from(x);
        }
    }
    ones
}

/// Coordinate-wise majority vector; exact ties resolve to 0.
pub fn median_vector(members: &[usize], data: &BinaryDataset) -> Result<Vec<u8>> {
    non_empty(members)?;
    let size = members.len() as u32;
    Ok(one_counts(members, data).into_iter().map(|o| u8::from(2 * o > size)).collect())
}

/// `sum_j min(ones_j, size - ones_j)`, the L1 spread of a class around its median.
#[inline]
pub fn delta_l1_from_counts(ones: &[u32], size: u32) -> u64 {
    ones.iter().map(|&o| u64::from(o.min(size - o))).sum()
}

/// Sum of L1 distances from the members to their median vector.
pub fn delta_l1(members: &[usize], data: &BinaryDataset) -> Result<u64> {
    non_empty(members)?;
    Ok(delta_l1_from_counts(&one_counts(members, data), members.len() as u32))
}

/// `W(P)`: sum of class heterogeneities, recomputed from scratch.
pub fn within_inertia<T: Scalar>(p: &Partition, problem: &Problem<'_, T>) -> T {
    match problem.criterion {
        CriterionKind::SumPairwise => {
            let d = problem.dissim;
            let assign = p.assign();
            let mut acc = T::zero();
            for i in 0..p.n() {
                let row = d.row(i);
                for j in (i + 1)..p.n() {
                    if assign[i] == assign[j] {
                        acc += row[j];
                    }
                }
            }
            acc + acc
        }
        CriterionKind::L1Median => p
            .classes()
            .iter()
            .map(|members| T::from_count(delta_l1(members, problem.data).unwrap_or(0)))
            .sum(),
    }
}

/// `I`: sum of `d` over all ordered pairs.
pub fn total_inertia<T: Scalar>(d: &DissimilarityMatrix<T>) -> T {
    let mut acc = T::zero();
    for i in 0..d.n() {
        for &v in &d.row(i)[i + 1..] {
            acc += v;
        }
    }
    acc + acc
}

/// Ordered-pair sum of L1 distances, from column one counts.
pub fn l1_total_inertia(data: &BinaryDataset) -> u64 {
    let n = data.n() as u64;
    let ones = one_counts(&(0..data.n()).collect::<Vec<_>>(), data);
    ones.iter().map(|&c| 2 * u64::from(c) * (n - u64::from(c))).sum()
}

/// `B = I - W`.
pub fn between_inertia<T: Scalar>(p: &Partition, problem: &Problem<'_, T>) -> T {
    problem.total - within_inertia(p, problem)
}

/// Per-class bookkeeping that makes single-transfer evaluation cheap.
///
/// For the pairwise criterion each object keeps its summed dissimilarity to
/// every class (`links`), giving constant-time move deltas. For the median
/// criterion each class keeps per-coordinate one counts and a move delta
/// touches only the two affected classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats<T> {
    k: usize,
    sizes: Vec<usize>,
    one_counts: Vec<u32>,
    links: Vec<T>,
    cached_delta: Vec<T>,
    total_w: T,
}

impl<T: Scalar> ClusterStats<T> {
    pub fn build(partition: &Partition, problem: &Problem<'_, T>) -> Self {
        let (n, k) = (partition.n(), partition.k());
        let assign = partition.assign();
        let sizes = partition.sizes();
        let mut one_counts = Vec::new();
        let mut links = Vec::new();
        let mut cached_delta = vec![T::zero(); k];
        match problem.criterion {
            CriterionKind::SumPairwise => {
                links = vec![T::zero(); n * k];
                for i in 0..n {
                    let row = problem.dissim.row(i);
                    let li = &mut links[i * k..(i + 1) * k];
                    for (j, &c) in assign.iter().enumerate() {
                        li[c] += row[j];
                    }
                }
                for i in 0..n {
                    let c = assign[i];
                    cached_delta[c] += links[i * k + c];
                }
            }
            CriterionKind::L1Median => {
                let p = problem.data.p();
                one_counts = vec![0u32; k * p];
                for (i, &c) in assign.iter().enumerate() {
                    let counts = &mut one_counts[c * p..(c + 1) * p];
                    for (o, &x) in counts.iter_mut().zip(problem.data.row(i)) {
                        *o += u32::from(x);
                    }
                }
                for c in 0..k {
                    let counts = &one_counts[c * p..(c + 1) * p];
                    cached_delta[c] = T::from_count(delta_l1_from_counts(counts, sizes[c] as u32));
                }
            }
        }
        let total_w = cached_delta.iter().copied().sum();
        Self { k, sizes, one_counts, links, cached_delta, total_w }
    }

    #[inline]
    pub fn total_w(&self) -> T {
        self.total_w
    }

    #[inline]
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn cached_delta(&self) -> &[T] {
        &self.cached_delta
    }

    /// One counts of class `c` (empty slice for the pairwise criterion).
    pub fn one_counts(&self, c: usize) -> &[u32] {
        if self.one_counts.is_empty() {
            return &[];
        }
        let p = self.one_counts.len() / self.k;
        &self.one_counts[c * p..(c + 1) * p]
    }

    fn check(&self, m: &Move) -> Result<()> {
        if m.from_class >= self.k || m.to_class >= self.k || m.from_class == m.to_class {
            return Err(Error::Precondition(format!("invalid move {m:?}")));
        }
        if self.sizes[m.from_class] < 2 {
            return Err(Error::Precondition(format!(
                "move {m:?} would empty class {}",
                m.from_class
            )));
        }
        Ok(())
    }

    /// New heterogeneities of the source and target classes after `m`.
    fn moved_deltas(&self, problem: &Problem<'_, T>, m: &Move) -> (T, T) {
        let (from, to, i) = (m.from_class, m.to_class, m.object);
        match problem.criterion {
            CriterionKind::SumPairwise => {
                let li = &self.links[i * self.k..(i + 1) * self.k];
                (
                    self.cached_delta[from] - (li[from] + li[from]),
                    self.cached_delta[to] + (li[to] + li[to]),
                )
            }
            CriterionKind::L1Median => {
                let p = problem.data.p();
                let row = problem.data.row(i);
                let ones_from = &self.one_counts[from * p..(from + 1) * p];
                let ones_to = &self.one_counts[to * p..(to + 1) * p];
                let size_from = self.sizes[from] as u32 - 1;
                let size_to = self.sizes[to] as u32 + 1;
                let mut new_from = 0u64;
                let mut new_to = 0u64;
                for j in 0..p {
                    let x = u32::from(row[j]);
                    let of = ones_from[j] - x;
                    let ot = ones_to[j] + x;
                    new_from += u64::from(of.min(size_from - of));
                    new_to += u64::from(ot.min(size_to - ot));
                }
                (T::from_count(new_from), T::from_count(new_to))
            }
        }
    }

    /// `W(after) - W(before)` for a legal move, without recomputation.
    ///
    /// The caller guarantees `m.from_class` is the object's current class.
    pub fn delta_w_move(&self, problem: &Problem<'_, T>, m: &Move) -> Result<T> {
        self.check(m)?;
        Ok(self.delta_unchecked(problem, m))
    }

    #[inline]
    pub(crate) fn delta_unchecked(&self, problem: &Problem<'_, T>, m: &Move) -> T {
        let (new_from, new_to) = self.moved_deltas(problem, m);
        (new_from + new_to) - (self.cached_delta[m.from_class] + self.cached_delta[m.to_class])
    }

    /// Brings all bookkeeping in line with the post-move partition.
    pub fn update(&mut self, problem: &Problem<'_, T>, m: &Move) -> Result<()> {
        self.check(m)?;
        let (from, to, i) = (m.from_class, m.to_class, m.object);
        let (new_from, new_to) = self.moved_deltas(problem, m);
        self.total_w =
            self.total_w + (new_from + new_to) - (self.cached_delta[from] + self.cached_delta[to]);
        self.cached_delta[from] = new_from;
        self.cached_delta[to] = new_to;
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        match problem.criterion {
            CriterionKind::SumPairwise => {
                let row = problem.dissim.row(i);
                let k = self.k;
                for (j, &dij) in row.iter().enumerate() {
                    self.links[j * k + from] -= dij;
                    self.links[j * k + to] += dij;
                }
            }
            CriterionKind::L1Median => {
                let p = problem.data.p();
                let row = problem.data.row(i);
                for j in 0..p {
                    let x = u32::from(row[j]);
                    self.one_counts[from * p + j] -= x;
                    self.one_counts[to * p + j] += x;
                }
            }
        }
        Ok(())
    }

    /// Equality up to the scalar's tolerance; exact for integer scalars.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let close =
            |a: &[T], b: &[T]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(*y));
        self.k == other.k
            && self.sizes == other.sizes
            && self.one_counts == other.one_counts
            && close(&self.links, &other.links)
            && close(&self.cached_delta, &other.cached_delta)
            && self.total_w.approx_eq(other.total_w)
    }
}

/// A partition together with its incremental statistics.
#[derive(Debug, Clone)]
pub struct SearchState<T> {
    partition: Partition,
    stats: ClusterStats<T>,
}

impl<T: Scalar> SearchState<T> {
    pub fn new(partition: Partition, problem: &Problem<'_, T>) -> Self {
        let stats = ClusterStats::build(&partition, problem);
        Self { partition, stats }
    }

    #[inline]
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    #[inline]
    pub fn stats(&self) -> &ClusterStats<T> {
        &self.stats
    }

    #[inline]
    pub fn w(&self) -> T {
        self.stats.total_w
    }

    pub fn into_partition(self) -> Partition {
        self.partition
    }

    fn check_consistent(&self, m: &Move) -> Result<()> {
        if m.object >= self.partition.n() {
            return Err(Error::Precondition(format!("object {} out of range", m.object)));
        }
        let current = self.partition.class_of(m.object);
        if current != m.from_class {
            return Err(Error::Consistency(format!(
                "object {} is in class {current}, not {}",
                m.object, m.from_class
            )));
        }
        Ok(())
    }

    pub fn delta(&self, problem: &Problem<'_, T>, m: &Move) -> Result<T> {
        self.check_consistent(m)?;
        self.stats.delta_w_move(problem, m)
    }

    pub fn apply(&mut self, problem: &Problem<'_, T>, m: &Move) -> Result<()> {
        self.check_consistent(m)?;
        self.stats.update(problem, m)?;
        self.partition.set_class_unchecked(m.object, m.to_class);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissimilarity::DissimilarityKind;
    use crate::neighborhood::random_move;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(rng: &mut ChaCha8Rng, n: usize, p: usize) -> BinaryDataset {
        let rows: Vec<Vec<u8>> =
            (0..n).map(|_| (0..p).map(|_| rng.random_range(0..=1u8)).collect()).collect();
        BinaryDataset::from_rows(&rows).unwrap()
    }

    fn naive_pair_sum(members: &[usize], d: &DissimilarityMatrix<i64>) -> i64 {
        let mut s = 0;
        for &i in members {
            for &j in members {
                s += d.get(i, j);
            }
        }
        s
    }

    #[test]
    fn delta_sum_examples() {
        let d = DissimilarityMatrix::from_square(vec![0i64, 3, 3, 0], 2, DissimilarityKind::L1)
            .unwrap();
        assert_eq!(delta_sum(&[1], &d).unwrap(), 0);
        assert_eq!(delta_sum(&[0, 1], &d).unwrap(), 6);
        assert!(delta_sum::<i64>(&[], &d).is_err());
    }

    #[test]
    fn delta_sum_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = random_data(&mut rng, 12, 7);
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let members = [0, 2, 3, 7, 9, 11];
        assert_eq!(delta_sum(&members, &d).unwrap(), naive_pair_sum(&members, &d));
    }

    #[test]
    fn median_examples() {
        let data =
            BinaryDataset::from_rows(&[vec![1u8, 0], vec![1, 1], vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(median_vector(&[0, 1, 2], &data).unwrap(), vec![1, 1]);
        assert_eq!(median_vector(&[2], &data).unwrap(), vec![0, 1]);
        assert_eq!(median_vector(&[0, 3], &data).unwrap(), vec![0, 0]);
        assert_eq!(delta_l1(&[0, 1, 2], &data).unwrap(), 2);
        assert_eq!(delta_l1(&[1], &data).unwrap(), 0);
        assert!(median_vector(&[], &data).is_err());
        assert!(delta_l1(&[], &data).is_err());
    }

    #[test]
    fn delta_l1_is_tie_invariant() {
        let data = BinaryDataset::from_rows(&[vec![1u8, 0], vec![0, 0]]).unwrap();
        let members = [0, 1];
        let dist = |m: &[u8]| -> u32 {
            members
                .iter()
                .map(|&i| crate::dissimilarity::l1_dissimilarity(data.row(i), m).unwrap())
                .sum()
        };
        assert_eq!(dist(&[0, 0]), dist(&[1, 0]));
        assert_eq!(u64::from(dist(&[0, 0])), delta_l1(&members, &data).unwrap());
    }

    #[test]
    fn delta_l1_closed_form_matches_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let data = random_data(&mut rng, 10, 9);
            let members: Vec<usize> = (0..10).filter(|_| rng.random_bool(0.6)).collect();
            if members.is_empty() {
                continue;
            }
            let med = median_vector(&members, &data).unwrap();
            let explicit: u32 = members
                .iter()
                .map(|&i| crate::dissimilarity::l1_dissimilarity(data.row(i), &med).unwrap())
                .sum();
            assert_eq!(delta_l1(&members, &data).unwrap(), u64::from(explicit));
        }
    }

    #[test]
    fn inertia_examples() {
        let data = BinaryDataset::from_rows(&vec![vec![1u8, 0, 1]; 5]).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1, 1], 2).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &d, c).unwrap();
            assert_eq!(within_inertia(&p, &prob), 0);
        }
        assert_eq!(total_inertia(&d), 0);

        let d2 = DissimilarityMatrix::from_square(vec![0i64, 2, 2, 0], 2, DissimilarityKind::L1)
            .unwrap();
        assert_eq!(total_inertia(&d2), 4);
    }

    #[test]
    fn singletons_contribute_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = random_data(&mut rng, 5, 6);
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let p = Partition::new(vec![0, 1, 0, 2, 3], 4).unwrap();
        assert_eq!(within_inertia(&p, &prob), 2 * d.get(0, 2));
    }

    #[test]
    fn single_class_pairwise_has_w_equal_i() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = random_data(&mut rng, 9, 6);
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let one = Partition::new(vec![0; 9], 1).unwrap();
        assert_eq!(within_inertia(&one, &prob), prob.total_inertia());
        assert_eq!(between_inertia(&one, &prob), 0);
    }

    #[test]
    fn homogeneous_classes_have_b_equal_i() {
        let data = BinaryDataset::from_rows(&[
            vec![1u8, 1, 0],
            vec![1, 1, 0],
            vec![0, 0, 1],
            vec![0, 0, 1],
        ])
        .unwrap();
        let d = DissimilarityMatrix::<f64>::compute(&data, DissimilarityKind::Jaccard).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &d, c).unwrap();
            assert_eq!(between_inertia(&p, &prob), prob.total_inertia());
        }
    }

    #[test]
    fn median_total_is_l1_whatever_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let data = random_data(&mut rng, 12, 7);
            let dl = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
            let dj =
                DissimilarityMatrix::<f64>::compute(&data, DissimilarityKind::Jaccard).unwrap();
            assert_eq!(l1_total_inertia(&data) as i64, total_inertia(&dl));
            let prob = Problem::new(&data, &dj, CriterionKind::L1Median).unwrap();
            assert_eq!(prob.total_inertia(), total_inertia(&dl) as f64);
            let p = Partition::random(12, 3, &mut rng).unwrap();
            assert!(between_inertia(&p, &prob) >= 0.0);
        }
    }

    #[test]
    fn relabelling_leaves_w_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let data = random_data(&mut rng, 10, 6);
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let p = Partition::random(10, 3, &mut rng).unwrap();
        let relabelled: Vec<usize> = p.assign().iter().map(|&c| (c + 1) % 3).collect();
        let q = Partition::new(relabelled, 3).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &d, c).unwrap();
            assert_eq!(within_inertia(&p, &prob), within_inertia(&q, &prob));
        }
    }

    #[test]
    fn identical_rows_give_zero_delta() {
        let data = BinaryDataset::from_rows(&vec![vec![0u8, 1]; 6]).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &d, c).unwrap();
            let stats = ClusterStats::build(&p, &prob);
            assert_eq!(stats.delta_w_move(&prob, &Move::new(1, 0, 1)).unwrap(), 0);
        }
    }

    #[test]
    fn four_object_moves_match_recompute() {
        let data = BinaryDataset::from_rows(&[
            vec![1u8, 0, 1],
            vec![1, 1, 1],
            vec![0, 0, 1],
            vec![0, 1, 0],
        ])
        .unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &d, c).unwrap();
            let stats = ClusterStats::build(&p, &prob);
            for i in 0..4 {
                let m = Move::new(i, p.class_of(i), 1 - p.class_of(i));
                let after = p.apply_move(m).unwrap();
                assert_eq!(
                    stats.delta_w_move(&prob, &m).unwrap(),
                    within_inertia(&after, &prob) - within_inertia(&p, &prob)
                );
            }
        }
    }

    #[test]
    fn emptying_move_is_rejected_by_stats() {
        let data = BinaryDataset::from_rows(&[vec![0u8], vec![1], vec![1]]).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::L1Median).unwrap();
        let p = Partition::new(vec![0, 1, 1], 2).unwrap();
        let mut stats = ClusterStats::build(&p, &prob);
        assert!(stats.delta_w_move(&prob, &Move::new(0, 0, 1)).is_err());
        assert!(stats.update(&prob, &Move::new(0, 0, 1)).is_err());
        let state = SearchState::new(p, &prob);
        assert!(matches!(state.delta(&prob, &Move::new(1, 0, 1)), Err(Error::Consistency(_))));
    }

    #[test]
    fn update_then_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let data = random_data(&mut rng, 15, 8);
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &d, c).unwrap();
            let p = Partition::random(15, 4, &mut rng).unwrap();
            let original = ClusterStats::build(&p, &prob);
            for _ in 0..100 {
                let m = random_move(&p, &mut rng).unwrap();
                let mut stats = original.clone();
                stats.update(&prob, &m).unwrap();
                assert_eq!(stats.sizes().iter().sum::<usize>(), 15);
                stats.update(&prob, &m.inverse()).unwrap();
                assert_eq!(stats, original);
            }
        }
    }

    #[test]
    fn long_move_sequences_match_rebuild() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let data = random_data(&mut rng, 20, 10);
        let dl1 = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let djac = DissimilarityMatrix::<f64>::compute(&data, DissimilarityKind::Jaccard).unwrap();
        for c in [CriterionKind::SumPairwise, CriterionKind::L1Median] {
            let prob = Problem::new(&data, &dl1, c).unwrap();
            let mut state = SearchState::new(Partition::random(20, 3, &mut rng).unwrap(), &prob);
            for _ in 0..1000 {
                let m = random_move(state.partition(), &mut rng).unwrap();
                state.apply(&prob, &m).unwrap();
            }
            assert_eq!(state.stats(), &ClusterStats::build(state.partition(), &prob));

            let prob = Problem::new(&data, &djac, c).unwrap();
            let mut state = SearchState::new(Partition::random(20, 3, &mut rng).unwrap(), &prob);
            for _ in 0..1000 {
                let m = random_move(state.partition(), &mut rng).unwrap();
                state.apply(&prob, &m).unwrap();
            }
            assert!(state.stats().approx_eq(&ClusterStats::build(state.partition(), &prob)));
        }
    }
}
