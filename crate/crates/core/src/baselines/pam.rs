use crate::baselines::MAX_ALTERNATIONS;
use crate::criteria::{within_inertia, CriterionKind, Problem};
use crate::dissimilarity::l1_dissimilarity;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::run::{initial_partition, seeded_rng, RunResult};
use crate::scalar::Scalar;

fn medians(assign: &[usize], k: usize, problem: &Problem<'_, impl Scalar>) -> Vec<Vec<u8>> {
    let data = problem.data();
    let p = data.p();
    let mut ones = vec![vec![0u32; p]; k];
    let mut sizes = vec![0u32; k];
    for (i, &c) in assign.iter().enumerate() {
        sizes[c] += 1;
        for (o, &x) in ones[c].iter_mut().zip(data.row(i)) {
            *o += u32::from(x);
        }
    }
    ones.into_iter()
        .zip(sizes)
        .map(|(counts, size)| counts.into_iter().map(|o| u8::from(2 * o > size)).collect())
        .collect()
}

/// Alternating k-medians for binary data: recompute each class's 0/1 median,
/// reassign every object to its nearest median in L1 (keeping its class on
/// ties), until no assignment changes.
///
/// A class left empty by reassignment receives the object farthest from its
/// own median among classes that can spare one.
pub fn pam_medians<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    seed: u64,
    start: Option<&Partition>,
) -> Result<RunResult<T>> {
    if problem.criterion() != CriterionKind::L1Median {
        return Err(Error::Config("pam_medians requires the l1 median criterion".into()));
    }
    let mut rng = seeded_rng(seed);
    let p0 = initial_partition(problem, k, start, &mut rng)?;
    let data = problem.data();
    let n = problem.n();
    let mut assign = p0.assign().to_vec();
    let mut trajectory = vec![within_inertia(&p0, problem)];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let kernels = medians(&assign, k, problem);
        let mut changed = false;
        let mut dist_to_own = vec![0u32; n];
        for i in 0..n {
            let row = data.row(i);
            let current = assign[i];
            let mut best = (l1_dissimilarity(row, &kernels[current])?, current);
            for (c, kernel) in kernels.iter().enumerate() {
                let d = l1_dissimilarity(row, kernel)?;
                if d < best.0 {
                    best = (d, c);
                }
            }
            if best.1 != current {
                assign[i] = best.1;
                changed = true;
            }
            dist_to_own[i] = best.0;
        }
        let mut sizes = vec![0usize; k];
        for &c in &assign {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| sizes[assign[i]] >= 2)
                .max_by_key(|&i| (dist_to_own[i], std::cmp::Reverse(i)))
                .expect("k < n leaves a class with two members");
            sizes[assign[far]] -= 1;
            assign[far] = empty;
            sizes[empty] += 1;
            changed = true;
        }
        trajectory.push(within_inertia(&Partition::new(assign.clone(), k)?, problem));
        if !changed || iterations >= MAX_ALTERNATIONS {
            break;
        }
    }
    let best_partition = Partition::new(assign, k)?;
    let best_w = within_inertia(&best_partition, problem);
    Ok(RunResult {
        best_partition,
        best_w,
        trajectory: Some(trajectory),
        iterations,
        seed,
        escapes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::BinaryDataset;
    use crate::dissimilarity::{DissimilarityKind, DissimilarityMatrix};

    fn blocks() -> BinaryDataset {
        let mut rows = vec![vec![1u8, 1, 1, 0, 0, 0]; 4];
        rows.extend(vec![vec![0u8, 0, 0, 1, 1, 1]; 4]);
        rows.extend(vec![vec![1u8, 0, 1, 0, 1, 0]; 4]);
        BinaryDataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn requires_median_criterion() {
        let data = blocks();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        assert!(matches!(pam_medians(&prob, 3, 0, None), Err(Error::Config(_))));
    }

    #[test]
    fn recovers_duplicate_blocks_from_one_per_block_start() {
        let data = blocks();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::L1Median).unwrap();
        // each class holds a majority of one block, so the first medians are the block patterns
        let start = Partition::new(vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 0], 3).unwrap();
        let res = pam_medians(&prob, 3, 0, Some(&start)).unwrap();
        let traj = res.trajectory.unwrap();
        assert!(traj.windows(2).all(|w| w[1] <= w[0]), "{traj:?}");
        assert!(res.iterations < MAX_ALTERNATIONS);
        assert_eq!(res.best_w, 0);
        assert_eq!(res.best_partition.canonical().assign(), &[0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn true_blocks_are_a_fixed_point() {
        let data = blocks();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::L1Median).unwrap();
        let truth = Partition::new((0..12).map(|i| i / 4).collect(), 3).unwrap();
        let res = pam_medians(&prob, 3, 0, Some(&truth)).unwrap();
        assert_eq!(res.best_partition, truth);
        assert_eq!(res.best_w, 0);
        assert_eq!(res.iterations, 1);
    }
}
