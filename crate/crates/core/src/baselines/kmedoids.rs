use crate::baselines::MAX_ALTERNATIONS;
use crate::criteria::{within_inertia, Problem};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::run::{initial_partition, seeded_rng, RunResult};
use crate::scalar::Scalar;

/// Member minimizing the summed dissimilarity to the other members; ties go to
/// the lowest object index.
pub fn class_medoid<T: Scalar>(members: &[usize], d: &DissimilarityMatrix<T>) -> Result<usize> {
    let mut best: Option<(T, usize)> = None;
    for &m in members {
        let row = d.row(m);
        let cost: T = members.iter().map(|&j| row[j]).sum();
        match best {
            Some((c, ix)) if c < cost || (c == cost && ix < m) => {}
            _ => best = Some((cost, m)),
        }
    }
    best.map(|(_, m)| m).ok_or_else(|| Error::Precondition("cluster must be non-empty".into()))
}

/// "k-means for 0/1 data": alternate medoid updates and nearest-medoid
/// reassignment until the assignment is stable.
///
/// Objects keep their class when tied with another medoid, so each medoid
/// stays in its own class and no class empties.
pub fn kmedoids_binary<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    seed: u64,
    start: Option<&Partition>,
) -> Result<RunResult<T>> {
    let mut rng = seeded_rng(seed);
    let mut partition = initial_partition(problem, k, start, &mut rng)?;
    let d = problem.dissim();
    let n = problem.n();
    let mut trajectory = vec![within_inertia(&partition, problem)];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let medoids = partition
            .classes()
            .iter()
            .map(|members| class_medoid(members, d))
            .collect::<Result<Vec<_>>>()?;
        let mut assign = partition.assign().to_vec();
        let mut changed = false;
        for (i, slot) in assign.iter_mut().enumerate() {
            let current = *slot;
            let mut best = (d.get(i, medoids[current]), current);
            for (c, &m) in medoids.iter().enumerate() {
                let v = d.get(i, m);
                if v < best.0 {
                    best = (v, c);
                }
            }
            if best.1 != current {
                *slot = best.1;
                changed = true;
            }
        }
        debug_assert!(medoids.iter().enumerate().all(|(c, &m)| assign[m] == c));
        partition = Partition::new(assign, k)?;
        trajectory.push(within_inertia(&partition, problem));
        if !changed || iterations >= MAX_ALTERNATIONS {
            break;
        }
    }
    debug_assert_eq!(partition.n(), n);
    let best_w = within_inertia(&partition, problem);
    Ok(RunResult {
        best_partition: partition,
        best_w,
        trajectory: Some(trajectory),
        iterations,
        seed,
        escapes: 0,
    })
}
