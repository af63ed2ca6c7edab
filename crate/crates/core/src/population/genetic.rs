use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{within_inertia, Problem};
use crate::error::{Error, Result};
use crate::neighborhood::random_move;
use crate::partition::{check_class_count, Partition};
use crate::run::{check_positive, check_unit_closed, seeded_rng, RunResult};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub pop_size: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub maxiter: usize,
    /// The run stops once the population's fitness variance drops below this.
    pub epsilon: f64,
    pub elite_count: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            pop_size: 20,
            p_crossover: 0.8,
            p_mutation: 0.1,
            maxiter: 500,
            epsilon: 0.01,
            elite_count: 1,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::Parameter("ga.pop_size must be at least 2".into()));
        }
        if self.elite_count >= self.pop_size {
            return Err(Error::Parameter("ga.elite_count must be below ga.pop_size".into()));
        }
        check_unit_closed("ga.p_crossover", self.p_crossover)?;
        check_unit_closed("ga.p_mutation", self.p_mutation)?;
        check_positive("ga.epsilon", self.epsilon)
    }
}

/// A partition scored by its fitness `B/I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome<T> {
    pub genes: Partition,
    pub fitness: f64,
    pub w: T,
}

impl<T: Scalar> Chromosome<T> {
    pub fn new(genes: Partition, problem: &Problem<'_, T>) -> Result<Self> {
        let w = within_inertia(&genes, problem);
        let fitness = fitness_from_w(w, problem)?;
        Ok(Self { genes, fitness, w })
    }
}

pub(crate) fn fitness_from_w<T: Scalar>(w: T, problem: &Problem<'_, T>) -> Result<f64> {
    let total = problem.total_inertia();
    if total == T::zero() {
        return Err(Error::Degenerate("total inertia is zero (all rows identical)".into()));
    }
    Ok((total - w).as_f64() / total.as_f64())
}

/// `f(P) = B(P) / I`.
pub fn fitness<T: Scalar>(p: &Partition, problem: &Problem<'_, T>) -> Result<f64> {
    fitness_from_w(within_inertia(p, problem), problem)
}

/// Two distinct individuals drawn uniformly; the fitter one (first drawn on
/// ties) is returned first as the dominant parent.
pub fn select_parents<'p, T, R: Rng + ?Sized>(
    pop: &'p [Chromosome<T>],
    rng: &mut R,
) -> Result<(&'p Chromosome<T>, &'p Chromosome<T>)> {
    if pop.len() < 2 {
        return Err(Error::Precondition("need at least two individuals".into()));
    }
    let a = rng.random_range(0..pop.len());
    let mut b = rng.random_range(0..pop.len() - 1);
    if b >= a {
        b += 1;
    }
    let (first, second) = (&pop[a], &pop[b]);
    Ok(if second.fitness > first.fitness { (second, first) } else { (first, second) })
}

/// Moves one uniformly chosen member of the largest class into every empty
/// class.
fn repair_from_largest<R: Rng + ?Sized>(genes: &mut [usize], k: usize, rng: &mut R) {
    let mut sizes = vec![0usize; k];
    for &c in genes.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let largest = (0..k).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
        let members: Vec<usize> = (0..genes.len()).filter(|&i| genes[i] == largest).collect();
        let i = members[rng.random_range(0..members.len())];
        genes[i] = empty;
        sizes[largest] -= 1;
        sizes[empty] += 1;
    }
}

/// Copies one uniformly chosen class of `dominant` into `other`.
pub fn crossover<T: Scalar, R: Rng + ?Sized>(
    dominant: &Chromosome<T>,
    other: &Chromosome<T>,
    problem: &Problem<'_, T>,
    rng: &mut R,
) -> Result<Chromosome<T>> {
    let k = dominant.genes.k();
    let class = rng.random_range(0..k);
    let mut genes = other.genes.assign().to_vec();
    for (g, &d) in genes.iter_mut().zip(dominant.genes.assign()) {
        if d == class {
            *g = class;
        }
    }
    repair_from_largest(&mut genes, k, rng);
    Chromosome::new(Partition::new(genes, k)?, problem)
}

/// Transfers one object to another class, uniformly over legal transfers.
pub fn mutate<T: Scalar, R: Rng + ?Sized>(
    c: &Chromosome<T>,
    problem: &Problem<'_, T>,
    rng: &mut R,
) -> Result<Chromosome<T>> {
    let m = random_move(&c.genes, rng)?;
    Chromosome::new(c.genes.apply_move(m)?, problem)
}

/// Index drawn with probability proportional to fitness (uniform if all
/// fitnesses are zero).
pub fn roulette_select<T, R: Rng + ?Sized>(pop: &[Chromosome<T>], rng: &mut R) -> usize {
    let total: f64 = pop.iter().map(|c| c.fitness).sum();
    if total <= 0.0 {
        return rng.random_range(0..pop.len());
    }
    let mut target = rng.random::<f64>() * total;
    for (i, c) in pop.iter().enumerate() {
        target -= c.fitness;
        if target < 0.0 {
            return i;
        }
    }
    pop.len() - 1
}

fn fitness_variance<T>(pop: &[Chromosome<T>]) -> f64 {
    let n = pop.len() as f64;
    let mean = pop.iter().map(|c| c.fitness).sum::<f64>() / n;
    pop.iter().map(|c| (c.fitness - mean).powi(2)).sum::<f64>() / n
}

/// Genetic algorithm with elitism and fitness-proportional survival.
///
/// Each generation keeps the `elite_count` fittest chromosomes verbatim and
/// fills the rest by roulette; every roulette survivor is replaced by a
/// crossover child with probability `p_crossover` and then mutated with
/// probability `p_mutation`. The run stops when the fitness variance falls
/// below `epsilon` or after `maxiter` generations.
pub fn genetic_algorithm<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    params: &GaParams,
    seed: u64,
) -> Result<RunResult<T>> {
    params.validate()?;
    check_class_count(problem.n(), k)?;
    let mut rng = seeded_rng(seed);
    let mut pop = (0..params.pop_size)
        .map(|_| Chromosome::new(Partition::random(problem.n(), k, &mut rng)?, problem))
        .collect::<Result<Vec<_>>>()?;
    run_generations(problem, params, seed, &mut pop, &mut rng)
}

pub(crate) fn run_generations<T: Scalar, R: Rng + ?Sized>(
    problem: &Problem<'_, T>,
    params: &GaParams,
    seed: u64,
    pop: &mut Vec<Chromosome<T>>,
    rng: &mut R,
) -> Result<RunResult<T>> {
    let fittest = |pop: &[Chromosome<T>]| {
        pop.iter().min_by(|a, b| a.w.partial_cmp(&b.w).expect("comparable W")).cloned().unwrap()
    };
    let mut best = fittest(pop);
    let mut trajectory = vec![best.w];
    let mut generations = 0;
    while generations < params.maxiter && fitness_variance(pop) >= params.epsilon {
        generations += 1;
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order
            .sort_by(|&a, &b| pop[b].fitness.partial_cmp(&pop[a].fitness).expect("finite fitness"));
        let mut next: Vec<Chromosome<T>> =
            order[..params.elite_count].iter().map(|&i| pop[i].clone()).collect();
        let pool: Vec<Chromosome<T>> = (0..pop.len() - params.elite_count)
            .map(|_| pop[roulette_select(pop, rng)].clone())
            .collect();
        let mates: &[Chromosome<T>] = if pool.len() >= 2 { &pool } else { pop };
        for survivor in &pool {
            let mut child = if rng.random::<f64>() < params.p_crossover {
                let (dominant, other) = select_parents(mates, rng)?;
                crossover(dominant, other, problem, rng)?
            } else {
                survivor.clone()
            };
            if rng.random::<f64>() < params.p_mutation {
                child = mutate(&child, problem, rng)?;
            }
            next.push(child);
        }
        *pop = next;
        let gen_best = fittest(pop);
        if gen_best.w < best.w {
            best = gen_best;
        }
        trajectory.push(best.w);
    }
    Ok(RunResult {
        best_partition: best.genes,
        best_w: best.w,
        trajectory: Some(trajectory),
        iterations: generations,
        seed,
        escapes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{between_inertia, CriterionKind};
    use crate::dataset::BinaryDataset;
    use crate::dissimilarity::{DissimilarityKind, DissimilarityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn toy() -> BinaryDataset {
        BinaryDataset::from_rows(&[
            vec![1u8, 1, 0, 0],
            vec![1, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 0],
            vec![0, 0, 0, 1],
        ])
        .unwrap()
    }

    fn fake(fit: f64) -> Chromosome<i64> {
        Chromosome { genes: Partition::new(vec![0, 1, 1], 2).unwrap(), fitness: fit, w: 0 }
    }

    #[test]
    fn fitness_examples() {
        let data = toy();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let one = Partition::new(vec![0; 6], 1).unwrap();
        assert_eq!(fitness(&one, &prob).unwrap(), 0.0);
        let p = Partition::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        let f = fitness(&p, &prob).unwrap();
        let expected = between_inertia(&p, &prob) as f64 / prob.total_inertia() as f64;
        assert!((f - expected).abs() < 1e-12);

        let blocks =
            BinaryDataset::from_rows(&[vec![1u8, 0], vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&blocks, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&blocks, &d, CriterionKind::L1Median).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(fitness(&p, &prob).unwrap(), 1.0);

        let same = BinaryDataset::from_rows(&vec![vec![1u8, 0]; 3]).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&same, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&same, &d, CriterionKind::L1Median).unwrap();
        assert!(matches!(
            fitness(&Partition::new(vec![0, 0, 1], 2).unwrap(), &prob),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn parent_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = vec![fake(0.9), fake(0.2)];
        for _ in 0..20 {
            let (dom, other) = select_parents(&pop, &mut rng).unwrap();
            assert_eq!((dom.fitness, other.fitness), (0.9, 0.2));
        }
        assert!(select_parents(&pop[..1], &mut rng).is_err());

        // equal fitness: first drawn wins, and all ordered pairs are equally likely
        let pop: Vec<_> = (0..4)
            .map(|i| Chromosome {
                genes: Partition::new(vec![0, 1, i % 2], 2).unwrap(),
                fitness: 0.5,
                w: i as i64,
            })
            .collect();
        let mut counts: HashMap<(i64, i64), usize> = HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            let (a, b) = select_parents(&pop, &mut rng).unwrap();
            assert_ne!(a.w, b.w);
            *counts.entry((a.w.min(b.w), a.w.max(b.w))).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for &c in counts.values() {
            let rel = c as f64 / (draws as f64 / 6.0);
            assert!((rel - 1.0).abs() < 0.05, "{rel}");
        }
    }

    #[test]
    fn crossover_copy_rule_by_hand() {
        let data = toy();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let dom =
            Chromosome::new(Partition::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap(), &prob).unwrap();
        let other =
            Chromosome::new(Partition::new(vec![2, 1, 0, 0, 1, 2], 3).unwrap(), &prob).unwrap();
        // copying class c of dom onto other, by hand
        let expected = [
            vec![0, 0, 0, 0, 1, 2], // c = 0
            vec![2, 1, 1, 1, 1, 2], // c = 1, class 0 emptied -> repaired
            vec![2, 1, 0, 0, 2, 2], // c = 2
        ];
        let mut seen = [false; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let son = crossover(&dom, &other, &prob, &mut rng).unwrap();
            let genes = son.genes.assign();
            if genes == expected[0].as_slice() {
                seen[0] = true;
            } else if genes == expected[2].as_slice() {
                seen[2] = true;
            } else {
                // c = 1 empties class 0; one member of the largest class (1) moves there
                let diff: Vec<usize> = (0..6).filter(|&i| genes[i] != expected[1][i]).collect();
                assert_eq!(diff.len(), 1);
                assert_eq!(expected[1][diff[0]], 1);
                assert_eq!(genes[diff[0]], 0);
                seen[1] = true;
            }
            assert!(son.genes.sizes().iter().all(|&s| s > 0));
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn crossover_with_itself_is_identity() {
        let data = toy();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::L1Median).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Chromosome::new(Partition::random(6, 3, &mut rng).unwrap(), &prob).unwrap();
        for _ in 0..20 {
            assert_eq!(crossover(&c, &c, &prob, &mut rng).unwrap(), c);
        }
    }

    #[test]
    fn crossover_of_whole_class_triggers_repair() {
        let data = toy();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::L1Median).unwrap();
        let mut dom_genes = vec![0usize; 6];
        dom_genes[5] = 1;
        let dom = Chromosome { genes: Partition::new(dom_genes, 2).unwrap(), fitness: 1.0, w: 0 };
        let other =
            Chromosome::new(Partition::new(vec![1, 0, 1, 0, 1, 0], 2).unwrap(), &prob).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let son = crossover(&dom, &other, &prob, &mut rng).unwrap();
            assert_eq!(son.genes.sizes().iter().sum::<usize>(), 6);
            assert!(son.genes.sizes().iter().all(|&s| s > 0));
        }
    }

    #[test]
    fn mutation_changes_one_legal_gene() {
        let data = BinaryDataset::from_rows(&[vec![1u8, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let c = Chromosome::new(Partition::new(vec![0, 1, 1], 2).unwrap(), &prob).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut moved = HashMap::new();
        for _ in 0..10_000 {
            let m = mutate(&c, &prob, &mut rng).unwrap();
            let diff: Vec<usize> =
                (0..3).filter(|&i| m.genes.class_of(i) != c.genes.class_of(i)).collect();
            assert_eq!(diff.len(), 1);
            assert_ne!(diff[0], 0, "singleton source must not move");
            *moved.entry(diff[0]).or_insert(0usize) += 1;
        }
        let rel = moved[&1] as f64 / moved[&2] as f64;
        assert!((rel - 1.0).abs() < 0.1);
    }

    #[test]
    fn roulette_frequencies_follow_fitness() {
        let pop = vec![fake(0.1), fake(0.3), fake(0.6)];
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut counts = [0usize; 3];
        let draws = 100_000;
        for _ in 0..draws {
            counts[roulette_select(&pop, &mut rng)] += 1;
        }
        for (c, f) in counts.iter().zip([0.1, 0.3, 0.6]) {
            assert!((*c as f64 / draws as f64 - f).abs() < 0.01);
        }
    }

    #[test]
    fn identical_population_stops_immediately() {
        let data = toy();
        let d = DissimilarityMatrix::<i64>::compute(&data, DissimilarityKind::L1).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let c = Chromosome::new(Partition::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap(), &prob).unwrap();
        let mut pop = vec![c.clone(); 5];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let res = run_generations(&prob, &GaParams::default(), 0, &mut pop, &mut rng).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.best_w, c.w);
    }

    #[test]
    fn best_ever_is_monotone_and_exact() {
        let data = toy();
        let d = DissimilarityMatrix::<f64>::compute(&data, DissimilarityKind::Jaccard).unwrap();
        let prob = Problem::new(&data, &d, CriterionKind::SumPairwise).unwrap();
        let params = GaParams { epsilon: 1e-12, maxiter: 100, ..GaParams::default() };
        let res = genetic_algorithm(&prob, 2, &params, 8).unwrap();
        let traj = res.trajectory.clone().unwrap();
        assert!(traj.windows(2).all(|w| w[1] <= w[0]));
        assert!(within_inertia(&res.best_partition, &prob).approx_eq(res.best_w));
        assert_eq!(res, genetic_algorithm(&prob, 2, &params, 8).unwrap());
    }
}
