use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{Problem, SearchState};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::{check_class_count, Move, Partition};
use crate::population::genetic::fitness_from_w;
use crate::run::{check_positive, check_unit_open, seeded_rng, Best, RunResult};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcParams {
    /// Pheromone exponent.
    pub alpha: f64,
    /// Visibility exponent.
    pub beta: f64,
    /// Evaporation rate.
    pub rho: f64,
    pub n_ants: usize,
    pub maxiter: usize,
    /// Minimum best-fitness gain over `stagnation_window` iterations.
    pub epsilon: f64,
    pub stagnation_window: usize,
    pub tau0: f64,
    /// Dissimilarities below this are clamped before inversion.
    pub visibility_floor: f64,
}

impl Default for AcParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.2,
            rho: 0.5,
            n_ants: 10,
            maxiter: 500,
            epsilon: 0.01,
            stagnation_window: 50,
            tau0: 1.0,
            visibility_floor: 1e-6,
        }
    }
}

impl AcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(Error::Parameter("ac.alpha and ac.beta must be >= 0".into()));
        }
        check_unit_open("ac.rho", self.rho)?;
        check_positive("ac.n_ants", self.n_ants as f64)?;
        check_positive("ac.epsilon", self.epsilon)?;
        check_positive("ac.stagnation_window", self.stagnation_window as f64)?;
        check_positive("ac.tau0", self.tau0)?;
        check_positive("ac.visibility_floor", self.visibility_floor)
    }
}

/// Pairwise pheromone `tau` and fixed visibility `eta = 1 / max(d, floor)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    n: usize,
    tau: Vec<f64>,
    eta: Vec<f64>,
}

impl PheromoneState {
    pub fn new<T: Scalar>(d: &DissimilarityMatrix<T>, params: &AcParams) -> Self {
        let n = d.n();
        let eta = (0..n * n)
            .map(|ix| 1.0 / d.get(ix / n, ix % n).as_f64().max(params.visibility_floor))
            .collect();
        Self { n, tau: vec![params.tau0; n * n], eta }
    }

    /// Builds a state from explicit tables (row-major `n x n`).
    pub fn from_tables(n: usize, tau: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if tau.len() != n * n || eta.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: tau.len().min(eta.len()) });
        }
        if tau.iter().chain(&eta).any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidData("tau and eta must be strictly positive".into()));
        }
        Ok(Self { n, tau, eta })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    #[inline]
    pub fn eta(&self, i: usize, j: usize) -> f64 {
        self.eta[i * self.n + j]
    }

    #[inline]
    fn weight(&self, i: usize, j: usize, params: &AcParams) -> f64 {
        self.tau(i, j).powf(params.alpha) * self.eta(i, j).powf(params.beta)
    }

    /// Evaporates all trails and deposits `rho * fitness` for every ant that
    /// places the pair in the same class.
    fn deposit(&mut self, ants: &[(&Partition, f64)], rho: f64) {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let deposit: f64 = ants
                    .iter()
                    .filter(|(p, _)| p.class_of(i) == p.class_of(j))
                    .map(|(_, f)| *f)
                    .sum();
                let v = (1.0 - rho) * self.tau[i * n + j] + rho * deposit;
                self.tau[i * n + j] = v;
                self.tau[j * n + i] = v;
            }
        }
    }
}

/// Probability of choosing anchor `i` when transferring object `target`:
/// `w(i, target) / sum_{l != target} w(l, target)` with
/// `w = tau^alpha * eta^beta`.
pub fn transfer_probability(
    i: usize,
    target: usize,
    state: &PheromoneState,
    params: &AcParams,
) -> Result<f64> {
    if i == target || i >= state.n || target >= state.n {
        return Err(Error::Precondition(format!("invalid pair ({i}, {target})")));
    }
    let denom: f64 =
        (0..state.n).filter(|&l| l != target).map(|l| state.weight(l, target, params)).sum();
    Ok(state.weight(i, target, params) / denom)
}

/// One evaporation/deposit step, with each ant depositing its fitness `B/I`.
pub fn pheromone_update<T: Scalar>(
    state: &mut PheromoneState,
    ants: &[Partition],
    problem: &Problem<'_, T>,
    params: &AcParams,
) -> Result<()> {
    let scored = ants
        .iter()
        .map(|p| Ok((p, crate::population::fitness(p, problem)?)))
        .collect::<Result<Vec<_>>>()?;
    state.deposit(&scored, params.rho);
    Ok(())
}

fn weight_table(state: &PheromoneState, params: &AcParams) -> Vec<f64> {
    let n = state.n;
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = state.weight(i, j, params);
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    w
}

/// Ant colony clustering.
///
/// Every iteration each ant performs `n` reassignment steps: pick an object
/// uniformly, pick an anchor with the transfer probabilities above, and move
/// the object into the anchor's class unless that would empty its own class.
/// Pheromone is then updated from all ants. The run stops after `maxiter`
/// iterations or when the best fitness gains less than `epsilon` over
/// `stagnation_window` iterations.
pub fn ant_colony<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    params: &AcParams,
    seed: u64,
) -> Result<RunResult<T>> {
    params.validate()?;
    check_class_count(problem.n(), k)?;
    let n = problem.n();
    let mut rng = seeded_rng(seed);
    let mut ants = (0..params.n_ants)
        .map(|_| Ok(SearchState::new(Partition::random(n, k, &mut rng)?, problem)))
        .collect::<Result<Vec<_>>>()?;
    let mut pheromone = PheromoneState::new(problem.dissim(), params);
    let mut weights = weight_table(&pheromone, params);

    let first = ants
        .iter()
        .min_by(|a, b| a.w().partial_cmp(&b.w()).expect("comparable W"))
        .expect("at least one ant");
    let mut best = Best::new(first);
    let mut history = vec![fitness_from_w(best.w, problem)?];
    let mut iterations = 0;
    while iterations < params.maxiter {
        iterations += 1;
        for ant in ants.iter_mut() {
            for _ in 0..n {
                let target = rng.random_range(0..n);
                let row = &weights[target * n..(target + 1) * n];
                let total: f64 = row.iter().sum();
                let mut pick = rng.random::<f64>() * total;
                let mut anchor = if target == n - 1 { n - 2 } else { n - 1 };
                for (l, &w) in row.iter().enumerate() {
                    if l == target {
                        continue;
                    }
                    pick -= w;
                    if pick < 0.0 {
                        anchor = l;
                        break;
                    }
                }
                let from = ant.partition().class_of(target);
                let to = ant.partition().class_of(anchor);
                if from == to || ant.stats().sizes()[from] < 2 {
                    continue;
                }
                ant.apply(problem, &Move::new(target, from, to))?;
                best.offer(ant);
            }
        }
        let scored = ants
            .iter()
            .map(|a| Ok((a.partition(), fitness_from_w(a.w(), problem)?)))
            .collect::<Result<Vec<_>>>()?;
        pheromone.deposit(&scored, params.rho);
        weights = weight_table(&pheromone, params);

        best.mark();
        history.push(fitness_from_w(best.w, problem)?);
        let t = history.len() - 1;
        if t >= params.stagnation_window
            && history[t] - history[t - params.stagnation_window] < params.epsilon
        {
            break;
        }
    }
    Ok(best.finish(iterations, seed, 0))
}
