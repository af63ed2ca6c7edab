//! Results shared by all optimizers and helpers for seeding runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{Problem, SearchState};
use crate::error::{Error, Result};
use crate::partition::{check_class_count, Partition};
use crate::scalar::Scalar;

/// Random source used by every run; fixed algorithm so seeds reproduce
/// bit-identical runs across platforms.
pub type RunRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult<T> {
    pub best_partition: Partition,
    pub best_w: T,
    /// Best-so-far `W` after each outer iteration (chain, level, generation...).
    pub trajectory: Option<Vec<T>>,
    pub iterations: usize,
    pub seed: u64,
    /// Tabu escapes taken (always 0 for other methods).
    pub escapes: usize,
}

/// Validates `k` and the optional starting partition, drawing a random one
/// when none is given.
pub(crate) fn initial_partition<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    start: Option<&Partition>,
    rng: &mut RunRng,
) -> Result<Partition> {
    check_class_count(problem.n(), k)?;
    match start {
        Some(p) if p.n() != problem.n() || p.k() != k => Err(Error::Parameter(format!(
            "start partition has n = {}, k = {}; expected n = {}, k = {k}",
            p.n(),
            p.k(),
            problem.n()
        ))),
        Some(p) => Ok(p.clone()),
        None => Partition::random(problem.n(), k, rng),
    }
}

/// Best-visited partition tracking.
#[derive(Debug, Clone)]
pub(crate) struct Best<T> {
    pub partition: Partition,
    pub w: T,
    pub trajectory: Vec<T>,
}

impl<T: Scalar> Best<T> {
    pub fn new(state: &SearchState<T>) -> Self {
        Self { partition: state.partition().clone(), w: state.w(), trajectory: Vec::new() }
    }

    #[inline]
    pub fn offer(&mut self, state: &SearchState<T>) {
        if state.w() < self.w {
            self.w = state.w();
            self.partition.clone_from(state.partition());
        }
    }

    pub fn mark(&mut self) {
        self.trajectory.push(self.w);
    }

    pub fn finish(self, iterations: usize, seed: u64, escapes: usize) -> RunResult<T> {
        RunResult {
            best_partition: self.partition,
            best_w: self.w,
            trajectory: Some(self.trajectory),
            iterations,
            seed,
            escapes,
        }
    }
}

pub(crate) fn check_unit_open(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Parameter(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

pub(crate) fn check_unit_closed(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Parameter(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}
