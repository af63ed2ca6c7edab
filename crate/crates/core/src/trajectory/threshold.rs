use serde::{Deserialize, Serialize};

use crate::criteria::{Problem, SearchState};
use crate::error::{Error, Result};
use crate::neighborhood::random_move_with_sizes;
use crate::partition::Partition;
use crate::run::{check_positive, check_unit_open, initial_partition, seeded_rng, Best, RunResult};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaParams {
    /// Initial threshold, in units of `W`.
    pub th0: f64,
    pub gamma: f64,
    /// Moves attempted per threshold level.
    pub maxiter: usize,
    /// The run stops once the threshold drops below `epsilon * th0`.
    pub epsilon: f64,
}

impl Default for TaParams {
    fn default() -> Self {
        Self { th0: 100.0, gamma: 0.9, maxiter: 50, epsilon: 0.01 }
    }
}

impl TaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.th0 >= 0.0) {
            return Err(Error::Parameter(format!("ta.th0 must be >= 0, got {}", self.th0)));
        }
        check_unit_open("ta.gamma", self.gamma)?;
        check_positive("ta.maxiter", self.maxiter as f64)?;
        check_positive("ta.epsilon", self.epsilon)
    }
}

/// Threshold accepting: a move is taken iff `dW < Th`, a deterministic rule.
/// The threshold shrinks by `gamma` after every block of `maxiter` moves; the
/// run ends when it falls below `epsilon * th0` or a block accepts nothing.
pub fn threshold_accepting<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    params: &TaParams,
    seed: u64,
    start: Option<&Partition>,
) -> Result<RunResult<T>> {
    params.validate()?;
    let mut rng = seeded_rng(seed);
    let p0 = initial_partition(problem, k, start, &mut rng)?;
    let mut state = SearchState::new(p0, problem);
    let mut best = Best::new(&state);
    let mut threshold = params.th0;
    let mut levels = 0;
    loop {
        levels += 1;
        let mut accepted = 0usize;
        for _ in 0..params.maxiter {
            let m = random_move_with_sizes(state.partition(), state.stats().sizes(), &mut rng)?;
            let dw = state.stats().delta_unchecked(problem, &m);
            if dw.as_f64() < threshold {
                state.apply(problem, &m)?;
                accepted += 1;
                best.offer(&state);
            }
        }
        best.mark();
        threshold *= params.gamma;
        if accepted == 0 || threshold < params.epsilon * params.th0 {
            break;
        }
    }
    Ok(best.finish(levels, seed, 0))
}
