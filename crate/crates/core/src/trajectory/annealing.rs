use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{Problem, SearchState};
use crate::error::Result;
use crate::neighborhood::random_move_with_sizes;
use crate::partition::Partition;
use crate::run::{check_positive, check_unit_open, initial_partition, seeded_rng, Best, RunResult};
use crate::scalar::Scalar;

/// Temperature returned when calibration sees no worsening move.
pub const FLOOR_TEMPERATURE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    /// Target acceptance rate of worsening moves at the initial temperature.
    pub chi0: f64,
    /// Moves attempted per temperature level.
    pub chain_length: usize,
    /// Cooling factor, `c <- gamma * c`.
    pub gamma: f64,
    /// A chain accepting fewer than this fraction of its moves freezes the run.
    pub epsilon: f64,
    pub max_chains: usize,
    /// Random moves sampled to calibrate the initial temperature.
    pub calibration_samples: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            chi0: 0.95,
            chain_length: 50,
            gamma: 0.91,
            epsilon: 0.01,
            max_chains: 1000,
            calibration_samples: 100,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        check_unit_open("sa.chi0", self.chi0)?;
        check_unit_open("sa.gamma", self.gamma)?;
        check_positive("sa.epsilon", self.epsilon)?;
        check_positive("sa.chain_length", self.chain_length as f64)?;
        check_positive("sa.max_chains", self.max_chains as f64)?;
        check_positive("sa.calibration_samples", self.calibration_samples as f64)
    }
}

/// Metropolis rule: improvements always pass, a worsening `delta_w` passes
/// with probability `exp(-delta_w / temperature)`.
#[inline]
pub fn metropolis_accept<R: Rng + ?Sized>(delta_w: f64, temperature: f64, rng: &mut R) -> bool {
    if delta_w < 0.0 {
        return true;
    }
    rng.random::<f64>() < (-delta_w / temperature).exp()
}

/// Initial temperature at which worsening moves sampled around `p0` are
/// accepted with mean probability `chi0`.
///
/// Solves `mean(exp(-dW / c)) = chi0` over the sampled worsening deltas by
/// bisection. When no sampled move worsens `W`, returns [`FLOOR_TEMPERATURE`].
pub fn calibrate_initial_temperature<T: Scalar, R: Rng + ?Sized>(
    p0: &Partition,
    chi0: f64,
    sample_size: usize,
    problem: &Problem<'_, T>,
    rng: &mut R,
) -> Result<f64> {
    check_unit_open("chi0", chi0)?;
    check_positive("sample_size", sample_size as f64)?;
    let state = SearchState::new(p0.clone(), problem);
    let sizes = state.stats().sizes().to_vec();
    let mut worsening = Vec::new();
    for _ in 0..sample_size {
        let m = random_move_with_sizes(p0, &sizes, rng)?;
        let dw = state.delta(problem, &m)?.as_f64();
        if dw > 0.0 {
            worsening.push(dw);
        }
    }
    Ok(solve_temperature(&worsening, chi0))
}

pub(crate) fn solve_temperature(worsening: &[f64], chi0: f64) -> f64 {
    if worsening.is_empty() {
        return FLOOR_TEMPERATURE;
    }
    let scale = (1.0 / chi0).ln();
    let min = worsening.iter().copied().fold(f64::INFINITY, f64::min);
    let max = worsening.iter().copied().fold(0.0, f64::max);
    // every term is <= chi0 at lo and >= chi0 at hi
    let (mut lo, mut hi) = (min / scale, max / scale);
    let rate =
        |c: f64| worsening.iter().map(|&d| (-d / c).exp()).sum::<f64>() / worsening.len() as f64;
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if rate(mid) < chi0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Simulated annealing over single transfers with geometric cooling.
///
/// Each temperature level runs a chain of `chain_length` random moves; the
/// run freezes once a chain accepts fewer than `epsilon * chain_length`
/// moves or after `max_chains` levels.
pub fn simulated_annealing<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    params: &SaParams,
    seed: u64,
    start: Option<&Partition>,
) -> Result<RunResult<T>> {
    params.validate()?;
    let mut rng = seeded_rng(seed);
    let p0 = initial_partition(problem, k, start, &mut rng)?;
    let mut temperature = calibrate_initial_temperature(
        &p0,
        params.chi0,
        params.calibration_samples,
        problem,
        &mut rng,
    )?;
    let mut state = SearchState::new(p0, problem);
    let mut best = Best::new(&state);
    let mut chains = 0;
    while chains < params.max_chains {
        chains += 1;
        let mut accepted = 0usize;
        for _ in 0..params.chain_length {
            let m = random_move_with_sizes(state.partition(), state.stats().sizes(), &mut rng)?;
            let dw = state.stats().delta_unchecked(problem, &m);
            if metropolis_accept(dw.as_f64(), temperature, &mut rng) {
                state.apply(problem, &m)?;
                accepted += 1;
                best.offer(&state);
            }
        }
        best.mark();
        if (accepted as f64) < params.epsilon * params.chain_length as f64 {
            break;
        }
        temperature *= params.gamma;
    }
    log::debug!("sa seed {seed}: {chains} chains, best W {}", best.w);
    Ok(best.finish(chains, seed, 0))
}
