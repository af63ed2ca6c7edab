use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::criteria::{Problem, SearchState};
use crate::error::{Error, Result};
use crate::neighborhood::{neighborhood_size, sample_moves};
use crate::partition::{Move, Partition};
use crate::run::{initial_partition, seeded_rng, Best, RunResult, RunRng};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TsParams {
    /// Number of stored codes, `|T|`. Zero disables the tabu rule.
    pub tabu_len: usize,
    pub maxiter: usize,
    /// Fraction of `N(P)` sampled at each iteration.
    pub sample_fraction: f64,
}

impl Default for TsParams {
    fn default() -> Self {
        Self { tabu_len: 5, maxiter: 150, sample_fraction: 0.1 }
    }
}

impl TsParams {
    pub fn validate(&self) -> Result<()> {
        if self.maxiter == 0 {
            return Err(Error::Parameter("ts.maxiter must be positive".into()));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(Error::Parameter(format!(
                "ts.sample_fraction must lie in (0, 1], got {}",
                self.sample_fraction
            )));
        }
        Ok(())
    }
}

/// Membership indicator of a set of objects, as a packed bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemberMask(Vec<u64>);

impl MemberMask {
    pub fn empty(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }

    pub fn from_members(n: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = Self::empty(n);
        for i in members {
            mask.insert(i);
        }
        mask
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether `self` equals `other` with object `i` toggled.
    #[inline]
    fn equals_toggled(&self, other: &Self, i: usize) -> bool {
        let (word, bit) = (i / 64, 1u64 << (i % 64));
        self.0.iter().zip(&other.0).enumerate().all(
            |(w, (a, b))| {
                if w == word {
                    *a == b ^ bit
                } else {
                    a == b
                }
            },
        )
    }
}

/// FIFO of at most `capacity` forbidden groupings.
#[derive(Debug, Clone)]
pub struct TabuList {
    entries: VecDeque<MemberMask>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        Self { entries: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn push(&mut self, code: MemberMask) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(code);
    }

    pub fn contains(&self, mask: &MemberMask) -> bool {
        self.entries.iter().any(|e| e == mask)
    }

    fn contains_toggled(&self, mask: &MemberMask, i: usize) -> bool {
        self.entries.iter().any(|e| e.equals_toggled(mask, i))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Code stored for an executed move: the members of its source class before
/// the transfer.
pub fn tabu_code(p: &Partition, m: &Move) -> MemberMask {
    MemberMask::from_members(p.n(), p.members(m.from_class))
}

struct ClassMasks {
    masks: Vec<MemberMask>,
}

impl ClassMasks {
    fn new(p: &Partition) -> Self {
        Self {
            masks: p.classes().into_iter().map(|c| MemberMask::from_members(p.n(), c)).collect(),
        }
    }

    fn apply(&mut self, m: &Move) {
        self.masks[m.from_class].remove(m.object);
        self.masks[m.to_class].insert(m.object);
    }

    /// Whether the partition reached by `m` contains a stored grouping.
    fn is_tabu(&self, m: &Move, tabu: &TabuList, current_flags: &[bool]) -> bool {
        current_flags.iter().enumerate().any(|(c, &f)| f && c != m.from_class && c != m.to_class)
            || tabu.contains_toggled(&self.masks[m.from_class], m.object)
            || tabu.contains_toggled(&self.masks[m.to_class], m.object)
    }
}

/// Lowest `dW`, ties to lowest object then lowest target class.
fn best_candidate<T: Scalar>(candidates: &[(Move, T)]) -> Option<(Move, T)> {
    let mut best: Option<(Move, T)> = None;
    for &(m, dw) in candidates {
        let better = match best {
            None => true,
            Some((bm, bdw)) => {
                dw < bdw || (dw == bdw && (m.object, m.to_class) < (bm.object, bm.to_class))
            }
        };
        if better {
            best = Some((m, dw));
        }
    }
    best
}

/// Tabu search: each iteration moves to the best sampled neighbor that does
/// not recreate a stored grouping, even when it worsens `W`.
///
/// If every sampled move is tabu the neighborhood is resampled once; if that
/// also fails the best sampled move is executed anyway (an escape, counted in
/// [`RunResult::escapes`]).
pub fn tabu_search<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    params: &TsParams,
    seed: u64,
    start: Option<&Partition>,
) -> Result<RunResult<T>> {
    params.validate()?;
    let mut rng = seeded_rng(seed);
    let p0 = initial_partition(problem, k, start, &mut rng)?;
    let mut masks = ClassMasks::new(&p0);
    let mut state = SearchState::new(p0, problem);
    let mut best = Best::new(&state);
    let mut tabu = TabuList::new(params.tabu_len);
    let mut escapes = 0;

    let evaluate = |state: &SearchState<T>, rng: &mut RunRng| -> Vec<(Move, T)> {
        let count = (params.sample_fraction * neighborhood_size(state.partition()) as f64).ceil();
        sample_moves(state.partition(), (count as usize).max(1), rng)
            .into_iter()
            .map(|m| (m, state.stats().delta_unchecked(problem, &m)))
            .collect()
    };

    for iter in 0..params.maxiter {
        let flags: Vec<bool> = masks.masks.iter().map(|mask| tabu.contains(mask)).collect();
        let mut chosen = None;
        let mut last = Vec::new();
        for _attempt in 0..2 {
            let candidates = evaluate(&state, &mut rng);
            let allowed: Vec<(Move, T)> = candidates
                .iter()
                .copied()
                .filter(|(m, _)| !masks.is_tabu(m, &tabu, &flags))
                .collect();
            if let Some(c) = best_candidate(&allowed) {
                chosen = Some(c);
                break;
            }
            last = candidates;
        }
        let (m, _) = match chosen {
            Some(c) => c,
            None => {
                escapes += 1;
                log::debug!("ts seed {seed}: escape at iteration {iter}");
                best_candidate(&last)
                    .ok_or_else(|| Error::Precondition("partition has no legal move".into()))?
            }
        };
        tabu.push(masks.masks[m.from_class].clone());
        state.apply(problem, &m)?;
        masks.apply(&m);
        best.offer(&state);
        best.mark();
    }
    Ok(best.finish(params.maxiter, seed, escapes))
}
