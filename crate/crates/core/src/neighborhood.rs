//! Single-transfer neighborhoods of a partition.
//!
//! A move is legal when it changes the object's class and does not empty the
//! class it leaves, so `|N(P)| = (n - s) (K - 1)` where `s` counts singleton
//! classes.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::partition::{Move, Partition};

/// The legal moves of one partition, in object-then-target order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodView {
    pub moves: Vec<Move>,
    pub source_partition_fingerprint: u64,
}

/// Closed-form `|N(P)|`.
pub fn neighborhood_size(p: &Partition) -> usize {
    let singletons = p.sizes().iter().filter(|&&s| s == 1).count();
    (p.n() - singletons) * (p.k() - 1)
}

fn legal_moves(p: &Partition, sizes: &[usize]) -> Vec<Move> {
    let k = p.k();
    let mut moves = Vec::with_capacity(p.n() * (k - 1));
    for (i, &c) in p.assign().iter().enumerate() {
        if sizes[c] < 2 {
            continue;
        }
        moves.extend((0..k).filter(|&t| t != c).map(|t| Move::new(i, c, t)));
    }
    moves
}

pub fn enumerate_moves(p: &Partition) -> NeighborhoodView {
    NeighborhoodView {
        moves: legal_moves(p, &p.sizes()),
        source_partition_fingerprint: p.fingerprint(),
    }
}

/// Up to `count` distinct legal moves drawn uniformly without replacement,
/// returned in enumeration order.
pub fn sample_moves<R: Rng + ?Sized>(p: &Partition, count: usize, rng: &mut R) -> Vec<Move> {
    let all = legal_moves(p, &p.sizes());
    if count >= all.len() {
        return all;
    }
    let mut picked = index::sample(rng, all.len(), count).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|ix| all[ix]).collect()
}

/// One legal move, uniform over `N(P)`.
pub fn random_move<R: Rng + ?Sized>(p: &Partition, rng: &mut R) -> Result<Move> {
    random_move_with_sizes(p, &p.sizes(), rng)
}

/// [`random_move`] with class sizes supplied by the caller.
pub(crate) fn random_move_with_sizes<R: Rng + ?Sized>(
    p: &Partition,
    sizes: &[usize],
    rng: &mut R,
) -> Result<Move> {
    let (n, k) = (p.n(), p.k());
    if k < 2 || sizes.iter().all(|&s| s < 2) {
        return Err(Error::Precondition("partition has no legal move".into()));
    }
    // every legal source object has the same k - 1 targets, so rejecting
    // singleton sources keeps the draw uniform over moves
    loop {
        let i = rng.random_range(0..n);
        let from = p.class_of(i);
        if sizes[from] < 2 {
            continue;
        }
        let mut to = rng.random_range(0..k - 1);
        if to >= from {
            to += 1;
        }
        return Ok(Move::new(i, from, to));
    }
}
