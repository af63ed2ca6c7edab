//! Partitions of the object set and single-object transfer moves.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of `n` objects to `k` non-empty classes.
///
/// The assignment vector is the single source of truth; member lists are
/// derived on demand. Structurally `1 <= k <= n` is allowed so that trivial
/// partitions (one class, all singletons) can be represented; optimizers
/// require `2 <= k < n` on their own.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    assign: Vec<usize>,
    k: usize,
}

/// Transfer of `object` from `from_class` to `to_class`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub object: usize,
    pub from_class: usize,
    pub to_class: usize,
}

impl Move {
    pub fn new(object: usize, from_class: usize, to_class: usize) -> Self {
        Self { object, from_class, to_class }
    }

    pub fn inverse(self) -> Self {
        Self { object: self.object, from_class: self.to_class, to_class: self.from_class }
    }
}

/// Checks `2 <= k < n`, the range in which optimizers operate.
pub fn check_class_count(n: usize, k: usize) -> Result<()> {
    if k < 2 || k >= n {
        return Err(Error::Parameter(format!("need 2 <= k < n, got k = {k}, n = {n}")));
    }
    Ok(())
}

impl Partition {
    pub fn new(assign: Vec<usize>, k: usize) -> Result<Self> {
        let n = assign.len();
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let mut sizes = vec![0usize; k];
        for (i, &c) in assign.iter().enumerate() {
            if c >= k {
                return Err(Error::InvalidData(format!("object {i} has class {c} >= k = {k}")));
            }
            sizes[c] += 1;
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidData(format!("class {c} is empty")));
        }
        Ok(Self { assign, k })
    }

    /// Builds a partition from label vectors with arbitrary (possibly sparse)
    /// labels, relabelling classes by order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        let assign: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        let k = map.len();
        Self::new(assign, k)
    }

    /// Uniform random assignment, then each empty class receives an object
    /// taken uniformly from the classes that can spare one.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let mut assign: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        repair(&mut assign, k, rng);
        Self::new(assign, k)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.assign.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    #[inline]
    pub fn class_of(&self, object: usize) -> usize {
        self.assign[object]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assign {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, class: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assign[i] == class).collect()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assign.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Same grouping with classes numbered by order of first member.
    pub fn canonical(&self) -> Self {
        Self::from_labels(&self.assign).expect("valid partition stays valid")
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.assign.hash(&mut h);
        h.finish()
    }

    /// Checks that `m` is a legal transfer in this partition.
    pub fn check_move(&self, m: &Move, class_size: usize) -> Result<()> {
        if m.object >= self.n() || m.to_class >= self.k {
            return Err(Error::Precondition(format!("move {m:?} out of range")));
        }
        if self.assign[m.object] != m.from_class {
            return Err(Error::Consistency(format!(
                "object {} is in class {}, not {}",
                m.object, self.assign[m.object], m.from_class
            )));
        }
        if m.from_class == m.to_class {
            return Err(Error::Precondition(format!("move {m:?} does not change class")));
        }
        if class_size < 2 {
            return Err(Error::Precondition(format!(
                "move {m:?} would empty class {}",
                m.from_class
            )));
        }
        Ok(())
    }

    /// Returns the partition after transferring one object.
    pub fn apply_move(&self, m: Move) -> Result<Self> {
        let mut next = self.clone();
        next.apply_move_in_place(m)?;
        Ok(next)
    }

    pub fn apply_move_in_place(&mut self, m: Move) -> Result<()> {
        let from_size = if m.from_class < self.k {
            self.assign.iter().filter(|&&c| c == m.from_class).count()
        } else {
            0
        };
        self.check_move(&m, from_size)?;
        self.assign[m.object] = m.to_class;
        Ok(())
    }

    /// Reassigns without legality checks; callers track class sizes.
    #[inline]
    pub(crate) fn set_class_unchecked(&mut self, object: usize, class: usize) {
        self.assign[object] = class;
    }
}

/// Seeds every empty class with an object drawn uniformly from classes of
/// size at least two.
pub(crate) fn repair<R: Rng + ?Sized>(assign: &mut [usize], k: usize, rng: &mut R) {
    let mut sizes = vec![0usize; k];
    for &c in assign.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donors: Vec<usize> = (0..assign.len()).filter(|&i| sizes[assign[i]] >= 2).collect();
        let i = donors[rng.random_range(0..donors.len())];
        sizes[assign[i]] -= 1;
        assign[i] = empty;
        sizes[empty] += 1;
    }
}
