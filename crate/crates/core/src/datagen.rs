//! Planted-partition Bernoulli data: each class draws its coordinates
//! independently with its own probability of a one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::run::seeded_rng;

/// Default number of binary variables for the builtin tables.
pub const DEFAULT_P: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardinalityScheme {
    /// Sizes differ by at most one.
    Equal,
    /// The first class holds half the objects (rounded up); the others split
    /// the rest evenly.
    OneBigHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub cardinality_scheme: CardinalityScheme,
    pub pis: Vec<f64>,
    pub seed: u64,
}

fn split_even(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|c| total / parts + usize::from(c < total % parts)).collect()
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > self.n {
            return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {}", self.k)));
        }
        if self.n < 2 || self.p < 1 {
            return Err(Error::Parameter("need n >= 2 and p >= 1".into()));
        }
        if self.pis.len() != self.k {
            return Err(Error::Dimension { expected: self.k, found: self.pis.len() });
        }
        if let Some(pi) = self.pis.iter().find(|&&pi| !(pi > 0.0 && pi < 1.0)) {
            return Err(Error::Parameter(format!("class probability {pi} outside (0, 1)")));
        }
        if self.cardinality_scheme == CardinalityScheme::OneBigHalf && self.k >= 2 {
            let rest = self.n - self.n.div_ceil(2);
            if rest < self.k - 1 {
                return Err(Error::Parameter("too few objects for the small classes".into()));
            }
        }
        Ok(())
    }

    /// Planted class sizes, summing to `n`.
    pub fn sizes(&self) -> Vec<usize> {
        match self.cardinality_scheme {
            CardinalityScheme::Equal => split_even(self.n, self.k),
            CardinalityScheme::OneBigHalf if self.k == 1 => vec![self.n],
            CardinalityScheme::OneBigHalf => {
                let big = self.n.div_ceil(2);
                let mut sizes = vec![big];
                sizes.extend(split_even(self.n - big, self.k - 1));
                sizes
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedDataset {
    pub dataset: BinaryDataset,
    pub truth: Partition,
    pub spec: GeneratorSpec,
}

/// Draws a dataset for `spec`; objects are ordered by planted class.
pub fn generate(spec: &GeneratorSpec) -> Result<PlantedDataset> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let mut rows = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for (class, (&size, &pi)) in spec.sizes().iter().zip(&spec.pis).enumerate() {
        for _ in 0..size {
            rows.push((0..spec.p).map(|_| u8::from(rng.random_bool(pi))).collect::<Vec<u8>>());
            labels.push(class);
        }
    }
    Ok(PlantedDataset {
        dataset: BinaryDataset::from_rows(&rows)?,
        truth: Partition::new(labels, spec.k)?,
        spec: spec.clone(),
    })
}

const SEPARATED_3: [f64; 3] = [0.1, 0.5, 0.9];
const FUZZY_3: [f64; 3] = [0.3, 0.5, 0.7];
const SEPARATED_5: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];
const FUZZY_5: [f64; 5] = [0.2, 0.35, 0.5, 0.65, 0.8];

/// The 16-table factorial design: `n in {120, 1200}` x `K in {3, 5}` x
/// {equal, one big class} x {separated, fuzzy}, in that nesting order (last
/// factor fastest). Table `t` (1-based) is seeded with `t`.
pub fn builtin_specs(p: usize) -> Vec<GeneratorSpec> {
    let mut specs = Vec::with_capacity(16);
    for n in [120, 1200] {
        for k in [3, 5] {
            for scheme in [CardinalityScheme::Equal, CardinalityScheme::OneBigHalf] {
                for separated in [true, false] {
                    let pis = match (k, separated) {
                        (3, true) => SEPARATED_3.to_vec(),
                        (3, false) => FUZZY_3.to_vec(),
                        (_, true) => SEPARATED_5.to_vec(),
                        (_, false) => FUZZY_5.to_vec(),
                    };
                    let seed = specs.len() as u64 + 1;
                    specs.push(GeneratorSpec { n, p, k, cardinality_scheme: scheme, pis, seed });
                }
            }
        }
    }
    specs
}

/// Builtin table by 1-based id.
pub fn builtin_spec(id: usize, p: usize) -> Result<GeneratorSpec> {
    if !(1..=16).contains(&id) {
        return Err(Error::Parameter(format!("builtin table id must be in 1..=16, got {id}")));
    }
    Ok(builtin_specs(p).swap_remove(id - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    #[test]
    fn builtin_table_rows() {
        let specs = builtin_specs(20);
        assert_eq!(specs.len(), 16);
        let s1 = &specs[0];
        assert_eq!((s1.n, s1.k, s1.sizes()), (120, 3, vec![40, 40, 40]));
        assert_eq!(s1.pis, vec![0.1, 0.5, 0.9]);
        let s4 = &specs[3];
        assert_eq!((s4.n, s4.k, s4.sizes()), (120, 3, vec![60, 30, 30]));
        assert_eq!(s4.pis, vec![0.3, 0.5, 0.7]);
        let s5 = &specs[4];
        assert_eq!((s5.n, s5.k, s5.cardinality_scheme), (120, 5, CardinalityScheme::Equal));
        assert_eq!(s5.sizes(), vec![24; 5]);
        assert_eq!(s5.pis, vec![0.05, 0.25, 0.5, 0.75, 0.95]);
        assert_eq!(specs[6].sizes(), vec![60, 15, 15, 15, 15]);
        assert_eq!(specs[11].sizes(), vec![600, 300, 300]);
        assert_eq!(specs[14].sizes(), vec![600, 150, 150, 150, 150]);
        assert_eq!(specs[15].pis, vec![0.2, 0.35, 0.5, 0.65, 0.8]);
        assert!(specs.iter().all(|s| s.p == 20 && s.validate().is_ok()));
        assert!(builtin_spec(0, 20).is_err() && builtin_spec(17, 20).is_err());
    }

    #[test]
    fn sizes_sum_and_balance() {
        for n in 5..60 {
            for k in 1..5 {
                let spec = GeneratorSpec {
                    n,
                    p: 3,
                    k,
                    cardinality_scheme: CardinalityScheme::Equal,
                    pis: vec![0.5; k],
                    seed: 0,
                };
                let sizes = spec.sizes();
                assert_eq!(sizes.iter().sum::<usize>(), n);
                assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
                let big =
                    GeneratorSpec { cardinality_scheme: CardinalityScheme::OneBigHalf, ..spec };
                let sizes = big.sizes();
                assert_eq!(sizes.iter().sum::<usize>(), n);
                if k > 1 {
                    assert_eq!(sizes[0], n.div_ceil(2));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_probabilities() {
        let mut spec = builtin_specs(10).remove(0);
        spec.pis[1] = 1.0;
        assert!(generate(&spec).is_err());
        spec.pis[1] = 0.0;
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn near_zero_probability_gives_sparse_rows() {
        let spec = GeneratorSpec {
            n: 50,
            p: 200,
            k: 2,
            cardinality_scheme: CardinalityScheme::Equal,
            pis: vec![0.001, 0.5],
            seed: 3,
        };
        let planted = generate(&spec).unwrap();
        let ones: usize = (0..25)
            .map(|i| planted.dataset.row(i).iter().map(|&x| x as usize).sum::<usize>())
            .sum();
        // expected 0.2 ones per row
        assert!((ones as f64 / 25.0) < 1.0);
    }

    #[test]
    fn class_frequencies_match_probabilities() {
        for spec in builtin_specs(20).iter().take(8) {
            let planted = generate(spec).unwrap();
            for (class, members) in planted.truth.classes().iter().enumerate() {
                let pi = spec.pis[class];
                let cells = (members.len() * spec.p) as f64;
                let ones: usize = members
                    .iter()
                    .map(|&i| planted.dataset.row(i).iter().map(|&x| x as usize).sum::<usize>())
                    .sum();
                let sigma = (pi * (1.0 - pi) / cells).sqrt();
                assert!((ones as f64 / cells - pi).abs() <= 3.0 * sigma + 1e-12);
            }
            assert_eq!(planted.truth.sizes(), spec.sizes());
        }
    }

    #[test]
    fn seeds_determine_data() {
        let hash = |d: &BinaryDataset| {
            let mut h = DefaultHasher::new();
            d.rows().for_each(|r| r.hash(&mut h));
            h.finish()
        };
        let spec = builtin_specs(20).remove(1);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        let hashes: std::collections::HashSet<u64> = (0..20)
            .map(|seed| hash(&generate(&GeneratorSpec { seed, ..spec.clone() }).unwrap().dataset))
            .collect();
        assert_eq!(hashes.len(), 20);
    }
}
