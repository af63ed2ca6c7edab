//! L1 (Hamming) and Jaccard dissimilarities between binary vectors.

use serde::{Deserialize, Serialize};

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DissimilarityKind {
    L1,
    Jaccard,
}

impl std::str::FromStr for DissimilarityKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Self::L1),
            "jaccard" => Ok(Self::Jaccard),
            other => Err(format!("unknown dissimilarity '{other}' (expected l1 or jaccard)")),
        }
    }
}

impl std::fmt::Display for DissimilarityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::L1 => "l1",
            Self::Jaccard => "jaccard",
        })
    }
}

fn check_len(x: &[u8], y: &[u8]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), found: y.len() });
    }
    Ok(())
}

/// Number of coordinates where `x` and `y` differ.
pub fn l1_dissimilarity(x: &[u8], y: &[u8]) -> Result<u32> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count() as u32)
}

/// Shared ones and ones in either vector: `(a, a + b + c)`.
fn jaccard_counts(x: &[u8], y: &[u8]) -> (u32, u32) {
    let mut shared = 0;
    let mut union = 0;
    for (&a, &b) in x.iter().zip(y) {
        shared += u32::from(a & b);
        union += u32::from(a | b);
    }
    (shared, union)
}

/// `1 - a/(a+b+c)`; two all-zero vectors are at dissimilarity 0.
pub fn jaccard_dissimilarity(x: &[u8], y: &[u8]) -> Result<f64> {
    check_len(x, y)?;
    let (shared, union) = jaccard_counts(x, y);
    Ok(f64::from_jaccard(shared, union).expect("f64 represents jaccard"))
}

/// Dense symmetric matrix of pairwise dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix<T> {
    d: Vec<T>,
    n: usize,
    kind: DissimilarityKind,
}

impl<T: Scalar> DissimilarityMatrix<T> {
    /// Computes all pairwise dissimilarities of the dataset rows.
    ///
    /// Fails when `T` cannot represent the requested dissimilarity (Jaccard
    /// into an integer type).
    pub fn compute(data: &BinaryDataset, kind: DissimilarityKind) -> Result<Self> {
        let n = data.n();
        let mut d = vec![T::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (x, y) = (data.row(i), data.row(j));
                let v = match kind {
                    DissimilarityKind::L1 => T::from_count(u64::from(l1_dissimilarity(x, y)?)),
                    DissimilarityKind::Jaccard => {
                        let (shared, union) = jaccard_counts(x, y);
                        T::from_jaccard(shared, union).ok_or_else(|| {
                            Error::Config(
                                "jaccard dissimilarity needs a floating point scalar".into(),
                            )
                        })?
                    }
                };
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(Self { d, n, kind })
    }

    /// Wraps an explicit matrix after checking zero diagonal, symmetry and
    /// non-negativity.
    pub fn from_square(d: Vec<T>, n: usize, kind: DissimilarityKind) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: d.len() });
        }
        for i in 0..n {
            if d[i * n + i] != T::zero() {
                return Err(Error::InvalidData(format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                let v = d[i * n + j];
                if v != d[j * n + i] {
                    return Err(Error::InvalidData(format!("asymmetric entry ({i}, {j})")));
                }
                if v < T::zero() {
                    return Err(Error::InvalidData(format!("negative entry ({i}, {j})")));
                }
            }
        }
        Ok(Self { d, n, kind })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kind(&self) -> DissimilarityKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}
