//! Clustering of binary data by minimizing within-class heterogeneity with
//! combinatorial metaheuristics.
//!
//! A [`Problem`] ties a [`BinaryDataset`] to a [`DissimilarityMatrix`] and a
//! [`CriterionKind`]. Every optimizer returns a [`RunResult`] holding the best
//! [`Partition`] found and its within inertia `W`.
//!
//! The numeric core is generic over [`Scalar`]. L1 dissimilarities are kept
//! as exact integers (`i64`) and Jaccard dissimilarities as `f64`; the aliases
//! below name the two combinations used in practice.
//!
//! ```
//! use binclust::{
//!     simulated_annealing, BinaryDataset, CriterionKind, DissimilarityKind, L1Matrix, L1Problem,
//!     SaParams,
//! };
//!
//! let data = BinaryDataset::from_rows(&[
//!     vec![1u8, 1, 0, 0],
//!     vec![1, 1, 0, 0],
//!     vec![0, 0, 1, 1],
//!     vec![0, 0, 1, 1],
//! ])?;
//! let d = L1Matrix::compute(&data, DissimilarityKind::L1)?;
//! let problem = L1Problem::new(&data, &d, CriterionKind::L1Median)?;
//! let run = simulated_annealing(&problem, 2, &SaParams::default(), 7, None)?;
//! assert_eq!(run.best_w, 0);
//! # Ok::<(), binclust::Error>(())
//! ```

pub mod baselines;
pub mod bench;
pub mod criteria;
pub mod datagen;
pub mod dataset;
pub mod dissimilarity;
pub mod error;
pub mod neighborhood;
pub mod oracle;
pub mod partition;
pub mod population;
pub mod run;
pub mod scalar;
pub mod trajectory;

pub use baselines::{hierarchical_run, kmedoids_binary, pam_medians};
pub use bench::{
    attraction_rate, multistart, run_experiment, run_experiment_on, BenchReport, DataSource,
    ExperimentConfig, Method, MethodParams,
};
pub use criteria::{
    between_inertia, total_inertia, within_inertia, ClusterStats, CriterionKind, Problem,
    SearchState,
};
pub use datagen::{builtin_specs, generate, CardinalityScheme, GeneratorSpec, PlantedDataset};
pub use dataset::BinaryDataset;
pub use dissimilarity::{DissimilarityKind, DissimilarityMatrix};
pub use error::{Error, Result};
pub use oracle::{brute_force_optimum, enumerate_partitions, verify_monotonicity};
pub use partition::{Move, Partition};
pub use population::{ant_colony, genetic_algorithm, AcParams, GaParams};
pub use run::RunResult;
pub use scalar::Scalar;
pub use trajectory::{
    simulated_annealing, tabu_search, threshold_accepting, SaParams, TaParams, TsParams,
};

/// Exact integer L1 (Hamming) dissimilarities.
pub type L1Matrix = DissimilarityMatrix<i64>;
/// Jaccard dissimilarities.
pub type JaccardMatrix = DissimilarityMatrix<f64>;
pub type L1Problem<'a> = Problem<'a, i64>;
pub type JaccardProblem<'a> = Problem<'a, f64>;
pub type L1RunResult = RunResult<i64>;
pub type JaccardRunResult = RunResult<f64>;
