//! Population-based metaheuristics: a genetic algorithm over label vectors and
//! an ant colony guided by pairwise co-clustering pheromone.

mod ant_colony;
mod genetic;

pub use ant_colony::{
    ant_colony, pheromone_update, transfer_probability, AcParams, PheromoneState,
};
pub use genetic::{
    crossover, fitness, genetic_algorithm, mutate, roulette_select, select_parents, Chromosome,
    GaParams,
};
