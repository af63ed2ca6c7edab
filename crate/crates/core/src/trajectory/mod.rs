//! Single-solution metaheuristics driven by random or sampled transfers.

mod annealing;
mod tabu;
mod threshold;

pub use annealing::{
    calibrate_initial_temperature, metropolis_accept, simulated_annealing, SaParams,
    FLOOR_TEMPERATURE,
};
pub use tabu::{tabu_code, tabu_search, MemberMask, TabuList, TsParams};
pub use threshold::{threshold_accepting, TaParams};
