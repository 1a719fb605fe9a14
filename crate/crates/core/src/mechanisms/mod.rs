//! Privacy mechanisms: the depolarised-SIC quantum mechanism, classical
//! stochastic matrices, block designs and extremal decompositions.

mod classical;
mod cq;
mod design;
mod extremal;

pub use classical::{verify_ldp, LdpVerdict, StochasticMatrix};
pub use cq::{
    ceil_sqrt, mu_feasible_interval, proposed_mechanism, proposed_mechanism_with_mu, verify_qldp,
    CQMechanism, QldpBounds, QldpVerdict, MAX_PROPOSED_V,
};
pub use design::{block_design_mechanism, complete_design, randomized_response, BlockDesign};
pub use extremal::{decompose_extremal, extremal_matrix, Decomposition, ExtremalMechanism, MAX_EXTREMAL_V};
