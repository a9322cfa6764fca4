//! Roommate rent division.
//!
//! Tenants have joint preferences over rooms and roommates (`v[i][j][r]`).
//! This crate finds welfare-maximizing assignments of tenants to rooming
//! groups and rooms (greedy, greedy with room re-matching, and an exact
//! independent-set formulation), and prices them: room envy-free room prices
//! and tenant shares that minimize the worst pairwise envy factor.

pub mod assignment;
pub mod bench;
pub mod enumeration;
pub mod error;
pub mod evaluate;
pub mod fixtures;
pub mod greedy;
pub mod instance;
pub mod linprog;
pub mod matching;
pub mod mwis;
pub mod pricing;
pub mod solution;

/// Absolute tolerance for envy and room envy-freeness comparisons.
pub const TOLERANCE: f64 = 1e-6;

pub use assignment::{assignment_valid, Assignment, Placement};
pub use error::{Error, Result};
pub use evaluate::{
    displaced_value_matrix, envy_report, group_valuation, is_room_envy_free, raw_valuation_sum,
    social_welfare, EnvyReport, PriceVector, RefCheck, RefViolation, TenantPrices,
};
pub use greedy::{greedy_assign, greedy_matching_assign, rematch_rooms};
pub use instance::{validate_instance, Instance, InstanceData, InstanceViolation};
pub use matching::max_weight_perfect_matching;
pub use mwis::mwis_assign;
pub use pricing::{
    attach_prices, min_epsilon_prices, pef_feasible, ref_prices, EpsilonSolution, PricingMode,
    PricingPolicy,
};
pub use solution::Solution;
