//! Multi-unit unit-demand auctions over a buyer network.
//!
//! A seller owns `k` identical units and can inform only her direct
//! followers; buyers may forward the sale information to their own
//! followers, and both the forwarded set and the reported value are
//! strategic. This crate implements the distance-based mechanism for that
//! setting together with two baselines (a VCG over the direct followers
//! only, and free first-come-first-served allocation), executable checkers
//! for the incentive and efficiency properties the mechanisms are supposed
//! to satisfy, worst-case efficiency-loss accounting under a reserve
//! price, and an exact solver plus hardness gadget for the seller's
//! optimal-diffusion problem.

pub mod diffusion_opt;
pub mod efficiency;
pub mod format;
pub mod generator;
pub mod mechanisms;
pub mod network;
pub mod properties;
pub mod samples;

pub use mechanisms::{
    priority_order, revenue, run_distance_based, run_fcfs_f, run_nd_vcg, social_surplus, v_star,
    Mechanism, Outcome, Price, PriorityOrder, ReserveConfig,
};
pub use network::{
    build_critical_tree, connected_and_distances, critical_parents, critical_parents_by_removal,
    least_critical_parent, AuctionInstance, BuyerId, BuyerType, DiffusionCriticalTree, ModelError,
    Money, Node, ReachabilityView, Report, ReportProfile,
};
