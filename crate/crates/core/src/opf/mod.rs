//! DC optimal power flow market clearing.
//!
//! [`network`] holds the grid description, [`dcopf`] turns one hour of it into
//! a linear program and clears it, and [`reduce`] builds the zonal and
//! copper-plate approximations of a nodal network.

pub mod dcopf;
pub mod network;
pub mod reduce;

pub use dcopf::{build_dcopf, clear_market, DcOpf, MarketOutcome};
pub use network::{Branch, Bus, CostPiece, Generator, NetworkModel, BASE_MVA};
pub use reduce::{reduce_network, reduce_network_with, NetworkMode, Reduction};
