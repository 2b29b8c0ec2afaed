//! Exact rational arithmetic for the lonely runner problem.
//!
//! Everything here works over arbitrary-precision rationals: pairwise
//! close-time probabilities with an independent interval-sweep oracle,
//! Hunter-style and divergence-based lower bounds with gap certificates,
//! the moving intersection graph of runner arcs, and prime-power gap
//! multipliers. Derived quantities come with verification hooks, and
//! claimed identities that fail to hold are reported as falsifications
//! rather than silently accepted.

pub mod bounds;
pub mod corpus;
pub mod correlation;
pub mod enclosure;
pub mod error;
pub mod exact;
pub mod graph;
pub mod prime;
pub mod speeds;

pub use error::Error;
pub use exact::{format_rat, parse_rat, Rat};
pub use speeds::SpeedSet;
