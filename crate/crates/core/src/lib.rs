//! Fair allocation of indivisible goods among agents with unequal
//! entitlements.
//!
//! Allocators:
//! * [`solve_half_aps`] gives every agent half its AnyPrice share under
//!   binary XOS valuations; [`solve_half_mms`] does the same for the
//!   maximin share.
//! * [`wmms_round_robin`] gives every agent `1/n` of its weighted maximin
//!   share under XOS valuations.
//! * [`wmms_allocate_binadd`] gives every agent its full weighted maximin
//!   share under binary additive valuations.
//!
//! The [`shares`] module computes APS, MMS and WMMS exactly, by
//! enumeration and an exact rational simplex, so every guarantee can be
//! checked with [`verify::verify`]. [`generate`] builds the tight
//! instance families and seeded random ones. All arithmetic is exact.
//!
//! ```
//! use fairshare::{gen_thm43, solve_half_aps, exact_aps, OracleLimits};
//!
//! let instance = gen_thm43(2).unwrap();
//! let result = solve_half_aps(&instance).unwrap();
//! let aps = exact_aps(&instance, 1, &OracleLimits::default()).unwrap();
//! assert!(fairshare::rational::from_u64(2 * result.achieved[1]) >= aps.value);
//! ```

pub mod aps_half;
pub mod cli;
pub mod error;
pub mod generate;
pub mod io;
pub mod lp;
pub mod model;
pub mod rational;
pub mod shares;
pub mod valuation;
pub mod verify;
pub mod wmms;

pub use aps_half::{solve_half_aps, solve_half_mms, GuessVector, HalfApsResult};
pub use error::{Error, Result};
pub use generate::{gen_prop41, gen_random, gen_thm43, Family, GeneratorSpec};
pub use model::{validate_allocation, Agent, Allocation, GoodSet, Instance, Notion, ShareValue, Witness};
pub use rational::Rational;
pub use shares::{best_allocation_ratio, exact_aps, exact_mms, exact_wmms, OracleLimits};
pub use valuation::Valuation;
pub use wmms::{wmms_allocate_binadd, wmms_partition_binadd, wmms_round_robin};
