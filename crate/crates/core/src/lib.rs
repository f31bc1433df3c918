//! Exact calculus of limit order books and iso-utils.
//!
//! Books are pairs of atomic demand and supply measures over exact rational
//! prices. A book converts to a piecewise-linear iso-util and back, crossed
//! books are settled by adiabatic or iso-util clearing, and markets are
//! aggregated by summing their books and clearing the sum.
//!
//! ```
//! use mdyn_core::{clear, Book, ClearingMode, Qty};
//!
//! let q = Qty::from;
//! let book = Book::from_levels(
//!     vec![(q(20000u64), q(5u64))],
//!     vec![(q(15000u64), q(4u64)), (q(40000u64), q(1u64))],
//! )?;
//! let out = clear(&book, ClearingMode::Adiabatic);
//! assert_eq!(out.profile.clearing_volume(), &q(4u64));
//! assert_eq!(out.profit, q(20000u64));
//! assert!(out.book.is_settled());
//! # Ok::<(), mdyn_core::Error>(())
//! ```

pub mod aggregate;
pub mod batch;
pub mod book;
pub mod clearing;
pub mod error;
pub mod ideal;
pub mod isoutil;
pub mod measures;
pub mod qty;
pub mod stepfn;
pub mod utility;

pub use aggregate::{
    aggregate_settled, aggregate_settled_pairwise, aggregate_unsettled, ideal_aggregate_closed_form,
    AggregationResult, IdealAggregate,
};
pub use batch::{clear_many, clear_many_sequential};
pub use book::{book_to_isoutil, Book, SupplyLevel};
pub use clearing::{
    apply_entropy, arbitrage_profit, clear, clear_adiabatic, clear_isoutil, crossing, entropy, ClearingMode,
    ClearingOutcome, CrossingProfile, Entropy,
};
pub use error::{Error, Result};
pub use ideal::{IdealMarket, PriceGrid};
pub use isoutil::{isoutil_to_book, IsoUtil, MarginalPrices, Position};
pub use measures::{AtomicMeasure, DemandMeasure, SupplyMeasure};
pub use qty::{Extended, Qty};
pub use stepfn::{Direction, InverseFn, StepFn};
pub use utility::{temperature, utility_marginal_price, Temperature, UtilityFn};
