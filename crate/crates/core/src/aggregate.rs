//! Aggregating markets: summing their books, then settling the sum.

use crate::book::{Book, SupplyLevel};
use crate::clearing::{clear, ClearingMode, Entropy};
use crate::error::{Error, Result};
use crate::ideal::IdealMarket;
use crate::qty::Qty;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregationResult {
    pub unsettled: Book,
    pub settled: Book,
    pub mode: ClearingMode,
    pub entropy: Entropy,
    pub profit: Qty,
    pub levels_before: SupplyLevel,
    pub levels_after: SupplyLevel,
}

/// Atom-wise sum of all books. With the `parallel` feature the sum is a
/// parallel tree reduction.
pub fn aggregate_unsettled(books: &[Book]) -> Result<Book> {
    if books.is_empty() {
        return Err(Error::EmptyAggregation);
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(books.par_iter().cloned().reduce(Book::empty, |a, b| a.merge(&b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        aggregate_unsettled_sequential(books)
    }
}

/// Left fold of [`Book::merge`] on the calling thread.
pub fn aggregate_unsettled_sequential(books: &[Book]) -> Result<Book> {
    if books.is_empty() {
        return Err(Error::EmptyAggregation);
    }
    Ok(books.iter().fold(Book::empty(), |acc, b| acc.merge(b)))
}

fn total_levels(books: &[Book]) -> SupplyLevel {
    books.iter().fold(SupplyLevel::zero(), |acc, b| &acc + &b.supply_levels())
}

/// Sums all books and clears the sum once.
pub fn aggregate_settled(books: &[Book], mode: ClearingMode) -> Result<AggregationResult> {
    let unsettled = aggregate_unsettled(books)?;
    let out = clear(&unsettled, mode);
    Ok(AggregationResult {
        levels_before: total_levels(books),
        unsettled,
        settled: out.book,
        mode,
        entropy: out.entropy,
        profit: out.profit,
        levels_after: out.levels_after,
    })
}

/// Adds the books one at a time, clearing after every step. Entropy and
/// profit are summed over the steps. The settled book can differ from the
/// one of [`aggregate_settled`].
pub fn aggregate_settled_pairwise(books: &[Book], mode: ClearingMode) -> Result<AggregationResult> {
    let unsettled = aggregate_unsettled_sequential(books)?;
    let mut acc = Book::empty();
    let mut entropy = Entropy::default();
    let mut profit = Qty::zero();
    for b in books {
        let out = clear(&acc.merge(b), mode);
        entropy.dx += &out.entropy.dx;
        entropy.dy += &out.entropy.dy;
        profit += &out.profit;
        acc = out.book;
    }
    Ok(AggregationResult {
        levels_before: total_levels(books),
        levels_after: acc.supply_levels(),
        unsettled,
        settled: acc,
        mode,
        entropy,
        profit,
    })
}

/// Remaining functions of the sum of two ideal markets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealAggregate {
    first: IdealMarket,
    second: IdealMarket,
}

impl IdealAggregate {
    pub fn markets(&self) -> (&IdealMarket, &IdealMarket) {
        (&self.first, &self.second)
    }

    pub fn rsf(&self, p: f64) -> f64 {
        self.first.rsf(p) + self.second.rsf(p)
    }

    pub fn rdf(&self, p: f64) -> f64 {
        self.first.rdf(p) + self.second.rdf(p)
    }

    /// Whether both markets quote the same marginal price, up to rounding.
    pub fn same_price(&self) -> bool {
        let (p1, p2) = (self.first.marginal_price(), self.second.marginal_price());
        ((p1 - p2) / p1).abs() <= 1e-12
    }

    /// For equal prices the sum is again ideal, with activity `A₁ + A₂` and
    /// temperature `(√T₁ + √T₂)²`.
    pub fn combined(&self) -> Option<IdealMarket> {
        if !self.same_price() {
            return None;
        }
        IdealMarket::from_activity(
            self.first.activity() + self.second.activity(),
            self.first.marginal_price(),
        )
        .ok()
    }
}

/// Closed form of aggregating ideal markets given by activity and marginal price.
pub fn ideal_aggregate_closed_form(a1: f64, p1: f64, a2: f64, p2: f64) -> Result<IdealAggregate> {
    let m1 = IdealMarket::from_activity(a1, p1)?;
    let m2 = IdealMarket::from_activity(a2, p2)?;
    let (first, second) = if p1 <= p2 { (m1, m2) } else { (m2, m1) };
    Ok(IdealAggregate { first, second })
}
