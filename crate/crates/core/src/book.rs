//! Limit order books as pairs of atomic measures.

use std::fmt;

use crate::error::{Error, Result};
use crate::isoutil::IsoUtil;
use crate::measures::{DemandMeasure, SupplyMeasure};
use crate::qty::{Extended, Qty};
use crate::stepfn::StepFn;

/// Quantities of the numéraire `X` and the asset `Y` held by a market.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SupplyLevel {
    pub x: Qty,
    pub y: Qty,
}

impl SupplyLevel {
    pub fn new(x: Qty, y: Qty) -> Self {
        SupplyLevel { x, y }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn checked_sub(&self, other: &SupplyLevel) -> Option<SupplyLevel> {
        Some(SupplyLevel { x: self.x.checked_sub(&other.x)?, y: self.y.checked_sub(&other.y)? })
    }
}

impl std::ops::Add for &SupplyLevel {
    type Output = SupplyLevel;
    fn add(self, rhs: &SupplyLevel) -> SupplyLevel {
        SupplyLevel { x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }
}

impl fmt::Display for SupplyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A limit order book `(μ_d, μ_s)`. Either side may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Book {
    demand: DemandMeasure,
    supply: SupplyMeasure,
}

impl Book {
    pub fn new(demand: DemandMeasure, supply: SupplyMeasure) -> Self {
        Book { demand, supply }
    }

    /// Builds a book from `(price, qty)` bid and ask levels.
    pub fn from_levels<B, A>(bids: B, asks: A) -> Result<Self>
    where
        B: IntoIterator<Item = (Qty, Qty)>,
        A: IntoIterator<Item = (Qty, Qty)>,
    {
        Ok(Book { demand: DemandMeasure::new(bids)?, supply: SupplyMeasure::new(asks)? })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn demand(&self) -> &DemandMeasure {
        &self.demand
    }

    pub fn supply(&self) -> &SupplyMeasure {
        &self.supply
    }

    /// Bid levels, best (highest) first.
    pub fn bids(&self) -> impl Iterator<Item = &(Qty, Qty)> + '_ {
        self.demand.atoms().iter().rev()
    }

    /// Ask levels, best (lowest) first.
    pub fn asks(&self) -> impl Iterator<Item = &(Qty, Qty)> + '_ {
        self.supply.atoms().iter()
    }

    pub fn is_empty(&self) -> bool {
        self.demand.is_empty() && self.supply.is_empty()
    }

    pub fn rdf(&self) -> StepFn {
        self.demand.rdf()
    }

    pub fn rsf(&self) -> StepFn {
        self.supply.rsf()
    }

    /// `sup supp μ_d`.
    pub fn best_bid(&self) -> Option<&Qty> {
        self.demand.measure().max_price()
    }

    /// `inf supp μ_s`.
    pub fn best_ask(&self) -> Option<&Qty> {
        self.supply.measure().min_price()
    }

    /// True iff some `m > 0` has `F_d(m) = F_s(m) = 0`: every bid is strictly
    /// below every ask. A bid and an ask at the same price leave the book
    /// unsettled.
    pub fn is_settled(&self) -> bool {
        match (self.best_bid(), self.best_ask()) {
            (Some(bid), Some(ask)) => bid < ask,
            _ => true,
        }
    }

    /// True when the best bid equals the best ask.
    pub fn is_touching(&self) -> bool {
        matches!((self.best_bid(), self.best_ask()), (Some(b), Some(a)) if b == a)
    }

    /// Midpoint of the bid-ask spread of a settled two-sided book.
    pub fn mid_price(&self) -> Result<Qty> {
        if !self.is_settled() {
            return Err(Error::Unsettled);
        }
        let bid = self.best_bid().ok_or(Error::OneSided("bid"))?;
        let ask = self.best_ask().ok_or(Error::OneSided("ask"))?;
        Ok(&(bid + ask) / &Qty::from(2u64))
    }

    /// `(x, y)` with `x = Σ bid price · qty` and `y = Σ ask qty`.
    pub fn supply_levels(&self) -> SupplyLevel {
        SupplyLevel { x: self.demand.measure().total_value(), y: self.supply.total_mass() }
    }

    /// Money needed to buy `y` units by walking the asks; `∞` beyond the ask volume.
    pub fn depth_ask(&self, y: &Qty) -> Extended {
        walk_depth(self.asks(), y)
    }

    /// Money received from selling `y` units into the bids; `∞` beyond the bid volume.
    pub fn depth_bid(&self, y: &Qty) -> Extended {
        walk_depth(self.bids(), y)
    }

    /// Units bought with `money`, capped at the ask volume.
    pub fn depth_ask_inverse(&self, money: &Qty) -> Qty {
        walk_depth_inverse(self.asks(), money)
    }

    /// Units that must be sold to receive `money`, capped at the bid volume.
    pub fn depth_bid_inverse(&self, money: &Qty) -> Qty {
        walk_depth_inverse(self.bids(), money)
    }

    /// Price of the `y`-th unit bought, `0 < y ≤ ask volume`.
    ///
    /// The unit ending at `y` is priced by the left limit of the generalized
    /// inverse of the RSF at `y`.
    pub fn pricing_ask(&self, y: &Qty) -> Result<Qty> {
        pricing(&self.rsf(), y, &self.supply.total_mass())
    }

    /// Price of the `y`-th unit sold, `0 < y ≤ bid volume`.
    pub fn pricing_bid(&self, y: &Qty) -> Result<Qty> {
        pricing(&self.rdf(), y, &self.demand.total_mass())
    }

    /// Atom-wise union of two books.
    pub fn merge(&self, other: &Book) -> Book {
        Book { demand: self.demand.merge(&other.demand), supply: self.supply.merge(&other.supply) }
    }

    /// The iso-util of the book through its current supply level: the bid
    /// branch runs left of `(x₀, y₀)` with one segment per bid level, best
    /// bid first; the ask branch runs right with one segment per ask level.
    /// Convex with a strict kink at the current level iff the book is settled.
    pub fn to_isoutil(&self) -> IsoUtil {
        book_to_isoutil(self)
    }
}

fn walk_depth<'a>(levels: impl Iterator<Item = &'a (Qty, Qty)>, y: &Qty) -> Extended {
    let mut need = y.clone();
    let mut money = Qty::zero();
    for (price, qty) in levels {
        if need.is_zero() {
            break;
        }
        let take = need.clone().min(qty.clone());
        money += price * &take;
        need = need.saturating_sub(&take);
    }
    if need.is_zero() {
        Extended::Finite(money)
    } else {
        Extended::Infinite
    }
}

fn walk_depth_inverse<'a>(levels: impl Iterator<Item = &'a (Qty, Qty)>, money: &Qty) -> Qty {
    let mut budget = money.clone();
    let mut units = Qty::zero();
    for (price, qty) in levels {
        if budget.is_zero() {
            break;
        }
        let cost = price * qty;
        if cost <= budget {
            units += qty;
            budget = budget.saturating_sub(&cost);
        } else {
            units += &budget / price;
            budget = Qty::zero();
        }
    }
    units
}

fn pricing(f: &StepFn, y: &Qty, available: &Qty) -> Result<Qty> {
    if !y.is_positive() {
        return Err(Error::InvalidParameter(format!("unit index {y} must be positive")));
    }
    if y > available {
        return Err(Error::ExceedsVolume { requested: y.to_string(), available: available.to_string() });
    }
    let price = f
        .generalized_inverse()
        .left_limit(y)
        .clone()
        .into_finite()
        .expect("pricing inverse is finite within the side volume");
    Ok(price)
}

pub fn book_to_isoutil(b: &Book) -> IsoUtil {
    let current = b.supply_levels();
    // bid branch, walked from the current level towards x = 0
    let mut left = Vec::new();
    let (mut x, mut y) = (current.x.clone(), current.y.clone());
    for (price, qty) in b.bids() {
        x = x.checked_sub(&(price * qty)).expect("bid money is bounded by x₀");
        y += qty;
        left.push(SupplyLevel::new(x.clone(), y.clone()));
    }
    left.reverse();
    let mut vertices = left;
    vertices.push(current.clone());
    let (mut x, mut y) = (current.x.clone(), current.y.clone());
    for (price, qty) in b.asks() {
        x += price * qty;
        y = y.checked_sub(qty).expect("ask volume is bounded by y₀");
        vertices.push(SupplyLevel::new(x.clone(), y.clone()));
    }
    IsoUtil::new(vertices, current).expect("book levels give a strictly monotone curve")
}
