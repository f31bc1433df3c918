//! Settling crossed books by arbitrage: crossing bounds, adiabatic and
//! iso-util clearing, arbitrage profit and entropy.

use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use crate::book::{Book, SupplyLevel};
use crate::error::{Error, Result};
use crate::measures::{measure_of_rdf, measure_of_rsf};
use crate::qty::{Extended, Qty};
use crate::stepfn::{from_inclusive, Direction, StepFn};

/// What happens to matched orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClearingMode {
    /// Matched orders leave the book.
    Adiabatic,
    /// Matched orders reappear at their price on the opposite side.
    IsoUtil,
}

impl ClearingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClearingMode::Adiabatic => "adiabatic",
            ClearingMode::IsoUtil => "isoutil",
        }
    }
}

impl fmt::Display for ClearingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClearingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adiabatic" => Ok(ClearingMode::Adiabatic),
            "isoutil" | "iso-util" => Ok(ClearingMode::IsoUtil),
            other => Err(Error::Parse(format!("unknown clearing mode {other:?}"))),
        }
    }
}

/// The crossing bounds `p_d ≤ p_s` and clearing volume `Z` of a book.
///
/// `p_d = inf{p | F_d(p) ≤ F_s(p)}`, `p_s = inf{p | F_d(p) < F_s(p)}` and
/// `Z = max_p min{F_d(p−), F_s(p)}`, attained at `p_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingProfile {
    p_d: Qty,
    p_s: Extended,
    z: Qty,
    rdf: StepFn,
    rsf: StepFn,
}

impl CrossingProfile {
    pub fn p_d(&self) -> &Qty {
        &self.p_d
    }

    /// `∞` when the book has no asks.
    pub fn p_s(&self) -> &Extended {
        &self.p_s
    }

    pub fn clearing_volume(&self) -> &Qty {
        &self.z
    }

    pub fn rdf(&self) -> &StepFn {
        &self.rdf
    }

    pub fn rsf(&self) -> &StepFn {
        &self.rsf
    }

    /// `Z(p) = min{F_d(p−), F_s(p)}`.
    pub fn volume_at(&self, p: &Qty) -> Qty {
        self.rdf.left_limit(p).clone().min(self.rsf.eval(p).clone())
    }

    fn cuts(&self) -> Vec<Qty> {
        let mut cuts: Vec<Qty> = self.rdf.breakpoints().chain(self.rsf.breakpoints()).cloned().collect();
        cuts.push(self.p_d.clone());
        if let Extended::Finite(p) = &self.p_s {
            cuts.push(p.clone());
        }
        cuts
    }

    fn below_p_s(&self, p: &Qty) -> bool {
        self.p_s > *p
    }

    /// `A_d = min{F_d, Z}`.
    fn demand_cap(&self) -> StepFn {
        self.rdf.min_with(&self.z)
    }

    /// `A_s = min{F_s, Z}`.
    fn supply_cap(&self) -> StepFn {
        self.rsf.min_with(&self.z)
    }

    /// `∫_{[p_d, ∞)} p dA_d`: money paid by the matched bids.
    pub fn matched_bid_value(&self) -> Qty {
        self.demand_cap().stieltjes_price_integral(from_inclusive(&self.p_d))
    }

    /// `∫_{(0, p_s]} p dA_s`: money received by the matched asks.
    pub fn matched_ask_value(&self) -> Qty {
        let upper = match &self.p_s {
            Extended::Finite(p) => Bound::Included(p.clone()),
            Extended::Infinite => Bound::Unbounded,
        };
        self.supply_cap().stieltjes_price_integral((Bound::Unbounded, upper))
    }

    /// Arbitrage profit `P`.
    pub fn profit(&self) -> Qty {
        self.matched_bid_value()
            .checked_sub(&self.matched_ask_value())
            .expect("matched bids pay at least what matched asks receive")
    }

    pub fn entropy(&self, mode: ClearingMode) -> Entropy {
        match mode {
            ClearingMode::Adiabatic => Entropy { dx: self.matched_bid_value(), dy: self.z.clone() },
            ClearingMode::IsoUtil => Entropy { dx: self.profit(), dy: Qty::zero() },
        }
    }
}

pub fn crossing(b: &Book) -> CrossingProfile {
    let rdf = b.rdf();
    let rsf = b.rsf();
    let mut cuts: Vec<&Qty> = rdf.breakpoints().chain(rsf.breakpoints()).collect();
    cuts.sort();
    cuts.dedup();

    let p_d = if rdf.left_value() <= rsf.left_value() {
        Qty::zero()
    } else {
        cuts.iter()
            .find(|p| rdf.eval(p) <= rsf.eval(p))
            .map(|p| (*p).clone())
            .expect("remaining demand vanishes beyond the highest bid")
    };
    let p_s = cuts
        .iter()
        .find(|p| rdf.eval(p) < rsf.eval(p))
        .map_or(Extended::Infinite, |p| Extended::Finite((*p).clone()));
    let z = match &p_s {
        Extended::Finite(p) => rdf.left_limit(p).clone().min(rsf.eval(p).clone()),
        Extended::Infinite => Qty::zero(),
    };
    CrossingProfile { p_d, p_s, z, rdf, rsf }
}

/// Liquidity removed by clearing, as amounts of `X` and `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Entropy {
    pub dx: Qty,
    pub dy: Qty,
}

impl fmt::Display for Entropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dx, self.dy)
    }
}

pub fn entropy(b: &Book, mode: ClearingMode) -> Entropy {
    crossing(b).entropy(mode)
}

pub fn arbitrage_profit(b: &Book) -> Qty {
    crossing(b).profit()
}

/// `levels − e`, failing if a component would go negative.
pub fn apply_entropy(levels: &SupplyLevel, e: &Entropy) -> Result<SupplyLevel> {
    let x = levels.x.checked_sub(&e.dx).ok_or_else(|| {
        Error::InconsistentLevels(format!("x level {} is below the entropy {}", levels.x, e.dx))
    })?;
    let y = levels.y.checked_sub(&e.dy).ok_or_else(|| {
        Error::InconsistentLevels(format!("y level {} is below the entropy {}", levels.y, e.dy))
    })?;
    Ok(SupplyLevel::new(x, y))
}

fn adiabatic_rdf(c: &CrossingProfile, p: &Qty) -> Qty {
    if p < &c.p_d {
        c.rdf.eval(p).saturating_sub(&c.z)
    } else {
        Qty::zero()
    }
}

fn adiabatic_rsf(c: &CrossingProfile, p: &Qty) -> Qty {
    if c.below_p_s(p) {
        Qty::zero()
    } else {
        c.rsf.eval(p).saturating_sub(&c.z)
    }
}

fn rebuild(c: &CrossingProfile, rdf: impl Fn(&Qty) -> Qty, rsf: impl Fn(&Qty) -> Qty) -> Book {
    let rdf = StepFn::tabulate(Direction::NonIncreasing, c.cuts(), rdf)
        .expect("cleared remaining demand is non-increasing");
    let rsf = StepFn::tabulate(Direction::NonDecreasing, c.cuts(), rsf)
        .expect("cleared remaining supply is non-decreasing");
    Book::new(
        measure_of_rdf(&rdf).expect("cleared remaining demand vanishes at infinity"),
        measure_of_rsf(&rsf).expect("cleared remaining supply vanishes at zero"),
    )
}

/// Removes the matched volume `Z` from both sides. The result is settled.
pub fn clear_adiabatic(b: &Book) -> (Book, CrossingProfile) {
    let c = crossing(b);
    let book = rebuild(&c, |p| adiabatic_rdf(&c, p), |p| adiabatic_rsf(&c, p));
    (book, c)
}

/// Moves the matched volume to the opposite side at the original prices.
/// The result can be touching.
pub fn clear_isoutil(b: &Book) -> (Book, CrossingProfile) {
    let c = crossing(b);
    let book = rebuild(
        &c,
        |p| {
            if p < &c.p_d {
                let refill = c.z.checked_sub(&c.rsf.eval(p).clone().min(c.z.clone())).expect("capped");
                adiabatic_rdf(&c, p) + refill
            } else {
                Qty::zero()
            }
        },
        |p| {
            if c.below_p_s(p) {
                Qty::zero()
            } else {
                let refill = c.z.checked_sub(&c.rdf.eval(p).clone().min(c.z.clone())).expect("capped");
                adiabatic_rsf(&c, p) + refill
            }
        },
    );
    (book, c)
}

/// Everything a clearing pass produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClearingOutcome {
    pub mode: ClearingMode,
    pub book: Book,
    pub profile: CrossingProfile,
    pub profit: Qty,
    pub entropy: Entropy,
    pub levels_before: SupplyLevel,
    pub levels_after: SupplyLevel,
}

pub fn clear(b: &Book, mode: ClearingMode) -> ClearingOutcome {
    let (book, profile) = match mode {
        ClearingMode::Adiabatic => clear_adiabatic(b),
        ClearingMode::IsoUtil => clear_isoutil(b),
    };
    let profit = profile.profit();
    let entropy = profile.entropy(mode);
    let levels_before = b.supply_levels();
    let levels_after = book.supply_levels();
    ClearingOutcome { mode, book, profile, profit, entropy, levels_before, levels_after }
}
