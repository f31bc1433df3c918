//! Piecewise-linear iso-utils and the iso-util → book direction.

use std::fmt;

use crate::book::{Book, SupplyLevel};
use crate::error::{Error, Result};
use crate::qty::Qty;

/// A decreasing piecewise-linear curve through the current supply level.
///
/// Vertices are strictly increasing in `x` and strictly decreasing in `y`.
/// The current level lies on a vertex or in the interior of a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoUtil {
    vertices: Vec<SupplyLevel>,
    current: SupplyLevel,
}

/// Where the current supply level sits on the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Vertex(usize),
    /// Strictly inside the segment from vertex `i` to vertex `i + 1`.
    Segment(usize),
}

/// Marginal prices at the current level. A side is absent at an endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalPrices {
    pub bid: Option<Qty>,
    pub ask: Option<Qty>,
}

impl IsoUtil {
    pub fn new(vertices: Vec<SupplyLevel>, current: SupplyLevel) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidCurve("no vertices".into()));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if w[1].x <= w[0].x {
                return Err(Error::InvalidCurve(format!(
                    "x not strictly increasing between vertices {i} and {}",
                    i + 1
                )));
            }
            if w[1].y >= w[0].y {
                return Err(Error::InvalidCurve(format!(
                    "y not strictly decreasing between vertices {i} and {}",
                    i + 1
                )));
            }
        }
        let curve = IsoUtil { vertices, current };
        if curve.locate().is_none() {
            return Err(Error::InvalidCurve(format!("current level {} is not on the curve", curve.current)));
        }
        Ok(curve)
    }

    /// Like [`IsoUtil::new`], inserting the current level as a vertex when it
    /// falls inside a segment.
    pub fn with_current_vertex(vertices: Vec<SupplyLevel>, current: SupplyLevel) -> Result<Self> {
        let mut curve = IsoUtil::new(vertices, current)?;
        if let Some(Position::Segment(i)) = curve.locate() {
            curve.vertices.insert(i + 1, curve.current.clone());
        }
        Ok(curve)
    }

    pub fn vertices(&self) -> &[SupplyLevel] {
        &self.vertices
    }

    pub fn current(&self) -> &SupplyLevel {
        &self.current
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn position(&self) -> Position {
        self.locate().expect("validated on construction")
    }

    fn locate(&self) -> Option<Position> {
        let c = &self.current;
        let idx = self.vertices.partition_point(|v| v.x < c.x);
        if let Some(v) = self.vertices.get(idx) {
            if v == c {
                return Some(Position::Vertex(idx));
            }
        }
        if idx == 0 || idx == self.vertices.len() {
            return None;
        }
        let (a, b) = (&self.vertices[idx - 1], &self.vertices[idx]);
        if c.y >= a.y || c.y <= b.y {
            return None;
        }
        // (c - a) parallel to (b - a), with y measured downwards
        let lhs = c.x.checked_sub(&a.x)? * a.y.checked_sub(&b.y)?;
        let rhs = a.y.checked_sub(&c.y)? * b.x.checked_sub(&a.x)?;
        (lhs == rhs).then_some(Position::Segment(idx - 1))
    }

    /// Price `Δx / (−Δy)` of each segment, i.e. `−1/slope`.
    pub fn segment_prices(&self) -> Vec<Qty> {
        self.vertices.windows(2).map(|w| segment_price(&w[0], &w[1])).collect()
    }

    /// True when the segment slopes are non-decreasing from left to right.
    pub fn is_convex(&self) -> bool {
        self.convexity_violation().is_none()
    }

    /// The first vertex where the slope decreases, with the prices of the
    /// segments on either side.
    pub fn convexity_violation(&self) -> Option<(usize, Qty, Qty)> {
        let prices = self.segment_prices();
        prices
            .windows(2)
            .position(|w| w[1] < w[0])
            .map(|i| (i + 1, prices[i].clone(), prices[i + 1].clone()))
    }

    pub fn marginal_prices(&self) -> Result<MarginalPrices> {
        if self.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let last = self.vertices.len() - 1;
        Ok(match self.position() {
            Position::Vertex(i) => MarginalPrices {
                bid: (i > 0).then(|| segment_price(&self.vertices[i - 1], &self.vertices[i])),
                ask: (i < last).then(|| segment_price(&self.vertices[i], &self.vertices[i + 1])),
            },
            Position::Segment(i) => {
                let p = segment_price(&self.vertices[i], &self.vertices[i + 1]);
                MarginalPrices { bid: Some(p.clone()), ask: Some(p) }
            }
        })
    }

    /// Convex with a strict kink at the current level, which is exactly the
    /// shape [`Book::to_isoutil`] produces for a settled book.
    pub fn is_settled(&self) -> bool {
        if !self.is_convex() {
            return false;
        }
        match self.marginal_prices() {
            Err(_) => true,
            Ok(MarginalPrices { bid: Some(b), ask: Some(a) }) => b < a,
            Ok(_) => true,
        }
    }

    /// `(bid part, ask part)`: the points with `x ≤ x₀` and with `x ≥ x₀`.
    /// Both contain the current level.
    pub fn split_bid_ask(&self) -> (IsoUtil, IsoUtil) {
        let c = &self.current;
        let mut bid: Vec<SupplyLevel> = self.vertices.iter().filter(|v| v.x < c.x).cloned().collect();
        bid.push(c.clone());
        let mut ask = vec![c.clone()];
        ask.extend(self.vertices.iter().filter(|v| v.x > c.x).cloned());
        (
            IsoUtil { vertices: bid, current: c.clone() },
            IsoUtil { vertices: ask, current: c.clone() },
        )
    }

    /// `y` on the curve above `x`, if `x` is within the curve's range.
    pub fn y_at(&self, x: &Qty) -> Option<Qty> {
        let idx = self.vertices.partition_point(|v| &v.x < x);
        let v = self.vertices.get(idx)?;
        if &v.x == x {
            return Some(v.y.clone());
        }
        if idx == 0 {
            return None;
        }
        let a = &self.vertices[idx - 1];
        let drop = &(&x.checked_sub(&a.x)? / &v.x.checked_sub(&a.x)?) * &a.y.checked_sub(&v.y)?;
        a.y.checked_sub(&drop)
    }

    pub fn to_book(&self) -> Result<Book> {
        isoutil_to_book(self)
    }
}

impl fmt::Display for IsoUtil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vertices {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            v.fmt(f)?;
        }
        write!(f, " @ {}", self.current)
    }
}

fn segment_price(a: &SupplyLevel, b: &SupplyLevel) -> Qty {
    let dx = b.x.checked_sub(&a.x).expect("x increases along the curve");
    let dy = a.y.checked_sub(&b.y).expect("y decreases along the curve");
    &dx / &dy
}

/// One bid atom per segment left of the current level and one ask atom per
/// segment right of it, priced at `−1/slope` with the segment's height drop
/// as volume. A segment containing the current level in its interior is
/// split there, which leaves a bid and an ask at the same price.
pub fn isoutil_to_book(i: &IsoUtil) -> Result<Book> {
    if let Some((vertex, left_price, right_price)) = i.convexity_violation() {
        return Err(Error::NonConvex {
            vertex,
            left_price: left_price.to_string(),
            right_price: right_price.to_string(),
        });
    }
    let c = i.current();
    let mut bids = Vec::new();
    let mut asks = Vec::new();
    for w in i.vertices().windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let price = segment_price(a, b);
        if b.x <= c.x {
            bids.push((price, a.y.checked_sub(&b.y).expect("decreasing")));
        } else if a.x >= c.x {
            asks.push((price, a.y.checked_sub(&b.y).expect("decreasing")));
        } else {
            bids.push((price.clone(), a.y.checked_sub(&c.y).expect("current below a")));
            asks.push((price, c.y.checked_sub(&b.y).expect("current above b")));
        }
    }
    Book::from_levels(bids, asks)
}
