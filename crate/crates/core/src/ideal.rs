//! Ideal (constant-product) markets: closed-form remaining functions and
//! discretization onto exact piecewise-linear iso-utils.

use std::fmt;
use std::str::FromStr;

use crate::book::{Book, SupplyLevel};
use crate::error::{Error, Result};
use crate::isoutil::IsoUtil;
use crate::qty::Qty;

const LEVEL_TOLERANCE: f64 = 1e-9;

/// Finite arithmetic price grid `lo, lo + step, …` up to `hi`, written `lo:hi:step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceGrid {
    lo: Qty,
    hi: Qty,
    step: Qty,
}

impl PriceGrid {
    pub fn new(lo: Qty, hi: Qty, step: Qty) -> Result<Self> {
        if !lo.is_positive() {
            return Err(Error::InvalidParameter(format!("grid start {lo} must be positive")));
        }
        if hi < lo {
            return Err(Error::InvalidParameter(format!("grid end {hi} is below start {lo}")));
        }
        if !step.is_positive() {
            return Err(Error::InvalidParameter(format!("grid step {step} must be positive")));
        }
        Ok(PriceGrid { lo, hi, step })
    }

    pub fn lo(&self) -> &Qty {
        &self.lo
    }

    pub fn hi(&self) -> &Qty {
        &self.hi
    }

    pub fn step(&self) -> &Qty {
        &self.step
    }

    pub fn points(&self) -> Vec<Qty> {
        let mut out = Vec::new();
        let mut p = self.lo.clone();
        while p <= self.hi {
            out.push(p.clone());
            p += &self.step;
        }
        out
    }
}

impl FromStr for PriceGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid {s:?} is not of the form lo:hi:step")));
        };
        PriceGrid::new(lo.parse()?, hi.parse()?, step.parse()?)
    }
}

impl fmt::Display for PriceGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

/// Market with utility `ln x + ln y`, whose iso-utils are the hyperbolas
/// `x·y = T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealMarket {
    temperature: f64,
    x0: f64,
    y0: f64,
}

impl IdealMarket {
    /// Validates that the current level lies on `x·y = T`.
    pub fn new(temperature: f64, x0: f64, y0: f64) -> Result<Self> {
        for (name, v) in [("temperature", temperature), ("x", x0), ("y", y0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let product = x0 * y0;
        if ((product - temperature) / temperature).abs() > LEVEL_TOLERANCE {
            return Err(Error::InconsistentLevels(format!(
                "x·y = {product} at ({x0}, {y0}) but the temperature is {temperature}"
            )));
        }
        Ok(IdealMarket { temperature, x0, y0 })
    }

    pub fn from_levels(x0: f64, y0: f64) -> Result<Self> {
        Self::new(x0 * y0, x0, y0)
    }

    /// Market of mean activity `a` whose marginal price is `price`.
    pub fn from_activity(a: f64, price: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && price.is_finite() && price > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "activity {a} and price {price} must be positive and finite"
            )));
        }
        let s = price.sqrt();
        Self::new(a * a, a * s, a / s)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `A = √T`.
    pub fn activity(&self) -> f64 {
        self.temperature.sqrt()
    }

    pub fn current(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }

    /// `p̂ = x₀ / y₀`.
    pub fn marginal_price(&self) -> f64 {
        self.x0 / self.y0
    }

    /// Point of the iso-util where the marginal price is `p`.
    pub fn level_at_price(&self, p: f64) -> (f64, f64) {
        ((self.temperature * p).sqrt(), (self.temperature / p).sqrt())
    }

    /// `F_s(p) = A(1/√p̂ − 1/√p)` for `p ≥ p̂`, else 0.
    pub fn rsf(&self, p: f64) -> f64 {
        let p_hat = self.marginal_price();
        if p < p_hat {
            0.0
        } else {
            self.activity() * (1.0 / p_hat.sqrt() - 1.0 / p.sqrt())
        }
    }

    /// `F_d(p) = A(1/√p − 1/√p̂)` for `p < p̂`, else 0.
    pub fn rdf(&self, p: f64) -> f64 {
        let p_hat = self.marginal_price();
        if p >= p_hat {
            0.0
        } else {
            self.activity() * (1.0 / p.sqrt() - 1.0 / p_hat.sqrt())
        }
    }

    /// Exact piecewise-linear iso-util with one vertex per grid price plus
    /// the current level. Vertex coordinates are the nearest doubles to the
    /// curve points, taken as exact rationals.
    pub fn discretize(&self, grid: &PriceGrid) -> Result<IsoUtil> {
        let p_hat = self.marginal_price();
        let current = SupplyLevel::new(Qty::from_f64(self.x0)?, Qty::from_f64(self.y0)?);
        let mut vertices = Vec::new();
        let mut placed = false;
        for p in grid.points() {
            let p = p.to_f64();
            if ((p - p_hat) / p_hat).abs() <= LEVEL_TOLERANCE {
                continue;
            }
            if !placed && p > p_hat {
                vertices.push(current.clone());
                placed = true;
            }
            let (x, y) = self.level_at_price(p);
            vertices.push(SupplyLevel::new(Qty::from_f64(x)?, Qty::from_f64(y)?));
        }
        if !placed {
            vertices.push(current.clone());
        }
        IsoUtil::new(vertices, current)
    }

    /// The book of [`IdealMarket::discretize`]. Its remaining functions agree
    /// with the closed forms at every grid price.
    pub fn book(&self, grid: &PriceGrid) -> Result<Book> {
        self.discretize(grid)?.to_book()
    }
}
