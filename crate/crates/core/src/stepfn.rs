//! Monotone right-continuous step functions on `(0, ∞)`.
//!
//! A [`StepFn`] is stored as the value left of its first breakpoint followed
//! by `(breakpoint, value)` pairs, where each value holds on the half-open
//! interval starting at its breakpoint. Left limits are derived, never stored.
//! Representations are canonical: a breakpoint is only kept where the value
//! actually changes, so structural equality is functional equality.

use std::ops::{Bound, RangeBounds};

use crate::error::{Error, Result};
use crate::qty::{Extended, Qty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

impl Direction {
    fn name(self) -> &'static str {
        match self {
            Direction::NonIncreasing => "non-increasing",
            Direction::NonDecreasing => "non-decreasing",
        }
    }

    fn allows<T: Ord>(self, before: &T, after: &T) -> bool {
        match self {
            Direction::NonIncreasing => after <= before,
            Direction::NonDecreasing => after >= before,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFn {
    direction: Direction,
    left: Qty,
    steps: Vec<(Qty, Qty)>,
}

impl StepFn {
    /// Builds a step function from its value left of the first breakpoint and
    /// `(breakpoint, value)` pairs. Breakpoints must be positive and strictly
    /// increasing; values must be monotone in `direction`.
    pub fn new(direction: Direction, left: Qty, steps: Vec<(Qty, Qty)>) -> Result<Self> {
        let mut canonical: Vec<(Qty, Qty)> = Vec::with_capacity(steps.len());
        let mut prev_break: Option<&Qty> = None;
        let mut prev_value = &left;
        for (b, v) in &steps {
            if !b.is_positive() {
                return Err(Error::NotMonotone {
                    expected: direction.name(),
                    detail: format!("breakpoint {b} is not positive"),
                });
            }
            if prev_break.is_some_and(|p| p >= b) {
                return Err(Error::NotMonotone {
                    expected: direction.name(),
                    detail: format!("breakpoints not strictly increasing at {b}"),
                });
            }
            if !direction.allows(prev_value, v) {
                return Err(Error::NotMonotone {
                    expected: direction.name(),
                    detail: format!("value {prev_value} followed by {v} at {b}"),
                });
            }
            prev_break = Some(b);
            prev_value = v;
        }
        let mut last = left.clone();
        for (b, v) in steps {
            if v != last {
                last = v.clone();
                canonical.push((b, v));
            }
        }
        Ok(StepFn { direction, left, steps: canonical })
    }

    pub fn constant(direction: Direction, value: Qty) -> Self {
        StepFn { direction, left: value, steps: Vec::new() }
    }

    pub fn zero(direction: Direction) -> Self {
        Self::constant(direction, Qty::zero())
    }

    /// Samples `f` at every cut point and just left of the smallest one.
    ///
    /// Exact whenever `f` is constant on each interval between consecutive
    /// cuts, which holds for any pointwise expression built from step
    /// functions whose breakpoints are all among `cuts`.
    pub(crate) fn tabulate<F>(direction: Direction, cuts: Vec<Qty>, f: F) -> Result<Self>
    where
        F: Fn(&Qty) -> Qty,
    {
        let mut cuts = cuts;
        cuts.retain(Qty::is_positive);
        cuts.sort();
        cuts.dedup();
        let probe = match cuts.first() {
            Some(first) => first / &Qty::from(2u64),
            None => Qty::one(),
        };
        let left = f(&probe);
        let steps = cuts.into_iter().map(|c| {
            let v = f(&c);
            (c, v)
        });
        StepFn::new(direction, left, steps.collect())
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Value on `(0, first breakpoint)`.
    pub fn left_value(&self) -> &Qty {
        &self.left
    }

    /// Value beyond the last breakpoint.
    pub fn right_value(&self) -> &Qty {
        self.steps.last().map_or(&self.left, |(_, v)| v)
    }

    pub fn steps(&self) -> &[(Qty, Qty)] {
        &self.steps
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Qty> + '_ {
        self.steps.iter().map(|(b, _)| b)
    }

    pub fn is_constant(&self) -> bool {
        self.steps.is_empty()
    }

    /// `f(p)` under right-continuity.
    pub fn eval(&self, p: &Qty) -> &Qty {
        let idx = self.steps.partition_point(|(b, _)| b <= p);
        if idx == 0 {
            &self.left
        } else {
            &self.steps[idx - 1].1
        }
    }

    /// `lim_{q↑p} f(q)`.
    pub fn left_limit(&self, p: &Qty) -> &Qty {
        let idx = self.steps.partition_point(|(b, _)| b < p);
        if idx == 0 {
            &self.left
        } else {
            &self.steps[idx - 1].1
        }
    }

    /// Jump points with the absolute size of each jump.
    pub fn jumps(&self) -> impl Iterator<Item = (&Qty, Qty)> + '_ {
        let befores = std::iter::once(&self.left).chain(self.steps.iter().map(|(_, v)| v));
        self.steps
            .iter()
            .zip(befores)
            .map(|((b, after), before)| (b, before.abs_diff(after)))
    }

    /// `∫ p d|f|(p)` over `region`, i.e. `Σ price · |jump|` over the jump
    /// points inside the region.
    pub fn stieltjes_price_integral<R: RangeBounds<Qty>>(&self, region: R) -> Qty {
        self.jumps()
            .filter(|(b, _)| region.contains(*b))
            .map(|(b, size)| b * &size)
            .sum()
    }

    /// Pointwise sum; the breakpoints of the result are the merged union.
    pub fn add(&self, other: &StepFn) -> Result<StepFn> {
        let direction = self.combined_direction(other)?;
        let cuts = self.breakpoints().chain(other.breakpoints()).cloned().collect();
        Ok(StepFn::tabulate(direction, cuts, |p| self.eval(p) + other.eval(p))
            .expect("sum of same-direction monotone functions is monotone"))
    }

    /// Pointwise `min(f, cap)`.
    pub fn min_with(&self, cap: &Qty) -> StepFn {
        let cuts = self.breakpoints().cloned().collect();
        StepFn::tabulate(self.direction, cuts, |p| self.eval(p).clone().min(cap.clone()))
            .expect("capping preserves monotonicity")
    }

    fn combined_direction(&self, other: &StepFn) -> Result<Direction> {
        match (self.is_constant(), other.is_constant()) {
            (true, _) => Ok(other.direction),
            (_, true) => Ok(self.direction),
            _ if self.direction == other.direction => Ok(self.direction),
            _ => Err(Error::DirectionMismatch),
        }
    }

    /// The generalized inverse.
    ///
    /// For non-decreasing `f`: `g(y) = sup{x > 0 | f(x) ≤ y}`; for
    /// non-increasing `f`: `g(y) = sup{x > 0 | f(x) > y}`; with `sup ∅ = 0`.
    /// The breakpoints of `g` are the value levels of `f`.
    pub fn generalized_inverse(&self) -> InverseFn {
        // Levels v_{-1} = left, v_0, .., v_{n-1}; breakpoints b_0, .., b_{n-1}.
        let levels: Vec<&Qty> =
            std::iter::once(&self.left).chain(self.steps.iter().map(|(_, v)| v)).collect();
        let breaks: Vec<&Qty> = self.steps.iter().map(|(b, _)| b).collect();
        match self.direction {
            Direction::NonDecreasing => {
                // g = 0 below v_{-1}, b_i on [v_{i-1}, v_i), ∞ from v_{n-1} on.
                let mut steps: Vec<(Qty, Extended)> = Vec::with_capacity(levels.len());
                for (i, level) in levels.iter().enumerate() {
                    let value = match breaks.get(i) {
                        Some(b) => Extended::Finite((*b).clone()),
                        None => Extended::Infinite,
                    };
                    steps.push(((*level).clone(), value));
                }
                InverseFn {
                    direction: Direction::NonDecreasing,
                    left: Extended::Finite(Qty::zero()),
                    steps,
                }
            }
            Direction::NonIncreasing => {
                // g = ∞ below v_{n-1}, b_i on [v_i, v_{i-1}), 0 from v_{-1} on.
                let n = breaks.len();
                let mut steps: Vec<(Qty, Extended)> = Vec::with_capacity(n + 1);
                for i in (0..n).rev() {
                    steps.push((levels[i + 1].clone(), Extended::Finite(breaks[i].clone())));
                }
                steps.push((levels[0].clone(), Extended::Finite(Qty::zero())));
                InverseFn { direction: Direction::NonIncreasing, left: Extended::Infinite, steps }
            }
        }
    }
}

/// Generalized inverse of a [`StepFn`]: a monotone right-continuous step
/// function of the value variable with values in `[0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseFn {
    direction: Direction,
    left: Extended,
    steps: Vec<(Qty, Extended)>,
}

impl InverseFn {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn left_value(&self) -> &Extended {
        &self.left
    }

    pub fn steps(&self) -> &[(Qty, Extended)] {
        &self.steps
    }

    pub fn eval(&self, y: &Qty) -> &Extended {
        let idx = self.steps.partition_point(|(b, _)| b <= y);
        if idx == 0 {
            &self.left
        } else {
            &self.steps[idx - 1].1
        }
    }

    pub fn left_limit(&self, y: &Qty) -> &Extended {
        let idx = self.steps.partition_point(|(b, _)| b < y);
        if idx == 0 {
            &self.left
        } else {
            &self.steps[idx - 1].1
        }
    }

    /// True when the stored values are monotone in the recorded direction.
    pub fn is_monotone(&self) -> bool {
        let values: Vec<&Extended> =
            std::iter::once(&self.left).chain(self.steps.iter().map(|(_, v)| v)).collect();
        values.windows(2).all(|w| self.direction.allows(w[0], w[1]))
    }
}

/// Helper for integration regions: `[lo, ∞)`.
pub fn from_inclusive(lo: &Qty) -> (Bound<Qty>, Bound<Qty>) {
    (Bound::Included(lo.clone()), Bound::Unbounded)
}
