//! Smooth utility functions, temperature and marginal prices.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UtilityFn {
    /// `U(x, y) = ln x + ln y`.
    Ideal,
    /// `U(x, y) = A x^β y^α` with `A > 0` and `0 < α, β < 1`.
    CobbDouglas { scale: f64, alpha: f64, beta: f64 },
}

/// `T = e^{U(x, y)}` and the mean activity `√T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Temperature {
    pub t: f64,
    pub mean_activity: f64,
}

impl UtilityFn {
    pub fn cobb_douglas(scale: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
        }
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        Ok(UtilityFn::CobbDouglas { scale, alpha, beta })
    }

    fn check_interior(x: f64, y: f64) -> Result<()> {
        if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
            Ok(())
        } else {
            Err(Error::BoundarySupply { x: x.to_string(), y: y.to_string() })
        }
    }

    /// `U(x, y)` in nats.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        Self::check_interior(x, y)?;
        Ok(match *self {
            UtilityFn::Ideal => x.ln() + y.ln(),
            UtilityFn::CobbDouglas { scale, alpha, beta } => scale * x.powf(beta) * y.powf(alpha),
        })
    }

    /// `(∂U/∂x, ∂U/∂y)`.
    pub fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        Self::check_interior(x, y)?;
        Ok(match *self {
            UtilityFn::Ideal => (1.0 / x, 1.0 / y),
            UtilityFn::CobbDouglas { scale, alpha, beta } => {
                let u = scale * x.powf(beta) * y.powf(alpha);
                (beta * u / x, alpha * u / y)
            }
        })
    }

    /// Marginal price of `Y` in units of `X`: `∂_y U / ∂_x U`.
    pub fn marginal_price(&self, x: f64, y: f64) -> Result<f64> {
        Self::check_interior(x, y)?;
        Ok(match *self {
            UtilityFn::Ideal => x / y,
            UtilityFn::CobbDouglas { alpha, beta, .. } => (alpha * x) / (beta * y),
        })
    }

    pub fn temperature(&self, x: f64, y: f64) -> Result<Temperature> {
        let t = self.value(x, y)?.exp();
        Ok(Temperature { t, mean_activity: t.sqrt() })
    }
}

pub fn temperature(u: &UtilityFn, x: f64, y: f64) -> Result<Temperature> {
    u.temperature(x, y)
}

pub fn utility_marginal_price(u: &UtilityFn, x: f64, y: f64) -> Result<f64> {
    u.marginal_price(x, y)
}
