//! Finite atomic supply and demand measures and their remaining functions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qty::Qty;
use crate::stepfn::{Direction, StepFn};

/// Finite sum of Dirac masses on `(0, ∞)`, sorted by price with one atom per price.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AtomicMeasure {
    atoms: Vec<(Qty, Qty)>,
}

impl AtomicMeasure {
    /// Builds a measure from `(price, mass)` pairs. Atoms sharing a price are
    /// merged by summing their mass.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Qty, Qty)>,
    {
        let mut merged: BTreeMap<Qty, Qty> = BTreeMap::new();
        for (price, mass) in atoms {
            if !price.is_positive() {
                return Err(Error::InvalidAtom(format!("price {price} must be positive")));
            }
            if !mass.is_positive() {
                return Err(Error::InvalidAtom(format!("mass {mass} at price {price} must be positive")));
            }
            *merged.entry(price).or_default() += mass;
        }
        Ok(AtomicMeasure { atoms: merged.into_iter().collect() })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Atoms in increasing price order.
    pub fn atoms(&self) -> &[(Qty, Qty)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_mass(&self) -> Qty {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// `Σ price · mass`.
    pub fn total_value(&self) -> Qty {
        self.atoms.iter().map(|(p, m)| p * m).sum()
    }

    pub fn min_price(&self) -> Option<&Qty> {
        self.atoms.first().map(|(p, _)| p)
    }

    pub fn max_price(&self) -> Option<&Qty> {
        self.atoms.last().map(|(p, _)| p)
    }

    /// Atom-wise sum of two measures.
    pub fn merge(&self, other: &AtomicMeasure) -> AtomicMeasure {
        let mut merged: BTreeMap<Qty, Qty> = self.atoms.iter().cloned().collect();
        for (p, m) in &other.atoms {
            *merged.entry(p.clone()).or_default() += m;
        }
        AtomicMeasure { atoms: merged.into_iter().collect() }
    }
}

/// Buy-side measure `μ_d`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DemandMeasure(AtomicMeasure);

/// Sell-side measure `μ_s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SupplyMeasure(AtomicMeasure);

macro_rules! role_measure {
    ($name:ident) => {
        impl $name {
            pub fn new<I>(atoms: I) -> Result<Self>
            where
                I: IntoIterator<Item = (Qty, Qty)>,
            {
                AtomicMeasure::new(atoms).map($name)
            }

            pub fn empty() -> Self {
                Self::default()
            }

            pub fn measure(&self) -> &AtomicMeasure {
                &self.0
            }

            pub fn atoms(&self) -> &[(Qty, Qty)] {
                self.0.atoms()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn total_mass(&self) -> Qty {
                self.0.total_mass()
            }

            pub fn merge(&self, other: &$name) -> $name {
                $name(self.0.merge(&other.0))
            }
        }

        impl From<AtomicMeasure> for $name {
            fn from(m: AtomicMeasure) -> Self {
                $name(m)
            }
        }
    };
}

role_measure!(DemandMeasure);
role_measure!(SupplyMeasure);

impl DemandMeasure {
    /// Remaining demand function `F_d(p) = μ_d((p, ∞))`.
    pub fn rdf(&self) -> StepFn {
        rdf_of(self)
    }

    pub fn from_rdf(f: &StepFn) -> Result<Self> {
        measure_of_rdf(f)
    }
}

impl SupplyMeasure {
    /// Remaining supply function `F_s(p) = μ_s((0, p])`.
    pub fn rsf(&self) -> StepFn {
        rsf_of(self)
    }

    pub fn from_rsf(f: &StepFn) -> Result<Self> {
        measure_of_rsf(f)
    }
}

pub fn rdf_of(d: &DemandMeasure) -> StepFn {
    let mut remaining = d.total_mass();
    let left = remaining.clone();
    let steps = d
        .atoms()
        .iter()
        .map(|(p, m)| {
            remaining = remaining.checked_sub(m).expect("atom masses sum to the total");
            (p.clone(), remaining.clone())
        })
        .collect();
    StepFn::new(Direction::NonIncreasing, left, steps).expect("remaining demand is non-increasing")
}

pub fn rsf_of(s: &SupplyMeasure) -> StepFn {
    let mut cumulative = Qty::zero();
    let steps = s
        .atoms()
        .iter()
        .map(|(p, m)| {
            cumulative += m;
            (p.clone(), cumulative.clone())
        })
        .collect();
    StepFn::new(Direction::NonDecreasing, Qty::zero(), steps)
        .expect("remaining supply is non-decreasing")
}

/// Recovers the demand measure from a remaining demand function: one atom
/// per downward jump, with the jump size as mass.
pub fn measure_of_rdf(f: &StepFn) -> Result<DemandMeasure> {
    if !f.is_constant() && f.direction() != Direction::NonIncreasing {
        return Err(Error::NotMonotone {
            expected: "non-increasing",
            detail: "a remaining demand function cannot increase".into(),
        });
    }
    if !f.right_value().is_zero() {
        return Err(Error::NotVanishing { end: "right", value: f.right_value().to_string() });
    }
    DemandMeasure::new(f.jumps().map(|(p, size)| (p.clone(), size)))
}

/// Recovers the supply measure from a remaining supply function.
pub fn measure_of_rsf(f: &StepFn) -> Result<SupplyMeasure> {
    if !f.is_constant() && f.direction() != Direction::NonDecreasing {
        return Err(Error::NotMonotone {
            expected: "non-decreasing",
            detail: "a remaining supply function cannot decrease".into(),
        });
    }
    if !f.left_value().is_zero() {
        return Err(Error::NotVanishing { end: "left", value: f.left_value().to_string() });
    }
    SupplyMeasure::new(f.jumps().map(|(p, size)| (p.clone(), size)))
}
