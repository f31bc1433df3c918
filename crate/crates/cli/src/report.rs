use std::fmt::Write as _;

use mdyn_core::{AggregationResult, ClearingOutcome, SupplyLevel};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelsDoc {
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntropyDoc {
    pub dx: String,
    pub dy: String,
}

/// Machine-readable summary of a clearing or aggregation run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<usize>,
    pub p_d: String,
    pub p_s: String,
    pub clearing_volume: String,
    pub profit: String,
    pub entropy: EntropyDoc,
    pub levels_before: LevelsDoc,
    pub levels_after: LevelsDoc,
    pub settled: bool,
}

fn levels(l: &SupplyLevel) -> LevelsDoc {
    LevelsDoc { x: l.x.to_string(), y: l.y.to_string() }
}

impl Report {
    pub fn from_clearing(out: &ClearingOutcome) -> Self {
        Report {
            mode: out.mode.to_string(),
            inputs: None,
            p_d: out.profile.p_d().to_string(),
            p_s: out.profile.p_s().to_string(),
            clearing_volume: out.profile.clearing_volume().to_string(),
            profit: out.profit.to_string(),
            entropy: EntropyDoc { dx: out.entropy.dx.to_string(), dy: out.entropy.dy.to_string() },
            levels_before: levels(&out.levels_before),
            levels_after: levels(&out.levels_after),
            settled: out.book.is_settled(),
        }
    }

    pub fn from_aggregation(r: &AggregationResult, inputs: usize) -> Self {
        let profile = mdyn_core::crossing(&r.unsettled);
        Report {
            mode: r.mode.to_string(),
            inputs: Some(inputs),
            p_d: profile.p_d().to_string(),
            p_s: profile.p_s().to_string(),
            clearing_volume: profile.clearing_volume().to_string(),
            profit: r.profit.to_string(),
            entropy: EntropyDoc { dx: r.entropy.dx.to_string(), dy: r.entropy.dy.to_string() },
            levels_before: levels(&r.levels_before),
            levels_after: levels(&r.levels_after),
            settled: r.settled.is_settled(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(s, "{k:<16}{v}");
        };
        row("mode", self.mode.clone());
        if let Some(n) = self.inputs {
            row("inputs", n.to_string());
        }
        row("p_d", self.p_d.clone());
        row("p_s", self.p_s.clone());
        row("clearing volume", self.clearing_volume.clone());
        row("profit", self.profit.clone());
        row("entropy", format!("({}, {})", self.entropy.dx, self.entropy.dy));
        row(
            "levels",
            format!(
                "({}, {}) -> ({}, {})",
                self.levels_before.x, self.levels_before.y, self.levels_after.x, self.levels_after.y
            ),
        );
        row("settled", self.settled.to_string());
        s
    }
}
