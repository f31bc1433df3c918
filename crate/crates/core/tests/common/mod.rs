#![allow(dead_code)]

use mdyn_core::{Book, Direction, Extended, Qty, StepFn, SupplyLevel};
use proptest::prelude::*;

pub fn q(n: u64) -> Qty {
    Qty::from(n)
}

pub fn levels(pairs: &[(u64, u64)]) -> Vec<(Qty, Qty)> {
    pairs.iter().map(|&(p, m)| (q(p), q(m))).collect()
}

pub fn book(bids: &[(u64, u64)], asks: &[(u64, u64)]) -> Book {
    Book::from_levels(levels(bids), levels(asks)).unwrap()
}

pub fn lv(x: u64, y: u64) -> SupplyLevel {
    SupplyLevel::new(q(x), q(y))
}

pub fn settled() -> Book {
    book(
        &[(100, 12), (94, 10), (80, 20), (40, 30), (10, 50)],
        &[(110, 12), (140, 20), (170, 30), (250, 50), (500, 50)],
    )
}

pub fn crossed() -> Book {
    book(
        &[(300, 10), (135, 20), (110, 19), (100, 12), (94, 10), (80, 20), (40, 30), (10, 50)],
        &[(50, 10), (100, 12), (105, 14), (110, 25), (140, 20), (170, 30), (250, 50), (500, 50)],
    )
}

pub fn reflected() -> Book {
    book(
        &[(110, 13), (105, 14), (100, 24), (94, 10), (80, 20), (50, 10), (40, 30), (10, 50)],
        &[(110, 31), (135, 20), (140, 20), (170, 30), (250, 50), (300, 10), (500, 50)],
    )
}

pub fn car_market() -> Vec<Book> {
    let mut books = vec![book(&[(20000, 1)], &[]); 5];
    books.push(book(&[], &[(15000, 4), (40000, 1)]));
    books
}

/// Prices are small integers or quarters so that crossings and ties are common.
pub fn price() -> impl Strategy<Value = Qty> {
    prop_oneof![
        (1u64..=30).prop_map(Qty::from),
        (4u64..=120).prop_map(|n| Qty::from_ratio(n, 4)),
    ]
}

pub fn mass() -> impl Strategy<Value = Qty> {
    prop_oneof![
        4 => (1u64..=20).prop_map(Qty::from),
        1 => (1u64..=40).prop_map(|n| Qty::from_ratio(n, 3)),
    ]
}

pub fn side(max: usize) -> impl Strategy<Value = Vec<(Qty, Qty)>> {
    prop::collection::vec((price(), mass()), 0..=max)
}

pub fn any_book() -> impl Strategy<Value = Book> {
    (side(6), side(6)).prop_map(|(b, a)| Book::from_levels(b, a).unwrap())
}

pub fn settled_book() -> impl Strategy<Value = Book> {
    (side(6), side(6), 1u64..=30).prop_map(|(b, a, m)| {
        let m = Qty::from(m);
        let bids = b.into_iter().filter(|(p, _)| p < &m).collect::<Vec<_>>();
        let asks = a.into_iter().filter(|(p, _)| p > &m).collect::<Vec<_>>();
        Book::from_levels(bids, asks).unwrap()
    })
}

/// Monotone step function with up to eight breakpoints.
pub fn step_fn(direction: Direction) -> impl Strategy<Value = StepFn> {
    (
        prop::collection::btree_set(1u64..=200, 0..=8),
        prop::collection::vec(1u64..=9, 8),
        0u64..=5,
    )
        .prop_map(move |(breaks, incs, base)| {
            let n = breaks.len();
            let mut values: Vec<u64> = Vec::with_capacity(n + 1);
            let mut v = base;
            values.push(v);
            for inc in incs.iter().take(n) {
                v += inc;
                values.push(v);
            }
            if direction == Direction::NonIncreasing {
                values.reverse();
            }
            let steps = breaks
                .into_iter()
                .zip(values[1..].iter())
                .map(|(b, &v)| (Qty::from_ratio(b, 2), Qty::from(v)))
                .collect();
            StepFn::new(direction, Qty::from(values[0]), steps).unwrap()
        })
}

/// Greedy matching of the highest remaining bid against the lowest remaining
/// ask while the bid is at least the ask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub volume: Qty,
    pub profit: Qty,
    pub bid_value: Qty,
    pub ask_value: Qty,
    /// Unit blocks left over, per side.
    pub residual_bids: Vec<(Qty, Qty)>,
    pub residual_asks: Vec<(Qty, Qty)>,
    pub matched_bids: Vec<(Qty, Qty)>,
    pub matched_asks: Vec<(Qty, Qty)>,
}

pub fn greedy_match(b: &Book) -> Matching {
    let mut bids: Vec<(Qty, Qty)> = b.bids().cloned().collect();
    let mut asks: Vec<(Qty, Qty)> = b.asks().cloned().collect();
    let (mut i, mut j) = (0, 0);
    let mut m = Matching {
        volume: Qty::zero(),
        profit: Qty::zero(),
        bid_value: Qty::zero(),
        ask_value: Qty::zero(),
        residual_bids: vec![],
        residual_asks: vec![],
        matched_bids: vec![],
        matched_asks: vec![],
    };
    while i < bids.len() && j < asks.len() && bids[i].0 >= asks[j].0 {
        let take = bids[i].1.clone().min(asks[j].1.clone());
        let (pb, pa) = (bids[i].0.clone(), asks[j].0.clone());
        m.volume += &take;
        m.profit += &(&pb.checked_sub(&pa).unwrap() * &take);
        m.bid_value += &(&pb * &take);
        m.ask_value += &(&pa * &take);
        m.matched_bids.push((pb, take.clone()));
        m.matched_asks.push((pa, take.clone()));
        bids[i].1 = bids[i].1.checked_sub(&take).unwrap();
        asks[j].1 = asks[j].1.checked_sub(&take).unwrap();
        if bids[i].1.is_zero() {
            i += 1;
        }
        if asks[j].1.is_zero() {
            j += 1;
        }
    }
    m.residual_bids = bids.into_iter().filter(|(_, v)| v.is_positive()).collect();
    m.residual_asks = asks.into_iter().filter(|(_, v)| v.is_positive()).collect();
    m
}

impl Matching {
    pub fn adiabatic_book(&self) -> Book {
        Book::from_levels(self.residual_bids.clone(), self.residual_asks.clone()).unwrap()
    }

    pub fn isoutil_book(&self) -> Book {
        let mut bids = self.residual_bids.clone();
        bids.extend(self.matched_asks.iter().cloned());
        let mut asks = self.residual_asks.clone();
        asks.extend(self.matched_bids.iter().cloned());
        Book::from_levels(bids, asks).unwrap()
    }
}

/// `sup{x > 0 | f(x) ≤ y}` (non-decreasing) or `sup{x > 0 | f(x) > y}`
/// (non-increasing), read off the left limits at the breakpoints.
pub fn inverse_oracle(f: &StepFn, y: &Qty) -> Extended {
    let holds = |v: &Qty| match f.direction() {
        Direction::NonDecreasing => v <= y,
        Direction::NonIncreasing => v > y,
    };
    if holds(f.right_value()) {
        return Extended::Infinite;
    }
    let best = f.breakpoints().filter(|b| holds(f.left_limit(b))).max().cloned();
    Extended::Finite(best.unwrap_or_else(Qty::zero))
}
