//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use mdyn_cli::document::{parse_input, Input};
use mdyn_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn q(n: u64) -> Qty {
    Qty::from(n)
}

fn read(p: &Path) -> Result<String, String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn load(name: &str) -> Result<Input, String> {
    let p = fixture(name);
    parse_input(&read(&p)?, &p).map_err(|e| e.to_string())
}

fn mdyn(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mdyn")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("mdyn {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn json(p: &Path) -> Result<Value, String> {
    serde_json::from_str(&read(p)?).map_err(|e| e.to_string())
}

fn expect_fields(report: &Value, fields: &[(&str, &str)]) -> Check {
    for (path, want) in fields {
        let got = report.pointer(path).and_then(Value::as_str);
        ensure!(got == Some(*want), "report {path} = {got:?}, want {want}");
    }
    Ok(())
}

fn golden_clearing(mode: &str, golden: &str, fields: &[(&str, &str)]) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = dir.path().join("report.json");
    let t2 = fixture("crossed.json");
    let out = mdyn(&["clear", "--mode", mode, "--report-json", report.to_str().unwrap(), t2.to_str().unwrap()])?;
    ensure!(out == read(&fixture(golden))?, "cleared book differs from {golden}");
    expect_fields(&json(&report)?, fields)
}

fn criterion_1() -> Check {
    golden_clearing(
        "adiabatic",
        "settled.json",
        &[
            ("/clearing_volume", "49"),
            ("/p_d", "110"),
            ("/p_s", "110"),
            ("/profit", "3190"),
            ("/entropy/dx", "7790"),
            ("/entropy/dy", "49"),
            ("/levels_before/x", "13230"),
            ("/levels_before/y", "211"),
            ("/levels_after/x", "5440"),
            ("/levels_after/y", "162"),
        ],
    )
}

fn criterion_2() -> Check {
    golden_clearing(
        "isoutil",
        "reflected.json",
        &[("/entropy/dx", "3190"), ("/entropy/dy", "0"), ("/levels_after/x", "10040"), ("/levels_after/y", "211")],
    )
}

fn criterion_3() -> Check {
    let convert = |to: &str, name: &str| mdyn(&["convert", "--to", to, fixture(name).to_str().unwrap()]);
    ensure!(convert("isoutil", "settled.json")? == read(&fixture("settled_curve.json"))?, "settled -> curve");
    ensure!(convert("book", "settled_curve.json")? == read(&fixture("settled.json"))?, "curve -> settled");
    let t6 = convert("isoutil", "crossed.json")?;
    ensure!(t6 == read(&fixture("crossed_curve.json"))?, "crossed -> curve");
    let doc: Value = serde_json::from_str(&t6).map_err(|e| e.to_string())?;
    ensure!(doc["convex"] == Value::Bool(false), "crossed curve not flagged non-convex");
    ensure!(doc["vertices"].as_array().map(Vec::len) == Some(17), "crossed curve has wrong vertex count");
    Ok(())
}

fn criterion_4() -> Check {
    let Input::IsoUtil(curve) = load("settled_curve.json")? else {
        return Err("settled_curve fixture is not an iso-util".into());
    };
    ensure!(curve.current() == &SupplyLevel::new(q(5440), q(162)), "current level {}", curve.current());
    let m = curve.marginal_prices().map_err(|e| e.to_string())?;
    ensure!(m.bid == Some(q(100)) && m.ask == Some(q(110)), "marginal prices {:?}", m);
    let Input::Book(b) = load("settled.json")? else {
        return Err("settled fixture is not a book".into());
    };
    ensure!(m.bid.as_ref() == b.best_bid() && m.ask.as_ref() == b.best_ask(), "differs from best quotes");
    Ok(())
}

fn criterion_5() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (out, report) = (dir.path().join("agg"), dir.path().join("report.json"));
    let c = fixture("consumer.json");
    let c = c.to_str().unwrap();
    let p = fixture("producer.json");
    mdyn(&[
        "aggregate",
        "--mode",
        "adiabatic",
        "--out",
        out.to_str().unwrap(),
        "--report-json",
        report.to_str().unwrap(),
        c,
        c,
        c,
        c,
        c,
        p.to_str().unwrap(),
    ])?;
    let curve = json(&out.join("settled_isoutil.json"))?;
    let want = serde_json::json!([["0", "2"], ["20000", "1"], ["60000", "0"]]);
    ensure!(curve["vertices"] == want, "settled curve {}", curve["vertices"]);
    expect_fields(
        &json(&report)?,
        &[("/clearing_volume", "4"), ("/entropy/dx", "80000"), ("/entropy/dy", "4"), ("/profit", "20000")],
    )?;

    let path = out.join("unsettled_book.json");
    let Input::Book(unsettled) = parse_input(&read(&path)?, &path).map_err(|e| e.to_string())? else {
        return Err("unsettled output is not a book".into());
    };
    let m = greedy(&unsettled);
    ensure!(m.volume == q(4) && m.profit == q(20000), "greedy oracle gives Z={} P={}", m.volume, m.profit);
    ensure!(
        Entropy { dx: m.bid_value, dy: m.volume } == Entropy { dx: q(80000), dy: q(4) },
        "greedy oracle entropy differs"
    );
    Ok(())
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn criterion_6() -> Check {
    let grid: PriceGrid = "0.05:9:0.05".parse().map_err(|e: Error| e.to_string())?;
    let m = IdealMarket::from_activity(1.0, 1.0).map_err(|e| e.to_string())?;
    let b = m.book(&grid).map_err(|e| e.to_string())?;
    let hot = IdealMarket::new(4.0, 2.0, 2.0).map_err(|e| e.to_string())?;
    let hb = hot.book(&grid).map_err(|e| e.to_string())?;
    let (rsf, rdf, hot_rsf) = (b.rsf(), b.rdf(), hb.rsf());
    for p in grid.points() {
        let pf = p.to_f64();
        let (s, d) = (rsf.eval(&p).to_f64(), rdf.eval(&p).to_f64());
        let want_s = if pf >= 1.0 { 1.0 - 1.0 / pf.sqrt() } else { 0.0 };
        let want_d = if pf < 1.0 { 1.0 / pf.sqrt() - 1.0 } else { 0.0 };
        ensure!(rel(s, want_s) <= 1e-6, "F_s({pf}) = {s}, want {want_s}");
        ensure!(rel(d, want_d) <= 1e-6, "F_d({pf}) = {d}, want {want_d}");
        let hs = hot_rsf.eval(&p).to_f64();
        ensure!(rel(hs, 2.0 * want_s) <= 1e-6, "hot F_s({pf}) = {hs}");
        ensure!(rel(hot.rsf(pf), 2.0 * m.rsf(pf)) <= 1e-12, "closed-form hot F_s({pf})");
    }
    Ok(())
}

fn criterion_7() -> Check {
    let grid: PriceGrid = "0.1:6:0.1".parse().map_err(|e: Error| e.to_string())?;
    let m1 = IdealMarket::from_activity(1.0, 2.0).map_err(|e| e.to_string())?;
    let m2 = IdealMarket::from_activity(3.0, 2.0).map_err(|e| e.to_string())?;
    let books = [m1.book(&grid).map_err(|e| e.to_string())?, m2.book(&grid).map_err(|e| e.to_string())?];
    let sum = aggregate_unsettled(&books).map_err(|e| e.to_string())?;
    let agg = ideal_aggregate_closed_form(1.0, 2.0, 3.0, 2.0).map_err(|e| e.to_string())?;
    let combined = agg.combined().ok_or("same-price aggregate has no combined market")?;
    ensure!(rel(combined.activity(), 4.0) <= 1e-12, "activity {}", combined.activity());
    let reference = IdealMarket::from_activity(4.0, 2.0).map_err(|e| e.to_string())?;
    let (rsf, rdf) = (sum.rsf(), sum.rdf());
    for p in grid.points() {
        let pf = p.to_f64();
        let (s, d) = (rsf.eval(&p).to_f64(), rdf.eval(&p).to_f64());
        ensure!(rel(s, reference.rsf(pf)) <= 1e-6, "aggregate F_s({pf}) = {s}");
        ensure!(rel(d, reference.rdf(pf)) <= 1e-6, "aggregate F_d({pf}) = {d}");
    }
    let t = (m1.temperature().sqrt() + m2.temperature().sqrt()).powi(2);
    ensure!(rel(combined.temperature(), t) <= 1e-12, "temperature {}", combined.temperature());
    ensure!(combined.temperature() > m1.temperature() + m2.temperature(), "temperature not super-additive");
    Ok(())
}

// Greedy oracle: walk bids from the top and asks from the bottom, matching
// while the bid is at least the ask.
struct Matching {
    volume: Qty,
    profit: Qty,
    bid_value: Qty,
    ask_value: Qty,
    residual_bids: Vec<(Qty, Qty)>,
    residual_asks: Vec<(Qty, Qty)>,
}

fn greedy(b: &Book) -> Matching {
    let mut bids: Vec<(Qty, Qty)> = b.bids().cloned().collect();
    let mut asks: Vec<(Qty, Qty)> = b.asks().cloned().collect();
    bids.sort_by(|x, y| y.0.cmp(&x.0));
    asks.sort_by(|x, y| x.0.cmp(&y.0));
    let (mut i, mut j) = (0, 0);
    let (mut volume, mut bid_value, mut ask_value) = (Qty::zero(), Qty::zero(), Qty::zero());
    while i < bids.len() && j < asks.len() && bids[i].0 >= asks[j].0 {
        let take = bids[i].1.clone().min(asks[j].1.clone());
        volume += &take;
        bid_value += &(&bids[i].0 * &take);
        ask_value += &(&asks[j].0 * &take);
        bids[i].1 = bids[i].1.checked_sub(&take).unwrap();
        asks[j].1 = asks[j].1.checked_sub(&take).unwrap();
        if bids[i].1.is_zero() {
            i += 1;
        }
        if asks[j].1.is_zero() {
            j += 1;
        }
    }
    Matching {
        profit: bid_value.checked_sub(&ask_value).unwrap(),
        volume,
        bid_value,
        ask_value,
        residual_bids: bids.into_iter().filter(|l| l.1.is_positive()).collect(),
        residual_asks: asks.into_iter().filter(|l| l.1.is_positive()).collect(),
    }
}

const SEED: u64 = 0x6d64_796e;
const BOOKS: u64 = 10_000;

fn random_side(rng: &mut ChaCha8Rng) -> Vec<(Qty, Qty)> {
    let n = rng.random_range(0..=6);
    (0..n)
        .map(|_| {
            let price = if rng.random_bool(0.5) {
                q(rng.random_range(1..=30))
            } else {
                Qty::from_ratio(rng.random_range(4..=120), 4)
            };
            let mass = if rng.random_bool(0.8) {
                q(rng.random_range(1..=20))
            } else {
                Qty::from_ratio(rng.random_range(1..=40), 3)
            };
            (price, mass)
        })
        .collect()
}

fn random_book(i: u64) -> Book {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(i);
    let bids = random_side(&mut rng);
    let asks = random_side(&mut rng);
    Book::from_levels(bids, asks).unwrap()
}

/// `sup{x > 0 | F_s(x) ≤ y}`: the first ask price where cumulative supply
/// passes `y`.
fn rsf_inverse_oracle(b: &Book, y: &Qty) -> Extended {
    let mut asks: Vec<&(Qty, Qty)> = b.asks().collect();
    asks.sort_by(|x, y| x.0.cmp(&y.0));
    let mut total = Qty::zero();
    for (p, m) in asks {
        total += m;
        if &total > y {
            return Extended::Finite(p.clone());
        }
    }
    Extended::Infinite
}

/// `sup{x > 0 | F_d(x) > y}`: the first bid price, from the top, where the
/// cumulative demand passes `y`.
fn rdf_inverse_oracle(b: &Book, y: &Qty) -> Extended {
    let mut bids: Vec<&(Qty, Qty)> = b.bids().collect();
    bids.sort_by(|x, y| y.0.cmp(&x.0));
    let mut total = Qty::zero();
    for (p, m) in bids {
        total += m;
        if &total > y {
            return Extended::Finite(p.clone());
        }
    }
    Extended::Finite(Qty::zero())
}

fn check_inverses(b: &Book) -> Check {
    let tiny = Qty::from_ratio(1, 1_000_000);
    let (rsf, rdf) = (b.rsf(), b.rdf());
    let (gs, gd) = (rsf.generalized_inverse(), rdf.generalized_inverse());
    ensure!(gs.is_monotone() && gd.is_monotone(), "inverse not monotone");
    let mut ys: Vec<Qty> = vec![Qty::zero()];
    for f in [&rsf, &rdf] {
        for (_, v) in f.steps() {
            ys.push(v.clone());
            ys.push(v + &Qty::from_ratio(1, 7));
        }
    }
    for y in &ys {
        ensure!(gs.eval(y) == &rsf_inverse_oracle(b, y), "rsf inverse at {y}");
        ensure!(gd.eval(y) == &rdf_inverse_oracle(b, y), "rdf inverse at {y}");
        let y2 = y + &tiny;
        ensure!(gs.eval(y) == gs.eval(&y2) && gd.eval(y) == gd.eval(&y2), "right-continuity at {y}");
        ensure!(gs.eval(&y2) >= gs.eval(y) && gd.eval(&y2) <= gd.eval(y), "inverse order at {y}");
    }
    for p in rsf.breakpoints() {
        ensure!(gs.left_limit(rsf.eval(p)) == &Extended::Finite(p.clone()), "rsf proper inverse at {p}");
    }
    for p in rdf.breakpoints() {
        ensure!(gd.eval(rdf.eval(p)) == &Extended::Finite(p.clone()), "rdf proper inverse at {p}");
    }
    Ok(())
}

fn check_book(b: &Book) -> Check {
    let adiabatic = clear(b, ClearingMode::Adiabatic);
    let iso = clear(b, ClearingMode::IsoUtil);
    ensure!(adiabatic.book.is_settled(), "adiabatic output unsettled");
    ensure!(clear_adiabatic(&adiabatic.book).0 == adiabatic.book, "adiabatic clearing not idempotent");

    let before = b.supply_levels();
    for out in [&adiabatic, &iso] {
        let after = out.book.supply_levels();
        let expected = apply_entropy(&before, &out.entropy).map_err(|e| e.to_string())?;
        ensure!(after == expected, "{} conservation: {after} vs {expected}", out.mode);
    }

    let m = greedy(b);
    ensure!(adiabatic.profit == m.profit, "profit {} vs oracle {}", adiabatic.profit, m.profit);
    ensure!(adiabatic.profile.clearing_volume() == &m.volume, "volume vs oracle");
    ensure!(
        adiabatic.entropy == Entropy { dx: m.bid_value.clone(), dy: m.volume.clone() },
        "adiabatic entropy vs oracle"
    );
    ensure!(iso.entropy == Entropy { dx: m.profit.clone(), dy: Qty::zero() }, "iso-util entropy vs oracle");
    let residual = Book::from_levels(m.residual_bids.clone(), m.residual_asks.clone()).unwrap();
    ensure!(adiabatic.book == residual, "adiabatic book vs oracle residual");
    ensure!(adiabatic.profile.matched_ask_value() == m.ask_value, "matched ask value vs oracle");

    ensure!(
        iso.entropy.dx <= adiabatic.entropy.dx && iso.entropy.dy <= adiabatic.entropy.dy,
        "S_i not below S_a"
    );

    for book in [b, &adiabatic.book, &iso.book] {
        let curve = book_to_isoutil(book);
        ensure!(book.is_settled() == curve.is_settled(), "settled vs curve disagree");
        if !book.is_touching() {
            ensure!(book.is_settled() == curve.is_convex(), "settled vs convex disagree");
        }
        if book.is_settled() {
            let back = isoutil_to_book(&curve).map_err(|e| e.to_string())?;
            ensure!(&back == book, "round trip changed a settled book");
        }
    }
    check_inverses(b)
}

fn criterion_8() -> Check {
    let failures: Vec<String> = (0..BOOKS)
        .into_par_iter()
        .filter_map(|i| check_book(&random_book(i)).err().map(|e| format!("book {i}: {e}")))
        .collect();
    ensure!(failures.is_empty(), "{} of {BOOKS} books failed, first: {}", failures.len(), failures[0]);
    Ok(())
}

fn criterion_9() -> Check {
    let kinds = [
        UtilityFn::Ideal,
        UtilityFn::cobb_douglas(1.0, 0.5, 0.5).map_err(|e| e.to_string())?,
        UtilityFn::cobb_douglas(2.0, 0.3, 0.7).map_err(|e| e.to_string())?,
    ];
    for u in &kinds {
        for i in 0..20 {
            for j in 0..20 {
                let (x, y) = (0.5 + 0.5 * i as f64, 0.5 + 0.5 * j as f64);
                let (hx, hy) = (1e-5 * x, 1e-5 * y);
                let v = |a: f64, b: f64| u.value(a, b).map_err(|e| e.to_string());
                let ux = (v(x + hx, y)? - v(x - hx, y)?) / (2.0 * hx);
                let uy = (v(x, y + hy)? - v(x, y - hy)?) / (2.0 * hy);
                let analytic = utility_marginal_price(u, x, y).map_err(|e| e.to_string())?;
                let err = rel(uy / ux, analytic);
                ensure!(err <= 1e-8, "{u:?} at ({x}, {y}): relative error {err:e}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden adiabatic clearing", criterion_1),
        ("golden iso-util clearing", criterion_2),
        ("golden conversion", criterion_3),
        ("marginal prices", criterion_4),
        ("car-market aggregation", criterion_5),
        ("ideal-market closed forms", criterion_6),
        ("ideal aggregation law", criterion_7),
        ("randomized property suite", criterion_8),
        ("numerical derivative check", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(()) => println!("PASS {} {name} ({:.2?})", n + 1, started.elapsed()),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
