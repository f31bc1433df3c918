//! On-disk formats. All numbers are exact decimal (or `n/d`) strings.

use std::path::Path;

use mdyn_core::{Book, IdealMarket, IsoUtil, PriceGrid, Qty, SupplyLevel};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const BOOK_VERSION: &str = "mdyn-book/1";
pub const ISOUTIL_VERSION: &str = "mdyn-isoutil/1";
pub const IDEAL_VERSION: &str = "mdyn-ideal/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDoc {
    pub price: String,
    pub qty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookDocument {
    pub version: String,
    #[serde(default)]
    pub bids: Vec<LevelDoc>,
    #[serde(default)]
    pub asks: Vec<LevelDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoUtilDocument {
    pub version: String,
    pub vertices: Vec<[String; 2]>,
    pub current: [String; 2],
    /// Derived on output; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convex: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealDocument {
    pub version: String,
    pub temperature: String,
    pub current: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub enum Input {
    Book(Book),
    IsoUtil(IsoUtil),
    Ideal { market: IdealMarket, grid: Option<PriceGrid> },
}

fn qty(s: &str) -> Result<Qty, CliError> {
    s.parse::<Qty>().map_err(|e| CliError::Parse(e.to_string()))
}

fn level(pair: &[String; 2]) -> Result<SupplyLevel, CliError> {
    Ok(SupplyLevel::new(qty(&pair[0])?, qty(&pair[1])?))
}

fn pair(l: &SupplyLevel) -> [String; 2] {
    [l.x.to_string(), l.y.to_string()]
}

fn check_version(found: &str, want: &str) -> Result<(), CliError> {
    if found == want {
        Ok(())
    } else {
        Err(CliError::Parse(format!("unsupported version {found:?}, expected {want:?}")))
    }
}

impl BookDocument {
    pub fn from_book(b: &Book) -> Self {
        let side = |levels: &mut dyn Iterator<Item = &(Qty, Qty)>| {
            levels.map(|(p, q)| LevelDoc { price: p.to_string(), qty: q.to_string() }).collect()
        };
        BookDocument { version: BOOK_VERSION.into(), bids: side(&mut b.bids()), asks: side(&mut b.asks()) }
    }

    pub fn to_book(&self) -> Result<Book, CliError> {
        check_version(&self.version, BOOK_VERSION)?;
        let side = |levels: &[LevelDoc]| -> Result<Vec<(Qty, Qty)>, CliError> {
            levels.iter().map(|l| Ok((qty(&l.price)?, qty(&l.qty)?))).collect()
        };
        Ok(Book::from_levels(side(&self.bids)?, side(&self.asks)?)?)
    }
}

impl IsoUtilDocument {
    pub fn from_isoutil(i: &IsoUtil) -> Self {
        IsoUtilDocument {
            version: ISOUTIL_VERSION.into(),
            vertices: i.vertices().iter().map(pair).collect(),
            current: pair(i.current()),
            convex: Some(i.is_convex()),
        }
    }

    pub fn to_isoutil(&self) -> Result<IsoUtil, CliError> {
        check_version(&self.version, ISOUTIL_VERSION)?;
        let vertices = self.vertices.iter().map(level).collect::<Result<Vec<_>, _>>()?;
        Ok(IsoUtil::new(vertices, level(&self.current)?)?)
    }
}

impl IdealDocument {
    pub fn to_market(&self) -> Result<(IdealMarket, Option<PriceGrid>), CliError> {
        check_version(&self.version, IDEAL_VERSION)?;
        let t = qty(&self.temperature)?.to_f64();
        let c = level(&self.current)?;
        let market = IdealMarket::new(t, c.x.to_f64(), c.y.to_f64())?;
        let grid = self.grid.as_deref().map(str::parse).transpose()?;
        Ok((market, grid))
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    side: String,
    price: String,
    qty: String,
}

/// Book from CSV with header `side,price,qty`; `side` is `bid` or `ask`.
pub fn parse_csv_book(text: &str) -> Result<Book, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut bids, mut asks) = (Vec::new(), Vec::new());
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(|e| CliError::Parse(format!("csv: {e}")))?;
        let atom = (qty(&row.price)?, qty(&row.qty)?);
        match row.side.to_ascii_lowercase().as_str() {
            "bid" | "buy" => bids.push(atom),
            "ask" | "sell" => asks.push(atom),
            other => return Err(CliError::Parse(format!("csv: unknown side {other:?}"))),
        }
    }
    Ok(Book::from_levels(bids, asks)?)
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parses a document, telling the kinds apart by their `version` tag.
pub fn parse_input(text: &str, path: &Path) -> Result<Input, CliError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return parse_csv_book(text).map(Input::Book);
    }
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Parse("missing \"version\" field".into()))?
        .to_owned();
    match version.as_str() {
        BOOK_VERSION => from_value::<BookDocument>(value)?.to_book().map(Input::Book),
        ISOUTIL_VERSION => from_value::<IsoUtilDocument>(value)?.to_isoutil().map(Input::IsoUtil),
        IDEAL_VERSION => {
            let (market, grid) = from_value::<IdealDocument>(value)?.to_market()?;
            Ok(Input::Ideal { market, grid })
        }
        other => Err(CliError::Parse(format!("unknown document version {other:?}"))),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
