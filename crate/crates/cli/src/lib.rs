//! Command implementations behind the `mdyn` binary.

pub mod document;
pub mod error;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use mdyn_core::{
    aggregate_settled, book_to_isoutil, clear, Book, ClearingMode, IsoUtil, PriceGrid, Qty, StepFn,
};

use crate::document::{parse_input, to_json, BookDocument, Input, IsoUtilDocument};
use crate::error::CliError;
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "mdyn", version, about = "Limit order book clearing and market aggregation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Adiabatic,
    Isoutil,
}

impl From<Mode> for ClearingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Adiabatic => ClearingMode::Adiabatic,
            Mode::Isoutil => ClearingMode::IsoUtil,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Book,
    Isoutil,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Series {
    Isoutil,
    Rdf,
    Rsf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Settle a book and report crossing, profit and entropy.
    Clear {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Write the cleared book here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report_json: Option<PathBuf>,
        file: PathBuf,
    },
    /// Sum several markets and settle the sum.
    Aggregate {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Directory for the unsettled and settled books and iso-utils.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report_json: Option<PathBuf>,
        /// Price grid for ideal-market inputs that do not carry one.
        #[arg(long)]
        grid: Option<String>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Convert between books and iso-utils.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
        file: PathBuf,
    },
    /// Export a curve or remaining function as CSV.
    PlotData {
        #[arg(long, value_enum)]
        series: Series,
        /// `lo:hi:step`
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        file: PathBuf,
    },
}

fn read_input(path: &Path) -> anyhow::Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_input(&text, path).with_context(|| format!("in {}", path.display()))
}

fn parse_grid(grid: Option<&str>) -> anyhow::Result<Option<PriceGrid>> {
    Ok(grid.map(|g| g.parse::<PriceGrid>().map_err(CliError::from)).transpose()?)
}

/// The `--grid` flag wins over a grid stored in the document.
fn need_grid(own: Option<PriceGrid>, flag: Option<&PriceGrid>) -> Result<PriceGrid, CliError> {
    flag.cloned().or(own)
        .ok_or_else(|| CliError::Validation("ideal market document needs a price grid".into()))
}

fn input_book(input: Input, grid: Option<&PriceGrid>) -> Result<Book, CliError> {
    match input {
        Input::Book(b) => Ok(b),
        Input::IsoUtil(i) => Ok(i.to_book()?),
        Input::Ideal { market, grid: own } => Ok(market.book(&need_grid(own, grid)?)?),
    }
}

fn write_file(path: &Path, content: &str) -> anyhow::Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, content: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(p, content),
        None => Ok(stdout.write_all(content.as_bytes())?),
    }
}

fn emit_report(
    report: &Report,
    json_path: Option<&Path>,
    main_on_stdout: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<()> {
    if let Some(p) = json_path {
        write_file(p, &to_json(report))?;
    }
    let text = report.to_text();
    if main_on_stdout {
        stderr.write_all(text.as_bytes())?;
    } else {
        stdout.write_all(text.as_bytes())?;
    }
    Ok(())
}

/// Runs one command, writing results to the given streams.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Clear { mode, out, report_json, file } => {
            let book = input_book(read_input(&file)?, None)?;
            let outcome = clear(&book, mode.into());
            emit(out.as_deref(), &to_json(&BookDocument::from_book(&outcome.book)), stdout)?;
            let report = Report::from_clearing(&outcome);
            emit_report(&report, report_json.as_deref(), out.is_none(), stdout, stderr)
        }
        Command::Aggregate { mode, out, report_json, grid, files } => {
            let grid = parse_grid(grid.as_deref())?;
            let books = files
                .iter()
                .map(|f| input_book(read_input(f)?, grid.as_ref()).with_context(|| format!("in {}", f.display())))
                .collect::<anyhow::Result<Vec<Book>>>()?;
            let result = aggregate_settled(&books, mode.into()).map_err(CliError::from)?;
            match &out {
                Some(dir) => {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    let docs = [
                        ("unsettled_book.json", to_json(&BookDocument::from_book(&result.unsettled))),
                        ("settled_book.json", to_json(&BookDocument::from_book(&result.settled))),
                        (
                            "unsettled_isoutil.json",
                            to_json(&IsoUtilDocument::from_isoutil(&book_to_isoutil(&result.unsettled))),
                        ),
                        (
                            "settled_isoutil.json",
                            to_json(&IsoUtilDocument::from_isoutil(&book_to_isoutil(&result.settled))),
                        ),
                    ];
                    for (name, content) in docs {
                        write_file(&dir.join(name), &content)?;
                    }
                }
                None => emit(None, &to_json(&BookDocument::from_book(&result.settled)), stdout)?,
            }
            let report = Report::from_aggregation(&result, books.len());
            emit_report(&report, report_json.as_deref(), out.is_none(), stdout, stderr)
        }
        Command::Convert { to, out, grid, file } => {
            let grid = parse_grid(grid.as_deref())?;
            let input = read_input(&file)?;
            let content = match to {
                Target::Book => to_json(&BookDocument::from_book(&input_book(input, grid.as_ref())?)),
                Target::Isoutil => {
                    let curve = match input {
                        Input::Book(b) => book_to_isoutil(&b),
                        Input::IsoUtil(i) => i,
                        Input::Ideal { market, grid: own } => {
                            market.discretize(&need_grid(own, grid.as_ref())?).map_err(CliError::from)?
                        }
                    };
                    to_json(&IsoUtilDocument::from_isoutil(&curve))
                }
            };
            emit(out.as_deref(), &content, stdout)
        }
        Command::PlotData { series, grid, out, file } => {
            let grid = parse_grid(grid.as_deref())?;
            let csv = plot_data(read_input(&file)?, series, grid.as_ref())?;
            emit(out.as_deref(), &csv, stdout)
        }
    }
}

fn vertex_rows(i: &IsoUtil) -> String {
    let mut s = String::from("x,y\n");
    for v in i.vertices() {
        s.push_str(&format!("{},{}\n", v.x, v.y));
    }
    s
}

/// Both corners of every jump, plus one sample per grid price; restricted to
/// the grid's range when a grid is given.
fn step_rows(f: &StepFn, grid: Option<&PriceGrid>) -> String {
    let in_range = |p: &Qty| grid.is_none_or(|g| p >= g.lo() && p <= g.hi());
    let mut rows: Vec<(Qty, u8, Qty)> = Vec::new();
    for (b, _) in f.jumps() {
        if in_range(b) {
            rows.push((b.clone(), 0, f.left_limit(b).clone()));
            rows.push((b.clone(), 1, f.eval(b).clone()));
        }
    }
    if let Some(g) = grid {
        for p in g.points() {
            let v = f.eval(&p).clone();
            rows.push((p, 1, v));
        }
    }
    rows.sort();
    rows.dedup();
    let mut s = String::from("price,quantity\n");
    for (p, _, v) in rows {
        s.push_str(&format!("{p},{v}\n"));
    }
    s
}

fn plot_data(input: Input, series: Series, grid: Option<&PriceGrid>) -> Result<String, CliError> {
    if let Input::Ideal { market, grid: own } = &input {
        let g = need_grid(own.clone(), grid)?;
        let mut s = String::from(if series == Series::Isoutil { "x,y\n" } else { "price,quantity\n" });
        for p in g.points() {
            let pf = p.to_f64();
            let row = match series {
                Series::Isoutil => {
                    let (x, y) = market.level_at_price(pf);
                    format!("{x},{y}\n")
                }
                Series::Rdf => format!("{p},{}\n", market.rdf(pf)),
                Series::Rsf => format!("{p},{}\n", market.rsf(pf)),
            };
            s.push_str(&row);
        }
        return Ok(s);
    }
    let book = match (&input, series) {
        (Input::IsoUtil(i), Series::Isoutil) => return Ok(vertex_rows(i)),
        _ => input_book(input, grid)?,
    };
    Ok(match series {
        Series::Isoutil => vertex_rows(&book_to_isoutil(&book)),
        Series::Rdf => step_rows(&book.rdf(), grid),
        Series::Rsf => step_rows(&book.rsf(), grid),
    })
}
