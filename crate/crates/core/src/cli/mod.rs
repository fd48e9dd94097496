//! The `bachvol` command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 every batch row failed,
//! 4 a solver failed to converge.

mod args;
mod batch;
mod format;
pub mod schema;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
use args::{
    Command, ConvertArgs, Direction, Format, GreeksArgs, ImpliedArgs, Method, Model, Order,
    PriceArgs, SmileArgs,
};
use batch::{evaluate, read_rows, render_batch, render_single, Evaluated, Row};
use format::{csv, human, json, key_values, machine, table};
use schema::{GreeksRecord, ModelGreeks, ModelName, PriceRecord, QuoteKind, QuoteRecord, SmilePoint};

use crate::convert::{convert, smile_shape, ConversionOrder};
use crate::error::Error;
use crate::greeks::{bachelier_greeks, black_scholes_greeks, breakeven_ratio, compare_models, GreekRatios};
use crate::implied::{implied_normal, AsymptoticConfig, ImpliedMethod};
use crate::pricing::{
    bachelier_call, bachelier_time_value, bachelier_tv_gamma, black_scholes_call,
    black_scholes_time_value,
};
use crate::terms::{LognormalVol, NormalVol, OptionTerms, Vol};

pub(crate) struct Outcome {
    text: String,
    code: i32,
}

#[derive(Debug)]
pub(crate) struct Failure {
    message: String,
    code: i32,
}

impl Failure {
    fn validation(message: String) -> Self {
        Failure { message, code: 2 }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            message: e.to_string(),
            code: if e.is_validation() { 2 } else { 4 },
        }
    }
}

/// Runs the command line from the process arguments and returns the exit code.
pub fn run() -> i32 {
    run_with(std::env::args_os())
}

/// Runs the command line on explicit arguments (the first is the program
/// name) and returns the exit code.
pub fn run_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => match emit(&cli, &out.text) {
            Ok(()) => out.code,
            Err(msg) => {
                eprintln!("error: {msg}");
                2
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Price(a) => price(a, cli.format),
        Command::Implied(a) => implied(a, cli.format),
        Command::Convert(a) => convert_cmd(a, cli.format),
        Command::Greeks(a) => greeks(a, cli.format),
        Command::Smile(a) => smile(a, cli.format),
    }
}

fn model_name(m: Model) -> ModelName {
    match m {
        Model::Bachelier => ModelName::Bachelier,
        Model::BlackScholes => ModelName::BlackScholes,
    }
}

fn price(a: &PriceArgs, format: Format) -> Result<Outcome, Failure> {
    let terms = OptionTerms::new(a.terms.spot, a.terms.strike, a.terms.maturity)?;
    let (price, time_value, time_value_gamma) = match a.model {
        Model::Bachelier => {
            let vol = NormalVol::new(a.vol)?;
            let gamma = (!terms.is_atm()).then(|| bachelier_tv_gamma(&terms, vol));
            (bachelier_call(&terms, vol), bachelier_time_value(&terms, vol), gamma)
        }
        Model::BlackScholes => {
            let vol = LognormalVol::new(a.vol)?;
            (black_scholes_call(&terms, vol), black_scholes_time_value(&terms, vol), None)
        }
    };
    let rec = PriceRecord {
        model: model_name(a.model),
        spot: terms.spot(),
        strike: terms.strike(),
        maturity: terms.maturity(),
        vol: a.vol,
        price,
        time_value,
        time_value_gamma,
    };
    let text = match format {
        Format::Json => json(&rec),
        Format::Csv => {
            let header = ["model", "spot", "strike", "maturity", "vol", "price", "time_value", "time_value_gamma"];
            let row = vec![
                rec.model.as_str().to_string(),
                machine(rec.spot),
                machine(rec.strike),
                machine(rec.maturity),
                machine(rec.vol),
                machine(rec.price),
                machine(rec.time_value),
                rec.time_value_gamma.map(machine).unwrap_or_default(),
            ];
            csv(&header, &[row])
        }
        Format::Text => {
            let mut pairs = vec![
                ("model", rec.model.as_str().to_string()),
                ("price", human(rec.price)),
                ("time_value", human(rec.time_value)),
            ];
            if let Some(g) = rec.time_value_gamma {
                pairs.push(("time_value_gamma", human(g)));
            }
            key_values(&pairs)
        }
    };
    Ok(Outcome { text, code: 0 })
}

/// Evaluates every row in order, or the single quote given by flags.
fn run_rows<F>(
    input: Option<&std::path::Path>,
    kind: QuoteKind,
    single: impl FnOnce() -> QuoteRecord,
    result_name: &str,
    format: Format,
    eval: F,
) -> Result<Outcome, Failure>
where
    F: Fn(&QuoteRecord) -> Result<Evaluated, Error>,
{
    match input {
        Some(path) => {
            let done: Vec<_> = read_rows(path)?
                .into_iter()
                .map(|row| evaluate(row, kind, &eval))
                .collect();
            Ok(render_batch(&done, format))
        }
        None => render_single(evaluate(Row::from_quote(single()), kind, &eval), result_name, format),
    }
}

fn implied(a: &ImpliedArgs, format: Format) -> Result<Outcome, Failure> {
    let config = match a.lambda_max {
        Some(l) => AsymptoticConfig::new(l)?,
        None => AsymptoticConfig::default(),
    };
    let method = match a.method {
        Method::Exact => ImpliedMethod::Exact,
        Method::Gamma => ImpliedMethod::Gamma,
        Method::Asymptotic => ImpliedMethod::Asymptotic,
        Method::Auto => ImpliedMethod::Auto,
    };
    let single = || QuoteRecord {
        spot: a.terms.spot.unwrap_or(f64::NAN),
        strike: a.terms.strike.unwrap_or(f64::NAN),
        maturity: a.terms.maturity.unwrap_or(f64::NAN),
        value: a.price.unwrap_or(f64::NAN),
        kind: QuoteKind::Price,
    };
    run_rows(a.input.as_deref(), QuoteKind::Price, single, "normal_vol", format, |q| {
        let terms = OptionTerms::new(q.spot, q.strike, q.maturity)?;
        let r = implied_normal(&terms, q.value, method, &config)?;
        Ok(Evaluated {
            result: r.vol.value(),
            method: r.method.as_str().to_string(),
            lambda: r.lambda.is_finite().then_some(r.lambda),
        })
    })
}

fn convert_cmd(a: &ConvertArgs, format: Format) -> Result<Outcome, Failure> {
    let order = match a.order {
        Order::Zero => ConversionOrder::Zero,
        Order::One => ConversionOrder::One,
        Order::Exact => ConversionOrder::Exact,
    };
    let (source, result_name) = match a.direction {
        Direction::N2ln => (QuoteKind::NormalVol, "lognormal_vol"),
        Direction::Ln2n => (QuoteKind::LognormalVol, "normal_vol"),
    };
    let single = || QuoteRecord {
        spot: a.terms.spot.unwrap_or(f64::NAN),
        strike: a.terms.strike.unwrap_or(f64::NAN),
        maturity: a.terms.maturity.unwrap_or(f64::NAN),
        value: a.vol.unwrap_or(f64::NAN),
        kind: source,
    };
    run_rows(a.input.as_deref(), source, single, result_name, format, |q| {
        let terms = OptionTerms::new(q.spot, q.strike, q.maturity)?;
        let vol = match source {
            QuoteKind::NormalVol => Vol::Normal(NormalVol::new(q.value)?),
            _ => Vol::Lognormal(LognormalVol::new(q.value)?),
        };
        Ok(Evaluated {
            result: convert(&terms, vol, order)?.value(),
            method: order.as_str().to_string(),
            lambda: None,
        })
    })
}

fn greeks(a: &GreeksArgs, format: Format) -> Result<Outcome, Failure> {
    let terms = OptionTerms::new(a.terms.spot, a.terms.strike, a.terms.maturity)?;
    let vol = match a.model {
        Model::Bachelier => Vol::Normal(NormalVol::new(a.vol)?),
        Model::BlackScholes => Vol::Lognormal(LognormalVol::new(a.vol)?),
    };
    let entry = |model, vol: f64, greeks: crate::greeks::GreeksReport| -> Result<ModelGreeks, Failure> {
        Ok(ModelGreeks {
            model,
            vol,
            greeks,
            breakeven_dt: greeks.breakeven_over(a.dt)?,
        })
    };
    let record = if a.compare {
        let c = compare_models(&terms, vol)?;
        GreeksRecord {
            spot: terms.spot(),
            strike: terms.strike(),
            maturity: terms.maturity(),
            dt: a.dt,
            models: vec![
                entry(ModelName::Bachelier, c.normal_vol.value(), c.bachelier)?,
                entry(ModelName::BlackScholes, c.lognormal_vol.value(), c.black_scholes)?,
            ],
            measured_ratios: Some(c.measured),
            limit_ratios: Some(c.predicted),
            price_matched_limits: Some(c.price_matched),
        }
    } else {
        let m = match vol {
            Vol::Normal(v) => entry(ModelName::Bachelier, v.value(), bachelier_greeks(&terms, v))?,
            Vol::Lognormal(v) => {
                entry(ModelName::BlackScholes, v.value(), black_scholes_greeks(&terms, v))?
            }
        };
        GreeksRecord {
            spot: terms.spot(),
            strike: terms.strike(),
            maturity: terms.maturity(),
            dt: a.dt,
            models: vec![m],
            measured_ratios: None,
            limit_ratios: None,
            price_matched_limits: None,
        }
    };
    let text = match format {
        Format::Json => json(&record),
        Format::Csv | Format::Text => greeks_table(&record, format),
    };
    Ok(Outcome { text, code: 0 })
}

fn greeks_table(r: &GreeksRecord, format: Format) -> String {
    let header = ["row", "vol", "delta", "gamma", "vega", "theta", "breakeven", "breakeven_dt"];
    let fmt = if format == Format::Csv { machine } else { human };
    let mut rows: Vec<Vec<String>> = r
        .models
        .iter()
        .map(|m| {
            let g = &m.greeks;
            vec![m.model.as_str().to_string()]
                .into_iter()
                .chain(
                    [m.vol, g.delta, g.gamma, g.vega, g.theta, g.breakeven, m.breakeven_dt]
                        .map(fmt),
                )
                .collect()
        })
        .collect();
    let ratio_row = |name: &str, q: &GreekRatios| {
        vec![
            name.to_string(),
            String::new(),
            fmt(q.delta),
            fmt(q.gamma),
            fmt(q.vega),
            fmt(q.theta),
            String::new(),
            String::new(),
        ]
    };
    for (name, ratios) in [
        ("ratio", &r.measured_ratios),
        ("ratio_limit", &r.limit_ratios),
        ("ratio_limit_matched", &r.price_matched_limits),
    ] {
        if let Some(q) = ratios {
            rows.push(ratio_row(name, q));
        }
    }
    match format {
        Format::Csv => csv(&header, &rows),
        _ => table(&header, &rows),
    }
}

/// Evenly spaced grid on `[m_min, m_max]`, with `m = 1` added when it falls
/// strictly inside and is not already a node.
fn smile_grid(a: &SmileArgs) -> Result<Vec<f64>, Failure> {
    let ok = a.m_min.is_finite() && a.m_max.is_finite() && a.m_min > 0.0 && a.m_max > a.m_min;
    if !ok {
        return Err(Failure::validation(format!(
            "smile range needs 0 < m-min < m-max, got [{}, {}]",
            a.m_min, a.m_max
        )));
    }
    if a.steps == 0 {
        return Err(Failure::validation("steps must be at least 1".into()));
    }
    let h = (a.m_max - a.m_min) / a.steps as f64;
    let mut grid: Vec<f64> = (0..=a.steps)
        .map(|i| if i == a.steps { a.m_max } else { a.m_min + i as f64 * h })
        .collect();
    if a.m_min < 1.0 && 1.0 < a.m_max && !grid.contains(&1.0) {
        let at = grid.partition_point(|&m| m < 1.0);
        grid.insert(at, 1.0);
    }
    Ok(grid)
}

fn smile(a: &SmileArgs, format: Format) -> Result<Outcome, Failure> {
    let points = smile_grid(a)?
        .into_iter()
        .map(|m| {
            Ok(SmilePoint {
                m,
                smile_shape: smile_shape(m)?,
                breakeven_ratio: breakeven_ratio(m)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let text = match format {
        Format::Json => json(&points),
        Format::Csv | Format::Text => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| vec![machine(p.m), machine(p.smile_shape), machine(p.breakeven_ratio)])
                .collect();
            csv(&["m", "smile_shape", "breakeven_ratio"], &rows)
        }
    };
    Ok(Outcome { text, code: 0 })
}
