//! Quote rows: parsing, per-row evaluation and rendering.

use std::path::Path;

use super::format::{csv, human, json, key_values, machine, table};
use super::schema::{QuoteKind, QuoteRecord, ResultRecord};
use super::{Failure, Outcome};
use super::args::Format;
use crate::error::Error;

pub(crate) const INPUT_COLUMNS: [&str; 5] = ["spot", "strike", "maturity", "value", "kind"];
pub(crate) const OUTPUT_COLUMNS: [&str; 8] = [
    "spot", "strike", "maturity", "value", "kind", "result", "method", "error",
];

/// What a row evaluator returns on success.
pub(crate) struct Evaluated {
    pub result: f64,
    pub method: String,
    pub lambda: Option<f64>,
}

/// A row as read, with the raw text kept for echoing.
pub(crate) struct Row {
    raw: [String; 5],
    parsed: ResultRecord,
    quote: Result<QuoteRecord, String>,
}

impl Row {
    pub(crate) fn from_raw(raw: [String; 5]) -> Self {
        let num = |i: usize| raw[i].trim().parse::<f64>().ok();
        let kind = QuoteKind::parse(&raw[4]);
        let parsed = ResultRecord {
            spot: num(0),
            strike: num(1),
            maturity: num(2),
            value: num(3),
            kind,
            result: None,
            method: None,
            error: None,
            lambda: None,
        };
        let quote = (|| {
            let field = |i: usize, v: Option<f64>| {
                v.ok_or_else(|| format!("{}: cannot parse {:?}", INPUT_COLUMNS[i], raw[i]))
            };
            Ok(QuoteRecord {
                spot: field(0, parsed.spot)?,
                strike: field(1, parsed.strike)?,
                maturity: field(2, parsed.maturity)?,
                value: field(3, parsed.value)?,
                kind: kind.ok_or_else(|| {
                    format!(
                        "kind: expected price, normal_vol or lognormal_vol, got {:?}",
                        raw[4]
                    )
                })?,
            })
        })();
        Row { raw, parsed, quote }
    }

    pub(crate) fn from_quote(q: QuoteRecord) -> Self {
        let raw = [
            machine(q.spot),
            machine(q.strike),
            machine(q.maturity),
            machine(q.value),
            q.kind.as_str().to_string(),
        ];
        Row::from_raw(raw)
    }
}

/// A row after evaluation.
pub(crate) struct Done {
    raw: [String; 5],
    pub record: ResultRecord,
    pub failure: Option<Error>,
}

/// Evaluates one row; rows of a kind other than `kind` are rejected.
pub(crate) fn evaluate<F>(row: Row, kind: QuoteKind, eval: &F) -> Done
where
    F: Fn(&QuoteRecord) -> Result<Evaluated, Error>,
{
    let mut record = row.parsed;
    let mut failure = None;
    match row.quote {
        Err(msg) => record.error = Some(msg),
        Ok(q) if q.kind != kind => {
            record.error = Some(format!(
                "kind must be {} for this command, got {}",
                kind.as_str(),
                q.kind.as_str()
            ))
        }
        Ok(q) => match eval(&q) {
            Ok(e) => {
                record.result = Some(e.result);
                record.method = Some(e.method);
                record.lambda = e.lambda;
            }
            Err(err) => {
                record.error = Some(err.to_string());
                failure = Some(err);
            }
        },
    }
    Done {
        raw: row.raw,
        record,
        failure,
    }
}

pub(crate) fn read_rows(path: &Path) -> Result<Vec<Row>, Failure> {
    let invalid = |msg: String| Failure::validation(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| invalid(e.to_string()))?;
    let headers = reader.headers().map_err(|e| invalid(e.to_string()))?.clone();
    let mut index = [0usize; 5];
    for (slot, name) in index.iter_mut().zip(INPUT_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| invalid(format!("missing column {name:?}")))?;
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| invalid(e.to_string()))?;
        let raw = index.map(|i| record.get(i).unwrap_or("").to_string());
        rows.push(Row::from_raw(raw));
    }
    if rows.is_empty() {
        return Err(invalid("no data rows".into()));
    }
    Ok(rows)
}

fn opt(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn cells(d: &Done, human_numbers: bool) -> Vec<String> {
    let mut cells: Vec<String> = if human_numbers {
        let r = &d.record;
        [r.spot, r.strike, r.maturity, r.value]
            .iter()
            .zip(&d.raw)
            .map(|(v, raw)| v.map(human).unwrap_or_else(|| raw.clone()))
            .chain(std::iter::once(d.raw[4].clone()))
            .collect()
    } else {
        d.raw.to_vec()
    };
    let fmt = if human_numbers { human } else { machine };
    cells.push(opt(d.record.result, fmt));
    cells.push(d.record.method.clone().unwrap_or_default());
    cells.push(d.record.error.clone().unwrap_or_default());
    cells
}

/// Renders a batch and picks the exit code: 3 when no row succeeded.
pub(crate) fn render_batch(done: &[Done], format: Format) -> Outcome {
    let text = match format {
        Format::Json => {
            let records: Vec<&ResultRecord> = done.iter().map(|d| &d.record).collect();
            json(&records)
        }
        Format::Csv => csv(
            &OUTPUT_COLUMNS,
            &done.iter().map(|d| cells(d, false)).collect::<Vec<_>>(),
        ),
        Format::Text => table(
            &OUTPUT_COLUMNS,
            &done.iter().map(|d| cells(d, true)).collect::<Vec<_>>(),
        ),
    };
    let ok = done.iter().any(|d| d.record.result.is_some());
    Outcome {
        text,
        code: if ok { 0 } else { 3 },
    }
}

/// Renders a single quote; a failed quote is an error, not a record.
pub(crate) fn render_single(done: Done, result_name: &str, format: Format) -> Result<Outcome, Failure> {
    if let Some(err) = done.failure {
        return Err(Failure::from(err));
    }
    if let Some(msg) = done.record.error {
        return Err(Failure::validation(msg));
    }
    let r = &done.record;
    let text = match format {
        Format::Json => json(r),
        Format::Csv => csv(&OUTPUT_COLUMNS, &[cells(&done, false)]),
        Format::Text => {
            let mut pairs = vec![
                (result_name, opt(r.result, human)),
                ("method", r.method.clone().unwrap_or_default()),
            ];
            if let Some(l) = r.lambda {
                pairs.push(("lambda", human(l)));
            }
            key_values(&pairs)
        }
    };
    Ok(Outcome { text, code: 0 })
}
