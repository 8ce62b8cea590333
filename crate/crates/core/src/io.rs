//! Text formats: pmf and joint parsers, 12-significant-digit number
//! rendering, and CSV/JSON emitters for every report type.
//!
//! CSV output is comma-separated with a header row and `.` decimals.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::channels::{JointPmf, RegionSample};
use crate::entropy::EntropyReport;
use crate::envelopes::Coupling;
use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::sfrl::{BoundChain, CurveRow};
use crate::simplex::SimplexPoint;

/// Significant digits in every emitted number.
pub const SIG_DIGITS: usize = 12;

/// Renders `x` with 12 significant digits, dropping trailing zeros, in
/// positional notation for exponents in `-5..12` and scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().expect("formatted float")
    } else {
        x
    }
}

/// Rounds every float in a serialized value; non-finite floats become
/// strings.
fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round_sig(x))
                .map_or(Value::String(fmt_sig(x)), Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn number(x: f64) -> Value {
    rounded(serde_json::Number::from_f64(x).map_or(Value::String(fmt_sig(x)), Value::Number))
}

/// Serializes `value` to pretty JSON with floats at 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable report");
    let mut s = serde_json::to_string_pretty(&rounded(v)).expect("json");
    s.push('\n');
    s
}

fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn parse_error(line: usize, column: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        msg: msg.into(),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    parse_error(e.line(), e.column(), e.to_string())
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('[')
}

fn csv_records(text: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, 1, e.to_string())
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push((line, rec));
    }
    Ok(out)
}

fn parse_number(field: &str, line: usize, column: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_error(line, column, format!("expected a number, found {field:?}")))
}

/// Reads a pmf from a JSON array of numbers or from CSV with one column
/// (`prob`) or two (`label,prob`), with an optional header row.
pub fn parse_pmf(text: &str, normalize: bool) -> Result<Pmf> {
    if looks_like_json(text) {
        let probs: Vec<f64> = serde_json::from_str(text).map_err(json_error)?;
        return Pmf::from_probs(probs, normalize);
    }
    let mut records = csv_records(text)?;
    let width = records.first().map_or(0, |(_, r)| r.len());
    if width == 0 {
        return Err(Error::Empty);
    }
    if width > 2 {
        let line = records[0].0;
        return Err(parse_error(line, 3, "expected one or two columns"));
    }
    let prob_col = width - 1;
    if let Some((_, first)) = records.first() {
        if first
            .get(prob_col)
            .is_some_and(|f| f.parse::<f64>().is_err())
        {
            records.remove(0);
        }
    }
    let mut probs = Vec::with_capacity(records.len());
    let mut labels = Vec::new();
    for (line, rec) in &records {
        if rec.len() != width {
            return Err(parse_error(
                *line,
                rec.len().min(width) + 1,
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        probs.push(parse_number(&rec[prob_col], *line, width)?);
        if width == 2 {
            labels.push(rec[0].to_string());
        }
    }
    let pmf = Pmf::from_probs(probs, normalize)?;
    if width == 2 {
        pmf.with_labels(labels)
    } else {
        Ok(pmf)
    }
}

/// Reads a joint pmf from a JSON array of rows or a CSV matrix (rows are
/// `x`), with an optional header row.
pub fn parse_joint(text: &str, normalize: bool) -> Result<JointPmf> {
    if looks_like_json(text) {
        let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(json_error)?;
        return JointPmf::from_rows(rows, normalize);
    }
    let mut records = csv_records(text)?;
    if let Some((_, first)) = records.first() {
        if first.iter().any(|f| f.parse::<f64>().is_err()) {
            records.remove(0);
        }
    }
    let rows = records
        .iter()
        .map(|(line, rec)| {
            rec.iter()
                .enumerate()
                .map(|(c, f)| parse_number(f, *line, c + 1))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    JointPmf::from_rows(rows, normalize)
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn region_csv(r: &RegionSample) -> String {
    write_csv(
        &["h_cond", "h_diff", "seed"],
        r.points.iter().map(|p| {
            vec![
                fmt_sig(p.h_cond),
                fmt_sig(p.h_diff),
                p.seed.map_or_else(String::new, |s| s.to_string()),
            ]
        }),
    )
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    write_csv(
        &["I", "li2021", "li2024", "loge", "eta_opt"],
        rows.iter().map(|r| {
            [r.i, r.li2021, r.li2024, r.loge, r.eta_opt]
                .map(fmt_sig)
                .to_vec()
        }),
    )
}

pub fn simplex_csv(points: &[SimplexPoint]) -> String {
    write_csv(
        &["p1", "p2", "p3", "H", "Lambda"],
        points.iter().map(|p| {
            [p.p1, p.p2, p.p3, p.shannon, p.layered]
                .map(fmt_sig)
                .to_vec()
        }),
    )
}

/// Coupling matrix with one column per `k`.
pub fn coupling_csv(c: &Coupling) -> String {
    let header: Vec<String> = (1..=c.kmax()).map(|k| format!("k{k}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &header,
        c.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(fmt_sig).collect()),
    )
}

pub fn coupling_metadata_json(c: &Coupling, target: &[f64]) -> String {
    json_string(&json!({
        "objective": number(c.objective()),
        "feasibility_residual": number(c.feasibility_residual()),
        "marginal_residual": number(c.marginal_residual(target)),
        "k_marginal": c.k_marginal().into_iter().map(number).collect::<Vec<_>>(),
    }))
}

pub fn bound_chain_json(c: &BoundChain) -> String {
    to_json(c)
}

pub fn entropy_report_json(r: &EntropyReport) -> String {
    let renyi: Vec<Value> = r
        .renyi
        .iter()
        .map(|e| {
            json!({
                "alpha": number(e.alpha),
                "renyi": number(e.renyi),
                "layered": number(e.layered),
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("shannon".into(), number(r.shannon));
    m.insert("layered".into(), number(r.layered));
    m.insert("min_entropy".into(), number(r.min_entropy));
    m.insert("one_to_one_length".into(), number(r.one_to_one_length));
    m.insert("renyi".into(), Value::Array(renyi));
    json_string(&Value::Object(m))
}

/// One `quantity,alpha,value` row per entropy.
pub fn entropy_report_csv(r: &EntropyReport) -> String {
    let mut rows = vec![
        vec!["shannon".into(), String::new(), fmt_sig(r.shannon)],
        vec!["layered".into(), String::new(), fmt_sig(r.layered)],
        vec!["min_entropy".into(), String::new(), fmt_sig(r.min_entropy)],
        vec![
            "one_to_one_length".into(),
            String::new(),
            fmt_sig(r.one_to_one_length),
        ],
    ];
    for e in &r.renyi {
        rows.push(vec!["renyi".into(), fmt_sig(e.alpha), fmt_sig(e.renyi)]);
        rows.push(vec![
            "renyi_layered".into(),
            fmt_sig(e.alpha),
            fmt_sig(e.layered),
        ]);
    }
    write_csv(&["quantity", "alpha", "value"], rows)
}
