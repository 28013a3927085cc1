//! CSV and JSON emitters. CSV is UTF-8 with a header row and
//! shortest-round-trip decimal floats, so a fixed seed reproduces files
//! byte for byte.

use crate::config::{ExperimentConfig, OutputFormat};
use crate::experiments::HistogramRow;
use epspy_core::{EpsilonPyRealization, SummaryRow};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

fn open_sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn emit(cfg: &ExperimentConfig, csv: String, json: Value) -> io::Result<()> {
    let mut sink = open_sink(cfg.out.as_deref())?;
    match cfg.format {
        OutputFormat::Csv => sink.write_all(csv.as_bytes())?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, &json)?;
            sink.write_all(b"\n")?;
        }
    }
    sink.flush()
}

pub fn write_summary_rows(cfg: &ExperimentConfig, rows: &[SummaryRow]) -> io::Result<()> {
    let mut csv = String::new();
    if let Some(first) = rows.first() {
        csv.push_str(&first.csv_header());
        csv.push('\n');
    }
    for row in rows {
        csv.push_str(&row.csv_record());
        csv.push('\n');
    }
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "theta": r.theta,
                "epsilon": r.epsilon,
                "dk": Value::Object(
                    r.distances
                        .iter()
                        .map(|(l, d)| (l.clone(), json!(d)))
                        .collect(),
                ),
                "samples": Value::Object(
                    r.samples
                        .iter()
                        .map(|(l, s)| {
                            (
                                l.clone(),
                                json!({
                                    "mean": s.mean,
                                    "q25": s.q25,
                                    "median": s.median,
                                    "q75": s.q75,
                                }),
                            )
                        })
                        .collect(),
                ),
            })
        })
        .collect();
    emit(cfg, csv, json!({ "rows": json_rows }))
}

pub fn write_histogram_rows(cfg: &ExperimentConfig, rows: &[HistogramRow]) -> io::Result<()> {
    let mut csv = String::from("panel,series,lo,hi,value\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.panel, r.series, r.lo, r.hi, r.value
        ));
    }
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "panel": r.panel,
                "series": r.series,
                "lo": r.lo,
                "hi": r.hi,
                "value": r.value,
            })
        })
        .collect();
    emit(cfg, csv, json!({ "rows": json_rows }))
}

/// One column of values, one row per replication.
pub fn write_draws(cfg: &ExperimentConfig, name: &str, values: &[f64]) -> io::Result<()> {
    let mut csv = format!("rep,{name}\n");
    for (i, v) in values.iter().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
    }
    emit(cfg, csv, json!({ name: values }))
}

pub fn write_tau_draws(cfg: &ExperimentConfig, values: &[(u64, f64)]) -> io::Result<()> {
    let mut csv = String::from("rep,tau,scaled\n");
    for (i, (tau, scaled)) in values.iter().enumerate() {
        csv.push_str(&format!("{i},{tau},{scaled}\n"));
    }
    let json_rows: Vec<Value> = values
        .iter()
        .map(|(tau, scaled)| json!({ "tau": tau, "scaled": scaled }))
        .collect();
    emit(cfg, csv, json!({ "rows": json_rows }))
}

/// Realization rows: one row per atom `(rep, index, weight, atom)`, then a
/// sentinel row with index -1 carrying the remainder and the fresh atom.
pub fn write_realizations(
    cfg: &ExperimentConfig,
    realizations: &[EpsilonPyRealization],
) -> io::Result<()> {
    let mut csv = String::from("rep,index,weight,atom\n");
    for (rep, r) in realizations.iter().enumerate() {
        for (i, (w, a)) in r.weights.iter().zip(&r.atoms).enumerate() {
            csv.push_str(&format!("{rep},{},{w},{a}\n", i + 1));
        }
        csv.push_str(&format!("{rep},-1,{},{}\n", r.remainder, r.extra_atom));
    }
    let json_rows: Vec<Value> = realizations
        .iter()
        .map(|r| {
            json!({
                "weights": r.weights,
                "atoms": r.atoms,
                "remainder": r.remainder,
                "extra_atom": r.extra_atom,
                "exact": r.exact,
            })
        })
        .collect();
    emit(cfg, csv, json!({ "realizations": json_rows }))
}
