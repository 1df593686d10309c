//! Output in JSON or CSV: each command builds both views of the same content.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::Value;
use tperiods::exact::{rational_to_string, Cyclotomic};
use tperiods::verify::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A command result: the JSON document, its CSV rendering, and the exit code.
pub struct Output {
    pub json: Value,
    pub table: Table,
    pub code: i32,
}

impl Output {
    pub fn ok(json: Value, table: Table) -> Self {
        Output { json, table, code: 0 }
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.table.headers)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// CSV cell for an exact value: `order:c0;c1;...` with the same `p/q`
/// coefficient strings as the JSON form.
pub fn cyc_cell(c: &Cyclotomic) -> String {
    let coeffs: Vec<String> = c.coeffs().iter().map(rational_to_string).collect();
    format!("{}:{}", c.order(), coeffs.join(";"))
}

pub fn opt_cell(c: Option<&Cyclotomic>) -> String {
    c.map(cyc_cell).unwrap_or_default()
}

pub fn report_output(report: &VerificationReport) -> Result<Output> {
    let mut table = Table::new(&["case", "passed", "lhs", "rhs", "det", "values"]);
    for w in &report.witnesses {
        table.push(vec![
            w.case.clone(),
            w.passed.to_string(),
            opt_cell(w.lhs.as_ref()),
            opt_cell(w.rhs.as_ref()),
            opt_cell(w.det.as_ref()),
            if w.values.is_empty() {
                String::new()
            } else {
                serde_json::to_string(&w.values)?
            },
        ]);
    }
    Ok(Output {
        json: serde_json::to_value(report)?,
        table,
        code: if report.is_verified() { 0 } else { 1 },
    })
}
