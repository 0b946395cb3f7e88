//! Versioned JSON reports and CSV export of scan grids.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::pairs::PairSpec;
use crate::verifier::{Prediction, ScanCell};

pub const SCHEMA: &str = "hclab-report-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub pair: Option<PairSpec>,
    pub params: Map<String, Value>,
    pub result: Value,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>, pair: Option<PairSpec>, result: Value) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.into(),
            pair,
            params: Map::new(),
            result,
            notes: Vec::new(),
            timestamp: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Parses a report and checks the schema tag.
    pub fn from_json(text: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(text)
            .map_err(|e| Error::Param(format!("malformed report: {e}")))?;
        if r.schema != SCHEMA {
            return Err(Error::Param(format!("unknown report schema '{}'", r.schema)));
        }
        Ok(r)
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    lambda_re: f64,
    lambda_im: f64,
    n: usize,
    status: &'a str,
    residual: Option<f64>,
    predicted: &'a str,
}

/// Writes one row per cell: `lambda_re,lambda_im,n,status,residual,predicted`.
pub fn write_scan_csv<W: Write>(cells: &[ScanCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for cell in cells {
        let predicted = match cell.predicted {
            Prediction::InsidePredictedRegion => "inside-predicted-region",
            Prediction::OutsideOrUnknown => "outside-or-unknown",
        };
        w.serialize(CsvRow {
            lambda_re: cell.lambda.re,
            lambda_im: cell.lambda.im,
            n: cell.n,
            status: cell.status_name(),
            residual: cell.residual(),
            predicted,
        })
        .map_err(|e| Error::Param(format!("csv export failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::Param(format!("csv export failed: {e}")))?;
    Ok(())
}
