//! Sweep rows and their CSV / JSON-lines encodings.
//!
//! Floats are written in their shortest round-trip form, so reading a file
//! and writing it back reproduces it byte for byte.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "T_K")]
    pub t_k: f64,
    pub tau: f64,
    #[serde(rename = "F_total_eV")]
    pub f_total_ev: f64,
    #[serde(rename = "E0_eV")]
    pub e0_ev: f64,
    #[serde(rename = "delta1_eV")]
    pub delta1_ev: f64,
    #[serde(rename = "delta2_eV")]
    pub delta2_ev: f64,
    #[serde(rename = "S_eV_per_K")]
    pub s_ev_per_k: f64,
    #[serde(rename = "S_err_eV_per_K")]
    pub s_err_ev_per_k: f64,
}

pub const COLUMNS: [&str; 8] = [
    "T_K",
    "tau",
    "F_total_eV",
    "E0_eV",
    "delta1_eV",
    "delta2_eV",
    "S_eV_per_K",
    "S_err_eV_per_K",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Writes all rows in order; the CSV header is always present.
pub fn write_rows<W: Write>(rows: &[SweepRow], out: W, format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            // An empty sweep still gets its header.
            if rows.is_empty() {
                w.write_record(COLUMNS)?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()
        }
        Format::Jsonl => {
            let mut out = out;
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<R: BufRead>(input: R, format: Format) -> Result<Vec<SweepRow>, String> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let header = r.headers().map_err(|e| e.to_string())?;
            if header.iter().ne(COLUMNS) {
                return Err(format!("unexpected header {header:?}"));
            }
            r.deserialize().map(|row| row.map_err(|e| e.to_string())).collect()
        }
        Format::Jsonl => input
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.is_empty()))
            .map(|l| {
                let l = l.map_err(|e| e.to_string())?;
                serde_json::from_str(&l).map_err(|e| e.to_string())
            })
            .collect(),
    }
}
