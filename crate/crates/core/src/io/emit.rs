//! CSV and JSON output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EigenSystem, RateSet, Spectrum, WindowReport};
use crate::spectral::Crossing;

use super::config::Format;

/// Anything the CLI can print.
pub trait Emit: Serialize {
    fn csv_header(&self) -> Vec<String>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn emit<T: Emit>(value: &T, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(value.csv_header()).map_err(io)?;
            for row in value.csv_rows() {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.to_string()))
        }
    }
}

impl Emit for Spectrum {
    fn csv_header(&self) -> Vec<String> {
        ["detuning", "re", "im", "re_norm", "im_norm"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.grid
            .points()
            .zip(&self.values)
            .map(|(x, v)| vec![num(x), num(v.re), num(v.im), num(v.re / self.norm), num(v.im / self.norm)])
            .collect()
    }
}

impl Emit for WindowReport {
    fn csv_header(&self) -> Vec<String> {
        ["feature", "center", "value", "fwhm", "asymmetry"].map(String::from).to_vec()
    }

    /// Peaks carry their height in `value`; windows carry their depth.
    fn csv_rows(&self) -> Vec<Vec<String>> {
        let peaks = self
            .peaks
            .iter()
            .map(|p| vec!["peak".into(), num(p.center), num(p.height), String::new(), String::new()]);
        let windows = self
            .windows
            .iter()
            .map(|w| vec!["window".into(), num(w.center), num(w.depth), num(w.fwhm), num(w.asymmetry)]);
        peaks.chain(windows).collect()
    }
}

impl Emit for EigenSystem {
    fn csv_header(&self) -> Vec<String> {
        let width = self.vectors.first().map_or(0, Vec::len);
        let mut h = vec!["index".to_string(), "energy".to_string()];
        h.extend((0..width).map(|j| format!("v{j}")));
        h
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.energies
            .iter()
            .zip(&self.vectors)
            .enumerate()
            .map(|(k, (e, v))| {
                let mut row = vec![k.to_string(), num(*e)];
                row.extend(v.iter().map(|x| num(*x)));
                row
            })
            .collect()
    }
}

/// Rates next to the energies of the states they belong to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub energies: Vec<f64>,
    pub rates: Vec<f64>,
}

impl RateTable {
    pub fn new(eig: &EigenSystem, rates: &RateSet) -> Self {
        RateTable { energies: eig.energies.clone(), rates: rates.rates.clone() }
    }
}

impl Emit for RateTable {
    fn csv_header(&self) -> Vec<String> {
        ["index", "energy", "rate"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.energies
            .iter()
            .zip(&self.rates)
            .enumerate()
            .map(|(k, (e, r))| vec![k.to_string(), num(*e), num(*r)])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingScan {
    pub crossings: Vec<Crossing>,
}

impl Emit for CrossingScan {
    fn csv_header(&self) -> Vec<String> {
        ["d", "pairs", "full"].map(String::from).to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.crossings
            .iter()
            .map(|c| {
                let pairs: Vec<String> = c.pairs.iter().map(|(i, j)| format!("{i}-{j}")).collect();
                vec![num(c.d), pairs.join(";"), c.full.to_string()]
            })
            .collect()
    }
}

/// Reads spectrum CSV back as rows of `[detuning, re, im, re_norm, im_norm]`.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<[f64; 5]>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Io(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["detuning", "re", "im", "re_norm", "im_norm"] {
        return Err(Error::Parse { line: 1, message: "unexpected spectrum header".into() });
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            let mut row = [0.0; 5];
            for (slot, field) in row.iter_mut().zip(rec.iter()) {
                *slot = field
                    .parse()
                    .map_err(|_| Error::Parse { line: i + 2, message: format!("bad number `{field}`") })?;
            }
            Ok(row)
        })
        .collect()
}
