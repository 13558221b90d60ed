//! Flat `key = value` run descriptions.
//!
//! ```text
//! # three sites, uniform tail
//! mode = free_space
//! n = 2
//! d0 = 0.8
//! d = 0.4            # or: tail.d = [0.4]
//! gamma0 = 1
//! gamma = 1e-3       # or: tail.gamma = [1e-3, 1e-3]
//! omega_p = 0.03
//! grid.start = -3
//! grid.stop = 3
//! grid.count = 2001
//! ```
//!
//! Cavity runs use `mode = cavity` with `g`, `kappa`, `epsilon` and optional
//! `n_max` (default 2) in place of `omega_p`; `d0` defaults to `d` there.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::Backend;
use crate::error::{Error, Result};
use crate::model::{CavityParams, ChainParams, DetuningGrid, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid("format", format!("must be csv or json, got `{other}`"))),
        }
    }
}

/// Everything needed to run one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: SystemParams,
    pub grid: DetuningGrid,
    pub backend: Backend,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Prefactor of the cavity golden-rule rates; `γ0` when absent.
    pub rate_prefactor: Option<f64>,
}

impl RunConfig {
    pub fn new(system: impl Into<SystemParams>, grid: DetuningGrid) -> Self {
        RunConfig {
            system: system.into(),
            grid,
            backend: Backend::General,
            format: Format::Csv,
            out: None,
            rate_prefactor: None,
        }
    }

    /// Drive-free configurations are accepted so that eigen/rate runs can
    /// carry `omega_p = 0`; sweeping one still fails validation.
    pub fn validate(&self) -> Result<()> {
        match &self.system {
            SystemParams::FreeSpace(p) => p.validate_allow_undriven()?,
            SystemParams::Cavity(p) => p.validate_allow_undriven()?,
        }
        self.grid.validate()?;
        if let Some(p) = self.rate_prefactor {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::invalid("rate_prefactor", "must be positive"));
            }
        }
        Ok(())
    }
}

pub const DEFAULT_GRID: DetuningGrid = DetuningGrid { start: -3.0, stop: 3.0, count: 2001 };

const KEYS: &[&str] = &[
    "mode", "n", "d0", "d", "tail.d", "gamma0", "gamma", "tail.gamma", "omega_p", "g", "kappa", "epsilon",
    "n_max", "grid.start", "grid.stop", "grid.count", "backend", "format", "out", "rate_prefactor",
];
const FREE_ONLY: &[&str] = &["omega_p"];
const CAVITY_ONLY: &[&str] = &["g", "kappa", "epsilon", "n_max", "rate_prefactor"];

#[derive(Debug, Clone)]
enum Value {
    Scalar(String),
    List(Vec<String>),
}

struct Entries {
    map: HashMap<String, (usize, Value)>,
}

impl Entries {
    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn scalar(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((_, Value::Scalar(s))) => Ok(Some(s)),
            Some((line, Value::List(_))) => Err(parse_err(*line, format!("`{key}` takes a single value"))),
        }
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.scalar(key)? {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| parse_err(self.line(key), format!("`{key}`: cannot parse `{s}`"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?.ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, Value::Scalar(_))) => Err(parse_err(*line, format!("`{key}` takes a [list]"))),
            Some((line, Value::List(items))) => items
                .iter()
                .map(|s| s.parse().map_err(|_| parse_err(*line, format!("`{key}`: cannot parse `{s}`"))))
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(parse_err(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(parse_err(line, format!("`{key}` has no value")));
        }
        let value = if let Some(inner) = value.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated list"))?
                .trim();
            let items = if inner.is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(|s| s.trim().to_string()).collect()
            };
            Value::List(items)
        } else {
            Value::Scalar(value.to_string())
        };
        if map.insert(key.to_string(), (line, value)).is_some() {
            return Err(parse_err(line, format!("duplicate key `{key}`")));
        }
    }
    Ok(Entries { map })
}

/// Parses and validates a run description.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let e = tokenize(text)?;
    let cavity = match e.scalar("mode")?.unwrap_or("free_space") {
        "free_space" => false,
        "cavity" => true,
        other => return Err(parse_err(e.line("mode"), format!("mode must be free_space or cavity, got `{other}`"))),
    };
    let misplaced = if cavity { FREE_ONLY } else { CAVITY_ONLY };
    if let Some(key) = misplaced.iter().find(|k| e.has(k)) {
        let mode = if cavity { "cavity" } else { "free_space" };
        return Err(parse_err(e.line(key), format!("`{key}` does not apply to mode {mode}")));
    }

    let n: usize = e.require("n")?;
    let d: Option<f64> = e.parse("d")?;
    let d0: f64 = match e.parse("d0")? {
        Some(v) => v,
        None if n == 0 => 0.0,
        None if cavity => d.ok_or_else(|| Error::MissingKey("d".into()))?,
        None => return Err(Error::MissingKey("d0".into())),
    };
    let d_tail = match (e.list("tail.d")?, d) {
        (Some(_), Some(_)) => return Err(parse_err(e.line("d"), "give either `d` or `tail.d`, not both")),
        (Some(list), None) => list,
        (None, Some(v)) => vec![v; n.saturating_sub(1)],
        (None, None) if n <= 1 => Vec::new(),
        (None, None) => return Err(Error::MissingKey("d".into())),
    };
    let gamma: Option<f64> = e.parse("gamma")?;
    let gamma_tail = match (e.list("tail.gamma")?, gamma) {
        (Some(_), Some(_)) => return Err(parse_err(e.line("gamma"), "give either `gamma` or `tail.gamma`, not both")),
        (Some(list), None) => list,
        (None, Some(v)) => vec![v; n],
        (None, None) if n == 0 => Vec::new(),
        (None, None) => return Err(Error::MissingKey("gamma".into())),
    };
    let gamma0: f64 = e.require("gamma0")?;

    let system: SystemParams = if cavity {
        let chain = ChainParams { n_extra: n, d0, d_tail, gamma0, gamma_tail, omega_p: 0.0 };
        CavityParams {
            chain,
            g: e.require("g")?,
            kappa: e.require("kappa")?,
            epsilon: e.require("epsilon")?,
            n_max: e.parse("n_max")?.unwrap_or(2),
        }
        .into()
    } else {
        ChainParams { n_extra: n, d0, d_tail, gamma0, gamma_tail, omega_p: e.require("omega_p")? }.into()
    };

    let grid_keys = ["grid.start", "grid.stop", "grid.count"];
    let grid = if grid_keys.iter().any(|k| e.has(k)) {
        DetuningGrid { start: e.require("grid.start")?, stop: e.require("grid.stop")?, count: e.require("grid.count")? }
    } else {
        DEFAULT_GRID
    };

    let config = RunConfig {
        system,
        grid,
        backend: e.parse::<String>("backend")?.map(|s| s.parse()).transpose()?.unwrap_or(Backend::General),
        format: e.parse::<String>("format")?.map(|s| s.parse()).transpose()?.unwrap_or(Format::Csv),
        out: e.scalar("out")?.map(PathBuf::from),
        rate_prefactor: e.parse("rate_prefactor")?,
    };
    config.validate()?;
    Ok(config)
}

/// Writes a configuration back in the grammar accepted by [`parse_config`].
pub fn render_config(config: &RunConfig) -> String {
    let mut s = String::new();
    let chain = config.system.chain();
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let mode = match config.system {
        SystemParams::FreeSpace(_) => "free_space",
        SystemParams::Cavity(_) => "cavity",
    };
    let _ = writeln!(s, "mode = {mode}");
    let _ = writeln!(s, "n = {}", chain.n_extra);
    let _ = writeln!(s, "d0 = {:?}", chain.d0);
    if !chain.d_tail.is_empty() {
        let _ = writeln!(s, "tail.d = [{}]", list(&chain.d_tail));
    }
    let _ = writeln!(s, "gamma0 = {:?}", chain.gamma0);
    if !chain.gamma_tail.is_empty() {
        let _ = writeln!(s, "tail.gamma = [{}]", list(&chain.gamma_tail));
    }
    match &config.system {
        SystemParams::FreeSpace(p) => {
            let _ = writeln!(s, "omega_p = {:?}", p.omega_p);
        }
        SystemParams::Cavity(p) => {
            let _ = writeln!(s, "g = {:?}", p.g);
            let _ = writeln!(s, "kappa = {:?}", p.kappa);
            let _ = writeln!(s, "epsilon = {:?}", p.epsilon);
            let _ = writeln!(s, "n_max = {}", p.n_max);
            if let Some(r) = config.rate_prefactor {
                let _ = writeln!(s, "rate_prefactor = {r:?}");
            }
        }
    }
    let _ = writeln!(s, "grid.start = {:?}", config.grid.start);
    let _ = writeln!(s, "grid.stop = {:?}", config.grid.stop);
    let _ = writeln!(s, "grid.count = {}", config.grid.count);
    let _ = writeln!(s, "backend = {}", config.backend);
    let _ = writeln!(s, "format = {}", if config.format == Format::Csv { "csv" } else { "json" });
    if let Some(out) = &config.out {
        let _ = writeln!(s, "out = {}", out.display());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG4A: &str = "\
# two windows
mode = free_space
n = 2
d0 = 0.8
d = 0.4
gamma0 = 1
gamma = 1e-3
omega_p = 0.03
";

    #[test]
    fn parses_minimal_free_space() {
        let c = parse_config(FIG4A).unwrap();
        assert_eq!(c.system, ChainParams::uniform(2, 0.8, 0.4, 1.0, 1e-3, 0.03).into());
        assert_eq!(c.grid, DEFAULT_GRID);
        assert_eq!(c.backend, Backend::General);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn lists_and_comments() {
        let text = "n = 3 # chain\nd0 = 0.5\ntail.d = [0.3, 0.2]\ngamma0 = 1\ntail.gamma = [1e-3, 0, 2e-3]\nomega_p = 0.03\n\
                    grid.start = -1\ngrid.stop = 2\ngrid.count = 31\nbackend = closed\nformat = json\nout = a.json\n";
        let c = parse_config(text).unwrap();
        let p = c.system.chain();
        assert_eq!(p.d_tail, vec![0.3, 0.2]);
        assert_eq!(p.gamma_tail, vec![1e-3, 0.0, 2e-3]);
        assert_eq!(c.grid, DetuningGrid { start: -1.0, stop: 2.0, count: 31 });
        assert_eq!(c.backend, Backend::Closed);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.out, Some(PathBuf::from("a.json")));
    }

    #[test]
    fn cavity_mode() {
        let text = "mode = cavity\nn = 1\nd = 3\ngamma0 = 1\ngamma = 1e-3\ng = 5\nkappa = 1\nepsilon = 0.03\n";
        let c = parse_config(text).unwrap();
        match c.system {
            SystemParams::Cavity(p) => {
                assert_eq!((p.chain.d0, p.g, p.kappa, p.epsilon, p.n_max), (3.0, 5.0, 1.0, 0.03, 2));
            }
            _ => panic!("expected cavity"),
        }
    }

    #[test]
    fn missing_gamma0_names_the_key() {
        let text = FIG4A.replace("gamma0 = 1\n", "");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e, Error::MissingKey("gamma0".into()));
        assert!(e.to_string().contains("gamma0"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config(&format!("{FIG4A}colour = red\n")).unwrap_err();
        assert_eq!(e, Error::Parse { line: 9, message: "unknown key `colour`".into() });
        let e = parse_config(&FIG4A.replace("d = 0.4", "d = fast")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e:?}");
        let e = parse_config(&FIG4A.replace("d = 0.4", "d 0.4")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }));
        let e = parse_config(&format!("{FIG4A}n = 3\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 9, .. }));
        let e = parse_config(&format!("{FIG4A}g = 3\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 9, .. }));
    }

    #[test]
    fn validation_errors_surface() {
        let e = parse_config(&FIG4A.replace("gamma0 = 1", "gamma0 = -1")).unwrap_err();
        assert!(matches!(e, Error::Invalid { field: "gamma0", .. }));
        let e = parse_config(&FIG4A.replace("d = 0.4", "tail.d = [0.4, 0.1]")).unwrap_err();
        assert!(matches!(e, Error::LengthMismatch { .. }), "{e:?}");
        let e = parse_config(&format!("{FIG4A}grid.count = 10\n")).unwrap_err();
        assert_eq!(e, Error::MissingKey("grid.start".into()));
    }

    #[test]
    fn render_round_trips() {
        let mut c = parse_config(FIG4A).unwrap();
        c.out = Some(PathBuf::from("x.csv"));
        assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
        let text = "mode = cavity\nn = 2\nd = 0.4\ngamma0 = 0.1\ngamma = 1e-3\ng = 0.8\nkappa = 1\nepsilon = 0.03\nrate_prefactor = 1\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
    }
}
