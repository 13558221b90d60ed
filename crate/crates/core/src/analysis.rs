//! Sweeps over detuning and feature extraction on the resulting spectra.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{oracle_cavity, oracle_free_space, OracleLimits};
use crate::model::{
    ChainParams, DetuningGrid, Peak, Spectrum, SpectrumKind, SystemParams, Window, WindowReport,
};
use crate::semiclassical::{closed_form_cavity, closed_form_free_space, solve_cavity, solve_free_space};

/// Which solver evaluates each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Explicit small-N expressions, N ≤ 4.
    Closed,
    /// Tridiagonal solve of the linearized equations, any N.
    General,
    /// Exact Lindblad steady state, small systems only.
    Oracle,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Closed => "closed",
            Backend::General => "general",
            Backend::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Backend::Closed),
            "general" => Ok(Backend::General),
            "oracle" => Ok(Backend::Oracle),
            other => Err(Error::invalid("backend", format!("must be closed, general or oracle, got `{other}`"))),
        }
    }
}

/// Response at a single detuning.
pub fn evaluate(params: &SystemParams, delta_p: f64, backend: Backend, limits: OracleLimits) -> Result<Complex64> {
    match (backend, params) {
        (Backend::Closed, SystemParams::FreeSpace(p)) => closed_form_free_space(p, delta_p),
        (Backend::Closed, SystemParams::Cavity(p)) => closed_form_cavity(p, delta_p),
        (Backend::General, SystemParams::FreeSpace(p)) => solve_free_space(p, delta_p),
        (Backend::General, SystemParams::Cavity(p)) => solve_cavity(p, delta_p),
        (Backend::Oracle, SystemParams::FreeSpace(p)) => oracle_free_space(p, delta_p, limits),
        (Backend::Oracle, SystemParams::Cavity(p)) => oracle_cavity(p, delta_p, limits),
    }
}

pub fn sweep(params: &SystemParams, grid: &DetuningGrid, backend: Backend) -> Result<Spectrum> {
    sweep_with(params, grid, backend, OracleLimits::default())
}

/// Evaluates `backend` at every grid point. Semiclassical backends run in
/// parallel; the oracle runs sequentially since each point already holds a
/// dense Liouvillian.
pub fn sweep_with(
    params: &SystemParams,
    grid: &DetuningGrid,
    backend: Backend,
    limits: OracleLimits,
) -> Result<Spectrum> {
    params.validate()?;
    grid.validate()?;
    check_backend(params, backend)?;

    let at = |i: usize| {
        let delta = grid.point(i);
        evaluate(params, delta, backend, limits).map_err(|e| match e {
            // a size cap is a property of the run, not of this detuning
            Error::CapExceeded { .. } => e,
            other => Error::AtGridPoint { index: i, detuning: delta, source: Box::new(other) },
        })
    };
    let results: Vec<Result<Complex64>> = match backend {
        Backend::Oracle => (0..grid.count).map(at).collect(),
        _ => (0..grid.count).into_par_iter().map(at).collect(),
    };
    let values = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { grid: *grid, values, kind: params.kind(), norm: params.norm() })
}

fn check_backend(params: &SystemParams, backend: Backend) -> Result<()> {
    let n = params.chain().n_extra;
    match (backend, params) {
        (Backend::Closed, _) if !(1..=4).contains(&n) => Err(Error::Backend {
            backend: "closed",
            reason: format!("closed forms cover N in 1..=4, got N = {n}"),
        }),
        (Backend::Closed, SystemParams::FreeSpace(p)) if n >= 2 && p.uniform_tail_coupling().is_none() => {
            Err(Error::Backend { backend: "closed", reason: "needs a uniform tail coupling".into() })
        }
        (Backend::Closed, SystemParams::Cavity(p)) if p.chain.d_tail.iter().any(|&x| x != p.chain.d0) => {
            Err(Error::Backend { backend: "closed", reason: "cavity closed forms need d0 = d".into() })
        }
        _ => Ok(()),
    }
}

/// Largest pointwise deviation between two spectra on the same grid,
/// relative to the larger magnitude of each pair, floored at `floor`.
pub fn max_relative_deviation(a: &Spectrum, b: &Spectrum, floor: f64) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(floor))
        .fold(0.0, f64::max)
}

/// Largest deviation of normalized absorption between two spectra.
pub fn absorption_sup_deviation(a: &Spectrum, b: &Spectrum) -> f64 {
    a.absorption()
        .iter()
        .zip(b.absorption())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Deviations from absorption-even / dispersion-odd symmetry, in normalized
/// units, on a grid symmetric about zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub absorption_even: f64,
    pub dispersion_odd: f64,
}

pub fn check_symmetry(spec: &Spectrum) -> Result<SymmetryReport> {
    let g = &spec.grid;
    if (g.start + g.stop).abs() > 1e-12 * g.stop.abs().max(g.start.abs()) {
        return Err(Error::invalid("grid", "must be symmetric about zero for a symmetry check"));
    }
    let (a, d) = (spec.absorption(), spec.dispersion());
    let n = a.len();
    let mut report = SymmetryReport { absorption_even: 0.0, dispersion_odd: 0.0 };
    for i in 0..n / 2 + 1 {
        let j = n - 1 - i;
        report.absorption_even = report.absorption_even.max((a[i] - a[j]).abs());
        report.dispersion_odd = report.dispersion_odd.max((d[i] + d[j]).abs());
    }
    Ok(report)
}

/// Tuning knobs for [`detect_windows_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    /// Minimum contrast for a feature to count as a window.
    pub depth_threshold: f64,
    /// Narrowest accepted feature, in grid steps.
    pub min_steps: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { depth_threshold: 0.5, min_steps: 5.0 }
    }
}

pub fn detect_windows(spec: &Spectrum) -> Result<WindowReport> {
    detect_windows_with(spec, DetectOptions::default())
}

/// Finds peaks and transparency windows in the normalized absorption.
///
/// In free space a window is the minimum between two adjacent peaks, kept
/// when it falls below `(1 − depth_threshold)` of the lower peak. In the
/// cavity the atoms become transparent where the bare cavity line is
/// restored, so a window is an interior peak that rises above both of its
/// bracketing minima by the same criterion. Widths are taken at half the
/// local contrast.
pub fn detect_windows_with(spec: &Spectrum, opts: DetectOptions) -> Result<WindowReport> {
    let y = spec.absorption();
    let x = spec.detunings();
    let step = spec.grid.step();
    let peak_idx = local_maxima(&y);
    let peaks = peak_idx
        .iter()
        .map(|&i| Peak { center: refine_extremum(&x, &y, i), height: y[i] })
        .collect();

    let mut windows = Vec::new();
    match spec.kind {
        SpectrumKind::FreeSpace => {
            for pair in peak_idx.windows(2) {
                let (p, q) = (pair[0], pair[1]);
                let m = argmin(&y, p + 1, q);
                let lower = y[p].min(y[q]);
                if !(lower > 0.0 && y[m] < (1.0 - opts.depth_threshold) * lower) {
                    continue;
                }
                let level = y[m] + 0.5 * (lower - y[m]);
                let center = refine_extremum(&x, &y, m);
                let left = crossing(&x, &y, m, p, level);
                let right = crossing(&x, &y, m, q, level);
                windows.push(window(center, 1.0 - y[m] / lower, left, right));
            }
        }
        SpectrumKind::Cavity => {
            for trio in peak_idx.windows(3) {
                let (p, q, r) = (trio[0], trio[1], trio[2]);
                let base = y[argmin(&y, p + 1, q)].max(y[argmin(&y, q + 1, r)]);
                if !(y[q] > 0.0 && base < (1.0 - opts.depth_threshold) * y[q]) {
                    continue;
                }
                let level = base + 0.5 * (y[q] - base);
                let center = refine_extremum(&x, &y, q);
                let left = crossing(&x, &y, q, p, level);
                let right = crossing(&x, &y, q, r, level);
                windows.push(window(center, 1.0 - base / y[q], left, right));
            }
        }
    }

    let span = spec.grid.stop - spec.grid.start;
    for w in &windows {
        if w.fwhm < opts.min_steps * step {
            let target = w.fwhm / (2.0 * opts.min_steps);
            return Err(Error::UnderResolved {
                center: w.center,
                width: w.fwhm,
                step,
                suggested_count: (span / target).ceil() as usize + 1,
            });
        }
    }
    Ok(WindowReport { windows, peaks })
}

fn window(center: f64, depth: f64, left: f64, right: f64) -> Window {
    let fwhm = right - left;
    Window {
        center,
        depth: depth.clamp(0.0, 1.0),
        fwhm,
        asymmetry: ((center - left) - (right - center)).abs() / fwhm,
    }
}

fn local_maxima(y: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < y.len() {
        if y[i] > y[i - 1] {
            // walk across a flat top, then require a descent
            let mut j = i;
            while j + 1 < y.len() && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < y.len() && y[j + 1] < y[i] {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn argmin(y: &[f64], from: usize, to: usize) -> usize {
    (from..to).min_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap_or(from)
}

/// Vertex of the parabola through the three samples around `i`.
fn refine_extremum(x: &[f64], y: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= y.len() {
        return x[i];
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let curvature = a - 2.0 * b + c;
    if curvature == 0.0 {
        return x[i];
    }
    let offset = (0.5 * (a - c) / curvature).clamp(-0.5, 0.5);
    x[i] + offset * (x[i + 1] - x[i])
}

/// Linear-interpolated position where `y` crosses `level`, walking from
/// `from` towards `to`.
fn crossing(x: &[f64], y: &[f64], from: usize, to: usize, level: f64) -> f64 {
    let inside = y[from] < level;
    let dir: isize = if to > from { 1 } else { -1 };
    let mut i = from;
    while i != to {
        let j = (i as isize + dir) as usize;
        if (y[j] < level) != inside {
            let t = (level - y[i]) / (y[j] - y[i]);
            return x[i] + t * (x[j] - x[i]);
        }
        i = j;
    }
    x[to]
}

/// FWHM of the window centred within one grid step of zero detuning.
pub fn measure_central_width(spec: &Spectrum) -> Result<f64> {
    let step = spec.grid.step();
    detect_windows(spec)?
        .windows
        .iter()
        .find(|w| w.center.abs() <= step)
        .map(|w| w.fwhm)
        .ok_or(Error::NoCentralWindow)
}

/// A uniform free-space chain family indexed by its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainFamily {
    pub d0: f64,
    pub d: f64,
    pub gamma0: f64,
    pub gamma: f64,
    pub omega_p: f64,
}

impl ChainFamily {
    pub fn at(&self, n_extra: usize) -> ChainParams {
        ChainParams::uniform(n_extra, self.d0, self.d, self.gamma0, self.gamma, self.omega_p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCount {
    pub n: usize,
    pub windows: usize,
    pub report: WindowReport,
}

/// Sweeps and counts windows for each chain length in `ns`.
pub fn verify_window_count(
    family: &ChainFamily,
    ns: impl IntoIterator<Item = usize>,
    grid: &DetuningGrid,
    backend: Backend,
) -> Result<Vec<WindowCount>> {
    ns.into_iter()
        .map(|n| {
            let spec = sweep(&family.at(n).into(), grid, backend)?;
            let report = detect_windows(&spec)?;
            Ok(WindowCount { n, windows: report.windows.len(), report })
        })
        .collect()
}

/// Window depths for each tail decay rate in `gammas`.
pub fn depth_vs_gamma(
    family: &ChainFamily,
    n_extra: usize,
    gammas: &[f64],
    grid: &DetuningGrid,
) -> Result<Vec<(f64, Vec<f64>)>> {
    gammas
        .iter()
        .map(|&gamma| {
            let p = ChainFamily { gamma, ..*family }.at(n_extra);
            let report = detect_windows(&sweep(&p.into(), grid, Backend::General)?)?;
            Ok((gamma, report.windows.iter().map(|w| w.depth).collect()))
        })
        .collect()
}
