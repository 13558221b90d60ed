//! Parameter records and result types shared by every solver.
//!
//! All rates are absolute. Figures are reproduced by setting the scale rate
//! (`gamma0` in free space, `kappa` in the cavity) to 1. The probe detuning
//! `Δp = ω0 − ωp` is the only frequency that survives the rotating frame, so
//! it is passed to the solvers directly and never stored here.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A driven main two-level system (index 0) followed by a nearest-neighbour
/// chain of `n_extra` further two-level systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Number of systems coupled to the main one. Total count is `n_extra + 1`.
    pub n_extra: usize,
    /// Coupling between site 0 and site 1.
    pub d0: f64,
    /// Couplings `d_1 .. d_(N-1)`, length `max(N - 1, 0)`.
    pub d_tail: Vec<f64>,
    /// Amplitude decay rate of the main system.
    pub gamma0: f64,
    /// Decay rates `γ_1 .. γ_N`.
    pub gamma_tail: Vec<f64>,
    /// Probe amplitude (half the Rabi frequency).
    pub omega_p: f64,
}

impl ChainParams {
    /// Chain with one coupling `d` and one decay rate `gamma` shared by every
    /// tail site.
    pub fn uniform(n_extra: usize, d0: f64, d: f64, gamma0: f64, gamma: f64, omega_p: f64) -> Self {
        ChainParams {
            n_extra,
            d0,
            d_tail: vec![d; n_extra.saturating_sub(1)],
            gamma0,
            gamma_tail: vec![gamma; n_extra],
            omega_p,
        }
    }

    /// Total number of two-level systems, `N + 1`.
    pub fn sites(&self) -> usize {
        self.n_extra + 1
    }

    /// Coupling between site `j` and site `j + 1`.
    pub fn coupling(&self, j: usize) -> f64 {
        if j == 0 {
            self.d0
        } else {
            self.d_tail[j - 1]
        }
    }

    /// Decay rate of site `j`.
    pub fn decay(&self, j: usize) -> f64 {
        if j == 0 {
            self.gamma0
        } else {
            self.gamma_tail[j - 1]
        }
    }

    /// The shared tail coupling, if every `d_j` (j ≥ 1) is equal.
    pub fn uniform_tail_coupling(&self) -> Option<f64> {
        match self.d_tail.split_first() {
            None => None,
            Some((first, rest)) => rest.iter().all(|d| d == first).then_some(*first),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_chain()?;
        positive("omega_p", self.omega_p)
    }

    /// Validates and hands the record back untouched.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// As [`Self::validate`] but accepting `omega_p = 0` (undriven chain).
    pub(crate) fn validate_allow_undriven(&self) -> Result<()> {
        self.validate_chain()?;
        if self.omega_p == 0.0 {
            Ok(())
        } else {
            positive("omega_p", self.omega_p)
        }
    }

    /// Everything except the probe amplitude, which the cavity drive replaces.
    pub(crate) fn validate_chain(&self) -> Result<()> {
        let expected_d = self.n_extra.saturating_sub(1);
        if self.d_tail.len() != expected_d {
            return Err(Error::LengthMismatch {
                field: "d_tail",
                expected: expected_d,
                got: self.d_tail.len(),
            });
        }
        if self.gamma_tail.len() != self.n_extra {
            return Err(Error::LengthMismatch {
                field: "gamma_tail",
                expected: self.n_extra,
                got: self.gamma_tail.len(),
            });
        }
        positive("gamma0", self.gamma0)?;
        non_negative("d0", self.d0)?;
        for &d in &self.d_tail {
            non_negative("d_tail", d)?;
        }
        for &g in &self.gamma_tail {
            non_negative("gamma_tail", g)?;
        }
        Ok(())
    }
}

/// A driven cavity mode coupled to site 0 of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// The chain. Its `omega_p` is not used.
    pub chain: ChainParams,
    /// Cavity to site-0 coupling.
    pub g: f64,
    /// Cavity amplitude decay rate.
    pub kappa: f64,
    /// Cavity drive strength.
    pub epsilon: f64,
    /// Fock-space cutoff, only read by the Lindblad oracle.
    pub n_max: usize,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        self.chain.validate_chain()?;
        non_negative("g", self.g)?;
        positive("kappa", self.kappa)?;
        positive("epsilon", self.epsilon)?;
        if self.n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// As [`Self::validate`] but accepting `epsilon = 0` (undriven cavity).
    pub(crate) fn validate_allow_undriven(&self) -> Result<()> {
        if self.epsilon == 0.0 {
            return CavityParams { epsilon: 1.0, ..self.clone() }.validate();
        }
        self.validate()
    }
}

/// Either kind of run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SystemParams {
    FreeSpace(ChainParams),
    Cavity(CavityParams),
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            SystemParams::FreeSpace(p) => p.validate(),
            SystemParams::Cavity(p) => p.validate(),
        }
    }

    pub fn chain(&self) -> &ChainParams {
        match self {
            SystemParams::FreeSpace(p) => p,
            SystemParams::Cavity(p) => &p.chain,
        }
    }

    pub fn kind(&self) -> SpectrumKind {
        match self {
            SystemParams::FreeSpace(_) => SpectrumKind::FreeSpace,
            SystemParams::Cavity(_) => SpectrumKind::Cavity,
        }
    }

    /// Peak of the bare response: `Ω_p/γ_0` or `ε/κ`.
    pub fn norm(&self) -> f64 {
        match self {
            SystemParams::FreeSpace(p) => p.omega_p / p.gamma0,
            SystemParams::Cavity(p) => p.epsilon / p.kappa,
        }
    }
}

impl From<ChainParams> for SystemParams {
    fn from(p: ChainParams) -> Self {
        SystemParams::FreeSpace(p)
    }
}

impl From<CavityParams> for SystemParams {
    fn from(p: CavityParams) -> Self {
        SystemParams::Cavity(p)
    }
}

fn positive(field: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, "must be positive"))
    }
}

fn non_negative(field: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, "must be finite and non-negative"))
    }
}

/// Uniformly spaced probe detunings, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl DetuningGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let grid = DetuningGrid { start, stop, count };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid symmetric about zero.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start >= self.stop {
            return Err(Error::invalid("grid", "needs finite start < stop"));
        }
        if self.count < 2 {
            return Err(Error::invalid("grid", "count must be at least 2"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        // exact endpoints, and exact mirror images on symmetric grids
        if i + 1 == self.count {
            return self.stop;
        }
        let t = i as f64 / (self.count - 1) as f64;
        if self.start == -self.stop {
            let half = (self.count - 1) as f64 / 2.0;
            return self.stop * (i as f64 - half) / half;
        }
        self.start + t * (self.stop - self.start)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    /// `⟨σ_+^0⟩` of the driven site.
    FreeSpace,
    /// `⟨a⟩` of the driven cavity mode.
    Cavity,
}

/// Complex steady-state response sampled on a detuning grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: DetuningGrid,
    pub values: Vec<Complex64>,
    pub kind: SpectrumKind,
    /// Bare-resonance peak used for normalization.
    pub norm: f64,
}

impl Spectrum {
    pub fn detunings(&self) -> Vec<f64> {
        self.grid.points().collect()
    }

    /// `Im(value) / norm`, with the raw sign.
    pub fn normalized_im(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im / self.norm).collect()
    }

    /// `Re(value) / norm`, with the raw sign.
    pub fn normalized_re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re / self.norm).collect()
    }

    /// Normalized absorption, oriented so that the bare resonance peaks at +1.
    ///
    /// With a real drive the free-space coherence gives `+Ω_p/γ_0` on bare
    /// resonance while the cavity field gives `−iε/κ`, so the cavity sign is
    /// flipped here.
    pub fn absorption(&self) -> Vec<f64> {
        let sign = self.orientation();
        self.values.iter().map(|v| sign * v.im / self.norm).collect()
    }

    /// Normalized dispersion, with the same orientation as [`Self::absorption`].
    pub fn dispersion(&self) -> Vec<f64> {
        let sign = self.orientation();
        self.values.iter().map(|v| sign * v.re / self.norm).collect()
    }

    fn orientation(&self) -> f64 {
        match self.kind {
            SpectrumKind::FreeSpace => 1.0,
            SpectrumKind::Cavity => -1.0,
        }
    }
}

/// Single-excitation eigenstates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    /// Excitation energies above the ground state, `Δp + λ_k`, ascending.
    pub energies: Vec<f64>,
    /// Real amplitudes over the one-excitation basis, index-aligned with
    /// `energies`.
    pub vectors: Vec<Vec<f64>>,
    /// Detuning the energies were evaluated at.
    pub delta_p: f64,
    /// Absolute ground-state energy under the `Δp σz / 2` convention.
    pub ground_energy: f64,
}

impl EigenSystem {
    /// Coupling-matrix eigenvalues `λ_k` (energies with the detuning removed).
    pub fn coupling_eigenvalues(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e - self.delta_p).collect()
    }
}

/// Decay rates of the one-excitation eigenstates into the ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub rates: Vec<f64>,
}

impl RateSet {
    pub fn total(&self) -> f64 {
        self.rates.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: f64,
    /// 1 for a perfect window, 0 for no contrast.
    pub depth: f64,
    pub fwhm: f64,
    /// `|left half-width − right half-width| / fwhm`.
    pub asymmetry: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct WindowReport {
    pub windows: Vec<Window>,
    pub peaks: Vec<Peak>,
}

/// Dense density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest `|ρ − ρ†|` entry.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}
