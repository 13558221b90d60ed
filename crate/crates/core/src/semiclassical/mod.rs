//! Weak-drive steady state from the linearized equations of motion.
//!
//! With `⟨σz^j⟩ = −1` and operator products factorized, the stationary
//! coherences solve a complex symmetric tridiagonal system. The general
//! solvers here handle any chain length in O(N); [`closed_form`] holds the
//! explicit small-N expressions used as independent cross-checks.
//!
//! Free space, unknowns `s_j = ⟨σ_+^j⟩`:
//!
//! ```text
//! (iΔp − γ0) s0 + i d0 s1                    = −iΩp
//! (iΔp − γj) sj + i d(j−1) s(j−1) + i dj s(j+1) = 0
//! ```
//!
//! Cavity, unknowns `(⟨a⟩, ⟨σ_−^0⟩, …, ⟨σ_−^N⟩)`:
//!
//! ```text
//! −i(Δp − iκ) a  − i g s0            = iε
//! −i(Δp − iγ0) s0 − i g a − i d0 s1   = 0
//! −i(Δp − iγj) sj − i d(j−1) s(j−1) − i dj s(j+1) = 0
//! ```

pub mod closed_form;
mod tridiag;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{CavityParams, ChainParams};

pub use closed_form::{closed_form_cavity, closed_form_free_space};
pub use tridiag::TridiagonalSystem;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn free_diag(p: &ChainParams, delta_p: f64, j: usize) -> Complex64 {
    Complex64::new(-p.decay(j), delta_p)
}

fn cavity_diag(p: &CavityParams, delta_p: f64, row: usize) -> Complex64 {
    let rate = if row == 0 { p.kappa } else { p.chain.decay(row - 1) };
    -I * Complex64::new(delta_p, -rate)
}

fn cavity_off(p: &CavityParams, row: usize) -> Complex64 {
    let coupling = if row == 0 { p.g } else { p.chain.coupling(row - 1) };
    -I * coupling
}

pub fn assemble_free_space(params: &ChainParams, delta_p: f64) -> TridiagonalSystem {
    let n = params.sites();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[0] = -I * params.omega_p;
    TridiagonalSystem {
        diag: (0..n).map(|j| free_diag(params, delta_p, j)).collect(),
        off: (0..n - 1).map(|j| I * params.coupling(j)).collect(),
        rhs,
    }
}

/// `⟨σ_+^0⟩` in the weak-drive steady state.
pub fn solve_free_space(params: &ChainParams, delta_p: f64) -> Result<Complex64> {
    tridiag::head_response(
        params.sites(),
        |j| free_diag(params, delta_p, j),
        |j| I * params.coupling(j),
        -I * params.omega_p,
    )
}

pub fn assemble_cavity(params: &CavityParams, delta_p: f64) -> TridiagonalSystem {
    let n = params.chain.sites() + 1;
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[0] = I * params.epsilon;
    TridiagonalSystem {
        diag: (0..n).map(|r| cavity_diag(params, delta_p, r)).collect(),
        off: (0..n - 1).map(|r| cavity_off(params, r)).collect(),
        rhs,
    }
}

/// `⟨a⟩` in the weak-drive steady state.
pub fn solve_cavity(params: &CavityParams, delta_p: f64) -> Result<Complex64> {
    tridiag::head_response(
        params.chain.sites() + 1,
        |r| cavity_diag(params, delta_p, r),
        |r| cavity_off(params, r),
        I * params.epsilon,
    )
}
