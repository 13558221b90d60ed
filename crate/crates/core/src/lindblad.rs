//! Exact stationary states of the full master equation.
//!
//! The Liouvillian is assembled densely on column-stacked density matrices,
//! `vec(ρ)[i + D·j] = ρ[i][j]`, and the stationary state is found by replacing
//! one row of `L vec(ρ) = 0` with the trace condition. Dense storage grows as
//! `D⁴`, so every builder enforces a size cap.
//!
//! Dissipators use the convention `γ(2cρc† − c†cρ − ρc†c)`: coherences of a
//! site decay at `γ`, its excited population at `2γ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CavityParams, ChainParams, DensityMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Size caps for the dense oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest chain length `N` accepted in free space.
    pub max_free_extra: usize,
    /// Largest Hilbert dimension `(n_max + 1)·2^(N+1)` accepted with a cavity.
    pub max_cavity_dim: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_free_extra: 4,
            max_cavity_dim: 64,
        }
    }
}

/// Tensor layout: an optional Fock space followed by `sites` two-level systems.
///
/// Local qubit basis is `{|g⟩, |e⟩}`, so the all-ground state (with the cavity
/// in vacuum) is basis index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub sites: usize,
    /// Number of Fock levels (`n_max + 1`), if a cavity is present.
    pub fock_levels: Option<usize>,
}

/// Observables the oracle knows how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `σ_+` of site 0.
    SigmaPlus0,
    /// Cavity annihilation operator.
    A,
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.fock_levels.unwrap_or(1) << self.sites
    }

    fn fock_dim(&self) -> usize {
        self.fock_levels.unwrap_or(1)
    }

    /// Embeds a 2×2 operator on qubit `site`.
    fn on_site(&self, site: usize, local: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let before = self.fock_dim() << site;
        let after = 1usize << (self.sites - site - 1);
        DMatrix::identity(before, before)
            .kronecker(local)
            .kronecker(&DMatrix::identity(after, after))
    }

    pub fn sigma_minus(&self, site: usize) -> DMatrix<Complex64> {
        let mut local = DMatrix::zeros(2, 2);
        local[(0, 1)] = ONE;
        self.on_site(site, &local)
    }

    pub fn sigma_plus(&self, site: usize) -> DMatrix<Complex64> {
        self.sigma_minus(site).adjoint()
    }

    pub fn sigma_z(&self, site: usize) -> DMatrix<Complex64> {
        let local = DMatrix::from_diagonal(&DVector::from_vec(vec![-ONE, ONE]));
        self.on_site(site, &local)
    }

    /// Truncated annihilation operator; `None` without a cavity.
    pub fn annihilation(&self) -> Option<DMatrix<Complex64>> {
        let levels = self.fock_levels?;
        let mut local = DMatrix::zeros(levels, levels);
        for n in 1..levels {
            local[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        let rest = 1usize << self.sites;
        Some(local.kronecker(&DMatrix::identity(rest, rest)))
    }

    pub fn operator(&self, obs: Observable) -> Result<DMatrix<Complex64>> {
        match obs {
            Observable::SigmaPlus0 => Ok(self.sigma_plus(0)),
            Observable::A => self
                .annihilation()
                .ok_or_else(|| Error::invalid("observable", "`a` needs a cavity layout")),
        }
    }
}

/// Dense superoperator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub dim: usize,
    pub layout: Layout,
    pub matrix: DMatrix<Complex64>,
}

impl Liouvillian {
    /// Coherent part `−i[H, ·]` with no dissipation.
    fn coherent(layout: Layout, h: &DMatrix<Complex64>) -> Self {
        let dim = layout.dim();
        let mut l = Liouvillian {
            dim,
            layout,
            matrix: DMatrix::zeros(dim * dim, dim * dim),
        };
        l.add_left(h, -I);
        l.add_right(h, I);
        l
    }

    /// Adds `rate (2cρc† − c†cρ − ρc†c)`.
    fn add_dissipator(&mut self, c: &DMatrix<Complex64>, rate: f64) {
        if rate == 0.0 {
            return;
        }
        let cd = c.adjoint();
        let number = &cd * c;
        let r = Complex64::new(rate, 0.0);
        self.add_sandwich(c, &cd, 2.0 * r);
        self.add_left(&number, -r);
        self.add_right(&number, -r);
    }

    /// `coef · Aρ`
    fn add_left(&mut self, a: &DMatrix<Complex64>, coef: Complex64) {
        let d = self.dim;
        for ((i, k), v) in nonzeros(a) {
            for j in 0..d {
                self.matrix[(i + d * j, k + d * j)] += coef * v;
            }
        }
    }

    /// `coef · ρB`
    fn add_right(&mut self, b: &DMatrix<Complex64>, coef: Complex64) {
        let d = self.dim;
        for ((l, j), v) in nonzeros(b) {
            for i in 0..d {
                self.matrix[(i + d * j, i + d * l)] += coef * v;
            }
        }
    }

    /// `coef · AρB`
    fn add_sandwich(&mut self, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, coef: Complex64) {
        let d = self.dim;
        let bs: Vec<_> = nonzeros(b).collect();
        for ((i, k), va) in nonzeros(a) {
            for &((l, j), vb) in &bs {
                self.matrix[(i + d * j, k + d * l)] += coef * va * vb;
            }
        }
    }

    /// `dρ/dt` for a given state.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let v = DVector::from_column_slice(rho.as_slice());
        let out = &self.matrix * v;
        DMatrix::from_column_slice(self.dim, self.dim, out.as_slice())
    }
}

fn nonzeros(m: &DMatrix<Complex64>) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
    let rows = m.nrows();
    m.iter()
        .enumerate()
        .filter(|(_, v)| **v != ZERO)
        .map(move |(idx, v)| ((idx % rows, idx / rows), *v))
}

pub fn build_liouvillian_free(params: &ChainParams, delta_p: f64) -> Result<Liouvillian> {
    build_liouvillian_free_with(params, delta_p, OracleLimits::default())
}

pub fn build_liouvillian_free_with(
    params: &ChainParams,
    delta_p: f64,
    limits: OracleLimits,
) -> Result<Liouvillian> {
    params.validate_allow_undriven()?;
    if params.n_extra > limits.max_free_extra {
        return Err(Error::CapExceeded {
            what: "N",
            value: params.n_extra,
            cap: limits.max_free_extra,
        });
    }
    let layout = Layout {
        sites: params.sites(),
        fock_levels: None,
    };
    let minus: Vec<_> = (0..layout.sites).map(|s| layout.sigma_minus(s)).collect();

    let mut h = DMatrix::zeros(layout.dim(), layout.dim());
    for s in 0..layout.sites {
        h += layout.sigma_z(s) * Complex64::new(delta_p / 2.0, 0.0);
    }
    hop_terms(&mut h, &minus, |j| params.coupling(j));
    h += (&minus[0] + minus[0].adjoint()) * Complex64::new(params.omega_p, 0.0);

    let mut l = Liouvillian::coherent(layout, &h);
    for (s, c) in minus.iter().enumerate() {
        l.add_dissipator(c, params.decay(s));
    }
    Ok(l)
}

pub fn build_liouvillian_cavity(params: &CavityParams, delta_p: f64) -> Result<Liouvillian> {
    build_liouvillian_cavity_with(params, delta_p, OracleLimits::default())
}

pub fn build_liouvillian_cavity_with(
    params: &CavityParams,
    delta_p: f64,
    limits: OracleLimits,
) -> Result<Liouvillian> {
    params.validate_allow_undriven()?;
    let layout = Layout {
        sites: params.chain.sites(),
        fock_levels: Some(params.n_max + 1),
    };
    // checked before anything of size D is allocated
    let dim = (params.n_max + 1)
        .checked_shl(layout.sites as u32)
        .filter(|d| *d >> layout.sites == params.n_max + 1)
        .unwrap_or(usize::MAX);
    if dim > limits.max_cavity_dim {
        return Err(Error::CapExceeded {
            what: "D",
            value: dim,
            cap: limits.max_cavity_dim,
        });
    }
    let minus: Vec<_> = (0..layout.sites).map(|s| layout.sigma_minus(s)).collect();
    let a = layout.annihilation().expect("cavity layout");
    let ad = a.adjoint();
    let delta = Complex64::new(delta_p, 0.0);

    let mut h = &ad * &a * delta;
    for s in 0..layout.sites {
        h += layout.sigma_z(s) * (delta / 2.0);
    }
    h += (&a * minus[0].adjoint() + &ad * &minus[0]) * Complex64::new(params.g, 0.0);
    hop_terms(&mut h, &minus, |j| params.chain.coupling(j));
    h += (&a + &ad) * Complex64::new(params.epsilon, 0.0);

    let mut l = Liouvillian::coherent(layout, &h);
    for (s, c) in minus.iter().enumerate() {
        l.add_dissipator(c, params.chain.decay(s));
    }
    l.add_dissipator(&a, params.kappa);
    Ok(l)
}

/// `Σ_j d_j (σ_−^j σ_+^(j+1) + h.c.)`
fn hop_terms(h: &mut DMatrix<Complex64>, minus: &[DMatrix<Complex64>], coupling: impl Fn(usize) -> f64) {
    for j in 0..minus.len().saturating_sub(1) {
        let d = coupling(j);
        if d == 0.0 {
            continue;
        }
        let hop = &minus[j] * minus[j + 1].adjoint();
        *h += (&hop + hop.adjoint()) * Complex64::new(d, 0.0);
    }
}

/// Smallest accepted eigenvalue of a returned state.
pub const POSITIVITY_FLOOR: f64 = -1e-8;
/// Hermiticity and trace tolerance of a returned state.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Unique stationary state of `l`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.dim;
    let n = d * d;
    let mut system = l.matrix.clone();
    for col in 0..n {
        system[(0, col)] = ZERO;
    }
    for k in 0..d {
        system[(0, k * (d + 1))] = ONE;
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = ONE;

    let lu = system.lu();
    let u = lu.u();
    let pivots = u.diagonal().map(|z| z.norm());
    let largest = pivots.max();
    if pivots.min() <= 1e-13 * largest {
        return Err(Error::NonUniqueKernel);
    }
    let x = lu.solve(&rhs).ok_or(Error::NonUniqueKernel)?;

    let l_norm = l.matrix.norm();
    let residual = (&l.matrix * &x).norm();
    if residual > 1e-10 * l_norm {
        return Err(Error::BadState {
            check: "residual",
            detail: format!("|L vec(rho)| = {residual:.3e}, |L| = {l_norm:.3e}"),
        });
    }

    let rho = DensityMatrix {
        entries: DMatrix::from_column_slice(d, d, x.as_slice()),
    };
    let herm = rho.hermiticity_error();
    if herm > STATE_TOLERANCE {
        return Err(Error::BadState {
            check: "hermiticity",
            detail: format!("max |rho - rho^dag| = {herm:.3e}"),
        });
    }
    let trace_err = (rho.trace() - ONE).norm();
    if trace_err > STATE_TOLERANCE {
        return Err(Error::BadState {
            check: "trace",
            detail: format!("|tr rho - 1| = {trace_err:.3e}"),
        });
    }
    let min_eig = rho.min_eigenvalue();
    if min_eig < POSITIVITY_FLOOR {
        return Err(Error::BadState {
            check: "positivity",
            detail: format!("smallest eigenvalue {min_eig:.3e}"),
        });
    }
    Ok(rho)
}

/// `Tr(ρ O)`.
pub fn expectation(rho: &DensityMatrix, op: &DMatrix<Complex64>) -> Result<Complex64> {
    let d = rho.dim();
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch { op: op.nrows(), state: d });
    }
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += rho.entries[(i, j)] * op[(j, i)];
        }
    }
    Ok(acc)
}

/// `⟨σ_+^0⟩` from the exact stationary state.
pub fn oracle_free_space(params: &ChainParams, delta_p: f64, limits: OracleLimits) -> Result<Complex64> {
    let l = build_liouvillian_free_with(params, delta_p, limits)?;
    let rho = steady_state(&l)?;
    expectation(&rho, &l.layout.operator(Observable::SigmaPlus0)?)
}

/// `⟨a⟩` from the exact stationary state.
pub fn oracle_cavity(params: &CavityParams, delta_p: f64, limits: OracleLimits) -> Result<Complex64> {
    let l = build_liouvillian_cavity_with(params, delta_p, limits)?;
    let rho = steady_state(&l)?;
    expectation(&rho, &l.layout.operator(Observable::A)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiclassical::{solve_cavity, solve_free_space};
    use rand::{Rng, SeedableRng};

    fn random_hermitian(d: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn fig2a(omega_p: f64) -> ChainParams {
        ChainParams::uniform(1, 0.5, 0.0, 1.0, 1e-3, omega_p)
    }

    fn fig2b(epsilon: f64, n_max: usize) -> CavityParams {
        CavityParams {
            chain: ChainParams::uniform(1, 3.0, 0.0, 1.0, 1e-3, epsilon),
            g: 5.0,
            kappa: 1.0,
            epsilon,
            n_max,
        }
    }

    #[test]
    fn dimensions() {
        let l = build_liouvillian_free(&fig2a(0.03), 0.0).unwrap();
        assert_eq!(l.dim, 4);
        assert_eq!(l.matrix.shape(), (16, 16));
        let l = build_liouvillian_cavity(&fig2b(0.03, 2), 0.0).unwrap();
        assert_eq!(l.dim, 12);
    }

    #[test]
    fn caps_enforced() {
        let p = ChainParams::uniform(5, 0.5, 0.3, 1.0, 1e-3, 0.03);
        assert!(matches!(build_liouvillian_free(&p, 0.0), Err(Error::CapExceeded { what: "N", .. })));
        let c = CavityParams {
            chain: ChainParams::uniform(3, 0.5, 0.5, 1.0, 1e-3, 0.03),
            g: 1.0,
            kappa: 1.0,
            epsilon: 0.03,
            n_max: 4,
        };
        assert!(matches!(build_liouvillian_cavity(&c, 0.0), Err(Error::CapExceeded { what: "D", value: 80, cap: 64 })));
    }

    #[test]
    fn trace_preserving_and_hermiticity_preserving() {
        let p = ChainParams::uniform(2, 0.5, 0.4, 1.0, 0.1, 0.2);
        let l = build_liouvillian_free(&p, 0.3).unwrap();
        let c = build_liouvillian_cavity(&fig2b(0.2, 2), -0.4).unwrap();
        for (seed, lv) in [(1, &l), (2, &c)] {
            let rho = random_hermitian(lv.dim, seed);
            let drho = lv.apply(&rho);
            assert!(drho.trace().norm() <= 1e-10);
            let skew = (&drho - drho.adjoint()).norm();
            assert!(skew <= 1e-10);
        }
    }

    #[test]
    fn undriven_state_is_ground() {
        for n in 0..=3 {
            let p = ChainParams::uniform(n, 0.5, 0.4, 1.0, 0.1, 0.0);
            let l = build_liouvillian_free(&p, 0.2).unwrap();
            let rho = steady_state(&l).unwrap();
            assert!((rho.entries[(0, 0)] - ONE).norm() < 1e-12);
            let s = expectation(&rho, &l.layout.sigma_plus(0)).unwrap();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn two_level_optical_bloch() {
        // exact: ⟨σ+⟩ = iΩ / (γ (1 + 2Ω²/γ²)) at Δ = 0
        let p = ChainParams::uniform(0, 0.0, 0.0, 1.0, 0.0, 0.01);
        let s = oracle_free_space(&p, 0.0, OracleLimits::default()).unwrap();
        let exact = 0.01 / (1.0 + 2.0 * 1e-4);
        assert!((s.im - exact).abs() < 1e-13);
        assert!(s.re.abs() < 1e-13);
        assert!((s.im - 0.01).abs() / 0.01 < 5e-4);
    }

    #[test]
    fn expectation_by_hand() {
        // ρ = [[0.7, 0.2-0.1i], [0.2+0.1i, 0.3]] in {g, e}; σ+ = |e⟩⟨g|
        let rho = DensityMatrix {
            entries: DMatrix::from_row_slice(2, 2, &[
                Complex64::new(0.7, 0.0), Complex64::new(0.2, -0.1),
                Complex64::new(0.2, 0.1), Complex64::new(0.3, 0.0),
            ]),
        };
        let layout = Layout { sites: 1, fock_levels: None };
        let s = expectation(&rho, &layout.sigma_plus(0)).unwrap();
        assert_eq!(s, Complex64::new(0.2, -0.1));
        let bad = DMatrix::<Complex64>::zeros(4, 4);
        assert!(matches!(expectation(&rho, &bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn vacuum_has_no_field() {
        let layout = Layout { sites: 1, fock_levels: Some(3) };
        let mut entries = DMatrix::zeros(6, 6);
        entries[(0, 0)] = ONE;
        let rho = DensityMatrix { entries };
        assert_eq!(expectation(&rho, &layout.annihilation().unwrap()).unwrap(), ZERO);
        assert!(layout.operator(Observable::A).is_ok());
        assert!(Layout { sites: 1, fock_levels: None }.operator(Observable::A).is_err());
    }

    #[test]
    fn undriven_empty_cavity_is_vacuum() {
        let mut c = fig2b(0.0, 2);
        c.g = 0.0;
        let l = build_liouvillian_cavity(&c, 0.0).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!((rho.entries[(0, 0)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn decoupled_lossless_tail_has_no_unique_state() {
        let p = ChainParams::uniform(1, 0.0, 0.0, 1.0, 0.0, 0.03);
        let l = build_liouvillian_free(&p, 0.0).unwrap();
        assert_eq!(steady_state(&l).unwrap_err(), Error::NonUniqueKernel);
    }

    #[test]
    fn states_are_physical() {
        let p = ChainParams::uniform(2, 0.8, 0.4, 1.0, 1e-3, 0.3);
        for &delta in &[-1.0, 0.0, 0.5] {
            let rho = steady_state(&build_liouvillian_free(&p, delta).unwrap()).unwrap();
            assert!(rho.hermiticity_error() <= STATE_TOLERANCE);
            assert!((rho.trace() - ONE).norm() <= STATE_TOLERANCE);
            assert!(rho.min_eigenvalue() >= POSITIVITY_FLOOR);
        }
    }

    #[test]
    fn weak_drive_approaches_linear_response() {
        for &delta in &[-0.6, -0.1, 0.0, 0.25, 0.8] {
            let exact = oracle_free_space(&fig2a(1e-3), delta, OracleLimits::default()).unwrap();
            let linear = solve_free_space(&fig2a(1e-3), delta).unwrap();
            assert!((exact - linear).norm() / 1e-3 < 1e-3, "{delta}: {exact} vs {linear}");
        }
    }

    #[test]
    fn cavity_truncation_converges() {
        for &delta in &[-5.8, -3.0, 0.0, 1.0] {
            let a2 = oracle_cavity(&fig2b(0.03, 1), delta, OracleLimits::default()).unwrap();
            let a3 = oracle_cavity(&fig2b(0.03, 2), delta, OracleLimits::default()).unwrap();
            // measured against the response scale ε/κ; pointwise relative
            // change reaches ~1.1e-3 inside the dip where |⟨a⟩| is small
            assert!((a2 - a3).norm() / 0.03 < 1e-3);
            let lin = solve_cavity(&fig2b(0.03, 2), delta).unwrap();
            assert!((a3 - lin).norm() / 0.03 < 2e-2);
        }
    }
}
