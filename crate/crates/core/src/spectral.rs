//! One-excitation eigenstates and their golden-rule decay rates.
//!
//! With a single excitation the chain Hamiltonian reduces to the real
//! symmetric tridiagonal coupling matrix on the basis
//! `{|e g…g⟩, |g e g…g⟩, …}` (zero diagonal at `Δp = 0`). The decay rate of
//! eigenstate `k` through the main site is `Γ_k = γ0 |v_k[0]|²`, so the rates
//! sum to `γ0` for any chain.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CavityParams, ChainParams, EigenSystem, RateSet};

/// Couplings among sites `1..=N` only; its eigenvalues are the dark
/// resonances of the driven site.
pub fn tail_coupling_matrix(params: &ChainParams) -> Result<DMatrix<f64>> {
    let n = params.n_extra;
    if n == 0 {
        return Err(Error::invalid("n_extra", "tail coupling matrix needs N >= 1"));
    }
    Ok(jacobi(n, |j| params.coupling(j + 1)))
}

/// Zero-diagonal symmetric tridiagonal matrix with off-diagonal `off(j)`.
fn jacobi(size: usize, off: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(size, size);
    for j in 0..size.saturating_sub(1) {
        m[(j, j + 1)] = off(j);
        m[(j + 1, j)] = off(j);
    }
    m
}

/// Ascending eigenvalues and matching eigenvectors. Each vector's first
/// component larger than 1e-12 in magnitude is made positive.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().cloned().collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v
        })
        .collect();
    (values, vectors)
}

/// Eigenvalues of the tail coupling matrix, ascending.
pub fn tail_eigenvalues(params: &ChainParams) -> Result<Vec<f64>> {
    Ok(sorted_eigen(tail_coupling_matrix(params)?).0)
}

/// Diagonalizes the `(N+1)`-site one-excitation block.
///
/// Energies are measured from the ground state: one excitation costs `Δp`
/// under the `Δp σz / 2` convention, so `E_k = Δp + λ_k` with `λ_k` the
/// coupling-matrix eigenvalues. The ground state itself sits at
/// `−(N+1) Δp / 2`, stored as `ground_energy`.
pub fn single_excitation_eigensystem(params: &ChainParams, delta_p: f64) -> EigenSystem {
    let (lambda, vectors) = sorted_eigen(jacobi(params.sites(), |j| params.coupling(j)));
    EigenSystem {
        energies: lambda.iter().map(|l| delta_p + l).collect(),
        vectors,
        delta_p,
        ground_energy: -(params.sites() as f64) * delta_p / 2.0,
    }
}

/// Cavity photon plus `N+1` sites; photon amplitude is component 0.
pub fn cavity_single_excitation_eigensystem(params: &CavityParams, delta_p: f64) -> EigenSystem {
    let chain = &params.chain;
    let (lambda, vectors) = sorted_eigen(jacobi(chain.sites() + 1, |j| {
        if j == 0 {
            params.g
        } else {
            chain.coupling(j - 1)
        }
    }));
    EigenSystem {
        energies: lambda.iter().map(|l| delta_p + l).collect(),
        vectors,
        delta_p,
        ground_energy: -(chain.sites() as f64) * delta_p / 2.0,
    }
}

/// `Γ_k = γ0 |⟨ψ_g| σ_−^0 |ψ_k⟩|²`.
pub fn transition_rates_numeric(params: &ChainParams, eig: &EigenSystem) -> RateSet {
    RateSet {
        rates: eig.vectors.iter().map(|v| params.gamma0 * v[0] * v[0]).collect(),
    }
}

/// Printed closed-form rates for N ∈ {2, 3, 4} with a uniform tail, ordered by
/// ascending energy (units of `γ0` times `γ0`).
pub fn transition_rates_closed(params: &ChainParams) -> Result<RateSet> {
    let n = params.n_extra;
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedOrder { n, supported: "N in 2..=4" });
    }
    let d = params.uniform_tail_coupling().ok_or(Error::NonUniformTail)?;
    let (d2, a2) = (d * d, params.d0 * params.d0);
    let rates = match n {
        2 => {
            let middle = d2 / (a2 + d2);
            let outer = a2 / (2.0 * (d2 + a2));
            vec![outer, middle, outer]
        }
        3 => {
            let r = (4.0 * d2 * d2 + a2 * a2).sqrt();
            let inner = (2.0 * d2 - a2 + r) / (4.0 * r);
            let outer = (-2.0 * d2 + a2 + r) / (4.0 * r);
            vec![outer, inner, inner, outer]
        }
        4 => {
            let c = (5.0 * d2 * d2 - 2.0 * d2 * a2 + a2 * a2).sqrt();
            let middle = d2 / (d2 + 2.0 * a2);
            let second = a2 * (2.0 * d2 - a2 + c) / (2.0 * (d2 + 2.0 * a2) * c);
            let first = a2 * (-2.0 * d2 + a2 + c) / (2.0 * (d2 + 2.0 * a2) * c);
            vec![first, second, middle, second, first]
        }
        _ => unreachable!(),
    };
    Ok(RateSet {
        rates: rates.into_iter().map(|r| r * params.gamma0).collect(),
    })
}

/// `Γ_k = prefactor · |⟨ψ_g| a |ψ_k⟩|²` over the `N+2` one-excitation states.
pub fn cavity_transition_rates(params: &CavityParams, prefactor: f64) -> RateSet {
    let eig = cavity_single_excitation_eigensystem(params, 0.0);
    RateSet {
        rates: eig.vectors.iter().map(|v| prefactor * v[0] * v[0]).collect(),
    }
}

/// Printed cavity rates for N ∈ {2, 3}, uniform `d` (including `d0`), ordered
/// by ascending energy.
pub fn cavity_transition_rates_closed(params: &CavityParams, prefactor: f64) -> Result<RateSet> {
    let chain = &params.chain;
    let n = chain.n_extra;
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedOrder { n, supported: "N in 2..=3" });
    }
    let d = chain.d0;
    if chain.d_tail.iter().any(|&x| x != d) {
        return Err(Error::NonUniformTail);
    }
    let (d2, g2) = (d * d, params.g * params.g);
    let rates = match n {
        2 => {
            let root = (4.0 * d2 * d2 + g2 * g2).sqrt();
            let outer = d2 * g2 / (4.0 * d2 * d2 + g2 * g2 + (2.0 * d2 - g2) * root);
            let inner = d2 * g2 / (4.0 * d2 * d2 + g2 * g2 + (g2 - 2.0 * d2) * root);
            vec![outer, inner, inner, outer]
        }
        3 => {
            let c = (5.0 * d2 * d2 - 2.0 * d2 * g2 + g2 * g2).sqrt();
            let middle = d2 / (d2 + 2.0 * g2);
            let first = g2 * (g2 - 2.0 * d2 + c) / (2.0 * c * (d2 + 2.0 * g2));
            let second = g2 * (2.0 * d2 - g2 + c) / (2.0 * c * (d2 + 2.0 * g2));
            vec![first, second, middle, second, first]
        }
        _ => unreachable!(),
    };
    Ok(RateSet {
        rates: rates.into_iter().map(|r| r * prefactor).collect(),
    })
}

/// Which route produces the rates during a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatePath {
    Closed,
    Numeric,
}

/// A value of the tail coupling `d` where two or more rates coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub d: f64,
    /// Index pairs (ascending-energy order) whose rates cross here.
    pub pairs: Vec<(usize, usize)>,
    /// True when every rate is equal at `d`.
    pub full: bool,
}

/// Scans the uniform tail coupling `d` over `[lo, hi]` and locates every
/// pairwise rate crossing by sign change and bisection.
pub fn rate_crossing_scan(
    template: &ChainParams,
    path: RatePath,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<Crossing>> {
    let rates_at = |d: f64| -> Result<Vec<f64>> {
        let p = ChainParams::uniform(
            template.n_extra,
            template.d0,
            d,
            template.gamma0,
            0.0,
            template.omega_p,
        );
        match path {
            RatePath::Closed => Ok(transition_rates_closed(&p)?.rates),
            RatePath::Numeric => Ok(transition_rates_numeric(&p, &single_excitation_eigensystem(&p, 0.0)).rates),
        }
    };
    scan(rates_at, template.gamma0, lo, hi, samples)
}

/// As [`rate_crossing_scan`] for the cavity, varying every chain coupling `d`
/// at fixed `g`.
pub fn cavity_rate_crossing_scan(
    template: &CavityParams,
    path: RatePath,
    prefactor: f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<Crossing>> {
    let rates_at = |d: f64| -> Result<Vec<f64>> {
        let mut p = template.clone();
        p.chain.d0 = d;
        p.chain.d_tail.iter_mut().for_each(|x| *x = d);
        match path {
            RatePath::Closed => Ok(cavity_transition_rates_closed(&p, prefactor)?.rates),
            RatePath::Numeric => Ok(cavity_transition_rates(&p, prefactor).rates),
        }
    };
    scan(rates_at, prefactor, lo, hi, samples)
}

fn scan(
    rates_at: impl Fn(f64) -> Result<Vec<f64>>,
    scale: f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<Crossing>> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi || samples < 2 {
        return Err(Error::EmptyRange);
    }
    let ds: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let table = ds.iter().map(|&d| rates_at(d)).collect::<Result<Vec<_>>>()?;
    let m = table[0].len();
    let same = 1e-9 * scale;

    let mut found: Vec<(f64, (usize, usize))> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let diff: Vec<f64> = table.iter().map(|r| r[i] - r[j]).collect();
            if diff.iter().all(|f| f.abs() < same) {
                // degenerate by symmetry, never crosses
                continue;
            }
            for k in 0..samples - 1 {
                let (fa, fb) = (diff[k], diff[k + 1]);
                if fa == 0.0 {
                    found.push((ds[k], (i, j)));
                } else if fa * fb < 0.0 {
                    let root = bisect(|d| rates_at(d).map(|r| r[i] - r[j]), ds[k], ds[k + 1], fa)?;
                    found.push((root, (i, j)));
                }
            }
            if diff[samples - 1] == 0.0 {
                found.push((ds[samples - 1], (i, j)));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut crossings: Vec<Crossing> = Vec::new();
    for (d, pair) in found {
        match crossings.last_mut() {
            Some(last) if (d - last.d).abs() <= 1e-7 * d.abs().max(1e-300) => last.pairs.push(pair),
            _ => crossings.push(Crossing { d, pairs: vec![pair], full: false }),
        }
    }
    for c in &mut crossings {
        let r = rates_at(c.d)?;
        let spread = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - r.iter().cloned().fold(f64::INFINITY, f64::min);
        c.full = spread <= 1e-7 * scale;
    }
    Ok(crossings)
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a) <= 1e-14 * mid.abs() {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Qualitative regime of the absorption lineshape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every level spacing lies inside the main linewidth: pathways interfere.
    EitLike,
    /// Some spacings inside, some outside: asymmetric, Fano-type lines.
    Fano,
    /// Every spacing exceeds the linewidth: separated peaks.
    AutlerTownes,
}

/// Heuristic regime from the spacings of adjacent one-excitation levels
/// compared to `γ0`.
pub fn classify_regime(eig: &EigenSystem, gamma0: f64) -> Regime {
    let gaps: Vec<f64> = eig.energies.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.is_empty() || gaps.iter().all(|&g| g < gamma0) {
        Regime::EitLike
    } else if gaps.iter().all(|&g| g > gamma0) {
        Regime::AutlerTownes
    } else {
        Regime::Fano
    }
}
