//! Explicit steady-state expressions for chains of up to five systems.
//!
//! Each function evaluates one printed expression as written, term by term,
//! so that it stays an independent check on the tridiagonal solver. The tail
//! coupling must be uniform (`d_1 = … = d_(N−1) = d`); in the cavity every
//! coupling, `d0` included, is the same `d`.
//!
//! Free-space factors are `q_j = Δp + iγ_j`; cavity factors are
//! `u_j = Δp − iγ_j` and `u_κ = Δp − iκ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CavityParams, ChainParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn tail_coupling(p: &ChainParams) -> Result<f64> {
    match p.n_extra {
        0 | 1 => Ok(0.0),
        _ => p.uniform_tail_coupling().ok_or(Error::NonUniformTail),
    }
}

/// `⟨σ_+^0⟩` for N ∈ {1, 2, 3, 4}.
pub fn closed_form_free_space(params: &ChainParams, delta_p: f64) -> Result<Complex64> {
    let n = params.n_extra;
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedOrder { n, supported: "N in 1..=4" });
    }
    let d = tail_coupling(params)?;
    let dd = d * d;
    let d0d0 = params.d0 * params.d0;
    let omega = params.omega_p;
    let delta = delta_p;
    let q = |j: usize| Complex64::new(delta, params.decay(j));
    let g = |j: usize| params.decay(j);

    let value = match n {
        1 => omega * q(1) / (d0d0 - q(0) * q(1)),
        2 => {
            let inner = dd - q(1) * q(2);
            -omega * inner / (q(0) * inner + d0d0 * q(2))
        }
        3 => {
            let x = -dd + q(2) * q(3);
            let num = I * omega * (I * dd * q(3) + (g(1) - I * delta) * x);
            let den = d0d0 * x + q(0) * (dd * q(3) - q(1) * x);
            num / den
        }
        4 => {
            let x = -dd + q(3) * q(4);
            let num = I * omega * (dd * x + q(1) * (dd * q(4) + (-q(2)) * x));
            let upsilon = q(0)
                * (dd * ((g(3) - I * delta) * q(4) + I * dd)
                    + q(1) * (dd * (g(4) - I * delta) + I * q(2) * x));
            let den = d0d0 * (I * dd * q(4) + (g(2) - I * delta) * x) + upsilon;
            num / den
        }
        _ => unreachable!(),
    };
    Ok(value)
}

/// `⟨a⟩` for N ∈ {1, 2, 3, 4}.
///
/// The N ≥ 2 expressions are evaluated with the overall sign that makes them
/// agree with the N = 1 expression and with the `g → 0` limit
/// `⟨a⟩ = −ε/(Δp − iκ)`. The N = 4 denominator uses `u_3` in its inner
/// bracket; the second `u_4` factor there cannot be right because it breaks
/// the cofactor expansion of the 6×6 system.
pub fn closed_form_cavity(params: &CavityParams, delta_p: f64) -> Result<Complex64> {
    let chain = &params.chain;
    let n = chain.n_extra;
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedOrder { n, supported: "N in 1..=4" });
    }
    let d = chain.d0;
    if n >= 2 && chain.d_tail.iter().any(|&x| x != d) {
        return Err(Error::NonUniformTail);
    }
    if n == 4 && d == 0.0 {
        return Err(Error::invalid("d", "must be non-zero for the N = 4 cavity expression"));
    }
    let dd = d * d;
    let gg = params.g * params.g;
    let eps = params.epsilon;
    let u = |j: usize| Complex64::new(delta_p, -chain.decay(j));
    let uk = Complex64::new(delta_p, -params.kappa);

    let value = match n {
        1 => {
            let psi = u(0) * u(1) * uk;
            (eps * dd - eps * u(0) * u(1)) / (-gg * u(1) - dd * uk + psi)
        }
        2 => {
            let inner = dd - u(1) * u(2);
            let q = dd * u(2) + u(0) * inner;
            -(eps * q) / (-gg * inner + q * uk)
        }
        3 => {
            let inner = dd - u(2) * u(3);
            let s = dd * u(3) + u(1) * inner;
            let r = -dd * inner + u(0) * s;
            let psi_a = r * uk;
            -(eps * r) / (-gg * s + psi_a)
        }
        4 => {
            let w = u(0) + (dd - u(0) * u(1)) * u(2) / dd;
            let xi = dd * w / u(4);
            let a = dd * eps * u(4) * (-dd + u(0) * u(1) + w * u(3) - xi);
            let h = gg - u(0) * uk;
            let t = -dd * h + u(2) * (dd * uk + u(1) * h);
            let b = dd * t - u(4) * (-dd * (dd * uk + u(1) * h) + u(3) * t);
            a / b
        }
        _ => unreachable!(),
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiclassical::{solve_cavity, solve_free_space};
    use proptest::prelude::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn rejects_out_of_range_orders() {
        let p = ChainParams::uniform(5, 0.5, 0.3, 1.0, 1e-3, 0.03);
        assert!(matches!(closed_form_free_space(&p, 0.0), Err(Error::UnsupportedOrder { n: 5, .. })));
        let p = ChainParams::uniform(0, 0.5, 0.3, 1.0, 1e-3, 0.03);
        assert!(closed_form_free_space(&p, 0.0).is_err());
    }

    #[test]
    fn rejects_non_uniform_tail() {
        let mut p = ChainParams::uniform(3, 0.5, 0.3, 1.0, 1e-3, 0.03);
        p.d_tail[1] = 0.2;
        assert_eq!(closed_form_free_space(&p, 0.0), Err(Error::NonUniformTail));
    }

    #[test]
    fn decoupled_tail_reduces_to_two_sites() {
        let two = ChainParams::uniform(1, 0.5, 0.0, 1.0, 1e-3, 0.03);
        let three = ChainParams::uniform(2, 0.5, 0.0, 1.0, 1e-3, 0.03);
        for k in 0..61 {
            let delta = -3.0 + 0.1 * k as f64;
            let a = closed_form_free_space(&three, delta).unwrap();
            let b = closed_form_free_space(&two, delta).unwrap();
            assert!(rel(a, b) <= 1e-14, "{delta}: {a} vs {b}");
        }
    }

    #[test]
    fn three_site_zeros_at_tail_modes() {
        let p = ChainParams::uniform(2, 0.5, 0.3, 1.0, 0.0, 0.03);
        for &delta in &[-0.3, 0.3] {
            assert_eq!(closed_form_free_space(&p, delta).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn empty_cavity_every_order() {
        for n in 1..=4 {
            let p = CavityParams {
                chain: ChainParams::uniform(n, 0.7, 0.7, 0.3, 1e-3, 0.03),
                g: 0.0,
                kappa: 1.0,
                epsilon: 0.03,
                n_max: 2,
            };
            for &delta in &[-2.0, 0.0, 0.45] {
                let want = -0.03 / Complex64::new(delta, -1.0);
                let got = closed_form_cavity(&p, delta).unwrap();
                assert!(rel(got, want) <= 1e-12, "N={n} Δ={delta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn cavity_without_tail_coupling_is_vacuum_rabi() {
        // d = 0 leaves the cavity and site 0: dip at resonance set by g
        let p = CavityParams {
            chain: ChainParams::uniform(1, 0.0, 0.0, 0.1, 1e-3, 0.03),
            g: 2.0,
            kappa: 1.0,
            epsilon: 0.03,
            n_max: 2,
        };
        let centre = closed_form_cavity(&p, 0.0).unwrap();
        let want = -0.03 / Complex64::new(0.0, -1.0 - 4.0 / 0.1);
        assert!(rel(centre, want) <= 1e-12);
        assert!(centre.im.abs() < 0.03 / 40.0);
    }

    fn chain_case() -> impl Strategy<Value = (ChainParams, f64)> {
        (1usize..=4, 0.05f64..3.0, 0.05f64..3.0, 0.2f64..2.0, proptest::collection::vec(0.0f64..0.2, 4), -4.0f64..4.0)
            .prop_map(|(n, d0, d, gamma0, gammas, delta)| {
                let mut p = ChainParams::uniform(n, d0, d, gamma0, 0.0, 0.03);
                p.gamma_tail = gammas[..n].to_vec();
                (p, delta)
            })
    }

    fn cavity_case() -> impl Strategy<Value = (CavityParams, f64)> {
        (1usize..=4, 0.05f64..3.0, 0.0f64..5.0, 0.001f64..2.0, proptest::collection::vec(0.0f64..0.2, 4), 0.2f64..2.0, -6.0f64..6.0)
            .prop_map(|(n, d, g, gamma0, gammas, kappa, delta)| {
                let mut chain = ChainParams::uniform(n, d, d, gamma0, 0.0, 0.03);
                chain.gamma_tail = gammas[..n].to_vec();
                (CavityParams { chain, g, kappa, epsilon: 0.03, n_max: 2 }, delta)
            })
    }

    proptest! {
        #[test]
        fn free_space_agrees_with_general_solver((p, delta) in chain_case()) {
            let a = closed_form_free_space(&p, delta).unwrap();
            let b = solve_free_space(&p, delta).unwrap();
            prop_assert!(rel(a, b) <= 1e-10, "{a} vs {b}");
        }

        #[test]
        fn cavity_agrees_with_general_solver((p, delta) in cavity_case()) {
            let a = closed_form_cavity(&p, delta).unwrap();
            let b = solve_cavity(&p, delta).unwrap();
            prop_assert!(rel(a, b) <= 1e-10, "{a} vs {b}");
        }
    }
}
