//! Satake parameters and the local standard L-factor.
//!
//! With `X = p^{-s}` the inverse local factor is
//! `(1 - X) Π (1 - α_i X)(1 - α_i^{-1} X)` and the Hecke-eigenvalue series is
//! `(1 - X)/(1 - p^n X) Π (1 - p^{2i} X^2)/((1 - α_i p^n X)(1 - α_i^{-1} p^n X))`.
//! Every routine is written once over [`Coefficient`] and runs either in
//! floating point or exactly in a cyclotomic field.

mod conductor;
mod gamma;
mod satake;

pub use conductor::{analytic_conductor, conductor_bounds, ConductorBounds, WeightTuple};
pub use gamma::{archimedean_factor, complex_gamma, gamma_c, gamma_r};
pub use satake::{RootOfUnityPoint, SatakePoint};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::series::{product, Coefficient, Cyclotomic, TruncatedSeries, Variable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LfunctionError {
    #[error("angle {0} is outside [0, pi]")]
    InvalidAngle(f64),
    #[error("angle fraction {0}/{1} is outside [0, 1]")]
    InvalidFraction(i64, i64),
    #[error("genus must be at least 1")]
    EmptyPoint,
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("Gamma pole at {0}")]
    PoleHit(Complex64),
    #[error("order must be at least {0}")]
    InvalidOrder(usize),
    #[error("level must be positive")]
    InvalidLevel,
}

fn p_power<C: Coefficient>(p: u64, k: u32) -> C {
    C::from_bigint(&num_traits::pow(BigInt::from(p), k as usize))
}

/// `(1 - X) Π (1 - a X)(1 - a^{-1} X)` over the pairs `(a, a^{-1})`.
fn inverse_factor_series<C: Coefficient>(pairs: &[(C, C)], order: usize) -> TruncatedSeries<C> {
    let v = Variable::PMinusS;
    let mut fs = vec![TruncatedSeries::binomial(v, &C::ring_one(), 1, order)];
    for (a, ai) in pairs {
        fs.push(TruncatedSeries::binomial(v, a, 1, order));
        fs.push(TruncatedSeries::binomial(v, ai, 1, order));
    }
    product(v, order, fs).expect("equal orders")
}

fn bo_series<C: Coefficient>(pairs: &[(C, C)], p: u64, order: usize) -> TruncatedSeries<C> {
    let n = pairs.len() as u32;
    let v = Variable::X;
    let pn: C = p_power(p, n);
    let mut fs = vec![
        TruncatedSeries::binomial(v, &C::ring_one(), 1, order),
        TruncatedSeries::geometric(v, &pn, 1, order),
    ];
    for i in 1..=n {
        fs.push(TruncatedSeries::binomial(v, &p_power(p, 2 * i), 2, order));
    }
    for (a, ai) in pairs {
        fs.push(TruncatedSeries::geometric(v, &a.mul(&pn), 1, order));
        fs.push(TruncatedSeries::geometric(v, &ai.mul(&pn), 1, order));
    }
    product(v, order, fs).expect("equal orders")
}

fn mu_series<C: Coefficient>(pairs: &[(C, C)], order: usize) -> TruncatedSeries<C> {
    inverse_factor_series(pairs, order)
        .inverse()
        .expect("constant term is one")
}

/// Local `ζ(s) Π ζ(2s - 2i) L(s, F)` minus `L(s - n, St)`, in `p^{-s}`.
fn identity_difference<C: Coefficient>(pairs: &[(C, C)], p: u64, order: usize) -> TruncatedSeries<C> {
    let n = pairs.len() as u32;
    let v = Variable::PMinusS;
    let mut fs = vec![TruncatedSeries::geometric(v, &C::ring_one(), 1, order)];
    for i in 1..=n {
        fs.push(TruncatedSeries::geometric(v, &p_power(p, 2 * i), 2, order));
    }
    fs.push(bo_series(pairs, p, order).with_variable(v));
    let lhs = product(v, order, fs).expect("equal orders");
    let rhs = mu_series(pairs, order).rescale_variable(&p_power(p, n));
    lhs.sub(&rhs).expect("equal orders")
}

fn float_pairs(s: &SatakePoint) -> Vec<(Complex64, Complex64)> {
    s.alphas().into_iter().map(|a| (a, a.conj())).collect()
}

fn exact_pairs(r: &RootOfUnityPoint) -> Vec<(Cyclotomic, Cyclotomic)> {
    r.alphas_exact()
}

fn real_part(s: &TruncatedSeries<Complex64>) -> Vec<f64> {
    s.coeffs().iter().map(|c| c.re).collect()
}

/// Coefficients `c_0..c_{2n+1}` of `L_p(s, St)^{-1}` as a polynomial in `p^{-s}`.
/// They do not depend on `p`.
pub fn std_local_factor_inverse(s: &SatakePoint) -> Vec<f64> {
    let d = 2 * s.genus() + 1;
    real_part(&inverse_factor_series(&float_pairs(s), d))
}

/// Exact coefficients, in the real subfield of a cyclotomic field.
pub fn std_local_factor_inverse_exact(r: &RootOfUnityPoint) -> Vec<Cyclotomic> {
    let d = 2 * r.genus() + 1;
    inverse_factor_series(&exact_pairs(r), d).into_coeffs()
}

/// Direct product of the `2n + 1` linear factors, used as an oracle.
pub fn std_local_factor_inverse_by_roots(s: &SatakePoint) -> Vec<f64> {
    let mut roots = vec![Complex64::new(1.0, 0.0)];
    for a in s.alphas() {
        roots.push(a);
        roots.push(a.conj());
    }
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        poly = next;
    }
    poly.iter().map(|c| c.re).collect()
}

/// `a_F(p^k)` for `k = 0..=order`.
pub fn hecke_series(s: &SatakePoint, p: u64, order: usize) -> Result<TruncatedSeries<f64>, LfunctionError> {
    if order < 1 {
        return Err(LfunctionError::InvalidOrder(1));
    }
    let c = bo_series(&float_pairs(s), p, order);
    Ok(TruncatedSeries::new(Variable::X, real_part(&c), order))
}

pub fn hecke_series_exact(
    r: &RootOfUnityPoint,
    p: u64,
    order: usize,
) -> Result<TruncatedSeries<Cyclotomic>, LfunctionError> {
    if order < 1 {
        return Err(LfunctionError::InvalidOrder(1));
    }
    Ok(bo_series(&exact_pairs(r), p, order))
}

/// `a_F(p) = p^n (1 + 2 Σ cos θ_i) - 1`.
pub fn hecke_eigenvalue_p(s: &SatakePoint, p: u64) -> f64 {
    let pn = (p as f64).powi(s.genus() as i32);
    pn * (1.0 + 2.0 * s.angles().iter().map(|t| t.cos()).sum::<f64>()) - 1.0
}

/// `μ_F(p^k)` for `k = 0..=order`: Dirichlet coefficients of `L_p(s, St)`.
pub fn mu_coefficients(s: &SatakePoint, order: usize) -> Vec<f64> {
    real_part(&mu_series(&float_pairs(s), order))
}

pub fn mu_coefficients_exact(r: &RootOfUnityPoint, order: usize) -> Vec<Cyclotomic> {
    mu_series(&exact_pairs(r), order).into_coeffs()
}

/// `b_F(p^m) = 1 + 2 Σ cos(m θ_i)`.
pub fn b_coefficients(s: &SatakePoint, m: u32) -> f64 {
    1.0 + 2.0 * s.angles().iter().map(|t| (m as f64 * t).cos()).sum::<f64>()
}

/// Oracle for [`b_coefficients`]: `-L'/L = log p Σ b_F(p^m) p^{-ms}`, so the
/// coefficients of `X F'(X) / F(X)` with `F = L_p` are `b_F(p^m)`.
/// Entry `m - 1` holds the coefficient of `X^m`.
pub fn b_coefficients_log_derivative(s: &SatakePoint, order: usize) -> Vec<f64> {
    let f = mu_series(&float_pairs(s), order);
    let inv = inverse_factor_series(&float_pairs(s), order);
    let ld = f.euler_derivative().mul(&inv).expect("equal orders");
    real_part(&ld)[1..].to_vec()
}

/// Largest coefficient of the local difference between the two sides of
/// `ζ(s) Π_{i=1}^n ζ(2s-2i) L(s,F) = L(s-n, St)` up to order `order`.
pub fn zeta_factor_identity_check(s: &SatakePoint, p: u64, order: usize) -> Result<f64, LfunctionError> {
    if order < 2 {
        return Err(LfunctionError::InvalidOrder(2));
    }
    let d = identity_difference(&float_pairs(s), p, order);
    // Relative to the size of the coefficients so large p is comparable.
    let lhs =
        mu_series(&float_pairs(s), order).rescale_variable(&Complex64::new((p as f64).powi(s.genus() as i32), 0.0));
    let scale = lhs.max_magnitude().max(1.0);
    Ok(d.max_magnitude() / scale)
}

/// Exact version; the result is zero exactly when the identity holds.
pub fn zeta_factor_identity_check_exact(
    r: &RootOfUnityPoint,
    p: u64,
    order: usize,
) -> Result<BigRational, LfunctionError> {
    if order < 2 {
        return Err(LfunctionError::InvalidOrder(2));
    }
    let d = identity_difference(&exact_pairs(r), p, order);
    Ok(d.coeffs()
        .iter()
        .map(Cyclotomic::max_abs_coefficient)
        .max()
        .unwrap_or_else(BigRational::zero))
}

/// Residuals of `μ(p) = (a(p) + 1) p^{-n}`,
/// `μ(p^2) = 1 + p^{-2} + ... + p^{-2n} + (a(p^2) + a(p)) p^{-2n}` and
/// `b(p^2) = 2 μ(p^2) - μ(p)^2`, exactly.
pub fn mu_relation_residuals_exact(r: &RootOfUnityPoint, p: u64) -> [Cyclotomic; 3] {
    let n = r.genus() as u32;
    let a = hecke_series_exact(r, p, 2).expect("order 2");
    let mu = mu_coefficients_exact(r, 2);
    let pn_inv = Cyclotomic::from_rational(&BigRational::new(
        1.into(),
        num_traits::pow(BigInt::from(p), n as usize),
    ));
    let one = Cyclotomic::ring_one();
    let r1 = mu[1].sub(&a.coeff(1).add(&one).mul(&pn_inv));
    let mut geo = BigRational::zero();
    for i in 0..=n {
        geo += BigRational::new(1.into(), num_traits::pow(BigInt::from(p), 2 * i as usize));
    }
    let rhs2 = Cyclotomic::from_rational(&geo).add(&a.coeff(2).add(a.coeff(1)).mul(&pn_inv).mul(&pn_inv));
    let r2 = mu[2].sub(&rhs2);
    let two = Cyclotomic::from_i64(2);
    let r3 = r.b_coefficient_exact(2).sub(&two.mul(&mu[2]).sub(&mu[1].mul(&mu[1])));
    [r1, r2, r3]
}

/// Floating version of [`mu_relation_residuals_exact`], relative to the
/// magnitude of the terms.
pub fn mu_relation_residuals(s: &SatakePoint, p: u64) -> [f64; 3] {
    let n = s.genus() as i32;
    let a = hecke_series(s, p, 2).expect("order 2");
    let mu = mu_coefficients(s, 2);
    let pf = p as f64;
    let pn = pf.powi(n);
    let r1 = mu[1] - (a.coeff(1) + 1.0) / pn;
    let geo: f64 = (0..=n).map(|i| pf.powi(-2 * i)).sum();
    let r2 = mu[2] - (geo + (a.coeff(2) + a.coeff(1)) / (pn * pn));
    let r3 = b_coefficients(s, 2) - (2.0 * mu[2] - mu[1] * mu[1]);
    let scale = 1.0 + mu[2].abs() + mu[1].abs().powi(2);
    [r1.abs() / scale, r2.abs() / scale, r3.abs() / scale]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn inverse_factor_examples() {
        let s = SatakePoint::new(vec![PI / 2.0]).unwrap();
        assert!(close(&std_local_factor_inverse(&s), &[1.0, -1.0, 1.0, -1.0], 1e-14));
        let z = SatakePoint::new(vec![0.0, 0.0]).unwrap();
        assert!(close(
            &std_local_factor_inverse(&z),
            &[1.0, -5.0, 10.0, -10.0, 5.0, -1.0],
            1e-12
        ));
        let t = SatakePoint::new(vec![PI / 3.0, 2.0 * PI / 3.0]).unwrap();
        assert!(close(
            &std_local_factor_inverse(&t),
            &std_local_factor_inverse_by_roots(&t),
            1e-12
        ));
    }

    #[test]
    fn inverse_factor_is_antipalindromic() {
        let s = SatakePoint::new(vec![0.3, 1.1, 2.9]).unwrap();
        let c = std_local_factor_inverse(&s);
        let d = c.len() - 1;
        for k in 0..=d {
            assert!((c[k] + c[d - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn hecke_series_examples() {
        for n in 1..=3 {
            let z = SatakePoint::new(vec![0.0; n]).unwrap();
            let h = hecke_series(&z, 5, 3).unwrap();
            assert_eq!(*h.coeff(0), 1.0);
            let expect = (2 * n as i64 + 1) * 5i64.pow(n as u32) - 1;
            assert!((h.coeff(1) - expect as f64).abs() < 1e-9);
        }
        let s = SatakePoint::new(vec![PI / 2.0]).unwrap();
        let h = hecke_series(&s, 3, 2).unwrap();
        assert!((h.coeff(1) - 2.0).abs() < 1e-12);
        assert!((h.coeff(1) - hecke_eigenvalue_p(&s, 3)).abs() < 1e-12);
    }

    #[test]
    fn mu_examples() {
        for n in 1..=3 {
            let z = SatakePoint::new(vec![0.0; n]).unwrap();
            let mu = mu_coefficients(&z, 2);
            assert_eq!(mu[0], 1.0);
            assert!((mu[1] - (2 * n + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn b_examples() {
        let z = SatakePoint::new(vec![0.0, 0.0]).unwrap();
        for m in 1..5 {
            assert_eq!(b_coefficients(&z, m), 5.0);
        }
        let s = SatakePoint::new(vec![PI / 2.0]).unwrap();
        assert!((b_coefficients(&s, 2) + 1.0).abs() < 1e-15);
        let t = SatakePoint::new(vec![0.4, 2.2]).unwrap();
        let ld = b_coefficients_log_derivative(&t, 6);
        for m in 1..=6 {
            assert!((ld[m - 1] - b_coefficients(&t, m as u32)).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_identity_small() {
        let r = RootOfUnityPoint::new(vec![(1, 2)]).unwrap();
        assert!(zeta_factor_identity_check_exact(&r, 3, 4).unwrap().is_zero());
        let r = RootOfUnityPoint::new(vec![(0, 1), (0, 1)]).unwrap();
        assert!(zeta_factor_identity_check_exact(&r, 5, 6).unwrap().is_zero());
        let r = RootOfUnityPoint::new(vec![(1, 3), (2, 5), (3, 4)]).unwrap();
        assert!(zeta_factor_identity_check_exact(&r, 7, 6).unwrap().is_zero());
        for res in mu_relation_residuals_exact(&r, 7) {
            assert!(res.is_ring_zero());
        }
    }

    #[test]
    fn exact_matches_float() {
        let r = RootOfUnityPoint::new(vec![(1, 3), (3, 4)]).unwrap();
        let s = r.to_satake();
        let e = hecke_series_exact(&r, 3, 4).unwrap();
        let f = hecke_series(&s, 3, 4).unwrap();
        for k in 0..=4 {
            let ek = e.coeff(k).to_complex().re;
            assert!(e.coeff(k).to_complex().im.abs() < 1e-9 * ek.abs().max(1.0));
            assert!((ek - f.coeff(k)).abs() <= 1e-9 * ek.abs().max(1.0));
        }
        let ex = std_local_factor_inverse_exact(&r);
        let fl = std_local_factor_inverse(&s);
        for (a, b) in ex.iter().zip(&fl) {
            assert!((a.to_complex().re - b).abs() < 1e-12);
        }
    }

    #[test]
    fn order_errors() {
        let s = SatakePoint::new(vec![0.5]).unwrap();
        assert!(hecke_series(&s, 3, 0).is_err());
        assert!(zeta_factor_identity_check(&s, 3, 1).is_err());
    }
}
