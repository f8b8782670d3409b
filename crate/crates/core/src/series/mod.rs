//! Truncated formal power series over a few coefficient rings.

mod cyclotomic;

pub use cyclotomic::Cyclotomic;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
}

/// Commutative ring operations needed by [`TruncatedSeries`].
pub trait Coefficient: Clone + fmt::Debug + Send + Sync {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_ring_zero(&self) -> bool;
    fn try_inv(&self) -> Option<Self>;
    /// Size used for discrepancy reports.
    fn magnitude(&self) -> f64;
}

impl Coefficient for f64 {
    fn ring_zero() -> Self {
        0.0
    }
    fn ring_one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        *self == 0.0
    }
    fn try_inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for Complex64 {
    fn ring_zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn ring_one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn try_inv(&self) -> Option<Self> {
        (!self.is_ring_zero()).then(|| 1.0 / self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for BigRational {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Name of the series variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Variable {
    /// Formal `X`.
    X,
    /// `p^{-s}`, for local Dirichlet series.
    PMinusS,
}

/// `c_0 + c_1 t + ... + c_T t^T + O(t^{T+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    pub variable: Variable,
    coeffs: Vec<C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    /// Pads with zeros or truncates to order `order`.
    pub fn new(variable: Variable, mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::ring_zero());
        TruncatedSeries { variable, coeffs }
    }

    pub fn constant(variable: Variable, c: C, order: usize) -> Self {
        Self::new(variable, vec![c], order)
    }

    pub fn one(variable: Variable, order: usize) -> Self {
        Self::constant(variable, C::ring_one(), order)
    }

    /// `1 - a t^k`.
    pub fn binomial(variable: Variable, a: &C, k: usize, order: usize) -> Self {
        let mut s = Self::one(variable, order);
        if k <= order {
            s.coeffs[k] = s.coeffs[k].sub(a);
        }
        s
    }

    /// `1 / (1 - a t^k)` expanded as a geometric series.
    pub fn geometric(variable: Variable, a: &C, k: usize, order: usize) -> Self {
        assert!(k >= 1);
        let mut s = Self::new(variable, Vec::new(), order);
        let mut pw = C::ring_one();
        let mut i = 0;
        while i <= order {
            s.coeffs[i] = pw.clone();
            pw = pw.mul(a);
            i += k;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    fn check(&self, o: &Self) -> Result<(), SeriesError> {
        if self.order() != o.order() {
            return Err(SeriesError::OrderMismatch(self.order(), o.order()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        Ok(TruncatedSeries {
            variable: self.variable,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        Ok(TruncatedSeries {
            variable: self.variable,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        let t = self.order();
        let mut out = vec![C::ring_zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_ring_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=t - i].iter().enumerate() {
                if !b.is_ring_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(TruncatedSeries {
            variable: self.variable,
            coeffs: out,
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries {
            variable: self.variable,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// `f(t) -> f(c t)`.
    pub fn rescale_variable(&self, c: &C) -> Self {
        let mut pw = C::ring_one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.mul(&pw));
            pw = pw.mul(c);
        }
        TruncatedSeries {
            variable: self.variable,
            coeffs,
        }
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let inv0 = self.coeffs[0].try_inv().ok_or(SeriesError::NotInvertible)?;
        let t = self.order();
        let mut out: Vec<C> = Vec::with_capacity(t + 1);
        out.push(inv0.clone());
        for k in 1..=t {
            let mut s = C::ring_zero();
            for j in 1..=k {
                if !self.coeffs[j].is_ring_zero() {
                    s = s.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out.push(s.neg().mul(&inv0));
        }
        Ok(TruncatedSeries {
            variable: self.variable,
            coeffs: out,
        })
    }

    /// Formal derivative; the result has order one less (at least zero).
    pub fn derivative(&self) -> Self {
        let t = self.order();
        if t == 0 {
            return Self::new(self.variable, Vec::new(), 0);
        }
        let coeffs = (1..=t).map(|k| self.coeffs[k].mul(&C::from_i64(k as i64))).collect();
        TruncatedSeries {
            variable: self.variable,
            coeffs,
        }
    }

    /// `t f'(t)`, same order.
    pub fn euler_derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.mul(&C::from_i64(k as i64)))
            .collect();
        TruncatedSeries {
            variable: self.variable,
            coeffs,
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(C::magnitude).fold(0.0, f64::max)
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries {
            variable: self.variable,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn with_variable(mut self, v: Variable) -> Self {
        self.variable = v;
        self
    }
}

/// Product of several series of equal order.
pub fn product<C: Coefficient>(
    variable: Variable,
    order: usize,
    factors: impl IntoIterator<Item = TruncatedSeries<C>>,
) -> Result<TruncatedSeries<C>, SeriesError> {
    factors
        .into_iter()
        .try_fold(TruncatedSeries::one(variable, order), |acc, f| acc.mul(&f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn geometric_inverse() {
        let g = TruncatedSeries::geometric(Variable::X, &q(3, 1), 1, 5);
        let b = TruncatedSeries::binomial(Variable::X, &q(3, 1), 1, 5);
        assert_eq!(g.inverse().unwrap(), b);
        assert_eq!(g.mul(&b).unwrap(), TruncatedSeries::one(Variable::X, 5));
        let g2 = TruncatedSeries::geometric(Variable::X, &q(1, 2), 2, 5);
        assert_eq!(g2.coeffs()[4], q(1, 4));
        assert_eq!(g2.coeffs()[3], q(0, 1));
    }

    #[test]
    fn derivative_and_rescale() {
        let s = TruncatedSeries::new(Variable::X, vec![1.0, 2.0, 3.0], 2);
        assert_eq!(s.derivative().coeffs(), &[2.0, 6.0]);
        assert_eq!(s.euler_derivative().coeffs(), &[0.0, 2.0, 6.0]);
        assert_eq!(s.rescale_variable(&2.0).coeffs(), &[1.0, 4.0, 12.0]);
    }

    #[test]
    fn non_invertible() {
        let s = TruncatedSeries::new(Variable::X, vec![0.0, 1.0], 3);
        assert_eq!(s.inverse(), Err(SeriesError::NotInvertible));
        let t = TruncatedSeries::<f64>::one(Variable::X, 2);
        assert!(matches!(s.mul(&t), Err(SeriesError::OrderMismatch(3, 2))));
    }
}
