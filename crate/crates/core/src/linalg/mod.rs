//! Exact linear algebra over `Z[1/p]`.
//!
//! Every entry is a rational number whose denominator is a power of a fixed
//! odd prime `p`. That is all the coset arithmetic of `GSp(2n, Q_p)` ever
//! needs: representatives are integral, and inverses of similitudes only
//! introduce powers of `p` in the denominator.

mod gsp;
pub(crate) mod smith;

pub use gsp::{standard_form, symplectic_similitude, GSpElement};
pub use smith::{mod_p_rank, smith_valuations};

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("g J g^T is not a power of p times J")]
    NotSimilitude,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has an entry with a p in the denominator")]
    NotIntegral,
}

/// Trial division; the primes used here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_odd_prime(p: u64) -> Result<(), LinalgError> {
    if p != 2 && is_prime(p) {
        Ok(())
    } else {
        Err(LinalgError::NotOddPrime(p))
    }
}

/// `num / p^exp`.
///
/// Canonical form: `exp == 0` or `p` does not divide `num`; zero is `0 / p^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PFrac {
    pub num: BigInt,
    pub exp: u32,
}

impl PFrac {
    pub fn integer(v: impl Into<BigInt>) -> Self {
        PFrac { num: v.into(), exp: 0 }
    }

    pub fn zero() -> Self {
        PFrac::integer(0)
    }

    pub fn raw(num: impl Into<BigInt>, exp: u32) -> Self {
        PFrac { num: num.into(), exp }
    }

    pub fn canonicalize(mut self, p: u64) -> Self {
        if self.num.is_zero() {
            self.exp = 0;
            return self;
        }
        let pb = BigInt::from(p);
        while self.exp > 0 {
            let (q, r) = self.num.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            self.num = q;
            self.exp -= 1;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.exp == 0
    }

    /// p-adic valuation; `None` for zero. Assumes canonical form.
    pub fn valuation(&self, p: u64) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        Some(valuation_of(&self.num, p) as i64 - self.exp as i64)
    }

    /// Rendered as `"num/p^e"`.
    pub fn render(&self) -> String {
        format!("{}/p^{}", self.num, self.exp)
    }
}

pub(crate) fn valuation_of(x: &BigInt, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

pub(crate) fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Square matrix over `Z[1/p]`, row-major, entries in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLocalMatrix {
    prime: u64,
    size: usize,
    entries: Vec<PFrac>,
}

impl PLocalMatrix {
    pub fn new(prime: u64, size: usize, entries: Vec<PFrac>) -> Result<Self, LinalgError> {
        check_odd_prime(prime)?;
        if size == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if entries.len() != size * size {
            return Err(LinalgError::EntryCount {
                expected: size * size,
                got: entries.len(),
            });
        }
        let entries = entries.into_iter().map(|e| e.canonicalize(prime)).collect();
        Ok(PLocalMatrix { prime, size, entries })
    }

    pub fn from_integers(prime: u64, size: usize, values: &[i64]) -> Result<Self, LinalgError> {
        Self::new(prime, size, values.iter().map(|&v| PFrac::integer(v)).collect())
    }

    pub fn from_bigints(prime: u64, size: usize, values: Vec<BigInt>) -> Result<Self, LinalgError> {
        Self::new(prime, size, values.into_iter().map(PFrac::integer).collect())
    }

    pub fn identity(prime: u64, size: usize) -> Result<Self, LinalgError> {
        Self::diagonal_powers(prime, &vec![0; size])
    }

    /// `diag(p^{e_1}, ..., p^{e_d})`; exponents may be negative.
    pub fn diagonal_powers(prime: u64, exponents: &[i64]) -> Result<Self, LinalgError> {
        let d = exponents.len();
        let mut entries = vec![PFrac::zero(); d * d];
        for (i, &e) in exponents.iter().enumerate() {
            entries[i * d + i] = if e >= 0 {
                PFrac::integer(pow_big(prime, e as u32))
            } else {
                PFrac::raw(1, (-e) as u32)
            };
        }
        Self::new(prime, d, entries)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &PFrac {
        &self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[PFrac] {
        &self.entries
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(PFrac::is_integral)
    }

    /// Largest denominator exponent.
    pub fn max_exp(&self) -> u32 {
        self.entries.iter().map(|e| e.exp).max().unwrap_or(0)
    }

    /// `p^{max_exp} * self` as an integer matrix (row-major) together with
    /// the exponent that was cleared.
    pub fn cleared(&self) -> (Vec<BigInt>, u32) {
        let e = self.max_exp();
        let nums = self
            .entries
            .iter()
            .map(|x| &x.num * pow_big(self.prime, e - x.exp))
            .collect();
        (nums, e)
    }

    /// Integer entries; fails if some denominator is nontrivial.
    pub fn integer_entries(&self) -> Result<Vec<BigInt>, LinalgError> {
        if !self.is_integral() {
            return Err(LinalgError::NotIntegral);
        }
        Ok(self.entries.iter().map(|x| x.num.clone()).collect())
    }

    pub fn transpose(&self) -> Self {
        let d = self.size;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(self.get(j, i).clone());
            }
        }
        PLocalMatrix {
            prime: self.prime,
            size: d,
            entries,
        }
    }

    /// `p^k * self`.
    pub fn scale_pow(&self, k: i64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|x| {
                if x.is_zero() {
                    PFrac::zero()
                } else if k >= 0 {
                    let shift = (k as u32).min(x.exp);
                    let up = k as u32 - shift;
                    PFrac::raw(&x.num * pow_big(self.prime, up), x.exp - shift)
                } else {
                    PFrac::raw(x.num.clone(), x.exp + (-k) as u32).canonicalize(self.prime)
                }
            })
            .collect();
        PLocalMatrix {
            prime: self.prime,
            size: self.size,
            entries,
        }
    }

    pub fn neg(&self) -> Self {
        PLocalMatrix {
            prime: self.prime,
            size: self.size,
            entries: self.entries.iter().map(|x| PFrac::raw(-&x.num, x.exp)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.prime != other.prime {
            return Err(LinalgError::PrimeMismatch(self.prime, other.prime));
        }
        if self.size != other.size {
            return Err(LinalgError::DimensionMismatch(self.size, other.size));
        }
        let d = self.size;
        let p = self.prime;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut top = 0u32;
                for k in 0..d {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        top = top.max(a.exp + b.exp);
                    }
                }
                let mut acc = BigInt::zero();
                for k in 0..d {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let term = &a.num * &b.num;
                    let shift = top - a.exp - b.exp;
                    if shift == 0 {
                        acc += term;
                    } else {
                        acc += term * pow_big(p, shift);
                    }
                }
                entries.push(PFrac::raw(acc, top).canonicalize(p));
            }
        }
        Ok(PLocalMatrix {
            prime: p,
            size: d,
            entries,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.prime != other.prime {
            return Err(LinalgError::PrimeMismatch(self.prime, other.prime));
        }
        if self.size != other.size {
            return Err(LinalgError::DimensionMismatch(self.size, other.size));
        }
        let p = self.prime;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                let top = a.exp.max(b.exp);
                let num = &a.num * pow_big(p, top - a.exp) + &b.num * pow_big(p, top - b.exp);
                PFrac::raw(num, top).canonicalize(p)
            })
            .collect();
        Ok(PLocalMatrix {
            prime: p,
            size: self.size,
            entries,
        })
    }

    /// Reduction mod `p` of an integral matrix, entries in `0..p`.
    pub fn reduce_mod_p(&self) -> Result<Vec<u64>, LinalgError> {
        if !self.is_integral() {
            return Err(LinalgError::NotIntegral);
        }
        let pb = BigInt::from(self.prime);
        Ok(self
            .entries
            .iter()
            .map(|x| x.num.mod_floor(&pb).to_u64().unwrap_or(0))
            .collect())
    }

    pub fn is_identity(&self) -> bool {
        let d = self.size;
        (0..d).all(|i| {
            (0..d).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.exp == 0 && e.num.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Each entry as `"num/p^e"`.
    pub fn render_rows(&self) -> Vec<Vec<String>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j).render()).collect())
            .collect()
    }

    /// Largest absolute numerator; handy for sanity output.
    pub fn max_abs_numerator(&self) -> BigInt {
        self.entries
            .iter()
            .map(|x| x.num.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl Mul for &PLocalMatrix {
    type Output = PLocalMatrix;

    fn mul(self, rhs: &PLocalMatrix) -> PLocalMatrix {
        self.checked_mul(rhs)
            .expect("PLocalMatrix product of incompatible matrices")
    }
}

impl fmt::Display for PLocalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size)
                .map(|j| {
                    let e = self.get(i, j);
                    if e.exp == 0 {
                        e.num.to_string()
                    } else {
                        format!("{}/{}^{}", e.num, self.prime, e.exp)
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Canonical copy of a matrix. Matrices built through the public
/// constructors are already canonical, so this is idempotent.
pub fn canonicalize(m: &PLocalMatrix) -> PLocalMatrix {
    PLocalMatrix {
        prime: m.prime,
        size: m.size,
        entries: m.entries.iter().cloned().map(|e| e.canonicalize(m.prime)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_entries() {
        assert_eq!(PFrac::raw(6, 1).canonicalize(3), PFrac::raw(2, 0));
        assert_eq!(PFrac::raw(0, 2).canonicalize(3), PFrac::raw(0, 0));
        assert_eq!(PFrac::raw(5, 2).canonicalize(3), PFrac::raw(5, 2));
        assert_eq!(PFrac::raw(-18, 3).canonicalize(3), PFrac::raw(-2, 1));
    }

    #[test]
    fn constructor_canonicalizes() {
        let m = PLocalMatrix::new(
            3,
            2,
            vec![PFrac::raw(6, 1), PFrac::raw(0, 2), PFrac::raw(5, 2), PFrac::raw(1, 0)],
        )
        .unwrap();
        assert_eq!(m.get(0, 0), &PFrac::raw(2, 0));
        assert_eq!(m.get(0, 1), &PFrac::raw(0, 0));
        assert_eq!(m.get(1, 0), &PFrac::raw(5, 2));
        assert_eq!(canonicalize(&m), m);
    }

    #[test]
    fn rejects_even_and_composite() {
        assert_eq!(PLocalMatrix::identity(2, 2), Err(LinalgError::NotOddPrime(2)));
        assert_eq!(PLocalMatrix::identity(9, 2), Err(LinalgError::NotOddPrime(9)));
        assert_eq!(PLocalMatrix::identity(3, 0), Err(LinalgError::EmptyMatrix));
    }

    #[test]
    fn product_with_inverse_powers() {
        let a = PLocalMatrix::diagonal_powers(5, &[1, -2]).unwrap();
        let b = PLocalMatrix::diagonal_powers(5, &[-1, 2]).unwrap();
        assert!((&a * &b).is_identity());
        assert_eq!(a.scale_pow(2), PLocalMatrix::diagonal_powers(5, &[3, 0]).unwrap());
        assert_eq!(a.scale_pow(-1), PLocalMatrix::diagonal_powers(5, &[0, -3]).unwrap());
    }

    #[test]
    fn render_format() {
        let m = PLocalMatrix::new(3, 1, vec![PFrac::raw(5, 2)]).unwrap();
        assert_eq!(m.render_rows(), vec![vec!["5/p^2".to_string()]]);
    }
}
