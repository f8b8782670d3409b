use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::LfunctionError;
use crate::arith::prime_divisors;

/// Weight `(k_1, ..., k_n)`, nonincreasing and positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightTuple {
    k: Vec<i64>,
}

impl WeightTuple {
    pub fn new(k: Vec<i64>) -> Result<Self, LfunctionError> {
        if k.is_empty() {
            return Err(LfunctionError::InvalidWeight("empty weight".into()));
        }
        if k.iter().any(|&x| x < 1) {
            return Err(LfunctionError::InvalidWeight(format!("{k:?} has a nonpositive entry")));
        }
        if k.windows(2).any(|w| w[0] < w[1]) {
            return Err(LfunctionError::InvalidWeight(format!("{k:?} is not nonincreasing")));
        }
        Ok(WeightTuple { k })
    }

    /// Requires `k_n > n + 1`.
    pub fn new_standard(k: Vec<i64>) -> Result<Self, LfunctionError> {
        let w = Self::new(k)?;
        if !w.standing_hypothesis() {
            return Err(LfunctionError::InvalidWeight(format!("{:?} violates k_n > n + 1", w.k)));
        }
        Ok(w)
    }

    pub fn genus(&self) -> usize {
        self.k.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.k
    }

    /// `k_n > n + 1`.
    pub fn standing_hypothesis(&self) -> bool {
        *self.k.last().expect("nonempty") > self.k.len() as i64 + 1
    }

    /// `k_1 > ... > k_n > n + 1`.
    pub fn is_strictly_regular(&self) -> bool {
        self.standing_hypothesis() && self.k.windows(2).all(|w| w[0] > w[1])
    }

    /// `(k_1 - 1, ..., k_n - n)`.
    pub fn harish_chandra(&self) -> Vec<i64> {
        self.k.iter().enumerate().map(|(i, &x)| x - i as i64 - 1).collect()
    }

    pub fn product(&self) -> f64 {
        self.k.iter().map(|&x| x as f64).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConductorBounds {
    /// `N^{2n+1}`.
    pub upper: BigInt,
    /// `max(N Π_{p|N} p^{-(2n+1)}, Π_{p|N} p)`.
    pub lower_new: BigRational,
    /// `N^{1/(2n+2)}`.
    pub lower_new_uniform: f64,
}

pub fn conductor_bounds(level: u64, n: usize) -> Result<ConductorBounds, LfunctionError> {
    if level == 0 {
        return Err(LfunctionError::InvalidLevel);
    }
    let d = 2 * n + 1;
    let nb = BigInt::from(level);
    let upper = num_traits::pow(nb.clone(), d);
    let rad: BigInt = prime_divisors(level).into_iter().map(BigInt::from).product();
    let a = BigRational::new(nb, num_traits::pow(rad.clone(), d));
    let b = BigRational::from_integer(rad);
    Ok(ConductorBounds {
        upper,
        lower_new: a.max(b),
        lower_new_uniform: (level as f64).powf(1.0 / (d as f64 + 1.0)),
    })
}

/// `c(F) = q (k_1 ⋯ k_n)^2`.
pub fn analytic_conductor(q: f64, k: &WeightTuple) -> Result<f64, LfunctionError> {
    if q.is_nan() || q < 1.0 {
        return Err(LfunctionError::InvalidLevel);
    }
    Ok(q * k.product().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        let w = WeightTuple::new(vec![5, 4, 3]).unwrap();
        assert!(!w.standing_hypothesis());
        assert_eq!(w.harish_chandra(), vec![4, 2, 0]);
        assert!(WeightTuple::new(vec![3, 4]).is_err());
        assert!(WeightTuple::new_standard(vec![4, 3]).is_err());
        let s = WeightTuple::new_standard(vec![7, 6, 5]).unwrap();
        assert!(s.is_strictly_regular());
        assert!(!WeightTuple::new(vec![6, 6, 5]).unwrap().is_strictly_regular());
    }

    #[test]
    fn bounds() {
        let b = conductor_bounds(8, 2).unwrap();
        assert_eq!(b.upper, BigInt::from(32768));
        let b = conductor_bounds(7, 2).unwrap();
        assert_eq!(b.lower_new, BigRational::from_integer(7.into()));
        let b = conductor_bounds(15, 1).unwrap();
        assert!((b.lower_new_uniform - 15f64.powf(0.25)).abs() < 1e-15);
        assert!((b.lower_new_uniform - 1.968).abs() < 1e-3);
        // 3^10: N / 3^5 = 3^5 beats rad = 3.
        let b = conductor_bounds(59049, 2).unwrap();
        assert_eq!(b.lower_new, BigRational::from_integer(243.into()));
        assert!(conductor_bounds(0, 1).is_err());
    }

    #[test]
    fn analytic() {
        let k = WeightTuple::new(vec![4, 3]).unwrap();
        assert_eq!(analytic_conductor(1.0, &k).unwrap(), 144.0);
        let k = WeightTuple::new(vec![5, 4, 3]).unwrap();
        assert_eq!(analytic_conductor(243.0, &k).unwrap(), 874800.0);
        assert!(analytic_conductor(0.5, &k).is_err());
    }
}
