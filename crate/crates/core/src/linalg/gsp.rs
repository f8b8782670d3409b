use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{check_odd_prime, valuation_of, LinalgError, PFrac, PLocalMatrix};

/// `J = [[0, I_n], [-I_n, 0]]`.
pub fn standard_form(n: usize, p: u64) -> Result<PLocalMatrix, LinalgError> {
    check_odd_prime(p)?;
    let d = 2 * n;
    let mut v = vec![0i64; d * d];
    for i in 0..n {
        v[i * d + n + i] = 1;
        v[(n + i) * d + i] = -1;
    }
    PLocalMatrix::from_integers(p, d, &v)
}

/// A matrix `g` of size `2n` with `g J g^T = p^delta J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GSpElement {
    matrix: PLocalMatrix,
    similitude_exponent: i64,
    n: usize,
}

impl GSpElement {
    /// Caller guarantees the similitude.
    pub(crate) fn from_parts(matrix: PLocalMatrix, similitude_exponent: i64, n: usize) -> Self {
        debug_assert_eq!(matrix.size(), 2 * n);
        GSpElement {
            matrix,
            similitude_exponent,
            n,
        }
    }

    pub fn matrix(&self) -> &PLocalMatrix {
        &self.matrix
    }

    pub fn similitude_exponent(&self) -> i64 {
        self.similitude_exponent
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> u64 {
        self.matrix.prime()
    }

    pub fn into_matrix(self) -> PLocalMatrix {
        self.matrix
    }

    /// `g^{-1} = p^{-delta} J g^T J^{-1}`.
    pub fn inverse(&self) -> GSpElement {
        let j = standard_form(self.n, self.prime()).expect("prime already validated");
        let jinv = j.neg();
        let m = &(&j * &self.matrix.transpose()) * &jinv;
        GSpElement::from_parts(
            m.scale_pow(-self.similitude_exponent),
            -self.similitude_exponent,
            self.n,
        )
    }

    pub fn mul(&self, other: &GSpElement) -> Result<GSpElement, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch(2 * self.n, 2 * other.n));
        }
        let m = self.matrix.checked_mul(&other.matrix)?;
        Ok(GSpElement::from_parts(
            m,
            self.similitude_exponent + other.similitude_exponent,
            self.n,
        ))
    }
}

/// Certify `g J g^T = p^delta J` and return the wrapped element.
pub fn symplectic_similitude(g: &PLocalMatrix, n: usize) -> Result<GSpElement, LinalgError> {
    if n == 0 || g.size() != 2 * n {
        return Err(LinalgError::DimensionMismatch(g.size(), 2 * n));
    }
    let p = g.prime();
    let j = standard_form(n, p)?;
    let m = &(g * &j) * &g.transpose();
    let c = m.get(0, n).clone();
    if c.is_zero() {
        return Err(LinalgError::NotSimilitude);
    }
    let d = 2 * n;
    let neg_c = PFrac::raw(-&c.num, c.exp);
    for i in 0..d {
        for k in 0..d {
            let e = m.get(i, k);
            let ok = if i < n && k == i + n {
                *e == c
            } else if i >= n && k + n == i {
                *e == neg_c
            } else {
                e.is_zero()
            };
            if !ok {
                return Err(LinalgError::NotSimilitude);
            }
        }
    }
    let delta = power_of_p(&c, p).ok_or(LinalgError::NotSimilitude)?;
    Ok(GSpElement::from_parts(g.clone(), delta, n))
}

/// `Some(k)` when `x = p^k` exactly.
fn power_of_p(x: &PFrac, p: u64) -> Option<i64> {
    if x.num <= BigInt::zero() {
        return None;
    }
    if x.exp > 0 {
        return x.num.is_one().then_some(-(x.exp as i64));
    }
    let v = valuation_of(&x.num, p);
    (super::pow_big(p, v) == x.num).then_some(v as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(p: u64, e: &[i64]) -> PLocalMatrix {
        PLocalMatrix::diagonal_powers(p, e).unwrap()
    }

    #[test]
    fn identity_has_similitude_zero() {
        for n in 1..=3 {
            let g = PLocalMatrix::identity(5, 2 * n).unwrap();
            assert_eq!(symplectic_similitude(&g, n).unwrap().similitude_exponent(), 0);
        }
    }

    #[test]
    fn hecke_generator_has_similitude_two() {
        for n in 1..=4 {
            let mut e = vec![1i64; 2 * n];
            e[0] = 0;
            e[n] = 2;
            let g = symplectic_similitude(&diag(3, &e), n).unwrap();
            assert_eq!(g.similitude_exponent(), 2);
        }
    }

    #[test]
    fn non_similitude_rejected() {
        let g = PLocalMatrix::from_integers(3, 2, &[1, 0, 0, 2]).unwrap();
        assert_eq!(symplectic_similitude(&g, 1), Err(LinalgError::NotSimilitude));
        let g = PLocalMatrix::from_integers(3, 2, &[0, 1, 1, 0]).unwrap();
        assert_eq!(symplectic_similitude(&g, 1), Err(LinalgError::NotSimilitude));
    }

    #[test]
    fn negative_similitude_from_denominators() {
        let g = symplectic_similitude(&diag(7, &[-1, 0]), 1).unwrap();
        assert_eq!(g.similitude_exponent(), -1);
    }

    #[test]
    fn inverse_round_trip() {
        // [[I, S], [0, I]] with S symmetric.
        let u = PLocalMatrix::from_integers(3, 4, &[1, 0, 1, 2, 0, 1, 2, 3, 0, 0, 1, 0, 0, 0, 0, 1]).unwrap();
        let u = symplectic_similitude(&u, 2).unwrap();
        assert_eq!(u.similitude_exponent(), 0);
        let h = symplectic_similitude(&diag(3, &[0, 1, 2, 1]), 2).unwrap();
        let g = u.mul(&h).unwrap();
        assert_eq!(g.similitude_exponent(), 2);
        let prod = g.inverse().mul(&g).unwrap();
        assert!(prod.matrix().is_identity());
        assert_eq!(prod.similitude_exponent(), 0);
        assert!(g.mul(&g.inverse()).unwrap().matrix().is_identity());
    }
}
