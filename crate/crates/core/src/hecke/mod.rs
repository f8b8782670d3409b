//! Right cosets of Hecke double cosets for `GSp(2n, Q_p)` with
//! `K = Sp(2n, Z_p)`, and the structure constants of `T(p,(0,...,0,1))^2`.

mod cosets;
pub mod lattice;
mod structure;

pub use cosets::{coset_equal, coset_key, coset_reps, coset_volume, CosetKey, CosetList, CosetTag};
pub use structure::{
    product_targets, rank1_symmetric_count, rank1_symmetric_count_bruteforce, structure_constants,
    structure_constants_pairwise, HeckeCombination,
};

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{mod_p_rank, smith_valuations, symplectic_similitude, GSpElement, LinalgError, PLocalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("genus must be at least 1")]
    InvalidGenus,
    #[error("similitude exponents differ: {0} vs {1}")]
    SimilitudeMismatch(i64, i64),
    #[error("element is not integral")]
    NotIntegral,
    #[error("invalid cocharacter: {0}")]
    InvalidCocharacter(String),
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub(crate) fn check_prime(p: u64) -> Result<(), HeckeError> {
    if p == 2 {
        return Err(HeckeError::EvenPrime);
    }
    if !crate::linalg::is_prime(p) {
        return Err(HeckeError::NotPrime(p));
    }
    Ok(())
}

/// Label of a double coset `K diag(p^{a_1},...,p^{a_n}, p^{δ-a_1},...,p^{δ-a_n}) K`
/// with `0 <= a_1 <= ... <= a_n <= δ/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpCocharacter {
    pub n: usize,
    pub a: Vec<u32>,
    pub similitude: u32,
}

impl SpCocharacter {
    pub fn new(a: Vec<u32>, similitude: u32) -> Result<Self, HeckeError> {
        if a.is_empty() {
            return Err(HeckeError::InvalidGenus);
        }
        if a.windows(2).any(|w| w[0] > w[1]) {
            return Err(HeckeError::InvalidCocharacter(format!("{a:?} is not sorted")));
        }
        if a.iter().any(|&x| 2 * x > similitude) {
            return Err(HeckeError::InvalidCocharacter(format!(
                "{a:?} exceeds half of the similitude {similitude}"
            )));
        }
        Ok(SpCocharacter {
            n: a.len(),
            a,
            similitude,
        })
    }

    /// `(0, 1, ..., 1)` with similitude 2: the operator `T(p,(0,...,0,1))`.
    pub fn t_generator(n: usize) -> Self {
        let mut a = vec![1; n];
        a[0] = 0;
        SpCocharacter { n, a, similitude: 2 }
    }

    pub fn max_exponent(&self) -> u32 {
        self.a.iter().copied().max().unwrap_or(0)
    }

    /// Height of the `Sp`-normalized cocharacter `p^{-δ/2} γ`, i.e.
    /// `max |δ/2 - a_i|`.
    pub fn height(&self) -> Ratio<i64> {
        self.a
            .iter()
            .map(|&x| Ratio::new((self.similitude as i64 - 2 * x as i64).abs(), 2))
            .max()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    /// Both halves of the diagonal exponents.
    pub fn diagonal_exponents(&self) -> Vec<i64> {
        let mut e: Vec<i64> = self.a.iter().map(|&x| x as i64).collect();
        e.extend(self.a.iter().map(|&x| self.similitude as i64 - x as i64));
        e
    }

    /// The diagonal representative as an element of `GSp(2n, Q_p)`.
    pub fn representative(&self, p: u64) -> Result<GSpElement, HeckeError> {
        check_prime(p)?;
        let m = PLocalMatrix::diagonal_powers(p, &self.diagonal_exponents())?;
        Ok(GSpElement::from_parts(m, self.similitude as i64, self.n))
    }

    pub fn label(&self) -> String {
        let a: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        format!("({};{})", a.join(","), self.similitude)
    }
}

/// Double-coset label of an integral element, read off from its elementary
/// divisors.
pub fn double_coset_of(g: &GSpElement) -> Result<SpCocharacter, HeckeError> {
    let delta = g.similitude_exponent();
    let vals = smith_valuations(g.matrix())?;
    if vals[0] < 0 || delta < 0 {
        return Err(HeckeError::NotIntegral);
    }
    let n = g.genus();
    let a: Vec<u32> = vals[..n].iter().map(|&v| v as u32).collect();
    let mut rest: Vec<i64> = vals[..n].iter().map(|&v| delta - v).collect();
    rest.reverse();
    if rest != vals[n..] {
        return Err(HeckeError::Linalg(LinalgError::NotSimilitude));
    }
    SpCocharacter::new(a, delta as u32)
}

/// Certify a raw matrix and then label it.
pub fn double_coset_of_matrix(m: &PLocalMatrix, n: usize) -> Result<SpCocharacter, HeckeError> {
    double_coset_of(&symplectic_similitude(m, n)?)
}

/// Rank mod p of an integral element.
pub fn rank_mod_p(g: &GSpElement) -> Result<usize, HeckeError> {
    Ok(mod_p_rank(g.matrix())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_of_diagonal_elements() {
        for n in 1..=3usize {
            let t = SpCocharacter::t_generator(n);
            let mut e = vec![1i64; 2 * n];
            e[0] = 0;
            e[n] = 2;
            let g = PLocalMatrix::diagonal_powers(3, &e).unwrap();
            assert_eq!(double_coset_of_matrix(&g, n).unwrap(), t);
            let s = PLocalMatrix::diagonal_powers(3, &vec![2; 2 * n]).unwrap();
            let lab = double_coset_of_matrix(&s, n).unwrap();
            assert_eq!(lab.a, vec![2; n]);
            assert_eq!(lab.similitude, 4);
        }
        let mut e = vec![2i64; 6];
        e[0] = 1;
        e[1] = 1;
        e[3] = 3;
        e[4] = 3;
        let g = PLocalMatrix::diagonal_powers(5, &e).unwrap();
        let lab = double_coset_of_matrix(&g, 3).unwrap();
        assert_eq!(lab.a, vec![1, 1, 2]);
        assert_eq!(lab.similitude, 4);
    }

    #[test]
    fn cocharacter_validation() {
        assert!(SpCocharacter::new(vec![1, 0], 2).is_err());
        assert!(SpCocharacter::new(vec![0, 2], 2).is_err());
        assert!(SpCocharacter::new(vec![], 2).is_err());
        let c = SpCocharacter::new(vec![0, 1, 1], 2).unwrap();
        assert_eq!(c.max_exponent(), 1);
        assert_eq!(c.height(), Ratio::from_integer(1));
        let c = SpCocharacter::new(vec![1, 2], 4).unwrap();
        assert_eq!(c.height(), Ratio::from_integer(1));
    }

    #[test]
    fn representative_round_trip() {
        let c = SpCocharacter::new(vec![0, 1, 2], 4).unwrap();
        let g = c.representative(7).unwrap();
        assert_eq!(double_coset_of(&g).unwrap(), c);
        assert!(matches!(c.representative(2), Err(HeckeError::EvenPrime)));
    }
}
