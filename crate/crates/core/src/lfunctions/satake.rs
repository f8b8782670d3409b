use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use super::LfunctionError;
use crate::series::{Coefficient, Cyclotomic};

/// Unramified tempered class: angles in `[0, π]`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatakePoint {
    angles: Vec<f64>,
}

impl SatakePoint {
    pub fn new(mut angles: Vec<f64>) -> Result<Self, LfunctionError> {
        if angles.is_empty() {
            return Err(LfunctionError::EmptyPoint);
        }
        for &t in &angles {
            if !(0.0..=PI).contains(&t) {
                return Err(LfunctionError::InvalidAngle(t));
            }
        }
        angles.sort_by(f64::total_cmp);
        Ok(SatakePoint { angles })
    }

    /// Uniform angles, useful for randomized checks.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::new((0..n.max(1)).map(|_| rng.random_range(0.0..=PI)).collect()).expect("angles drawn inside [0, pi]")
    }

    pub fn genus(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn alphas(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
    }
}

/// Satake point whose angles are rational multiples of `π`, so that the
/// parameters are exact roots of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootOfUnityPoint {
    fractions: Vec<Ratio<i64>>,
}

impl RootOfUnityPoint {
    /// Angles `π · num/den`, each fraction in `[0, 1]`.
    pub fn new(fracs: Vec<(i64, i64)>) -> Result<Self, LfunctionError> {
        if fracs.is_empty() {
            return Err(LfunctionError::EmptyPoint);
        }
        let mut fractions = Vec::with_capacity(fracs.len());
        for (a, b) in fracs {
            if b == 0 {
                return Err(LfunctionError::InvalidFraction(a, b));
            }
            let r = Ratio::new(a, b);
            if r < Ratio::zero() || r > Ratio::from_integer(1) {
                return Err(LfunctionError::InvalidFraction(a, b));
            }
            fractions.push(r);
        }
        fractions.sort();
        Ok(RootOfUnityPoint { fractions })
    }

    /// Random fractions with denominators up to `max_den`.
    pub fn random<R: Rng + ?Sized>(n: usize, max_den: i64, rng: &mut R) -> Self {
        let fr = (0..n.max(1))
            .map(|_| {
                let b = rng.random_range(1..=max_den.max(1));
                (rng.random_range(0..=b), b)
            })
            .collect();
        Self::new(fr).expect("fractions drawn inside [0, 1]")
    }

    pub fn genus(&self) -> usize {
        self.fractions.len()
    }

    pub fn fractions(&self) -> &[Ratio<i64>] {
        &self.fractions
    }

    pub fn to_satake(&self) -> SatakePoint {
        SatakePoint::new(
            self.fractions
                .iter()
                .map(|r| (PI * r.to_f64().unwrap_or(0.0)).clamp(0.0, PI))
                .collect(),
        )
        .expect("fractions in [0, 1]")
    }

    /// `(α_i, α_i^{-1})` with `α_i = ζ_{2b}^a` for the fraction `a/b`.
    pub fn alphas_exact(&self) -> Vec<(Cyclotomic, Cyclotomic)> {
        self.fractions
            .iter()
            .map(|r| {
                let m = 2 * *r.denom() as u64;
                let k = *r.numer();
                (Cyclotomic::root_of_unity(m, k), Cyclotomic::root_of_unity(m, -k))
            })
            .collect()
    }

    /// `1 + Σ (α_i^m + α_i^{-m})`, exactly.
    pub fn b_coefficient_exact(&self, m: i64) -> Cyclotomic {
        let mut acc = Cyclotomic::ring_one();
        for r in &self.fractions {
            let ord = 2 * *r.denom() as u64;
            let k = *r.numer() * m;
            acc = acc
                .add(&Cyclotomic::root_of_unity(ord, k))
                .add(&Cyclotomic::root_of_unity(ord, -k));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn validation_and_sorting() {
        let s = SatakePoint::new(vec![2.0, 0.5]).unwrap();
        assert_eq!(s.angles(), &[0.5, 2.0]);
        assert!(matches!(
            SatakePoint::new(vec![-0.1]),
            Err(LfunctionError::InvalidAngle(_))
        ));
        assert!(SatakePoint::new(vec![]).is_err());
        assert!(RootOfUnityPoint::new(vec![(3, 2)]).is_err());
        assert!(RootOfUnityPoint::new(vec![(1, 0)]).is_err());
    }

    #[test]
    fn exact_alphas_match_angles() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let r = RootOfUnityPoint::random(3, 12, &mut rng);
            let s = r.to_satake();
            for ((a, ai), z) in r.alphas_exact().iter().zip(s.alphas()) {
                assert!((a.to_complex() - z).norm() < 1e-12);
                assert!((ai.to_complex() - z.conj()).norm() < 1e-12);
            }
            let b = r.b_coefficient_exact(3).to_complex().re;
            assert!((b - super::super::b_coefficients(&s, 3)).abs() < 1e-12);
        }
    }
}
