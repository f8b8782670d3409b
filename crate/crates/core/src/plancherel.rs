//! Unramified tempered Plancherel density on `Ω = [0, π]^n / S_n` and its
//! Sato–Tate limit.
//!
//! `W(θ) = Π |1 - e^{iθ_i}|^2 Π_{i<j, ε=±1} |1 - e^{i(θ_i + εθ_j)}|^2`, divided
//! by the same product with every exponential scaled by `p^{-1}`. For `p = ∞`
//! the denominator is 1.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lfunctions::{hecke_eigenvalue_p, SatakePoint};
use crate::linalg::is_prime;
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlancherelError {
    #[error("genus must be at least 1")]
    InvalidGenus,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("quadrature needs at least 8 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("quadrature did not converge: {coarse} vs {fine}")]
    NotConverged { coarse: f64, fine: f64 },
    #[error("sample count must be positive")]
    EmptySample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl Place {
    pub fn checked(self) -> Result<Self, PlancherelError> {
        match self {
            Place::Finite(p) if p == 2 || !is_prime(p) => Err(PlancherelError::NotOddPrime(p)),
            _ => Ok(self),
        }
    }

    fn inverse(self) -> f64 {
        match self {
            Place::Finite(p) => 1.0 / p as f64,
            Place::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

fn factor(z: f64, q: f64) -> f64 {
    // |1 - q e^{iz}|^2
    1.0 - 2.0 * q * z.cos() + q * q
}

/// Unnormalized density `W(θ)` at `place`.
pub fn density(theta: &[f64], place: Place) -> f64 {
    let q = place.inverse();
    let mut num = 1.0;
    let mut den = 1.0;
    for (i, &a) in theta.iter().enumerate() {
        num *= factor(a, 1.0);
        den *= factor(a, q);
        for &b in &theta[i + 1..] {
            for z in [a + b, a - b] {
                num *= factor(z, 1.0);
                den *= factor(z, q);
            }
        }
    }
    num / den
}

/// Tensor Gauss–Legendre with `points` nodes per axis on `[0, π]`; Monte
/// Carlo with `mc_samples` uniform draws when the genus is 4 or more.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub points: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn new(points: usize) -> Result<Self, PlancherelError> {
        if points < 8 {
            return Err(PlancherelError::TooFewPoints(points));
        }
        Ok(QuadratureSpec {
            points,
            mc_samples: 400_000,
            seed: 0,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::new(64).expect("64 >= 8")
    }
}

const TENSOR_MAX_GENUS: usize = 3;
const REFINEMENT_TOL: f64 = 1e-8;

/// `(Σ w f W, Σ w W)` over the tensor grid on `[0, π]^n`.
fn tensor_sums(n: usize, place: Place, m: usize, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> (f64, f64) {
    let g = GaussLegendre::new(m);
    let pts: Vec<(f64, f64)> = g.on_interval(0.0, PI).collect();
    let total = m.pow(n as u32);
    (0..total)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |theta, mut idx| {
                let mut w = 1.0;
                for t in theta.iter_mut() {
                    let (x, wx) = pts[idx % m];
                    *t = x;
                    w *= wx;
                    idx /= m;
                }
                let d = w * density(theta, place);
                (d * f(theta), d)
            },
        )
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn monte_carlo_sums(
    n: usize,
    place: Place,
    samples: usize,
    seed: u64,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = PI.powi(n as i32);
    let mut theta = vec![0.0; n];
    let (mut sf, mut sw) = (0.0, 0.0);
    for _ in 0..samples {
        for t in theta.iter_mut() {
            *t = rng.random_range(0.0..PI);
        }
        let d = density(&theta, place);
        sf += d * f(&theta);
        sw += d;
    }
    (sf * vol / samples as f64, sw * vol / samples as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Density on `Ω` with its normalizing constant.
#[derive(Debug, Clone, Serialize)]
pub struct OmegaDensity {
    n: usize,
    place: Place,
    quad: QuadratureSpec,
    z: f64,
}

impl OmegaDensity {
    pub fn new(n: usize, place: Place, quad: QuadratureSpec) -> Result<Self, PlancherelError> {
        if n == 0 {
            return Err(PlancherelError::InvalidGenus);
        }
        let place = place.checked()?;
        if quad.points < 8 {
            return Err(PlancherelError::TooFewPoints(quad.points));
        }
        let one = |_: &[f64]| 1.0;
        let z = if n <= TENSOR_MAX_GENUS {
            let coarse = tensor_sums(n, place, quad.points, &one).1;
            let fine = tensor_sums(n, place, quad.points + quad.points / 2, &one).1;
            if (coarse - fine).abs() > REFINEMENT_TOL * fine.abs().max(1.0) {
                return Err(PlancherelError::NotConverged { coarse, fine });
            }
            coarse
        } else {
            monte_carlo_sums(n, place, quad.mc_samples, quad.seed, &one).1
        } / factorial(n);
        Ok(OmegaDensity { n, place, quad, z })
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn place(&self) -> Place {
        self.place
    }

    /// `Z = (1/n!) ∫_{[0,π]^n} W`.
    pub fn normalization_constant(&self) -> f64 {
        self.z
    }

    /// Probability density `W/Z` with respect to `dθ` on the sorted chamber.
    pub fn pdf(&self, theta: &[f64]) -> f64 {
        density(theta, self.place) / self.z
    }

    /// `∫ f dμ` for a symmetric `f`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let (sf, sw) = if self.n <= TENSOR_MAX_GENUS {
            tensor_sums(self.n, self.place, self.quad.points, &f)
        } else {
            monte_carlo_sums(self.n, self.place, self.quad.mc_samples, self.quad.seed, &f)
        };
        sf / sw
    }

    /// Crude uniform envelope `4^{n^2} (1 - 1/p)^{-2n^2}` for `W`.
    pub fn envelope(&self) -> f64 {
        let k = (self.n * self.n) as i32;
        4f64.powi(k) / (1.0 - self.place.inverse()).powi(2 * k)
    }

    /// Rejection sampling against the uniform envelope; deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<SatakePoint>, PlancherelError> {
        if count == 0 {
            return Err(PlancherelError::EmptySample);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = self.envelope();
        let mut out = Vec::with_capacity(count);
        let mut theta = vec![0.0; self.n];
        while out.len() < count {
            for t in theta.iter_mut() {
                *t = rng.random_range(0.0..=PI);
            }
            let u: f64 = rng.random();
            if u * bound < density(&theta, self.place) {
                out.push(SatakePoint::new(theta.clone()).expect("angles inside [0, pi]"));
            }
        }
        Ok(out)
    }
}

pub fn normalize(n: usize, place: Place, quad: QuadratureSpec) -> Result<f64, PlancherelError> {
    Ok(OmegaDensity::new(n, place, quad)?.normalization_constant())
}

pub fn sample(n: usize, place: Place, count: usize, seed: u64) -> Result<Vec<SatakePoint>, PlancherelError> {
    OmegaDensity::new(n, place, QuadratureSpec::default())?.sample(count, seed)
}

/// `∫ a_F(p) dμ_p` and `∫ a_F(p)^2 dμ_p`, with `a_F(p) = p^n (1 + 2 Σ cos θ_i) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeckeMoments {
    pub first: f64,
    pub second: f64,
    /// `p Σ_{i<2n} p^i`.
    pub coset_volume: f64,
}

pub fn hecke_moments(n: usize, p: u64, quad: QuadratureSpec) -> Result<HeckeMoments, PlancherelError> {
    let d = OmegaDensity::new(n, Place::Finite(p), quad)?;
    let a = |t: &[f64]| {
        let s = SatakePoint::new(t.to_vec()).expect("angles inside [0, pi]");
        hecke_eigenvalue_p(&s, p)
    };
    let first = d.integrate(a);
    let second = d.integrate(|t| a(t).powi(2));
    let pf = p as f64;
    let coset_volume = pf * (0..2 * n as i32).map(|i| pf.powi(i)).sum::<f64>();
    Ok(HeckeMoments {
        first,
        second,
        coset_volume,
    })
}

/// `sup |W_p/Z_p - W_∞/Z_∞|` over a grid with `grid` points per axis.
pub fn sato_tate_sup_distance(n: usize, p: u64, grid: usize, quad: QuadratureSpec) -> Result<f64, PlancherelError> {
    let fin = OmegaDensity::new(n, Place::Finite(p), quad)?;
    let inf = OmegaDensity::new(n, Place::Infinity, quad)?;
    let g = grid.max(2);
    let total = g.pow(n as u32);
    let step = PI / (g - 1) as f64;
    Ok((0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut theta = vec![0.0; n];
            for t in theta.iter_mut() {
                *t = (idx % g) as f64 * step;
                idx /= g;
            }
            (fin.pdf(&theta) - inf.pdf(&theta)).abs()
        })
        .reduce(|| 0.0, f64::max))
}

/// Empirical-vs-model Kolmogorov–Smirnov statistic for genus 1 at `p = ∞`,
/// where the CDF is `(θ - sin θ)/π`.
pub fn ks_statistic_sato_tate_genus_one(samples: &[SatakePoint]) -> f64 {
    let mut xs: Vec<f64> = samples.iter().map(|s| s.angles()[0]).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (x - x.sin()) / PI;
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// [`density`] recomputed from the root values `e^{iα(t)}` as complex numbers.
pub fn density_from_roots(theta: &[f64], place: Place) -> f64 {
    let q = place.inverse();
    let mut roots: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    for i in 0..theta.len() {
        for j in i + 1..theta.len() {
            roots.push(Complex64::from_polar(1.0, theta[i] + theta[j]));
            roots.push(Complex64::from_polar(1.0, theta[i] - theta[j]));
        }
    }
    roots
        .iter()
        .map(|r| (Complex64::new(1.0, 0.0) - r).norm_sqr() / (Complex64::new(1.0, 0.0) - q * r).norm_sqr())
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_examples() {
        assert_eq!(density(&[0.0, 1.0], Place::Infinity), 0.0);
        assert!((density(&[PI / 2.0], Place::Infinity) - 2.0).abs() < 1e-15);
        assert!((density(&[PI / 2.0], Place::Finite(3)) - 1.8).abs() < 1e-14);
        assert!(density(&[0.7, 0.7], Place::Finite(5)).abs() < 1e-15);
        let t = [0.3, 1.7, 2.9];
        assert!((density(&t, Place::Finite(7)) - density_from_roots(&t, Place::Finite(7))).abs() < 1e-12);
        let u = [2.9, 0.3, 1.7];
        assert!((density(&t, Place::Finite(7)) - density(&u, Place::Finite(7))).abs() < 1e-12);
    }

    #[test]
    fn genus_one_normalization() {
        let z = normalize(1, Place::Infinity, QuadratureSpec::default()).unwrap();
        assert!((z - 2.0 * PI).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for p in [3, 5, 11, 101, 1009] {
            let zp = normalize(1, Place::Finite(p), QuadratureSpec::default()).unwrap();
            let gap = (zp - 2.0 * PI).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(QuadratureSpec::new(4).is_err());
        assert!(OmegaDensity::new(1, Place::Finite(9), QuadratureSpec::default()).is_err());
    }

    #[test]
    fn chamber_vs_cube() {
        // Integrating over the sorted chamber equals the cube integral over n!.
        let place = Place::Finite(5);
        let z = normalize(2, place, QuadratureSpec::default()).unwrap();
        let g = GaussLegendre::new(48);
        let mut chamber = 0.0;
        for (x, wx) in g.on_interval(0.0, PI) {
            for (y, wy) in g.on_interval(0.0, x) {
                chamber += wx * wy * density(&[y, x], place);
            }
        }
        assert!((chamber - z).abs() < 1e-9 * z);
    }

    #[test]
    fn integrate_first_trace() {
        let d = OmegaDensity::new(1, Place::Finite(3), QuadratureSpec::default()).unwrap();
        let v = d.integrate(|t| 1.0 + 2.0 * t[0].cos());
        let reference = {
            let f = |t: f64| density(&[t], Place::Finite(3));
            let num = crate::quadrature::composite(0.0, PI, 64, 20, |t| (1.0 + 2.0 * t.cos()) * f(t));
            let den = crate::quadrature::composite(0.0, PI, 64, 20, f);
            num / den
        };
        assert!((v - reference).abs() < 1e-8);
        assert!((d.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_deterministic_and_sorted() {
        let d = OmegaDensity::new(2, Place::Finite(3), QuadratureSpec::default()).unwrap();
        let a = d.sample(50, 9).unwrap();
        let b = d.sample(50, 9).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.angles()[0] <= s.angles()[1]);
        }
        assert!(d.sample(0, 1).is_err());
    }

    #[test]
    fn monte_carlo_genus_four() {
        let q = QuadratureSpec {
            mc_samples: 20_000,
            ..Default::default()
        };
        let d = OmegaDensity::new(4, Place::Finite(5), q).unwrap();
        assert!(d.normalization_constant() > 0.0);
        assert!((d.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
    }
}
