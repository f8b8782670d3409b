//! Symplectic random-matrix kernels, Paley–Wiener test functions and the
//! low-lying zero statistic.
//!
//! Test functions are normalized so that `φ_β(x) = (sin(πβx)/(πx))^2` and
//! `φ̂_β(u) = ∫ φ_β(x) e^{-2πiux} dx = max(β - |u|, 0)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::{composite, GaussLegendre};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevelDensityError {
    #[error("support radius must lie in (0, 1), got {0}")]
    InvalidBeta(f64),
    #[error("level {0} is not supported")]
    UnsupportedLevel(usize),
    #[error("quadrature did not converge: {coarse} vs {fine}")]
    NotConverged { coarse: f64, fine: f64 },
    #[error("Fourier-side formula needs the support radii to sum to at most 1")]
    SupportTooWide,
    #[error("ensemble needs a positive dimension and trial count")]
    EmptyEnsemble,
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunctionPW {
    beta: f64,
}

impl TestFunctionPW {
    pub fn new(beta: f64) -> Result<Self, LevelDensityError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(LevelDensityError::InvalidBeta(beta));
        }
        Ok(TestFunctionPW { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi(&self, x: f64) -> f64 {
        let b = self.beta;
        (b * sinc(PI * b * x)).powi(2)
    }

    pub fn phi_hat(&self, u: f64) -> f64 {
        (self.beta - u.abs()).max(0.0)
    }

    /// `∫_X^∞ φ` from the asymptotic expansion of the oscillatory part.
    fn tail(&self, x: f64) -> f64 {
        let c = 2.0 * PI * self.beta;
        let osc = -(c * x).sin() / (c * x * x) + 2.0 * (c * x).cos() / (c * c * x * x * x);
        (0.5 / x - 0.5 * osc) / (PI * PI)
    }
}

/// `K(x, y) = S(x - y) - S(x + y)` with `S(t) = sin(πt)/(πt)`.
pub fn sp_kernel(x: f64, y: f64) -> f64 {
    sinc(PI * (x - y)) - sinc(PI * (x + y))
}

/// `det (K(x_j, x_k))`.
pub fn w_sp(x: &[f64]) -> f64 {
    let l = x.len();
    if l == 0 {
        return 1.0;
    }
    DMatrix::from_fn(l, l, |i, j| sp_kernel(x[i], x[j])).determinant()
}

/// `φ̂(0) - φ(0)/2 = β - β²/2`.
pub fn one_level_closed_form(f: &TestFunctionPW) -> f64 {
    f.beta - f.beta * f.beta / 2.0
}

const PANEL_POINTS: usize = 16;

fn one_level_to(f: &TestFunctionPW, x: f64) -> f64 {
    let panels = x.ceil() as usize;
    let body = composite(0.0, x, panels, PANEL_POINTS, |t| f.phi(t) * w_sp(&[t]));
    2.0 * (body + f.tail(x))
}

/// `∫_R φ(x) W(x) dx` for `W = 1 - sin(2πx)/(2πx)`.
pub fn one_level_integral(f: &TestFunctionPW) -> Result<f64, LevelDensityError> {
    let coarse = one_level_to(f, 2000.0);
    let fine = one_level_to(f, 4000.0);
    if (coarse - fine).abs() > 1e-8 {
        return Err(LevelDensityError::NotConverged { coarse, fine });
    }
    Ok(fine)
}

fn pair_term(f: &TestFunctionPW, g: &TestFunctionPW, x: f64, step: f64) -> f64 {
    let gl = GaussLegendre::new(12);
    let panels = (x / step).ceil() as usize;
    let h = x / panels as f64;
    let axis: Vec<(f64, f64)> = (0..panels)
        .flat_map(|i| gl.on_interval(i as f64 * h, (i + 1) as f64 * h).collect::<Vec<_>>())
        .collect();
    4.0 * axis
        .par_iter()
        .map(|&(a, wa)| {
            let fa = f.phi(a);
            wa * fa
                * axis
                    .iter()
                    .map(|&(b, wb)| wb * g.phi(b) * sp_kernel(a, b).powi(2))
                    .sum::<f64>()
        })
        .sum::<f64>()
}

/// `∫_{R^ℓ} Π φ_i(x_i) W(Sp)(x) dx` for `ℓ ∈ {1, 2}`.
pub fn density_integral(fs: &[TestFunctionPW]) -> Result<f64, LevelDensityError> {
    match fs {
        [f] => one_level_integral(f),
        [f, g] => {
            // det = K(x,x)K(y,y) - K(x,y)^2; the first part factors.
            let diag = one_level_integral(f)? * one_level_integral(g)?;
            let coarse = pair_term(f, g, 40.0, 0.5);
            let fine = pair_term(f, g, 80.0, 0.5);
            if (coarse - fine).abs() > 1e-6 {
                return Err(LevelDensityError::NotConverged { coarse, fine });
            }
            Ok(diag - fine)
        }
        _ => Err(LevelDensityError::UnsupportedLevel(fs.len())),
    }
}

/// Two-level integral evaluated on the Fourier side:
/// `I(f) I(g) - 2 ∫ f̂ ĝ (1 - |u|) du + f(0) g(0)`, valid for `β_f + β_g ≤ 1`.
pub fn two_level_fourier(f: &TestFunctionPW, g: &TestFunctionPW) -> Result<f64, LevelDensityError> {
    if f.beta + g.beta > 1.0 {
        return Err(LevelDensityError::SupportTooWide);
    }
    let r = f.beta.min(g.beta);
    // Piecewise polynomial of degree 3 on [0, r]: a 4-point rule is exact.
    let overlap = 2.0 * GaussLegendre::new(4).integrate(0.0, r, |u| f.phi_hat(u) * g.phi_hat(u) * (1.0 - u));
    Ok(one_level_closed_form(f) * one_level_closed_form(g) - 2.0 * overlap + f.phi(0.0) * g.phi(0.0))
}

/// Ordinates `γ` with a log conductor; `D = Σ φ(γ log c / 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub log_conductor: f64,
}

impl ZeroList {
    pub fn new(ordinates: Vec<f64>, log_conductor: f64) -> Self {
        ZeroList {
            ordinates,
            log_conductor,
        }
    }

    /// Eigenangles `θ` and their negatives, scaled so that `θ ↦ θ · scale`.
    pub fn from_eigenangles(angles: &[f64], scale: f64) -> Self {
        let ordinates = angles.iter().flat_map(|&t| [t, -t]).collect();
        ZeroList::new(ordinates, 2.0 * PI * scale)
    }

    pub fn union(&self, o: &ZeroList) -> Option<ZeroList> {
        (self.log_conductor == o.log_conductor).then(|| {
            let mut ordinates = self.ordinates.clone();
            ordinates.extend_from_slice(&o.ordinates);
            ZeroList::new(ordinates, self.log_conductor)
        })
    }
}

pub fn d_statistic(z: &ZeroList, f: &TestFunctionPW) -> f64 {
    z.ordinates
        .iter()
        .map(|g| f.phi(g * z.log_conductor / (2.0 * PI)))
        .sum()
}

/// `1/β - 1/2`.
pub fn vanishing_bound(beta: f64) -> Result<f64, LevelDensityError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(LevelDensityError::InvalidBeta(beta));
    }
    Ok(1.0 / beta - 0.5)
}

/// Unfolding of `USp(2m)` eigenangles `θ ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scaling {
    /// `θ · 2m / 2π`.
    Dimension,
    /// `θ · (2m + 1) / 2π`, the mean spacing of the finite-`m` density.
    DimensionPlusOne,
}

impl Scaling {
    pub fn factor(self, m: usize) -> f64 {
        match self {
            Scaling::Dimension => 2.0 * m as f64 / (2.0 * PI),
            Scaling::DimensionPlusOne => (2 * m + 1) as f64 / (2.0 * PI),
        }
    }
}

fn gaussian_vector<R: rand::Rng>(len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Haar-random element of `USp(2m)`, with columns `u_1..u_m, w_1..w_m` and
/// `w = -J conj(u)`.
pub fn random_usp<R: rand::Rng>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let d = 2 * m;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    let mut ws: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    while cols.len() < d {
        let mut v = gaussian_vector(d, rng);
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(c) {
                *x -= proj * a;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        // J = [[0, I], [-I, 0]], so -J conj(v) = (-conj(v_lower), conj(v_upper)).
        let mut w = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..m {
            w[i] = -v[m + i].conj();
            w[m + i] = v[i].conj();
        }
        cols.push(v);
        cols.push(w.clone());
        ws.push(w);
    }
    let mut out = DMatrix::zeros(d, d);
    let us: Vec<&Vec<Complex64>> = cols.iter().step_by(2).collect();
    for (k, u) in us.iter().enumerate() {
        for i in 0..d {
            out[(i, k)] = u[i];
            out[(i, m + k)] = ws[k][i];
        }
    }
    out
}

/// The `m` eigenangles in `[0, π]` of a `USp(2m)` matrix.
pub fn eigenangles(u: &DMatrix<Complex64>) -> Vec<f64> {
    let ev = u
        .clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form is triangular");
    let mut a: Vec<f64> = ev.iter().map(|z| z.arg().abs()).collect();
    a.sort_by(f64::total_cmp);
    a.into_iter().step_by(2).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    /// `E[D]` from the exact finite-`m` eigenangle density.
    pub finite_expectation: f64,
    /// `∫ φ W(Sp)`.
    pub limit: f64,
}

/// Average of `D` over `trials` Haar matrices from `USp(2m)`.
pub fn symplectic_ensemble(
    m: usize,
    trials: usize,
    f: &TestFunctionPW,
    seed: u64,
    scaling: Scaling,
) -> Result<EnsembleReport, LevelDensityError> {
    if m == 0 || trials < 2 {
        return Err(LevelDensityError::EmptyEnsemble);
    }
    let scale = scaling.factor(m);
    let ds: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let u = random_usp(m, &mut rng);
            d_statistic(&ZeroList::from_eigenangles(&eigenangles(&u), scale), f)
        })
        .collect();
    let n = trials as f64;
    let mean = ds.iter().sum::<f64>() / n;
    let var = ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(EnsembleReport {
        mean,
        stderr: (var / n).sqrt(),
        trials,
        finite_expectation: usp_expected_d(m, f, scaling),
        limit: one_level_integral(f)?,
    })
}

/// `E[D] = ∫_0^π 2 φ(θ s) ρ_m(θ) dθ` with
/// `ρ_m(θ) = (2m + 1 - sin((2m+1)θ)/sin θ) / 2π`.
pub fn usp_expected_d(m: usize, f: &TestFunctionPW, scaling: Scaling) -> f64 {
    let s = scaling.factor(m);
    let k = (2 * m + 1) as f64;
    let rho = |t: f64| {
        let r = if t.sin().abs() < 1e-12 {
            k
        } else {
            (k * t).sin() / t.sin()
        };
        (k - r) / (2.0 * PI)
    };
    composite(0.0, PI, 8 * m.max(4), PANEL_POINTS, |t| 2.0 * f.phi(t * s) * rho(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert!(sp_kernel(0.0, 0.0).abs() < 1e-15);
        let x = 0.37;
        assert!((sp_kernel(x, x) - (1.0 - (2.0 * PI * x).sin() / (2.0 * PI * x))).abs() < 1e-14);
        let v = sp_kernel(0.5, 0.25);
        assert!((v - 4.0 * 2f64.sqrt() / (3.0 * PI)).abs() < 1e-14);
        assert!((v - 0.6002).abs() < 1e-4);
        assert!(w_sp(&[0.0]).abs() < 1e-15);
        assert!((w_sp(&[1e6]) - 1.0).abs() < 1e-6);
        assert!(w_sp(&[0.3, 0.3]).abs() < 1e-14);
        let a = w_sp(&[0.2, 0.9, 1.4]);
        let b = w_sp(&[1.4, 0.2, 0.9]);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn test_function() {
        let f = TestFunctionPW::new(0.5).unwrap();
        assert_eq!(f.phi(0.0), 0.25);
        assert_eq!(f.phi_hat(0.0), 0.5);
        assert_eq!(f.phi_hat(0.7), 0.0);
        assert!(TestFunctionPW::new(1.0).is_err());
        assert!(TestFunctionPW::new(0.0).is_err());
        // ∫ φ = φ̂(0); the tail formula carries most of the mass beyond X.
        let x = 500.0;
        let body = composite(0.0, x, 500, 16, |t| f.phi(t));
        assert!((2.0 * (body + f.tail(x)) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn one_level_matches_closed_form() {
        for beta in [0.05, 0.3, 0.5, 0.77, 0.95] {
            let f = TestFunctionPW::new(beta).unwrap();
            let v = one_level_integral(&f).unwrap();
            assert!((v - one_level_closed_form(&f)).abs() < 1e-6, "beta={beta}");
        }
    }

    #[test]
    fn two_level_matches_fourier_side() {
        let f = TestFunctionPW::new(1.0 / 3.0).unwrap();
        let spatial = density_integral(&[f, f]).unwrap();
        let fourier = two_level_fourier(&f, &f).unwrap();
        assert!((spatial - fourier).abs() < 1e-6, "{spatial} vs {fourier}");
        let g = TestFunctionPW::new(0.6).unwrap();
        assert!(two_level_fourier(&g, &g).is_err());
        assert!(density_integral(&[f, f, f]).is_err());
    }

    #[test]
    fn d_statistic_basics() {
        let f = TestFunctionPW::new(0.5).unwrap();
        assert_eq!(d_statistic(&ZeroList::new(vec![], 3.0), &f), 0.0);
        assert_eq!(d_statistic(&ZeroList::new(vec![0.0], 7.0), &f), 0.25);
        let a = ZeroList::new(vec![0.1, -0.4], 5.0);
        let b = ZeroList::new(vec![2.0], 5.0);
        let u = a.union(&b).unwrap();
        let lhs = d_statistic(&u, &f);
        assert!((lhs - d_statistic(&a, &f) - d_statistic(&b, &f)).abs() < 1e-15);
        assert_eq!(vanishing_bound(0.5).unwrap(), 1.5);
    }

    #[test]
    fn usp_is_symplectic_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 4;
        let u = random_usp(m, &mut rng);
        let d = 2 * m;
        let j = DMatrix::from_fn(d, d, |i, k| {
            if k == i + m {
                Complex64::new(1.0, 0.0)
            } else if i == k + m {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let uu = u.adjoint() * &u;
        let uju = u.transpose() * &j * &u;
        for i in 0..d {
            for k in 0..d {
                let id = if i == k { 1.0 } else { 0.0 };
                assert!((uu[(i, k)] - Complex64::new(id, 0.0)).norm() < 1e-12);
                assert!((uju[(i, k)] - j[(i, k)]).norm() < 1e-12);
            }
        }
        let angles = eigenangles(&u);
        assert_eq!(angles.len(), m);
        assert!(angles.iter().all(|t| (0.0..=PI).contains(t)));
    }

    #[test]
    fn finite_expectation_approaches_limit() {
        let f = TestFunctionPW::new(0.5).unwrap();
        let lim = one_level_closed_form(&f);
        let e20 = usp_expected_d(20, &f, Scaling::DimensionPlusOne);
        let e80 = usp_expected_d(80, &f, Scaling::DimensionPlusOne);
        // The gap is the φ-mass beyond the largest unfolded angle, O(1/m).
        assert!((e80 - lim).abs() < (e20 - lim).abs() / 3.0);
        assert!((e80 - lim).abs() < 2e-3);
    }
}
