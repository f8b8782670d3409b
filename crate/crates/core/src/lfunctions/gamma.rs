use std::f64::consts::PI;

use num_complex::Complex64;

use super::{LfunctionError, WeightTuple};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.re <= 0.5 && z.im.abs() < 1e-13 && (z.re - z.re.round()).abs() < 1e-13
}

/// Complex Gamma by the Lanczos approximation with reflection.
pub fn complex_gamma(z: Complex64) -> Result<Complex64, LfunctionError> {
    if is_pole(z) {
        return Err(LfunctionError::PoleHit(z));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma_unchecked(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `Γ_R(s) = π^{-s/2} Γ(s/2)`.
pub fn gamma_r(s: Complex64) -> Result<Complex64, LfunctionError> {
    Ok(Complex64::new(PI, 0.0).powc(-s / 2.0) * complex_gamma(s / 2.0).map_err(|_| LfunctionError::PoleHit(s))?)
}

/// `Γ_C(s) = 2 (2π)^{-s} Γ(s)`.
pub fn gamma_c(s: Complex64) -> Result<Complex64, LfunctionError> {
    Ok(2.0 * Complex64::new(2.0 * PI, 0.0).powc(-s) * complex_gamma(s)?)
}

/// `Γ_R(s + ε) Π_i Γ_C(s + k_i - i)` with `ε = n mod 2`.
pub fn archimedean_factor(k: &WeightTuple, s: Complex64) -> Result<Complex64, LfunctionError> {
    let n = k.genus();
    let eps = (n % 2) as f64;
    let mut acc = gamma_r(s + eps)?;
    for (i, &ki) in k.weights().iter().enumerate() {
        acc *= gamma_c(s + (ki - (i as i64 + 1)) as f64)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gamma_values() {
        let mut f = 1.0;
        for n in 1..15 {
            let g = complex_gamma(c(n as f64)).unwrap();
            assert!((g.re - f).abs() < 1e-13 * f);
            f *= n as f64;
        }
        let h = complex_gamma(c(0.5)).unwrap();
        assert!((h.re - PI.sqrt()).abs() < 1e-14);
        let m = complex_gamma(c(-0.5)).unwrap();
        assert!((m.re + 2.0 * PI.sqrt()).abs() < 1e-13);
        // |Γ(i)|^2 = π / sinh(π)
        let gi = complex_gamma(Complex64::new(0.0, 1.0)).unwrap();
        assert!((gi.norm_sqr() - PI / PI.sinh()).abs() < 1e-14);
        assert!(complex_gamma(c(0.0)).is_err());
        assert!(complex_gamma(c(-3.0)).is_err());
    }

    #[test]
    fn archimedean_examples() {
        let k = WeightTuple::new(vec![3]).unwrap();
        let v = archimedean_factor(&k, c(1.0)).unwrap();
        assert!((v.re - 1.0 / (2.0 * PI.powi(4))).abs() < 1e-15);
        assert!(v.im.abs() < 1e-16);
        assert!(matches!(
            archimedean_factor(&k, c(-2.0)),
            Err(LfunctionError::PoleHit(_))
        ));
    }
}
