//! Cross-module consistency suites with a pass/fail report.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counting::{
    level_admissible, level_admissible_bruteforce, newform_fraction, partial_zeta_bounds_check,
    partition_flag_identity, zeta_even_product, LevelProfile, ZETA_EVEN_PRODUCT_BOUND,
};
use crate::hecke::lattice::double_coset_degrees;
use crate::hecke::{coset_reps, coset_volume, product_targets, structure_constants};
use crate::level_density::{one_level_closed_form, one_level_integral, TestFunctionPW};
use crate::lfunctions::{
    b_coefficients, b_coefficients_log_derivative, mu_relation_residuals_exact, zeta_factor_identity_check,
    zeta_factor_identity_check_exact, RootOfUnityPoint, SatakePoint,
};
use crate::plancherel::{hecke_moments, sato_tate_sup_distance, QuadratureSpec};
use crate::series::Coefficient;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Check::new(name, false, format!("error: {err}"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn extend(&mut self, checks: Vec<Check>) {
        self.checks.extend(checks);
    }
}

/// Coefficients of `T_{p,n-1}^2` at `γ_1, (γ_2,) γ_3, γ_4`: `1, (p + 1,) p - 1, |J|`.
pub fn expected_coefficients(n: usize, p: u64) -> Vec<i64> {
    let p = p as i64;
    let mut v = vec![1];
    if n >= 2 {
        v.push(p + 1);
    }
    v.push(p - 1);
    v.push(coset_volume(n, p as u64) as i64);
    v
}

/// Coset count, disjointness, labels and product coefficients at `(n, p)`.
pub fn hecke_suite(n: usize, p: u64, with_degrees: bool) -> Vec<Check> {
    let tag = format!("(n={n}, p={p})");
    let mut out = Vec::new();
    let list = match coset_reps(n, p) {
        Ok(l) => l,
        Err(e) => return vec![Check::failed(format!("cosets {tag}"), e)],
    };
    let vol = coset_volume(n, p);
    out.push(Check::new(
        format!("coset count {tag}"),
        list.len() as u64 == vol,
        format!("{} listed, {vol} expected", list.len()),
    ));
    out.push(match list.pairwise_disjoint() {
        Ok(b) => Check::new(format!("cosets disjoint {tag}"), b, ""),
        Err(e) => Check::failed(format!("cosets disjoint {tag}"), e),
    });
    out.push(match list.labels_match() {
        Ok(b) => Check::new(format!("cosets in T(p,(0..0,1)) {tag}"), b, ""),
        Err(e) => Check::failed(format!("cosets in T(p,(0..0,1)) {tag}"), e),
    });
    let targets = product_targets(n);
    match structure_constants(n, p) {
        Ok(c) => {
            let got: Vec<i64> = targets.iter().map(|t| c.coefficient(t)).collect();
            let want = expected_coefficients(n, p);
            out.push(Check::new(
                format!("product coefficients {tag}"),
                got == want,
                format!("counted {got:?}, expected {want:?}"),
            ));
            if with_degrees {
                out.push(match double_coset_degrees(n, p, 4, Some(1)) {
                    Ok(deg) => {
                        let sum: i128 = targets
                            .iter()
                            .map(|t| c.coefficient(t) as i128 * *deg.get(t).unwrap_or(&0) as i128)
                            .sum();
                        let sq = vol as i128 * vol as i128;
                        Check::new(
                            format!("degree balance {tag}"),
                            sum == sq,
                            format!("sum m*deg = {sum}, |J|^2 = {sq}"),
                        )
                    }
                    Err(e) => Check::failed(format!("degree balance {tag}"), e),
                });
            }
        }
        Err(e) => out.push(Check::failed(format!("product coefficients {tag}"), e)),
    }
    out
}

/// Exact and floating identity checks on random points.
pub fn identity_suite(points: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = [3u64, 5, 7];
    let mut exact_ok = true;
    let mut relations_ok = true;
    let mut worst_float: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for i in 0..points {
        let n = 1 + i % 3;
        let p = primes[i % primes.len()];
        let r = RootOfUnityPoint::random(n, 12, &mut rng);
        exact_ok &= zeta_factor_identity_check_exact(&r, p, 6).is_ok_and(|d| d.is_zero());
        relations_ok &= mu_relation_residuals_exact(&r, p).iter().all(|x| x.is_ring_zero());
        let s = SatakePoint::random(n, &mut rng);
        worst_float = worst_float.max(zeta_factor_identity_check(&s, p, 6).unwrap_or(f64::INFINITY));
        let ld = b_coefficients_log_derivative(&s, 6);
        for m in 1..=6 {
            worst_b = worst_b.max((ld[m - 1] - b_coefficients(&s, m as u32)).abs());
        }
    }
    vec![
        Check::new(
            "identity exact",
            exact_ok,
            format!("{points} root-of-unity points, T=6"),
        ),
        Check::new(
            "identity float",
            worst_float < 1e-10,
            format!("max relative residual {worst_float:.3e}"),
        ),
        Check::new("mu/a/b relations exact", relations_ok, ""),
        Check::new(
            "b vs log-derivative",
            worst_b < 1e-10,
            format!("max difference {worst_b:.3e}"),
        ),
    ]
}

pub fn plancherel_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let q = QuadratureSpec::default();
    for n in [1usize, 2] {
        for p in [3u64, 5, 7] {
            let name = format!("Plancherel moments (n={n}, p={p})");
            out.push(match hecke_moments(n, p, q) {
                Ok(m) => {
                    let rel = (m.second / m.coset_volume - 1.0).abs();
                    Check::new(
                        name,
                        rel < 1e-4 && m.first.abs() < 1e-6,
                        format!("first {:.3e}, second {:.6} vs {}", m.first, m.second, m.coset_volume),
                    )
                }
                Err(e) => Check::failed(name, e),
            });
        }
    }
    for n in [1usize, 2] {
        let name = format!("Sato-Tate limit (n={n})");
        let ds: Result<Vec<f64>, _> = [3u64, 11, 101, 1009, 10007]
            .iter()
            .map(|&p| sato_tate_sup_distance(n, p, 41, q))
            .collect();
        out.push(match ds {
            Ok(d) => Check::new(
                name,
                d.windows(2).all(|w| w[1] < w[0]) && d[4] < 1e-3,
                d.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", "),
            ),
            Err(e) => Check::failed(name, e),
        });
    }
    out
}

pub fn level_density_suite() -> Vec<Check> {
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        let beta = i as f64 / 21.0;
        let f = TestFunctionPW::new(beta).expect("beta in (0, 1)");
        let v = one_level_integral(&f).unwrap_or(f64::INFINITY);
        worst = worst.max((v - one_level_closed_form(&f)).abs());
    }
    vec![Check::new(
        "one-level closed form",
        worst < 1e-6,
        format!("max error {worst:.3e} over 20 beta"),
    )]
}

pub fn counting_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let partitions_ok = (1..=6).all(|n| partition_flag_identity(n).is_ok_and(|r| r.failures.is_empty()));
    out.push(Check::new("partition identity n<=6", partitions_ok, ""));
    let z = zeta_even_product(50);
    out.push(Check::new(
        "zeta even product n=50",
        z < ZETA_EVEN_PRODUCT_BOUND,
        format!("{z:.10}"),
    ));
    let nf = newform_fraction(2).unwrap_or(f64::NAN);
    out.push(Check::new(
        "newform fraction n=2",
        (nf - 0.7457).abs() < 1e-3,
        format!("{nf:.6}"),
    ));
    let sets: [&[u64]; 4] = [&[], &[3], &[2, 5], &[3, 7, 11, 13]];
    let grid_ok = sets.iter().all(|s| {
        [1.1, 1.5, 2.0, 3.0, 5.0, -1.0, -3.0, -5.0]
            .iter()
            .all(|&x| partial_zeta_bounds_check(s, x).is_ok_and(|r| r.passed()))
    });
    out.push(Check::new("partial zeta inequalities", grid_ok, ""));
    let limit = 20_000u64;
    let adm_ok = (2..=limit).all(|n| {
        level_admissible(&LevelProfile::new(n).expect("positive")).admissible == level_admissible_bruteforce(n)
    });
    out.push(Check::new(
        "admissible levels",
        adm_ok,
        format!("agrees with brute force for N <= {limit}"),
    ));
    out
}

/// `(1,3), (2,3), (2,5)` Hecke suites and the identity suite.
pub fn quick() -> Report {
    let mut r = Report::default();
    for (n, p) in [(1, 3), (2, 3), (2, 5)] {
        r.extend(hecke_suite(n, p, n == 1 || (n, p) == (2, 3)));
    }
    r.extend(identity_suite(25, 1));
    r
}

/// Everything in [`quick`] plus the numerical and counting suites.
pub fn full() -> Report {
    let mut r = quick();
    for (n, p) in [(1, 5), (2, 7), (3, 3)] {
        r.extend(hecke_suite(n, p, n == 1));
    }
    r.extend(plancherel_suite());
    r.extend(level_density_suite());
    r.extend(counting_suite());
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let r = quick();
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn expected_lengths() {
        assert_eq!(expected_coefficients(1, 5), vec![1, 4, 30]);
        assert_eq!(expected_coefficients(2, 3), vec![1, 4, 2, 120]);
    }
}
