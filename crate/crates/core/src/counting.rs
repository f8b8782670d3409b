//! Dimension-formula constants, divisor sums, partitions, partial zeta values
//! and admissible levels.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{divisors, factorize, is_prime, pow_mod};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountingError {
    #[error("zeta is only evaluated for s > 1 or at negative integers, got {0}")]
    DomainError(f64),
    #[error("genus must be at least {0}")]
    InvalidGenus(usize),
    #[error("level must be at least {0}")]
    InvalidLevel(u64),
    #[error("exponent r must be at least 2, got {0}")]
    InvalidExponent(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelProfile {
    level: u64,
    factorization: Vec<(u64, u32)>,
}

impl LevelProfile {
    pub fn new(level: u64) -> Result<Self, CountingError> {
        if level == 0 {
            return Err(CountingError::InvalidLevel(1));
        }
        Ok(LevelProfile {
            level,
            factorization: factorize(level),
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factorization.iter().map(|&(p, _)| p).collect()
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factorization.len()
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factorization
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Number of divisors.
    pub fn sigma0(&self) -> u64 {
        self.factorization.iter().map(|&(_, e)| e as u64 + 1).product()
    }
}

fn sigma0(d: u64) -> u64 {
    factorize(d).iter().map(|&(_, e)| e as u64 + 1).product()
}

fn big_pow(b: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(b), e as usize)
}

/// Bernoulli numbers `B_0..=B_m` with `B_1 = -1/2`.
pub fn bernoulli_numbers(m: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(m + 1);
    b.push(BigRational::one());
    for k in 1..=m {
        // Σ_{j<k+1} C(k+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(k + 1)));
    }
    b
}

fn even_bernoulli_f64() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| {
        bernoulli_numbers(2 * EM_TERMS)
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

const EM_CUTOFF: u64 = 20;
const EM_TERMS: usize = 10;

/// `(ζ(s), ζ'(s))` for real `s > 1` by Euler–Maclaurin summation.
fn zeta_and_derivative(s: f64) -> (f64, f64) {
    let n = EM_CUTOFF as f64;
    let ln = n.ln();
    let mut z = 0.0;
    let mut dz = 0.0;
    for k in 1..EM_CUTOFF {
        let kf = k as f64;
        let t = kf.powf(-s);
        z += t;
        dz -= kf.ln() * t;
    }
    let lead = n.powf(1.0 - s);
    z += lead / (s - 1.0) + 0.5 * n.powf(-s);
    dz += -ln * lead / (s - 1.0) - lead / ((s - 1.0) * (s - 1.0)) - 0.5 * ln * n.powf(-s);
    let b = even_bernoulli_f64();
    let mut fact = 1.0;
    for j in 1..=EM_TERMS {
        fact *= ((2 * j - 1) * 2 * j) as f64;
        // s (s+1) ... (s + 2j - 2)
        let mut poly = 1.0;
        let mut dlog = 0.0;
        for i in 0..(2 * j - 1) {
            poly *= s + i as f64;
            dlog += 1.0 / (s + i as f64);
        }
        let pw = n.powf(-s - (2 * j) as f64 + 1.0);
        let c = b[2 * j] / fact;
        z += c * poly * pw;
        dz += c * poly * pw * (dlog - ln);
    }
    (z, dz)
}

/// `ζ(s)` for `s > 1`, or at a negative integer via `ζ(-m) = -B_{m+1}/(m+1)`.
pub fn zeta(s: f64) -> Result<f64, CountingError> {
    if s > 1.0 {
        return Ok(zeta_and_derivative(s).0);
    }
    let m = negative_integer(s)?;
    Ok(zeta_negative_integer(m).to_f64().unwrap_or(f64::NAN))
}

fn negative_integer(s: f64) -> Result<u32, CountingError> {
    if s <= -1.0 && s.fract() == 0.0 {
        Ok((-s) as u32)
    } else {
        Err(CountingError::DomainError(s))
    }
}

/// `ζ(-m)` exactly.
pub fn zeta_negative_integer(m: u32) -> BigRational {
    let b = bernoulli_numbers(m as usize + 1);
    -&b[m as usize + 1] / BigRational::from_integer(BigInt::from(m + 1))
}

/// `ζ^S(s) = ζ(s) Π_{p ∈ S} (1 - p^{-s})`.
pub fn partial_zeta(s: f64, primes: &[u64]) -> Result<f64, CountingError> {
    if s > 1.0 {
        let euler: f64 = primes.iter().map(|&p| 1.0 - (p as f64).powf(-s)).product();
        return Ok(zeta(s)? * euler);
    }
    let m = negative_integer(s)?;
    Ok(partial_zeta_negative_integer(m, primes).to_f64().unwrap_or(f64::NAN))
}

/// `ζ^S(-m) = ζ(-m) Π (1 - p^m)`, exactly.
pub fn partial_zeta_negative_integer(m: u32, primes: &[u64]) -> BigRational {
    let mut v = zeta_negative_integer(m);
    for &p in primes {
        v *= BigRational::from_integer(BigInt::one() - big_pow(p, m));
    }
    v
}

/// `d/ds ζ^S(s)` for `s > 1`.
pub fn partial_zeta_derivative(s: f64, primes: &[u64]) -> Result<f64, CountingError> {
    if s <= 1.0 {
        return Err(CountingError::DomainError(s));
    }
    let (z, dz) = zeta_and_derivative(s);
    let factors: Vec<f64> = primes.iter().map(|&p| 1.0 - (p as f64).powf(-s)).collect();
    let prod: f64 = factors.iter().product();
    let mut dprod = 0.0;
    for (i, &p) in primes.iter().enumerate() {
        let pf = p as f64;
        let d = pf.ln() * pf.powf(-s);
        let rest: f64 = factors
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, f)| f)
            .product();
        dprod += d * rest;
    }
    Ok(dz * prod + z * dprod)
}

/// Outcome of the partial zeta inequalities at one `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaBoundsReport {
    pub s: f64,
    pub partial: f64,
    pub full: f64,
    /// `ζ^S(s) ≤ ζ(s)` for `s > 1`.
    pub upper: Option<bool>,
    /// `|(ζ^S)'(s)| ≤ 2 s ζ(s)/(s - 1)` for `s > 1`.
    pub derivative: Option<bool>,
    /// `|ζ^S(s)| ≤ N_1^{-s} |ζ(s)|` with `N_1 = Π_{p∈S} p`, for `s ≤ -1`.
    pub negative: Option<bool>,
}

impl ZetaBoundsReport {
    pub fn passed(&self) -> bool {
        [self.upper, self.derivative, self.negative]
            .iter()
            .all(|b| b.unwrap_or(true))
    }
}

pub fn partial_zeta_bounds_check(primes: &[u64], s: f64) -> Result<ZetaBoundsReport, CountingError> {
    let partial = partial_zeta(s, primes)?;
    let full = zeta(s)?;
    if s > 1.0 {
        let d = partial_zeta_derivative(s, primes)?;
        return Ok(ZetaBoundsReport {
            s,
            partial,
            full,
            upper: Some(partial <= full),
            derivative: Some(d.abs() <= 2.0 * s * full / (s - 1.0)),
            negative: None,
        });
    }
    let m = negative_integer(s)?;
    let n1: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let lhs = partial_zeta_negative_integer(m, primes).abs();
    let rhs = BigRational::from_integer(num_traits::pow(n1, m as usize)) * zeta_negative_integer(m).abs();
    Ok(ZetaBoundsReport {
        s,
        partial,
        full,
        upper: None,
        derivative: None,
        negative: Some(lhs <= rhs),
    })
}

/// `Π_{i=1}^n ζ(2i)`.
pub fn zeta_even_product(n: usize) -> f64 {
    (1..=n).map(|i| zeta((2 * i) as f64).expect("s > 1")).product()
}

/// Bound on `Π_{i≥1} ζ(2i)`.
pub const ZETA_EVEN_PRODUCT_BOUND: f64 = 2.118;

/// `(2n² - 1 - Π ζ(2i)) / (2n² - 1)`.
pub fn newform_fraction(n: usize) -> Result<f64, CountingError> {
    if n < 2 {
        return Err(CountingError::InvalidGenus(2));
    }
    let d = (2 * n * n - 1) as f64;
    Ok((d - zeta_even_product(n)) / d)
}

/// `C_N = Π_{p|N} Π_{i=1}^n (1 - p^{-2i})` with the bracket `(1/Πζ(2i), 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnConstant {
    #[serde(skip)]
    pub value: BigRational,
    pub lower: f64,
    pub upper: f64,
}

impl CnConstant {
    pub fn within_bounds(&self) -> bool {
        let v = self.value.to_f64().unwrap_or(f64::NAN);
        self.lower < v && v <= self.upper
    }
}

pub fn c_n_constant(level: &LevelProfile, n: usize) -> CnConstant {
    let mut value = BigRational::one();
    for p in level.primes() {
        for i in 1..=n as u32 {
            let q = big_pow(p, 2 * i);
            value *= BigRational::new(&q - BigInt::one(), q);
        }
    }
    CnConstant {
        value,
        lower: 1.0 / zeta_even_product(n),
        upper: 1.0,
    }
}

/// `A_n(N) = 2^{(2n+1) ω(N)}`.
pub fn a_n_constant(level: &LevelProfile, n: usize) -> BigInt {
    BigInt::one() << ((2 * n + 1) * level.omega())
}

/// Smallest `ε` with `2^{ω(N)} ≤ N^ε`.
pub fn omega_exponent(level: &LevelProfile) -> f64 {
    if level.level() <= 1 {
        return 0.0;
    }
    level.omega() as f64 * 2f64.ln() / (level.level() as f64).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OldspaceTerms {
    /// `Σ_{d|N, d≠1} σ_0(d)^n / d^r`.
    #[serde(skip)]
    pub divisor_sum: BigRational,
    /// `Σ_{d|N, d≠1} 1/d^r`.
    #[serde(skip)]
    pub plain_sum: BigRational,
    /// `1/(r - 1)`.
    #[serde(skip)]
    pub integral_bound: BigRational,
    /// `1/(r - n - 1)` from `σ_0(d) ≤ d`, when `r > n + 1`.
    #[serde(skip)]
    pub divisor_bound: Option<BigRational>,
}

impl OldspaceTerms {
    pub fn satisfies_bounds(&self) -> bool {
        self.plain_sum <= self.integral_bound && self.divisor_bound.as_ref().is_none_or(|b| self.divisor_sum <= *b)
    }
}

pub fn oldspace_bound_terms(level: &LevelProfile, n: u32, r: u32) -> Result<OldspaceTerms, CountingError> {
    if r < 2 {
        return Err(CountingError::InvalidExponent(r));
    }
    let mut divisor_sum = BigRational::zero();
    let mut plain_sum = BigRational::zero();
    for d in divisors(level.level()).into_iter().filter(|&d| d != 1) {
        let dr = big_pow(d, r);
        divisor_sum += BigRational::new(big_pow(sigma0(d), n), dr.clone());
        plain_sum += BigRational::new(BigInt::one(), dr);
    }
    let divisor_bound = (r > n + 1).then(|| BigRational::new(BigInt::one(), BigInt::from(r - n - 1)));
    Ok(OldspaceTerms {
        divisor_sum,
        plain_sum,
        integral_bound: BigRational::new(BigInt::one(), BigInt::from(r - 1)),
        divisor_bound,
    })
}

/// Partitions of `m` as nonincreasing part lists.
pub fn partitions(m: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub n: usize,
    pub checked: usize,
    pub failures: Vec<Vec<u32>>,
}

/// Checks `Σ_{i<j} m_i m_j + Σ m_i(m_i - 1)/2 = 2n² + n` over every partition
/// of `2n + 1`.
pub fn partition_flag_identity(n: usize) -> Result<PartitionReport, CountingError> {
    if n < 1 {
        return Err(CountingError::InvalidGenus(1));
    }
    let target = (2 * n * n + n) as u64;
    let parts = partitions(2 * n as u32 + 1);
    let failures: Vec<Vec<u32>> = parts
        .iter()
        .filter(|p| flag_exponent(p) + p.iter().map(|&m| (m as u64) * (m as u64 - 1) / 2).sum::<u64>() != target)
        .cloned()
        .collect();
    Ok(PartitionReport {
        n,
        checked: parts.len(),
        failures,
    })
}

/// `Σ_{i<j} m_i m_j`.
pub fn flag_exponent(parts: &[u32]) -> u64 {
    let mut acc = 0;
    for (i, &a) in parts.iter().enumerate() {
        for &b in &parts[i + 1..] {
            acc += a as u64 * b as u64;
        }
    }
    acc
}

/// Jacobi symbol `(a/n)` for odd positive `n`, by reciprocity.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs odd n");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol by Euler's criterion.
pub fn legendre_euler(a: i64, p: u64) -> i32 {
    let r = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub reason: String,
}

/// `N` is an odd prime, or `N` is odd with at least two prime divisors, all
/// `≡ 1 (mod 4)` and pairwise quadratic residues.
pub fn level_admissible(level: &LevelProfile) -> Admissibility {
    let n = level.level();
    let no = |reason: String| Admissibility {
        admissible: false,
        reason,
    };
    if n < 2 {
        return no(format!("{n} is below 2"));
    }
    if n.is_multiple_of(2) {
        return no(format!("{n} is even"));
    }
    let ps = level.primes();
    if ps.len() == 1 && level.factorization()[0].1 == 1 {
        return Admissibility {
            admissible: true,
            reason: format!("{n} is an odd prime"),
        };
    }
    if ps.len() < 2 {
        return no(format!("{n} is a proper prime power"));
    }
    if let Some(p) = ps.iter().find(|&&p| p % 4 != 1) {
        return no(format!("prime divisor {p} is not 1 mod 4"));
    }
    for &p in &ps {
        for &q in &ps {
            if p != q && jacobi(p as i64, q) != 1 {
                return no(format!("({p}/{q}) = -1"));
            }
        }
    }
    Admissibility {
        admissible: true,
        reason: format!("prime divisors {ps:?} are 1 mod 4 and pairwise residues"),
    }
}

/// Independent check of [`level_admissible`]: trial division and Euler's criterion.
pub fn level_admissible_bruteforce(n: u64) -> bool {
    if n < 2 || n.is_multiple_of(2) {
        return false;
    }
    let mut ps = Vec::new();
    let mut m = n;
    let mut d = 3;
    while d * d <= m {
        if m.is_multiple_of(d) {
            ps.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 2;
    }
    if m > 1 {
        ps.push(m);
    }
    if ps.len() == 1 {
        return is_prime(n);
    }
    ps.iter().all(|&p| p % 4 == 1)
        && ps
            .iter()
            .all(|&p| ps.iter().all(|&q| p == q || legendre_euler(p as i64, q) == 1))
}

/// Main term `C_k C_N N^{2n² + n}` of the dimension formula.
pub fn dim_asymptotic(level: &LevelProfile, n: usize, c_k: f64) -> f64 {
    let cn = c_n_constant(level, n).value.to_f64().unwrap_or(f64::NAN);
    c_k * cn * (level.level() as f64).powi((2 * n * n + n) as i32)
}
