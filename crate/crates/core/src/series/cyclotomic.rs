//! Exact arithmetic in cyclotomic fields `Q(ζ_M)`.
//!
//! An element is a polynomial in `ζ_M` of degree below `φ(M)` with rational
//! coefficients, stored as an integer numerator vector over one positive
//! common denominator. Elements of different orders are lifted to the lcm.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Coefficient;

fn cyclo_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (low to high) of the cyclotomic polynomial `Φ_m`.
pub(crate) fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    assert!(m >= 1);
    if let Some(p) = cyclo_cache().read().expect("cache poisoned").get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut poly = vec![BigInt::zero(); m as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[m as usize] = BigInt::one();
    for d in crate::arith::divisors(m) {
        if d == m {
            continue;
        }
        let f = cyclotomic_polynomial(d);
        poly = exact_div_monic(&poly, &f);
    }
    let arc = Arc::new(poly);
    cyclo_cache().write().expect("cache poisoned").insert(m, arc.clone());
    arc
}

fn exact_div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    q
}

/// Remainder mod the monic `f`, in place.
fn reduce(v: &mut Vec<BigInt>, f: &[BigInt]) {
    let df = f.len() - 1;
    while v.len() > df {
        let c = v.pop().expect("nonempty");
        if c.is_zero() {
            continue;
        }
        let top = v.len();
        for (j, fj) in f[..df].iter().enumerate() {
            v[top - df + j] -= &c * fj;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    fn normalized(order: u64, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        while num.last().is_some_and(Zero::is_zero) {
            num.pop();
        }
        if num.is_empty() {
            return Cyclotomic {
                order,
                num,
                den: BigInt::one(),
            };
        }
        if den.is_negative() {
            den = -den;
            for x in num.iter_mut() {
                *x = -&*x;
            }
        }
        let mut g = den.clone();
        for x in &num {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        if !g.is_one() {
            for x in num.iter_mut() {
                *x = &*x / &g;
            }
            den /= &g;
        }
        Cyclotomic { order, num, den }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::normalized(1, vec![q.numer().clone()], q.denom().clone())
    }

    /// `ζ_m^k` with `ζ_m = exp(2πi/m)`.
    pub fn root_of_unity(m: u64, k: i64) -> Self {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as usize;
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = BigInt::one();
        reduce(&mut v, &cyclotomic_polynomial(m));
        Self::normalized(m, v, BigInt::one())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The same element viewed in `Q(ζ_m)`; `self.order` must divide `m`.
    pub fn lift(&self, m: u64) -> Self {
        if m == self.order {
            return self.clone();
        }
        assert!(m.is_multiple_of(self.order), "cannot lift order {} to {m}", self.order);
        let step = (m / self.order) as usize;
        let mut v = vec![BigInt::zero(); self.num.len().saturating_sub(1) * step + 1];
        for (i, c) in self.num.iter().enumerate() {
            v[i * step] = c.clone();
        }
        reduce(&mut v, &cyclotomic_polynomial(m));
        Self::normalized(m, v, self.den.clone())
    }

    fn common(&self, o: &Self) -> (Self, Self, u64) {
        let m = self.order.lcm(&o.order);
        (self.lift(m), o.lift(m), m)
    }

    /// The rational value if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    /// Value under the standard embedding `ζ_M -> exp(2πi/M)`.
    pub fn to_complex(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.order as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for c in &self.num {
            acc += pw * c.to_f64().unwrap_or(f64::NAN);
            pw *= w;
        }
        acc / self.den.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest absolute coefficient in the power basis.
    pub fn max_abs_coefficient(&self) -> BigRational {
        self.num
            .iter()
            .map(|c| BigRational::new(c.abs(), self.den.clone()))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    fn poly_inverse(&self) -> Option<Self> {
        // Extended Euclid in Q[x] against Φ_M.
        type Poly = Vec<BigRational>;
        fn trim(p: &mut Poly) {
            while p.last().is_some_and(Zero::is_zero) {
                p.pop();
            }
        }
        fn sub_mul(a: &Poly, q: &Poly, b: &Poly) -> Poly {
            let mut out = a.clone();
            let len = q.len() + b.len();
            if out.len() < len {
                out.resize(len, BigRational::zero());
            }
            for (i, qi) in q.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    out[i + j] -= qi * bj;
                }
            }
            trim(&mut out);
            out
        }
        fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
            let mut r = a.clone();
            let db = b.len() - 1;
            if r.len() <= db {
                return (Vec::new(), r);
            }
            let mut q = vec![BigRational::zero(); r.len() - db];
            let lead = b[db].clone();
            for i in (0..q.len()).rev() {
                let c = &r[i + db] / &lead;
                if c.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    r[i + j] -= &c * bj;
                }
                q[i] = c;
            }
            trim(&mut r);
            trim(&mut q);
            (q, r)
        }
        let f: Poly = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let mut a: Poly = self
            .num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect();
        trim(&mut a);
        if a.is_empty() {
            return None;
        }
        let (mut r0, mut r1) = (f, a);
        let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = divmod(&r0, &r1);
            let t2 = sub_mul(&t0, &q, &t1);
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
            if r1.is_empty() {
                return None;
            }
        }
        let c = r1[0].recip();
        let inv: Poly = t1.iter().map(|x| x * &c).collect();
        let den = inv.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num: Vec<BigInt> = inv.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        Some(Self::normalized(self.order, num, den))
    }
}

/// Rationals print as `num/den`; other elements as a polynomial in `z`
/// followed by the order, e.g. `-1/1 + 2/1*z^2 (z = exp(2 pi i/12))`.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{}/{}", q.numer(), q.denom());
        }
        let mut first = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), self.den.clone());
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}/{}", q.numer(), q.denom())?,
                1 => write!(f, "{}/{}*z", q.numer(), q.denom())?,
                _ => write!(f, "{}/{}*z^{k}", q.numer(), q.denom())?,
            }
        }
        write!(f, " (z = exp(2 pi i/{}))", self.order)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, o: &Self) -> bool {
        let (a, b, _) = self.common(o);
        a.num == b.num && a.den == b.den
    }
}

impl Coefficient for Cyclotomic {
    fn ring_zero() -> Self {
        Self::normalized(1, Vec::new(), BigInt::one())
    }
    fn ring_one() -> Self {
        Self::from_i64(1)
    }
    fn from_i64(v: i64) -> Self {
        Self::normalized(1, vec![BigInt::from(v)], BigInt::one())
    }
    fn from_bigint(v: &BigInt) -> Self {
        Self::normalized(1, vec![v.clone()], BigInt::one())
    }
    fn add(&self, o: &Self) -> Self {
        if self.num.is_empty() {
            return o.clone();
        }
        if o.num.is_empty() {
            return self.clone();
        }
        let (a, b, m) = self.common(o);
        let len = a.num.len().max(b.num.len());
        let mut v = vec![BigInt::zero(); len];
        for (i, x) in a.num.iter().enumerate() {
            v[i] += x * &b.den;
        }
        for (i, x) in b.num.iter().enumerate() {
            v[i] += x * &a.den;
        }
        Self::normalized(m, v, &a.den * &b.den)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.num.is_empty() || o.num.is_empty() {
            return Self::ring_zero();
        }
        let (a, b, m) = self.common(o);
        let mut v = vec![BigInt::zero(); a.num.len() + b.num.len() - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        reduce(&mut v, &cyclotomic_polynomial(m));
        Self::normalized(m, v, &a.den * &b.den)
    }
    fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }
    fn is_ring_zero(&self) -> bool {
        self.num.is_empty()
    }
    fn try_inv(&self) -> Option<Self> {
        if self.num.is_empty() {
            return None;
        }
        if self.num.len() == 1 {
            return Some(Self::normalized(
                self.order,
                vec![self.den.clone()],
                self.num[0].clone(),
            ));
        }
        self.poly_inverse()
    }
    fn magnitude(&self) -> f64 {
        self.max_abs_coefficient().to_f64().unwrap_or(f64::INFINITY)
    }
}
