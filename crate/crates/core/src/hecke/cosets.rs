use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_prime, double_coset_of, HeckeError, SpCocharacter};
use crate::linalg::{pow_big, smith_valuations, symplectic_similitude, GSpElement, PLocalMatrix};

/// Parameters of a representative in the explicit three-type list.
///
/// Vectors hold residues mod `p`, except `b22`, which is a residue mod `p^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type")]
pub enum CosetTag {
    #[serde(rename = "I")]
    TypeI { s: usize, x: Vec<u64> },
    #[serde(rename = "II")]
    TypeII {
        s: usize,
        y: Vec<u64>,
        b21: Vec<u64>,
        b22: u64,
        b23: Vec<u64>,
    },
    /// `b` is the symmetric rank-one matrix, row-major.
    #[serde(rename = "III")]
    TypeIII { b: Vec<u64> },
}

impl CosetTag {
    pub fn type_index(&self) -> usize {
        match self {
            CosetTag::TypeI { .. } => 0,
            CosetTag::TypeII { .. } => 1,
            CosetTag::TypeIII { .. } => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CosetList {
    pub operator: SpCocharacter,
    pub prime: u64,
    pub reps: Vec<GSpElement>,
    pub tags: Vec<CosetTag>,
}

impl CosetList {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Counts of types I, II, III.
    pub fn type_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for t in &self.tags {
            c[t.type_index()] += 1;
        }
        c
    }

    /// True when no two representatives define the same right coset.
    pub fn pairwise_disjoint(&self) -> Result<bool, HeckeError> {
        let keys: Vec<CosetKey> = self.reps.par_iter().map(coset_key).collect::<Result<_, _>>()?;
        let set: HashSet<&CosetKey> = keys.iter().collect();
        Ok(set.len() == keys.len())
    }

    /// True when every representative lies in the declared double coset.
    pub fn labels_match(&self) -> Result<bool, HeckeError> {
        let labels: Vec<SpCocharacter> = self.reps.par_iter().map(double_coset_of).collect::<Result<_, _>>()?;
        Ok(labels.iter().all(|l| *l == self.operator))
    }

    pub fn keys(&self) -> Result<Vec<CosetKey>, HeckeError> {
        self.reps.par_iter().map(coset_key).collect()
    }
}

/// `p * sum_{i<2n} p^i`.
pub fn coset_volume(n: usize, p: u64) -> u64 {
    (0..2 * n as u32).map(|i| p.pow(i)).sum::<u64>() * p
}

fn digits(mut idx: u64, base: u64, len: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(idx % base);
        idx /= base;
    }
    v
}

fn assemble(n: usize, p: u64, a: &[i64], b: &[i64], d: &[i64]) -> Result<GSpElement, HeckeError> {
    let size = 2 * n;
    let mut v = vec![0i64; size * size];
    for i in 0..n {
        for j in 0..n {
            v[i * size + j] = a[i * n + j];
            v[i * size + n + j] = b[i * n + j];
            v[(n + i) * size + n + j] = d[i * n + j];
        }
    }
    let m = PLocalMatrix::from_integers(p, size, &v)?;
    let g = symplectic_similitude(&m, n)?;
    debug_assert_eq!(g.similitude_exponent(), 2);
    Ok(g)
}

fn type_one(n: usize, p: u64, s: usize, x: &[u64]) -> Result<GSpElement, HeckeError> {
    let pi = p as i64;
    let mut a = vec![0i64; n * n];
    let b = vec![0i64; n * n];
    let mut d = vec![0i64; n * n];
    for i in 0..n {
        if i == s {
            a[i * n + i] = pi * pi;
            d[i * n + i] = 1;
        } else {
            a[i * n + i] = pi;
            d[i * n + i] = pi;
        }
    }
    for (k, &xk) in x.iter().enumerate() {
        let j = s + 1 + k;
        a[j * n + s] = -pi * xk as i64;
        d[s * n + j] = xk as i64;
    }
    assemble(n, p, &a, &b, &d)
}

fn type_two(
    n: usize,
    p: u64,
    s: usize,
    y: &[u64],
    b21: &[u64],
    b22: u64,
    b23: &[u64],
) -> Result<GSpElement, HeckeError> {
    let pi = p as i64;
    let mut a = vec![0i64; n * n];
    let mut b = vec![0i64; n * n];
    let mut d = vec![0i64; n * n];
    for i in 0..n {
        a[i * n + i] = if i == s { 1 } else { pi };
        d[i * n + i] = if i == s { pi * pi } else { pi };
    }
    for j in 0..s {
        a[s * n + j] = -(y[j] as i64);
        d[j * n + s] = pi * y[j] as i64;
        b[j * n + s] = pi * b21[j] as i64;
        b[s * n + j] = b21[j] as i64;
    }
    b[s * n + s] = b22 as i64;
    for (k, &c) in b23.iter().enumerate() {
        let j = s + 1 + k;
        b[s * n + j] = c as i64;
        b[j * n + s] = pi * c as i64;
    }
    assemble(n, p, &a, &b, &d)
}

fn type_three(n: usize, p: u64, bmat: &[u64]) -> Result<GSpElement, HeckeError> {
    let pi = p as i64;
    let mut a = vec![0i64; n * n];
    let mut d = vec![0i64; n * n];
    for i in 0..n {
        a[i * n + i] = pi;
        d[i * n + i] = pi;
    }
    let b: Vec<i64> = bmat.iter().map(|&x| x as i64).collect();
    assemble(n, p, &a, &b, &d)
}

/// Rank-one symmetric matrices over `F_p`, as `c v v^T` with `v` having first
/// nonzero entry equal to one and `c` a nonzero scalar.
pub(crate) fn rank_one_symmetric(n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let total = p.pow(n as u32);
    for idx in 1..total {
        let v = digits(idx, p, n);
        let lead = v.iter().position(|&t| t != 0).unwrap_or(0);
        if v[lead] != 1 {
            continue;
        }
        for c in 1..p {
            let mut m = vec![0u64; n * n];
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] = c * v[i] % p * v[j] % p;
                }
            }
            out.push(m);
        }
    }
    out
}

/// Right coset representatives of `K diag(1,p,...,p,p^2,p,...,p) K`.
pub fn coset_reps(n: usize, p: u64) -> Result<CosetList, HeckeError> {
    check_prime(p)?;
    if n == 0 {
        return Err(HeckeError::InvalidGenus);
    }
    let mut tags = Vec::new();
    for s in 0..n {
        let len = n - 1 - s;
        for idx in 0..p.pow(len as u32) {
            tags.push(CosetTag::TypeI {
                s,
                x: digits(idx, p, len),
            });
        }
    }
    for s in 0..n {
        let t = n - 1 - s;
        let ps = p.pow(s as u32);
        for iy in 0..ps {
            for i21 in 0..ps {
                for b22 in 0..p * p {
                    for i23 in 0..p.pow(t as u32) {
                        tags.push(CosetTag::TypeII {
                            s,
                            y: digits(iy, p, s),
                            b21: digits(i21, p, s),
                            b22,
                            b23: digits(i23, p, t),
                        });
                    }
                }
            }
        }
    }
    for b in rank_one_symmetric(n, p) {
        tags.push(CosetTag::TypeIII { b });
    }
    let reps: Vec<GSpElement> = tags
        .par_iter()
        .map(|t| match t {
            CosetTag::TypeI { s, x } => type_one(n, p, *s, x),
            CosetTag::TypeII { s, y, b21, b22, b23 } => type_two(n, p, *s, y, b21, *b22, b23),
            CosetTag::TypeIII { b } => type_three(n, p, b),
        })
        .collect::<Result<_, _>>()?;
    Ok(CosetList {
        operator: SpCocharacter::t_generator(n),
        prime: p,
        reps,
        tags,
    })
}

/// `K α = K β`.
pub fn coset_equal(alpha: &GSpElement, beta: &GSpElement) -> Result<bool, HeckeError> {
    if alpha.similitude_exponent() != beta.similitude_exponent() {
        return Err(HeckeError::SimilitudeMismatch(
            alpha.similitude_exponent(),
            beta.similitude_exponent(),
        ));
    }
    let q = alpha.mul(&beta.inverse())?;
    if !q.matrix().is_integral() {
        return Ok(false);
    }
    Ok(smith_valuations(q.matrix())?.iter().all(|&v| v == 0))
}

/// Canonical invariant of the right coset `K g` for integral `g`: the Hermite
/// normal form of the row lattice of `g`, which contains `p^δ Z^{2n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetKey {
    pub similitude: i64,
    pub hnf: Vec<u64>,
}

fn val_mod(x: i128, p: i128, delta: u32) -> u32 {
    if x == 0 {
        return delta;
    }
    let mut v = 0;
    let mut y = x;
    while v < delta && y % p == 0 {
        y /= p;
        v += 1;
    }
    v
}

fn inv_mod_i128(x: i128, q: i128) -> i128 {
    let e = BigInt::from(x).extended_gcd(&BigInt::from(q));
    e.x.mod_floor(&BigInt::from(q)).to_i128().unwrap_or(0)
}

/// `(q, rows)` for an integral matrix: row-major residues mod `q = p^δ`.
pub(crate) fn residues(m: &PLocalMatrix, delta: u32) -> Result<(i128, Vec<Vec<i128>>), HeckeError> {
    let p = m.prime();
    let qb = pow_big(p, delta);
    let q = qb
        .to_i128()
        .filter(|&q| q < 1i128 << 62)
        .ok_or_else(|| HeckeError::TooLarge(format!("p^{delta} with p = {p}")))?;
    let ints = m.integer_entries().map_err(|_| HeckeError::NotIntegral)?;
    let d = m.size();
    let rows = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| ints[i * d + j].mod_floor(&qb).to_i128().unwrap_or(0))
                .collect()
        })
        .collect();
    Ok((q, rows))
}

/// Hermite normal form of the lattice spanned by `gens` and `q Z^d`, with
/// `q = p^delta`. Rows of the result are upper triangular with diagonal
/// `p^{e_c}`; off-diagonal entries are reduced mod the diagonal of their column.
pub(crate) fn hnf_mod_q(mut gens: Vec<Vec<i128>>, d: usize, p: i128, delta: u32, q: i128) -> Vec<Vec<i128>> {
    let mut piv: Vec<Vec<i128>> = Vec::with_capacity(d);
    let mut exps = Vec::with_capacity(d);
    for c in 0..d {
        gens.retain(|g| g.iter().any(|&x| x != 0));
        let best = gens
            .iter()
            .enumerate()
            .filter(|(_, g)| g[c] != 0)
            .min_by_key(|(i, g)| (val_mod(g[c], p, delta), *i))
            .map(|(i, _)| i);
        let Some(bi) = best else {
            let mut row = vec![0i128; d];
            row[c] = q;
            piv.push(row);
            exps.push(delta);
            continue;
        };
        let mut r = gens.swap_remove(bi);
        let v = val_mod(r[c], p, delta);
        let pv = p.pow(v);
        let u = r[c] / pv;
        let inv = inv_mod_i128(u.rem_euclid(q), q);
        for x in r.iter_mut() {
            *x = (*x * inv).rem_euclid(q);
        }
        for g in gens.iter_mut() {
            if g[c] != 0 {
                let t = g[c] / pv;
                for k in 0..d {
                    g[k] = (g[k] - t * r[k]).rem_euclid(q);
                }
            }
        }
        if v > 0 {
            let f = p.pow(delta - v);
            let h: Vec<i128> = r.iter().map(|&x| (x * f).rem_euclid(q)).collect();
            gens.push(h);
        }
        piv.push(r);
        exps.push(v);
    }
    for c in 0..d {
        piv[c][c] = if exps[c] == delta { q } else { p.pow(exps[c]) };
        for j in c + 1..d {
            if exps[j] == delta {
                continue;
            }
            let t = piv[c][j].div_euclid(p.pow(exps[j]));
            if t == 0 {
                continue;
            }
            let (head, tail) = piv.split_at_mut(j);
            let row = &mut head[c];
            let rj = &tail[0];
            row[j] -= t * rj[j];
            for k in j + 1..d {
                row[k] = (row[k] - t * rj[k]).rem_euclid(q);
            }
        }
    }
    piv
}

pub fn coset_key(g: &GSpElement) -> Result<CosetKey, HeckeError> {
    let delta = g.similitude_exponent();
    if delta < 0 {
        return Err(HeckeError::NotIntegral);
    }
    let (q, rows) = residues(g.matrix(), delta as u32)?;
    let d = g.matrix().size();
    let h = hnf_mod_q(rows, d, g.prime() as i128, delta as u32, q);
    Ok(CosetKey {
        similitude: delta,
        hnf: h.into_iter().flatten().map(|x| x as u64).collect(),
    })
}
