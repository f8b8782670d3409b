//! Brute-force enumeration of right cosets `K g`, `g` integral with similitude
//! `p^δ`, used as an oracle for the explicit representative lists.
//!
//! Every such coset has a unique representative
//! `[[p^δ D^{-T}, T D], [0, D]]` with `D` in row Hermite normal form and
//! `T = T'/p^δ`, `T'` symmetric mod `p^δ` with `T' D ≡ 0 (mod p^δ)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{check_prime, double_coset_of, HeckeError, SpCocharacter};
use crate::linalg::smith::rank_mod_p;
use crate::linalg::{smith_valuations, symplectic_similitude, GSpElement, PLocalMatrix};

fn upper_hnfs(n: usize, p: i128, delta: u32) -> Vec<(Vec<u32>, Vec<i128>)> {
    let mut out = Vec::new();
    let combos = (delta as usize + 1).pow(n as u32);
    for idx in 0..combos {
        let mut e = Vec::with_capacity(n);
        let mut r = idx;
        for _ in 0..n {
            e.push((r % (delta as usize + 1)) as u32);
            r /= delta as usize + 1;
        }
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let ranges: Vec<i128> = slots.iter().map(|&(_, j)| p.pow(e[j])).collect();
        let total: i128 = ranges.iter().product();
        for k in 0..total {
            let mut d = vec![0i128; n * n];
            for i in 0..n {
                d[i * n + i] = p.pow(e[i]);
            }
            let mut r = k;
            for (s, &(i, j)) in slots.iter().enumerate() {
                d[i * n + j] = r % ranges[s];
                r /= ranges[s];
            }
            out.push((e.clone(), d));
        }
    }
    out
}

/// All symmetric `T'` mod `q` with `T' D ≡ 0`. Entries are assigned column by
/// column; each new entry solves one linear congruence.
fn symmetric_annihilators(n: usize, d: &[i128], exps: &[u32], p: i128, delta: u32, q: i128) -> Vec<Vec<i128>> {
    let mut out = Vec::new();
    let mut t = vec![0i128; n * n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        j: usize,
        i: usize,
        n: usize,
        d: &[i128],
        exps: &[u32],
        p: i128,
        delta: u32,
        q: i128,
        t: &mut Vec<i128>,
        out: &mut Vec<Vec<i128>>,
    ) {
        if j == n {
            out.push(t.clone());
            return;
        }
        if i == n {
            rec(j + 1, j + 1, n, d, exps, p, delta, q, t, out);
            return;
        }
        if i == j {
            for r in 0..j {
                let mut c = 0i128;
                for k in 0..=j {
                    c += t[r * n + k] * d[k * n + j];
                }
                if c.rem_euclid(q) != 0 {
                    return;
                }
            }
        }
        let mut c = 0i128;
        for k in 0..j {
            c += t[i * n + k] * d[k * n + j];
        }
        let c = c.rem_euclid(q);
        let pe = p.pow(exps[j]);
        if c % pe != 0 {
            return;
        }
        let step = p.pow(delta - exps[j]);
        let t0 = (-(c / pe)).rem_euclid(step);
        for m in 0..pe {
            let v = t0 + m * step;
            t[i * n + j] = v;
            t[j * n + i] = v;
            rec(j, i + 1, n, d, exps, p, delta, q, t, out);
        }
        t[i * n + j] = 0;
        t[j * n + i] = 0;
    }
    rec(0, 0, n, d, exps, p, delta, q, &mut t, &mut out);
    out
}

fn inverse_transpose_scaled(n: usize, d: &[i128], q: i128) -> Option<Vec<i128>> {
    // Back substitution for q D^{-1} of the upper triangular D.
    let mut inv = vec![0i128; n * n];
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = if i == col { q } else { 0 };
            for k in i + 1..n {
                s -= d[i * n + k] * inv[k * n + col];
            }
            if s % d[i * n + i] != 0 {
                return None;
            }
            inv[i * n + col] = s / d[i * n + i];
        }
    }
    let mut tr = vec![0i128; n * n];
    for i in 0..n {
        for j in 0..n {
            tr[i * n + j] = inv[j * n + i];
        }
    }
    Some(tr)
}

fn visit_cosets<R: Send>(
    n: usize,
    p: u64,
    delta: u32,
    max_rank: Option<usize>,
    init: impl Fn() -> R + Sync,
    visit: impl Fn(&mut R, GSpElement) -> Result<(), HeckeError> + Sync,
) -> Result<Vec<R>, HeckeError> {
    check_prime(p)?;
    if n == 0 {
        return Err(HeckeError::InvalidGenus);
    }
    let pi = p as i128;
    let q = pi
        .checked_pow(delta)
        .filter(|&q| q < 1i128 << 40)
        .ok_or_else(|| HeckeError::TooLarge(format!("p^{delta}")))?;
    let ds = upper_hnfs(n, pi, delta);
    let size = 2 * n;
    ds.par_iter()
        .map(|(exps, d)| -> Result<R, HeckeError> {
            let mut acc = init();
            let Some(a) = inverse_transpose_scaled(n, d, q) else {
                return Ok(acc);
            };
            if let Some(mr) = max_rank {
                let mut am: Vec<u64> = a.iter().map(|&x| x.rem_euclid(pi) as u64).collect();
                let mut dm: Vec<u64> = d.iter().map(|&x| x.rem_euclid(pi) as u64).collect();
                if rank_mod_p(&mut am, n, n, p) + rank_mod_p(&mut dm, n, n, p) > mr {
                    return Ok(acc);
                }
            }
            for tp in symmetric_annihilators(n, d, exps, pi, delta, q) {
                let mut v = vec![BigInt::from(0); size * size];
                let mut red = vec![0u64; size * size];
                for i in 0..n {
                    for j in 0..n {
                        let mut b = 0i128;
                        for k in 0..n {
                            b += tp[i * n + k] * d[k * n + j];
                        }
                        debug_assert_eq!(b % q, 0);
                        let b = b / q;
                        v[i * size + j] = BigInt::from(a[i * n + j]);
                        v[i * size + n + j] = BigInt::from(b);
                        v[(n + i) * size + n + j] = BigInt::from(d[i * n + j]);
                        red[i * size + j] = a[i * n + j].rem_euclid(pi) as u64;
                        red[i * size + n + j] = b.rem_euclid(pi) as u64;
                        red[(n + i) * size + n + j] = d[i * n + j].rem_euclid(pi) as u64;
                    }
                }
                if let Some(mr) = max_rank {
                    if rank_mod_p(&mut red, size, size, p) > mr {
                        continue;
                    }
                }
                let m = PLocalMatrix::from_bigints(p, size, v)?;
                let g = symplectic_similitude(&m, n)?;
                debug_assert_eq!(g.similitude_exponent(), delta as i64);
                visit(&mut acc, g)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Right cosets `K g` with `g` integral of similitude `p^δ` and mod-p rank at
/// most `max_rank` (all of them when `None`).
pub fn integral_cosets(n: usize, p: u64, delta: u32, max_rank: Option<usize>) -> Result<Vec<GSpElement>, HeckeError> {
    let parts = visit_cosets(n, p, delta, max_rank, Vec::new, |acc, g| {
        acc.push(g);
        Ok(())
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Number of right cosets in each double coset met by [`integral_cosets`].
pub fn double_coset_degrees(
    n: usize,
    p: u64,
    delta: u32,
    max_rank: Option<usize>,
) -> Result<BTreeMap<SpCocharacter, u64>, HeckeError> {
    let parts = visit_cosets(n, p, delta, max_rank, BTreeMap::new, |acc, g| {
        *acc.entry(double_coset_of(&g)?).or_insert(0u64) += 1;
        Ok(())
    })?;
    let mut out = BTreeMap::new();
    for part in parts {
        for (k, v) in part {
            *out.entry(k).or_insert(0) += v;
        }
    }
    Ok(out)
}

/// Sublattices of `Z^2` with quotient cyclic of order `p^2`; these are the
/// vertices at distance two from the base vertex of the Bruhat-Tits tree.
pub fn tree_distance_two_count(p: u64) -> Result<u64, HeckeError> {
    check_prime(p)?;
    let mut count = 0u64;
    for ea in 0..=2u32 {
        let a = p.pow(ea);
        let d = p.pow(2 - ea);
        for b in 0..d {
            let m = PLocalMatrix::from_integers(p, 2, &[a as i64, b as i64, 0, d as i64])?;
            if smith_valuations(&m)? == vec![0, 2] {
                count += 1;
            }
        }
    }
    Ok(count)
}
