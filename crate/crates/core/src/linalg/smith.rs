use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{pow_big, valuation_of, LinalgError, PLocalMatrix};

/// Valuations of the elementary divisors of `m` over `Z_p`, ascending.
///
/// Fraction-free elimination on `p^e m`: at each step the pivot is the entry
/// of least valuation in the remaining block (first in row-major order on
/// ties). Rows are only ever scaled by p-adic units, so the valuations are
/// preserved.
pub fn smith_valuations(m: &PLocalMatrix) -> Result<Vec<i64>, LinalgError> {
    let p = m.prime();
    let d = m.size();
    let (mut a, shift) = m.cleared();
    let mut rows: Vec<usize> = (0..d).collect();
    let mut cols: Vec<usize> = (0..d).collect();
    let mut out = Vec::with_capacity(d);

    for _ in 0..d {
        let mut best: Option<(u32, usize, usize)> = None;
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                let x = &a[r * d + c];
                if x.is_zero() {
                    continue;
                }
                let v = valuation_of(x, p);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, ri, ci));
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let (v, ri, ci) = best.ok_or(LinalgError::Singular)?;
        out.push(v as i64 - shift as i64);
        let pr = rows.remove(ri);
        let pc = cols.remove(ci);
        let pivot = a[pr * d + pc].clone();
        let pv = pow_big(p, v);
        let unit = &pivot / &pv;
        for &r in &rows {
            let x = a[r * d + pc].clone();
            if x.is_zero() {
                continue;
            }
            let w = &x / &pv;
            for &c in &cols {
                let t = &unit * &a[r * d + c] - &w * &a[pr * d + c];
                a[r * d + c] = t;
            }
            a[r * d + pc] = BigInt::zero();
            strip_unit_content(&mut a, d, r, &cols, p);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Divide row `r` (restricted to `cols`) by the prime-to-p part of its content.
fn strip_unit_content(a: &mut [BigInt], d: usize, r: usize, cols: &[usize], p: u64) {
    let mut g = BigInt::zero();
    for &c in cols {
        g = g.gcd(&a[r * d + c]);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    let pb = BigInt::from(p);
    while (&g % &pb).is_zero() {
        g /= &pb;
    }
    if g.abs().is_one() {
        return;
    }
    for &c in cols {
        a[r * d + c] = &a[r * d + c] / &g;
    }
}

/// Rank of the reduction mod `p`.
pub fn mod_p_rank(m: &PLocalMatrix) -> Result<usize, LinalgError> {
    let p = m.prime();
    let d = m.size();
    let mut a = m.reduce_mod_p()?;
    Ok(rank_mod_p(&mut a, d, d, p))
}

/// Gaussian elimination over `F_p` on a `rows x cols` row-major buffer.
pub(crate) fn rank_mod_p(a: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        for k in 0..cols {
            a.swap(piv * cols + k, rank * cols + k);
        }
        let inv = inv_mod(a[rank * cols + c], p);
        for k in 0..cols {
            a[rank * cols + k] = a[rank * cols + k] * inv % p;
        }
        for r in 0..rows {
            if r == rank || a[r * cols + c] == 0 {
                continue;
            }
            let f = a[r * cols + c];
            for k in 0..cols {
                let sub = f * a[rank * cols + k] % p;
                a[r * cols + k] = (a[r * cols + k] + p - sub) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub(crate) fn inv_mod(x: u64, p: u64) -> u64 {
    let e = BigInt::from(x).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PFrac;

    #[test]
    fn diagonal_valuations() {
        let m = PLocalMatrix::diagonal_powers(3, &[0, 1, 2, 1]).unwrap();
        assert_eq!(smith_valuations(&m).unwrap(), vec![0, 1, 1, 2]);
        let m = PLocalMatrix::identity(5, 3).unwrap();
        assert_eq!(smith_valuations(&m).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn non_diagonal_valuations() {
        // [[3, 1], [0, 3]] has determinant 9 and content 1: divisors 1, 9.
        let m = PLocalMatrix::from_integers(3, 2, &[3, 1, 0, 3]).unwrap();
        assert_eq!(smith_valuations(&m).unwrap(), vec![0, 2]);
        // [[3, 3], [3, -3]]: content 3, determinant -18, so 3 and 6.
        let m = PLocalMatrix::from_integers(3, 2, &[3, 3, 3, -3]).unwrap();
        assert_eq!(smith_valuations(&m).unwrap(), vec![1, 1]);
    }

    #[test]
    fn fractional_valuations() {
        let m = PLocalMatrix::new(
            3,
            2,
            vec![PFrac::raw(1, 2), PFrac::zero(), PFrac::raw(1, 0), PFrac::raw(3, 0)],
        )
        .unwrap();
        assert_eq!(smith_valuations(&m).unwrap(), vec![-2, 1]);
    }

    #[test]
    fn singular_detected() {
        let m = PLocalMatrix::from_integers(3, 2, &[1, 2, 2, 4]).unwrap();
        assert_eq!(smith_valuations(&m), Err(LinalgError::Singular));
    }

    #[test]
    fn ranks() {
        let m = PLocalMatrix::identity(7, 4).unwrap();
        assert_eq!(mod_p_rank(&m).unwrap(), 4);
        assert_eq!(mod_p_rank(&m.scale_pow(1)).unwrap(), 0);
        let b = PLocalMatrix::from_integers(3, 3, &[1, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(mod_p_rank(&b).unwrap(), 1);
        let f = PLocalMatrix::new(3, 1, vec![PFrac::raw(1, 1)]).unwrap();
        assert_eq!(mod_p_rank(&f), Err(LinalgError::NotIntegral));
    }
}
