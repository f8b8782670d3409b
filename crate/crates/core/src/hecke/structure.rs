use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::cosets::{coset_key, coset_reps, CosetList};
use super::{check_prime, double_coset_of, HeckeError, SpCocharacter};
use crate::linalg::smith::rank_mod_p;
use crate::linalg::{mod_p_rank, PLocalMatrix};

/// Finite integer combination of double cosets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HeckeCombination {
    terms: BTreeMap<SpCocharacter, i64>,
}

impl HeckeCombination {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c` to the coefficient of `k`, dropping it if the sum is zero.
    pub fn add(&mut self, k: SpCocharacter, c: i64) {
        let e = self.terms.entry(k.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&k);
        }
    }

    pub fn coefficient(&self, k: &SpCocharacter) -> i64 {
        self.terms.get(k).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpCocharacter, &i64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// The double cosets that can occur in `T(p,(0,...,0,1))^2`: labels of
/// `γ_1, γ_2, γ_3, γ_4` in that order. `γ_2` needs `n >= 2` and is omitted
/// for `n = 1`.
pub fn product_targets(n: usize) -> Vec<SpCocharacter> {
    let with_head = |head: &[u32]| {
        let mut a = head.to_vec();
        a.resize(n, 2);
        SpCocharacter { n, a, similitude: 4 }
    };
    let mut out = vec![with_head(&[0])];
    if n >= 2 {
        out.push(with_head(&[1, 1]));
    }
    out.push(with_head(&[1]));
    out.push(with_head(&[]));
    out
}

/// Number of `β` in the list with `β · p^2 γ^{-1}` integral of rank one mod p.
fn count_for_target(list: &CosetList, target: &SpCocharacter) -> Result<i64, HeckeError> {
    let p = list.prime;
    let scale: Vec<i64> = target.diagonal_exponents().iter().map(|e| 2 - e).collect();
    let x = PLocalMatrix::diagonal_powers(p, &scale)?;
    let hits: Vec<bool> = list
        .reps
        .par_iter()
        .map(|beta| -> Result<bool, HeckeError> {
            let prod = beta.matrix().checked_mul(&x)?;
            if !prod.is_integral() {
                return Ok(false);
            }
            Ok(mod_p_rank(&prod)? == 1)
        })
        .collect::<Result<_, _>>()?;
    Ok(hits.into_iter().filter(|&h| h).count() as i64)
}

/// Coefficients of `T_{p,n-1} · T_{p,n-1}` over its double cosets, counted by
/// the one-sided criterion: `K α β = K γ` has exactly one solution `α` for
/// each `β` with `γ β^{-1}` in the double coset.
pub fn structure_constants(n: usize, p: u64) -> Result<HeckeCombination, HeckeError> {
    check_prime(p)?;
    let list = coset_reps(n, p)?;
    structure_constants_for(&list)
}

pub(crate) fn structure_constants_for(list: &CosetList) -> Result<HeckeCombination, HeckeError> {
    let mut out = HeckeCombination::new();
    for t in product_targets(list.operator.n) {
        let m = count_for_target(list, &t)?;
        out.add(t, m);
    }
    Ok(out)
}

/// Result of the exhaustive `J x J` check.
#[derive(Debug, Clone)]
pub struct PairwiseReport {
    /// `#{(α, β) : K α β = K γ_i}` for each target.
    pub counts: HeckeCombination,
    /// Every double coset met by some product `α β`.
    pub labels_seen: BTreeSet<SpCocharacter>,
}

/// Quadratic cross-check of [`structure_constants`]: runs over all pairs.
pub fn structure_constants_pairwise(n: usize, p: u64) -> Result<PairwiseReport, HeckeError> {
    let list = coset_reps(n, p)?;
    let targets = product_targets(n);
    let target_keys = targets
        .iter()
        .map(|t| coset_key(&t.representative(p)?))
        .collect::<Result<Vec<_>, HeckeError>>()?;
    let partial: Vec<(Vec<i64>, BTreeSet<SpCocharacter>)> = list
        .reps
        .par_iter()
        .map(|alpha| -> Result<_, HeckeError> {
            let mut counts = vec![0i64; targets.len()];
            let mut seen = BTreeSet::new();
            for beta in &list.reps {
                let g = alpha.mul(beta)?;
                seen.insert(double_coset_of(&g)?);
                let key = coset_key(&g)?;
                if let Some(i) = target_keys.iter().position(|k| *k == key) {
                    counts[i] += 1;
                }
            }
            Ok((counts, seen))
        })
        .collect::<Result<_, _>>()?;
    let mut counts = HeckeCombination::new();
    let mut labels_seen = BTreeSet::new();
    for (i, t) in targets.iter().enumerate() {
        counts.add(t.clone(), partial.iter().map(|(c, _)| c[i]).sum());
    }
    for (_, s) in partial {
        labels_seen.extend(s);
    }
    Ok(PairwiseReport { counts, labels_seen })
}

/// Number of rank-one matrices in `S_n(F_p)`: `p^n - 1`.
pub fn rank1_symmetric_count(n: usize, p: u64) -> Result<u64, HeckeError> {
    check_prime(p)?;
    Ok(p.pow(n as u32) - 1)
}

/// Exhaustive count over all of `S_n(F_p)`; limited to `p^{n(n+1)/2} <= 10^6`.
pub fn rank1_symmetric_count_bruteforce(n: usize, p: u64) -> Result<u64, HeckeError> {
    check_prime(p)?;
    let free = n * (n + 1) / 2;
    let total = (p as f64).powi(free as i32);
    if total > 1e6 {
        return Err(HeckeError::TooLarge(format!("{p}^{free} symmetric matrices")));
    }
    let total = p.pow(free as u32);
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let count = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut m = vec![0u64; n * n];
            let mut r = idx;
            for &(i, j) in &slots {
                let v = r % p;
                r /= p;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
            rank_mod_p(&mut m, n, n, p) == 1
        })
        .count();
    Ok(count as u64)
}
