use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use symplectic_hecke::counting::{
    c_n_constant, jacobi, legendre_euler, oldspace_bound_terms, partial_zeta, zeta, LevelProfile,
};
use symplectic_hecke::hecke::{coset_key, coset_reps, double_coset_of};
use symplectic_hecke::level_density::{d_statistic, TestFunctionPW, ZeroList};
use symplectic_hecke::lfunctions::{
    b_coefficients, b_coefficients_log_derivative, std_local_factor_inverse, std_local_factor_inverse_by_roots,
    zeta_factor_identity_check_exact, RootOfUnityPoint, SatakePoint,
};
use symplectic_hecke::linalg::{is_prime, smith_valuations, symplectic_similitude, GSpElement, PLocalMatrix};
use symplectic_hecke::plancherel::{density, density_from_roots, Place};
use symplectic_hecke::series::{TruncatedSeries, Variable};

const P: u64 = 3;

fn identity(size: usize) -> Vec<i64> {
    let mut m = vec![0; size * size];
    for i in 0..size {
        m[i * size + i] = 1;
    }
    m
}

fn matmul(a: &[i64], b: &[i64], size: usize) -> Vec<i64> {
    let mut c = vec![0; size * size];
    for i in 0..size {
        for k in 0..size {
            let x = a[i * size + k];
            if x != 0 {
                for j in 0..size {
                    c[i * size + j] += x * b[k * size + j];
                }
            }
        }
    }
    c
}

/// One generator of `Sp(2n, Z)`, picked by `kind`.
fn sp_generator(n: usize, kind: u8, i: usize, j: usize, c: i64) -> Vec<i64> {
    let size = 2 * n;
    let mut m = identity(size);
    let (i, j) = (i % n, j % n);
    match kind % 3 {
        // [[I, S], [0, I]] with S = c (E_ij + E_ji), or c E_ii.
        0 => {
            m[i * size + n + j] += c;
            if i != j {
                m[j * size + n + i] += c;
            }
        }
        1 => {
            m[(n + i) * size + j] += c;
            if i != j {
                m[(n + j) * size + i] += c;
            }
        }
        // diag(A, A^{-T}) with A = I + c E_ij.
        _ => {
            if i != j {
                m[i * size + j] = c;
                m[(n + j) * size + n + i] = -c;
            } else {
                // The Weyl element swapping e_i and f_i.
                m[i * size + i] = 0;
                m[(n + i) * size + n + i] = 0;
                m[i * size + n + i] = 1;
                m[(n + i) * size + i] = -1;
            }
        }
    }
    m
}

fn k_element(n: usize, word: &[(u8, usize, usize, i64)]) -> GSpElement {
    let size = 2 * n;
    let mut m = identity(size);
    for &(kind, i, j, c) in word {
        m = matmul(&m, &sp_generator(n, kind, i, j, c), size);
    }
    let pm = PLocalMatrix::from_integers(P, size, &m).unwrap();
    symplectic_similitude(&pm, n).expect("generators are symplectic")
}

fn word() -> impl Strategy<Value = Vec<(u8, usize, usize, i64)>> {
    prop::collection::vec((0u8..3, 0usize..3, 0usize..3, -2i64..=2), 1..6)
}

/// Random element of `GL_m(Z)` from elementary operations.
fn unimodular(m: usize, ops: &[(usize, usize, i64)]) -> Vec<i64> {
    let mut a = identity(m);
    for &(i, j, c) in ops {
        let (i, j) = (i % m, j % m);
        let mut e = identity(m);
        if i == j {
            e[i * m + i] = -1;
        } else {
            e[i * m + j] = c;
        }
        a = matmul(&a, &e, m);
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_valuations_unimodular_invariance(
        entries in prop::collection::vec(-30i64..30, 16),
        left in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
        right in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
    ) {
        let m = PLocalMatrix::from_integers(P, 4, &entries).unwrap();
        let u = unimodular(4, &left);
        let v = unimodular(4, &right);
        let umv = matmul(&matmul(&u, &entries, 4), &v, 4);
        let umv = PLocalMatrix::from_integers(P, 4, &umv).unwrap();
        let a = smith_valuations(&m);
        let b = smith_valuations(&umv);
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn similitude_is_additive(i in 0usize..120, j in 0usize..120, w in word()) {
        let reps = coset_reps(2, P).unwrap().reps;
        let k = k_element(2, &w);
        let g = reps[i].mul(&k).unwrap();
        let h = &reps[j];
        let prod = g.matrix() * h.matrix();
        let cert = symplectic_similitude(&prod, 2).unwrap();
        prop_assert_eq!(cert.similitude_exponent(), g.similitude_exponent() + h.similitude_exponent());
        prop_assert_eq!(k.similitude_exponent(), 0);
    }

    #[test]
    fn coset_key_is_left_k_invariant(i in 0usize..120, w in word()) {
        let g = &coset_reps(2, P).unwrap().reps[i];
        let k = k_element(2, &w);
        prop_assert_eq!(coset_key(&k.mul(g).unwrap()).unwrap(), coset_key(g).unwrap());
    }

    #[test]
    fn double_coset_is_bi_k_invariant(i in 0usize..120, w1 in word(), w2 in word()) {
        let g = &coset_reps(2, P).unwrap().reps[i];
        let kgk = k_element(2, &w1).mul(g).unwrap().mul(&k_element(2, &w2)).unwrap();
        prop_assert_eq!(double_coset_of(&kgk).unwrap(), double_coset_of(g).unwrap());
    }

    #[test]
    fn density_is_permutation_invariant(
        theta in prop::collection::vec(0.0f64..std::f64::consts::PI, 3),
        p in prop::sample::select(vec![3u64, 5, 7, 101]),
    ) {
        let mut rev = theta.clone();
        rev.reverse();
        let mut rot = theta.clone();
        rot.rotate_left(1);
        for place in [Place::Finite(p), Place::Infinity] {
            let d = density(&theta, place);
            prop_assert!((density(&rev, place) - d).abs() <= 1e-12 * d.abs().max(1e-300));
            prop_assert!((density(&rot, place) - d).abs() <= 1e-12 * d.abs().max(1e-300));
            let o = density_from_roots(&theta, place);
            prop_assert!((o - d).abs() <= 1e-9 * d.abs().max(1e-12), "{} vs {}", o, d);
        }
    }

    #[test]
    fn series_inverse_is_two_sided(tail in prop::collection::vec(-5i64..=5, 1..8)) {
        let order = tail.len();
        let mut coeffs = vec![BigRational::from_integer(BigInt::from(1))];
        coeffs.extend(tail.iter().map(|&c| BigRational::from_integer(BigInt::from(c))));
        let f = TruncatedSeries::new(Variable::X, coeffs, order);
        let g = f.inverse().unwrap();
        let one = TruncatedSeries::one(Variable::X, order);
        prop_assert_eq!(f.mul(&g).unwrap(), one.clone());
        prop_assert_eq!(g.mul(&f).unwrap(), one);
    }

    #[test]
    fn local_factor_matches_root_product(theta in prop::collection::vec(0.0f64..std::f64::consts::PI, 1..4)) {
        let s = SatakePoint::new(theta).unwrap();
        let a = std_local_factor_inverse(&s);
        let b = std_local_factor_inverse_by_roots(&s);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let ld = b_coefficients_log_derivative(&s, 6);
        for m in 1..=6 {
            prop_assert!((ld[m - 1] - b_coefficients(&s, m as u32)).abs() < 1e-10);
        }
    }

    #[test]
    fn d_statistic_is_additive(
        a in prop::collection::vec(-20.0f64..20.0, 0..10),
        b in prop::collection::vec(-20.0f64..20.0, 0..10),
        beta in 0.05f64..0.95,
        logc in 0.5f64..20.0,
    ) {
        let f = TestFunctionPW::new(beta).unwrap();
        let za = ZeroList::new(a, logc);
        let zb = ZeroList::new(b, logc);
        let u = za.union(&zb).unwrap();
        let lhs = d_statistic(&u, &f);
        let rhs = d_statistic(&za, &f) + d_statistic(&zb, &f);
        prop_assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
        prop_assert!(za.union(&ZeroList::new(vec![], logc + 1.0)).is_none());
    }

    #[test]
    fn jacobi_matches_euler_criterion(a in -500i64..500, p in 3u64..400) {
        prop_assume!(is_prime(p));
        prop_assert_eq!(jacobi(a, p), legendre_euler(a, p));
    }

    #[test]
    fn partial_zeta_below_zeta(s in 1.05f64..8.0, mask in 0u32..64) {
        let primes: Vec<u64> = [2u64, 3, 5, 7, 11, 13]
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let z = zeta(s).unwrap();
        let zs = partial_zeta(s, &primes).unwrap();
        prop_assert!(zs > 0.0 && zs <= z * (1.0 + 1e-14));
    }

    #[test]
    fn oldspace_and_cn_bounds(level in 2u64..5000, n in 1u32..4, extra in 0u32..5) {
        let l = LevelProfile::new(level).unwrap();
        let r = 2 * n * n + n + extra;
        let t = oldspace_bound_terms(&l, n, r).unwrap();
        prop_assert!(t.satisfies_bounds());
        prop_assert!(!t.plain_sum.is_zero());
        prop_assert!(c_n_constant(&l, n as usize).within_bounds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_identity_on_roots_of_unity(
        fracs in prop::collection::vec((0i64..=8, 1i64..=8), 1..4),
        p in prop::sample::select(vec![3u64, 5, 7]),
    ) {
        let fracs: Vec<(i64, i64)> = fracs.into_iter().map(|(a, b)| (a.min(b), b)).collect();
        let r = RootOfUnityPoint::new(fracs).unwrap();
        prop_assert!(zeta_factor_identity_check_exact(&r, p, 5).unwrap().is_zero());
    }
}
