use std::fmt::Display;

use serde::Serialize;
use serde_json::{json, Value};
use symplectic_hecke::counting::{
    a_n_constant, c_n_constant, dim_asymptotic, level_admissible, newform_fraction, oldspace_bound_terms,
    omega_exponent, partial_zeta_bounds_check, partition_flag_identity, zeta_even_product, LevelProfile,
    ZETA_EVEN_PRODUCT_BOUND,
};
use symplectic_hecke::hecke::lattice::{double_coset_degrees, integral_cosets};
use symplectic_hecke::hecke::{
    coset_key, coset_reps, coset_volume, double_coset_of, product_targets, structure_constants,
    structure_constants_pairwise,
};
use symplectic_hecke::level_density::{
    density_integral, one_level_closed_form, symplectic_ensemble, two_level_fourier, vanishing_bound, Scaling,
    TestFunctionPW,
};
use symplectic_hecke::lfunctions::{
    b_coefficients, hecke_series, hecke_series_exact, mu_coefficients, mu_coefficients_exact, mu_relation_residuals,
    mu_relation_residuals_exact, std_local_factor_inverse, std_local_factor_inverse_exact, zeta_factor_identity_check,
    zeta_factor_identity_check_exact, RootOfUnityPoint, SatakePoint,
};
use symplectic_hecke::linalg::is_prime;
use symplectic_hecke::plancherel::{
    ks_statistic_sato_tate_genus_one, sato_tate_sup_distance, OmegaDensity, Place, PlancherelError, QuadratureSpec,
};
use symplectic_hecke::series::{Coefficient, Cyclotomic};
use symplectic_hecke::verify;
use symplectic_hecke::HeckeError;

use crate::args::{
    CosetsArgs, CountingArgs, LevelDensityArgs, LfactorArgs, MeasureArgs, ProductArgs, ScalingArg, VerifyArgs,
};
use crate::output::{fmt_float, fmt_integer, fmt_rational, Output, Table};
use crate::CliError;

fn invalid(e: impl Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn check_odd_prime(p: u64) -> Result<(), CliError> {
    if p == 2 || !is_prime(p) {
        return Err(CliError::Validation(format!("p = {p} must be an odd prime")));
    }
    Ok(())
}

fn hecke_err(e: HeckeError) -> CliError {
    invalid(e)
}

pub fn cosets(a: &CosetsArgs) -> Result<Output, CliError> {
    let list = coset_reps(a.n, a.p).map_err(hecke_err)?;
    let expected = coset_volume(a.n, a.p);
    let [t1, t2, t3] = list.type_counts();
    let disjoint = list.pairwise_disjoint().map_err(hecke_err)?;
    let sc = structure_constants(a.n, a.p).map_err(hecke_err)?;
    let mut table = Table::new(["target", "coefficient"]);
    let mut constants = Vec::new();
    for t in product_targets(a.n) {
        let c = sc.coefficient(&t);
        table.push(vec![t.label(), c.to_string()]);
        constants.push(json!({"target": t.label(), "coefficient": c}));
    }
    let mut ok = list.len() as u64 == expected && disjoint;
    let mut results = json!({
        "operator": list.operator.label(),
        "total": list.len(),
        "expected_total": expected,
        "type_counts": {"I": t1, "II": t2, "III": t3},
        "pairwise_disjoint": disjoint,
        "structure_constants": constants,
    });
    if a.verify_oracle {
        if a.n > 2 {
            return Err(CliError::Validation("the lattice oracle is limited to n <= 2".into()));
        }
        let oracle: std::collections::HashSet<_> = integral_cosets(a.n, a.p, 2, Some(1))
            .map_err(hecke_err)?
            .iter()
            .filter(|g| double_coset_of(g).is_ok_and(|k| k == list.operator))
            .map(coset_key)
            .collect::<Result<_, _>>()
            .map_err(hecke_err)?;
        let ours: std::collections::HashSet<_> = list.keys().map_err(hecke_err)?.into_iter().collect();
        let matches = oracle == ours;
        ok &= matches;
        results["oracle"] = json!({"total": oracle.len(), "matches": matches});
    }
    if let Some(path) = &a.dump_reps {
        let reps: Vec<Value> = list
            .reps
            .iter()
            .zip(&list.tags)
            .map(|(g, tag)| json!({"tag": tag, "matrix": g.matrix().render_rows()}))
            .collect();
        let body = serde_json::to_vec_pretty(&json!({"prime": a.p, "n": a.n, "representatives": reps}))
            .map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(Output::new("cosets", a, results, table).verified(ok))
}

pub fn product(a: &ProductArgs) -> Result<Output, CliError> {
    let sc = structure_constants(a.n, a.p).map_err(hecke_err)?;
    let targets = product_targets(a.n);
    let expected = verify::expected_coefficients(a.n, a.p);
    let pairwise = if a.pairwise {
        Some(structure_constants_pairwise(a.n, a.p).map_err(hecke_err)?)
    } else {
        None
    };
    let degrees = if a.degrees {
        Some(double_coset_degrees(a.n, a.p, 4, Some(1)).map_err(hecke_err)?)
    } else {
        None
    };
    let mut header = vec!["target", "coefficient", "expected"];
    if pairwise.is_some() {
        header.push("pairwise");
    }
    if degrees.is_some() {
        header.push("degree");
    }
    let mut table = Table::new(header);
    let mut rows = Vec::new();
    let mut ok = true;
    for (t, want) in targets.iter().zip(&expected) {
        let c = sc.coefficient(t);
        ok &= c == *want;
        let mut row = vec![t.label(), c.to_string(), want.to_string()];
        let mut entry = json!({"target": t.label(), "coefficient": c, "expected": want});
        if let Some(pw) = &pairwise {
            let v = pw.counts.coefficient(t);
            ok &= v == c;
            row.push(v.to_string());
            entry["pairwise"] = json!(v);
        }
        if let Some(d) = &degrees {
            let v = d.get(t).copied().unwrap_or(0);
            row.push(v.to_string());
            entry["degree"] = json!(v);
        }
        table.push(row);
        rows.push(entry);
    }
    let vol = coset_volume(a.n, a.p) as i128;
    let mut results = json!({"operator": format!("T(p,{})^2", targets[targets.len() - 1].label()), "terms": rows});
    if let Some(pw) = &pairwise {
        let seen: Vec<String> = pw.labels_seen.iter().map(|k| k.label()).collect();
        let only_targets = pw.labels_seen.iter().all(|k| targets.contains(k));
        ok &= only_targets;
        results["labels_seen"] = json!(seen);
    }
    if let Some(d) = &degrees {
        let sum: i128 = targets
            .iter()
            .map(|t| sc.coefficient(t) as i128 * d.get(t).copied().unwrap_or(0) as i128)
            .sum();
        ok &= sum == vol * vol;
        results["degree_balance"] = json!({"sum": sum.to_string(), "volume_squared": (vol * vol).to_string()});
    }
    Ok(Output::new("product", a, results, table).verified(ok))
}

/// `None` for a decimal angle, `Some((a, b))` for `a pi / b`.
fn parse_pi_multiple(token: &str) -> Result<Option<(i64, i64)>, CliError> {
    let t = token.trim().to_ascii_lowercase();
    if !t.contains("pi") {
        return Ok(None);
    }
    let rest = t.replace("pi", "").replace('*', "");
    let (num, den) = rest.split_once('/').unwrap_or((rest.as_str(), "1"));
    let num = if num.is_empty() {
        1
    } else {
        num.parse()
            .map_err(|_| CliError::Validation(format!("cannot parse angle `{token}`")))?
    };
    let den: i64 = den
        .parse()
        .map_err(|_| CliError::Validation(format!("cannot parse angle `{token}`")))?;
    Ok(Some((num, den)))
}

fn real(c: &Cyclotomic) -> f64 {
    c.to_complex().re
}

pub fn lfactor(a: &LfactorArgs) -> Result<Output, CliError> {
    check_odd_prime(a.p)?;
    if a.theta.len() != a.n {
        return Err(CliError::Validation(format!(
            "expected {} angles, got {}",
            a.n,
            a.theta.len()
        )));
    }
    if a.order < 2 {
        return Err(CliError::Validation("order must be at least 2".into()));
    }
    let fracs = a
        .theta
        .iter()
        .map(|t| parse_pi_multiple(t))
        .collect::<Result<Vec<_>, _>>()?;
    let exact = fracs.iter().all(Option::is_some);
    let angles = a
        .theta
        .iter()
        .zip(&fracs)
        .map(|(t, f)| match f {
            Some((num, den)) => Ok(std::f64::consts::PI * *num as f64 / *den as f64),
            None => t
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("cannot parse angle `{t}`"))),
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let s = SatakePoint::new(angles).map_err(invalid)?;
    let b: Vec<f64> = (1..=a.order as u32).map(|m| b_coefficients(&s, m)).collect();
    let mut results;
    let ok;
    if exact {
        let r = RootOfUnityPoint::new(fracs.into_iter().flatten().collect()).map_err(invalid)?;
        let inv = std_local_factor_inverse_exact(&r);
        let af = hecke_series_exact(&r, a.p, a.order).map_err(invalid)?.into_coeffs();
        let mu = mu_coefficients_exact(&r, a.order);
        let bx: Vec<Cyclotomic> = (1..=a.order as i64).map(|m| r.b_coefficient_exact(m)).collect();
        let residual = zeta_factor_identity_check_exact(&r, a.p, a.order).map_err(invalid)?;
        let relations = mu_relation_residuals_exact(&r, a.p);
        ok = num_traits::Zero::is_zero(&residual) && relations.iter().all(Cyclotomic::is_ring_zero);
        let strings = |v: &[Cyclotomic]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        results = json!({
            "mode": "exact",
            "angles": s.angles(),
            "inverse_factor": inv.iter().map(real).collect::<Vec<_>>(),
            "a_F": af.iter().map(real).collect::<Vec<_>>(),
            "mu_F": mu.iter().map(real).collect::<Vec<_>>(),
            "b_F": b,
            "identity_residual": num_traits::ToPrimitive::to_f64(&residual),
            "identity_residual_exact": fmt_rational(&residual),
            "relation_residuals_exact": strings(&relations),
            "exact": {
                "inverse_factor": strings(&inv),
                "a_F": strings(&af),
                "mu_F": strings(&mu),
                "b_F": strings(&bx),
            },
        });
    } else {
        let residual = zeta_factor_identity_check(&s, a.p, a.order).map_err(invalid)?;
        let relations = mu_relation_residuals(&s, a.p);
        ok = residual <= a.tol;
        results = json!({
            "mode": "float",
            "angles": s.angles(),
            "inverse_factor": std_local_factor_inverse(&s),
            "a_F": hecke_series(&s, a.p, a.order).map_err(invalid)?.coeffs(),
            "mu_F": mu_coefficients(&s, a.order),
            "b_F": b,
            "identity_residual": residual,
            "relation_residuals": relations,
        });
    }
    results["identity_ok"] = json!(ok);
    let col = |key: &str, k: usize| -> String {
        results[key]
            .get(k)
            .and_then(Value::as_f64)
            .map(fmt_float)
            .unwrap_or_default()
    };
    let mut table = Table::new(["k", "inverse_factor", "a_F", "mu_F", "b_F"]);
    let len = (2 * a.n + 2).max(a.order + 1);
    for k in 0..len {
        let bk = if k == 0 { String::new() } else { col("b_F", k - 1) };
        table.push(vec![
            k.to_string(),
            col("inverse_factor", k),
            col("a_F", k),
            col("mu_F", k),
            bk,
        ]);
    }
    Ok(Output::new("lfactor", a, results, table).verified(ok))
}

fn parse_place(s: &str) -> Result<Place, CliError> {
    let t = s.trim().to_ascii_lowercase();
    let place = if t == "inf" || t == "infinity" {
        Place::Infinity
    } else {
        Place::Finite(
            t.parse()
                .map_err(|_| CliError::Validation(format!("p must be an odd prime or `inf`, got `{s}`")))?,
        )
    };
    place.checked().map_err(invalid)
}

fn plancherel_err(e: PlancherelError) -> CliError {
    match e {
        PlancherelError::NotConverged { .. } => CliError::Verification(e.to_string()),
        e => invalid(e),
    }
}

pub fn measure(a: &MeasureArgs) -> Result<Output, CliError> {
    let place = parse_place(&a.p)?;
    let quad = QuadratureSpec::new(a.points).map_err(plancherel_err)?;
    let dens = OmegaDensity::new(a.n, place, quad).map_err(plancherel_err)?;
    let mut results = json!({
        "place": place.to_string(),
        "normalization_constant": dens.normalization_constant(),
        "envelope": dens.envelope(),
    });
    let mut table = Table::new(["quantity", "value"]);
    table.push(vec![
        "normalization_constant".into(),
        fmt_float(dens.normalization_constant()),
    ]);

    if let Some(m) = a.moments {
        let stat = move |t: &[f64]| -> f64 {
            let trace = 1.0 + 2.0 * t.iter().map(|x| x.cos()).sum::<f64>();
            match place {
                Place::Finite(p) => (p as f64).powi(t.len() as i32) * trace - 1.0,
                Place::Infinity => trace,
            }
        };
        let moments: Vec<f64> = (1..=m as i32).map(|k| dens.integrate(|t| stat(t).powi(k))).collect();
        results["moments"] = json!({
            "statistic": match place {
                Place::Finite(_) => "a_F(p) = p^n (1 + 2 sum cos theta_i) - 1",
                Place::Infinity => "1 + 2 sum cos theta_i",
            },
            "values": moments,
        });
        if let Place::Finite(p) = place {
            results["moments"]["coset_volume"] = json!(coset_volume(a.n, p));
        }
        table = Table::new(["k", "moment"]);
        for (k, v) in moments.iter().enumerate() {
            table.push(vec![(k + 1).to_string(), fmt_float(*v)]);
        }
    }

    if a.compare_st {
        let mut rows = Vec::new();
        let mut ds = Vec::new();
        table = Table::new(["p", "sup_distance"]);
        for &p in &a.p_list {
            check_odd_prime(p)?;
            let d = sato_tate_sup_distance(a.n, p, a.grid, quad).map_err(plancherel_err)?;
            table.push(vec![p.to_string(), fmt_float(d)]);
            rows.push(json!({"p": p, "sup_distance": d}));
            ds.push(d);
        }
        results["sato_tate"] = json!({
            "grid": a.grid,
            "distances": rows,
            "monotone": ds.windows(2).all(|w| w[1] < w[0]),
        });
    }

    if let Some(count) = a.sample {
        let pts = dens.sample(count, a.seed).map_err(plancherel_err)?;
        let angles: Vec<&[f64]> = pts.iter().map(SatakePoint::angles).collect();
        results["samples"] = json!(angles);
        if a.n == 1 && place == Place::Infinity {
            results["ks_statistic"] = json!(ks_statistic_sato_tate_genus_one(&pts));
        }
        table = Table::new((1..=a.n).map(|i| format!("theta_{i}")));
        for s in &pts {
            table.push(s.angles().iter().map(|x| fmt_float(*x)).collect());
        }
    }
    Ok(Output::new("measure", a, results, table))
}

pub fn leveldensity(a: &LevelDensityArgs) -> Result<Output, CliError> {
    if !(1..=2).contains(&a.ell) {
        return Err(CliError::Validation(format!("ell must be 1 or 2, got {}", a.ell)));
    }
    let betas = match a.beta.len() {
        1 => vec![a.beta[0]; a.ell],
        k if k == a.ell => a.beta.clone(),
        k => {
            return Err(CliError::Validation(format!(
                "expected 1 or {} beta values, got {k}",
                a.ell
            )))
        }
    };
    let fs = betas
        .iter()
        .map(|&b| TestFunctionPW::new(b))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    let integral = density_integral(&fs).map_err(|e| CliError::Verification(e.to_string()))?;
    let mut results = json!({"ell": a.ell, "beta": betas, "integral": integral});
    let mut table = Table::new(["quantity", "value"]);
    table.push(vec!["integral".into(), fmt_float(integral)]);
    if a.ell == 1 {
        let cf = one_level_closed_form(&fs[0]);
        let vb = vanishing_bound(betas[0]).map_err(invalid)?;
        results["closed_form"] = json!(cf);
        results["vanishing_bound"] = json!(vb);
        table.push(vec!["closed_form".into(), fmt_float(cf)]);
        table.push(vec!["vanishing_bound".into(), fmt_float(vb)]);
    } else if betas.iter().sum::<f64>() <= 1.0 {
        let fv = two_level_fourier(&fs[0], &fs[1]).map_err(invalid)?;
        results["fourier_side"] = json!(fv);
        table.push(vec!["fourier_side".into(), fmt_float(fv)]);
    }
    if let Some(dim) = a.ensemble_dim {
        if a.ell != 1 {
            return Err(CliError::Validation(
                "the ensemble is only available for ell = 1".into(),
            ));
        }
        if dim < 2 || dim % 2 == 1 {
            return Err(CliError::Validation(format!(
                "ensemble dimension must be even, got {dim}"
            )));
        }
        let scaling = match a.scaling {
            ScalingArg::Dimension => Scaling::Dimension,
            ScalingArg::DimensionPlusOne => Scaling::DimensionPlusOne,
        };
        let r = symplectic_ensemble(dim / 2, a.trials, &fs[0], a.seed, scaling).map_err(invalid)?;
        let z = (r.mean - r.limit) / r.stderr;
        results["ensemble_mean"] = json!(r.mean);
        results["ensemble_stderr"] = json!(r.stderr);
        results["ensemble_trials"] = json!(r.trials);
        results["ensemble_finite_expectation"] = json!(r.finite_expectation);
        results["ensemble_z_score"] = json!(z);
        for (k, v) in [
            ("ensemble_mean", r.mean),
            ("ensemble_stderr", r.stderr),
            ("ensemble_finite_expectation", r.finite_expectation),
            ("ensemble_z_score", z),
        ] {
            table.push(vec![k.into(), fmt_float(v)]);
        }
    }
    Ok(Output::new("leveldensity", a, results, table))
}

#[derive(Serialize)]
struct ZetaRow {
    s: f64,
    partial: f64,
    full: f64,
    passed: bool,
}

/// Partition counts grow quickly; the identity is enumerated only up to here.
const PARTITION_GENUS_LIMIT: usize = 30;

pub fn counting(a: &CountingArgs) -> Result<Output, CliError> {
    let level = LevelProfile::new(a.level).map_err(invalid)?;
    if a.n == 0 {
        return Err(CliError::Validation("genus must be at least 1".into()));
    }
    let n = a.n;
    let r = a.r.unwrap_or((2 * n * n + n) as u32);
    let cn = c_n_constant(&level, n);
    let an = a_n_constant(&level, n);
    let old = oldspace_bound_terms(&level, n as u32, r).map_err(invalid)?;
    let adm = level_admissible(&level);
    let zprod = zeta_even_product(n);
    let nf = if n >= 2 {
        Some(newform_fraction(n).map_err(invalid)?)
    } else {
        None
    };
    let primes = level.primes();
    let zeta_rows = [1.5, 2.0, 3.0, -1.0, -3.0]
        .iter()
        .map(|&s| {
            let rep = partial_zeta_bounds_check(&primes, s).map_err(invalid)?;
            Ok(ZetaRow {
                s,
                partial: rep.partial,
                full: rep.full,
                passed: rep.passed(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let partitions = if n <= PARTITION_GENUS_LIMIT {
        let rep = partition_flag_identity(n).map_err(invalid)?;
        Some(rep)
    } else {
        None
    };
    let ok = (level.level() == 1 || cn.within_bounds())
        && old.satisfies_bounds()
        && zprod < ZETA_EVEN_PRODUCT_BOUND
        && zeta_rows.iter().all(|z| z.passed)
        && partitions.as_ref().is_none_or(|p| p.failures.is_empty());

    let mut results = json!({
        "N": level.level(),
        "n": n,
        "factorization": level.factorization(),
        "omega": level.omega(),
        "phi": level.phi(),
        "sigma0": level.sigma0(),
        "c_n": {
            "value": fmt_rational(&cn.value),
            "lower": cn.lower,
            "upper": cn.upper,
            "within_bounds": cn.within_bounds(),
        },
        "a_n": fmt_integer(&an),
        "omega_exponent": omega_exponent(&level),
        "oldspace": {
            "r": r,
            "divisor_sum": fmt_rational(&old.divisor_sum),
            "plain_sum": fmt_rational(&old.plain_sum),
            "integral_bound": fmt_rational(&old.integral_bound),
            "divisor_bound": old.divisor_bound.as_ref().map(fmt_rational),
            "satisfies_bounds": old.satisfies_bounds(),
        },
        "zeta_even_product": zprod,
        "zeta_even_product_bound": ZETA_EVEN_PRODUCT_BOUND,
        "newform_fraction": nf,
        "partial_zeta": zeta_rows,
        "partition_identity": partitions,
        "admissibility": adm,
    });
    if let Some(ck) = a.ck {
        if ck.is_nan() || ck <= 0.0 {
            return Err(CliError::Validation("ck must be positive".into()));
        }
        results["dim_asymptotic"] = json!(dim_asymptotic(&level, n, ck));
    }
    let mut table = Table::new(["quantity", "value"]);
    let mut row = |k: &str, v: String| table.push(vec![k.to_string(), v]);
    row("N", level.level().to_string());
    row("n", n.to_string());
    row("c_n", fmt_rational(&cn.value));
    row("c_n_within_bounds", cn.within_bounds().to_string());
    row("a_n", fmt_integer(&an));
    row("omega_exponent", fmt_float(omega_exponent(&level)));
    row("oldspace_divisor_sum", fmt_rational(&old.divisor_sum));
    row("oldspace_integral_bound", fmt_rational(&old.integral_bound));
    row("zeta_even_product", fmt_float(zprod));
    row("newform_fraction", nf.map(fmt_float).unwrap_or_default());
    row("admissible", adm.admissible.to_string());
    row("admissibility_reason", adm.reason.clone());
    Ok(Output::new("counting", a, results, table).verified(ok))
}

pub fn verify(a: &VerifyArgs) -> Result<Output, CliError> {
    let report = if a.quick { verify::quick() } else { verify::full() };
    let mut table = Table::new(["check", "passed", "detail"]);
    for c in &report.checks {
        table.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
    }
    let ok = report.passed();
    let results = json!({
        "suite": if a.quick { "quick" } else { "full" },
        "passed": ok,
        "checks": report.checks,
    });
    Ok(Output::new("verify", a, results, table).verified(ok))
}
