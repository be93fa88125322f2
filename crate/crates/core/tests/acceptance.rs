//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use pvi_core::backlund::heuristic::Candidate;
use pvi_core::experiments::takano::{brute_force_member, case_of, DEFAULT_M};
use pvi_core::experiments::{
    coalescence_flow, domain_membership, gamma_curve, sample_conditioned, sample_state, takano_lambda, takano_qp,
    verify_candidate, verify_isomonodromic, verify_main, CoverPoint, TakanoParams,
};
use pvi_core::fuchsian::coalesce::{d_poly, discriminant, Triple};
use pvi_core::fuchsian::{apparent_obstruction, build_coeff3, build_coeff4};
use pvi_core::hamiltonians::flow::{flow, pvi_residual};
use pvi_core::hamiltonians::{lemma_indep_defect, limit_defect};
use pvi_core::sample::Sampler;
use pvi_core::weyl::theta_of_kappa;
use pvi_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn e(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_ratio(n, d)
}

fn coxeter() -> Outcome {
    let mut s = Sampler::new(101);
    let mut words = Vec::new();
    for i in 0..5 {
        words.push(vec![i, i]);
    }
    for i in 1..5 {
        words.push(vec![0, i, 0, i, 0, i]);
    }
    for i in 1..5 {
        for j in 1..5 {
            if i != j {
                words.push(vec![i, j, i, j]);
            }
        }
    }
    let (mut checked, mut undefined, mut failed) = (0, 0, 0);
    for n in 0..100 {
        let st = ExactState::sample(&mut s, n % 2 == 0);
        for w in &words {
            let word = GroupWord::new(w.clone()).unwrap();
            if st.kappa.apply_word(&word) != st.kappa {
                failed += 1;
            }
            match s_word(&st, &word) {
                Ok(image) if image == st => checked += 1,
                Ok(_) => failed += 1,
                Err(_) => undefined += 1,
            }
        }
    }
    outcome(
        failed == 0 && checked > 0,
        format!("{checked} relations hold exactly, {failed} fail, {undefined} undefined (pole)"),
    )
}

fn theta_invariance() -> Outcome {
    let mut s = Sampler::new(102);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k: [C; 4] = std::array::from_fn(|_| s.complex_in((-1.0, 1.0), (-0.3, 0.3)));
        let kappa = Kappa::new([(C::new(1.0, 0.0) - k[0] - k[1] - k[2] - k[3]) / 2.0, k[0], k[1], k[2], k[3]]).unwrap();
        let w = GroupWord::random(&mut s, 8);
        let d = theta_of_kappa(&kappa.apply_word(&w)).max_abs_diff(&theta_of_kappa(&kappa));
        worst = worst.max(d);
    }
    outcome(worst < 1e-9, format!("max |theta(w k) - theta(k)| = {worst:.2e}"))
}

fn shift_independence() -> Outcome {
    let mut s = Sampler::new(103);
    let (mut pairs, mut failed) = (0, 0);
    for n in 0..20 {
        let st = ExactState::sample(&mut s, n % 2 == 1);
        for i in 0..5 {
            for j in 1..5 {
                let mut values = Vec::new();
                while values.len() < 5 {
                    let moved = match st.with_qp(s.exact(), s.exact_nonzero()) {
                        Ok(m) => m,
                        Err(_) => continue,
                    };
                    if let Ok(v) = lemma_indep_defect(i, j, &moved) {
                        values.push(v);
                    }
                }
                pairs += 1;
                if values.iter().any(|v| v != &values[0]) {
                    failed += 1;
                }
            }
        }
    }
    outcome(failed == 0, format!("{pairs} (i, j) pairs, {failed} depend on (q, p)"))
}

fn apparentness() -> Outcome {
    let mut s = Sampler::new(104);
    let zero = ExactScalar::from_i64(0);
    let (mut checked, mut nonzero, mut control_zero) = (0, 0, 0);
    for _ in 0..50 {
        for infinite in [true, false] {
            let st = ExactState::sample(&mut s, infinite);
            let coeffs = if infinite { build_coeff3(&st) } else { build_coeff4(&st) }.unwrap();
            let at = Extended::Finite(st.q.clone());
            checked += 1;
            if apparent_obstruction(&coeffs, &at, 2).unwrap() != zero {
                nonzero += 1;
            }
            let mut bent = coeffs.clone();
            let last = bent.poles.len() - 1;
            bent.poles[last].c2_first = bent.poles[last].c2_first.clone() + s.exact_nonzero();
            if apparent_obstruction(&bent, &at, 2).unwrap() == zero {
                control_zero += 1;
            }
        }
    }
    outcome(
        nonzero == 0 && control_zero == 0,
        format!("{checked} equations: {nonzero} with a logarithm; perturbed residue left {control_zero} apparent"),
    )
}

/// Action of `s_g` on `(q_i, q_j, p, kappa)` after coalescence (`q_k = q_j`).
fn coalesced_image(
    g: usize,
    triple: Triple,
    qi: &ExactScalar,
    qj: &ExactScalar,
    p: &ExactScalar,
    kap: &ExactKappa,
) -> (ExactScalar, ExactScalar, ExactScalar, ExactKappa) {
    let (i, _, _) = triple.indices();
    let km = kap.get(g).clone();
    let (a, b, pp) = match g {
        0 => (qi.clone() + km.clone() / p.clone(), qj.clone() + km / p.clone(), p.clone()),
        4 => (qi.clone(), qj.clone(), p.clone()),
        m if m == i => (qi.clone(), qj.clone(), p.clone() - km / qi.clone()),
        _ => (qi.clone(), qj.clone(), p.clone() - km / qj.clone()),
    };
    (a, b, pp, kap.reflect(g).unwrap())
}

fn discriminant_invariance() -> Outcome {
    let mut s = Sampler::new(105);
    let triples: Vec<Triple> = [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]
        .iter()
        .map(|&(i, j, k)| Triple::new(i, j, k).unwrap())
        .collect();
    let (mut checked, mut failed, mut undefined) = (0, 0, 0);
    for n in 0..200 {
        let st = ExactState::sample(&mut s, true);
        let triple = triples[n % 6];
        let (i, j, k) = triple.indices();
        let (delta, d) = discriminant(&st, triple).unwrap();
        let tij = st.t.get(i).unwrap().clone() - st.t.get(j).unwrap().clone();
        if d != -(tij * delta) {
            failed += 1;
        }
        let qi = st.q.clone() - st.t.get(i).unwrap().clone();
        let qj = st.q.clone() - st.t.get(j).unwrap().clone();
        for g in 0..5 {
            let (a, b, pp, kk) = coalesced_image(g, triple, &qi, &qj, &st.p, &st.kappa);
            if d_poly(&a, &b, &pp, &kk, triple) == d {
                checked += 1;
            } else {
                failed += 1;
            }
            // The state-level maps agree with the coalesced ones except for
            // s_k, which sees t_k rather than t_j.
            if g != k {
                match s_apply(&st, g).and_then(|im| discriminant(&im, triple)) {
                    Ok((_, d2)) if d2 == d => checked += 1,
                    Ok(_) => failed += 1,
                    Err(_) => undefined += 1,
                }
            }
        }
    }
    // Off the Fuchs locus.
    let four = ExactScalar::from_i64(4);
    let mut off_failed = 0;
    for n in 0..60 {
        let triple = triples[n % 6];
        let kap = Kappa::sample_unchecked(&mut s);
        let eta = kap.fuchs_defect();
        let (qi, qj, p) = (s.exact_nonzero(), s.exact_nonzero(), s.exact_nonzero());
        let d = d_poly(&qi, &qj, &p, &kap, triple);
        for g in 0..5 {
            let km = kap.get(g).clone();
            let expected = match g {
                0 => -(four.clone() * km.clone() * (ExactScalar::from_i64(2) * qj.clone() * p.clone() + km) * eta.clone()
                    / p.clone()),
                4 => ExactScalar::from_i64(0),
                _ => four.clone() * km * qj.clone() * eta.clone(),
            };
            let (a, b, pp, kk) = coalesced_image(g, triple, &qi, &qj, &p, &kap);
            if d_poly(&a, &b, &pp, &kk, triple) - d.clone() != expected {
                off_failed += 1;
            }
        }
    }
    // D = 25 at (q_i, q_j, p) = (1, 2, 1), kappa = (1/2, 0, 0, 0, 0).
    let z = e(0, 1);
    let kappa = Kappa::new([e(1, 2), z.clone(), z.clone(), z.clone(), z]).unwrap();
    let t = TimeConfig::with_infinity([e(2, 1), e(1, 1), e(7, 1)]).unwrap();
    let st = ExactState::new(kappa, t, e(3, 1), e(1, 1)).unwrap();
    let triple = triples[0];
    let before = discriminant(&st, triple).unwrap().1;
    let after = discriminant(&s_apply(&st, 0).unwrap(), triple).unwrap().1;
    let worked = before == e(25, 1) && after == e(25, 1);
    outcome(
        failed == 0 && off_failed == 0 && worked && checked > 0,
        format!(
            "on locus {checked} exact, {failed} fail, {undefined} undefined; off locus {} formulas, {off_failed} fail; D = {} -> {}",
            60 * 5,
            before.to_text(),
            after.to_text()
        ),
    )
}

fn monodromy_certificates() -> Outcome {
    let tol = 1e-9;
    let mut s = Sampler::new(106);
    let (mut det, mut tr, mut prod, mut res) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let (_, r) = sample_conditioned(&mut s, tol);
        det = r.monodromy.det_defects.iter().fold(det, |a, &b| a.max(b));
        tr = r.trace_defects.iter().fold(tr, |a, &b| a.max(b));
        prod = prod.max(r.monodromy.product_defect);
        res = res.max(r.residual).max(r.residual_kappa);
    }
    outcome(
        det < 1e-9 && tr < 1e-6 && prod < 1e-6 && res < 1e-6,
        format!("det {det:.1e}, trace {tr:.1e}, product {prod:.1e}, cubic {res:.1e}"),
    )
}

fn isomonodromy() -> Outcome {
    let tol = 1e-9;
    let mut s = Sampler::new(107);
    let (mut done, mut skipped, mut worst) = (0, Vec::new(), 0.0f64);
    while done < 5 && skipped.len() < 20 {
        let (st, _) = sample_conditioned(&mut s, tol);
        let t3 = st.t.t123()[2];
        match verify_isomonodromic(&st, &[t3, t3 + C::new(1.0, 0.0)], tol) {
            Ok(r) => {
                done += 1;
                worst = worst.max(r.max_defect);
            }
            Err(err) => skipped.push(err.to_string()),
        }
    }
    outcome(
        done == 5 && worst < 1e-6,
        format!("{done} states, max x drift {worst:.1e}, {} flows hit a singularity", skipped.len()),
    )
}

fn x_invariance() -> Outcome {
    let tol = 1e-9;
    let mut s = Sampler::new(108);
    let mut worst = [0.0f64; 5];
    let mut control_min = f64::INFINITY;
    let mut errors = 0;
    for _ in 0..10 {
        let (st, _) = sample_conditioned(&mut s, tol);
        for (g, w) in worst.iter_mut().enumerate() {
            match verify_main(&st, &GroupWord::new(vec![g]).unwrap(), tol) {
                Ok(r) => *w = w.max(r.max_defect),
                Err(_) => errors += 1,
            }
        }
        match verify_candidate(&st, Candidate::Sol2, 1, tol) {
            Ok(r) => control_min = control_min.min(r.max_defect),
            Err(_) => errors += 1,
        }
    }
    let pass = errors == 0 && worst.iter().all(|&w| w < 1e-6) && control_min > 1e-3;
    let parts: Vec<String> = worst.iter().enumerate().map(|(g, w)| format!("s{g} {w:.1e}")).collect();
    outcome(
        pass,
        format!("{}; second candidate min defect {control_min:.2e}; {errors} errors", parts.join(", ")),
    )
}

fn coalescence() -> Outcome {
    let tol = 1e-9;
    let ladder = [1e-1, 1e-2, 1e-3];
    let mut s = Sampler::new(109);
    let (mut scored, mut passed, mut rejected) = (0, 0, Vec::new());
    let mut slopes = Vec::new();
    // Outcome of each draw in order, for the reading "the first five draws".
    let mut draws: Vec<bool> = Vec::new();
    while scored < 5 && rejected.len() < 40 {
        let st = sample_state(&mut s);
        let r = match coalescence_flow(&st, 2, 3, &ladder, tol) {
            Ok(r) => r,
            Err(err) => {
                rejected.push(err.to_string());
                draws.push(false);
                continue;
            }
        };
        if r.rungs.len() < ladder.len() {
            rejected.push(r.stopped.unwrap_or_default());
            draws.push(false);
            continue;
        }
        let exact_ok = r.rungs.iter().all(|g| g.exact_d_identity);
        scored += 1;
        let slope = r.slope.unwrap_or(f64::NAN);
        slopes.push(format!("{slope:.2}"));
        let ok = r.monotone && slope >= 0.5 && exact_ok;
        if ok {
            passed += 1;
        }
        draws.push(ok);
    }
    let first_five = draws.iter().take(5).filter(|&&ok| ok).count();
    let guard = rejected.iter().filter(|m| m.contains("accumulation guard")).count();
    outcome(
        scored == 5 && passed >= 3,
        format!(
            "{passed}/{scored} guard-accepted states decrease with slope >= 0.5 (slopes {}); rejected {} of {} draws ({guard} by the accumulation guard); first five draws: {first_five} pass",
            slopes.join(" "),
            rejected.len(),
            draws.len()
        ),
    )
}

fn takano_params(re_sum: f64) -> TakanoParams {
    let k0 = C::new(0.3, 0.1);
    let k1 = C::new(re_sum / 2.0, 0.3);
    let k2 = C::new(0.1, 0.0);
    let k3 = C::new(re_sum / 2.0, 0.1);
    let k4 = C::new(1.0, 0.0) - 2.0 * k0 - k1 - k2 - k3;
    TakanoParams {
        c1: C::new(0.2, 0.0),
        c2: C::new(0.0, 0.25),
        rho: 0.5,
        rho0: 0.1,
        mu: 1e-3,
        m: DEFAULT_M,
        kappa: Kappa::new([k0, k1, k2, k3, k4]).unwrap(),
    }
}

fn table_one() -> Outcome {
    let mut s = Sampler::new(110);
    let mut mismatches = 0;
    let mut cases = Vec::new();
    let mut members = [0usize; 5];
    for re_sum in [-0.5, 0.0, 0.5, 1.0, 1.5] {
        let params = takano_params(re_sum);
        params.validate().unwrap();
        let case = case_of(takano_lambda(&params));
        cases.push(case);
        for _ in 0..2000 {
            let pt = CoverPoint {
                log_abs: s.uniform(-12.0, 3.0),
                arg: s.uniform(-20.0, 20.0),
            };
            let row = domain_membership(&pt, &params).member;
            if row != brute_force_member(&pt, &params) {
                mismatches += 1;
            }
            if row {
                members[case as usize - 1] += 1;
            }
        }
    }
    cases.sort_unstable();
    let all_cases = cases == [1, 2, 3, 4, 5];
    let (mut curve_pts, mut q_err, mut p_err, mut curve_fail) = (0, 0.0f64, 0.0f64, 0);
    for re_sum in [-0.5, 0.0, 0.5, 1.0, 1.5] {
        let params = takano_params(re_sum);
        let c = (params.c1 * params.c2).norm();
        for pt in gamma_curve(&params, 50, 8.0).unwrap() {
            curve_pts += 1;
            let (q, p) = takano_qp(&pt, &params);
            q_err = q_err.max((q.norm() - params.mu).abs());
            p_err = p_err.max((p.norm() - c / params.mu).abs() / (c / params.mu));
            if !domain_membership(&pt, &params).member || !brute_force_member(&pt, &params) {
                curve_fail += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && all_cases && members.iter().all(|&m| m > 0) && q_err < 1e-12 && curve_fail == 0,
        format!(
            "10000 points, {mismatches} mismatches, members per case {members:?}; {curve_pts} curve points, max ||Q| - mu| {q_err:.1e}, rel |P| err {p_err:.1e}, {curve_fail} outside"
        ),
    )
}

fn limit_ratio() -> Outcome {
    let mut s = Sampler::new(111);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..10 {
        let st = ExactState::sample(&mut s, true);
        for i in 1..=4 {
            let d: Vec<f64> = [100_000i64, 1_000_000, 10_000_000]
                .iter()
                .map(|&t4| {
                    limit_defect(i, &st.q, &st.p, st.t.t123(), &ExactScalar::from_i64(t4), &st.kappa)
                        .unwrap()
                        .to_c64()
                        .norm()
                })
                .collect();
            for w in d.windows(2) {
                let r = w[0] / w[1];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    outcome(lo >= 5.0 && hi <= 20.0, format!("decade ratios in [{lo:.3}, {hi:.3}]"))
}

fn pvi() -> Outcome {
    let tol = 1e-9;
    let mut s = Sampler::new(112);
    let (mut done, mut skipped, mut worst) = (0, 0, 0.0f64);
    while done < 10 && skipped < 20 {
        let st = sample_state(&mut s);
        let t3 = st.t.t123()[2];
        let traj = match flow(&st, 3, &[t3, t3 + C::new(1.0, 0.0)], tol) {
            Ok(tr) => tr,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        worst = worst.max(pvi_residual(&traj, &st.kappa).unwrap());
        done += 1;
    }
    outcome(
        done == 10 && worst < 1e-6,
        format!("{done} trajectories, max defect {worst:.1e}, {skipped} hit a singularity"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("coxeter relations", coxeter, 5),
        ("theta invariance", theta_invariance, 5),
        ("hamiltonian shift independence", shift_independence, 10),
        ("apparent singularity", apparentness, 10),
        ("discriminant invariance", discriminant_invariance, 10),
        ("monodromy certificates", monodromy_certificates, 60),
        ("isomonodromy", isomonodromy, 60),
        ("backlund invariance of x", x_invariance, 120),
        ("coalescence", coalescence, 120),
        ("takano domain", table_one, 10),
        ("t4 limit", limit_ratio, 5),
        ("pvi residual", pvi, 60),
    ];
    let mut failures = 0;
    for (n, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took < Duration::from_secs(*budget);
        let pass = out.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {:>2} {name}: {} ({:.2}s of {budget}s)",
            if pass { "PASS" } else { "FAIL" },
            n + 1,
            out.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
