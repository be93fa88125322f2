use pvi_core::ApproxScalar as C;
use serde_json::{json, Value};

use pvi_core::backlund::heuristic::{e02_condition, ee_condition, heuristic_e, heuristic_solve};
use pvi_core::experiments::coalescence::{ACCUMULATION_GUARD, DRIFT_THRESHOLD};
use pvi_core::experiments::takano::{brute_force_member, case_of, DEFAULT_M};
use pvi_core::experiments::{
    coalescence_flow, domain_membership, gamma_curve, sample_conditioned, sample_state, takano_lambda, takano_qp,
    verify_candidate, verify_isomonodromic, verify_main, CoverPoint, TakanoParams, X_DEFECT_THRESHOLD,
};
use pvi_core::fuchsian::coalesce::{coalesce, discriminant, predicted_trace, Triple};
use pvi_core::fuchsian::{apparent_obstruction, build_coeff3, build_coeff4, normalize3};
use pvi_core::hamiltonians::flow::{flow, pvi_residual};
use pvi_core::hamiltonians::hamiltonian_of_state;
use pvi_core::json::{coeffs_to_json, kappa_to_json, state_to_json, theta_to_json, AnyState};
use pvi_core::monodromy::rh_map;
use pvi_core::sample::Sampler;
use pvi_core::weyl::theta_of_kappa;
use pvi_core::{s_word, ApproxScalar, Error, Extended, ExtendedState, FieldKind, GroupWord, Kappa, Scalar};

use crate::report::{Output, Report};
use crate::{BacklundCmd, Command, Common, FlowCmd, FuchsianCmd, HamCmd, RhCmd, VerifyCmd, WeylCmd};

type Res<T> = Result<T, String>;

fn core<T>(r: pvi_core::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

pub fn run(common: &Common, cmd: &Command) -> Res<Output> {
    if !(1e-14..=1e-2).contains(&common.tol) {
        return Err(format!("--tol {} outside [1e-14, 1e-2]", common.tol));
    }
    match cmd {
        Command::Weyl(WeylCmd::Apply { word }) => weyl_apply(common, word),
        Command::Theta => theta(common),
        Command::Backlund(BacklundCmd::Apply { word }) => backlund_apply(common, word),
        Command::Backlund(BacklundCmd::Heuristic { i, j, k }) => backlund_heuristic(common, *i, *j, *k),
        Command::Ham(HamCmd::Eval) => ham_eval(common),
        Command::Flow(FlowCmd::Run { moving, to }) => flow_run(common, *moving, to),
        Command::Fuchsian(FuchsianCmd::Build { normalize }) => fuchsian_build(common, *normalize),
        Command::Coalesce { j, k } => coalesce_cmd(common, *j, *k),
        Command::Rh(RhCmd::Compute) => rh_compute(common),
        Command::Verify(v) => match v {
            VerifyCmd::Main { gens, n } => verify_main_cmd(common, gens, *n),
            VerifyCmd::Isomono { n, length } => verify_isomono(common, *n, *length),
            VerifyCmd::Coalesce {
                n,
                j,
                k,
                ladder,
                min_pass,
                max_rejected,
            } => verify_coalesce(common, *n, *j, *k, ladder, *min_pass, *max_rejected),
            VerifyCmd::Takano { points, curve_points } => verify_takano(common, *points, *curve_points),
        },
    }
}

fn plain(common: &Common, command: &str, body: Value) -> Output {
    let mut r = Report::new(command, "none", common);
    r.set("result", body);
    r.finish(common, None, None)
}

enum AnyKappa {
    Exact(Kappa<pvi_core::ExactScalar>),
    Approx(Kappa<ApproxScalar>),
}

fn literals(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).collect()
}

fn parse_kappa(common: &Common) -> Res<AnyKappa> {
    let text = common.kappa.as_deref().ok_or("--kappa is required")?;
    let lits = literals(text);
    if lits.len() != 5 {
        return Err(format!("--kappa needs 5 comma-separated values, got {}", lits.len()));
    }
    let field = match common.field {
        Some(f) => f,
        None => core(FieldKind::classify(lits.iter().copied()))?,
    };
    fn read<S: Scalar>(lits: &[&str]) -> pvi_core::Result<Kappa<S>> {
        let v: Vec<S> = lits.iter().map(|l| S::parse_text(l)).collect::<pvi_core::Result<_>>()?;
        Kappa::new(v.try_into().expect("five entries"))
    }
    Ok(match field {
        FieldKind::Exact => AnyKappa::Exact(core(read(&lits))?),
        FieldKind::Approx => AnyKappa::Approx(core(read(&lits))?),
    })
}

fn load_state(common: &Common) -> Res<AnyState> {
    let path = common.state.as_ref().ok_or("--state is required")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = core(AnyState::parse(&text))?;
    if let Some(f) = common.field {
        if f != doc.field() {
            return Err(format!("--field {f} disagrees with the state document ({})", doc.field()));
        }
    }
    Ok(doc)
}

fn parse_word(word: &str) -> Res<GroupWord> {
    core(GroupWord::parse(word))
}

fn weyl_apply(common: &Common, word: &str) -> Res<Output> {
    let w = parse_word(word)?;
    let body = match parse_kappa(common)? {
        AnyKappa::Exact(k) => kappa_to_json(&k.apply_word(&w)),
        AnyKappa::Approx(k) => kappa_to_json(&k.apply_word(&w)),
    };
    Ok(plain(common, "weyl apply", json!({"word": w.to_string(), "kappa": body})))
}

fn theta(common: &Common) -> Res<Output> {
    let k = match parse_kappa(common)? {
        AnyKappa::Exact(k) => k.to_c64(),
        AnyKappa::Approx(k) => k,
    };
    Ok(plain(common, "theta", json!({"theta": theta_to_json(&theta_of_kappa(&k))})))
}

fn backlund_apply(common: &Common, word: &str) -> Res<Output> {
    let w = parse_word(word)?;
    let doc = load_state(common)?;
    let out = match &doc {
        AnyState::Exact(s) => AnyState::Exact(core(s_word(s, &w))?),
        AnyState::Approx(s) => AnyState::Approx(core(s_word(s, &w))?),
    };
    let mut r = Report::new("backlund apply", "none", common);
    r.merge(out.to_json());
    r.set("word", w.to_string());
    Ok(r.finish(common, None, None))
}

fn heuristic_body<S: Scalar>(st: &ExtendedState<S>, triple: Triple) -> pvi_core::Result<Value> {
    let mut cands = Vec::new();
    let (i, _, _) = triple.indices();
    for c in heuristic_solve() {
        let (bq, bp) = c.apply(&st.q, &st.p, &st.kappa, i)?;
        let e = heuristic_e(&bq, &bp, &st.q, &st.p, &st.kappa, triple)?;
        let table: Vec<Vec<String>> = e.coeffs.iter().map(|row| row.iter().map(|z| z.to_text()).collect()).collect();
        cands.push(json!({
            "candidate": format!("{c:?}"),
            "Q": bq.to_text(),
            "P": bp.to_text(),
            "coefficients": table,
            "vanishes": e.is_identically_zero(1e-10),
        }));
    }
    Ok(json!({
        "triple": [triple.indices().0, triple.indices().1, triple.indices().2],
        "candidates": cands,
        "e02_condition": e02_condition(&st.kappa, triple).to_text(),
        "ee_condition": ee_condition(&st.kappa, triple).to_text(),
    }))
}

fn backlund_heuristic(common: &Common, i: usize, j: usize, k: usize) -> Res<Output> {
    let triple = core(Triple::new(i, j, k))?;
    let body = match load_state(common)? {
        AnyState::Exact(s) => core(heuristic_body(&s, triple))?,
        AnyState::Approx(s) => core(heuristic_body(&s, triple))?,
    };
    Ok(plain(common, "backlund heuristic", body))
}

fn ham_body<S: Scalar>(st: &ExtendedState<S>) -> pvi_core::Result<Value> {
    let mut m = serde_json::Map::new();
    for j in 1..=4 {
        let h = hamiltonian_of_state(j, st)?;
        m.insert(h.which.to_string(), h.value.to_text().into());
    }
    Ok(Value::Object(m))
}

fn ham_eval(common: &Common) -> Res<Output> {
    let body = match load_state(common)? {
        AnyState::Exact(s) => core(ham_body(&s))?,
        AnyState::Approx(s) => core(ham_body(&s))?,
    };
    Ok(plain(common, "ham eval", body))
}

fn flow_run(common: &Common, moving: usize, to: &str) -> Res<Output> {
    let st = load_state(common)?.to_c64();
    let target = core(ApproxScalar::parse_text(to))?;
    let from = *st.t.get(moving).ok_or(format!("t{moving} is not a finite moving point"))?;
    let traj = core(flow(&st, moving, &[from, target], common.tol))?;
    let end = core(traj.end_state(&st))?;
    let mut r = Report::new("flow run", "none", common);
    r.set("meta", traj.meta_json());
    r.set("end_state", state_to_json(&end, FieldKind::Approx));
    let t = st.t.t123();
    if moving == 3 && t[0] == C::new(0.0, 0.0) && t[1] == C::new(1.0, 0.0) {
        r.set("pvi_residual", core(pvi_residual(&traj, &st.kappa))?);
    }
    Ok(r.finish(common, None, Some(traj.to_csv())))
}

fn fuchsian_body<S: Scalar>(st: &ExtendedState<S>, field: FieldKind, normalize: bool) -> pvi_core::Result<Value> {
    let coeffs = match st.t.t4() {
        Extended::Infinity => build_coeff3(st)?,
        Extended::Finite(_) => build_coeff4(st)?,
    };
    let obstruction = apparent_obstruction(&coeffs, &Extended::Finite(st.q.clone()), 2)?;
    let shown = if normalize {
        if !st.t.t4().is_infinite() {
            return Err(Error::FiniteT4);
        }
        normalize3(&coeffs, st)
    } else {
        coeffs
    };
    Ok(json!({
        "coeffs": coeffs_to_json(&shown, field),
        "normalized": normalize,
        "obstruction_at_q": obstruction.to_text(),
    }))
}

fn fuchsian_build(common: &Common, normalize: bool) -> Res<Output> {
    let doc = load_state(common)?;
    let body = match &doc {
        AnyState::Exact(s) => core(fuchsian_body(s, FieldKind::Exact, normalize))?,
        AnyState::Approx(s) => core(fuchsian_body(s, FieldKind::Approx, normalize))?,
    };
    Ok(plain(common, "fuchsian build", body))
}

fn coalesce_body<S: Scalar>(st: &ExtendedState<S>, field: FieldKind, triple: Triple) -> pvi_core::Result<Value> {
    let c = coalesce(st, triple)?;
    let (delta, d) = discriminant(st, triple)?;
    let pred = predicted_trace(delta.to_c64());
    Ok(json!({
        "triple": [triple.indices().0, triple.indices().1, triple.indices().2],
        "coeffs": coeffs_to_json(&c.w, field),
        "L": c.l.to_text(),
        "M": c.m.to_text(),
        "N": c.n.to_text(),
        "delta": delta.to_text(),
        "D": d.to_text(),
        "predicted_trace": [pred.re, pred.im],
    }))
}

fn coalesce_cmd(common: &Common, j: usize, k: usize) -> Res<Output> {
    let triple = core(Triple::merging(j, k))?;
    let body = match load_state(common)? {
        AnyState::Exact(s) => core(coalesce_body(&s, FieldKind::Exact, triple))?,
        AnyState::Approx(s) => core(coalesce_body(&s, FieldKind::Approx, triple))?,
    };
    Ok(plain(common, "coalesce", body))
}

fn rh_compute(common: &Common) -> Res<Output> {
    let st = load_state(common)?.to_c64();
    let r = core(rh_map(&st, common.tol))?;
    let mut rep = Report::new("rh compute", "riemann-hilbert-map", common);
    rep.set("a", json!(r.coords.a));
    rep.set("x", json!(r.coords.x));
    rep.set("theta", json!(r.coords.theta.th));
    rep.set("residual", r.residual);
    rep.set(
        "certificates",
        json!({
            "det_defects": r.monodromy.det_defects,
            "product_defect": r.monodromy.product_defect,
            "gamma4_agreement": r.monodromy.gamma4_agreement,
            "trace_defects": r.trace_defects,
            "residual_kappa": r.residual_kappa,
            "base_point": r.monodromy.base_point,
            "order": r.monodromy.order,
            "guard": r.monodromy.guard,
        }),
    );
    rep.set("monodromy", json!(r.monodromy.matrices));
    Ok(rep.finish(common, None, None))
}

/// Sampled states, or the single `--state` when given.
fn states(common: &Common, n: usize) -> Res<Vec<ExtendedState<C>>> {
    if common.state.is_some() {
        return Ok(vec![load_state(common)?.to_c64()]);
    }
    let mut s = Sampler::new(common.seed);
    Ok((0..n).map(|_| sample_conditioned(&mut s, common.tol).0).collect())
}

fn verify_main_cmd(common: &Common, gens: &str, n: usize) -> Res<Output> {
    let gens: Vec<usize> = literals(gens)
        .iter()
        .map(|g| g.parse::<usize>().map_err(|e| format!("--gens `{g}`: {e}")))
        .collect::<Res<_>>()?;
    let words: Vec<GroupWord> = gens.iter().map(|&g| core(GroupWord::new(vec![g]))).collect::<Res<_>>()?;
    let mut cases = Vec::new();
    let mut worst = 0.0f64;
    let mut control_min = f64::INFINITY;
    let mut pass = true;
    for st in states(common, n)? {
        let mut row = Vec::new();
        for w in &words {
            let r = core(verify_main(&st, w, common.tol))?;
            worst = worst.max(r.max_defect);
            pass &= r.pass;
            row.push(json!(r));
        }
        let control = core(verify_candidate(&st, pvi_core::backlund::heuristic::Candidate::Sol2, 1, common.tol))?;
        control_min = control_min.min(control.max_defect);
        cases.push(json!({"state": state_to_json(&st, FieldKind::Approx), "checks": row, "negative_control": control}));
    }
    let control_pass = control_min > 1e-3;
    let mut r = Report::new("verify main", "x-invariance-under-backlund", common);
    r.set("threshold", X_DEFECT_THRESHOLD);
    r.set("max_defect", worst);
    r.set(
        "negative_control",
        json!({"candidate": "Sol2", "min_defect": control_min, "must_exceed": 1e-3, "pass": control_pass}),
    );
    r.set("cases", cases);
    Ok(r.finish(common, Some(pass && control_pass), None))
}

fn verify_isomono(common: &Common, n: usize, length: f64) -> Res<Output> {
    let mut cases = Vec::new();
    let mut worst = 0.0f64;
    let mut pass = true;
    for st in states(common, n)? {
        let t3 = st.t.t123()[2];
        let rep = core(verify_isomonodromic(&st, &[t3, t3 + C::new(length, 0.0)], common.tol))?;
        worst = worst.max(rep.max_defect);
        pass &= rep.pass;
        cases.push(json!({"state": state_to_json(&st, FieldKind::Approx), "report": rep}));
    }
    let mut r = Report::new("verify isomono", "isomonodromy", common);
    r.set("threshold", X_DEFECT_THRESHOLD);
    r.set("max_defect", worst);
    r.set("cases", cases);
    Ok(r.finish(common, Some(pass), None))
}

fn verify_coalesce(
    common: &Common,
    n: usize,
    j: usize,
    k: usize,
    ladder: &str,
    min_pass: usize,
    max_rejected: usize,
) -> Res<Output> {
    let ladder: Vec<f64> = literals(ladder)
        .iter()
        .map(|e| e.parse::<f64>().map_err(|err| format!("--ladder `{e}`: {err}")))
        .collect::<Res<_>>()?;
    let mut sampler = Sampler::new(common.seed);
    let single = if common.state.is_some() { Some(load_state(common)?.to_c64()) } else { None };
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    let mut csv = String::from("state,epsilon,re_delta,im_delta,re_x,im_x,difference,isomonodromy_defect,exact_d_identity\n");
    let mut passed = 0;
    let mut draws = 0;
    while accepted.len() < n && rejected.len() < max_rejected {
        let st = match &single {
            Some(s) if draws == 0 => s.clone(),
            Some(_) => break,
            None => sample_state(&mut sampler),
        };
        draws += 1;
        let rep = match coalescence_flow(&st, j, k, &ladder, common.tol) {
            Ok(r) if r.rungs.len() == ladder.len() => r,
            Ok(r) => {
                rejected.push(json!({"draw": draws - 1, "reason": r.stopped, "rungs": r.rungs}));
                continue;
            }
            Err(e) => {
                rejected.push(json!({"draw": draws - 1, "reason": e.to_string()}));
                continue;
            }
        };
        let ok = rep.monotone && rep.slope.is_some_and(|s| s >= 0.5) && rep.rungs.iter().all(|g| g.exact_d_identity);
        if ok {
            passed += 1;
        }
        for g in &rep.rungs {
            csv.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
                accepted.len(),
                g.epsilon,
                g.delta.re,
                g.delta.im,
                g.x_i.re,
                g.x_i.im,
                g.difference,
                g.isomonodromy_defect,
                g.exact_d_identity
            ));
        }
        accepted.push(json!({"draw": draws - 1, "state": state_to_json(&st, FieldKind::Approx), "pass": ok, "report": rep}));
    }
    let pass = accepted.len() >= n.min(min_pass) && passed >= min_pass.min(n);
    let mut r = Report::new("verify coalesce", "coalescence-trace-limit", common);
    r.set("ladder", json!(ladder));
    r.set("min_pass", min_pass);
    r.set("passed", passed);
    r.set("accepted", accepted);
    r.set("rejected", rejected);
    r.set(
        "accumulation_rule",
        json!({
            "note": "operational stand-in: snapshots counted as settled when they move by less than the drift threshold while the chart guard holds",
            "drift_threshold": DRIFT_THRESHOLD,
            "chart_guard": ACCUMULATION_GUARD,
        }),
    );
    Ok(r.finish(common, Some(pass), Some(csv)))
}

/// Parameter sets with `Re lambda = 1.25, 1, 0.5, 0, -0.5` (rows 1..5).
fn takano_cases() -> Vec<TakanoParams> {
    [-0.25, 0.0, 0.5, 1.0, 1.5]
        .iter()
        .map(|&re_sum| {
            let k0 = C::new(0.3, 0.1);
            let k1 = C::new(re_sum / 2.0, 0.3);
            let k2 = C::new(0.1, 0.0);
            let k3 = C::new(re_sum / 2.0, 0.1);
            TakanoParams {
                c1: C::new(0.2, 0.0),
                c2: C::new(0.0, 0.25),
                rho: 0.5,
                rho0: 0.1,
                mu: 1e-3,
                m: DEFAULT_M,
                kappa: Kappa::new([k0, k1, k2, k3, C::new(1.0, 0.0) - 2.0 * k0 - k1 - k2 - k3])
                    .expect("k4 solves the Fuchs relation"),
            }
        })
        .collect()
}

fn verify_takano(common: &Common, points: usize, curve_points: usize) -> Res<Output> {
    let cases = takano_cases();
    let mut s = Sampler::new(common.seed);
    let mut mismatches = 0;
    let mut per_case = Vec::new();
    let mut csv = String::from("case,log_abs,arg,re_x,im_x,abs_q\n");
    let mut curve_fail = 0;
    let mut q_err = 0.0f64;
    for (idx, params) in cases.iter().enumerate() {
        core(params.validate())?;
        let lambda = takano_lambda(params);
        let count = points / cases.len() + usize::from(idx < points % cases.len());
        let mut members = 0;
        for _ in 0..count {
            let pt = CoverPoint {
                log_abs: s.uniform(-12.0, 3.0),
                arg: s.uniform(-20.0, 20.0),
            };
            let row = domain_membership(&pt, params).member;
            if row != brute_force_member(&pt, params) {
                mismatches += 1;
            }
            members += usize::from(row);
        }
        for pt in core(gamma_curve(params, curve_points, 8.0))? {
            let q = takano_qp(&pt, params).0.norm();
            q_err = q_err.max((q - params.mu).abs());
            if !brute_force_member(&pt, params) {
                curve_fail += 1;
            }
            let x = pt.x();
            csv.push_str(&format!("{},{:e},{:e},{:e},{:e},{:e}\n", case_of(lambda), pt.log_abs, pt.arg, x.re, x.im, q));
        }
        per_case.push(json!({"case": case_of(lambda), "lambda": [lambda.re, lambda.im], "points": count, "members": members}));
    }
    let pass = mismatches == 0 && curve_fail == 0 && q_err < 1e-12;
    let mut r = Report::new("verify takano", "takano-domain", common);
    r.set("mismatches", mismatches);
    r.set("cases", per_case);
    r.set(
        "curve",
        json!({"points_per_case": curve_points, "max_abs_q_error": q_err, "outside_domain": curve_fail}),
    );
    Ok(r.finish(common, Some(pass), Some(csv)))
}
