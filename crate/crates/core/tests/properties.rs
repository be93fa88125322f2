use num_complex::Complex64 as C;
use proptest::prelude::*;

use pvi_core::experiments::takano::{brute_force_member, domain_membership, CoverPoint, TakanoParams, DEFAULT_M};
use pvi_core::fuchsian::coalesce::{discriminant, Triple};
use pvi_core::json::AnyState;
use pvi_core::weyl::theta_of_kappa;
use pvi_core::*;

fn rational() -> impl Strategy<Value = ExactScalar> {
    (-60i64..=60, 1i64..=40, -60i64..=60, 1i64..=40).prop_map(|(a, b, c, d)| ExactScalar::from_parts((a, b), (c, d)))
}

fn exact_state(infinite_t4: bool) -> impl Strategy<Value = ExactState> {
    (
        prop::array::uniform4(rational()),
        prop::array::uniform4(rational()),
        rational(),
        rational(),
    )
        .prop_filter_map("chart", move |(k, t, q, p)| {
            let kappa = Kappa::from_k0_to_k3(k[0].clone(), k[1].clone(), k[2].clone(), k[3].clone());
            let t4 = if infinite_t4 { Extended::Infinity } else { Extended::Finite(t[3].clone()) };
            let times = TimeConfig::new([t[0].clone(), t[1].clone(), t[2].clone()], t4).ok()?;
            if p == ExactScalar::from_i64(0) {
                return None;
            }
            ExactState::new(kappa, times, q, p).ok()
        })
}

fn word() -> impl Strategy<Value = GroupWord> {
    prop::collection::vec(0usize..5, 0..10).prop_map(|v| GroupWord::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflections_are_involutions(st in exact_state(false), i in 0usize..5) {
        if let Ok(once) = s_apply(&st, i) {
            if let Ok(twice) = s_apply(&once, i) {
                prop_assert_eq!(twice, st);
            }
        }
    }

    #[test]
    fn words_stay_on_fuchs_locus(st in exact_state(true), w in word()) {
        prop_assert!(st.kappa.apply_word(&w).satisfies_fuchs());
    }

    #[test]
    fn word_then_reverse_is_identity(st in exact_state(true), w in word()) {
        let mut rev = w.letters().to_vec();
        rev.reverse();
        if let Ok(image) = s_word(&st, &w) {
            if let Ok(back) = s_word(&image, &GroupWord::new(rev).unwrap()) {
                prop_assert_eq!(back, st);
            }
        }
    }

    #[test]
    fn theta_is_invariant(k in prop::array::uniform4((-1.0f64..1.0, -0.3f64..0.3)), w in word()) {
        let k = k.map(|(re, im)| C::new(re, im));
        let k0 = (C::new(1.0, 0.0) - k[0] - k[1] - k[2] - k[3]) / 2.0;
        let kappa = Kappa::new([k0, k[0], k[1], k[2], k[3]]).unwrap();
        let d = theta_of_kappa(&kappa.apply_word(&w)).max_abs_diff(&theta_of_kappa(&kappa));
        prop_assert!(d < 1e-9, "defect {d}");
    }

    #[test]
    fn discriminant_matches_polynomial(st in exact_state(true), n in 0usize..6) {
        let perms = [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)];
        let (i, j, k) = perms[n];
        let triple = Triple::new(i, j, k).unwrap();
        if let Ok((delta, d)) = discriminant(&st, triple) {
            let tij = st.t.get(i).unwrap().clone() - st.t.get(j).unwrap().clone();
            prop_assert_eq!(d, -(tij * delta));
        }
    }

    #[test]
    fn json_round_trip(st in exact_state(false)) {
        let doc = AnyState::Exact(st);
        let text = doc.to_json().to_string();
        prop_assert_eq!(AnyState::parse(&text).unwrap(), doc);
    }

    #[test]
    fn table_rows_match_inequalities(
        re_sum in -0.8f64..1.8,
        log_abs in -15.0f64..3.0,
        arg in -30.0f64..30.0,
    ) {
        let k0 = C::new(0.3, 0.1);
        let k1 = C::new(re_sum / 2.0, 0.3);
        let k3 = C::new(re_sum / 2.0, 0.1);
        let k2 = C::new(0.1, 0.0);
        let params = TakanoParams {
            c1: C::new(0.2, 0.0),
            c2: C::new(0.0, 0.25),
            rho: 0.5,
            rho0: 0.1,
            mu: 1e-3,
            m: DEFAULT_M,
            kappa: Kappa::new([k0, k1, k2, k3, C::new(1.0, 0.0) - 2.0 * k0 - k1 - k2 - k3]).unwrap(),
        };
        let pt = CoverPoint { log_abs, arg };
        prop_assert_eq!(domain_membership(&pt, &params).member, brute_force_member(&pt, &params));
    }
}
