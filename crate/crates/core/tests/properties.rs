use proptest::prelude::*;

use qbc5::adam::{bloch, cheat_prob_s1, cheat_prob_s3};
use qbc5::babe::{exact_rate, pair_guess_bound, BabeStrategy};
use qbc5::ensemble::{detection_fail_exact, mean_field, EnsembleParams};
use qbc5::game::{closed_form, markov_oracle, GameParams, Model};
use qbc5::par::stream_rng;
use qbc5::protocol::{run_honest, ProtocolParams, Verdict};
use qbc5::quantum::{helstrom_guess_prob, trace_distance, StateVector, Unitary2};
use qbc5::teleport::{teleport_forced, OutcomeLabeling};
use qbc5::{BellOutcome, UnitaryFamily};

fn quaternion() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter("nonzero", |q| q.iter().map(|x| x * x).sum::<f64>() > 1e-3)
}

fn outcome() -> impl Strategy<Value = BellOutcome> {
    (1u8..=4).prop_map(|i| BellOutcome::new(i).unwrap())
}

fn qubit_state(theta: f64, phi: f64) -> StateVector {
    StateVector::bloch("phi", theta, phi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_are_unitary(axis in prop::array::uniform3(-1.0f64..1.0), angle in -10.0f64..10.0) {
        prop_assert!(Unitary2::rotation(axis, angle).unitarity_deviation() < 1e-12);
    }

    #[test]
    fn quaternions_round_trip(q in quaternion()) {
        let u = Unitary2::from_quaternion(q);
        prop_assert!(u.phase_distance(&Unitary2::from_quaternion(u.to_quaternion())) < 1e-10);
    }

    #[test]
    fn teleportation_leaves_u_sigma_phi(k in 0usize..4, i in outcome(), theta in 0.0f64..3.2, phi in 0.0f64..6.3) {
        let fam = UnitaryFamily::standard();
        let pair = fam.pair_state(k, "p.1", "p.2");
        let input = qubit_state(theta, phi);
        let rec = teleport_forced(&pair, &input, i, OutcomeLabeling::standard()).unwrap();
        prop_assert!((rec.probability - 0.25).abs() < 1e-12);
        prop_assert!(rec.fidelity_with_formula(fam.unitary(k), &input).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn honest_runs_accept(n in 1usize..5, stages in 1usize..3, bit in 0u8..2, seed in any::<u64>()) {
        let params = ProtocolParams::new(n, stages, UnitaryFamily::standard(), seed).unwrap();
        let t = run_honest(&params, bit, &mut stream_rng(seed, 0)).unwrap();
        prop_assert_eq!(t.verdict(), Verdict::Accept);
        prop_assert_eq!(t.records.len(), 3);
    }

    #[test]
    fn helstrom_is_half_plus_half_distance(a in (0.0f64..3.2, 0.0f64..6.3), b in (0.0f64..3.2, 0.0f64..6.3), w in 0.0f64..1.0) {
        let x = qubit_state(a.0, a.1);
        let y = qubit_state(b.0, b.1);
        let z = StateVector::bit("phi", 0);
        let r0 = qbc5::quantum::DensityMatrix::mixture(&[(w, &x), (1.0 - w, &z)]).unwrap();
        let r1 = y.to_density();
        let d = trace_distance(&r0, &r1).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((helstrom_guess_prob(&r0, &r1, 0.5).unwrap() - 0.5 * (1.0 + d)).abs() < 1e-10);
    }

    #[test]
    fn single_corrections_never_beat_their_optima(q in quaternion(), i in outcome(), b in 0u8..2, theta in 0.0f64..3.2, phi in 0.0f64..6.3) {
        let fam = UnitaryFamily::standard();
        let v = Unitary2::from_quaternion(q);
        prop_assert!(cheat_prob_s1(&fam, i, &v) <= 0.75 + 1e-12);
        let s3_max = 0.5 + 6f64.sqrt() / 8.0;
        prop_assert!(cheat_prob_s3(&fam, i, b, bloch(theta, phi), &v) <= s3_max + 1e-12);
    }

    #[test]
    fn single_pair_babe_respects_bound(n in 1usize..64) {
        let fam = UnitaryFamily::standard();
        prop_assert!(exact_rate(&fam, n, BabeStrategy::SinglePair).unwrap() <= pair_guess_bound(n) + 1e-12);
    }

    #[test]
    fn detection_failure_sits_above_mean_field(total in 10u64..300, frac in 0.05f64..0.95, m in 0u64..40, delta in 0.0f64..1.0) {
        let n = ((frac * total as f64).round() as u64).clamp(1, total - 1);
        let p = EnsembleParams::new(total, n, m.min(total), delta).unwrap();
        let exact = detection_fail_exact(&p).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&exact));
        prop_assert!(exact >= mean_field(&p) - 1e-12);
        let harder = EnsembleParams { delta: (delta + 0.1).min(1.0), ..p };
        prop_assert!(detection_fail_exact(&harder).unwrap() <= exact + 1e-12);
    }

    #[test]
    fn game_masses_conserve(a in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0, n in 1u64..200) {
        let p = GameParams::new(a, c, d, n).unwrap();
        let o = markov_oracle(&p, Model::Partitioned).unwrap();
        prop_assert!((o.total() - 1.0).abs() < 1e-12);
        if let Ok(o) = markov_oracle(&p, Model::Unconditional) {
            prop_assert!((o.total() - 1.0).abs() < 1e-12);
            prop_assert!((closed_form(&p).unwrap().p_d - o.p_d).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_exact_when_always_cheating(a in 0.0f64..0.5, d in 0.0f64..0.5, n in 1u64..100) {
        let p = GameParams::new(a, 1.0, d, n).unwrap();
        let c = closed_form(&p).unwrap();
        let o = markov_oracle(&p, Model::Unconditional).unwrap();
        prop_assert!((c.p_c - o.p_c).abs() < 1e-12 && (c.p_a - o.p_a).abs() < 1e-12);
    }
}
