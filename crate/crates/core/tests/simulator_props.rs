use pa_urn::model::realize_initial;
use pa_urn::simulator::{run, run_rng, step_probabilities};
use pa_urn::{InitialProfile, Schedule, TruncatedState};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn kernel_rows_sum_to_one(
        p in 0.0..0.99f64,
        beta in 0.05..10.0f64,
        sizes in prop::collection::vec(0u64..20, 1..8),
        d in 0usize..6,
        j in 0usize..50,
    ) {
        prop_assume!(sizes.iter().sum::<u64>() > 0);
        let s = Schedule::homogeneous(p, beta).unwrap();
        let st = TruncatedState::from_sizes(&sizes, 50, d).unwrap();
        let pr = step_probabilities(&st, &s, 50, j).unwrap();
        prop_assert_eq!(pr.len(), d + 2);
        prop_assert!(pr.iter().all(|&x| x >= 0.0));
        prop_assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn counts_conserved_along_runs(
        p in 0.0..0.9f64,
        beta in 0.1..5.0f64,
        sizes in prop::collection::vec(0u64..5, 1..6),
        d in 0usize..5,
        n in 1usize..300,
        seed in any::<u64>(),
    ) {
        prop_assume!(sizes.iter().sum::<u64>() > 0);
        let s = Schedule::homogeneous(p, beta).unwrap();
        let init = TruncatedState::from_sizes(&sizes, n, d).unwrap();
        let r = run(n, &s, &init, seed).unwrap();
        for st in &r.trajectory {
            prop_assert!(st.check_invariants(&init).is_ok());
        }
    }
}

#[test]
fn one_step_frequencies() {
    let s = Schedule::homogeneous(0.2, 1.5).unwrap();
    let st = TruncatedState::from_sizes(&[3, 2, 1, 0, 1], 10, 2).unwrap();
    let pr = step_probabilities(&st, &s, 10, 0).unwrap();
    let m = 1_000_000u64;
    let mut hits = vec![0u64; pr.len()];
    let mut rng = run_rng(99, 0);
    for _ in 0..m {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = pr.len() - 1;
        for (i, p) in pr[..pr.len() - 1].iter().enumerate() {
            acc += p;
            if u < acc {
                pick = i;
                break;
            }
        }
        hits[pick] += 1;
    }
    for (h, p) in hits.iter().zip(&pr) {
        let f = *h as f64 / m as f64;
        let se = (p * (1.0 - p) / m as f64).sqrt().max(1e-12);
        assert!((f - p).abs() < 4.0 * se, "{f} vs {p}");
    }
}

#[test]
fn run_one_step_frequencies() {
    // same check through the public run entry point
    let s = Schedule::homogeneous(0.2, 1.5).unwrap();
    let st = TruncatedState::from_sizes(&[3, 2, 1, 0, 1], 1, 2).unwrap();
    let pr = step_probabilities(&st, &s, 1, 0).unwrap();
    let m = 200_000u64;
    let mut hits = vec![0u64; pr.len()];
    for seed in 0..m {
        let r = run(1, &s, &st, seed).unwrap();
        let a = &r.trajectory[0].counts;
        let b = &r.trajectory[1].counts;
        let idx = if b[1] > a[1] && b[0] == a[0] {
            0
        } else {
            (1..pr.len()).find(|&i| i + 1 < b.len() && b[i + 1] > a[i + 1]).unwrap_or(pr.len() - 1)
        };
        hits[idx] += 1;
    }
    for (h, p) in hits.iter().zip(&pr) {
        let f = *h as f64 / m as f64;
        let se = (p * (1.0 - p) / m as f64).sqrt().max(1e-12);
        assert!((f - p).abs() < 4.0 * se, "{f} vs {p}");
    }
}

#[test]
fn profile_realization_feeds_runs() {
    let prof = InitialProfile::new(vec![0.1, 0.05], Some(0.2)).unwrap();
    let init = realize_initial(&prof, 200, 3, None).unwrap();
    let r = run(200, &Schedule::figure_one(), &init, 4).unwrap();
    assert_eq!(r.trajectory.len(), 201);
    assert_eq!(r.trajectory[200].ball_total, init.ball_total + 200);
}
