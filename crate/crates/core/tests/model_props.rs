use pa_urn::lln::solve_lln_closed;
use pa_urn::model::{realize_initial, Poly, Segment};
use pa_urn::{sigma, validate_path, InitialProfile, Schedule};
use proptest::prelude::*;

fn schedule_strategy() -> impl Strategy<Value = Schedule> {
    (0.0..0.9f64, 0.1..6.0f64, 0.0..0.9f64, 0.1..6.0f64, 0.05..0.95f64).prop_map(
        |(p0, b0, p1, b1, cut)| {
            Schedule::new(vec![
                Segment { t_start: 0.0, p: Poly::constant(p0), beta: Poly::constant(b0) },
                Segment { t_start: cut, p: Poly::constant(p1), beta: Poly::constant(b1) },
            ])
            .unwrap()
        },
    )
}

proptest! {
    #[test]
    fn sampled_parameters_respect_bounds(s in schedule_strategy()) {
        for k in 0..=10_000 {
            let t = k as f64 / 10_000.0;
            let (p, b) = (s.p(t), s.beta(t));
            prop_assert!(p >= s.p_min() && p <= s.p_max() && s.p_max() < 1.0);
            prop_assert!(b >= s.beta_min() && b <= s.beta_max() && s.beta_min() > 0.0);
        }
    }

    #[test]
    fn sigma_is_affine_per_segment(
        s in schedule_strategy(),
        c in prop::collection::vec(0.0..1.0f64, 1..6),
    ) {
        let prof = InitialProfile::new(c.clone(), None).unwrap();
        let cw: f64 = c.iter().enumerate().map(|(i, x)| i as f64 * x).sum();
        let ct: f64 = c.iter().sum();
        prop_assert!((sigma(&s, &prof, 0.0) - (cw + ct * s.beta(0.0))).abs() < 1e-15);
        let cut = s.breakpoints()[0];
        for (a, b) in [(0.0, cut), (cut, 1.0)] {
            let m = 0.5 * (a + b);
            let lhs = sigma(&s, &prof, m);
            let b_end = b - 1e-9 * (b - a);
            let rhs = 0.5 * (sigma(&s, &prof, a) + sigma(&s, &prof, b_end));
            prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn realized_profile_within_one_over_n(
        c in prop::collection::vec(0.0..2.0f64, 1..8),
        n in 1usize..5000,
        d in 0usize..10,
    ) {
        let prof = InitialProfile::new(c.clone(), None).unwrap();
        let st = match realize_initial(&prof, n, d, None) {
            Ok(st) => st,
            Err(_) => return Ok(()),
        };
        let target = prof.truncated(d);
        let x = st.scaled();
        // the pooled tail collects one rounding error per pooled size
        let pooled = c.len().saturating_sub(d + 1).max(1) as f64;
        for (i, (a, b)) in x.iter().zip(&target).enumerate() {
            let bound = if i == d + 1 { pooled } else { 1.0 } / n as f64;
            prop_assert!((a - b).abs() <= bound + 1e-12, "{a} vs {b}");
        }
        let total: u64 = st.counts.iter().sum();
        prop_assert_eq!(total, (prof.c_total() * n as f64).round() as u64);
    }
}

#[test]
fn lln_solution_is_admissible() {
    let z = InitialProfile::zero();
    let grid: Vec<f64> = (0..=400).map(|k| k as f64 / 400.0).collect();
    for sched in [Schedule::homogeneous(0.0, 1.0).unwrap(), Schedule::figure_one()] {
        for d in [0, 3, 10, 20] {
            let mut g = grid.clone();
            g.extend(sched.breakpoints());
            g.sort_by(|a, b| a.total_cmp(b));
            g.dedup();
            let path = solve_lln_closed(d, &sched, &z, &g).unwrap().to_path().unwrap();
            let rep = validate_path(&path, &z, 1e-8);
            assert!(rep.is_admissible, "d = {d}: {:?}", rep.violations);
        }
    }
}
