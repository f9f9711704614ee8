use mtla::kinematics::{
    uam_csm_fixed_target, uam_csm_fixed_total_time, uam_fixed_target, uam_fixed_time,
    velocity_range, MotionSolution, RangeQuery, VelocityInterval,
};
use mtla::scenario::{Color, PhaseSchedule, RoadLimits};
use proptest::prelude::*;

/// Integrates the speed profile with the midpoint rule, split where the
/// accelerated leg ends so each piece is linear.
fn integrate(sol: &MotionSolution, t_end: f64) -> f64 {
    let piece = |from: f64, to: f64| {
        let n = 2000;
        let h = (to - from) / n as f64;
        (0..n)
            .map(|k| sol.speed_at(from + (k as f64 + 0.5) * h) * h)
            .sum::<f64>()
    };
    let knee = sol.t1.min(t_end);
    piece(0.0, knee) + piece(knee, t_end)
}

fn check_invariants(sol: &MotionSolution) {
    let tol = 1e-6 * (1.0 + sol.d1 + sol.d2);
    assert!(
        (sol.v0 * sol.t1 + 0.5 * sol.a * sol.t1 * sol.t1 - sol.d1).abs() <= tol,
        "{sol:?}"
    );
    assert!(
        (sol.v0 + sol.a * sol.t1 - sol.v_t).abs() <= 1e-6 * (1.0 + sol.v_t),
        "{sol:?}"
    );
    assert!(
        (sol.v_t * (sol.t_tot - sol.t1) - sol.d2).abs() <= tol,
        "{sol:?}"
    );
    assert!(
        sol.v_t >= 0.0 && sol.t1 >= 0.0 && sol.t_tot >= sol.t1,
        "{sol:?}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fixed_time_covers_the_distance(v in 0.0..25.0f64, d in 1.0..600.0f64, t in 1.0..80.0f64) {
        match uam_fixed_time(v, d, t) {
            Ok(sol) => {
                check_invariants(&sol);
                prop_assert!((integrate(&sol, t) - d).abs() < 1e-6 * (1.0 + d));
                prop_assert_eq!(sol.t1, t);
            }
            // only rejected when the speed would have to go negative
            Err(_) => prop_assert!(v + 2.0 * (d - v * t) / t < 0.0),
        }
    }

    #[test]
    fn fixed_target_covers_the_distance(v in 0.0..25.0f64, d in 1.0..600.0f64, vt in 0.0..25.0f64) {
        prop_assume!(v + vt > 1e-3);
        let sol = uam_fixed_target(v, d, vt).unwrap();
        check_invariants(&sol);
        prop_assert!((integrate(&sol, sol.t1) - d).abs() < 1e-6 * (1.0 + d));
    }

    #[test]
    fn fixed_total_time_inverts_fixed_target(
        v in 0.0..20.0f64,
        l1 in 5.0..500.0f64,
        gap in 5.0..500.0f64,
        vt in 0.5..30.0f64,
    ) {
        let li = l1 + gap;
        let forward = uam_csm_fixed_target(v, l1, li, vt).unwrap();
        check_invariants(&forward);
        let back = uam_csm_fixed_total_time(v, l1, li, forward.t_tot, None).unwrap();
        check_invariants(&back);
        prop_assert!((back.v_t - vt).abs() <= 1e-9 * vt.max(1.0));
        prop_assert!((integrate(&back, back.t_tot) - li).abs() < 1e-6 * (1.0 + li));
    }

    #[test]
    fn intersection_is_commutative_and_contained(
        a in 0.0..30.0f64, b in 0.0..30.0f64, c in 0.0..30.0f64, d in 0.0..30.0f64, probe in 0.0..30.0f64,
    ) {
        let x = VelocityInterval::from_speeds(a.min(b), a.max(b));
        let y = VelocityInterval::from_speeds(c.min(d), c.max(d));
        let xy = x.intersect(&y);
        prop_assert_eq!(xy.bounds(), y.intersect(&x).bounds());
        prop_assert_eq!(xy.contains(probe), x.contains(probe) && y.contains(probe));
        prop_assert!(x.intersect(&VelocityInterval::Empty).is_empty());
    }

    /// Both ends of a first-light range reach the stop line inside the window.
    #[test]
    fn first_light_range_lands_in_window(
        v in 0.5..14.0f64,
        dist in 20.0..500.0f64,
        offset in 0.0..75.0f64,
        green in 10.0..60.0f64,
        margin in 0.0..1.0f64,
    ) {
        let light = PhaseSchedule::new("x", dist, 75.0, green, offset);
        let color = light.phase_at(0.0);
        let shifts = light.next_shifts(0.0, 3);
        let limits = RoadLimits::default();
        let q = RangeQuery {
            light_index: 1,
            green_phase: 1,
            color,
            speed: v,
            dist_first: dist,
            dist_light: dist,
            shifts: &shifts,
        };
        let range = velocity_range(&q, &limits, margin);
        if let VelocityInterval::Range { min, max } = range {
            let (open, close) = match color {
                Color::Green => (0.0, shifts[0].after),
                Color::Red => (shifts[0].after, shifts[1].after),
            };
            for end in [min, max] {
                let sol = end.solution.expect("endpoints carry their profile");
                prop_assert!(sol.v_t <= limits.v_max_road + 1e-9);
                let arrival = sol.time_to_cover(dist).expect("the line is reached");
                prop_assert!(arrival <= close - margin + 1e-6, "{arrival} > {close}");
                if color == Color::Red {
                    prop_assert!(arrival >= open + margin - 1e-6, "{arrival} < {open}");
                }
            }
        }
    }
}

#[test]
fn hand_checked_total_time_instance() {
    let sol = uam_csm_fixed_total_time(10.0, 100.0, 200.0, 15.0, None).unwrap();
    assert!((sol.v_t - 14.574).abs() < 5e-4, "{}", sol.v_t);
    check_invariants(&sol);
}
