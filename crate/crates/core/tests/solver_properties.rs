use proptest::prelude::*;
use qbracket::analytic::{q_from_unit, series1};
use qbracket::solver::{certification_threshold, fixed_points_for_q, q_for_x};
use qbracket::{unit_disk_zero_count, Constraint, PadicNumber, PrimeContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn contexts() -> [PrimeContext; 2] {
    [
        PrimeContext::new(3, 1, 40).unwrap(),
        PrimeContext::new(5, 3, 45).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn x_fiber_round_trips(c_idx in 0..2usize, seed: u64) {
        let ctx = &contexts()[c_idx];
        let thr = certification_threshold(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let residue = rng.gen_range(0..2);
        let x = PadicNumber::sample(ctx, Constraint::Residue(residue), &mut rng);
        let fib = q_for_x(&x).unwrap();
        prop_assert!(!fib.records.is_empty());
        for r in &fib.records {
            let back = fixed_points_for_q(&r.q).unwrap();
            prop_assert!(back.records.iter().any(|b| b.x.equals_to_precision(&x, thr)));
        }
    }

    #[test]
    fn q_fiber_round_trips_and_counts(c_idx in 0..2usize, seed: u64) {
        let ctx = &contexts()[c_idx];
        let thr = certification_threshold(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = q_from_unit(&PadicNumber::sample(ctx, Constraint::Unit, &mut rng), 1);
        let fib = fixed_points_for_q(&q).unwrap();
        let zeros = unit_disk_zero_count(&series1(&PadicNumber::zero(ctx), &q, None).unwrap()).unwrap();
        prop_assert_eq!(fib.predicted, zeros - 2);
        prop_assert_eq!(fib.records.len() + fib.deficit, zeros - 2);
        for r in &fib.records {
            let back = q_for_x(&r.x).unwrap();
            prop_assert!(back.records.iter().any(|b| b.q.equals_to_precision(&q, thr)));
        }
    }
}
