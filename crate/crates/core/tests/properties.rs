use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trigonal::construction::construct;
use trigonal::field::Field;
use trigonal::hyperelliptic::count_points;
use trigonal::isogeny::Isogeny;
use trigonal::survey::{random_curve, run_trial, Depth, SurveyStats};
use trigonal::tractable::{brute_force_tractable, canonical_set, enumerate_tractable, splitting_degree};
use trigonal::trigonal::{transform_subgroup, trigonal_map_for, verify_trigonal, TrigonalOutcome};

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![13u64, 17, 29, 37, 101])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn enumeration_matches_brute_force(p in small_prime(), seed in any::<u64>()) {
        let f = Field::prime_u64(p).unwrap();
        let h = random_curve(&f, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assume!(splitting_degree(&h) <= 12);
        let subs = enumerate_tractable(&h);
        let bf = brute_force_tractable(&h).unwrap();
        prop_assert_eq!(subs.len(), bf.len());
        if let Some(first) = bf.first() {
            prop_assert_eq!(canonical_set(&subs, &first.field), canonical_set(&bf, &first.field));
        }
    }

    #[test]
    fn trigonal_maps_identify_pairs(p in small_prime(), seed in any::<u64>()) {
        let f = Field::prime_u64(p).unwrap();
        let h = random_curve(&f, &mut ChaCha8Rng::seed_from_u64(seed));
        for s in enumerate_tractable(&h) {
            if let Ok(TrigonalOutcome::Map(setup)) = trigonal_map_for(&h, &s) {
                prop_assert!(verify_trigonal(&setup.map, &transform_subgroup(&s, &setup.chart)));
                prop_assert_eq!(&h.transform(&setup.chart).unwrap(), &setup.curve);
                if let Some(alt) = &setup.alternate {
                    prop_assert!(verify_trigonal(alt, &transform_subgroup(&s, &setup.chart)));
                }
            }
        }
    }

    #[test]
    fn construction_invariants(seed in any::<u64>()) {
        let f = Field::prime_u64(61).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_curve(&f, &mut rng);
        for s in enumerate_tractable(&h) {
            let Ok(c) = construct(&h, &s, 1) else { continue };
            let k = &c.plane.delta1_field;
            prop_assert_eq!(c.plane.delta1.sqr(k), c.plane.delta1_squared(&c.fibration).lift(k));
            prop_assert_eq!(c.rational(), k.degree() == 1);
            // twisting by a nonsquare swaps rationality
            let nonsq = (2..61).map(|i| f.from_u64(i)).find(|x| !f.is_square(x)).unwrap();
            let tw = construct(&h.twist(&nonsq), &s, 1);
            if let Ok(tw) = tw {
                prop_assert_ne!(tw.rational(), c.rational());
            }
        }
    }

    #[test]
    fn fibres_sit_on_x(seed in any::<u64>()) {
        let f = Field::prime_u64(61).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_curve(&f, &mut rng);
        prop_assume!(h.to_odd_model().is_ok());
        for s in enumerate_tractable(&h) {
            let Ok(c) = construct(&h, &s, 1) else { continue };
            if !c.rational() {
                continue;
            }
            let iso = Isogeny::new(&h, c).unwrap();
            let cons = &iso.construction;
            for _ in 0..8 {
                let t0 = f.random(&mut rng);
                let Ok(pts) = iso.fiber_points(&f, &t0) else { continue };
                prop_assert_eq!(pts.len(), iso.pair_partition_count(&f, &t0).unwrap());
                for q in &pts {
                    prop_assert!(cons.x.contains(&f, &q.t, q.b_array()));
                    let rho = cons.correspondence.rho(&f, &q.t, &q.b_array()[5]).unwrap();
                    prop_assert_eq!(f.sqr(&rho), q.b_array()[5].clone());
                }
            }
        }
    }

    #[test]
    fn twists_have_complementary_counts(seed in any::<u64>()) {
        // #H(F_p) + #H'(F_p) = 2(p + 1)
        let f = Field::prime_u64(29).unwrap();
        let h = random_curve(&f, &mut ChaCha8Rng::seed_from_u64(seed));
        let nonsq = f.from_u64(2);
        prop_assert!(!f.is_square(&nonsq));
        let total = count_points(&h, 1).unwrap() + count_points(&h.twist(&nonsq), 1).unwrap();
        prop_assert_eq!(total, 60);
    }

    #[test]
    fn survey_stats_merge_is_order_free(seed in any::<u64>(), split in 1usize..15) {
        let f = Field::prime_u64(101).unwrap();
        let records: Vec<_> = (0..16).map(|t| run_trial(&f, seed, t, Depth::Full)).collect();
        let whole = records.iter().fold(SurveyStats::default(), |mut s, r| { s.record(r); s });
        let part = |rs: &[_]| rs.iter().fold(SurveyStats::default(), |mut s, r| { s.record(r); s });
        let (a, b) = records.split_at(split);
        prop_assert_eq!(part(a).merge(part(b)), whole.clone());
        prop_assert_eq!(part(b).merge(part(a)), whole);
        let again = run_trial(&f, seed, 3, Depth::Full);
        prop_assert_eq!(again.csv_row(), records[3].csv_row());
    }
}
