use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use ringpir::attack::{distinguishing_advantage, field_baseline_query, row_deletion_scan, BaselineParams, InstanceKind};
use ringpir::pir::{gen_query, setup_random, RngRandomness, Shape};
use ringpir::zmod::Modulus;

#[test]
fn compliant_queries_show_identical_deletions() {
    let modulus = Modulus::parse_factors("2^2,3^2").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    let params = setup_random(&modulus, 91, 5, Shape { t: 4, l: 8, r: 4 }, 400, &mut rng).unwrap();
    for trial in 0..10 {
        let (q, _) = gen_query(&params, 1 + trial % 4, &mut RngRandomness(&mut rng)).unwrap();
        let report = row_deletion_scan(&q, &modulus, 4).unwrap();
        assert!(report.identical(), "{:?}", report.drops);
        assert_eq!(report.distinguished(), None);
    }
    let adv = distinguishing_advantage(&InstanceKind::Ring(&params), 10, &mut rng).unwrap();
    assert_eq!(adv, 0.0);
}

#[test]
fn baseline_queries_leak_the_desired_file() {
    let params = BaselineParams::new(2, 4, 2, 10, 4, 4);
    let mut rng = ChaCha20Rng::seed_from_u64(22);
    let field = Modulus::prime(2).unwrap();
    let mut hits = 0;
    for trial in 0..200 {
        let d = 1 + trial % 4;
        let q = field_baseline_query(params, d, true, &mut rng).unwrap();
        let report = row_deletion_scan(&q, &field, params.rows_per_file).unwrap();
        if report.distinguished() == Some(d) {
            hits += 1;
        }
    }
    eprintln!("baseline hits {hits}/200");
    assert!(hits >= 120);
    let adv = distinguishing_advantage(&InstanceKind::Baseline(params), 100, &mut rng).unwrap();
    assert!(adv >= 0.5, "advantage {adv}");
}

#[test]
fn generic_drop_for_other_rows() {
    // with the non-desired rows saturating their span, deleting one of their blocks costs nothing
    let params = BaselineParams::new(2, 4, 2, 10, 4, 4);
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let q = field_baseline_query(params, 3, true, &mut rng).unwrap();
    let report = row_deletion_scan(&q, &Modulus::prime(2).unwrap(), 16).unwrap();
    assert_eq!(report.full.ranks(), vec![36]);
    assert_eq!(report.drops, vec![0.0, 0.0, 8.0, 0.0]);
}
