//! Runs every acceptance criterion and prints one PASS/FAIL line each.

mod common;

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use ringpir::analysis::{pir_rate, work_factor};
use ringpir::attack::{field_baseline_query, row_deletion_scan, BaselineParams};
use ringpir::chaincode::cyclotomic_cosets;
use ringpir::fixtures as toy;
use ringpir::linalg::Matrix;
use ringpir::pir::{
    delta_rows, gen_query, recover, server_respond, setup_random, strip_outer, Database, PirParams, RngRandomness,
    Shape,
};
use ringpir::poly::Ring;
use ringpir::zmod::Modulus;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    check(start.elapsed() < limit, format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn table_modulus() -> Modulus {
    Modulus::parse_factors("2^2,3^2").unwrap()
}

fn table_params(rng: &mut ChaCha20Rng) -> Result<PirParams, String> {
    setup_random(&table_modulus(), 91, 5, Shape { t: 4, l: 8, r: 4 }, 400, rng).map_err(err)
}

fn golden_toy() -> Outcome {
    let start = Instant::now();
    let params = toy::params().map_err(err)?;
    let (q, secrets) = gen_query(&params, toy::DESIRED, &mut toy::stream()).map_err(err)?;
    check(q == toy::query_matrix(), "Q differs from the printed matrix")?;
    let r = server_respond(&toy::database().map_err(err)?, &q, toy::M).map_err(err)?;
    check(r == toy::response_matrix(), "R differs from the printed response")?;
    let file = recover(&params, &secrets, &r).map_err(err)?;
    check(file == Matrix::from_vec(1, 1, vec![1]).unwrap(), format!("recovered {:?}", file.data()))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("Q 3x52, R 1x52 bit-exact, recovered 1 in {:?}", start.elapsed()))
}

fn toy_checkpoints() -> Outcome {
    let params = toy::params().map_err(err)?;
    let (_, secrets) = gen_query(&params, toy::DESIRED, &mut toy::stream()).map_err(err)?;
    let deltas: Vec<_> = delta_rows(&params, &secrets).map_err(err)?.into_iter().flatten().flatten().collect();
    let printed: Vec<_> = toy::DELTA.iter().map(|s| toy::elem(s)).collect();
    check(deltas == printed, "delta polynomials differ")?;
    let stripped = strip_outer(&params, &toy::response_matrix()).map_err(err)?;
    check(stripped[0][0].coeffs() == toy::S_BLOCK, "stripped block differs")?;
    let v = toy::h_matrix().vec_mul_transposed(&toy::S_BLOCK, toy::M);
    check(v == toy::S_TIMES_HT, format!("S H^T = {v:?}"))?;
    Ok(format!("6 deltas match, S H^T = {v:?}"))
}

fn table_round_trips() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let params = table_params(&mut rng)?;
    let modulus = table_modulus();
    let shape = params.shape();
    let db = Database::random(shape, modulus.m_prime(), &mut rng);
    for trial in 0..100 {
        let d = 1 + trial % shape.t;
        let (q, secrets) = gen_query(&params, d, &mut RngRandomness(&mut rng)).map_err(err)?;
        let r = server_respond(&db, &q, modulus.m()).map_err(err)?;
        let file = recover(&params, &secrets, &r).map_err(|e| format!("trial {trial}: {e}"))?;
        check(file == db.file(d).map_err(err)?, format!("trial {trial}: wrong file"))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("100/100 exact in {:?}", start.elapsed()))
}

const TABLE: [(&str, usize, usize, usize, u64); 5] = [
    ("2^2,3^2", 91, 5, 4, 455),
    ("2^2,3^2", 91, 5, 5, 364),
    ("2^2,3^2", 91, 6, 6, 364),
    ("2^2,3^2", 91, 10, 10, 364),
    ("2^3,3^3", 91, 5, 5, 546),
];

fn rates() -> Outcome {
    let mut got = Vec::new();
    for (factors, n, s, r, denom) in TABLE {
        let m = Modulus::parse_factors(factors).map_err(err)?;
        let report = pir_rate(&m, n, s, r, 1, None).map_err(err)?;
        check(report.exact_rate == Some(Ratio::new(1, denom)), format!("m={} s={s}: {:?}", m.m(), report.exact_rate))?;
        got.push(format!("1/{denom}"));
    }
    Ok(got.join(", "))
}

fn work_factors() -> Outcome {
    let t2 = cyclotomic_cosets(91, 2).map_err(err)?.count();
    let t3 = cyclotomic_cosets(91, 3).map_err(err)?.count();
    check(t2 == 10 && t3 == 18, format!("T(91,2)={t2}, T(91,3)={t3}"))?;
    let mut got = Vec::new();
    for (factors, n, s, _, _) in TABLE {
        let w = work_factor(&Modulus::parse_factors(factors).map_err(err)?, n, s).map_err(err)?;
        check(w.log2_per_code() == 28, format!("per code 2^{}", w.log2_per_code()))?;
        check(w.log2_total() == 28 * (s as u64 + 1), format!("total 2^{}", w.log2_total()))?;
        got.push(format!("(2^28)^{}", s + 1));
    }
    Ok(format!("T = 10 + 18, bounds {}", got.join(", ")))
}

fn attack_resistance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let params = table_params(&mut rng)?;
    let modulus = table_modulus();
    let (t, r) = (params.shape().t, params.shape().r);
    for trial in 0..50 {
        let (q, _) = gen_query(&params, 1 + trial % t, &mut RngRandomness(&mut rng)).map_err(err)?;
        let report = row_deletion_scan(&q, &modulus, r).map_err(err)?;
        check(report.identical(), format!("query {trial}: drops {:?}", report.drops))?;
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("50/50 identical profiles, 0 distinguishing events in {:?}", start.elapsed()))
}

fn baseline_attack() -> Outcome {
    let params = BaselineParams::new(2, 4, 2, 10, 4, 4);
    let field = Modulus::prime(2).map_err(err)?;
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut hits = 0;
    for trial in 0..200 {
        let d = 1 + trial % params.t;
        let q = field_baseline_query(params, d, true, &mut rng).map_err(err)?;
        if row_deletion_scan(&q, &field, params.rows_per_file).map_err(err)?.distinguished() == Some(d) {
            hits += 1;
        }
    }
    check(hits >= 120, format!("{hits}/200 hits"))?;
    Ok(format!("{hits}/200 desired files identified"))
}

fn algebra_suites() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let ring = Ring::new(table_modulus(), 91).map_err(err)?;
    for _ in 0..1000 {
        let a = ring.random(&mut rng);
        check(ring.crt_combine(&ring.components(&a).map_err(err)?).map_err(err)? == a, "CRT round trip")?;
    }
    let params = table_params(&mut rng)?;
    let inner = params.inner();
    let h = inner.parity_check().map_err(err)?;
    for _ in 0..1000 {
        let c = inner.sample_codeword(&mut rng);
        check(h.vec_mul_transposed(c.coeffs(), 36).iter().all(|&x| x == 0), "c H^T != 0")?;
    }
    let n15 = common::crt_code_suite("3,5", 7, 64, 8)?;
    let n36 = common::crt_code_suite("2^2,3^2", 7, 16, 9)?;
    Ok(format!("1000 CRT round trips, 1000 annihilations, {n15} codes mod 15 and {n36} mod 36 match the oracles"))
}

fn formats() -> Outcome {
    common::formats::round_trips(500, 9)?;
    let answered = common::formats::fuzz_server(1000, 10)?;
    Ok(format!("500 x 3 formats byte-identical, {answered}/1000 malformed frames answered with ERROR"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden toy example", golden_toy),
        ("toy intermediate checkpoints", toy_checkpoints),
        ("round trips at table scale", table_round_trips),
        ("rate reproduction", rates),
        ("work-factor reproduction", work_factors),
        ("attack resistance", attack_resistance),
        ("attack on the field baseline", baseline_attack),
        ("algebra property suites", algebra_suites),
        ("wire and format round trips", formats),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
