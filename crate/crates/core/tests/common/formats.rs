//! Random instances of the persisted formats and a malformed-frame corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringpir::chaincode::factor_xn_minus_1;
use ringpir::crtcode::CrtCyclicCode;
use ringpir::linalg::Matrix;
use ringpir::outercode::random_unit_upper;
use ringpir::pir::{Database, Shape};
use ringpir::pir_io::{MatrixFile, MessageType, ParamsFile, WireFrame, HEADER_LEN, MAX_PAYLOAD, WIRE_MAGIC};
use ringpir::zmod::{gcd, Modulus};

const MODULI: [&str; 5] = ["3,5", "2^2,3^2", "2^3,3", "5^2,7", "2,3,5"];
const LENGTHS: [usize; 6] = [1, 7, 11, 13, 17, 19];

fn random_code<R: Rng>(modulus: &Modulus, n: usize, floor: &[Vec<u32>], rng: &mut R) -> Vec<Vec<u32>> {
    modulus
        .factors()
        .iter()
        .zip(floor)
        .map(|(f, lo)| {
            let k = factor_xn_minus_1(n, f.p, f.e).unwrap().len();
            (0..k).map(|i| rng.gen_range(lo.get(i).copied().unwrap_or(0)..=f.e)).collect()
        })
        .collect()
}

pub fn random_params_file<R: Rng>(rng: &mut R) -> ParamsFile {
    let modulus = Modulus::parse_factors(MODULI[rng.gen_range(0..MODULI.len())]).unwrap();
    let n = loop {
        let n = LENGTHS[rng.gen_range(0..LENGTHS.len())];
        if gcd(n as u64, modulus.m()) == 1 {
            break n;
        }
    };
    let s = rng.gen_range(1..=4);
    let none = vec![vec![]; modulus.factors().len()];
    let towers = |exps: &[Vec<u32>]| -> Vec<Vec<Vec<u64>>> {
        CrtCyclicCode::from_exponents(&modulus, n, exps)
            .unwrap()
            .components()
            .iter()
            .map(|c| c.tower().to_vec())
            .collect()
    };
    let inner = towers(&random_code(&modulus, n, &none, rng));
    let mut floor = none.clone();
    let mut constituents = Vec::new();
    for _ in 0..s {
        floor = random_code(&modulus, n, &floor, rng);
        constituents.push(towers(&floor));
    }
    let r = rng.gen_range(1..=s);
    ParamsFile {
        factors: modulus.factors().iter().map(|f| (f.p, f.e)).collect(),
        n,
        inner,
        mix: random_unit_upper(s, modulus.m(), rng),
        constituents,
        shape: Shape { t: rng.gen_range(1..10), l: rng.gen_range(1..10), r },
        allow_noncompliant: rng.gen_bool(0.5),
    }
}

pub fn random_matrix_file<R: Rng>(rng: &mut R) -> MatrixFile {
    let modulus = match rng.gen_range(0..3) {
        0 => 1u64 << 32,
        1 => rng.gen_range(1..100),
        _ => rng.gen_range(1..=1u64 << 32),
    };
    let (rows, cols) = (rng.gen_range(0..8), rng.gen_range(0..8));
    let data = (0..rows * cols).map(|_| rng.gen_range(0..modulus)).collect();
    MatrixFile::new(Matrix::from_vec(rows, cols, data).unwrap(), modulus).unwrap()
}

pub fn random_frame<R: Rng>(rng: &mut R) -> WireFrame {
    let len = rng.gen_range(0..200);
    WireFrame { kind: rng.gen(), payload: (0..len).map(|_| rng.gen()).collect() }
}

/// Serialize, parse, serialize again for `count` instances of each format.
pub fn round_trips(count: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let p = random_params_file(&mut rng);
        let text = p.serialize();
        let back = ParamsFile::parse(&text).map_err(|e| format!("params {i}: {e}\n{text}"))?;
        if back != p || back.serialize() != text {
            return Err(format!("params {i} changed in a round trip"));
        }
        let m = random_matrix_file(&mut rng);
        let bytes = m.to_bytes();
        let back = MatrixFile::from_bytes(&bytes).map_err(|e| format!("matrix {i}: {e}"))?;
        if back != m || back.to_bytes() != bytes {
            return Err(format!("matrix {i} changed in a round trip"));
        }
        let f = random_frame(&mut rng);
        let bytes = f.encode();
        let back = WireFrame::decode(&bytes).map_err(|e| format!("frame {i}: {e}"))?;
        if back != f || back.encode() != bytes {
            return Err(format!("frame {i} changed in a round trip"));
        }
    }
    Ok(())
}

/// The toy database: one row `[1, 2, 1]`, three one-column files over `Z_3`.
pub fn toy_db() -> Database {
    Database::new(Matrix::from_vec(1, 3, vec![1, 2, 1]).unwrap(), 3, 1, 3).unwrap()
}

fn valid_query<R: Rng>(rng: &mut R) -> Vec<u8> {
    let cols = rng.gen_range(1..60);
    let data = (0..3 * cols).map(|_| rng.gen_range(0..15)).collect();
    MatrixFile::new(Matrix::from_vec(3, cols, data).unwrap(), 15).unwrap().to_bytes()
}

fn frame(kind: u8, payload: &[u8]) -> Vec<u8> {
    WireFrame { kind, payload: payload.to_vec() }.encode()
}

/// Frames that are each malformed in a known way, for [`toy_db`].
pub fn malformed_corpus(count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let q = valid_query(&mut rng);
        let good = frame(MessageType::Query as u8, &q);
        let bad = match i % 12 {
            0 => good[..rng.gen_range(0..good.len())].to_vec(),
            1 => {
                let mut b = good;
                while &b[..4] == WIRE_MAGIC {
                    rng.fill(&mut b[..4]);
                }
                b
            }
            2 => {
                let kind = loop {
                    let k: u8 = rng.gen();
                    if k != MessageType::Query as u8 && k != MessageType::DbInfoReq as u8 {
                        break k;
                    }
                };
                frame(kind, &q)
            }
            3 => {
                let mut b = good;
                let len = rng.gen_range(MAX_PAYLOAD + 1..=u64::MAX);
                b[5..HEADER_LEN].copy_from_slice(&len.to_le_bytes());
                b
            }
            4 => {
                let mut b = good;
                b.extend((0..rng.gen_range(1..16)).map(|_| rng.gen::<u8>()));
                b
            }
            5 => {
                let mut p = q;
                p[rng.gen_range(0..8)] ^= 1 << rng.gen_range(0..8);
                frame(1, &p)
            }
            6 => {
                let cut = rng.gen_range(0..q.len() - 1);
                frame(1, &q[..cut])
            }
            7 => {
                let mut p = q;
                let slot = 32 + 4 * rng.gen_range(0..(p.len() - 32) / 4);
                p[slot..slot + 4].copy_from_slice(&rng.gen_range(15u32..=u32::MAX).to_le_bytes());
                frame(1, &p)
            }
            8 => {
                let mut p = q;
                let modulus: u64 = if rng.gen_bool(0.5) { 0 } else { rng.gen_range((1u64 << 32) + 1..=u64::MAX) };
                p[24..32].copy_from_slice(&modulus.to_le_bytes());
                frame(1, &p)
            }
            9 => {
                let rows = [0, 1, 2, 4, 5, 9][rng.gen_range(0..6)];
                let m = MatrixFile::new(Matrix::zeros(rows, rng.gen_range(1..10)), 15).unwrap();
                frame(1, &m.to_bytes())
            }
            10 => {
                let modulus = [2, 4, 10, 16, 20, 1 << 32][rng.gen_range(0..6)];
                let m = MatrixFile::new(Matrix::zeros(3, rng.gen_range(1..10)), modulus).unwrap();
                frame(1, &m.to_bytes())
            }
            _ => {
                let mut b: Vec<u8> = (0..rng.gen_range(0..64)).map(|_| rng.gen()).collect();
                if b.starts_with(WIRE_MAGIC) {
                    b[0] ^= 0xff;
                }
                b
            }
        };
        out.push(bad);
    }
    out
}

/// Every corpus frame must be answered with an error frame. Returns the number answered.
pub fn fuzz_server(count: usize, seed: u64) -> Result<usize, String> {
    let db = toy_db();
    for (i, bytes) in malformed_corpus(count, seed).iter().enumerate() {
        let reply = ringpir::pir_io::server::respond_to_bytes(&db, bytes);
        let f = WireFrame::decode(&reply).map_err(|e| format!("frame {i}: undecodable reply {e}"))?;
        if f.message_type() != Some(MessageType::Error) {
            return Err(format!("frame {i} was answered with type {}", f.kind));
        }
    }
    Ok(count)
}
