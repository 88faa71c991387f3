//! The worked toy instance over `Z_15[x]/<x^13 - 1>`: three one-entry files, `s = 2`, `r = 1`.
//!
//! Polynomials are kept as printed (highest degree first) and parsed on use. The six
//! `a`, `e` and `δ` values are listed in print order; consecutive pairs form the
//! `1 x 2` rows of files 1, 2 and 3.

use std::collections::VecDeque;

use crate::crtcode::CrtCyclicCode;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::outercode::OuterCode;
use crate::pir::{Database, FixedStream, PirParams, Shape};
use crate::poly::RingElem;
use crate::upoly::{self, Poly};
use crate::zmod::Modulus;

pub const N: usize = 13;
pub const M: u64 = 15;
pub const SHAPE: Shape = Shape { t: 3, l: 1, r: 1 };
pub const DB: [u64; 3] = [1, 2, 1];
pub const DESIRED: usize = 1;
pub const GAMMA: usize = 1;

/// Generator of the inner component over `Z_3`.
pub const G1: &str = "x^7 + x^5 + x^4 + 2x^3 + 2x^2 + 2";
/// Generator of the inner component over `Z_5`.
pub const G2: &str = "x^9 + 2x^8 + 4x^7 + 3x^5 + 2x^4 + x^2 + 3x + 4";
/// CRT of `G1` and `G2`.
pub const G_IN: &str = "6x^9 + 12x^8 + 4x^7 + 13x^5 + 7x^4 + 5x^3 + 11x^2 + 3x + 14";
/// `G_IN` as it appears in print, with `2x^2` in place of `11x^2`.
pub const G_IN_AS_PRINTED: &str = "6x^9 + 12x^8 + 4x^7 + 13x^5 + 7x^4 + 5x^3 + 2x^2 + 3x + 14";
pub const GT1: &str = "10x^7 + 5x^5 + 6x^4 + x^3 + 14x^2 + x + 11";
pub const GT2: &str = "10x^7 + 11x^5 + 13x^3 + 2x^2 + 10x + 14";
pub const MIX: [[u64; 2]; 2] = [[1, 1], [0, 1]];

pub const A: [&str; 6] = [
    "5x^12 + 11x^11 + 10x^10 + 13x^9 + 7x^8 + x^7 + 3x^6 + 14x^5 + 14x^4 + 7x^2 + 6x + 4",
    "8x^12 + 8x^11 + 12x^10 + 13x^9 + 11x^8 + 11x^7 + 6x^6 + x^5 + 2x^4 + 6x^3 + 5x^2 + 9x + 3",
    "5x^12 + 13x^11 + 4x^9 + 2x^8 + 14x^7 + 12x^6 + 10x^5 + 6x^3 + 5x^2 + 12x",
    "10x^12 + 4x^11 + 4x^9 + 14x^8 + 8x^7 + 6x^5 + 7x^4 + 12x^3 + 11x^2 + 6x + 9",
    "5x^12 + 3x^11 + 4x^10 + 10x^9 + 4x^8 + 9x^7 + 14x^6 + 12x^5 + 8x^4 + 9x^3 + 6x^2 + 6x",
    "9x^12 + 14x^11 + x^10 + 4x^9 + x^8 + 13x^7 + 8x^6 + 3x^5 + 13x^4 + 11x^3 + 2x^2 + 14x + 10",
];

pub const E: [&str; 6] = [
    "11x^12 + 9x^11 + 14x^10 + x^9 + 14x^8 + 12x^7 + 12x^6 + 6x^5 + 12x^4 + 11x^3 + 7x^2 + 2x + 9",
    "6x^12 + 14x^11 + 10x^10 + 13x^9 + 3x^8 + 7x^7 + 5x^6 + 3x^5 + 2x^4 + 2x^3 + 10x^2 + 6x + 9",
    "7x^12 + 6x^11 + 9x^10 + 4x^9 + 13x^8 + 3x^7 + 10x^6 + 2x^5 + 2x^4 + 11x^3 + x^2 + 9x + 13",
    "5x^12 + 3x^11 + 13x^10 + 4x^9 + 9x^8 + 6x^7 + 12x^6 + 13x^5 + 14x^4 + 6x^3 + 6x^2 + 12x + 2",
    "6x^12 + 14x^11 + 4x^10 + 2x^9 + x^8 + x^7 + 7x^6 + 14x^5 + 14x^4 + 11x^3 + 13x^2 + 5x + 13",
    "10x^12 + 5x^11 + 6x^10 + 3x^9 + 11x^8 + 9x^7 + 13x^6 + 12x^4 + x^3 + 14x^2 + 7x + 14",
];

pub const U: &str = "13x^12 + 14x^11 + x^10 + 3x^9 + 2x^8 + 2x^7 + 7x^6 + 7x^5 + 13x^4 + 6x^3 + 4x^2 + 3x";

pub const DELTA: [&str; 6] = [
    "10x^12 + 9x^11 + 10x^10 + 5x^9 + 9x^8 + 13x^7 + 9x^6 + 9x^5 + 12x^4 + 12x^3 + 11x^2 + 6x + 5",
    "13x^12 + 7x^11 + 14x^10 + 13x^9 + 6x^8 + 3x^7 + 5x^6 + 13x^5 + 7x^4 + x^3 + 12x^2 + 11x",
    "6x^12 + 6x^11 + 12x^10 + 8x^9 + 2x^8 + 10x^7 + 13x^6 + 13x^5 + 10x^4 + 10x^3 + 6x^2 + 9x + 9",
    "9x^12 + 4x^11 + 14x^10 + 2x^9 + 4x^8 + 4x^7 + 6x^6 + 4x^5 + x^3 + 3x^2 + 7x + 11",
    "4x^12 + 9x^11 + 12x^10 + 8x^9 + 10x^8 + 14x^7 + 5x^6 + 7x^5 + 11x^4 + 3x^2 + 8x + 14",
    "6x^12 + 10x^11 + 7x^10 + 8x^9 + 11x^7 + 11x^6 + 13x^5 + 11x^4 + 6x^3 + 5x + 2",
];

pub const Q: [[u64; 52]; 3] = [
    [4, 6, 7, 0, 14, 14, 3, 1, 7, 13, 10, 11, 5, 3, 9, 5, 6, 2, 1, 6, 11, 11, 13, 12, 8, 8, 5, 6, 11, 12, 12, 9, 9, 13, 9, 5, 10, 9, 10, 0, 11, 12, 1, 7, 13, 5, 3, 6, 13, 14, 7, 13],
    [0, 12, 5, 6, 0, 10, 12, 14, 2, 4, 0, 13, 5, 9, 6, 11, 12, 7, 6, 0, 8, 14, 4, 0, 4, 10, 9, 9, 6, 10, 10, 13, 13, 10, 2, 8, 12, 6, 6, 11, 7, 3, 1, 0, 4, 6, 4, 4, 2, 14, 4, 9],
    [0, 6, 6, 9, 8, 12, 14, 9, 4, 10, 4, 3, 5, 10, 14, 2, 11, 13, 3, 8, 13, 1, 4, 1, 14, 9, 14, 8, 3, 0, 11, 7, 5, 14, 10, 8, 12, 9, 4, 2, 5, 0, 6, 11, 13, 11, 11, 0, 8, 7, 10, 6],
];

pub const R: [u64; 52] = [4, 6, 8, 6, 7, 1, 11, 8, 0, 1, 14, 10, 5, 1, 5, 14, 11, 14, 1, 14, 10, 10, 10, 13, 0, 7, 7, 2, 11, 2, 13, 12, 10, 2, 8, 14, 1, 0, 11, 9, 0, 3, 9, 3, 4, 13, 7, 14, 10, 4, 10, 7];

pub const R1: [&str; 2] = [
    "5x^12 + 10x^11 + 14x^10 + x^9 + 8x^7 + 11x^6 + x^5 + 7x^4 + 6x^3 + 8x^2 + 6x + 4",
    "7x^12 + 13x^10 + 10x^9 + 10x^8 + 10x^7 + 14x^6 + x^5 + 14x^4 + 11x^3 + 14x^2 + 5x + 1",
];

pub const R2: [&str; 2] = [
    "11x^12 + x^10 + 14x^9 + 8x^8 + 2x^7 + 10x^6 + 12x^5 + 13x^4 + 2x^3 + 11x^2 + 2x + 7",
    "7x^12 + 10x^11 + 4x^10 + 10x^9 + 14x^8 + 7x^7 + 13x^6 + 4x^5 + 3x^4 + 9x^3 + 3x^2 + 9",
];

/// `R_2 - R_1 G_OUT`.
pub const STRIPPED: [&str; 2] = [
    "14x^12 + 4x^11 + 7x^10 + 14x^9 + 13x^8 + 6x^7 + x^6 + x^5 + 13x^4 + 5x^3 + 11x^2 + 13x + 3",
    "11x^12 + 10x^11 + 12x^10 + 9x^9 + 2x^8 + 13x^7 + 12x^6 + 14x^5 + 12x^4 + 6x^2 + 7x + 12",
];

/// Parity-check matrix of the inner code as printed.
pub const H: [[u64; 13]; 9] = [
    [1, 0, 0, 0, 0, 0, 0, 1, 0, 2, 11, 2, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 2, 11, 2],
    [0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 2, 4, 2],
    [0, 0, 0, 1, 0, 0, 0, 1, 1, 14, 2, 4, 10],
    [0, 0, 0, 0, 1, 0, 0, 2, 1, 8, 0, 6, 13],
    [0, 0, 0, 0, 0, 1, 0, 2, 2, 5, 0, 4, 6],
    [0, 0, 0, 0, 0, 0, 1, 0, 2, 11, 2, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 3, 0, 3, 9, 6, 6],
    [0, 0, 0, 0, 0, 0, 0, 0, 3, 9, 0, 9, 3],
];

/// First block of `R_2 - R_1 G_OUT` as a coefficient vector.
pub const S_BLOCK: [u64; 13] = [3, 13, 11, 5, 13, 1, 1, 6, 13, 14, 7, 4, 14];
/// `S_BLOCK · H^T`.
pub const S_TIMES_HT: [u64; 9] = [2, 7, 0, 0, 11, 14, 14, 6, 3];

pub fn poly(text: &str) -> Poly {
    upoly::parse(text, M).expect("fixture polynomials parse")
}

pub fn elem(text: &str) -> RingElem {
    RingElem::from_poly(&poly(text), N, M)
}

pub fn modulus() -> Modulus {
    Modulus::new(&[(3, 1), (5, 1)]).expect("15 = 3 5")
}

pub fn inner() -> Result<CrtCyclicCode> {
    CrtCyclicCode::from_generators(&modulus(), N, &[poly(G_IN)])
}

pub fn outer() -> Result<OuterCode> {
    let c1 = CrtCyclicCode::from_generators(&modulus(), N, &[poly(GT1)])?;
    let c2 = CrtCyclicCode::from_generators(&modulus(), N, &[poly(GT2)])?;
    OuterCode::build(vec![c1, c2], MIX.iter().map(|r| r.to_vec()).collect())
}

pub fn h_matrix() -> Matrix {
    Matrix::from_rows(&H.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), N).expect("9 x 13")
}

/// The toy parameters. They violate the technical conditions, so compliance is waived;
/// recovery uses the printed parity-check matrix.
pub fn params() -> Result<PirParams> {
    PirParams::new(inner()?, outer()?, SHAPE, true)?.with_parity_check(h_matrix())
}

pub fn database() -> Result<Database> {
    Database::new(Matrix::from_vec(1, 3, DB.to_vec())?, 3, 1, modulus().m_prime())
}

/// Replays the printed `a`, `e` and `u` values in draw order.
pub fn stream() -> FixedStream {
    FixedStream {
        gamma: GAMMA,
        a: A.iter().map(|s| elem(s)).collect::<VecDeque<_>>(),
        e: E.iter().map(|s| elem(s)).collect::<VecDeque<_>>(),
        u: VecDeque::from([elem(U)]),
    }
}

pub fn query_matrix() -> Matrix {
    Matrix::from_rows(&Q.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 52).expect("3 x 52")
}

pub fn response_matrix() -> Matrix {
    Matrix::from_vec(1, 52, R.to_vec()).expect("1 x 52")
}
