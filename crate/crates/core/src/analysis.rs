//! Communication cost, PIR rate and the cyclotomic work-factor bound.

use num_rational::Ratio;

use crate::chaincode::cyclotomic_cosets;
use crate::error::{PirError, Result};
use crate::zmod::Modulus;

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    /// `2 t r n s log2 m`; zero when `t` is not given.
    pub upload_bits: f64,
    /// `2 L n s log2 m`; zero when `L` is unbounded.
    pub download_bits: f64,
    /// `L r log2 m'`.
    pub file_bits: f64,
    /// File bits over total traffic, as a fraction when `log m' / log m` is rational.
    /// With `L` unbounded this is the limit, equal to the approximate rate.
    pub exact_rate: Option<Ratio<u64>>,
    pub exact_rate_f64: f64,
    /// `r log m' / (2 n s log m)`.
    pub approx_rate: f64,
    pub approx_rate_exact: Option<Ratio<u64>>,
}

/// `log m' / log m` as a fraction. It is rational exactly when all prime exponents agree, and then equals `1/e`.
pub fn log_ratio(modulus: &Modulus) -> Option<Ratio<u64>> {
    let e = modulus.factors()[0].e;
    modulus.factors().iter().all(|f| f.e == e).then(|| Ratio::new(1, u64::from(e)))
}

/// Rate of one retrieval. `l = None` takes the limit of many file rows.
pub fn pir_rate(modulus: &Modulus, n: usize, s: usize, r: usize, t: usize, l: Option<usize>) -> Result<RateReport> {
    if n == 0 || s == 0 || r == 0 || t == 0 || l == Some(0) {
        return Err(PirError::IncompatibleDimensions("all dimensions must be positive".into()));
    }
    if r > s {
        return Err(PirError::IncompatibleDimensions(format!("r = {r} exceeds s = {s}")));
    }
    let log_m = (modulus.m() as f64).log2();
    let log_mp = (modulus.m_prime() as f64).log2();
    let (n64, s64, r64, t64) = (n as u64, s as u64, r as u64, t as u64);
    let approx_rate = r as f64 * log_mp / (2.0 * n as f64 * s as f64 * log_m);
    let approx_rate_exact = log_ratio(modulus).map(|lr| Ratio::new(r64, 2 * n64 * s64) * lr);
    let upload_bits = 2.0 * (t * r * n * s) as f64 * log_m;
    let (download_bits, file_bits, exact_rate, exact_rate_f64) = match l {
        None => (0.0, 0.0, approx_rate_exact, approx_rate),
        Some(l) => {
            let l64 = l as u64;
            let download = 2.0 * (l * n * s) as f64 * log_m;
            let file = (l * r) as f64 * log_mp;
            let exact = approx_rate_exact.map(|a| a * Ratio::new(l64, t64 * r64 + l64));
            (download, file, exact, file / (upload_bits + download))
        }
    };
    Ok(RateReport { upload_bits, download_bits, file_bits, exact_rate, exact_rate_f64, approx_rate, approx_rate_exact })
}

/// Guessing bound from counting cyclotomic cosets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkFactor {
    /// `(p_i, T_i)`: cosets of `p_i` acting on `Z_n`.
    pub cosets: Vec<(u64, usize)>,
    pub s: usize,
}

impl WorkFactor {
    /// `log2 B = sum T_i`; at least `2^{T_i}` codes per prime.
    pub fn log2_per_code(&self) -> u64 {
        self.cosets.iter().map(|&(_, t)| t as u64).sum()
    }

    /// `log2 B^{s+1}`: inner code plus `s` constituents.
    pub fn log2_total(&self) -> u64 {
        self.log2_per_code() * (self.s as u64 + 1)
    }

    /// Upper bound on guessing one code, `1/B`.
    pub fn guess_probability_per_code(&self) -> f64 {
        (-(self.log2_per_code() as f64)).exp2()
    }
}

pub fn work_factor(modulus: &Modulus, n: usize, s: usize) -> Result<WorkFactor> {
    let cosets = modulus
        .factors()
        .iter()
        .map(|f| cyclotomic_cosets(n, f.p).map(|c| (f.p, c.count())))
        .collect::<Result<Vec<_>>>()?;
    Ok(WorkFactor { cosets, s })
}
