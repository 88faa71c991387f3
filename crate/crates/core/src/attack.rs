//! Row-deletion rank-profile attack and a small field-based target it succeeds against.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{PirError, Result};
use crate::linalg::{module_type_of, Matrix};
use crate::pir::{gen_query, PirParams, RngRandomness};
use crate::upoly::{self, Poly};
use crate::zmod::{Modulus, PrimePower};

/// Module type of the row space modulo each prime power of `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankProfile {
    pub per_prime: Vec<(PrimePower, Vec<usize>)>,
}

impl RankProfile {
    /// `log_{p} |span|` for each prime.
    pub fn log_sizes(&self) -> Vec<u64> {
        self.per_prime
            .iter()
            .map(|(f, ks)| ks.iter().enumerate().map(|(j, &k)| ((f.e as usize - j) * k) as u64).sum())
            .collect()
    }

    /// `log_2 |span|`.
    pub fn bits(&self) -> f64 {
        self.per_prime
            .iter()
            .zip(self.log_sizes())
            .map(|((f, _), l)| l as f64 * (f.p as f64).log2())
            .sum()
    }

    /// Number of minimal generators per prime; plain rank when `m` is prime.
    pub fn ranks(&self) -> Vec<usize> {
        self.per_prime.iter().map(|(_, ks)| ks.iter().sum()).collect()
    }
}

pub fn rank_profile(mat: &Matrix, modulus: &Modulus) -> RankProfile {
    RankProfile {
        per_prime: modulus.factors().iter().map(|&f| (f, module_type_of(mat, f))).collect(),
    }
}

/// Profiles after deleting each file's block of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub full: RankProfile,
    pub after_deletion: Vec<RankProfile>,
    /// `log_2` of how much the span shrinks when each block is removed.
    pub drops: Vec<f64>,
}

impl ScanReport {
    /// True when every deletion leaves the same profile.
    pub fn identical(&self) -> bool {
        self.after_deletion.windows(2).all(|w| w[0] == w[1])
    }

    /// Files (1-based) whose deletion shrinks the span the most.
    pub fn best_guesses(&self) -> Vec<usize> {
        let max = self.drops.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..self.drops.len()).filter(|&i| self.drops[i] == max).map(|i| i + 1).collect()
    }

    /// The file singled out by a unique largest drop, if any.
    pub fn distinguished(&self) -> Option<usize> {
        match self.best_guesses().as_slice() {
            [only] if self.drops.len() > 1 => Some(*only),
            _ => None,
        }
    }
}

pub fn row_deletion_scan(q: &Matrix, modulus: &Modulus, rows_per_file: usize) -> Result<ScanReport> {
    if rows_per_file == 0 || q.rows() % rows_per_file != 0 {
        return Err(PirError::DimensionMismatch(format!(
            "{} rows do not split into blocks of {rows_per_file}",
            q.rows()
        )));
    }
    let full = rank_profile(q, modulus);
    let full_bits = full.bits();
    let t = q.rows() / rows_per_file;
    let mut after_deletion = Vec::with_capacity(t);
    let mut drops = Vec::with_capacity(t);
    for i in 0..t {
        let rest = q.without_rows(i * rows_per_file..(i + 1) * rows_per_file);
        let profile = rank_profile(&rest, modulus);
        drops.push(full_bits - profile.bits());
        after_deletion.push(profile);
    }
    Ok(ScanReport { full, after_deletion, drops })
}

// ---------------------------------------------------------------------------
// field baseline

/// `F_{q^s}` as `F_q[y]/<f>`, elements stored as coefficient vectors of length `s`.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    q: u64,
    s: usize,
    modulus: Poly,
}

impl ExtensionField {
    /// Uses the lexicographically first monic irreducible of degree `s`.
    pub fn new(q: u64, s: usize) -> Result<Self> {
        PrimePower::new(q, 1)?;
        if s == 0 {
            return Err(PirError::Format("extension degree must be positive".into()));
        }
        let total = q.checked_pow(s as u32).ok_or_else(|| PirError::Overflow("q^s".into()))?;
        for tail in 0..total {
            let mut f = Vec::with_capacity(s + 1);
            let mut x = tail;
            for _ in 0..s {
                f.push(x % q);
                x /= q;
            }
            f.push(1);
            if is_irreducible(&f, q)? {
                return Ok(ExtensionField { q, s, modulus: f });
            }
        }
        Err(PirError::Format(format!("no irreducible of degree {s} over F_{q}")))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let prod = upoly::mul(a, b, self.q);
        let r = upoly::rem(&prod, &self.modulus, self.q).expect("modulus is monic");
        upoly::to_len(&r, self.s)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.q).collect()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.s).map(|_| rng.gen_range(0..self.q)).collect()
    }

    /// Random element of the span of basis vectors `y^j`, `j in range`.
    pub fn random_in<R: Rng + ?Sized>(&self, range: std::ops::Range<usize>, rng: &mut R) -> Vec<u64> {
        (0..self.s).map(|j| if range.contains(&j) { rng.gen_range(0..self.q) } else { 0 }).collect()
    }
}

/// Ben-Or: `f` of degree `s` is irreducible iff `gcd(f, y^{q^i} - y) = 1` for `i <= s/2`.
fn is_irreducible(f: &[u64], q: u64) -> Result<bool> {
    let s = upoly::degree(f).unwrap_or(0);
    let mut power = vec![0, 1];
    for _ in 0..s / 2 {
        power = upoly::pow_mod(&power, q, f, q)?;
        let g = upoly::gcd_field(f, &upoly::sub(&power, &[0, 1], q), q)?;
        if upoly::degree(&g) != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parameters of the simplified field-based query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaselineParams {
    pub q: u64,
    /// Extension degree.
    pub s: usize,
    /// Dimension of the masking subspace `V` over `F_q`.
    pub v: usize,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub rows_per_file: usize,
}

impl BaselineParams {
    pub const DEFAULT_ROWS_PER_FILE: usize = 16;

    pub fn new(q: u64, s: usize, v: usize, n: usize, k: usize, t: usize) -> Self {
        BaselineParams { q, s, v, n, k, t, rows_per_file: Self::DEFAULT_ROWS_PER_FILE }
    }
}

/// A query `W + E + U` over `F_{q^s}`, expanded to `F_q`: `(t · rows_per_file) x (n s)`.
///
/// `W` rows are random codewords of a random systematic `[n, k]` code with columns permuted;
/// `E` takes values in `V = <1, y, ..., y^{v-1}>` off the information set `I`;
/// `U` takes values in `<y^v, ..., y^{s-1}>` on `I`, for the rows of file `d` only.
pub fn field_baseline_query<R: Rng + ?Sized>(
    params: BaselineParams,
    d: usize,
    with_payload: bool,
    rng: &mut R,
) -> Result<Matrix> {
    let BaselineParams { q, s, v, n, k, t, rows_per_file } = params;
    if v >= s || k == 0 || k > n || t == 0 || rows_per_file == 0 {
        return Err(PirError::IncompatibleDimensions(format!("q={q} s={s} v={v} n={n} k={k} t={t}")));
    }
    if d == 0 || d > t {
        return Err(PirError::InvalidFileIndex(d, t));
    }
    let field = ExtensionField::new(q, s)?;
    let mut columns: Vec<usize> = (0..n).collect();
    columns.shuffle(rng);
    let info_set = &columns[..k];
    let mut in_info = vec![false; n];
    for &c in info_set {
        in_info[c] = true;
    }
    // generator: identity on the information set, random elsewhere
    let mut gen = vec![vec![vec![0u64; s]; n]; k];
    for (i, row) in gen.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            if c == info_set[i] {
                entry[0] = 1;
            } else if !in_info[c] {
                *entry = field.random(rng);
            }
        }
    }
    let mut rows = Vec::with_capacity(t * rows_per_file);
    for file in 1..=t {
        for _ in 0..rows_per_file {
            let msg: Vec<Vec<u64>> = (0..k).map(|_| field.random(rng)).collect();
            let mut word = vec![vec![0u64; s]; n];
            for (mi, grow) in msg.iter().zip(&gen) {
                for (dst, g) in word.iter_mut().zip(grow) {
                    *dst = field.add(dst, &field.mul(mi, g));
                }
            }
            for (c, entry) in word.iter_mut().enumerate() {
                if !in_info[c] {
                    *entry = field.add(entry, &field.random_in(0..v, rng));
                } else if with_payload && file == d {
                    *entry = field.add(entry, &field.random_in(v..s, rng));
                }
            }
            rows.push(word.concat());
        }
    }
    Matrix::from_rows(&rows, n * s)
}

/// What [`distinguishing_advantage`] attacks.
pub enum InstanceKind<'a> {
    Ring(&'a PirParams),
    Baseline(BaselineParams),
}

impl InstanceKind<'_> {
    fn files(&self) -> usize {
        match self {
            InstanceKind::Ring(p) => p.shape().t,
            InstanceKind::Baseline(b) => b.t,
        }
    }
}

/// Success rate of the largest-drop guess, minus `1/t`, clamped at zero.
///
/// Ties count fractionally: a guess set of size `g` containing `d` scores `1/g`.
pub fn distinguishing_advantage<R: Rng + ?Sized>(kind: &InstanceKind<'_>, trials: usize, rng: &mut R) -> Result<f64> {
    if trials == 0 {
        return Err(PirError::Format("at least one trial is needed".into()));
    }
    let t = kind.files();
    if t <= 1 {
        return Ok(0.0);
    }
    let mut score = 0.0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=t);
        let report = match kind {
            InstanceKind::Ring(params) => {
                let (q, _) = gen_query(params, d, &mut RngRandomness(&mut *rng))?;
                row_deletion_scan(&q, params.modulus(), params.shape().r)?
            }
            InstanceKind::Baseline(b) => {
                let q = field_baseline_query(*b, d, true, rng)?;
                row_deletion_scan(&q, &Modulus::prime(b.q)?, b.rows_per_file)?
            }
        };
        let guesses = report.best_guesses();
        if guesses.contains(&d) {
            score += 1.0 / guesses.len() as f64;
        }
    }
    Ok((score / trials as f64 - 1.0 / t as f64).max(0.0))
}
