//! Setup, query generation, server response and recovery.

use std::collections::VecDeque;

use rand::Rng;

use crate::chaincode::factor_xn_minus_1;
use crate::crtcode::{self, CrtCyclicCode};
use crate::error::{PirError, Result};
use crate::linalg::Matrix;
use crate::outercode::{random_unit_upper, ConditionReport, OuterCode};
use crate::poly::{contract, expand, Ring, RingElem};
use crate::zmod::{crt_lift, mod_inv, Modulus};

/// `(t·r) x (2ns)` over `Z_m`.
pub type QueryMatrix = Matrix;
/// `L x (2ns)` over `Z_m`.
pub type ResponseMatrix = Matrix;

/// Attempts made by [`setup_random`] before reporting failure.
pub const DEFAULT_SETUP_ATTEMPTS: usize = 400;

/// Public database shape: `t` files of `L x r` entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub t: usize,
    pub l: usize,
    pub r: usize,
}

/// Everything the client keeps; only `modulus` and `shape` are public.
#[derive(Clone, Debug)]
pub struct PirParams {
    modulus: Modulus,
    n: usize,
    inner: CrtCyclicCode,
    outer: OuterCode,
    shape: Shape,
    allow_noncompliant: bool,
    report: ConditionReport,
    h_in: Matrix,
    torsion: CrtCyclicCode,
    u_space: CrtCyclicCode,
}

impl PartialEq for PirParams {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
            && self.outer == other.outer
            && self.shape == other.shape
            && self.allow_noncompliant == other.allow_noncompliant
    }
}

impl PirParams {
    /// Validates an explicit instance. Non-compliant instances need `allow_noncompliant`.
    pub fn new(inner: CrtCyclicCode, outer: OuterCode, shape: Shape, allow_noncompliant: bool) -> Result<Self> {
        if inner.modulus() != outer.modulus() || inner.n() != outer.n() {
            return Err(PirError::AmbientMismatch);
        }
        check_shape(shape, outer.s())?;
        let modulus = inner.modulus().clone();
        let n = inner.n();
        Ring::new(modulus.clone(), n)?;
        let report = outer.validate(&inner)?;
        if !report.overall && !allow_noncompliant {
            return Err(PirError::NonCompliant(report.failures().join("; ")));
        }
        let h_in = inner.parity_check()?.clone();
        let torsion = inner.torsion_part()?;
        let u_space = crtcode::u_space(outer.constituents().last().expect("s >= 1"), &inner)?;
        Ok(PirParams { modulus, n, inner, outer, shape, allow_noncompliant, report, h_in, torsion, u_space })
    }

    /// Replaces the parity-check matrix used during recovery (any generator matrix of `C_IN^⊥` works).
    pub fn with_parity_check(mut self, h: Matrix) -> Result<Self> {
        if h.cols() != self.n {
            return Err(PirError::DimensionMismatch(format!("H has {} columns, n = {}", h.cols(), self.n)));
        }
        self.h_in = h;
        Ok(self)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.outer.s()
    }

    pub fn inner(&self) -> &CrtCyclicCode {
        &self.inner
    }

    pub fn outer(&self) -> &OuterCode {
        &self.outer
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn allow_noncompliant(&self) -> bool {
        self.allow_noncompliant
    }

    pub fn report(&self) -> &ConditionReport {
        &self.report
    }

    pub fn h_in(&self) -> &Matrix {
        &self.h_in
    }

    pub fn ring(&self) -> Ring {
        Ring::new(self.modulus.clone(), self.n).expect("validated at construction")
    }

    /// Width of a query row, `2ns`.
    pub fn width(&self) -> usize {
        2 * self.n * self.s()
    }
}

fn check_shape(shape: Shape, s: usize) -> Result<()> {
    if shape.t == 0 || shape.l == 0 || shape.r == 0 {
        return Err(PirError::IncompatibleDimensions(format!(
            "t = {}, L = {}, r = {} must all be positive",
            shape.t, shape.l, shape.r
        )));
    }
    if shape.r > s {
        return Err(PirError::IncompatibleDimensions(format!("r = {} exceeds s = {s}", shape.r)));
    }
    Ok(())
}

/// Searches random divisor towers of `x^n - 1` until the technical conditions hold.
///
/// Per prime and per lifted factor, an inner exponent and `s` constituent exponents are drawn
/// from `0..=e`; sorting the constituent draws makes the constituents nested.
pub fn setup_random<R: Rng + ?Sized>(
    modulus: &Modulus,
    n: usize,
    s: usize,
    shape: Shape,
    attempts: usize,
    rng: &mut R,
) -> Result<PirParams> {
    if s == 0 {
        return Err(PirError::IncompatibleDimensions("s must be positive".into()));
    }
    check_shape(shape, s)?;
    Ring::new(modulus.clone(), n)?;
    let factor_counts: Vec<usize> = modulus
        .factors()
        .iter()
        .map(|f| factor_xn_minus_1(n, f.p, f.e).map(|v| v.len()))
        .collect::<Result<_>>()?;
    for _ in 0..attempts {
        let mut inner_exps = Vec::new();
        let mut outer_exps = vec![Vec::new(); s];
        for (f, &count) in modulus.factors().iter().zip(&factor_counts) {
            inner_exps.push((0..count).map(|_| rng.gen_range(0..=f.e)).collect::<Vec<u32>>());
            let mut per_constituent = vec![vec![0u32; count]; s];
            for k in 0..count {
                let mut draws: Vec<u32> = (0..s).map(|_| rng.gen_range(0..=f.e)).collect();
                draws.sort_unstable();
                for (i, a) in draws.into_iter().enumerate() {
                    per_constituent[i][k] = a;
                }
            }
            for (i, exps) in per_constituent.into_iter().enumerate() {
                outer_exps[i].push(exps);
            }
        }
        if !quick_screen(modulus, &inner_exps, &outer_exps) {
            continue;
        }
        let inner = CrtCyclicCode::from_exponents(modulus, n, &inner_exps)?;
        let constituents = outer_exps
            .iter()
            .map(|e| CrtCyclicCode::from_exponents(modulus, n, e))
            .collect::<Result<Vec<_>>>()?;
        let mix = random_unit_upper(s, modulus.m(), rng);
        let outer = OuterCode::build(constituents, mix)?;
        match PirParams::new(inner, outer, shape, false) {
            Ok(p) => return Ok(p),
            Err(PirError::NonCompliant(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PirError::NoCompliantInstance(attempts))
}

/// Cheap necessary conditions on raw exponents, so hopeless draws skip the linear algebra.
fn quick_screen(modulus: &Modulus, inner: &[Vec<u32>], outer: &[Vec<Vec<u32>>]) -> bool {
    modulus.factors().iter().enumerate().all(|(k, f)| {
        let e = f.e;
        let non_hensel = outer.iter().all(|c| c[k].iter().any(|&a| a > 0 && a < e));
        // u lives in p R and must escape the inner code: needs some factor with inner exponent >= 2
        let room = inner[k].iter().any(|&a| a >= 2);
        e > 1 && non_hensel && room
    })
}

/// Server-side data: `L x (t·r)` over `Z_{m'}`, files stored side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database {
    entries: Matrix,
    t: usize,
    r: usize,
    m_prime: u64,
}

impl Database {
    pub fn new(entries: Matrix, t: usize, r: usize, m_prime: u64) -> Result<Self> {
        if t == 0 || r == 0 || entries.rows() == 0 {
            return Err(PirError::IncompatibleDimensions("empty database".into()));
        }
        if entries.cols() != t * r {
            return Err(PirError::DimensionMismatch(format!(
                "database has {} columns, expected t r = {}",
                entries.cols(),
                t * r
            )));
        }
        if let Some(&bad) = entries.data().iter().find(|&&x| x >= m_prime) {
            return Err(PirError::Format(format!("entry {bad} is not below m' = {m_prime}")));
        }
        Ok(Database { entries, t, r, m_prime })
    }

    pub fn random<R: Rng + ?Sized>(shape: Shape, m_prime: u64, rng: &mut R) -> Self {
        let data = (0..shape.l * shape.t * shape.r).map(|_| rng.gen_range(0..m_prime)).collect();
        let entries = Matrix::from_vec(shape.l, shape.t * shape.r, data).expect("sized above");
        Database { entries, t: shape.t, r: shape.r, m_prime }
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn shape(&self) -> Shape {
        Shape { t: self.t, l: self.entries.rows(), r: self.r }
    }

    pub fn m_prime(&self) -> u64 {
        self.m_prime
    }

    /// File `d` (1-based) as an `L x r` matrix.
    pub fn file(&self, d: usize) -> Result<Matrix> {
        if d == 0 || d > self.t {
            return Err(PirError::InvalidFileIndex(d, self.t));
        }
        Ok(self.entries.select_cols((d - 1) * self.r..d * self.r))
    }
}

/// The client's per-query secrets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySecrets {
    /// Desired file, 1-based.
    pub d: usize,
    /// Column offset of the payload, 1-based in `1..=s-r+1`.
    pub gamma: usize,
    /// `a[i][k][j]`: file `i`, row `k`, column `j`.
    pub a: Vec<Vec<Vec<RingElem>>>,
    pub e: Vec<Vec<Vec<RingElem>>>,
    /// `u[λ]` sits at row `λ`, column `γ + λ` of file `d`.
    pub u: Vec<RingElem>,
}

/// Source of every random choice made by [`gen_query`], in draw order:
/// `gamma`, then `A` entries, then `E` entries, then `U` entries, each row-major.
pub trait QueryRandomness {
    /// Column offset in `1..=choices`.
    fn gamma(&mut self, choices: usize) -> Result<usize>;
    /// Element of `m' R`.
    fn a_entry(&mut self, ring: &Ring) -> Result<RingElem>;
    /// Element of `nf(C_IN)`, given that code.
    fn e_entry(&mut self, torsion: &CrtCyclicCode) -> Result<RingElem>;
    /// Payload element, given `nf(C̃_s ∩ C_IN^⊥)` and `C_IN`.
    fn u_entry(&mut self, space: &CrtCyclicCode, inner: &CrtCyclicCode) -> Result<RingElem>;
}

/// Draws everything from a random generator.
pub struct RngRandomness<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> QueryRandomness for RngRandomness<'_, R> {
    fn gamma(&mut self, choices: usize) -> Result<usize> {
        Ok(self.0.gen_range(1..=choices))
    }

    fn a_entry(&mut self, ring: &Ring) -> Result<RingElem> {
        Ok(ring.random_multiple(ring.modulus().m_prime(), self.0))
    }

    fn e_entry(&mut self, torsion: &CrtCyclicCode) -> Result<RingElem> {
        Ok(torsion.sample_codeword(self.0))
    }

    fn u_entry(&mut self, space: &CrtCyclicCode, inner: &CrtCyclicCode) -> Result<RingElem> {
        crtcode::sample_u_in(space, inner, self.0)
    }
}

/// Replays fixed values, e.g. published test vectors.
#[derive(Clone, Debug, Default)]
pub struct FixedStream {
    pub gamma: usize,
    pub a: VecDeque<RingElem>,
    pub e: VecDeque<RingElem>,
    pub u: VecDeque<RingElem>,
}

fn exhausted(what: &str) -> PirError {
    PirError::EmptySampleSet(format!("fixed stream ran out of {what} values"))
}

impl QueryRandomness for FixedStream {
    fn gamma(&mut self, choices: usize) -> Result<usize> {
        if self.gamma == 0 || self.gamma > choices {
            return Err(PirError::Format(format!("fixed gamma {} outside 1..={choices}", self.gamma)));
        }
        Ok(self.gamma)
    }

    fn a_entry(&mut self, _ring: &Ring) -> Result<RingElem> {
        self.a.pop_front().ok_or_else(|| exhausted("a"))
    }

    fn e_entry(&mut self, _torsion: &CrtCyclicCode) -> Result<RingElem> {
        self.e.pop_front().ok_or_else(|| exhausted("e"))
    }

    fn u_entry(&mut self, _space: &CrtCyclicCode, _inner: &CrtCyclicCode) -> Result<RingElem> {
        self.u.pop_front().ok_or_else(|| exhausted("u"))
    }
}

/// Builds `Q = [A ‖ Δ]` for file `d`, with `Δ = A G_OUT + E + U`.
pub fn gen_query(
    params: &PirParams,
    d: usize,
    rnd: &mut dyn QueryRandomness,
) -> Result<(QueryMatrix, QuerySecrets)> {
    let Shape { t, r, .. } = params.shape;
    if d == 0 || d > t {
        return Err(PirError::InvalidFileIndex(d, t));
    }
    let s = params.s();
    let ring = params.ring();
    let gamma = rnd.gamma(s - r + 1)?;
    let mut a = vec![vec![Vec::with_capacity(s); r]; t];
    for row in a.iter_mut().flatten() {
        for _ in 0..s {
            row.push(rnd.a_entry(&ring)?);
        }
    }
    let mut e = vec![vec![Vec::with_capacity(s); r]; t];
    for row in e.iter_mut().flatten() {
        for _ in 0..s {
            row.push(rnd.e_entry(&params.torsion)?);
        }
    }
    let u = (0..r)
        .map(|_| rnd.u_entry(&params.u_space, &params.inner))
        .collect::<Result<Vec<_>>>()?;
    let secrets = QuerySecrets { d, gamma, a, e, u };
    let q = assemble_query(params, &secrets)?;
    Ok((q, secrets))
}

/// The per-file `Δ^i` rows implied by a set of secrets.
pub fn delta_rows(params: &PirParams, secrets: &QuerySecrets) -> Result<Vec<Vec<Vec<RingElem>>>> {
    let Shape { t, r, .. } = params.shape;
    let s = params.s();
    check_secrets(params, secrets)?;
    let mut out = Vec::with_capacity(t);
    for i in 0..t {
        let mut rows = Vec::with_capacity(r);
        for k in 0..r {
            let mut delta = params.outer.apply(&secrets.a[i][k])?;
            for j in 0..s {
                delta[j] = delta[j].add(&secrets.e[i][k][j])?;
            }
            if i + 1 == secrets.d {
                let j = secrets.gamma - 1 + k;
                delta[j] = delta[j].add(&secrets.u[k])?;
            }
            rows.push(delta);
        }
        out.push(rows);
    }
    Ok(out)
}

/// Expands `[A ‖ Δ]` into the `Z_m` query matrix.
pub fn assemble_query(params: &PirParams, secrets: &QuerySecrets) -> Result<QueryMatrix> {
    let deltas = delta_rows(params, secrets)?;
    let mut rows = Vec::new();
    for (a_file, d_file) in secrets.a.iter().zip(&deltas) {
        for (a_row, d_row) in a_file.iter().zip(d_file) {
            let mut flat = expand(a_row);
            flat.extend(expand(d_row));
            rows.push(flat);
        }
    }
    Matrix::from_rows(&rows, params.width())
}

fn check_secrets(params: &PirParams, secrets: &QuerySecrets) -> Result<()> {
    let Shape { t, r, .. } = params.shape;
    let s = params.s();
    let (n, m) = (params.n, params.modulus.m());
    let well_formed = |blocks: &Vec<Vec<Vec<RingElem>>>| {
        blocks.len() == t
            && blocks.iter().all(|f| {
                f.len() == r && f.iter().all(|row| row.len() == s && row.iter().all(|x| x.n() == n && x.q() == m))
            })
    };
    if secrets.d == 0 || secrets.d > t {
        return Err(PirError::InvalidFileIndex(secrets.d, t));
    }
    if secrets.gamma == 0 || secrets.gamma + r - 1 > s {
        return Err(PirError::DimensionMismatch(format!("gamma = {} does not fit s = {s}", secrets.gamma)));
    }
    if !well_formed(&secrets.a) || !well_formed(&secrets.e) || secrets.u.len() != r {
        return Err(PirError::DimensionMismatch("secrets do not match the parameter shape".into()));
    }
    if secrets.u.iter().any(|x| x.n() != n || x.q() != m) {
        return Err(PirError::MixedAmbient);
    }
    Ok(())
}

/// `R = DB · Q` over `Z_m`.
pub fn server_respond(db: &Database, q: &QueryMatrix, m: u64) -> Result<ResponseMatrix> {
    if q.rows() != db.entries.cols() {
        return Err(PirError::DimensionMismatch(format!(
            "query has {} rows, database has t r = {}",
            q.rows(),
            db.entries.cols()
        )));
    }
    db.entries.mul_mod(q, m)
}

/// `S = R_2 - R_1 G_OUT`, one ring vector of length `s` per response row.
pub fn strip_outer(params: &PirParams, response: &ResponseMatrix) -> Result<Vec<Vec<RingElem>>> {
    if response.cols() != params.width() {
        return Err(PirError::DimensionMismatch(format!(
            "response has {} columns, expected 2ns = {}",
            response.cols(),
            params.width()
        )));
    }
    let (n, m, s) = (params.n, params.modulus.m(), params.s());
    response
        .iter_rows()
        .map(|row| {
            let r1 = contract(&row[..n * s], n, m)?;
            let r2 = contract(&row[n * s..], n, m)?;
            let masked = params.outer.apply(&r1)?;
            r2.iter().zip(&masked).map(|(a, b)| a.sub(b)).collect()
        })
        .collect()
}

/// Recovers file `d` as an `L x r` matrix over `Z_{m'}`.
pub fn recover(params: &PirParams, secrets: &QuerySecrets, response: &ResponseMatrix) -> Result<Matrix> {
    check_secrets(params, secrets)?;
    let stripped = strip_outer(params, response)?;
    let m = params.modulus.m();
    let r = params.shape.r;
    let targets: Vec<Vec<u64>> = secrets
        .u
        .iter()
        .map(|u| params.h_in.vec_mul_transposed(u.coeffs(), m))
        .collect();
    let mut out = Matrix::zeros(stripped.len(), r);
    for (row_idx, s_row) in stripped.iter().enumerate() {
        for (lambda, target) in targets.iter().enumerate() {
            let block = &s_row[secrets.gamma - 1 + lambda];
            let observed = params.h_in.vec_mul_transposed(block.coeffs(), m);
            let x = solve_scalar(&params.modulus, target, &observed)
                .map_err(|kind| kind.at(row_idx, lambda))?;
            out.set(row_idx, lambda, x);
        }
    }
    Ok(out)
}

/// Why a scalar solve failed, before row/column context is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveFailure {
    NoSolution,
    Ambiguous,
}

impl SolveFailure {
    fn at(self, row: usize, col: usize) -> PirError {
        match self {
            SolveFailure::NoSolution => PirError::NoSolution { row, col },
            SolveFailure::Ambiguous => PirError::AmbiguousSolution { row, col },
        }
    }
}

/// Finds `x in Z_{m'}` with `x · c ≡ v (mod p^e)` for every prime power of `m`.
///
/// Per prime, let `p^k` be the smallest power dividing all of `c`; the system pins `x`
/// modulo `p^{e-k}`, hence modulo `p` whenever `k < e`.
pub fn solve_scalar(modulus: &Modulus, c: &[u64], v: &[u64]) -> std::result::Result<u64, SolveFailure> {
    let mut residues = Vec::with_capacity(modulus.factors().len());
    let mut primes = Vec::with_capacity(modulus.factors().len());
    for f in modulus.factors() {
        let q = f.q;
        let cs: Vec<u64> = c.iter().map(|&x| x % q).collect();
        let vs: Vec<u64> = v.iter().map(|&x| x % q).collect();
        let pivot = cs
            .iter()
            .enumerate()
            .min_by_key(|(_, &x)| f.valuation(x))
            .filter(|(_, &x)| x != 0);
        let Some((idx, &cp)) = pivot else {
            return Err(if vs.iter().all(|&x| x == 0) {
                SolveFailure::Ambiguous
            } else {
                SolveFailure::NoSolution
            });
        };
        let k = f.valuation(cp);
        let pk = f.pow(k);
        if vs[idx] % pk != 0 {
            return Err(SolveFailure::NoSolution);
        }
        let modulus_rest = f.pow(f.e - k);
        let unit = (cp / pk) % modulus_rest;
        let inv = mod_inv(unit, modulus_rest).map_err(|_| SolveFailure::NoSolution)?;
        let y = ((vs[idx] / pk) % modulus_rest) as u128 * inv as u128 % modulus_rest as u128;
        let y = y as u64;
        if cs.iter().zip(&vs).any(|(&a, &b)| (y as u128 * a as u128 % q as u128) as u64 != b) {
            return Err(SolveFailure::NoSolution);
        }
        residues.push(y % f.p);
        primes.push(f.p);
    }
    crt_lift(&residues, &primes).map_err(|_| SolveFailure::NoSolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_scalar_examples() {
        let m = Modulus::new(&[(2, 2), (3, 2)]).unwrap();
        // c = 2 mod 4 and 3 mod 9: pins x mod 2 and mod 3
        let c = [crt_lift(&[2, 3], &[4, 9]).unwrap()];
        for x in 0..6u64 {
            let v = [(x * c[0]) % 36];
            assert_eq!(solve_scalar(&m, &c, &v), Ok(x));
        }
        assert_eq!(solve_scalar(&m, &[0], &[0]), Err(SolveFailure::Ambiguous));
        assert_eq!(solve_scalar(&m, &[0], &[1]), Err(SolveFailure::NoSolution));
        assert_eq!(solve_scalar(&m, &c, &[1]), Err(SolveFailure::NoSolution));
    }

    #[test]
    fn shape_checks() {
        assert!(matches!(
            check_shape(Shape { t: 2, l: 1, r: 3 }, 2),
            Err(PirError::IncompatibleDimensions(_))
        ));
        assert!(matches!(
            check_shape(Shape { t: 0, l: 1, r: 1 }, 2),
            Err(PirError::IncompatibleDimensions(_))
        ));
        assert!(check_shape(Shape { t: 1, l: 1, r: 2 }, 2).is_ok());
    }
}
