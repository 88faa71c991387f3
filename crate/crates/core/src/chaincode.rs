//! Cyclic codes of length `n` over the chain ring `Z_{p^e}`, `gcd(n, p) = 1`.
//!
//! A code is stored in standard form: a tower of monic divisors
//! `f_{e-1} | ... | f_1 | f_0 | x^n - 1` generating `<f_0, p f_1, ..., p^{e-1} f_{e-1}>`.
//! Because `x^n - 1` is squarefree mod `p`, its monic divisors over `Z_{p^e}`
//! are exactly products of the Hensel-lifted irreducible factors, so every
//! code is also described by one exponent `a_i in 0..=e` per lifted factor
//! `G_i`: the code is `prod_i p^{a_i} Z_{p^e}[x]/<G_i>` and `f_j = prod_{a_i > j} G_i`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::{PirError, Result};
use crate::linalg::{self, HowellForm, Matrix};
use crate::poly::RingElem;
use crate::upoly::{self, Poly};
use crate::zmod::{gcd, mul_mod, pow_mod, PrimePower};

// ---------------------------------------------------------------------------
// cyclotomic cosets

/// The `q`-cyclotomic cosets of `Z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCosets {
    pub n: usize,
    pub q: u64,
    pub cosets: Vec<Vec<usize>>,
}

impl CyclotomicCosets {
    /// Number of cosets, `T`.
    pub fn count(&self) -> usize {
        self.cosets.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.cosets.iter().map(Vec::len).collect()
    }
}

/// Partitions `Z_n` into orbits of multiplication by `q`.
///
/// The count is cross-checked against `sum_{d | n} phi(d) / ord_d(q)`.
pub fn cyclotomic_cosets(n: usize, q: u64) -> Result<CyclotomicCosets> {
    if n == 0 {
        return Err(PirError::Format("n must be positive".into()));
    }
    if gcd(n as u64, q) != 1 {
        return Err(PirError::NotCoprime(n as u64, q));
    }
    let mut seen = vec![false; n];
    let mut cosets = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut coset = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            coset.push(x);
            x = mul_mod(x as u64, q, n as u64) as usize;
        }
        cosets.push(coset);
    }
    let out = CyclotomicCosets { n, q, cosets };
    assert_eq!(
        out.count() as u64,
        coset_count_formula(n as u64, q),
        "coset enumeration disagrees with the phi/ord formula"
    );
    Ok(out)
}

/// `T = sum_{d | n} phi(d) / ord_d(q)`.
pub fn coset_count_formula(n: u64, q: u64) -> u64 {
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| euler_phi(d) / multiplicative_order(q, d))
        .sum()
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Order of `q` in `(Z/dZ)^*`; `ord_1(q) = 1`.
pub fn multiplicative_order(q: u64, d: u64) -> u64 {
    if d == 1 {
        return 1;
    }
    let mut k = 1;
    let mut x = q % d;
    while x != 1 {
        x = mul_mod(x, q, d);
        k += 1;
    }
    k
}

// ---------------------------------------------------------------------------
// factoring x^n - 1

/// Berlekamp factorization of a monic squarefree polynomial over `F_p`.
fn berlekamp(f: &[u64], p: u64) -> Result<Vec<Poly>> {
    let deg = upoly::degree(f).unwrap_or(0);
    if deg <= 1 {
        return Ok(vec![f.to_vec()]);
    }
    // row i holds x^{p i} mod f
    let xp = upoly::pow_mod(&[0, 1], p, f, p)?;
    let mut rows = Vec::with_capacity(deg);
    let mut cur = upoly::one();
    for i in 0..deg {
        let mut row = upoly::to_len(&cur, deg);
        row[i] = (row[i] + p - 1) % p;
        rows.push(row);
        cur = upoly::rem(&upoly::mul(&cur, &xp, p), f, p)?;
    }
    let q_minus_i = Matrix::from_rows(&rows, deg)?;
    let field = PrimePower::new(p, 1)?;
    let kernel = linalg::left_kernel(&q_minus_i, field);
    let r = kernel.len();

    let mut factors = vec![f.to_vec()];
    let basis: Vec<Poly> = kernel.rows().iter().map(|v| upoly::trim(v.clone())).collect();
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    'outer: while factors.len() < r {
        for v in &basis {
            if upoly::degree(v).unwrap_or(0) == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(factors.len() + 1);
            for g in &factors {
                if upoly::degree(g).unwrap_or(0) <= 1 {
                    next.push(g.clone());
                    continue;
                }
                next.extend(split_with(g, v, p, &mut seed)?);
            }
            factors = next;
            if factors.len() == r {
                break 'outer;
            }
        }
    }
    Ok(factors)
}

/// Splits `g` using a Berlekamp subalgebra element `v` (`v^p = v mod g`).
fn split_with(g: &[u64], v: &[u64], p: u64, seed: &mut u64) -> Result<Vec<Poly>> {
    if p <= 1024 {
        let mut pieces = vec![g.to_vec()];
        for c in 0..p {
            let shifted = upoly::sub(v, &[c], p);
            let mut next = Vec::new();
            for h in pieces {
                let d = upoly::gcd_field(&h, &shifted, p)?;
                let dd = upoly::degree(&d).unwrap_or(0);
                if dd > 0 && dd < upoly::degree(&h).unwrap_or(0) {
                    let (quo, _) = upoly::divrem(&h, &d, p)?;
                    next.push(d);
                    next.push(upoly::make_monic(&quo, p)?);
                } else {
                    next.push(h);
                }
            }
            pieces = next;
        }
        Ok(pieces)
    } else {
        // large odd p: gcd(g, (v + c)^{(p-1)/2} - 1) for pseudo-random c
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let c = (*seed >> 11) % p;
        let w = upoly::add(v, &[c], p);
        let pw = upoly::pow_mod(&w, (p - 1) / 2, g, p)?;
        let d = upoly::gcd_field(g, &upoly::sub(&pw, &[1], p), p)?;
        let dd = upoly::degree(&d).unwrap_or(0);
        if dd > 0 && dd < upoly::degree(g).unwrap_or(0) {
            let (quo, _) = upoly::divrem(g, &d, p)?;
            Ok(vec![d, upoly::make_monic(&quo, p)?])
        } else {
            Ok(vec![g.to_vec()])
        }
    }
}

/// One quadratic Hensel step: lifts `f = g h`, `s g + t h = 1` from modulus `m` to `new_m`.
#[allow(clippy::too_many_arguments)]
fn hensel_step(f: &[u64], g: &Poly, h: &Poly, s: &Poly, t: &Poly, new_m: u64) -> Result<(Poly, Poly, Poly, Poly)> {
    let q = new_m;
    let err = upoly::sub(f, &upoly::mul(g, h, q), q);
    let (quo, r) = upoly::divrem(&upoly::mul(s, &err, q), h, q)?;
    let g2 = upoly::add(g, &upoly::add(&upoly::mul(t, &err, q), &upoly::mul(&quo, g, q), q), q);
    let h2 = upoly::add(h, &r, q);
    let b = upoly::sub(&upoly::add(&upoly::mul(s, &g2, q), &upoly::mul(t, &h2, q), q), &[1], q);
    let (c, d) = upoly::divrem(&upoly::mul(s, &b, q), &h2, q)?;
    let s2 = upoly::sub(s, &d, q);
    let t2 = upoly::sub(&upoly::sub(t, &upoly::mul(t, &b, q), q), &upoly::mul(&c, &g2, q), q);
    Ok((g2, h2, s2, t2))
}

/// Lifts the factorization `f = prod factors (mod p)` to `Z_{p^e}` by iterated quadratic steps.
fn hensel_lift(f: &[u64], factors: &[Poly], pp: PrimePower) -> Result<Vec<Poly>> {
    if factors.len() == 1 {
        return Ok(vec![upoly::normalize(f, pp.q)]);
    }
    let p = pp.p;
    let g0 = factors[0].clone();
    let h0 = factors[1..].iter().fold(upoly::one(), |acc, x| upoly::mul(&acc, x, p));
    let (one, s0, t0) = upoly::ext_gcd_field(&g0, &h0, p)?;
    debug_assert_eq!(one, upoly::one());
    let (mut g, mut h, mut s, mut t) = (g0, h0, s0, t0);
    let mut m = p;
    while m < pp.q {
        let new_m = m.saturating_mul(m).min(pp.q);
        let f_mod = upoly::normalize(f, new_m);
        (g, h, s, t) = hensel_step(&f_mod, &g, &h, &s, &t, new_m)?;
        m = new_m;
    }
    let mut out = vec![g];
    out.extend(hensel_lift(&h, &factors[1..], pp)?);
    Ok(out)
}

type FactorCache = Mutex<HashMap<(usize, u64, u32), Arc<Vec<Poly>>>>;

fn factor_cache() -> &'static FactorCache {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The monic irreducible factors of `x^n - 1` over `F_p`, Hensel-lifted to `Z_{p^e}`.
///
/// Factors are ordered by (degree, coefficients) of their reductions mod `p`,
/// so the ordering is stable across calls and across exponents.
pub fn factor_xn_minus_1(n: usize, p: u64, e: u32) -> Result<Arc<Vec<Poly>>> {
    let pp = PrimePower::new(p, e)?;
    if n == 0 {
        return Err(PirError::Format("n must be positive".into()));
    }
    if gcd(n as u64, p) != 1 {
        return Err(PirError::NotCoprime(n as u64, p));
    }
    if let Some(hit) = factor_cache().lock().expect("factor cache").get(&(n, p, e)) {
        return Ok(hit.clone());
    }
    let f_p = upoly::xn_minus_1(n, p);
    let mut mod_p = berlekamp(&f_p, p)?;
    mod_p.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let lifted = Arc::new(hensel_lift(&upoly::xn_minus_1(n, pp.q), &mod_p, pp)?);
    factor_cache().lock().expect("factor cache").insert((n, p, e), lifted.clone());
    Ok(lifted)
}

// ---------------------------------------------------------------------------
// codes

/// Module type `(k_0, ..., k_{e-1})`: the code is `⊕_j (Z_{p^{e-j}})^{k_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleType {
    pub ks: Vec<usize>,
}

impl ModuleType {
    /// Minimal number of generators, `sum k_j`.
    pub fn rank(&self) -> usize {
        self.ks.iter().sum()
    }

    pub fn is_free(&self) -> bool {
        self.ks.iter().skip(1).all(|&k| k == 0)
    }

    /// `log_p |C| = sum (e - j) k_j`.
    pub fn log_size(&self) -> u64 {
        let e = self.ks.len();
        self.ks.iter().enumerate().map(|(j, &k)| ((e - j) * k) as u64).sum()
    }
}

/// A cyclic code over `Z_{p^e}` in standard form.
#[derive(Clone, Debug)]
pub struct ChainRingCode {
    ring: PrimePower,
    n: usize,
    tower: Vec<Poly>,
    howell: OnceLock<HowellForm>,
}

impl PartialEq for ChainRingCode {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.n == other.n && self.tower == other.tower
    }
}

impl Eq for ChainRingCode {}

impl ChainRingCode {
    /// Validates a tower `(f_0, ..., f_{e-1})` of monic polynomials over `Z_{p^e}`.
    pub fn new(p: u64, e: u32, n: usize, tower: Vec<Poly>) -> Result<Self> {
        let ring = PrimePower::new(p, e)?;
        if gcd(n as u64, p) != 1 {
            return Err(PirError::NotCoprime(n as u64, p));
        }
        if tower.len() != e as usize {
            return Err(PirError::LengthMismatch { expected: e as usize, got: tower.len() });
        }
        let tower: Vec<Poly> = tower.iter().map(|f| upoly::normalize(f, ring.q)).collect();
        for (j, f) in tower.iter().enumerate() {
            if !upoly::is_monic(f) {
                return Err(PirError::NotMonic(j));
            }
        }
        let xn1 = upoly::xn_minus_1(n, ring.q);
        if !upoly::divides(&tower[0], &xn1, ring.q)? {
            return Err(PirError::NotADivisor(0));
        }
        for j in 1..tower.len() {
            if !upoly::divides(&tower[j], &tower[j - 1], ring.q)? {
                return Err(PirError::BrokenTower(j, j - 1));
            }
        }
        Ok(ChainRingCode { ring, n, tower, howell: OnceLock::new() })
    }

    /// The code `prod_i p^{a_i} <G_i>` for exponents `a_i in 0..=e`, one per lifted factor.
    pub fn from_exponents(p: u64, e: u32, n: usize, exponents: &[u32]) -> Result<Self> {
        let ring = PrimePower::new(p, e)?;
        let factors = factor_xn_minus_1(n, p, e)?;
        if exponents.len() != factors.len() {
            return Err(PirError::LengthMismatch { expected: factors.len(), got: exponents.len() });
        }
        if let Some(&bad) = exponents.iter().find(|&&a| a > e) {
            return Err(PirError::Format(format!("exponent {bad} exceeds e = {e}")));
        }
        let tower = (0..e)
            .map(|j| {
                factors
                    .iter()
                    .zip(exponents)
                    .filter(|(_, &a)| a > j)
                    .fold(upoly::one(), |acc, (g, _)| upoly::mul(&acc, g, ring.q))
            })
            .collect();
        Self::new(p, e, n, tower)
    }

    pub fn zero(p: u64, e: u32, n: usize) -> Result<Self> {
        let q = PrimePower::new(p, e)?.q;
        Self::new(p, e, n, vec![upoly::xn_minus_1(n, q); e as usize])
    }

    pub fn full(p: u64, e: u32, n: usize) -> Result<Self> {
        Self::new(p, e, n, vec![upoly::one(); e as usize])
    }

    /// The cyclic code generated (as an ideal) by the given polynomials.
    pub fn from_generators(p: u64, e: u32, n: usize, gens: &[Poly]) -> Result<Self> {
        let ring = PrimePower::new(p, e)?;
        let rows = gens.iter().flat_map(|g| {
            let base = RingElem::from_poly(g, n, ring.q);
            (0..n).map(move |k| base.shift(k).into_coeffs())
        });
        let h = HowellForm::from_rows(rows, n, ring);
        Self::from_cyclic_span(&h, n)
    }

    /// Recovers the standard form of a row space known to be cyclic.
    pub fn from_cyclic_span(span: &HowellForm, n: usize) -> Result<Self> {
        let ring = span.ring();
        let factors = factor_xn_minus_1(n, ring.p, ring.e)?;
        let xn1 = upoly::xn_minus_1(n, ring.q);
        let mut exponents = Vec::with_capacity(factors.len());
        for g in factors.iter() {
            // (x^n - 1)/G_i is a unit in the G_i component and zero elsewhere
            let (cof, _) = upoly::divrem(&xn1, g, ring.q)?;
            let mut a = ring.e;
            for j in 0..ring.e {
                let probe = RingElem::from_poly(&upoly::scale(&cof, ring.pow(j), ring.q), n, ring.q);
                if span.contains(probe.coeffs()) {
                    a = j;
                    break;
                }
            }
            exponents.push(a);
        }
        Self::from_exponents(ring.p, ring.e, n, &exponents)
    }

    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn e(&self) -> u32 {
        self.ring.e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tower(&self) -> &[Poly] {
        &self.tower
    }

    /// `a_i = #{j : G_i | f_j}` for each lifted factor `G_i`.
    pub fn exponents(&self) -> Result<Vec<u32>> {
        let factors = factor_xn_minus_1(self.n, self.ring.p, self.ring.e)?;
        factors
            .iter()
            .map(|g| {
                let mut a = 0;
                for f in &self.tower {
                    if upoly::divides(g, f, self.ring.q)? {
                        a += 1;
                    }
                }
                Ok(a)
            })
            .collect()
    }

    fn degree_of(&self, j: usize) -> usize {
        upoly::degree(&self.tower[j]).unwrap_or(0)
    }

    /// `k_0 = n - deg f_0`, `k_j = deg f_{j-1} - deg f_j`.
    pub fn module_type(&self) -> ModuleType {
        let mut ks = Vec::with_capacity(self.tower.len());
        let mut prev = self.n;
        for j in 0..self.tower.len() {
            let d = self.degree_of(j);
            ks.push(prev - d);
            prev = d;
        }
        ModuleType { ks }
    }

    pub fn rank(&self) -> usize {
        self.module_type().rank()
    }

    /// Free codes are exactly the Hensel lifts `<f_0>`.
    pub fn is_hensel_lift(&self) -> bool {
        self.module_type().is_free()
    }

    pub fn is_zero(&self) -> bool {
        self.module_type().rank() == 0
    }

    /// Rows `x^i p^j f_j`, `0 <= i < k_j`; the row count equals the rank.
    pub fn standard_generator_matrix(&self) -> Matrix {
        let q = self.ring.q;
        let ks = self.module_type().ks;
        let mut rows = Vec::new();
        for (j, f) in self.tower.iter().enumerate() {
            let base = RingElem::from_poly(&upoly::scale(f, self.ring.pow(j as u32), q), self.n, q);
            for i in 0..ks[j] {
                rows.push(base.shift(i).into_coeffs());
            }
        }
        Matrix::from_rows(&rows, self.n).expect("rows have length n")
    }

    pub fn howell(&self) -> &HowellForm {
        self.howell
            .get_or_init(|| HowellForm::new(&self.standard_generator_matrix(), self.ring))
    }

    pub fn contains(&self, word: &[u64]) -> bool {
        word.len() == self.n && self.howell().contains(word)
    }

    /// The annihilator under the plain coordinate inner product, computed as a kernel.
    pub fn dual(&self) -> Result<ChainRingCode> {
        let g = self.standard_generator_matrix();
        let kernel = if g.rows() == 0 {
            HowellForm::new(&Matrix::identity(self.n), self.ring)
        } else {
            linalg::dual_rowspace(&g, self.ring)
        };
        Self::from_cyclic_span(&kernel, self.n)
    }

    pub fn intersect(&self, other: &ChainRingCode) -> Result<ChainRingCode> {
        if self.ring != other.ring || self.n != other.n {
            return Err(PirError::AmbientMismatch);
        }
        let a = self.standard_generator_matrix();
        let b = other.standard_generator_matrix();
        if a.rows() == 0 || b.rows() == 0 {
            return Self::zero(self.ring.p, self.ring.e, self.n);
        }
        let span = linalg::intersect_rowspaces(&a, &b, self.ring)?;
        Self::from_cyclic_span(&span, self.n)
    }

    /// Sum of two codes.
    pub fn sum(&self, other: &ChainRingCode) -> Result<ChainRingCode> {
        if self.ring != other.ring || self.n != other.n {
            return Err(PirError::AmbientMismatch);
        }
        let stacked = self.standard_generator_matrix().vstack(&other.standard_generator_matrix())?;
        Self::from_cyclic_span(&HowellForm::new(&stacked, self.ring), self.n)
    }

    pub fn is_subcode_of(&self, other: &ChainRingCode) -> bool {
        other.howell().contains_all(self.howell())
    }

    /// Non-free part: `<p f_1, ..., p^{e-1} f_{e-1}>` when the code is not a Hensel lift, else zero.
    pub fn torsion_part(&self) -> Result<ChainRingCode> {
        if self.is_hensel_lift() {
            return Self::zero(self.ring.p, self.ring.e, self.n);
        }
        let mut tower = self.tower.clone();
        tower[0] = upoly::xn_minus_1(self.n, self.ring.q);
        Self::new(self.ring.p, self.ring.e, self.n, tower)
    }

    /// A single generator `f_0 + p f_1 + ... + p^{e-1} f_{e-1}` of the code as an ideal.
    pub fn generator_poly(&self) -> RingElem {
        let q = self.ring.q;
        self.tower
            .iter()
            .enumerate()
            .map(|(j, f)| RingElem::from_poly(&upoly::scale(f, self.ring.pow(j as u32), q), self.n, q))
            .fold(RingElem::zero(self.n, q), |acc, x| acc.add(&x).expect("same ambient"))
    }

    /// Uniform random codeword: a random combination of the standard generator rows.
    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let q = self.ring.q;
        let g = self.standard_generator_matrix();
        let ks = self.module_type().ks;
        let mut coeffs = Vec::with_capacity(g.rows());
        for (j, &k) in ks.iter().enumerate() {
            // rows at level j have additive order p^{e-j}
            let bound = self.ring.pow(self.ring.e - j as u32);
            coeffs.extend((0..k).map(|_| rng.gen_range(0..bound)));
        }
        if g.rows() == 0 {
            return vec![0; self.n];
        }
        g.vec_mul(&coeffs, q).expect("coefficient count matches rows")
    }
}

/// `x^n - 1` over `Z_q`, convenience re-export for callers building towers.
pub fn xn_minus_1(n: usize, q: u64) -> Poly {
    upoly::xn_minus_1(n, q)
}

/// Reduces `a mod p` and checks it equals `b`.
pub fn reduces_to(a: &[u64], b: &[u64], p: u64) -> bool {
    upoly::normalize(a, p) == upoly::normalize(b, p)
}

/// `p^k mod q` helper for callers scaling generators.
pub fn prime_power(p: u64, k: u32, q: u64) -> u64 {
    pow_mod(p, k as u64, q)
}
