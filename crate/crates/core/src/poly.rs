//! The ambient ring `Z_m[x]/<x^n - 1>` and its expansion to flat `Z_m` rows.
//!
//! Coefficient `j` of a [`RingElem`] is the coefficient of `x^j`, and expansion
//! concatenates coefficient vectors lowest degree first.

use rand::Rng;

use crate::error::{PirError, Result};
use crate::upoly;
use crate::zmod::{add_mod, gcd, mul_mod, neg_mod, sub_mod, Modulus};

/// An element of `Z_q[x]/<x^n - 1>`; `q` is either the full modulus or one prime-power factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    q: u64,
    coeffs: Vec<u64>,
}

/// A row of ring elements sharing `(q, n)`.
pub type RingVector = Vec<RingElem>;

impl RingElem {
    /// Builds an element from `n` coefficients, reducing them mod `q`.
    pub fn new(coeffs: Vec<u64>, q: u64) -> Self {
        RingElem { q, coeffs: coeffs.into_iter().map(|c| c % q).collect() }
    }

    pub fn zero(n: usize, q: u64) -> Self {
        RingElem { q, coeffs: vec![0; n] }
    }

    pub fn one(n: usize, q: u64) -> Self {
        Self::monomial(n, q, 0, 1)
    }

    /// `c * x^k`.
    pub fn monomial(n: usize, q: u64, k: usize, c: u64) -> Self {
        let mut e = Self::zero(n, q);
        e.coeffs[k % n] = c % q;
        e
    }

    /// Reduces an arbitrary-degree polynomial modulo `x^n - 1`.
    pub fn from_poly(poly: &[u64], n: usize, q: u64) -> Self {
        let mut coeffs = vec![0; n];
        for (i, &c) in poly.iter().enumerate() {
            coeffs[i % n] = add_mod(coeffs[i % n], c % q, q);
        }
        RingElem { q, coeffs }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    /// The coefficient vector as a trimmed polynomial.
    pub fn to_poly(&self) -> upoly::Poly {
        upoly::trim(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &RingElem) -> Result<()> {
        if self.q != other.q || self.n() != other.n() {
            return Err(PirError::MixedAmbient);
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        let q = self.q;
        Ok(RingElem {
            q,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| add_mod(a, b, q)).collect(),
        })
    }

    pub fn sub(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        let q = self.q;
        Ok(RingElem {
            q,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| sub_mod(a, b, q)).collect(),
        })
    }

    pub fn neg(&self) -> RingElem {
        RingElem { q: self.q, coeffs: self.coeffs.iter().map(|&a| neg_mod(a, self.q)).collect() }
    }

    /// Cyclic convolution: `c_k = sum_{i + j = k mod n} a_i b_j`.
    pub fn mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        let n = self.n();
        let q = self.q as u128;
        let mut acc = vec![0u128; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = if i + j >= n { i + j - n } else { i + j };
                acc[k] += a as u128 * b as u128;
            }
        }
        Ok(RingElem { q: self.q, coeffs: acc.into_iter().map(|x| (x % q) as u64).collect() })
    }

    pub fn scale(&self, c: u64) -> RingElem {
        let q = self.q;
        RingElem { q, coeffs: self.coeffs.iter().map(|&a| mul_mod(a, c % q, q)).collect() }
    }

    /// Multiplication by `x^k` (a cyclic shift of the coefficients).
    pub fn shift(&self, k: usize) -> RingElem {
        let n = self.n();
        let mut coeffs = vec![0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(i + k) % n] = c;
        }
        RingElem { q: self.q, coeffs }
    }

    /// Coefficientwise reduction to a smaller modulus `q'` dividing `q`.
    pub fn reduce_to(&self, q: u64) -> RingElem {
        RingElem::new(self.coeffs.clone(), q)
    }
}

/// The ring `R = Z_m[x]/<x^n - 1>` with `gcd(n, m) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    modulus: Modulus,
    n: usize,
}

impl Ring {
    pub fn new(modulus: Modulus, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(PirError::Format("ring length n must be positive".into()));
        }
        if gcd(n as u64, modulus.m()) != 1 {
            return Err(PirError::NotCoprime(n as u64, modulus.m()));
        }
        Ok(Ring { modulus, n })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn m(&self) -> u64 {
        self.modulus.m()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> RingElem {
        RingElem::zero(self.n, self.m())
    }

    pub fn one(&self) -> RingElem {
        RingElem::one(self.n, self.m())
    }

    /// An element from coefficients; the length must equal `n`.
    pub fn elem(&self, coeffs: Vec<u64>) -> Result<RingElem> {
        if coeffs.len() != self.n {
            return Err(PirError::LengthMismatch { expected: self.n, got: coeffs.len() });
        }
        Ok(RingElem::new(coeffs, self.m()))
    }

    /// Reduces a polynomial of any degree into the ring.
    pub fn from_poly(&self, poly: &[u64]) -> RingElem {
        RingElem::from_poly(poly, self.n, self.m())
    }

    pub fn owns(&self, a: &RingElem) -> bool {
        a.q() == self.m() && a.n() == self.n
    }

    /// Coefficientwise reduction onto the factor `p^e` (the CRT map, one component).
    pub fn project(&self, a: &RingElem, p: u64, e: u32) -> Result<RingElem> {
        if !self.owns(a) {
            return Err(PirError::MixedAmbient);
        }
        let idx = self.modulus.component_index(p, e)?;
        Ok(a.reduce_to(self.modulus.factors()[idx].q))
    }

    /// All CRT components of `a`, in factor order.
    pub fn components(&self, a: &RingElem) -> Result<Vec<RingElem>> {
        if !self.owns(a) {
            return Err(PirError::MixedAmbient);
        }
        Ok(self.modulus.factors().iter().map(|f| a.reduce_to(f.q)).collect())
    }

    /// Inverse CRT map: the unique element projecting to each component.
    pub fn crt_combine(&self, components: &[RingElem]) -> Result<RingElem> {
        let factors = self.modulus.factors();
        if components.len() != factors.len() {
            return Err(PirError::ComponentMismatch(format!(
                "expected {} components, got {}",
                factors.len(),
                components.len()
            )));
        }
        for (c, f) in components.iter().zip(factors) {
            if c.q() != f.q || c.n() != self.n {
                return Err(PirError::ComponentMismatch(format!(
                    "component over Z_{} of length {} does not match Z_{} length {}",
                    c.q(),
                    c.n(),
                    f.q,
                    self.n
                )));
            }
        }
        let moduli = self.modulus.moduli();
        let mut coeffs = Vec::with_capacity(self.n);
        let mut residues = vec![0; components.len()];
        for j in 0..self.n {
            for (r, c) in residues.iter_mut().zip(components) {
                *r = c.coeffs()[j];
            }
            coeffs.push(self.modulus.crt(&residues)?);
        }
        debug_assert_eq!(moduli.iter().product::<u64>(), self.m());
        Ok(RingElem { q: self.m(), coeffs })
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        let m = self.m();
        RingElem { q: m, coeffs: (0..self.n).map(|_| rng.gen_range(0..m)).collect() }
    }

    /// Uniformly random element of the ideal `c * R`, with `c` dividing `m`.
    pub fn random_multiple<R: Rng + ?Sized>(&self, c: u64, rng: &mut R) -> RingElem {
        let m = self.m();
        let span = m / c;
        RingElem { q: m, coeffs: (0..self.n).map(|_| c * rng.gen_range(0..span)).collect() }
    }
}

/// Concatenates the coefficient vectors of `v`, entry by entry.
pub fn expand(v: &[RingElem]) -> Vec<u64> {
    v.iter().flat_map(|e| e.coeffs().iter().copied()).collect()
}

/// Splits a flat row into ring elements of length `n`.
pub fn contract(row: &[u64], n: usize, q: u64) -> Result<RingVector> {
    if n == 0 || row.len() % n != 0 {
        return Err(PirError::DimensionMismatch(format!(
            "row of width {} is not a multiple of n = {n}",
            row.len()
        )));
    }
    Ok(row.chunks(n).map(|c| RingElem::new(c.to_vec(), q)).collect())
}
