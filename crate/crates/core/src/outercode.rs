//! The outer matrix-product code `[C̃_1, ..., C̃_s] M` and the protocol's technical conditions.

use rand::Rng;

use crate::crtcode::{self, CrtCyclicCode};
use crate::error::{PirError, Result};
use crate::linalg::Matrix;
use crate::poly::{expand, RingElem};
use crate::zmod::{gcd, Modulus};

/// `C_OUT` with its `s x s` generator matrix over `Z_m[x]/<x^n - 1>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterCode {
    constituents: Vec<CrtCyclicCode>,
    mix: Vec<Vec<u64>>,
    generators: Vec<RingElem>,
    g_out: Vec<Vec<RingElem>>,
}

/// Outcome of checking an (outer, inner) pair against the protocol's requirements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// `C̃_s ⊆ ... ⊆ C̃_1`.
    pub nested: bool,
    /// `C̃_i ∩ C_IN ≠ 0`, per constituent.
    pub intersections_nonzero: Vec<bool>,
    /// `C̃_i ∩ (C_IN^⊥ \ C_IN) ≠ ∅`, per constituent.
    pub dual_intersections_nonzero: Vec<bool>,
    /// Every prime exponent exceeds 1.
    pub exponents_ok: bool,
    /// `non_hensel[i][k]`: projection of `C̃_i` onto prime `k` is not a Hensel lift.
    pub non_hensel: Vec<Vec<bool>>,
    /// A payload element `u` with `u H_IN^T ≠ 0` mod every prime power can be drawn from `C̃_s`.
    pub u_sampleable: bool,
    pub overall: bool,
}

impl ConditionReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.nested {
            out.push("constituents are not nested".to_string());
        }
        for (i, ok) in self.intersections_nonzero.iter().enumerate() {
            if !ok {
                out.push(format!("constituent {} meets the inner code trivially", i + 1));
            }
        }
        for (i, ok) in self.dual_intersections_nonzero.iter().enumerate() {
            if !ok {
                out.push(format!("constituent {} has nothing in the inner dual outside the inner code", i + 1));
            }
        }
        if !self.exponents_ok {
            out.push("some prime exponent is 1".to_string());
        }
        for (i, row) in self.non_hensel.iter().enumerate() {
            for (k, ok) in row.iter().enumerate() {
                if !ok {
                    out.push(format!("constituent {} is a Hensel lift at prime {}", i + 1, k + 1));
                }
            }
        }
        if !self.u_sampleable {
            out.push("no payload element can be sampled".to_string());
        }
        out
    }
}

impl OuterCode {
    /// `G_OUT[i][j] = M[i][j] * g̃_i`, with `g̃_i` the single generator of `C̃_i`.
    pub fn build(constituents: Vec<CrtCyclicCode>, mix: Vec<Vec<u64>>) -> Result<Self> {
        let s = constituents.len();
        if s == 0 {
            return Err(PirError::DimensionMismatch("no constituents".into()));
        }
        if mix.len() != s || mix.iter().any(|row| row.len() != s) {
            return Err(PirError::DimensionMismatch(format!("M must be {s}x{s}")));
        }
        let (modulus, n) = (constituents[0].modulus().clone(), constituents[0].n());
        if constituents.iter().any(|c| *c.modulus() != modulus || c.n() != n) {
            return Err(PirError::DimensionMismatch("constituents live in different ambients".into()));
        }
        let m = modulus.m();
        let mix: Vec<Vec<u64>> = mix.iter().map(|row| row.iter().map(|&x| x % m).collect()).collect();
        let generators: Vec<RingElem> = constituents.iter().map(CrtCyclicCode::generator_poly).collect();
        let g_out = generators
            .iter()
            .zip(&mix)
            .map(|(g, row)| row.iter().map(|&c| g.scale(c)).collect())
            .collect();
        Ok(OuterCode { constituents, mix, generators, g_out })
    }

    pub fn s(&self) -> usize {
        self.constituents.len()
    }

    pub fn n(&self) -> usize {
        self.constituents[0].n()
    }

    pub fn modulus(&self) -> &Modulus {
        self.constituents[0].modulus()
    }

    pub fn constituents(&self) -> &[CrtCyclicCode] {
        &self.constituents
    }

    pub fn mix(&self) -> &[Vec<u64>] {
        &self.mix
    }

    pub fn generators(&self) -> &[RingElem] {
        &self.generators
    }

    pub fn g_out(&self) -> &[Vec<RingElem>] {
        &self.g_out
    }

    /// Row vector `a` (length `s`) times `G_OUT`.
    pub fn apply(&self, a: &[RingElem]) -> Result<Vec<RingElem>> {
        let s = self.s();
        if a.len() != s {
            return Err(PirError::DimensionMismatch(format!("expected {s} entries, got {}", a.len())));
        }
        let (n, m) = (self.n(), self.modulus().m());
        let mut out = vec![RingElem::zero(n, m); s];
        for (ai, row) in a.iter().zip(&self.g_out) {
            if ai.is_zero() {
                continue;
            }
            for (dst, g) in out.iter_mut().zip(row) {
                *dst = dst.add(&ai.mul(g)?)?;
            }
        }
        Ok(out)
    }

    /// Generator matrix of `[C_OUT]` over `Z_m`: expansions of `x^k` times each row of `G_OUT`.
    ///
    /// Blocks are concatenated per constituent; zero rows are dropped.
    pub fn quasi_cyclic_expansion(&self) -> Matrix {
        let n = self.n();
        let mut rows = Vec::new();
        for row in &self.g_out {
            for k in 0..n {
                let shifted: Vec<RingElem> = row.iter().map(|g| g.shift(k)).collect();
                let flat = expand(&shifted);
                if flat.iter().any(|&x| x != 0) {
                    rows.push(flat);
                }
            }
        }
        Matrix::from_rows(&rows, n * self.s()).expect("rows have length n s")
    }

    /// Checks the protocol's technical conditions against an inner code.
    pub fn validate(&self, inner: &CrtCyclicCode) -> Result<ConditionReport> {
        let nested = self
            .constituents
            .windows(2)
            .all(|w| w[1].is_subcode_of(&w[0]));
        let dual = inner.dual()?;
        let mut intersections_nonzero = Vec::with_capacity(self.s());
        let mut dual_intersections_nonzero = Vec::with_capacity(self.s());
        for c in &self.constituents {
            intersections_nonzero.push(!c.intersect(inner)?.is_zero());
            dual_intersections_nonzero.push(!c.intersect(&dual)?.is_subcode_of(inner));
        }
        let exponents_ok = inner.modulus().factors().iter().all(|f| f.e > 1);
        let non_hensel: Vec<Vec<bool>> = self
            .constituents
            .iter()
            .map(|c| c.components().iter().map(|k| !k.is_hensel_lift()).collect())
            .collect();
        let u_sampleable = crtcode::u_feasible(self.constituents.last().expect("s >= 1"), inner)?;
        let overall = nested
            && intersections_nonzero.iter().all(|&b| b)
            && dual_intersections_nonzero.iter().all(|&b| b)
            && exponents_ok
            && non_hensel.iter().flatten().all(|&b| b)
            && u_sampleable;
        Ok(ConditionReport {
            nested,
            intersections_nonzero,
            dual_intersections_nonzero,
            exponents_ok,
            non_hensel,
            u_sampleable,
            overall,
        })
    }
}

/// Random upper-triangular `s x s` matrix over `Z_m` with unit diagonal.
pub fn random_unit_upper<R: Rng + ?Sized>(s: usize, m: u64, rng: &mut R) -> Vec<Vec<u64>> {
    (0..s)
        .map(|i| {
            (0..s)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => loop {
                        let u = rng.gen_range(1..m.max(2));
                        if gcd(u, m) == 1 {
                            break u;
                        }
                    },
                    std::cmp::Ordering::Greater => rng.gen_range(0..m),
                })
                .collect()
        })
        .collect()
}
