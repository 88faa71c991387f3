//! Cyclic codes over `Z_m` assembled from one chain-ring code per prime factor.

use std::sync::OnceLock;

use rand::Rng;

use crate::chaincode::ChainRingCode;
use crate::error::{PirError, Result};
use crate::linalg::Matrix;
use crate::poly::RingElem;
use crate::upoly::Poly;
use crate::zmod::{add_mod, mul_mod, Modulus};

/// How many times `sample_u` redraws before giving up.
pub const SAMPLE_ATTEMPTS: usize = 64;

/// `CRT(C_1, ..., C_s)`: words whose projection mod `p_i^{e_i}` lies in `C_i`.
#[derive(Clone, Debug)]
pub struct CrtCyclicCode {
    modulus: Modulus,
    n: usize,
    components: Vec<ChainRingCode>,
    generator: OnceLock<Matrix>,
    parity: OnceLock<Matrix>,
}

impl PartialEq for CrtCyclicCode {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.n == other.n && self.components == other.components
    }
}

impl Eq for CrtCyclicCode {}

/// Idempotents `b_i` with `b_i = 1 mod p_i^{e_i}` and `0` mod the other factors.
pub fn crt_basis(modulus: &Modulus) -> Vec<u64> {
    let k = modulus.factors().len();
    (0..k)
        .map(|i| {
            let residues: Vec<u64> = (0..k).map(|j| u64::from(i == j)).collect();
            modulus.crt(&residues).expect("factors are coprime")
        })
        .collect()
}

/// Lifts a vector living in component `i` to `Z_m`, zero in every other component.
pub fn lift_component(modulus: &Modulus, basis: &[u64], i: usize, v: &[u64]) -> Vec<u64> {
    v.iter().map(|&c| mul_mod(c, basis[i], modulus.m())).collect()
}

/// Coefficientwise CRT of one vector per component.
pub fn crt_vectors(modulus: &Modulus, parts: &[&[u64]]) -> Vec<u64> {
    let basis = crt_basis(modulus);
    let m = modulus.m();
    let len = parts.first().map_or(0, |p| p.len());
    (0..len)
        .map(|j| {
            parts
                .iter()
                .zip(&basis)
                .fold(0, |acc, (p, &b)| add_mod(acc, mul_mod(p[j], b, m), m))
        })
        .collect()
}

impl CrtCyclicCode {
    pub fn new(modulus: Modulus, components: Vec<ChainRingCode>) -> Result<Self> {
        let factors = modulus.factors();
        if components.len() != factors.len() {
            return Err(PirError::ComponentCountMismatch {
                expected: factors.len(),
                got: components.len(),
            });
        }
        let n = components[0].n();
        for (c, f) in components.iter().zip(factors) {
            if c.n() != n {
                return Err(PirError::LengthMismatch { expected: n, got: c.n() });
            }
            if c.ring() != *f {
                return Err(PirError::ComponentMismatch(format!(
                    "component over {} where {} was expected",
                    c.ring(),
                    f
                )));
            }
        }
        Ok(CrtCyclicCode { modulus, n, components, generator: OnceLock::new(), parity: OnceLock::new() })
    }

    /// The ideal generated by the given polynomials over `Z_m`.
    pub fn from_generators(modulus: &Modulus, n: usize, gens: &[Poly]) -> Result<Self> {
        let components = modulus
            .factors()
            .iter()
            .map(|f| {
                let projected: Vec<Poly> = gens.iter().map(|g| crate::upoly::normalize(g, f.q)).collect();
                ChainRingCode::from_generators(f.p, f.e, n, &projected)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(modulus.clone(), components)
    }

    /// One exponent vector per prime factor; see [`ChainRingCode::from_exponents`].
    pub fn from_exponents(modulus: &Modulus, n: usize, exponents: &[Vec<u32>]) -> Result<Self> {
        if exponents.len() != modulus.factors().len() {
            return Err(PirError::ComponentCountMismatch {
                expected: modulus.factors().len(),
                got: exponents.len(),
            });
        }
        let components = modulus
            .factors()
            .iter()
            .zip(exponents)
            .map(|(f, a)| ChainRingCode::from_exponents(f.p, f.e, n, a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(modulus.clone(), components)
    }

    pub fn zero(modulus: &Modulus, n: usize) -> Result<Self> {
        let components = modulus
            .factors()
            .iter()
            .map(|f| ChainRingCode::zero(f.p, f.e, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(modulus.clone(), components)
    }

    pub fn full(modulus: &Modulus, n: usize) -> Result<Self> {
        let components = modulus
            .factors()
            .iter()
            .map(|f| ChainRingCode::full(f.p, f.e, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(modulus.clone(), components)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[ChainRingCode] {
        &self.components
    }

    fn same_ambient(&self, other: &CrtCyclicCode) -> Result<()> {
        if self.modulus != other.modulus || self.n != other.n {
            return Err(PirError::AmbientMismatch);
        }
        Ok(())
    }

    fn map_components(&self, f: impl Fn(&ChainRingCode) -> Result<ChainRingCode>) -> Result<Self> {
        let comps = self.components.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.modulus.clone(), comps)
    }

    fn zip_components(
        &self,
        other: &CrtCyclicCode,
        f: impl Fn(&ChainRingCode, &ChainRingCode) -> Result<ChainRingCode>,
    ) -> Result<Self> {
        self.same_ambient(other)?;
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.modulus.clone(), comps)
    }

    /// Componentwise membership of a length-`n` word over `Z_m`.
    pub fn contains(&self, word: &[u64]) -> bool {
        if word.len() != self.n {
            return false;
        }
        self.components.iter().all(|c| {
            let q = c.ring().q;
            let w: Vec<u64> = word.iter().map(|&x| x % q).collect();
            c.contains(&w)
        })
    }

    pub fn contains_elem(&self, a: &RingElem) -> bool {
        a.q() == self.modulus.m() && self.contains(a.coeffs())
    }

    /// Whether the projection of `word` onto component `i` lies in that component.
    pub fn component_contains(&self, i: usize, word: &[u64]) -> bool {
        let c = &self.components[i];
        let q = c.ring().q;
        let w: Vec<u64> = word.iter().map(|&x| x % q).collect();
        c.contains(&w)
    }

    /// Rows are componentwise standard generators, each lifted with zeros in the other components.
    pub fn generator_matrix(&self) -> &Matrix {
        self.generator.get_or_init(|| {
            let basis = crt_basis(&self.modulus);
            let mut rows = Vec::new();
            for (i, c) in self.components.iter().enumerate() {
                let g = c.standard_generator_matrix();
                for row in g.iter_rows() {
                    rows.push(lift_component(&self.modulus, &basis, i, row));
                }
            }
            Matrix::from_rows(&rows, self.n).expect("rows have length n")
        })
    }

    pub fn dual(&self) -> Result<Self> {
        self.map_components(ChainRingCode::dual)
    }

    /// Generator matrix of the dual, so `c H^T = 0` for every codeword `c`.
    pub fn parity_check(&self) -> Result<&Matrix> {
        if let Some(h) = self.parity.get() {
            return Ok(h);
        }
        let h = self.dual()?.generator_matrix().clone();
        Ok(self.parity.get_or_init(|| h))
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.components.iter().map(ChainRingCode::rank).collect()
    }

    /// Non-free iff component ranks differ or some component is itself non-free.
    pub fn is_nonfree(&self) -> bool {
        let ranks = self.ranks();
        ranks.windows(2).any(|w| w[0] != w[1]) || self.components.iter().any(|c| !c.is_hensel_lift())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ChainRingCode::is_zero)
    }

    /// The non-free part `nf(C)`, componentwise; free components contribute zero.
    pub fn torsion_part(&self) -> Result<Self> {
        self.map_components(ChainRingCode::torsion_part)
    }

    pub fn intersect(&self, other: &CrtCyclicCode) -> Result<Self> {
        self.zip_components(other, ChainRingCode::intersect)
    }

    pub fn sum(&self, other: &CrtCyclicCode) -> Result<Self> {
        self.zip_components(other, ChainRingCode::sum)
    }

    pub fn is_subcode_of(&self, other: &CrtCyclicCode) -> bool {
        self.modulus == other.modulus
            && self.n == other.n
            && self.components.iter().zip(&other.components).all(|(a, b)| a.is_subcode_of(b))
    }

    /// `C ∩ C^⊥ = 0`.
    pub fn is_lcd(&self) -> Result<bool> {
        Ok(self.intersect(&self.dual()?)?.is_zero())
    }

    /// A single generator of the code as an ideal of `Z_m[x]/<x^n - 1>`.
    pub fn generator_poly(&self) -> RingElem {
        let gens: Vec<RingElem> = self.components.iter().map(ChainRingCode::generator_poly).collect();
        let parts: Vec<&[u64]> = gens.iter().map(RingElem::coeffs).collect();
        RingElem::new(crt_vectors(&self.modulus, &parts), self.modulus.m())
    }

    /// Uniform random codeword.
    pub fn sample_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        let words: Vec<Vec<u64>> = self.components.iter().map(|c| c.random_codeword(rng)).collect();
        let parts: Vec<&[u64]> = words.iter().map(Vec::as_slice).collect();
        RingElem::new(crt_vectors(&self.modulus, &parts), self.modulus.m())
    }

    /// Uniform random element of `nf(C)`.
    pub fn sample_torsion<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RingElem> {
        Ok(self.torsion_part()?.sample_codeword(rng))
    }
}

/// The set `u` is drawn from: `nf(C̃ ∩ C_IN^⊥)`.
pub fn u_space(constituent: &CrtCyclicCode, inner: &CrtCyclicCode) -> Result<CrtCyclicCode> {
    constituent.intersect(&inner.dual()?)?.torsion_part()
}

/// True iff `nf(C̃ ∩ C_IN^⊥)` escapes `C_IN` in every component, so a valid `u` exists.
pub fn u_feasible(constituent: &CrtCyclicCode, inner: &CrtCyclicCode) -> Result<bool> {
    let space = u_space(constituent, inner)?;
    Ok(space
        .components()
        .iter()
        .zip(inner.components())
        .all(|(s, c)| !s.is_subcode_of(c)))
}

/// Draws `u ∈ nf(C̃ ∩ C_IN^⊥)` whose projection avoids `C_IN` in every component.
///
/// The last condition is what makes `u H_IN^T` nonzero modulo every `p_i^{e_i}`.
pub fn sample_u<R: Rng + ?Sized>(
    constituent: &CrtCyclicCode,
    inner: &CrtCyclicCode,
    rng: &mut R,
) -> Result<RingElem> {
    sample_u_in(&u_space(constituent, inner)?, inner, rng)
}

/// As [`sample_u`], with the space `nf(C̃ ∩ C_IN^⊥)` precomputed.
pub fn sample_u_in<R: Rng + ?Sized>(
    space: &CrtCyclicCode,
    inner: &CrtCyclicCode,
    rng: &mut R,
) -> Result<RingElem> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let u = space.sample_codeword(rng);
        if (0..inner.components().len()).all(|i| !inner.component_contains(i, u.coeffs())) {
            return Ok(u);
        }
    }
    Err(PirError::EmptySampleSet(format!(
        "no u outside the inner code after {SAMPLE_ATTEMPTS} draws"
    )))
}
