//! Brute-force oracles: enumerate submodules of `Z_q^n` as bitsets.
#![allow(dead_code)]

pub mod formats;

use ringpir::chaincode::ChainRingCode;

/// A subset of `Z_q^n`, indexed by reading a word as base-`q` digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub q: u64,
    pub n: usize,
    bits: Vec<u64>,
}

impl Span {
    pub fn empty(q: u64, n: usize) -> Self {
        let size = (q as usize).pow(n as u32);
        Span { q, n, bits: vec![0; size.div_ceil(64)] }
    }

    pub fn size(&self) -> usize {
        (self.q as usize).pow(self.n as u32)
    }

    pub fn index(&self, word: &[u64]) -> usize {
        word.iter().rev().fold(0, |acc, &x| acc * self.q as usize + (x % self.q) as usize)
    }

    pub fn word(&self, mut idx: usize) -> Vec<u64> {
        (0..self.n)
            .map(|_| {
                let d = idx % self.q as usize;
                idx /= self.q as usize;
                d as u64
            })
            .collect()
    }

    fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) -> bool {
        let fresh = !self.get(i);
        self.bits[i / 64] |= 1 << (i % 64);
        fresh
    }

    pub fn contains(&self, word: &[u64]) -> bool {
        self.get(self.index(word))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Span) -> Span {
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        Span { q: self.q, n: self.n, bits }
    }

    pub fn members(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.size()).filter(|&i| self.get(i)).map(|i| self.word(i))
    }

    /// The `Z_q`-module generated by `gens`, by closure under adding generators.
    pub fn closure(q: u64, n: usize, gens: &[Vec<u64>]) -> Span {
        let mut span = Span::empty(q, n);
        span.set(0);
        let mut queue = vec![0usize];
        while let Some(i) = queue.pop() {
            let w = span.word(i);
            for g in gens {
                let next = w.iter().zip(g).rev().fold(0, |acc, (a, b)| acc * q as usize + ((a + b) % q) as usize);
                if span.set(next) {
                    queue.push(next);
                }
            }
        }
        span
    }

    /// All cyclic shifts of the given polynomials, folded modulo `x^n - 1`.
    pub fn cyclic(q: u64, n: usize, polys: &[Vec<u64>]) -> Span {
        let mut gens = Vec::new();
        for f in polys {
            let mut base = vec![0; n];
            for (i, &c) in f.iter().enumerate() {
                base[i % n] = (base[i % n] + c) % q;
            }
            for k in 0..n {
                gens.push((0..n).map(|i| base[(i + n - k) % n]).collect());
            }
        }
        Span::closure(q, n, &gens)
    }

    /// Every word orthogonal to every member, by exhaustive search.
    pub fn dual(&self) -> Span {
        let members: Vec<Vec<u64>> = self.members().collect();
        let mut out = Span::empty(self.q, self.n);
        for i in 0..self.size() {
            let w = self.word(i);
            let orth = members
                .iter()
                .all(|c| c.iter().zip(&w).map(|(a, b)| a * b).sum::<u64>() % self.q == 0);
            if orth {
                out.set(i);
            }
        }
        out
    }

    /// `|c · span|`.
    pub fn scaled_count(&self, c: u64) -> usize {
        let mut image = Span::empty(self.q, self.n);
        for w in self.members() {
            let scaled: Vec<u64> = w.iter().map(|x| x * c % self.q).collect();
            image.set(image.index(&scaled));
        }
        image.count()
    }

    /// `(k_0, ..., k_{e-1})` with the span `⊕_j (Z_{p^{e-j}})^{k_j}`, read off from `|p^i span|`.
    pub fn module_type(&self, p: u64, e: u32) -> Vec<usize> {
        let logs: Vec<usize> = (0..=e)
            .map(|i| log_exact(self.scaled_count(p.pow(i)), p))
            .collect();
        // d_i = log|p^i C| - log|p^{i+1} C| = sum_{j < e-i} k_j
        let d: Vec<usize> = (0..e as usize).map(|i| logs[i] - logs[i + 1]).collect();
        (0..e as usize)
            .map(|j| {
                let i = e as usize - 1 - j;
                d[i] - if i + 1 < e as usize { d[i + 1] } else { 0 }
            })
            .collect()
    }
}

pub fn log_exact(mut x: usize, p: u64) -> usize {
    let mut k = 0;
    while x > 1 {
        assert_eq!(x % p as usize, 0, "not a power of {p}");
        x /= p as usize;
        k += 1;
    }
    k
}

/// Span of the standard generators `p^j f_j`.
pub fn span_of(code: &ChainRingCode) -> Span {
    let q = code.ring().q;
    let gens: Vec<Vec<u64>> = code
        .tower()
        .iter()
        .enumerate()
        .map(|(j, f)| f.iter().map(|&c| c * code.p().pow(j as u32) % q).collect())
        .collect();
    Span::cyclic(q, code.n(), &gens)
}

/// Every exponent vector in `{0..=e}^k`.
pub fn all_exponents(k: usize, e: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=e).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// Exhaustive check of every CRT cyclic code of length `n` over `Z_m` against component spans:
/// module types, freeness, pairwise intersections and membership of sampled words.
pub fn crt_code_suite(factors: &str, n: usize, words_per_code: usize, seed: u64) -> Result<usize, String> {
    use rand::{Rng, SeedableRng};
    use ringpir::chaincode::factor_xn_minus_1;
    use ringpir::crtcode::{crt_vectors, CrtCyclicCode};
    use ringpir::zmod::Modulus;
    use std::collections::HashMap;

    let modulus = Modulus::parse_factors(factors).map_err(|e| e.to_string())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // per prime: exponent vector -> (span, oracle module type, sample of members)
    type Entry = (Span, Vec<usize>, Vec<Vec<u64>>);
    let mut tables: Vec<HashMap<Vec<u32>, Entry>> = Vec::new();
    let mut choices: Vec<Vec<Vec<u32>>> = Vec::new();
    for f in modulus.factors() {
        let k = factor_xn_minus_1(n, f.p, f.e).map_err(|e| e.to_string())?.len();
        let exps = all_exponents(k, f.e);
        let mut table = HashMap::new();
        for a in &exps {
            let code = ChainRingCode::from_exponents(f.p, f.e, n, a).map_err(|e| e.to_string())?;
            let span = span_of(&code);
            let ty = span.module_type(f.p, f.e);
            let mut sample: Vec<Vec<u64>> = Vec::new();
            for (seen, w) in span.members().enumerate() {
                if sample.len() < 256 {
                    sample.push(w);
                } else if rng.gen_range(0..=seen) < 256 {
                    let slot = rng.gen_range(0..256);
                    sample[slot] = w;
                }
            }
            table.insert(a.clone(), (span, ty, sample));
        }
        tables.push(table);
        choices.push(exps);
    }
    let mut combos: Vec<Vec<Vec<u32>>> = vec![vec![]];
    for exps in &choices {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                exps.iter().map(move |a| {
                    let mut c = c.clone();
                    c.push(a.clone());
                    c
                })
            })
            .collect();
    }
    let codes: Vec<CrtCyclicCode> = combos
        .iter()
        .map(|c| CrtCyclicCode::from_exponents(&modulus, n, c))
        .collect::<ringpir::Result<_>>()
        .map_err(|e| e.to_string())?;

    for (code, exps) in codes.iter().zip(&combos) {
        let oracle: Vec<&Entry> = exps.iter().zip(&tables).map(|(a, t)| &t[a]).collect();
        let mut oracle_ranks = Vec::new();
        let mut all_free = true;
        for ((comp, (_, ty, _)), f) in code.components().iter().zip(&oracle).zip(modulus.factors()) {
            if comp.module_type().ks != *ty {
                return Err(format!("module type of {exps:?} at {f}: {:?} vs {ty:?}", comp.module_type().ks));
            }
            oracle_ranks.push(ty.iter().sum::<usize>());
            all_free &= ty.iter().skip(1).all(|&k| k == 0);
        }
        let oracle_nonfree = !all_free || oracle_ranks.windows(2).any(|w| w[0] != w[1]);
        if code.is_nonfree() != oracle_nonfree {
            return Err(format!("is_nonfree of {exps:?}"));
        }
        if code.ranks() != oracle_ranks {
            return Err(format!("ranks of {exps:?}"));
        }
        for _ in 0..words_per_code {
            // half codewords assembled from oracle members, half uniform words
            let word: Vec<u64> = if rng.gen_bool(0.5) {
                let parts: Vec<Vec<u64>> = oracle
                    .iter()
                    .map(|(_, _, sample)| sample[rng.gen_range(0..sample.len())].clone())
                    .collect();
                let refs: Vec<&[u64]> = parts.iter().map(Vec::as_slice).collect();
                crt_vectors(&modulus, &refs)
            } else {
                (0..n).map(|_| rng.gen_range(0..modulus.m())).collect()
            };
            let expected = oracle
                .iter()
                .map(|(span, _, _)| span)
                .all(|span| span.contains(&word.iter().map(|x| x % span.q).collect::<Vec<_>>()));
            if code.contains(&word) != expected {
                return Err(format!("contains({word:?}) in {exps:?}"));
            }
        }
    }

    for (a, ea) in codes.iter().zip(&combos) {
        for (b, eb) in codes.iter().zip(&combos) {
            let meet = a.intersect(b).map_err(|e| e.to_string())?;
            for (k, comp) in meet.components().iter().enumerate() {
                let got = &tables[k][&comp.exponents().map_err(|e| e.to_string())?].0;
                if *got != tables[k][&ea[k]].0.and(&tables[k][&eb[k]].0) {
                    return Err(format!("intersect {ea:?} with {eb:?}"));
                }
            }
        }
    }
    Ok(codes.len())
}
