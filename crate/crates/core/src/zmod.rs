//! Exact arithmetic in `Z_m` for a composite modulus with a known factorization.
//!
//! The factorization is always supplied by the caller. Values are canonical
//! representatives in `[0, m)` stored as `u64`; since `m < 2^32`, every product
//! of two reduced values fits in a `u64`.

use std::fmt;

use crate::error::{PirError, Result};

/// Upper bound (exclusive) on every modulus handled by the crate.
pub const MAX_MODULUS: u64 = 1 << 32;

/// One prime-power factor `p^e` of a modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
    /// `p^e`.
    pub q: u64,
}

impl PrimePower {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if e == 0 {
            return Err(PirError::ZeroExponent(p));
        }
        if !is_prime(p) {
            return Err(PirError::NonPrimeFactor(p));
        }
        let q = checked_pow(p, e).filter(|&q| q < MAX_MODULUS).ok_or_else(|| {
            PirError::Overflow(format!("{p}^{e} does not fit below 2^32"))
        })?;
        Ok(PrimePower { p, e, q })
    }

    /// `p`-adic valuation of `a` in `Z_{p^e}`; zero has valuation `e`.
    pub fn valuation(&self, a: u64) -> u32 {
        valuation(a % self.q, self.p, self.e)
    }

    /// `p^k` for `k <= e`.
    pub fn pow(&self, k: u32) -> u64 {
        self.p.pow(k)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.e)
        }
    }
}

/// A modulus `m = prod p_i^{e_i}` together with its factorization and radical `m'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    m: u64,
    m_prime: u64,
    factors: Vec<PrimePower>,
}

impl Modulus {
    /// Builds a modulus from `(prime, exponent)` pairs. Factors are sorted ascending.
    pub fn new(factors: &[(u64, u32)]) -> Result<Self> {
        if factors.is_empty() {
            return Err(PirError::Format("empty factor list".into()));
        }
        let mut pp = factors
            .iter()
            .map(|&(p, e)| PrimePower::new(p, e))
            .collect::<Result<Vec<_>>>()?;
        pp.sort_by_key(|f| f.p);
        for w in pp.windows(2) {
            if w[0].p == w[1].p {
                return Err(PirError::DuplicatePrime(w[0].p));
            }
        }
        let mut m: u64 = 1;
        let mut m_prime: u64 = 1;
        for f in &pp {
            m = m
                .checked_mul(f.q)
                .filter(|&m| m < MAX_MODULUS)
                .ok_or_else(|| PirError::Overflow("modulus must be below 2^32".into()))?;
            m_prime *= f.p;
        }
        Ok(Modulus { m, m_prime, factors: pp })
    }

    /// A prime modulus `p` (a field).
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(&[(p, 1)])
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// The radical `m' = prod p_i`.
    pub fn m_prime(&self) -> u64 {
        self.m_prime
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// Index of the factor `p^e`, if it is one.
    pub fn component_index(&self, p: u64, e: u32) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.p == p && f.e == e)
            .ok_or(PirError::UnknownComponent(p, e))
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.q).collect()
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.m
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.m)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        sub_mod(a, b, self.m)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.m)
    }

    /// Recombines one residue per prime-power factor into `Z_m`.
    pub fn crt(&self, residues: &[u64]) -> Result<u64> {
        crt_lift(residues, &self.moduli())
    }

    /// Parses `"2^2,3^2"` / `"3,5"` style factor lists.
    pub fn parse_factors(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (p, e) = match part.split_once('^') {
                Some((p, e)) => (p.trim(), e.trim()),
                None => (part, "1"),
            };
            let p: u64 = p
                .parse()
                .map_err(|_| PirError::Format(format!("bad prime '{p}'")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| PirError::Format(format!("bad exponent '{e}'")))?;
            out.push((p, e));
        }
        Modulus::new(&out)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|f| f.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// `p`-adic valuation of `a` in `Z_{p^e}`, capped at `e` (so `valuation(0) = e`).
pub fn valuation(mut a: u64, p: u64, e: u32) -> u32 {
    if a == 0 {
        return e;
    }
    let mut k = 0;
    while a % p == 0 && k < e {
        a /= p;
        k += 1;
    }
    k
}

/// Deterministic primality test; trial division suffices below `2^32`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid over signed integers: returns `(g, x, y)` with `a x + b y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `modulus`.
pub fn mod_inv(a: u64, modulus: u64) -> Result<u64> {
    if modulus == 1 {
        return Ok(0);
    }
    let a = a % modulus;
    let (g, x, _) = ext_gcd(a as i128, modulus as i128);
    if g != 1 {
        return Err(PirError::NotAUnit(a, modulus));
    }
    Ok(x.rem_euclid(modulus as i128) as u64)
}

/// The unique `x` in `[0, prod moduli)` with `x = residues[i] (mod moduli[i])`.
pub fn crt_lift(residues: &[u64], moduli: &[u64]) -> Result<u64> {
    if residues.len() != moduli.len() {
        return Err(PirError::LengthMismatch {
            expected: moduli.len(),
            got: residues.len(),
        });
    }
    let mut x: u128 = 0;
    let mut acc: u128 = 1;
    for (&r, &q) in residues.iter().zip(moduli) {
        if q == 0 {
            return Err(PirError::NonCoprimeModuli);
        }
        // x'= x + acc * t with t = (r - x) * acc^{-1} mod q
        let inv = mod_inv((acc % q as u128) as u64, q).map_err(|_| PirError::NonCoprimeModuli)?;
        let diff = sub_mod(r % q, (x % q as u128) as u64, q);
        let t = mul_mod(diff, inv, q) as u128;
        x += acc * t;
        acc = acc
            .checked_mul(q as u128)
            .filter(|&a| a <= u64::MAX as u128 + 1)
            .ok_or_else(|| PirError::Overflow("product of moduli exceeds 2^64".into()))?;
    }
    Ok(x as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_modulus_examples() {
        let m = Modulus::new(&[(3, 1), (5, 1)]).unwrap();
        assert_eq!((m.m(), m.m_prime()), (15, 15));
        let m = Modulus::new(&[(3, 2), (2, 2)]).unwrap();
        assert_eq!((m.m(), m.m_prime()), (36, 6));
        assert_eq!(m.factors()[0].p, 2);
        let m = Modulus::new(&[(2, 1)]).unwrap();
        assert_eq!((m.m(), m.m_prime()), (2, 2));
    }

    #[test]
    fn validate_modulus_errors() {
        assert_eq!(Modulus::new(&[(4, 1)]), Err(PirError::NonPrimeFactor(4)));
        assert_eq!(
            Modulus::new(&[(3, 1), (3, 2)]),
            Err(PirError::DuplicatePrime(3))
        );
        assert!(matches!(
            Modulus::new(&[(65537, 1), (65539, 1)]),
            Err(PirError::Overflow(_))
        ));
        assert!(matches!(Modulus::new(&[(2, 40)]), Err(PirError::Overflow(_))));
        assert_eq!(Modulus::new(&[(2, 0)]), Err(PirError::ZeroExponent(2)));
    }

    #[test]
    fn parse_and_display() {
        let m = Modulus::parse_factors("3^2, 2^2").unwrap();
        assert_eq!(m.m(), 36);
        assert_eq!(m.to_string(), "2^2,3^2");
        assert_eq!(Modulus::parse_factors("3,5").unwrap().m(), 15);
    }

    #[test]
    fn crt_lift_examples() {
        assert_eq!(crt_lift(&[1, 1], &[3, 5]).unwrap(), 1);
        assert_eq!(crt_lift(&[0, 0], &[4, 9]).unwrap(), 0);
        // exhaustive scan of 0..36 for the residues (2, 3)
        let expected = (0..36u64).find(|x| x % 4 == 2 && x % 9 == 3).unwrap();
        assert_eq!(expected, 30);
        assert_eq!(crt_lift(&[2, 3], &[4, 9]).unwrap(), expected);
        assert_eq!(crt_lift(&[1, 1], &[4, 6]), Err(PirError::NonCoprimeModuli));
    }

    #[test]
    fn crt_round_trip_exhaustive() {
        let pairs = [(4u64, 9u64), (3, 5), (7, 11), (8, 125), (16, 81)];
        for (a, b) in pairs {
            for x in 0..a * b {
                assert_eq!(crt_lift(&[x % a, x % b], &[a, b]).unwrap(), x);
            }
        }
        for x in 0..(4 * 9 * 25) {
            assert_eq!(crt_lift(&[x % 4, x % 9, x % 25], &[4, 9, 25]).unwrap(), x);
        }
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(1, 15).unwrap(), 1);
        assert_eq!(mod_inv(2, 15).unwrap(), (0..15).find(|x| 2 * x % 15 == 1).unwrap());
        assert_eq!(mod_inv(2, 15).unwrap(), 8);
        assert_eq!(mod_inv(7, 9).unwrap(), 4);
        assert_eq!(mod_inv(3, 9), Err(PirError::NotAUnit(3, 9)));
    }

    #[test]
    fn mod_inv_exhaustive() {
        for m in 2..=256u64 {
            for a in 1..m {
                if gcd(a, m) == 1 {
                    assert_eq!(a * mod_inv(a, m).unwrap() % m, 1, "a={a} m={m}");
                } else {
                    assert!(mod_inv(a, m).is_err());
                }
            }
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(0, 2, 3), 3);
        assert_eq!(valuation(4, 2, 3), 2);
        assert_eq!(valuation(6, 3, 2), 1);
        assert_eq!(valuation(5, 3, 2), 0);
    }
}
