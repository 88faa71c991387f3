//! Dense univariate polynomials over `Z_q`, lowest degree first.
//!
//! A polynomial is a `Vec<u64>` with no trailing zeros; the zero polynomial is
//! the empty vector. These helpers back the cyclic-code machinery (tower
//! divisibility, factoring `x^n - 1`, Hensel lifting).

use crate::error::{PirError, Result};
use crate::zmod::{add_mod, mod_inv, mul_mod, neg_mod, sub_mod};

pub type Poly = Vec<u64>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Reduces coefficients mod `q` and trims.
pub fn normalize(a: &[u64], q: u64) -> Poly {
    trim(a.iter().map(|&c| c % q).collect())
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn is_monic(a: &[u64]) -> bool {
    matches!(degree(a), Some(d) if a[d] == 1)
}

pub fn one() -> Poly {
    vec![1]
}

/// `x^n - 1` over `Z_q`.
pub fn xn_minus_1(n: usize, q: u64) -> Poly {
    let mut f = vec![0; n + 1];
    f[0] = q - 1;
    f[n] = 1;
    if n == 0 {
        return Vec::new();
    }
    f
}

pub fn add(a: &[u64], b: &[u64], q: u64) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| add_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), q))
        .collect();
    trim(out)
}

pub fn sub(a: &[u64], b: &[u64], q: u64) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| sub_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), q))
        .collect();
    trim(out)
}

pub fn scale(a: &[u64], c: u64, q: u64) -> Poly {
    trim(a.iter().map(|&x| mul_mod(x, c, q)).collect())
}

pub fn mul(a: &[u64], b: &[u64], q: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, q), q);
        }
    }
    trim(out)
}

/// Division with remainder by `b`, whose leading coefficient must be a unit mod `q`.
pub fn divrem(a: &[u64], b: &[u64], q: u64) -> Result<(Poly, Poly)> {
    let db = degree(b).ok_or_else(|| PirError::Format("division by zero polynomial".into()))?;
    let lc_inv = mod_inv(b[db], q)?;
    let mut rem: Poly = normalize(a, q);
    if rem.len() <= db {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![0u64; rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = rem[k];
        if c == 0 {
            continue;
        }
        let factor = mul_mod(c, lc_inv, q);
        quot[k - db] = factor;
        for (j, &bj) in b[..=db].iter().enumerate() {
            let idx = k - db + j;
            rem[idx] = sub_mod(rem[idx], mul_mod(factor, bj, q), q);
        }
    }
    Ok((trim(quot), trim(rem)))
}

pub fn rem(a: &[u64], b: &[u64], q: u64) -> Result<Poly> {
    Ok(divrem(a, b, q)?.1)
}

/// True iff the monic (or unit-leading) `b` divides `a` over `Z_q`.
pub fn divides(b: &[u64], a: &[u64], q: u64) -> Result<bool> {
    Ok(rem(a, b, q)?.is_empty())
}

/// Scales a polynomial over a field so that it is monic.
pub fn make_monic(a: &[u64], p: u64) -> Result<Poly> {
    match degree(a) {
        None => Ok(Vec::new()),
        Some(d) => {
            let inv = mod_inv(a[d], p)?;
            Ok(scale(a, inv, p))
        }
    }
}

/// Monic gcd over the prime field `F_p`.
pub fn gcd_field(a: &[u64], b: &[u64], p: u64) -> Result<Poly> {
    let mut x = normalize(a, p);
    let mut y = normalize(b, p);
    while !y.is_empty() {
        let r = rem(&x, &y, p)?;
        x = y;
        y = r;
    }
    make_monic(&x, p)
}

/// Extended Euclid over `F_p`: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
pub fn ext_gcd_field(a: &[u64], b: &[u64], p: u64) -> Result<(Poly, Poly, Poly)> {
    let (mut r0, mut r1) = (normalize(a, p), normalize(b, p));
    let (mut s0, mut s1) = (one(), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), one());
    while !r1.is_empty() {
        let (quo, r) = divrem(&r0, &r1, p)?;
        let s = sub(&s0, &mul(&quo, &s1, p), p);
        let t = sub(&t0, &mul(&quo, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    match degree(&r0) {
        None => Ok((r0, s0, t0)),
        Some(d) => {
            let inv = mod_inv(r0[d], p)?;
            Ok((scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p)))
        }
    }
}

/// `base^exp mod f` over `Z_q`.
pub fn pow_mod(base: &[u64], mut exp: u64, f: &[u64], q: u64) -> Result<Poly> {
    let mut acc = rem(&one(), f, q)?;
    let mut b = rem(base, f, q)?;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, q), f, q)?;
        }
        b = rem(&mul(&b, &b, q), f, q)?;
        exp >>= 1;
    }
    Ok(acc)
}

/// Negation, used by a few callers building `x - a`.
pub fn neg(a: &[u64], q: u64) -> Poly {
    trim(a.iter().map(|&c| neg_mod(c, q)).collect())
}

/// Pads (or truncates) to exactly `n` coefficients.
pub fn to_len(a: &[u64], n: usize) -> Vec<u64> {
    let mut v = a.to_vec();
    v.resize(n, 0);
    v
}

/// Parses `"5x^12 + 11x^11 + x + 4"` style text; repeated powers accumulate, `-` subtracts.
pub fn parse(text: &str, q: u64) -> Result<Poly> {
    let bad = |t: &str| PirError::Format(format!("bad polynomial term '{t}'"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() || compact == "0" {
        return Ok(Vec::new());
    }
    let mut out: Vec<u64> = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (negative, body) = match rest.as_bytes()[0] {
            b'+' => (false, &rest[1..]),
            b'-' => (true, &rest[1..]),
            _ => (false, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coef, power) = match term.split_once('x') {
            None => (term.parse::<u64>().map_err(|_| bad(term))?, 0usize),
            Some((c, p)) => {
                let coef = if c.is_empty() { 1 } else { c.parse::<u64>().map_err(|_| bad(term))? };
                let power = match p.strip_prefix('^') {
                    Some(k) => k.parse::<usize>().map_err(|_| bad(term))?,
                    None if p.is_empty() => 1,
                    None => return Err(bad(term)),
                };
                (coef, power)
            }
        };
        if out.len() <= power {
            out.resize(power + 1, 0);
        }
        let c = coef % q;
        out[power] = if negative { sub_mod(out[power], c, q) } else { add_mod(out[power], c, q) };
    }
    Ok(trim(out))
}

/// Formats as `x^3 + 2x + 1`.
pub fn display(a: &[u64]) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, &c) in a.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        parts.push(match i {
            0 => c.to_string(),
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{i}"),
        });
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let a = vec![4, 0, 3, 1, 2];
        let b = vec![1, 2, 1];
        let (qt, r) = divrem(&a, &b, 9).unwrap();
        assert!(r.len() < b.len());
        assert_eq!(add(&mul(&qt, &b, 9), &r, 9), normalize(&a, 9));
    }

    #[test]
    fn xn_minus_1_factors_over_f2() {
        // x^3 - 1 = (x + 1)(x^2 + x + 1) over F_2
        let f = xn_minus_1(3, 2);
        assert_eq!(mul(&[1, 1], &[1, 1, 1], 2), f);
        assert!(divides(&[1, 1], &f, 2).unwrap());
        assert!(!divides(&[1, 1, 0, 1], &f, 2).unwrap());
    }

    #[test]
    fn ext_gcd_identity() {
        let a = vec![1, 1, 0, 1]; // x^3 + x + 1
        let b = vec![1, 0, 1]; // x^2 + 1
        let (g, s, t) = ext_gcd_field(&a, &b, 2).unwrap();
        assert_eq!(g, vec![1]);
        assert_eq!(add(&mul(&s, &a, 2), &mul(&t, &b, 2), 2), g);
    }

    #[test]
    fn parse_round_trip() {
        assert_eq!(parse("x^2 + 2", 5).unwrap(), vec![2, 0, 1]);
        assert_eq!(parse("3x - 1", 5).unwrap(), vec![4, 3]);
        assert_eq!(parse("0", 5).unwrap(), Vec::<u64>::new());
        let a = vec![4, 0, 3, 1, 2];
        assert_eq!(parse(&display(&a), 5).unwrap(), a);
        assert!(parse("2y", 5).is_err());
    }

    #[test]
    fn display_format() {
        assert_eq!(display(&[2, 0, 1]), "x^2 + 2");
        assert_eq!(display(&[0, 3]), "3x");
        assert_eq!(display(&[]), "0");
    }
}
