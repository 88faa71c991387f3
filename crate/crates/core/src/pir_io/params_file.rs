use std::fmt::Write as _;

use super::text::{factor_label, join_u64, no_leftovers, parse_document, parse_poly, parse_u64_list, Section};
use crate::chaincode::ChainRingCode;
use crate::crtcode::CrtCyclicCode;
use crate::error::{PirError, Result};
use crate::outercode::OuterCode;
use crate::pir::{PirParams, Shape};
use crate::upoly::Poly;
use crate::zmod::Modulus;

/// The client's parameter file. Towers are lists of coefficient vectors, lowest degree first.
///
/// ```text
/// [modulus]
/// factors = 2^2,3^2
/// [ring]
/// n = 91
/// [inner]
/// 2^2 f0 = ...
/// [outer]
/// s = 5
/// M1 = 1,0,3,0,0
/// C1 2^2 f0 = ...
/// [shape]
/// t = 4
/// L = 8
/// r = 4
/// [flags]
/// allow-noncompliant = false
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamsFile {
    pub factors: Vec<(u64, u32)>,
    pub n: usize,
    /// `inner[k]`: tower of the inner code at prime `k`.
    pub inner: Vec<Vec<Poly>>,
    pub mix: Vec<Vec<u64>>,
    /// `constituents[i][k]`: tower of constituent `i` at prime `k`.
    pub constituents: Vec<Vec<Vec<Poly>>>,
    pub shape: Shape,
    pub allow_noncompliant: bool,
}

/// What a server may know: the modulus and the database shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicParams {
    pub factors: Vec<(u64, u32)>,
    pub shape: Shape,
}

fn write_modulus(out: &mut String, factors: &[(u64, u32)]) {
    let list: Vec<String> = factors.iter().map(|&(p, e)| factor_label(p, e)).collect();
    let _ = writeln!(out, "[modulus]\nfactors = {}\n", list.join(","));
}

fn write_shape(out: &mut String, shape: Shape) {
    let _ = writeln!(out, "[shape]\nt = {}\nL = {}\nr = {}\n", shape.t, shape.l, shape.r);
}

fn read_modulus(doc: &mut super::text::Document) -> Result<Vec<(u64, u32)>> {
    let mut sec = Section::take(doc, "modulus")?;
    let modulus = Modulus::parse_factors(&sec.get("factors")?)?;
    sec.finish()?;
    Ok(modulus.factors().iter().map(|f| (f.p, f.e)).collect())
}

fn read_shape(doc: &mut super::text::Document) -> Result<Shape> {
    let mut sec = Section::take(doc, "shape")?;
    let shape = Shape { t: sec.get_parsed("t")?, l: sec.get_parsed("L")?, r: sec.get_parsed("r")? };
    sec.finish()?;
    Ok(shape)
}

fn read_tower(sec: &mut Section, prefix: &str, p: u64, e: u32) -> Result<Vec<Poly>> {
    (0..e).map(|j| parse_poly(&sec.get(&format!("{prefix}{} f{j}", factor_label(p, e)))?)).collect()
}

impl ParamsFile {
    pub fn s(&self) -> usize {
        self.mix.len()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        write_modulus(&mut out, &self.factors);
        let _ = writeln!(out, "[ring]\nn = {}\n", self.n);
        out.push_str("[inner]\n");
        for (&(p, e), tower) in self.factors.iter().zip(&self.inner) {
            for (j, f) in tower.iter().enumerate() {
                let _ = writeln!(out, "{} f{j} = {}", factor_label(p, e), join_u64(f));
            }
        }
        let _ = writeln!(out, "\n[outer]\ns = {}", self.s());
        for (i, row) in self.mix.iter().enumerate() {
            let _ = writeln!(out, "M{} = {}", i + 1, join_u64(row));
        }
        for (i, comps) in self.constituents.iter().enumerate() {
            for (&(p, e), tower) in self.factors.iter().zip(comps) {
                for (j, f) in tower.iter().enumerate() {
                    let _ = writeln!(out, "C{} {} f{j} = {}", i + 1, factor_label(p, e), join_u64(f));
                }
            }
        }
        out.push('\n');
        write_shape(&mut out, self.shape);
        let _ = writeln!(out, "[flags]\nallow-noncompliant = {}", self.allow_noncompliant);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = parse_document(text)?;
        let factors = read_modulus(&mut doc)?;

        let mut ring = Section::take(&mut doc, "ring")?;
        let n: usize = ring.get_parsed("n")?;
        ring.finish()?;

        let mut sec = Section::take(&mut doc, "inner")?;
        let inner = factors
            .iter()
            .map(|&(p, e)| read_tower(&mut sec, "", p, e))
            .collect::<Result<Vec<_>>>()?;
        sec.finish()?;

        let mut sec = Section::take(&mut doc, "outer")?;
        let s: usize = sec.get_parsed("s")?;
        let mix = (1..=s)
            .map(|i| {
                let row = parse_u64_list(&sec.get(&format!("M{i}"))?)?;
                if row.len() != s {
                    return Err(PirError::Format(format!("M{i} has {} entries, expected {s}", row.len())));
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let constituents = (1..=s)
            .map(|i| {
                factors
                    .iter()
                    .map(|&(p, e)| read_tower(&mut sec, &format!("C{i} "), p, e))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        sec.finish()?;

        let shape = read_shape(&mut doc)?;
        let allow_noncompliant = match Section::take_optional(&mut doc, "flags") {
            None => false,
            Some(mut flags) => {
                let v = flags.get_parsed("allow-noncompliant")?;
                flags.finish()?;
                v
            }
        };
        no_leftovers(&doc)?;
        Ok(ParamsFile { factors, n, inner, mix, constituents, shape, allow_noncompliant })
    }

    pub fn from_params(params: &PirParams) -> Self {
        let towers = |code: &CrtCyclicCode| -> Vec<Vec<Poly>> {
            code.components().iter().map(|c| c.tower().to_vec()).collect()
        };
        ParamsFile {
            factors: params.modulus().factors().iter().map(|f| (f.p, f.e)).collect(),
            n: params.n(),
            inner: towers(params.inner()),
            mix: params.outer().mix().to_vec(),
            constituents: params.outer().constituents().iter().map(towers).collect(),
            shape: params.shape(),
            allow_noncompliant: params.allow_noncompliant(),
        }
    }

    /// Rebuilds and validates the parameters.
    pub fn to_params(&self) -> Result<PirParams> {
        let modulus = Modulus::new(&self.factors)?;
        let code = |towers: &[Vec<Poly>]| -> Result<CrtCyclicCode> {
            let comps = modulus
                .factors()
                .iter()
                .zip(towers)
                .map(|(f, t)| ChainRingCode::new(f.p, f.e, self.n, t.clone()))
                .collect::<Result<Vec<_>>>()?;
            CrtCyclicCode::new(modulus.clone(), comps)
        };
        let inner = code(&self.inner)?;
        let constituents = self.constituents.iter().map(|c| code(c)).collect::<Result<Vec<_>>>()?;
        let outer = OuterCode::build(constituents, self.mix.clone())?;
        PirParams::new(inner, outer, self.shape, self.allow_noncompliant)
    }

    pub fn public(&self) -> PublicParams {
        PublicParams { factors: self.factors.clone(), shape: self.shape }
    }
}

impl PublicParams {
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        write_modulus(&mut out, &self.factors);
        write_shape(&mut out, self.shape);
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = parse_document(text)?;
        let factors = read_modulus(&mut doc)?;
        let shape = read_shape(&mut doc)?;
        no_leftovers(&doc)?;
        Ok(PublicParams { factors, shape })
    }

    pub fn modulus(&self) -> Result<Modulus> {
        Modulus::new(&self.factors)
    }
}
