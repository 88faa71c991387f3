use std::fmt::Write as _;

use super::text::{join_u64, no_leftovers, parse_document, parse_u64_list, Section};
use crate::error::{PirError, Result};
use crate::pir::QuerySecrets;
use crate::poly::RingElem;

/// Client-side state kept between issuing a query and recovering the answer.
///
/// `[a]` and `[e]` are keyed `file.row.col` (1-based), `[u]` by row; every value lists all `n` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretsFile {
    pub n: usize,
    pub m: u64,
    pub secrets: QuerySecrets,
}

fn write_block(out: &mut String, name: &str, blocks: &[Vec<Vec<RingElem>>]) {
    let _ = writeln!(out, "[{name}]");
    for (i, file) in blocks.iter().enumerate() {
        for (k, row) in file.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let _ = writeln!(out, "{}.{}.{} = {}", i + 1, k + 1, j + 1, join_u64(x.coeffs()));
            }
        }
    }
    out.push('\n');
}

fn read_elem(sec: &mut Section, key: &str, n: usize, m: u64) -> Result<RingElem> {
    let coeffs = parse_u64_list(&sec.get(key)?)?;
    if coeffs.len() != n {
        return Err(PirError::Format(format!("'{key}' has {} coefficients, expected {n}", coeffs.len())));
    }
    if let Some(&bad) = coeffs.iter().find(|&&c| c >= m) {
        return Err(PirError::Format(format!("'{key}' has coefficient {bad} not below {m}")));
    }
    Ok(RingElem::new(coeffs, m))
}

fn read_block(
    doc: &mut super::text::Document,
    name: &str,
    (t, r, s): (usize, usize, usize),
    n: usize,
    m: u64,
) -> Result<Vec<Vec<Vec<RingElem>>>> {
    let mut sec = Section::take(doc, name)?;
    let mut out = Vec::with_capacity(t);
    for i in 1..=t {
        let mut file = Vec::with_capacity(r);
        for k in 1..=r {
            let row = (1..=s)
                .map(|j| read_elem(&mut sec, &format!("{i}.{k}.{j}"), n, m))
                .collect::<Result<Vec<_>>>()?;
            file.push(row);
        }
        out.push(file);
    }
    sec.finish()?;
    Ok(out)
}

impl SecretsFile {
    pub fn new(n: usize, m: u64, secrets: QuerySecrets) -> Self {
        SecretsFile { n, m, secrets }
    }

    pub fn serialize(&self) -> String {
        let q = &self.secrets;
        let t = q.a.len();
        let r = q.u.len();
        let s = q.a.first().and_then(|f| f.first()).map_or(0, Vec::len);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "[query]\nn = {}\nm = {}\nd = {}\ngamma = {}\nt = {t}\nr = {r}\ns = {s}\n",
            self.n, self.m, q.d, q.gamma
        );
        write_block(&mut out, "a", &q.a);
        write_block(&mut out, "e", &q.e);
        out.push_str("[u]\n");
        for (k, x) in q.u.iter().enumerate() {
            let _ = writeln!(out, "{} = {}", k + 1, join_u64(x.coeffs()));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = parse_document(text)?;
        let mut head = Section::take(&mut doc, "query")?;
        let n: usize = head.get_parsed("n")?;
        let m: u64 = head.get_parsed("m")?;
        let d: usize = head.get_parsed("d")?;
        let gamma: usize = head.get_parsed("gamma")?;
        let dims: (usize, usize, usize) = (head.get_parsed("t")?, head.get_parsed("r")?, head.get_parsed("s")?);
        head.finish()?;
        if n == 0 || m < 2 {
            return Err(PirError::Format("n must be positive and m at least 2".into()));
        }
        let a = read_block(&mut doc, "a", dims, n, m)?;
        let e = read_block(&mut doc, "e", dims, n, m)?;
        let mut sec = Section::take(&mut doc, "u")?;
        let u = (1..=dims.1)
            .map(|k| read_elem(&mut sec, &k.to_string(), n, m))
            .collect::<Result<Vec<_>>>()?;
        sec.finish()?;
        no_leftovers(&doc)?;
        Ok(SecretsFile { n, m, secrets: QuerySecrets { d, gamma, a, e, u } })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.serialize())?)
    }
}
