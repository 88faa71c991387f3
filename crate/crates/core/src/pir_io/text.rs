//! The `[section]` / `key = value` layout shared by the text formats.

use crate::error::{PirError, Result};
use crate::upoly::{self, Poly};

/// Sections in file order, each with its entries in file order.
pub(crate) type Document = Vec<(String, Vec<(String, String)>)>;

pub(crate) fn parse_document(text: &str) -> Result<Document> {
    let mut doc: Document = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if doc.iter().any(|(n, _)| *n == name) {
                return Err(PirError::Format(format!("line {}: duplicate section [{name}]", lineno + 1)));
            }
            doc.push((name, Vec::new()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| PirError::Format(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let section = doc
            .last_mut()
            .ok_or_else(|| PirError::Format(format!("line {}: entry before any section", lineno + 1)))?;
        let key = key.split_whitespace().collect::<Vec<_>>().join(" ");
        if section.1.iter().any(|(k, _)| *k == key) {
            return Err(PirError::Format(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
        section.1.push((key, value.trim().to_string()));
    }
    Ok(doc)
}

/// Consumes entries of one section, rejecting leftovers.
pub(crate) struct Section {
    name: String,
    entries: Vec<(String, String)>,
}

impl Section {
    pub(crate) fn take(doc: &mut Document, name: &str) -> Result<Section> {
        let idx = doc
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| PirError::Format(format!("missing section [{name}]")))?;
        let (name, entries) = doc.remove(idx);
        Ok(Section { name, entries })
    }

    pub(crate) fn take_optional(doc: &mut Document, name: &str) -> Option<Section> {
        Section::take(doc, name).ok()
    }

    pub(crate) fn get(&mut self, key: &str) -> Result<String> {
        let idx = self
            .entries
            .iter()
            .position(|(k, _)| k == key)
            .ok_or_else(|| PirError::Format(format!("[{}] is missing '{key}'", self.name)))?;
        Ok(self.entries.remove(idx).1)
    }

    pub(crate) fn get_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|_| PirError::Format(format!("[{}] '{key}' has bad value '{raw}'", self.name)))
    }

    pub(crate) fn finish(self) -> Result<()> {
        match self.entries.first() {
            None => Ok(()),
            Some((k, _)) => Err(PirError::Format(format!("[{}] has unexpected key '{k}'", self.name))),
        }
    }
}

pub(crate) fn no_leftovers(doc: &Document) -> Result<()> {
    match doc.first() {
        None => Ok(()),
        Some((name, _)) => Err(PirError::Format(format!("unexpected section [{name}]"))),
    }
}

pub(crate) fn join_u64(values: &[u64]) -> String {
    if values.is_empty() {
        return "0".to_string();
    }
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub(crate) fn parse_u64_list(raw: &str) -> Result<Vec<u64>> {
    raw.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| PirError::Format(format!("bad integer '{}' in list", x.trim())))
        })
        .collect()
}

pub(crate) fn parse_poly(raw: &str) -> Result<Poly> {
    Ok(upoly::trim(parse_u64_list(raw)?))
}

pub(crate) fn factor_label(p: u64, e: u32) -> String {
    format!("{p}^{e}")
}
