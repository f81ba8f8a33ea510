//! Multitext tuples and the block-structured multitext file format.
//!
//! A file holds blank-line-separated blocks. Each line of a block is
//! `d<k>: tok tok ...` for 1-based dimension `k`; dimensions may be absent.

use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::grammar::Sym;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Multitext {
    /// One entry per dimension; `None` for an absent dimension.
    pub dims: Vec<Option<Vec<Sym>>>,
}

pub fn tokens(s: &str) -> Vec<Sym> {
    s.split_whitespace().map(Sym::from).collect()
}

impl Multitext {
    /// Every dimension present, tokens split on whitespace.
    pub fn from_strs(dims: &[&str]) -> Self {
        Multitext {
            dims: dims.iter().map(|s| Some(tokens(s))).collect(),
        }
    }

    pub fn from_tokens(dims: Vec<Vec<Sym>>) -> Self {
        Multitext {
            dims: dims.into_iter().map(Some).collect(),
        }
    }

    pub fn dim(&self, d: usize) -> Option<&[Sym]> {
        self.dims.get(d).and_then(|t| t.as_deref())
    }

    /// The leading present dimensions, which must be followed only by
    /// absent ones.
    pub fn input_prefix(&self) -> Result<Vec<Vec<Sym>>> {
        let present = self.dims.iter().take_while(|d| d.is_some()).count();
        if self.dims[present..].iter().any(Option::is_some) {
            return Err(Error::Config(
                "input dimensions must be a prefix of the grammar's dimensions".into(),
            ));
        }
        Ok(self.dims[..present]
            .iter()
            .map(|d| d.clone().unwrap_or_default())
            .collect())
    }

    /// All dimensions, absent ones as empty sentences.
    pub fn all(&self) -> Vec<Vec<Sym>> {
        self.dims
            .iter()
            .map(|d| d.clone().unwrap_or_default())
            .collect()
    }

    /// Only the listed dimensions, in order.
    pub fn select(&self, dims: &[usize]) -> Multitext {
        Multitext {
            dims: dims
                .iter()
                .map(|&d| self.dims.get(d).cloned().flatten())
                .collect(),
        }
    }
}

impl fmt::Display for Multitext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, toks) in self.dims.iter().enumerate() {
            if let Some(toks) = toks {
                let toks: Vec<&str> = toks.iter().map(|t| t.as_ref()).collect();
                if toks.is_empty() {
                    writeln!(f, "d{}:", d + 1)?;
                } else {
                    writeln!(f, "d{}: {}", d + 1, toks.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<Multitext>> {
    let mut out = Vec::new();
    let mut current: Option<Multitext> = None;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            out.extend(current.take());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (tag, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(k + 1, "expected `d<k>: tokens`"))?;
        let d: usize = tag
            .strip_prefix('d')
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| parse_err(k + 1, format!("bad dimension tag `{tag}`")))?;
        let mt = current.get_or_insert_with(Multitext::default);
        if mt.dims.len() < d {
            mt.dims.resize(d, None);
        }
        if mt.dims[d - 1].is_some() {
            return Err(parse_err(k + 1, format!("dimension {d} given twice")));
        }
        mt.dims[d - 1] = Some(tokens(rest));
    }
    out.extend(current);
    Ok(out)
}

pub fn corpus_to_text(corpus: &[Multitext]) -> String {
    corpus
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}
