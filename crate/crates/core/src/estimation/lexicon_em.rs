//! EM for a word-to-word translation lexicon with NULL on both sides.
//!
//! Each target word is generated by one source word or by NULL; the NULL
//! source competes with its learned distribution scaled by a fixed prior.
//! A source word that generates no target word contributes a count to its
//! NULL translation.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::grammar::lexicon::{WordLexicon, NULL};
use crate::grammar::Sym;

pub const NULL_PRIOR: f64 = 0.1;

type Table = BTreeMap<Sym, BTreeMap<Sym, f64>>;

fn normalize(table: &mut Table) {
    for row in table.values_mut() {
        let total: f64 = row.values().sum();
        if total > 0.0 {
            row.values_mut().for_each(|p| *p /= total);
        }
    }
}

fn initial(pairs: &[(Vec<Sym>, Vec<Sym>)], null_prior: f64) -> Table {
    let null = Sym::from(NULL);
    let mut table = Table::new();
    for (src, tgt) in pairs {
        let sources: BTreeSet<&Sym> = src.iter().collect();
        let targets: BTreeSet<&Sym> = tgt.iter().collect();
        for s in &sources {
            let row = table.entry((*s).clone()).or_default();
            for t in &targets {
                *row.entry((*t).clone()).or_insert(0.0) += 1.0;
            }
        }
        for t in &tgt[..] {
            *table
                .entry(null.clone())
                .or_default()
                .entry(t.clone())
                .or_insert(0.0) += 1.0;
        }
    }
    normalize(&mut table);
    for (s, row) in table.iter_mut() {
        if *s != null {
            row.values_mut().for_each(|p| *p *= 1.0 - null_prior);
            row.insert(null.clone(), null_prior);
        }
    }
    table
}

fn prob(table: &Table, s: &Sym, t: &Sym) -> f64 {
    table.get(s).and_then(|r| r.get(t)).copied().unwrap_or(0.0)
}

/// Trains Pr(target | source) on sentence pairs, dimension 1 being the
/// source.
pub fn lexicon_em(pairs: &[(Vec<Sym>, Vec<Sym>)], iterations: usize) -> Result<WordLexicon> {
    lexicon_em_with(pairs, iterations, NULL_PRIOR)
}

pub fn lexicon_em_with(
    pairs: &[(Vec<Sym>, Vec<Sym>)],
    iterations: usize,
    null_prior: f64,
) -> Result<WordLexicon> {
    if pairs.iter().all(|(s, t)| s.is_empty() && t.is_empty()) {
        return Err(Error::EmptyCorpus);
    }
    let null = Sym::from(NULL);
    let mut table = initial(pairs, null_prior);
    for _ in 0..iterations {
        let mut counts = Table::new();
        for (src, tgt) in pairs {
            let mut unused = vec![1.0; src.len()];
            for t in tgt {
                let null_score = null_prior * prob(&table, &null, t);
                let scores: Vec<f64> = src.iter().map(|s| prob(&table, s, t)).collect();
                let total: f64 = null_score + scores.iter().sum::<f64>();
                if total <= 0.0 {
                    continue;
                }
                for (i, (s, sc)) in src.iter().zip(&scores).enumerate() {
                    let post = sc / total;
                    unused[i] *= 1.0 - post;
                    if post > 0.0 {
                        *counts
                            .entry(s.clone())
                            .or_default()
                            .entry(t.clone())
                            .or_insert(0.0) += post;
                    }
                }
                *counts
                    .entry(null.clone())
                    .or_default()
                    .entry(t.clone())
                    .or_insert(0.0) += null_score / total;
            }
            for (s, u) in src.iter().zip(unused) {
                *counts
                    .entry(s.clone())
                    .or_default()
                    .entry(null.clone())
                    .or_insert(0.0) += u;
            }
        }
        normalize(&mut counts);
        table = counts;
    }
    let mut lex = WordLexicon::new();
    for (s, row) in &table {
        let kept: Vec<(&Sym, f64)> = row
            .iter()
            .filter(|(_, p)| **p >= 1e-9)
            .map(|(t, p)| (t, *p))
            .collect();
        let total: f64 = kept.iter().map(|(_, p)| p).sum();
        for (t, p) in kept {
            lex.set(s.clone(), t.clone(), p / total);
        }
    }
    Ok(lex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokens;

    fn pair(a: &str, b: &str) -> (Vec<Sym>, Vec<Sym>) {
        (tokens(a), tokens(b))
    }

    #[test]
    fn single_pair_keeps_the_null_share() {
        let lex = lexicon_em(&[pair("a", "x")], 20).unwrap();
        assert!((lex.prob("a", "x") - (1.0 - NULL_PRIOR)).abs() < 1e-6);
        assert!((lex.prob("a", NULL) - NULL_PRIOR).abs() < 1e-6);
        assert!(lex.is_normalized(1e-9));
    }

    #[test]
    fn recovers_a_bijection() {
        let dict = [("a", "x"), ("b", "y"), ("c", "z"), ("d", "w")];
        let mut pairs = Vec::new();
        for i in 0..dict.len() {
            for j in 0..dict.len() {
                if i != j {
                    pairs.push(pair(
                        &format!("{} {}", dict[i].0, dict[j].0),
                        &format!("{} {}", dict[j].1, dict[i].1),
                    ));
                }
            }
        }
        let lex = lexicon_em(&pairs, 5).unwrap();
        for (s, t) in dict {
            assert!(lex.prob(s, t) > 0.9, "Pr({t}|{s}) = {}", lex.prob(s, t));
        }
        assert!(lex.is_normalized(1e-9));
    }

    #[test]
    fn identical_pairs_give_near_identity() {
        let pairs: Vec<_> = [
            "the dog barks",
            "the cat sleeps",
            "a dog sleeps",
            "a cat barks",
        ]
        .iter()
        .map(|s| pair(s, s))
        .collect();
        let lex = lexicon_em(&pairs, 10).unwrap();
        for w in ["the", "dog", "barks", "cat", "sleeps", "a"] {
            assert!(lex.prob(w, w) > 0.9, "Pr({w}|{w}) = {}", lex.prob(w, w));
        }
        assert!(lexicon_em(&[], 3).is_err());
    }
}
