//! Relative-frequency grammar induction from a multitreebank.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grammar::{strip_heads, Gmtg, Label, Rule};
use crate::translate::Multitree;

/// An induced grammar and the trees left out of it.
#[derive(Debug, Clone)]
pub struct Induced {
    pub grammar: Gmtg,
    /// Index and reason for every rejected tree.
    pub rejected: Vec<(usize, String)>,
}

/// Weights are relative frequencies of production use per LHS link. The
/// start link is `start` if given, else the most frequent root link with
/// heads removed.
pub fn estimate_from_multitreebank(
    trees: &[Multitree],
    start: Option<Vec<Label>>,
) -> Result<Induced> {
    let dims = match &start {
        Some(s) => s.len(),
        None => trees
            .first()
            .map(Multitree::dims)
            .ok_or(Error::EmptyCorpus)?,
    };
    let mut rejected = Vec::new();
    let mut counts: BTreeMap<Rule, f64> = BTreeMap::new();
    let mut roots: BTreeMap<Vec<Label>, usize> = BTreeMap::new();
    for (k, tree) in trees.iter().enumerate() {
        if tree.dims() != dims {
            rejected.push((k, format!("{} dimensions, expected {dims}", tree.dims())));
            continue;
        }
        if let Err(e) = tree.validate() {
            rejected.push((k, e.to_string()));
            continue;
        }
        *roots.entry(strip_heads(tree.labels())).or_insert(0) += 1;
        for rule in tree.productions() {
            *counts.entry(rule).or_insert(0.0) += 1.0;
        }
    }
    let start = match start {
        Some(s) => s,
        None => {
            let top = roots
                .values()
                .copied()
                .max()
                .ok_or_else(|| Error::Tree("no valid tree in the multitreebank".into()))?;
            roots
                .into_iter()
                .find(|(_, n)| *n == top)
                .map(|(l, _)| l)
                .expect("maximum exists")
        }
    };
    let grammar = Gmtg::new(dims, start, counts)?.normalized();
    Ok(Induced { grammar, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::GrammarEvaluator;

    const WASH: &str = "(S,S|[1,2|2,1] (NP,NP|[1|2,1] (N,N|[1|2] (PAS,_ (1:Pasudu)) (_,DISH (2:dishes))) (_,D (2:the))) (V,V|[1|2] (MIT,_ (1:moy)) (_,WASH (2:Wash))))";

    fn weight(g: &Gmtg, token: &str) -> f64 {
        g.rules()
            .iter()
            .find(|(r, _)| matches!(r.as_ref(), Rule::Terminating { terminal, .. } if terminal.as_ref() == token))
            .map_or(0.0, |(_, w)| *w)
    }

    #[test]
    fn single_tree_weights_are_one() {
        let t: Multitree = WASH.parse().unwrap();
        let ind = estimate_from_multitreebank(&[t], None).unwrap();
        assert!(ind.rejected.is_empty());
        assert_eq!(ind.grammar.len(), 9);
        assert!(ind.grammar.rules().iter().all(|(_, w)| *w == 1.0));
        assert_eq!(weight(&ind.grammar, "clean"), 0.0);
        assert_eq!(ind.grammar.start(), &[Label::new("S"), Label::new("S")]);
    }

    #[test]
    fn counts_usage_ratios() {
        let wash: Multitree = WASH.parse().unwrap();
        let clean: Multitree = WASH.replace("Wash", "clean").parse().unwrap();
        let mut trees = vec![wash.clone(); 7];
        trees.extend(vec![clean.clone(); 3]);
        let g = estimate_from_multitreebank(&trees, None).unwrap().grammar;
        assert!((weight(&g, "Wash") - 0.7).abs() < 1e-12);
        assert!((weight(&g, "clean") - 0.3).abs() < 1e-12);
        let g = estimate_from_multitreebank(&[wash, clean], None)
            .unwrap()
            .grammar;
        assert_eq!(weight(&g, "Wash"), 0.5);
        assert!(g.is_normalized(1e-12));
    }

    #[test]
    fn rejects_malformed_trees() {
        let good: Multitree = WASH.parse().unwrap();
        let Multitree::Node {
            labels,
            pav,
            children,
        } = good.clone()
        else {
            unreachable!()
        };
        let bad = Multitree::Node {
            labels,
            pav,
            children: children[..1].to_vec(),
        };
        let ind = estimate_from_multitreebank(&[good, bad], None).unwrap();
        assert_eq!(ind.rejected.len(), 1);
        assert_eq!(ind.rejected[0].0, 1);
        assert!(estimate_from_multitreebank(&[], None).is_err());
    }
}
