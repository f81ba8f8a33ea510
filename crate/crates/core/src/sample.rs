//! Seeded sampling of multitrees and multitexts from a weighted grammar.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grammar::{Gmtg, GrammarEvaluator, Label, Rule, Sym};
use crate::translate::Multitree;

/// Draws multitrees top-down, choosing each production with probability
/// proportional to its weight among those with the same LHS link.
pub struct Sampler<'g> {
    grammar: &'g Gmtg,
    by_lhs: BTreeMap<Vec<Label>, (Vec<Arc<Rule>>, WeightedIndex<f64>)>,
    rng: ChaCha8Rng,
    /// Derivations deeper than this are discarded and redrawn.
    pub max_depth: usize,
}

impl<'g> Sampler<'g> {
    pub fn new(grammar: &'g Gmtg, seed: u64) -> Self {
        let mut groups: BTreeMap<Vec<Label>, (Vec<Arc<Rule>>, Vec<f64>)> = BTreeMap::new();
        for (r, w) in grammar.rules() {
            if *w > 0.0 {
                let g = groups.entry(r.lhs_link(grammar.dims())).or_default();
                g.0.push(r.clone());
                g.1.push(*w);
            }
        }
        let by_lhs = groups
            .into_iter()
            .map(|(k, (rules, ws))| {
                (
                    k,
                    (rules, WeightedIndex::new(ws).expect("positive weights")),
                )
            })
            .collect();
        Sampler {
            grammar,
            by_lhs,
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_depth: 40,
        }
    }

    fn draw(&mut self, link: &[Label], depth: usize) -> Option<Multitree> {
        if depth > self.max_depth {
            return None;
        }
        let (rules, dist) = self.by_lhs.get(link)?;
        let rule = rules[dist.sample(&mut self.rng)].clone();
        match rule.as_ref() {
            Rule::Terminating { dim, terminal, .. } => Some(Multitree::Leaf {
                labels: link.to_vec(),
                dim: *dim,
                token: terminal.clone(),
            }),
            Rule::Nonterminating { pav, y, z, .. } => {
                let left = self.draw(y, depth + 1)?;
                let right = self.draw(z, depth + 1)?;
                Some(Multitree::Node {
                    labels: link.to_vec(),
                    pav: pav.clone(),
                    children: vec![left, right],
                })
            }
            Rule::Lexical { .. } => None,
        }
    }

    /// One multitree rooted in the start link.
    pub fn tree(&mut self) -> Result<Multitree> {
        let start = self.grammar.start().to_vec();
        for _ in 0..1000 {
            if let Some(t) = self.draw(&start, 0) {
                return Ok(t);
            }
        }
        Err(Error::Config(
            "grammar derives no finite multitree from its start link".into(),
        ))
    }

    /// Multitrees together with their yields in every dimension.
    pub fn corpus(&mut self, n: usize) -> Result<Vec<(Multitree, Vec<Vec<Sym>>)>> {
        (0..n)
            .map(|_| {
                let t = self.tree()?;
                let yields = (0..t.dims())
                    .map(|d| t.linearize(d))
                    .collect::<Result<Vec<_>>>()?;
                Ok((t, yields))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: &str = "\
gmtg D=2 start=S,S
P S,S -> [1,2|2,1] (A,A)(B,B) @ 1
P A,A -> [1|2] (A,_)(_,A) @ 1
P B,B -> [1|2] (B,_)(_,B) @ 1
T d=1 A -> a @ 0.5
T d=1 A -> c @ 0.5
T d=2 A -> x @ 1
T d=1 B -> b @ 1
T d=2 B -> y @ 1
";

    #[test]
    fn seeded_and_well_formed() {
        let g = Gmtg::parse(G).unwrap();
        let a = Sampler::new(&g, 7).corpus(20).unwrap();
        let b = Sampler::new(&g, 7).corpus(20).unwrap();
        assert_eq!(a, b);
        for (t, y) in &a {
            t.validate().unwrap();
            assert_eq!(
                y[1].iter().map(|s| s.as_ref()).collect::<Vec<_>>(),
                ["y", "x"]
            );
        }
        assert!(a.iter().any(|(_, y)| y[0][0].as_ref() == "a"));
        assert!(a.iter().any(|(_, y)| y[0][0].as_ref() == "c"));
    }
}
