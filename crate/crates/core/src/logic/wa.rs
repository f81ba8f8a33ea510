//! Word alignment: one item per lexicon entry matched against a tuple of
//! input words. No composition.

use crate::dspan::DSpan;
use crate::grammar::{Label, Rule};
use crate::logic::{Ant, Candidate, FireCtx, Item, Logic, RuleName, Term, TermId};

#[derive(Debug, Clone, Copy, Default)]
pub struct WaLogic;

impl Logic for WaLogic {
    fn name(&self) -> &'static str {
        "wa"
    }

    fn fire(&self, ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>) {
        let Term::Word { dim, token, .. } = ctx.index.term(trigger).as_ref() else {
            return;
        };
        for (rule, w) in ctx.grammar.lexical_for(*dim, token) {
            let Rule::Lexical { tokens } = rule.as_ref() else {
                continue;
            };
            // one choice of word per active dimension, the trigger fixed in its own
            let mut tuples: Vec<Vec<TermId>> = vec![Vec::new()];
            for (d, tok) in tokens.iter().enumerate() {
                let Some(tok) = tok else { continue };
                let choices: Vec<TermId> = if d == *dim {
                    vec![trigger]
                } else {
                    ctx.index.words_with(d, tok).to_vec()
                };
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        choices.iter().map(move |&c| {
                            let mut t = t.clone();
                            t.push(c);
                            t
                        })
                    })
                    .collect();
            }
            for tuple in tuples {
                let mut labels = vec![Label::inactive(); tokens.len()];
                let mut spans = vec![DSpan::empty(); tokens.len()];
                for &id in &tuple {
                    if let Term::Word { dim, pos, .. } = ctx.index.term(id).as_ref() {
                        labels[*dim] = Label::new("S");
                        spans[*dim] = DSpan::word(*pos);
                    }
                }
                let mut ants: Vec<Ant> = tuple.into_iter().map(Ant::Id).collect();
                ants.push(Ant::Rule(rule.clone(), w));
                out.push(Candidate {
                    rule: RuleName::Match,
                    consequent: Term::Item(Item::new(labels, spans)),
                    ants,
                });
            }
        }
    }
}
