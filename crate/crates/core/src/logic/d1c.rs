//! One-dimensional context-free parsing with contiguous spans.

use std::sync::Arc;

use crate::dspan::{DSpan, PrecedenceArray};
use crate::grammar::{Partners, Role, Rule};
use crate::logic::{Ant, Candidate, FireCtx, Item, Logic, RuleName, Term, TermId};

#[derive(Debug, Clone, Copy, Default)]
pub struct D1cLogic;

fn bounds(item: &Item) -> Option<(u32, u32)> {
    match item.spans[0].intervals() {
        [(i, j)] => Some((*i, *j)),
        _ => None,
    }
}

impl D1cLogic {
    fn compose(ctx: &FireCtx, y: TermId, z: TermId, out: &mut Vec<Candidate>) {
        let (yi, zi) = (ctx.item(y), ctx.item(z));
        let (Some((i, j)), Some((j2, k))) = (bounds(yi), bounds(zi)) else {
            return;
        };
        if j != j2 {
            return;
        }
        let sequence = [PrecedenceArray::contiguous(vec![1, 2])];
        for (rule, w) in ctx
            .grammar
            .nonterminating(&yi.labels, &zi.labels, &sequence)
        {
            let Rule::Nonterminating { lhs, .. } = rule.as_ref() else {
                continue;
            };
            out.push(Candidate {
                rule: RuleName::Compose,
                consequent: Term::Item(Item::new(lhs.clone(), vec![DSpan::interval(i, k)])),
                ants: vec![Ant::Id(y), Ant::Id(z), Ant::Rule(rule.clone(), w)],
            });
        }
    }
}

impl Logic for D1cLogic {
    fn name(&self) -> &'static str {
        "d1c"
    }

    fn axioms(
        &self,
        grammar: &dyn crate::grammar::GrammarEvaluator,
        input: &[Vec<crate::grammar::Sym>],
        weights: Option<&[Vec<f64>]>,
    ) -> crate::error::Result<Vec<(Term, f64)>> {
        super::check_dims(self.name(), grammar.dims(), input.len(), false)?;
        if grammar.dims() != 1 {
            return Err(crate::error::Error::Config(
                "logic d1c needs a one-dimensional grammar".into(),
            ));
        }
        Ok(super::word_axioms(input, weights))
    }

    fn fire(&self, ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>) {
        match ctx.index.term(trigger).as_ref() {
            Term::Word { pos, token, .. } => {
                for (rule, w) in ctx.grammar.terminating_for(0, token) {
                    let Rule::Terminating { lhs, .. } = rule.as_ref() else {
                        continue;
                    };
                    out.push(Candidate {
                        rule: RuleName::Scan,
                        consequent: Term::Item(Item::new(
                            vec![lhs.clone()],
                            vec![DSpan::word(*pos)],
                        )),
                        ants: vec![Ant::Id(trigger), Ant::Rule(Arc::clone(&rule), w)],
                    });
                }
            }
            Term::Item(item) => {
                for (role, partners) in [
                    (Role::First, ctx.grammar.partners(&item.labels, Role::First)),
                    (
                        Role::Second,
                        ctx.grammar.partners(&item.labels, Role::Second),
                    ),
                ] {
                    let ids: Vec<TermId> = match partners {
                        Partners::Any => ctx.index.all_items().to_vec(),
                        Partners::Keys(keys) => keys
                            .iter()
                            .flat_map(|k| ctx.index.items_with_key(k).iter().copied())
                            .collect(),
                    };
                    for other in ids {
                        match role {
                            Role::First => Self::compose(ctx, trigger, other, out),
                            _ => Self::compose(ctx, other, trigger, out),
                        }
                    }
                }
            }
            _ => {}
        }
    }
}
