//! Multiparsing with reverse (outside) values as first-class chart terms.

use std::sync::Arc;

use crate::dspan::{relativize_all, subtract_all, DSpan};
use crate::error::Result;
use crate::grammar::{GrammarEvaluator, Label, Role, Rule, Sym};
use crate::logic::{
    c::CLogic, check_dims, word_axioms, Ant, Candidate, FireCtx, Item, Logic, RuleName, Term,
    TermId,
};

/// Logic C plus Reverse Compose Left/Right and Reverse Scan, seeded by a
/// pivot axiom. A reverse item is only derived for a forward item already in
/// the chart.
#[derive(Debug, Clone, Copy, Default)]
pub struct CrLogic;

/// Start links to pivot on. When the start link has no heads but items may
/// carry them, every head drawn from the input of the same dimension gets
/// its own pivot.
pub fn pivot_links(grammar: &dyn GrammarEvaluator, input: &[Vec<Sym>]) -> Vec<Vec<Label>> {
    let mut links: Vec<Vec<Label>> = vec![Vec::new()];
    for (d, start) in grammar.start().iter().enumerate() {
        let options: Vec<Label> =
            if start.head.is_none() && start.is_active() && grammar.lexicalized() {
                let mut heads: Vec<Sym> = input[d].clone();
                heads.sort();
                heads.dedup();
                heads
                    .into_iter()
                    .map(|h| start.with_head(Some(h)))
                    .collect()
            } else {
                vec![start.clone()]
            };
        links = links
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l.clone());
                    p
                })
            })
            .collect();
    }
    links
}

pub fn pivot_spans(input: &[Vec<Sym>]) -> Vec<DSpan> {
    input
        .iter()
        .map(|toks| {
            if toks.is_empty() {
                DSpan::empty()
            } else {
                DSpan::interval(0, toks.len() as u32)
            }
        })
        .collect()
}

impl CrLogic {
    /// Y forward, X reverse, rule X => Y Z: derive Z reverse.
    fn right(
        ctx: &FireCtx,
        y: TermId,
        x: TermId,
        rule: &Arc<Rule>,
        w: f64,
        out: &mut Vec<Candidate>,
    ) {
        let Rule::Nonterminating { pav, z, .. } = rule.as_ref() else {
            return;
        };
        let (yi, xi) = (ctx.item(y), ctx.item(x));
        let Ok(sigma) = subtract_all(&xi.spans, &yi.spans) else {
            return;
        };
        match relativize_all(&yi.spans, &sigma) {
            Ok(arrays) if arrays == pav.arrays() => {}
            _ => return,
        }
        let zi = Item::new(z.clone(), sigma);
        if !ctx.index.contains(&Term::Item(zi.clone())) {
            return;
        }
        out.push(Candidate {
            rule: RuleName::ReverseComposeRight,
            consequent: Term::RevItem(zi),
            ants: vec![Ant::Id(y), Ant::Id(x), Ant::Rule(rule.clone(), w)],
        });
    }

    /// Z forward, X reverse, rule X => Y Z: derive Y reverse.
    fn left(
        ctx: &FireCtx,
        z: TermId,
        x: TermId,
        rule: &Arc<Rule>,
        w: f64,
        out: &mut Vec<Candidate>,
    ) {
        let Rule::Nonterminating { pav, y, .. } = rule.as_ref() else {
            return;
        };
        let (zi, xi) = (ctx.item(z), ctx.item(x));
        let Ok(tau) = subtract_all(&xi.spans, &zi.spans) else {
            return;
        };
        match relativize_all(&tau, &zi.spans) {
            Ok(arrays) if arrays == pav.arrays() => {}
            _ => return,
        }
        let yi = Item::new(y.clone(), tau);
        if !ctx.index.contains(&Term::Item(yi.clone())) {
            return;
        }
        out.push(Candidate {
            rule: RuleName::ReverseComposeLeft,
            consequent: Term::RevItem(yi),
            ants: vec![Ant::Id(z), Ant::Id(x), Ant::Rule(rule.clone(), w)],
        });
    }

    fn fire_item(ctx: &FireCtx, trigger: TermId, item: &Item, out: &mut Vec<Candidate>) {
        // as Y in X => Y Z
        for (rule, w) in ctx.grammar.nonterminating_by(Role::First, &item.labels) {
            let Rule::Nonterminating { lhs, z, .. } = rule.as_ref() else {
                continue;
            };
            for &x in ctx.index.rev_items_with(lhs) {
                Self::right(ctx, trigger, x, &rule, w, out);
                // the trigger may be the forward item a Left inference waits for
                if let Ok(sigma) = subtract_all(&ctx.item(x).spans, &item.spans) {
                    if let Some(zid) = ctx.index.id_of(&Term::Item(Item::new(z.clone(), sigma))) {
                        Self::left(ctx, zid, x, &rule, w, out);
                    }
                }
            }
        }
        // as Z in X => Y Z
        for (rule, w) in ctx.grammar.nonterminating_by(Role::Second, &item.labels) {
            let Rule::Nonterminating { lhs, y, .. } = rule.as_ref() else {
                continue;
            };
            for &x in ctx.index.rev_items_with(lhs) {
                Self::left(ctx, trigger, x, &rule, w, out);
                if let Ok(tau) = subtract_all(&ctx.item(x).spans, &item.spans) {
                    if let Some(yid) = ctx.index.id_of(&Term::Item(Item::new(y.clone(), tau))) {
                        Self::right(ctx, yid, x, &rule, w, out);
                    }
                }
            }
        }
    }

    fn fire_rev_item(ctx: &FireCtx, trigger: TermId, item: &Item, out: &mut Vec<Candidate>) {
        for (rule, w) in ctx.grammar.nonterminating_by(Role::Lhs, &item.labels) {
            let Rule::Nonterminating { y, z, .. } = rule.as_ref() else {
                continue;
            };
            for &yid in ctx.index.items_with_key(&ctx.grammar.index_key(y)) {
                if ctx.item(yid).labels == *y {
                    Self::right(ctx, yid, trigger, &rule, w, out);
                }
            }
            for &zid in ctx.index.items_with_key(&ctx.grammar.index_key(z)) {
                if ctx.item(zid).labels == *z {
                    Self::left(ctx, zid, trigger, &rule, w, out);
                }
            }
        }
        let Some((dim, span)) = item.single_dim() else {
            return;
        };
        let [(b, e)] = span.intervals() else { return };
        if e - b != 1 {
            return;
        }
        let Some(token) = ctx.input.get(dim).and_then(|t| t.get(*b as usize)) else {
            return;
        };
        for (rule, w) in ctx.grammar.terminating_for(dim, token) {
            let Rule::Terminating { lhs, .. } = rule.as_ref() else {
                continue;
            };
            if item.labels[dim] != *lhs {
                continue;
            }
            out.push(Candidate {
                rule: RuleName::ReverseScan,
                consequent: Term::RevWord {
                    dim,
                    pos: *e,
                    token: token.clone(),
                },
                ants: vec![Ant::Id(trigger), Ant::Rule(rule.clone(), w)],
            });
        }
    }
}

impl Logic for CrLogic {
    fn name(&self) -> &'static str {
        "cr"
    }

    fn axioms(
        &self,
        grammar: &dyn GrammarEvaluator,
        input: &[Vec<Sym>],
        weights: Option<&[Vec<f64>]>,
    ) -> Result<Vec<(Term, f64)>> {
        check_dims(self.name(), grammar.dims(), input.len(), false)?;
        let mut axioms = word_axioms(input, weights);
        let spans = pivot_spans(input);
        for labels in pivot_links(grammar, input) {
            axioms.push((Term::RevItem(Item::new(labels, spans.clone())), 1.0));
        }
        Ok(axioms)
    }

    fn fire(&self, ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>) {
        CLogic::fire_forward(ctx, trigger, out);
        match ctx.index.term(trigger).as_ref() {
            Term::Item(item) => Self::fire_item(ctx, trigger, item, out),
            Term::RevItem(item) => Self::fire_rev_item(ctx, trigger, item, out),
            _ => {}
        }
    }
}
