//! Multiparsing over discontinuous spans, and its translating variant whose
//! output dimensions carry no spans.

use std::sync::Arc;

use crate::dspan::{concat_all, relativize_all, DSpan};
use crate::error::Result;
use crate::grammar::{GrammarEvaluator, Label, Partners, Role, Rule, Sym};
use crate::logic::{
    check_dims, single_labels, single_spans, word_axioms, Ant, Candidate, FireCtx, Item, Logic,
    RuleName, Term, TermId,
};

/// Items that may pair with `item` when it fills `role`.
pub(crate) fn partner_ids(ctx: &FireCtx, labels: &[Label], role: Role) -> Vec<TermId> {
    match ctx.grammar.partners(labels, role) {
        Partners::Any => ctx.index.all_items().to_vec(),
        Partners::Keys(keys) => keys
            .iter()
            .flat_map(|k| ctx.index.items_with_key(k).iter().copied())
            .collect(),
    }
}

fn scan(
    ctx: &FireCtx,
    trigger: TermId,
    dim: usize,
    pos: u32,
    token: &Sym,
    out_dims: usize,
    out: &mut Vec<Candidate>,
) {
    let dims = ctx.grammar.dims();
    let inputs = ctx.input.len();
    for (rule, w) in ctx.grammar.terminating_for(dim, token) {
        let Rule::Terminating { lhs, .. } = rule.as_ref() else {
            continue;
        };
        let item = Item {
            labels: single_labels(dims, dim, lhs.clone()),
            spans: single_spans(inputs, dim, DSpan::word(pos)),
            out_fanout: vec![0; out_dims],
        };
        out.push(Candidate {
            rule: RuleName::Scan,
            consequent: Term::Item(item),
            ants: vec![Ant::Id(trigger), Ant::Rule(Arc::clone(&rule), w)],
        });
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CLogic;

impl CLogic {
    pub(crate) fn compose(ctx: &FireCtx, y: TermId, z: TermId, out: &mut Vec<Candidate>) {
        let (yi, zi) = (ctx.item(y), ctx.item(z));
        let Ok(arrays) = relativize_all(&yi.spans, &zi.spans) else {
            return;
        };
        let rules = ctx.grammar.nonterminating(&yi.labels, &zi.labels, &arrays);
        if rules.is_empty() {
            return;
        }
        let spans = concat_all(&yi.spans, &zi.spans).expect("relativizable spans concatenate");
        for (rule, w) in rules {
            let Rule::Nonterminating { lhs, .. } = rule.as_ref() else {
                continue;
            };
            out.push(Candidate {
                rule: RuleName::Compose,
                consequent: Term::Item(Item::new(lhs.clone(), spans.clone())),
                ants: vec![Ant::Id(y), Ant::Id(z), Ant::Rule(rule.clone(), w)],
            });
        }
    }

    pub(crate) fn fire_forward(ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>) {
        match ctx.index.term(trigger).as_ref() {
            Term::Word { dim, pos, token } => scan(ctx, trigger, *dim, *pos, token, 0, out),
            Term::Item(item) => {
                for other in partner_ids(ctx, &item.labels, Role::First) {
                    Self::compose(ctx, trigger, other, out);
                }
                for other in partner_ids(ctx, &item.labels, Role::Second) {
                    Self::compose(ctx, other, trigger, out);
                }
            }
            _ => {}
        }
    }
}

impl Logic for CLogic {
    fn name(&self) -> &'static str {
        "c"
    }

    fn fire(&self, ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>) {
        Self::fire_forward(ctx, trigger, out);
    }
}

/// Translation: the first `I` grammar dimensions are input, the rest are
/// output. With `macro_mode`, Load and Compose are fused so that target
/// words are only loaded next to an input item they combine with.
#[derive(Debug, Clone, Copy, Default)]
pub struct CtLogic {
    pub macro_mode: bool,
}

/// One side of a composition: a chart item or a target word being loaded.
#[derive(Clone)]
enum Side<'a> {
    Chart(TermId, &'a Item),
    Loaded(Arc<Rule>, f64, Item),
}

impl Side<'_> {
    fn item(&self) -> &Item {
        match self {
            Side::Chart(_, it) => it,
            Side::Loaded(_, _, it) => it,
        }
    }

    fn ant(&self) -> Ant {
        match self {
            Side::Chart(id, _) => Ant::Id(*id),
            Side::Loaded(r, w, _) => Ant::Rule(r.clone(), *w),
        }
    }
}

fn load_item(dims: usize, inputs: usize, dim: usize, lhs: &Label) -> Item {
    let mut out_fanout = vec![0; dims - inputs];
    out_fanout[dim - inputs] = 1;
    Item {
        labels: single_labels(dims, dim, lhs.clone()),
        spans: vec![DSpan::empty(); inputs],
        out_fanout,
    }
}

impl CtLogic {
    fn compose(ctx: &FireCtx, y: &Side, z: &Side, out: &mut Vec<Candidate>) {
        let (yi, zi) = (y.item(), z.item());
        let inputs = ctx.input.len();
        let Ok(arrays) = relativize_all(&yi.spans, &zi.spans) else {
            return;
        };
        let rules = ctx.grammar.nonterminating(&yi.labels, &zi.labels, &arrays);
        if rules.is_empty() {
            return;
        }
        let spans = concat_all(&yi.spans, &zi.spans).expect("relativizable spans concatenate");
        let macro_step = matches!(y, Side::Loaded(..)) || matches!(z, Side::Loaded(..));
        for (rule, w) in rules {
            let Rule::Nonterminating { lhs, pav, .. } = rule.as_ref() else {
                continue;
            };
            let outputs = &pav.arrays()[inputs..];
            let fits = outputs.iter().enumerate().all(|(k, a)| {
                a.count_of(1) == yi.out_fanout[k] as usize
                    && a.count_of(2) == zi.out_fanout[k] as usize
            });
            if !fits {
                continue;
            }
            let item = Item {
                labels: lhs.clone(),
                spans: spans.clone(),
                out_fanout: outputs.iter().map(|a| a.fan_out() as u8).collect(),
            };
            out.push(Candidate {
                rule: if macro_step {
                    RuleName::LoadCompose
                } else {
                    RuleName::Compose
                },
                consequent: Term::Item(item),
                ants: vec![y.ant(), z.ant(), Ant::Rule(rule.clone(), w)],
            });
        }
    }

    /// Target words that could fill the other role next to `labels`.
    fn loadable(ctx: &FireCtx, labels: &[Label], role: Role) -> Vec<Side<'static>> {
        let dims = ctx.grammar.dims();
        let inputs = ctx.input.len();
        let Partners::Keys(keys) = ctx.grammar.partners(labels, role) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for key in keys {
            let mut active = key.iter().enumerate().filter(|(_, l)| l.is_active());
            let (Some((dim, lhs)), None) = (active.next(), active.next()) else {
                continue;
            };
            if dim < inputs {
                continue;
            }
            for (rule, w) in ctx.grammar.terminating_with_lhs(dim, lhs) {
                out.push(Side::Loaded(rule, w, load_item(dims, inputs, dim, lhs)));
            }
        }
        out
    }
}

impl Logic for CtLogic {
    fn name(&self) -> &'static str {
        if self.macro_mode {
            "ct-macro"
        } else {
            "ct"
        }
    }

    fn axioms(
        &self,
        grammar: &dyn GrammarEvaluator,
        input: &[Vec<Sym>],
        weights: Option<&[Vec<f64>]>,
    ) -> Result<Vec<(Term, f64)>> {
        check_dims(self.name(), grammar.dims(), input.len(), true)?;
        Ok(word_axioms(input, weights))
    }

    fn fire(&self, ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>) {
        let dims = ctx.grammar.dims();
        let inputs = ctx.input.len();
        match ctx.index.term(trigger).as_ref() {
            Term::Word { dim, pos, token } => {
                scan(ctx, trigger, *dim, *pos, token, dims - inputs, out)
            }
            Term::Rule(rule) if !self.macro_mode => {
                if let Rule::Terminating { dim, lhs, .. } = rule.as_ref() {
                    if *dim >= inputs {
                        out.push(Candidate {
                            rule: RuleName::Load,
                            consequent: Term::Item(load_item(dims, inputs, *dim, lhs)),
                            ants: vec![Ant::Id(trigger)],
                        });
                    }
                }
            }
            Term::Item(item) => {
                let me = Side::Chart(trigger, item);
                for other in partner_ids(ctx, &item.labels, Role::First) {
                    Self::compose(ctx, &me, &Side::Chart(other, ctx.item(other)), out);
                }
                for other in partner_ids(ctx, &item.labels, Role::Second) {
                    Self::compose(ctx, &Side::Chart(other, ctx.item(other)), &me, out);
                }
                if self.macro_mode {
                    for z in Self::loadable(ctx, &item.labels, Role::First) {
                        Self::compose(ctx, &me, &z, out);
                    }
                    for y in Self::loadable(ctx, &item.labels, Role::Second) {
                        Self::compose(ctx, &y, &me, out);
                    }
                }
            }
            _ => {}
        }
    }
}
