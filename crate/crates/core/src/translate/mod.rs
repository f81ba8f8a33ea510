//! Translation with Logic CT and linearization of the best multitree.

pub mod tree;

use std::sync::Arc;

use crate::dspan::DSpan;
use crate::engine::{parse, Beam, Goal, Limits, ParseConfig, RunStats, Strategy};
use crate::error::{Error, Result};
use crate::grammar::{matches_start, GrammarEvaluator, Label, Sym};
use crate::logic::{CtLogic, Logic, Term};
use crate::semiring::{Boolean, Scored, Semiring, ViterbiDerivation, ViterbiNBest};

pub use tree::{parse_treebank, treebank_to_text, Multitree};

#[derive(Debug, Clone)]
pub struct TranslateConfig {
    pub strategy: Strategy,
    pub limits: Limits,
    pub beam: Beam,
    /// Derivations kept per term; ties in probability among them are broken
    /// by the least linearization. 1 keeps only the single best derivation.
    pub nbest: usize,
    pub macro_mode: bool,
    pub trace: bool,
}

impl Default for TranslateConfig {
    fn default() -> Self {
        TranslateConfig {
            strategy: Strategy::UniformCost,
            limits: Limits::default(),
            beam: Beam::default(),
            nbest: 8,
            macro_mode: false,
            trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Translation {
    pub tree: Option<Multitree>,
    /// Token sequences of the output dimensions.
    pub outputs: Vec<Vec<Sym>>,
    pub prob: f64,
    pub stats: RunStats,
}

impl Translation {
    pub fn is_translated(&self) -> bool {
        self.tree.is_some()
    }
}

/// Goal items: start labels (heads ignored), full input spans, and one
/// contiguous segment in every active output dimension.
pub fn goal_predicate(
    start: &[Label],
    input: &[Vec<Sym>],
) -> Arc<dyn Fn(&Term) -> bool + Send + Sync> {
    let start: Vec<Label> = start.iter().map(Label::without_head).collect();
    let spans: Vec<DSpan> = input
        .iter()
        .map(|t| {
            if t.is_empty() {
                DSpan::empty()
            } else {
                DSpan::interval(0, t.len() as u32)
            }
        })
        .collect();
    Arc::new(move |t: &Term| {
        let Term::Item(it) = t else { return false };
        matches_start(&start, &it.labels)
            && it.spans == spans
            && it
                .out_fanout
                .iter()
                .zip(&it.labels[spans.len()..])
                .all(|(&k, l)| k == u8::from(l.is_active()))
    })
}

fn config_for(
    cfg: &TranslateConfig,
    grammar: &dyn GrammarEvaluator,
    input: &[Vec<Sym>],
) -> ParseConfig {
    ParseConfig {
        strategy: cfg.strategy,
        goal: Goal::Predicate(goal_predicate(grammar.start(), input)),
        limits: cfg.limits,
        beam: cfg.beam,
        trace: cfg.trace,
        ..Default::default()
    }
}

/// Linearization of every output dimension of a derivation.
fn realize(s: &Scored, dims: usize, inputs: usize) -> Result<(Multitree, Vec<Vec<Sym>>)> {
    let deriv = s
        .derivs
        .first()
        .ok_or_else(|| Error::Tree("goal value without a derivation".into()))?;
    let tree = Multitree::from_derivation(deriv)?;
    let outputs = (inputs..dims)
        .map(|d| tree.linearize(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((tree, outputs))
}

/// Most probable multitree covering the input and its output yields. The
/// input gives the leading dimensions of the grammar.
pub fn translate(
    grammar: &dyn GrammarEvaluator,
    input: &[Vec<Sym>],
    cfg: &TranslateConfig,
) -> Result<Translation> {
    let logic = CtLogic {
        macro_mode: cfg.macro_mode,
    };
    let pc = config_for(cfg, grammar, input);
    let (dims, inputs) = (grammar.dims(), input.len());
    let candidates: Vec<Scored>;
    let stats;
    if cfg.nbest <= 1 {
        let chart = parse(&logic, grammar, &ViterbiDerivation, input, &pc)?;
        let v = chart.goal_value();
        candidates = if ViterbiDerivation.is_zero(&v) {
            Vec::new()
        } else {
            vec![v]
        };
        stats = chart.stats;
    } else {
        let sr = ViterbiNBest::new(cfg.nbest);
        let chart = parse(&logic, grammar, &sr, input, &pc)?;
        candidates = chart.goal_value();
        stats = chart.stats;
    }
    let Some(best) = candidates.first().map(|s| s.prob) else {
        return Ok(Translation {
            tree: None,
            outputs: Vec::new(),
            prob: 0.0,
            stats,
        });
    };
    let mut options = Vec::new();
    for s in candidates
        .iter()
        .filter(|s| (s.prob - best).abs() <= 1e-12 * best)
    {
        let (tree, outputs) = realize(s, dims, inputs)?;
        options.push((outputs, tree));
    }
    options.sort();
    let (outputs, tree) = options.swap_remove(0);
    Ok(Translation {
        tree: Some(tree),
        outputs,
        prob: best,
        stats,
    })
}

/// Whether any multitree covers the input.
pub fn translatable(grammar: &dyn GrammarEvaluator, input: &[Vec<Sym>]) -> Result<bool> {
    let logic = CtLogic::default();
    let pc = config_for(
        &TranslateConfig {
            strategy: Strategy::BottomUp,
            ..Default::default()
        },
        grammar,
        input,
    );
    Ok(parse(&logic, grammar, &Boolean, input, &pc)?.goal_value())
}

/// Logic used for translation, for callers that drive the engine directly.
pub fn logic(macro_mode: bool) -> Box<dyn Logic> {
    Box::new(CtLogic { macro_mode })
}
