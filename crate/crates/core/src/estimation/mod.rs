//! Re-estimation of production weights by inside-outside over Logic CR,
//! with an n-best approximation, and lexicon EM for bootstrapping.

pub mod lexicon_em;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::engine::{parse, Goal, Limits, ParseConfig, Strategy};
use crate::error::{Error, Result};
use crate::grammar::{Gmtg, GrammarEvaluator, Rule, Sym};
use crate::logic::cr::{pivot_links, pivot_spans};
use crate::logic::{CLogic, CrLogic, Item, Term};
use crate::semiring::{DerivNode, Inside, ViterbiNBest};
use crate::translate::goal_predicate;

pub use lexicon_em::lexicon_em;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Exact expected counts from forward and reverse values.
    #[default]
    Inside,
    /// Counts from the `n` most probable derivations of each tuple.
    NBest(usize),
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inside" {
            return Ok(Mode::Inside);
        }
        s.strip_prefix("nbest:")
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1)
            .map(Mode::NBest)
            .ok_or_else(|| Error::Config(format!("unknown training mode `{s}`")))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Inside => f.write_str("inside"),
            Mode::NBest(n) => write!(f, "nbest:{n}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub iterations: usize,
    pub mode: Mode,
    /// Added to every production's expected count before normalizing.
    pub smoothing: f64,
    /// Stop once the relative log-likelihood gain falls below this.
    pub tolerance: f64,
    pub limits: Limits,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 10,
            mode: Mode::Inside,
            smoothing: 1e-6,
            tolerance: 1e-6,
            limits: Limits::default(),
        }
    }
}

/// Expected production counts of one tuple.
#[derive(Debug, Clone, Default)]
pub struct TupleCounts {
    pub counts: HashMap<Arc<Rule>, f64>,
    /// Total probability of the tuple; 0 if it has no derivation.
    pub prob: f64,
}

/// Expected counts of every production in every derivation of `tuple`,
/// divided by the tuple's total probability.
pub fn expected_counts(
    grammar: &Gmtg,
    tuple: &[Vec<Sym>],
    mode: Mode,
    limits: Limits,
) -> Result<TupleCounts> {
    match mode {
        Mode::Inside => inside_counts(grammar, tuple, limits),
        Mode::NBest(n) => nbest_counts(grammar, tuple, n, limits),
    }
}

fn inside_counts(grammar: &Gmtg, tuple: &[Vec<Sym>], limits: Limits) -> Result<TupleCounts> {
    let spans = pivot_spans(tuple);
    let goals: Vec<Term> = pivot_links(grammar, tuple)
        .into_iter()
        .map(|l| Term::Item(Item::new(l, spans.clone())))
        .collect();
    let cfg = ParseConfig {
        strategy: Strategy::BottomUp,
        goal: Goal::Terms(goals),
        limits,
        ..Default::default()
    };
    let chart = parse(&CrLogic, grammar, &Inside::default(), tuple, &cfg)?;
    let z = chart.goal_value();
    let mut out = TupleCounts {
        prob: z,
        ..Default::default()
    };
    if z <= 0.0 {
        return Ok(out);
    }
    for (id, term) in chart.terms() {
        let Term::Item(item) = term.as_ref() else {
            continue;
        };
        let outside = chart.value(&Term::RevItem(item.clone()));
        if outside == 0.0 {
            continue;
        }
        for (_, ants) in chart.antecedent_sets(id) {
            let prod: f64 = ants.iter().map(|&a| *chart.value_of(a)).product();
            if prod == 0.0 {
                continue;
            }
            for &a in ants {
                if let Term::Rule(rule) = chart.term(a).as_ref() {
                    *out.counts.entry(rule.clone()).or_insert(0.0) += outside * prod / z;
                }
            }
        }
    }
    Ok(out)
}

fn count_rules(d: &DerivNode, weight: f64, counts: &mut HashMap<Arc<Rule>, f64>) {
    if let Term::Rule(rule) = d.term.as_ref() {
        *counts.entry(rule.clone()).or_insert(0.0) += weight;
    }
    for c in &d.children {
        count_rules(c, weight, counts);
    }
}

fn nbest_counts(
    grammar: &Gmtg,
    tuple: &[Vec<Sym>],
    n: usize,
    limits: Limits,
) -> Result<TupleCounts> {
    let cfg = ParseConfig {
        strategy: Strategy::BottomUp,
        goal: Goal::Predicate(goal_predicate(grammar.start(), tuple)),
        limits,
        ..Default::default()
    };
    let chart = parse(&CLogic, grammar, &ViterbiNBest::new(n), tuple, &cfg)?;
    let best = chart.goal_value();
    let z: f64 = best.iter().map(|s| s.prob).sum();
    let mut out = TupleCounts {
        prob: z,
        ..Default::default()
    };
    if z <= 0.0 {
        return Ok(out);
    }
    for s in &best {
        for d in &s.derivs {
            count_rules(d, s.prob / z, &mut out.counts);
        }
    }
    Ok(out)
}

/// Result of one E-step and M-step.
#[derive(Debug, Clone)]
pub struct Step {
    pub grammar: Gmtg,
    /// Log-likelihood of the corpus under the grammar before the step.
    pub log_likelihood: f64,
    /// Indexes of tuples with zero probability, excluded from the counts.
    pub skipped: Vec<usize>,
}

/// One re-estimation step. Counts are pooled across tuples and normalized
/// per LHS link.
pub fn inside_outside_step(
    grammar: &Gmtg,
    corpus: &[Vec<Vec<Sym>>],
    cfg: &TrainConfig,
) -> Result<Step> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let per_tuple: Vec<TupleCounts> = corpus
        .par_iter()
        .map(|t| expected_counts(grammar, t, cfg.mode, cfg.limits))
        .collect::<Result<_>>()?;
    let mut totals: HashMap<Arc<Rule>, f64> = HashMap::new();
    let mut ll = 0.0;
    let mut skipped = Vec::new();
    for (k, tc) in per_tuple.iter().enumerate() {
        if tc.prob <= 0.0 {
            skipped.push(k);
            continue;
        }
        ll += tc.prob.ln();
        let mut entries: Vec<_> = tc.counts.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (r, c) in entries {
            *totals.entry(r.clone()).or_insert(0.0) += c;
        }
    }
    if skipped.len() == corpus.len() {
        return Err(Error::Diverged(
            "no tuple of the corpus has a derivation".into(),
        ));
    }
    let updated = grammar
        .reweighted(|r| totals.get(r).copied().unwrap_or(0.0) + cfg.smoothing)
        .normalized();
    if !ll.is_finite() || updated.rules().iter().any(|(_, w)| !w.is_finite()) {
        return Err(Error::Diverged(format!("log-likelihood {ll}")));
    }
    Ok(Step {
        grammar: updated,
        log_likelihood: ll,
        skipped,
    })
}

#[derive(Debug, Clone)]
pub struct EstimationRun {
    /// G^0, G^1, ...; one more than the number of completed steps.
    pub grammars: Vec<Gmtg>,
    /// Log-likelihood of the corpus under each grammar in `grammars`.
    pub log_likelihoods: Vec<f64>,
    pub skipped: Vec<usize>,
    pub converged: bool,
}

impl EstimationRun {
    pub fn grammar(&self) -> &Gmtg {
        self.grammars.last().expect("at least the initial grammar")
    }

    /// Tab-separated `iteration log-likelihood` table.
    pub fn likelihood_table(&self) -> String {
        let mut out = String::from("iteration\tlog_likelihood\n");
        for (q, ll) in self.log_likelihoods.iter().enumerate() {
            out.push_str(&format!("{q}\t{ll}\n"));
        }
        out
    }
}

/// Log-likelihood of a corpus: the sum of log inside probabilities of the
/// tuples that have a derivation.
pub fn log_likelihood(grammar: &Gmtg, corpus: &[Vec<Vec<Sym>>], limits: Limits) -> Result<f64> {
    let probs: Vec<f64> = corpus
        .par_iter()
        .map(|t| {
            let cfg = ParseConfig {
                strategy: Strategy::BottomUp,
                goal: Goal::Predicate(goal_predicate(grammar.start(), t)),
                limits,
                ..Default::default()
            };
            Ok(parse(&CLogic, grammar, &Inside::default(), t, &cfg)?.goal_value())
        })
        .collect::<Result<_>>()?;
    Ok(probs.into_iter().filter(|&p| p > 0.0).map(f64::ln).sum())
}

/// Repeated re-estimation from `grammar` until the iteration cap or
/// convergence.
pub fn train(grammar: &Gmtg, corpus: &[Vec<Vec<Sym>>], cfg: &TrainConfig) -> Result<EstimationRun> {
    if cfg.iterations == 0 {
        return Err(Error::Config(
            "training needs at least one iteration".into(),
        ));
    }
    let mut run = EstimationRun {
        grammars: vec![grammar.clone()],
        log_likelihoods: Vec::new(),
        skipped: Vec::new(),
        converged: false,
    };
    for _ in 0..cfg.iterations {
        let step = inside_outside_step(run.grammar(), corpus, cfg)?;
        if let Some(&prev) = run.log_likelihoods.last() {
            let gain = step.log_likelihood - prev;
            if gain.abs() <= cfg.tolerance * prev.abs().max(1e-300) {
                run.log_likelihoods.push(step.log_likelihood);
                run.grammars.push(step.grammar);
                run.skipped = step.skipped;
                run.converged = true;
                break;
            }
        }
        run.log_likelihoods.push(step.log_likelihood);
        run.grammars.push(step.grammar);
        run.skipped = step.skipped;
    }
    let last = match cfg.mode {
        Mode::Inside => log_likelihood(run.grammar(), corpus, cfg.limits)?,
        Mode::NBest(_) => expected_ll(run.grammar(), corpus, cfg)?,
    };
    run.log_likelihoods.push(last);
    Ok(run)
}

fn expected_ll(grammar: &Gmtg, corpus: &[Vec<Vec<Sym>>], cfg: &TrainConfig) -> Result<f64> {
    let mut ll = 0.0;
    for t in corpus {
        let p = expected_counts(grammar, t, cfg.mode, cfg.limits)?.prob;
        if p > 0.0 {
            ll += p.ln();
        }
    }
    Ok(ll)
}
