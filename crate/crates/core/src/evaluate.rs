//! Scoring hypotheses by multiparsing them against references under a
//! monolingual paraphrase grammar.

use rayon::prelude::*;

use crate::engine::{parse, Goal, Limits, ParseConfig, Strategy};
use crate::error::{Error, Result};
use crate::grammar::{Gmtg, GrammarEvaluator, Sym};
use crate::logic::CLogic;
use crate::semiring::Inside;
use crate::translate::goal_predicate;

const FLOOR: f64 = 1e-300;

/// Total probability of all multitrees covering (reference, hypothesis);
/// 0 when none exists.
pub fn score_pair(
    grammar: &Gmtg,
    reference: &[Sym],
    hypothesis: &[Sym],
    limits: Limits,
) -> Result<f64> {
    if grammar.dims() != 2 {
        return Err(Error::Config(format!(
            "paraphrase grammar must have 2 dimensions, not {}",
            grammar.dims()
        )));
    }
    if reference.is_empty() || hypothesis.is_empty() {
        return Ok(0.0);
    }
    let input = [reference.to_vec(), hypothesis.to_vec()];
    let cfg = ParseConfig {
        strategy: Strategy::BottomUp,
        goal: Goal::Predicate(goal_predicate(grammar.start(), &input)),
        limits,
        ..Default::default()
    };
    Ok(parse(&CLogic, grammar, &Inside::default(), &input, &cfg)?.goal_value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScore {
    pub scores: Vec<f64>,
    /// Geometric mean of the non-zero scores; 0 if there are none.
    pub summary: f64,
    pub unparseable: usize,
}

impl CorpusScore {
    /// Tab-separated `pair score status` lines with a summary line.
    pub fn report(&self) -> String {
        let mut out = String::from("pair\tscore\tstatus\n");
        for (k, s) in self.scores.iter().enumerate() {
            let status = if *s > 0.0 { "parsed" } else { "unparsed" };
            out.push_str(&format!("{}\t{s:e}\t{status}\n", k + 1));
        }
        out.push_str(&format!(
            "summary\t{:e}\tunparsed={}\n",
            self.summary, self.unparseable
        ));
        out
    }
}

pub fn geometric_mean(scores: &[f64]) -> f64 {
    let nonzero: Vec<f64> = scores.iter().copied().filter(|&s| s > 0.0).collect();
    if nonzero.is_empty() {
        return 0.0;
    }
    (nonzero.iter().map(|s| s.max(FLOOR).ln()).sum::<f64>() / nonzero.len() as f64).exp()
}

pub fn score_corpus(
    grammar: &Gmtg,
    pairs: &[(Vec<Sym>, Vec<Sym>)],
    limits: Limits,
) -> Result<CorpusScore> {
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|(r, h)| score_pair(grammar, r, h, limits))
        .collect::<Result<_>>()?;
    Ok(CorpusScore {
        summary: geometric_mean(&scores),
        unparseable: scores.iter().filter(|&&s| s <= 0.0).count(),
        scores,
    })
}
