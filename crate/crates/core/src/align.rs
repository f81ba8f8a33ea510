//! Hierarchical alignment under the composite evaluator, and word
//! alignment by cover extraction over Logic WA items.

use std::fmt;

use rayon::prelude::*;

use crate::engine::{parse, Beam, Goal, Limits, ParseConfig, RunStats, Strategy};
use crate::error::Result;
use crate::grammar::lexicon::{LexiconGrammar, WordLexicon};
use crate::grammar::{AlignmentEvaluator, Gmtg, GrammarEvaluator, Sym};
use crate::logic::{CLogic, Term, WaLogic};
use crate::semiring::{Viterbi, ViterbiDerivation};
use crate::translate::{goal_predicate, Multitree};

#[derive(Debug, Clone, Default)]
pub struct AlignConfig {
    pub strategy: Strategy,
    pub limits: Limits,
    pub beam: Beam,
    /// Fan-out bound of unstructured dimensions; at least the structured
    /// grammar's fan-out and 1 when unset.
    pub fan_out: Option<usize>,
}

impl AlignConfig {
    fn fan_out(&self, structured: &Gmtg) -> usize {
        self.fan_out.unwrap_or_else(|| structured.fan_out().max(1))
    }
}

#[derive(Debug, Clone)]
pub struct Alignment {
    pub tree: Option<Multitree>,
    pub prob: f64,
    pub stats: RunStats,
}

/// The evaluator aligning `structured` with one lexicon per extra
/// dimension.
pub fn evaluator(
    structured: &Gmtg,
    lexicons: &[WordLexicon],
    cfg: &AlignConfig,
) -> AlignmentEvaluator {
    AlignmentEvaluator::new(
        structured.clone(),
        lexicons.to_vec(),
        cfg.fan_out(structured),
    )
}

/// Most probable multitree over all dimensions of `input`. The leading
/// dimensions follow `structured`; the rest are linked word by word.
pub fn hier_align(
    eval: &AlignmentEvaluator,
    input: &[Vec<Sym>],
    cfg: &AlignConfig,
) -> Result<Alignment> {
    let pc = ParseConfig {
        strategy: cfg.strategy,
        goal: Goal::Predicate(goal_predicate(eval.start(), input)),
        limits: cfg.limits,
        beam: cfg.beam,
        ..Default::default()
    };
    let chart = parse(&CLogic, eval, &ViterbiDerivation, input, &pc)?;
    let best = chart.goal_value();
    let tree = match best.derivs.first() {
        Some(d) if best.prob > 0.0 => Some(Multitree::from_derivation(d)?),
        _ => None,
    };
    Ok(Alignment {
        tree,
        prob: best.prob,
        stats: chart.stats,
    })
}

#[derive(Debug, Clone, Default)]
pub struct AlignedCorpus {
    pub trees: Vec<Multitree>,
    /// Index and reason for every tuple without a multitree.
    pub skipped: Vec<(usize, String)>,
}

pub fn align_corpus(
    structured: &Gmtg,
    lexicons: &[WordLexicon],
    corpus: &[Vec<Vec<Sym>>],
    cfg: &AlignConfig,
) -> Result<AlignedCorpus> {
    let eval = evaluator(structured, lexicons, cfg);
    let results: Vec<Result<Alignment>> = corpus
        .par_iter()
        .map(|t| hier_align(&eval, t, cfg))
        .collect();
    let mut out = AlignedCorpus::default();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(Alignment { tree: Some(t), .. }) => out.trees.push(t),
            Ok(a) => out
                .skipped
                .push((k, format!("no multitree ({})", a.stats.termination))),
            Err(e) => out.skipped.push((k, e.to_string())),
        }
    }
    Ok(out)
}

/// Value given to a word left unlinked when the lexicon has no NULL entry.
pub const NULL_FLOOR: f64 = 1e-12;

/// Largest dimension length for which the cover is found exactly.
pub const EXACT_LIMIT: usize = 8;

/// A link between 1-based positions; `None` stands for NULL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link(pub Option<u32>, pub Option<u32>);

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Link(Some(i), Some(j)) => write!(f, "1:{i} 2:{j}"),
            Link(Some(i), None) => write!(f, "1:{i} -"),
            Link(None, Some(j)) => write!(f, "2:{j} -"),
            Link(None, None) => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordAlignment {
    /// Sorted links covering every position of both sentences once.
    pub links: Vec<Link>,
    /// Product of the link values.
    pub score: f64,
    pub exact: bool,
}

impl fmt::Display for WordAlignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let links: Vec<String> = self.links.iter().map(|l| l.to_string()).collect();
        f.write_str(&links.join("; "))
    }
}

impl WordAlignment {
    /// Whether every position of sentences of lengths `n1`, `n2` is covered
    /// exactly once.
    pub fn is_cover(&self, n1: usize, n2: usize) -> bool {
        let mut seen1 = vec![0; n1];
        let mut seen2 = vec![0; n2];
        for l in &self.links {
            if let Some(i) = l.0 {
                match seen1.get_mut(i as usize - 1) {
                    Some(c) => *c += 1,
                    None => return false,
                }
            }
            if let Some(j) = l.1 {
                match seen2.get_mut(j as usize - 1) {
                    Some(c) => *c += 1,
                    None => return false,
                }
            }
            if l.0.is_none() && l.1.is_none() {
                return false;
            }
        }
        seen1.iter().chain(&seen2).all(|&c| c == 1)
    }
}

/// Link values of a sentence pair: `pair[i][j]`, `null1[i]`, `null2[j]`.
#[derive(Debug, Clone)]
pub struct LinkScores {
    pub pair: Vec<Vec<f64>>,
    pub null1: Vec<f64>,
    pub null2: Vec<f64>,
}

/// Scores every word-pair and word-NULL item that Logic WA derives for
/// the pair under the lexicon grammar.
pub fn link_scores(lexicon: &WordLexicon, src: &[Sym], tgt: &[Sym]) -> Result<LinkScores> {
    let grammar = LexiconGrammar::new(lexicon);
    let input = [src.to_vec(), tgt.to_vec()];
    let chart = parse(
        &WaLogic,
        &grammar,
        &Viterbi::default(),
        &input,
        &ParseConfig::default(),
    )?;
    let mut s = LinkScores {
        pair: vec![vec![0.0; tgt.len()]; src.len()],
        null1: vec![NULL_FLOOR; src.len()],
        null2: vec![NULL_FLOOR; tgt.len()],
    };
    for (id, term) in chart.stored() {
        let Term::Item(item) = term.as_ref() else {
            continue;
        };
        let v = *chart.value_of(id);
        let pos = |d: usize| item.spans[d].last().map(|e| e as usize - 1);
        match (pos(0), pos(1)) {
            (Some(i), Some(j)) => s.pair[i][j] = s.pair[i][j].max(v),
            (Some(i), None) => s.null1[i] = s.null1[i].max(v),
            (None, Some(j)) => s.null2[j] = s.null2[j].max(v),
            (None, None) => {}
        }
    }
    Ok(s)
}

fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Best cover by dynamic programming over subsets of target positions.
pub fn exact_cover(s: &LinkScores) -> (Vec<Link>, f64) {
    let (n, m) = (s.null1.len(), s.null2.len());
    let full = 1usize << m;
    // best[i][mask]: best log score of source prefix i using target set mask
    let mut best = vec![vec![f64::NEG_INFINITY; full]; n + 1];
    let mut back = vec![vec![usize::MAX; full]; n + 1];
    best[0][0] = 0.0;
    for i in 0..n {
        for mask in 0..full {
            let b = best[i][mask];
            if b == f64::NEG_INFINITY {
                continue;
            }
            let null = b + ln(s.null1[i]);
            if null > best[i + 1][mask] {
                best[i + 1][mask] = null;
                back[i + 1][mask] = m;
            }
            for j in 0..m {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let v = b + ln(s.pair[i][j]);
                let next = mask | (1 << j);
                if v > best[i + 1][next] {
                    best[i + 1][next] = v;
                    back[i + 1][next] = j;
                }
            }
        }
    }
    let mut top = (f64::NEG_INFINITY, 0);
    for mask in 0..full {
        if best[n][mask] == f64::NEG_INFINITY {
            continue;
        }
        let rest: f64 = (0..m)
            .filter(|j| mask & (1 << j) == 0)
            .map(|j| ln(s.null2[j]))
            .sum();
        if best[n][mask] + rest > top.0 {
            top = (best[n][mask] + rest, mask);
        }
    }
    let (score, mut mask) = top;
    let mut links = Vec::new();
    for j in 0..m {
        if mask & (1 << j) == 0 {
            links.push(Link(None, Some(j as u32 + 1)));
        }
    }
    for i in (1..=n).rev() {
        let j = back[i][mask];
        if j == m {
            links.push(Link(Some(i as u32), None));
        } else {
            links.push(Link(Some(i as u32), Some(j as u32 + 1)));
            mask &= !(1 << j);
        }
    }
    links.sort();
    (links, score.exp())
}

/// Competitive linking: repeatedly take the most valuable link between
/// unused positions while it beats leaving both words NULL.
pub fn greedy_cover(s: &LinkScores) -> (Vec<Link>, f64) {
    let (n, m) = (s.null1.len(), s.null2.len());
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if s.pair[i][j] > 0.0 {
                cands.push((s.pair[i][j], i, j));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let (mut used1, mut used2) = (vec![false; n], vec![false; m]);
    let mut links = Vec::new();
    let mut score = 0.0;
    for (p, i, j) in cands {
        if used1[i] || used2[j] || ln(p) <= ln(s.null1[i]) + ln(s.null2[j]) {
            continue;
        }
        used1[i] = true;
        used2[j] = true;
        score += ln(p);
        links.push(Link(Some(i as u32 + 1), Some(j as u32 + 1)));
    }
    for i in (0..n).filter(|&i| !used1[i]) {
        score += ln(s.null1[i]);
        links.push(Link(Some(i as u32 + 1), None));
    }
    for j in (0..m).filter(|&j| !used2[j]) {
        score += ln(s.null2[j]);
        links.push(Link(None, Some(j as u32 + 1)));
    }
    links.sort();
    (links, score.exp())
}

/// Word alignment of a sentence pair, dimension 1 being the lexicon's
/// source side.
pub fn word_align(lexicon: &WordLexicon, src: &[Sym], tgt: &[Sym]) -> Result<WordAlignment> {
    let scores = link_scores(lexicon, src, tgt)?;
    let exact = src.len() <= EXACT_LIMIT && tgt.len() <= EXACT_LIMIT;
    let (links, score) = if exact {
        exact_cover(&scores)
    } else {
        greedy_cover(&scores)
    };
    let wa = WordAlignment {
        links,
        score,
        exact,
    };
    assert!(
        wa.is_cover(src.len(), tgt.len()),
        "extracted links must cover the input once"
    );
    Ok(wa)
}
