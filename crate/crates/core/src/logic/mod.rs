//! Terms, inference candidates, and the parsing logics.

pub mod c;
pub mod cr;
pub mod d1c;
pub mod wa;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dspan::{DSpan, Pos};
use crate::error::{Error, Result};
use crate::grammar::{show_labels, GrammarEvaluator, Label, Rule, Sym};

pub use c::{CLogic, CtLogic};
pub use cr::CrLogic;
pub use d1c::D1cLogic;
pub use wa::WaLogic;

pub type TermId = usize;

/// A nonterminal item: one label per dimension, one d-span per input
/// dimension, and the number of contiguous output segments per output
/// dimension (empty unless translating).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub labels: Vec<Label>,
    pub spans: Vec<DSpan>,
    pub out_fanout: Vec<u8>,
}

impl Item {
    pub fn new(labels: Vec<Label>, spans: Vec<DSpan>) -> Self {
        Item {
            labels,
            spans,
            out_fanout: Vec::new(),
        }
    }

    /// Total input width.
    pub fn width(&self) -> Pos {
        self.spans.iter().map(DSpan::width).sum()
    }

    /// The single active input dimension and its span, if exactly one.
    pub fn single_dim(&self) -> Option<(usize, &DSpan)> {
        let mut active = self.spans.iter().enumerate().filter(|(_, s)| !s.is_empty());
        let first = active.next()?;
        active.next().is_none().then_some(first)
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spans: Vec<String> = self.spans.iter().map(|s| s.to_string()).collect();
        write!(f, "[{};{}", show_labels(&self.labels), spans.join(","))?;
        if !self.out_fanout.is_empty() {
            let fo: Vec<String> = self.out_fanout.iter().map(|k| k.to_string()).collect();
            write!(f, ";{}", fo.join(","))?;
        }
        f.write_str("]")
    }
}

/// A chart key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Input word `token` at 1-based position `pos` of dimension `dim`.
    Word {
        dim: usize,
        pos: Pos,
        token: Sym,
    },
    Item(Item),
    RevWord {
        dim: usize,
        pos: Pos,
        token: Sym,
    },
    RevItem(Item),
    Rule(Arc<Rule>),
}

impl Term {
    pub fn item(&self) -> Option<&Item> {
        match self {
            Term::Item(it) | Term::RevItem(it) => Some(it),
            _ => None,
        }
    }

    pub fn is_reverse(&self) -> bool {
        matches!(self, Term::RevItem(_) | Term::RevWord { .. })
    }

    pub fn labels(&self) -> Vec<Label> {
        match self {
            Term::Item(it) | Term::RevItem(it) => it.labels.clone(),
            Term::Rule(r) => match r.as_ref() {
                Rule::Terminating { lhs, .. } => vec![lhs.clone()],
                Rule::Nonterminating { lhs, .. } => lhs.clone(),
                Rule::Lexical { .. } => Vec::new(),
            },
            _ => Vec::new(),
        }
    }

    /// Input width covered; 1 for words, 0 for grammar terms.
    pub fn width(&self) -> Pos {
        match self {
            Term::Word { .. } | Term::RevWord { .. } => 1,
            Term::Item(it) | Term::RevItem(it) => it.width(),
            Term::Rule(_) => 0,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Word { dim, pos, token } => write!(f, "<{},{pos},{token}>", dim + 1),
            Term::Item(it) => write!(f, "{it}"),
            Term::RevWord { dim, pos, token } => write!(f, "<{},{pos},{token}>^R", dim + 1),
            Term::RevItem(it) => write!(f, "{it}^R"),
            Term::Rule(r) => write!(f, "{{{r}}}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    Scan,
    Load,
    Compose,
    LoadCompose,
    ReverseComposeLeft,
    ReverseComposeRight,
    ReverseScan,
    Match,
}

impl RuleName {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Scan => "scan",
            RuleName::Load => "load",
            RuleName::Compose => "compose",
            RuleName::LoadCompose => "load-compose",
            RuleName::ReverseComposeLeft => "reverse-compose-left",
            RuleName::ReverseComposeRight => "reverse-compose-right",
            RuleName::ReverseScan => "reverse-scan",
            RuleName::Match => "match",
        }
    }
}

/// An antecedent: a chart term, or a grammar term supplied with its value.
#[derive(Debug, Clone)]
pub enum Ant {
    Id(TermId),
    Rule(Arc<Rule>, f64),
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub rule: RuleName,
    pub ants: Vec<Ant>,
    pub consequent: Term,
}

/// A fully instantiated inference, for inspection and comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inference {
    pub rule: RuleName,
    pub ants: Vec<Term>,
    pub consequent: Term,
}

impl fmt::Display for Inference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ants: Vec<String> = self.ants.iter().map(|t| t.to_string()).collect();
        write!(
            f,
            "{}: {} => {}",
            self.rule.as_str(),
            ants.join(" "),
            self.consequent
        )
    }
}

/// Terms that have fired, indexed for partner lookup.
#[derive(Debug, Default)]
pub struct TermIndex {
    ids: HashMap<Arc<Term>, TermId>,
    terms: HashMap<TermId, Arc<Term>>,
    items_by_key: HashMap<Vec<Label>, Vec<TermId>>,
    items: Vec<TermId>,
    rev_by_labels: HashMap<Vec<Label>, Vec<TermId>>,
    words_by_token: HashMap<(usize, Sym), Vec<TermId>>,
}

impl TermIndex {
    pub fn insert(&mut self, id: TermId, term: &Arc<Term>, grammar: &dyn GrammarEvaluator) {
        if self.ids.contains_key(term) {
            return;
        }
        self.ids.insert(term.clone(), id);
        self.terms.insert(id, term.clone());
        match term.as_ref() {
            Term::Item(it) => {
                self.items_by_key
                    .entry(grammar.index_key(&it.labels))
                    .or_default()
                    .push(id);
                self.items.push(id);
            }
            Term::RevItem(it) => self
                .rev_by_labels
                .entry(it.labels.clone())
                .or_default()
                .push(id),
            Term::Word { dim, token, .. } => self
                .words_by_token
                .entry((*dim, token.clone()))
                .or_default()
                .push(id),
            _ => {}
        }
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.ids.contains_key(term)
    }

    pub fn id_of(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Arc<Term> {
        &self.terms[&id]
    }

    pub fn items_with_key(&self, key: &[Label]) -> &[TermId] {
        self.items_by_key.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn all_items(&self) -> &[TermId] {
        &self.items
    }

    pub fn rev_items_with(&self, labels: &[Label]) -> &[TermId] {
        self.rev_by_labels.get(labels).map_or(&[], Vec::as_slice)
    }

    pub fn words_with(&self, dim: usize, token: &Sym) -> &[TermId] {
        self.words_by_token
            .get(&(dim, token.clone()))
            .map_or(&[], Vec::as_slice)
    }
}

/// What a logic sees when a term fires.
pub struct FireCtx<'a> {
    pub index: &'a TermIndex,
    pub grammar: &'a dyn GrammarEvaluator,
    pub input: &'a [Vec<Sym>],
}

impl FireCtx<'_> {
    pub fn item(&self, id: TermId) -> &Item {
        self.index.term(id).item().expect("indexed item")
    }
}

/// A parsing logic: axioms from grammar and input, and candidate
/// generation when a term fires. A logic sees only terms that have fired,
/// including the trigger itself.
pub trait Logic: Send + Sync {
    fn name(&self) -> &'static str;

    /// Axioms with their weights. Grammar terms are not included; the
    /// engine loads the evaluator's static rules itself.
    fn axioms(
        &self,
        grammar: &dyn GrammarEvaluator,
        input: &[Vec<Sym>],
        weights: Option<&[Vec<f64>]>,
    ) -> Result<Vec<(Term, f64)>> {
        check_dims(self.name(), grammar.dims(), input.len(), false)?;
        Ok(word_axioms(input, weights))
    }

    fn fire(&self, ctx: &FireCtx, trigger: TermId, out: &mut Vec<Candidate>);
}

pub(crate) fn check_dims(
    logic: &str,
    grammar_dims: usize,
    input_dims: usize,
    allow_fewer: bool,
) -> Result<()> {
    let ok = if allow_fewer {
        input_dims <= grammar_dims && input_dims >= 1
    } else {
        input_dims == grammar_dims
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("logic {logic} cannot parse a {input_dims}-dimensional input with a {grammar_dims}-dimensional grammar")))
    }
}

pub(crate) fn word_axioms(input: &[Vec<Sym>], weights: Option<&[Vec<f64>]>) -> Vec<(Term, f64)> {
    let mut out = Vec::new();
    for (dim, toks) in input.iter().enumerate() {
        for (k, token) in toks.iter().enumerate() {
            let w = weights
                .and_then(|w| w.get(dim))
                .and_then(|w| w.get(k))
                .copied()
                .unwrap_or(1.0);
            out.push((
                Term::Word {
                    dim,
                    pos: k as Pos + 1,
                    token: token.clone(),
                },
                w,
            ));
        }
    }
    out
}

/// Labels for a one-dimension item in a `dims`-dimensional grammar.
pub(crate) fn single_labels(dims: usize, dim: usize, label: Label) -> Vec<Label> {
    let mut v = vec![Label::inactive(); dims];
    v[dim] = label;
    v
}

pub(crate) fn single_spans(dims: usize, dim: usize, span: DSpan) -> Vec<DSpan> {
    let mut v = vec![DSpan::empty(); dims];
    v[dim] = span;
    v
}

/// Logic selection as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicKind {
    D1c,
    C,
    Ct,
    CtMacro,
    Cr,
    Wa,
}

impl LogicKind {
    pub fn build(self) -> Box<dyn Logic> {
        match self {
            LogicKind::D1c => Box::new(D1cLogic),
            LogicKind::C => Box::new(CLogic),
            LogicKind::Ct => Box::new(CtLogic { macro_mode: false }),
            LogicKind::CtMacro => Box::new(CtLogic { macro_mode: true }),
            LogicKind::Cr => Box::new(CrLogic),
            LogicKind::Wa => Box::new(WaLogic),
        }
    }
}

impl FromStr for LogicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "d1c" => LogicKind::D1c,
            "c" => LogicKind::C,
            "ct" => LogicKind::Ct,
            "ct-macro" => LogicKind::CtMacro,
            "cr" => LogicKind::Cr,
            "wa" => LogicKind::Wa,
            other => return Err(Error::Config(format!("unknown logic `{other}`"))),
        })
    }
}

/// Candidates a logic generates from exactly the given antecedent terms,
/// with every antecedent drawn from `ants` or the grammar.
pub fn consequents(
    logic: &dyn Logic,
    grammar: &dyn GrammarEvaluator,
    input: &[Vec<Sym>],
    ants: &[Term],
) -> Vec<Inference> {
    let mut index = TermIndex::default();
    let terms: Vec<Arc<Term>> = ants.iter().cloned().map(Arc::new).collect();
    for (id, t) in terms.iter().enumerate() {
        index.insert(id, t, grammar);
    }
    let mut out = Vec::new();
    let ctx = FireCtx {
        index: &index,
        grammar,
        input,
    };
    for id in 0..terms.len() {
        logic.fire(&ctx, id, &mut out);
    }
    let mut infs: Vec<Inference> = out
        .into_iter()
        .map(|c| Inference {
            rule: c.rule,
            ants: c
                .ants
                .iter()
                .map(|a| match a {
                    Ant::Id(id) => (*terms[*id]).clone(),
                    Ant::Rule(r, _) => Term::Rule(r.clone()),
                })
                .collect(),
            consequent: c.consequent,
        })
        .collect();
    infs.sort();
    infs.dedup();
    infs
}
