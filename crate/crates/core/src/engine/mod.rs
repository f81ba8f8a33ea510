//! The abstract parsing algorithm: a chart of terms with semiring values
//! and antecedent sets, an agenda ordered by the search strategy, and
//! termination by goal, quiescence, or resource limits.

pub mod prune;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grammar::{GrammarEvaluator, Label, Sym};
use crate::logic::{Ant, Candidate, FireCtx, Inference, Logic, RuleName, Term, TermId, TermIndex};
use crate::semiring::Semiring;

pub use prune::Beam;
use prune::BeamState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Smaller consequents first; reverse terms after all forward terms,
    /// larger first.
    #[default]
    BottomUp,
    /// Most valuable consequents first, ties by label order.
    UniformCost,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bottomup" => Ok(Strategy::BottomUp),
            "ucs" => Ok(Strategy::UniformCost),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::BottomUp => "bottomup",
            Strategy::UniformCost => "ucs",
        })
    }
}

pub type GoalPredicate = Arc<dyn Fn(&Term) -> bool + Send + Sync>;

#[derive(Clone, Default)]
pub enum Goal {
    /// Run to quiescence.
    #[default]
    None,
    /// Every listed term is a goal.
    Terms(Vec<Term>),
    /// Any term satisfying the predicate is a goal; the goal value is their sum.
    Predicate(GoalPredicate),
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::None => f.write_str("None"),
            Goal::Terms(t) => write!(f, "Terms({t:?})"),
            Goal::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Limits {
    pub max_inferences: Option<u64>,
    pub max_seconds: Option<f64>,
    pub max_terms: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct ParseConfig {
    pub strategy: Strategy,
    pub goal: Goal,
    pub limits: Limits,
    pub beam: Beam,
    /// Update values by ⊕-ing in each new contribution instead of
    /// recomputing from the full antecedent-set record. Only honored for
    /// idempotent ⊕.
    pub incremental: bool,
    pub trace: bool,
    /// Verify the chart consistency invariant after every update.
    pub check: bool,
}

impl ParseConfig {
    pub fn new(strategy: Strategy) -> Self {
        ParseConfig {
            strategy,
            ..Default::default()
        }
    }

    pub fn with_goal(mut self, goal: Goal) -> Self {
        self.goal = goal;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    #[default]
    Exhausted,
    GoalSettled,
    MaxInferences,
    MaxSeconds,
    MaxTerms,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Exhausted => "exhausted",
            Termination::GoalSettled => "goal-settled",
            Termination::MaxInferences => "max-inferences",
            Termination::MaxSeconds => "max-seconds",
            Termination::MaxTerms => "max-terms",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub rule: &'static str,
    pub consequent: String,
    pub score: f64,
    pub changed: bool,
}

/// Machine-readable run report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    pub inferences: u64,
    pub per_rule: BTreeMap<&'static str, u64>,
    pub candidates: u64,
    pub stale: u64,
    pub pruned: u64,
    pub triggers: u64,
    pub terms: usize,
    pub items: usize,
    pub elapsed_secs: f64,
    pub termination: Termination,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
}

/// Total order on f64 for agenda keys.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Score(f64);

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Bottom(u8, u32, u8, u64),
    Cost(Reverse<Score>, Vec<Label>, u8, u64),
}

impl Key {
    fn score(&self) -> Option<f64> {
        match self {
            Key::Cost(Reverse(Score(s)), ..) => Some(*s),
            Key::Bottom(..) => None,
        }
    }
}

enum Entry {
    Trigger(TermId),
    Candidate {
        rule: RuleName,
        ants: Vec<TermId>,
        consequent: TermId,
        vsum: u64,
    },
}

/// Term values, antecedent-set records, and statistics of one run.
pub struct Chart<S: Semiring> {
    semiring: S,
    terms: Vec<Arc<Term>>,
    ids: HashMap<Arc<Term>, TermId>,
    values: Vec<S::Value>,
    axioms: Vec<Option<S::Value>>,
    sas: Vec<IndexMap<Vec<TermId>, RuleName>>,
    versions: Vec<u64>,
    goals: Vec<TermId>,
    goal_spec: Goal,
    pub stats: RunStats,
}

impl<S: Semiring> Chart<S> {
    fn new(semiring: S, goal: Goal) -> Self {
        Chart {
            semiring,
            terms: Vec::new(),
            ids: HashMap::new(),
            values: Vec::new(),
            axioms: Vec::new(),
            sas: Vec::new(),
            versions: Vec::new(),
            goals: Vec::new(),
            goal_spec: goal,
            stats: RunStats::default(),
        }
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = self.terms.len();
        let term = Arc::new(term);
        let is_goal = match &self.goal_spec {
            Goal::None => false,
            Goal::Terms(ts) => ts.contains(&term),
            Goal::Predicate(p) => p(&term),
        };
        if is_goal {
            self.goals.push(id);
        }
        self.ids.insert(term.clone(), id);
        self.terms.push(term);
        self.values.push(self.semiring.zero());
        self.axioms.push(None);
        self.sas.push(IndexMap::new());
        self.versions.push(0);
        id
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Arc<Term> {
        &self.terms[id]
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermId, &Arc<Term>)> {
        self.terms.iter().enumerate()
    }

    pub fn value_of(&self, id: TermId) -> &S::Value {
        &self.values[id]
    }

    /// Value of a term; 0 for terms never stored.
    pub fn value(&self, term: &Term) -> S::Value {
        self.id(term)
            .map_or_else(|| self.semiring.zero(), |id| self.values[id].clone())
    }

    /// Terms with non-zero values.
    pub fn stored(&self) -> impl Iterator<Item = (TermId, &Arc<Term>)> {
        self.terms()
            .filter(|(id, _)| !self.semiring.is_zero(&self.values[*id]))
    }

    /// Recorded antecedent sets of a term, with the rule that produced each.
    pub fn antecedent_sets(&self, id: TermId) -> impl Iterator<Item = (RuleName, &[TermId])> {
        self.sas[id].iter().map(|(ants, r)| (*r, ants.as_slice()))
    }

    /// Every recorded inference, in canonical order.
    pub fn inferences(&self) -> Vec<Inference> {
        let mut out: Vec<Inference> = self
            .terms()
            .flat_map(|(id, t)| {
                self.antecedent_sets(id).map(move |(rule, ants)| Inference {
                    rule,
                    ants: ants.iter().map(|a| (*self.terms[*a]).clone()).collect(),
                    consequent: (**t).clone(),
                })
            })
            .collect();
        out.sort();
        out
    }

    /// Goal terms stored so far.
    pub fn goal_ids(&self) -> &[TermId] {
        &self.goals
    }

    /// ⊕ over all goal terms.
    pub fn goal_value(&self) -> S::Value {
        self.goals.iter().fold(self.semiring.zero(), |acc, &g| {
            self.semiring.plus(&acc, &self.values[g])
        })
    }

    /// The goal term with the best score, if any is non-zero.
    pub fn best_goal(&self) -> Option<TermId> {
        self.goals
            .iter()
            .copied()
            .filter(|&g| !self.semiring.is_zero(&self.values[g]))
            .max_by(|&a, &b| {
                let (sa, sb) = (
                    self.semiring.score(&self.values[a]),
                    self.semiring.score(&self.values[b]),
                );
                sa.total_cmp(&sb)
                    .then_with(|| self.terms[b].cmp(&self.terms[a]))
            })
    }

    fn compute(&self, id: TermId) -> S::Value {
        let sr = &self.semiring;
        let mut v = self.axioms[id].clone().unwrap_or_else(|| sr.zero());
        for ants in self.sas[id].keys() {
            v = sr.plus(&v, &self.contribution(ants, id));
        }
        v
    }

    fn contribution(&self, ants: &[TermId], consequent: TermId) -> S::Value {
        let sr = &self.semiring;
        let prod = ants
            .iter()
            .fold(sr.one(), |acc, &a| sr.times(&acc, &self.values[a]));
        sr.wrap(prod, &self.terms[consequent])
    }

    /// Checks that every value equals its axiom value ⊕ the sum over its
    /// antecedent sets of the product of their values.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        for id in 0..self.terms.len() {
            let expect = self.compute(id);
            if !self.semiring.approx_eq(&expect, &self.values[id]) {
                return Err(format!(
                    "value of {} is {:?}, antecedent sets give {:?}",
                    self.terms[id], self.values[id], expect
                ));
            }
        }
        Ok(())
    }
}

fn strategy_key(strategy: Strategy, term: &Term, kind: u8, seq: u64, score: f64) -> Key {
    match strategy {
        Strategy::BottomUp => {
            let (phase, width) = if term.is_reverse() {
                (1, u32::MAX - term.width())
            } else {
                (0, term.width())
            };
            Key::Bottom(phase, width, kind, seq)
        }
        Strategy::UniformCost => Key::Cost(Reverse(Score(score)), term.labels(), kind, seq),
    }
}

const CANDIDATE: u8 = 0;
const TRIGGER: u8 = 1;

struct Agenda {
    heap: BinaryHeap<Reverse<(Key, usize)>>,
    entries: Vec<Option<Entry>>,
    seq: u64,
}

impl Agenda {
    fn push(&mut self, key_of: impl FnOnce(u64) -> Key, entry: Entry) {
        let slot = self.entries.len();
        self.entries.push(Some(entry));
        let key = key_of(self.seq);
        self.seq += 1;
        self.heap.push(Reverse((key, slot)));
    }

    fn pop(&mut self) -> Option<(Key, Entry)> {
        let Reverse((key, slot)) = self.heap.pop()?;
        Some((key, self.entries[slot].take().expect("entry popped once")))
    }

    fn peek_score(&self) -> Option<f64> {
        self.heap.peek().and_then(|Reverse((k, _))| k.score())
    }
}

/// Parses unweighted input.
pub fn parse<S: Semiring>(
    logic: &dyn Logic,
    grammar: &dyn GrammarEvaluator,
    semiring: &S,
    input: &[Vec<Sym>],
    config: &ParseConfig,
) -> Result<Chart<S>> {
    parse_weighted(logic, grammar, semiring, input, None, config)
}

/// Runs the abstract parsing algorithm. `weights` gives a value per input
/// token; missing weights are 1.
pub fn parse_weighted<S: Semiring>(
    logic: &dyn Logic,
    grammar: &dyn GrammarEvaluator,
    semiring: &S,
    input: &[Vec<Sym>],
    weights: Option<&[Vec<f64>]>,
    config: &ParseConfig,
) -> Result<Chart<S>> {
    if config.strategy == Strategy::UniformCost && !semiring.is_ordered() {
        return Err(Error::Config(format!(
            "uniform-cost search needs an ordered semiring, not {}",
            semiring.name()
        )));
    }
    if !config.beam.is_off() && !semiring.is_ordered() {
        return Err(Error::Config(format!(
            "beam pruning needs an ordered semiring, not {}",
            semiring.name()
        )));
    }
    let start = Instant::now();
    let sr = semiring;
    let mut chart = Chart::new(semiring.clone(), config.goal.clone());
    let mut agenda = Agenda {
        heap: BinaryHeap::new(),
        entries: Vec::new(),
        seq: 0,
    };
    let mut index = TermIndex::default();
    let mut pending: HashSet<TermId> = HashSet::new();
    let mut seen: HashMap<(TermId, Vec<TermId>), u64> = HashMap::new();
    let mut beam_state = BeamState::default();
    let incremental = config.incremental && sr.is_idempotent_plus();
    let mut monotone = true;

    let mut axioms = logic.axioms(grammar, input, weights)?;
    axioms.extend(
        grammar
            .static_rules()
            .into_iter()
            .map(|(r, w)| (Term::Rule(r), w)),
    );
    for (term, w) in axioms {
        monotone &= w <= 1.0;
        let id = chart.intern(term);
        let v = sr.from_weight(w, &chart.terms[id]);
        let merged = match &chart.axioms[id] {
            Some(old) => sr.plus(old, &v),
            None => v,
        };
        chart.axioms[id] = Some(merged.clone());
        chart.values[id] = merged;
    }
    for id in 0..chart.terms.len() {
        let score = sr.score(&chart.values[id]);
        pending.insert(id);
        let term = chart.terms[id].clone();
        agenda.push(
            |seq| strategy_key(config.strategy, &term, TRIGGER, seq, score),
            Entry::Trigger(id),
        );
    }

    let early_stop = config.strategy == Strategy::UniformCost
        && sr.is_idempotent_plus()
        && !matches!(config.goal, Goal::None);
    let mut out: Vec<Candidate> = Vec::new();
    let mut iterations: u64 = 0;
    chart.stats.termination = Termination::Exhausted;

    loop {
        iterations += 1;
        if let Some(max) = config.limits.max_inferences {
            if chart.stats.inferences >= max {
                chart.stats.termination = Termination::MaxInferences;
                break;
            }
        }
        if let Some(max) = config.limits.max_terms {
            if chart.terms.len() > max {
                chart.stats.termination = Termination::MaxTerms;
                break;
            }
        }
        if let Some(max) = config.limits.max_seconds {
            if iterations.is_multiple_of(64) && start.elapsed().as_secs_f64() > max {
                chart.stats.termination = Termination::MaxSeconds;
                break;
            }
        }
        if early_stop && monotone && goal_settled(&chart, config, agenda.peek_score()) {
            chart.stats.termination = Termination::GoalSettled;
            break;
        }
        let Some((_, entry)) = agenda.pop() else {
            break;
        };
        match entry {
            Entry::Trigger(id) => {
                pending.remove(&id);
                if sr.is_zero(&chart.values[id]) {
                    continue;
                }
                chart.stats.triggers += 1;
                index.insert(id, &chart.terms[id], grammar);
                out.clear();
                logic.fire(
                    &FireCtx {
                        index: &index,
                        grammar,
                        input,
                    },
                    id,
                    &mut out,
                );
                for cand in out.drain(..) {
                    chart.stats.candidates += 1;
                    let mut ants = Vec::with_capacity(cand.ants.len());
                    for ant in cand.ants {
                        ants.push(match ant {
                            Ant::Id(a) => a,
                            Ant::Rule(rule, w) => {
                                let rid = chart.intern(Term::Rule(rule));
                                if chart.axioms[rid].is_none() {
                                    monotone &= w <= 1.0;
                                    let v = sr.from_weight(w, &chart.terms[rid]);
                                    chart.axioms[rid] = Some(v.clone());
                                    chart.values[rid] = v;
                                }
                                rid
                            }
                        });
                    }
                    let consequent = chart.intern(cand.consequent);
                    let vsum: u64 = ants.iter().map(|&a| chart.versions[a]).sum();
                    match seen.get(&(consequent, ants.clone())) {
                        Some(&v) if v == vsum => continue,
                        _ => {}
                    }
                    seen.insert((consequent, ants.clone()), vsum);
                    let score = match config.strategy {
                        Strategy::UniformCost => sr.score(&chart.contribution(&ants, consequent)),
                        Strategy::BottomUp => 0.0,
                    };
                    let term = chart.terms[consequent].clone();
                    agenda.push(
                        |seq| strategy_key(config.strategy, &term, CANDIDATE, seq, score),
                        Entry::Candidate {
                            rule: cand.rule,
                            ants,
                            consequent,
                            vsum,
                        },
                    );
                }
            }
            Entry::Candidate {
                rule,
                ants,
                consequent,
                vsum,
            } => {
                if ants.iter().map(|&a| chart.versions[a]).sum::<u64>() != vsum {
                    chart.stats.stale += 1;
                    continue;
                }
                let contribution = chart.contribution(&ants, consequent);
                if !config.beam.is_off() {
                    let score = sr.score(&contribution);
                    if !beam_state.admits(&config.beam, consequent, &chart.terms[consequent], score)
                    {
                        chart.stats.pruned += 1;
                        if chart.sas[consequent].shift_remove(&ants).is_some() {
                            let v = chart.compute(consequent);
                            update_value(
                                &mut chart,
                                consequent,
                                v,
                                &mut agenda,
                                &mut pending,
                                config.strategy,
                            );
                        }
                        continue;
                    }
                }
                chart.stats.inferences += 1;
                *chart.stats.per_rule.entry(rule.as_str()).or_insert(0) += 1;
                chart.sas[consequent].entry(ants).or_insert(rule);
                let v = if incremental {
                    sr.plus(&chart.values[consequent], &contribution)
                } else {
                    chart.compute(consequent)
                };
                let changed = update_value(
                    &mut chart,
                    consequent,
                    v,
                    &mut agenda,
                    &mut pending,
                    config.strategy,
                );
                if !config.beam.is_off() {
                    beam_state.record(
                        consequent,
                        &chart.terms[consequent],
                        sr.score(&chart.values[consequent]),
                    );
                }
                if config.trace {
                    chart.stats.trace.push(TraceEntry {
                        rule: rule.as_str(),
                        consequent: chart.terms[consequent].to_string(),
                        score: sr.score(&contribution),
                        changed,
                    });
                }
                if config.check {
                    if let Err(e) = chart.check_consistency() {
                        panic!("chart inconsistent: {e}");
                    }
                }
            }
        }
    }

    chart.stats.terms = chart.terms.len();
    chart.stats.items = chart.stored().filter(|(_, t)| t.item().is_some()).count();
    chart.stats.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(chart)
}

fn update_value<S: Semiring>(
    chart: &mut Chart<S>,
    id: TermId,
    v: S::Value,
    agenda: &mut Agenda,
    pending: &mut HashSet<TermId>,
    strategy: Strategy,
) -> bool {
    if v == chart.values[id] {
        return false;
    }
    chart.values[id] = v;
    chart.versions[id] += 1;
    if pending.insert(id) {
        let score = chart.semiring.score(&chart.values[id]);
        let term = chart.terms[id].clone();
        agenda.push(
            |seq| strategy_key(strategy, &term, TRIGGER, seq, score),
            Entry::Trigger(id),
        );
    }
    true
}

/// Whether no pending entry can improve any goal: every goal term is
/// stored and its settled score exceeds the best pending score.
fn goal_settled<S: Semiring>(chart: &Chart<S>, config: &ParseConfig, top: Option<f64>) -> bool {
    let Some(top) = top else { return false };
    let sr = &chart.semiring;
    match &config.goal {
        Goal::None => false,
        Goal::Terms(terms) => terms.iter().all(|t| {
            chart
                .id(t)
                .is_some_and(|id| top < sr.settle_score(&chart.values[id]))
        }),
        Goal::Predicate(_) => {
            let v = chart.goal_value();
            !sr.is_zero(&v) && top < sr.settle_score(&v)
        }
    }
}
