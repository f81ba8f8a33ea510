//! Parsing semirings.
//!
//! Every semiring maps axiom weights into its carrier set and combines
//! values with `plus` and `times`. Derivation-bearing semirings build
//! [`DerivNode`] trees: `times` concatenates child lists and `wrap` closes a
//! list under the consequent of an inference.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logic::Term;

/// A derivation: a consequent term and the derivations of its antecedents.
/// Leaves are axioms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivNode {
    pub term: Arc<Term>,
    pub children: Vec<Derivation>,
}

pub type Derivation = Arc<DerivNode>;

impl DerivNode {
    pub fn leaf(term: Arc<Term>) -> Derivation {
        Arc::new(DerivNode {
            term,
            children: Vec::new(),
        })
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    /// Axiom leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<Arc<Term>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Arc<Term>>) {
        if self.children.is_empty() {
            out.push(self.term.clone());
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// Every term in the derivation, preorder.
    pub fn terms(&self) -> Vec<Arc<Term>> {
        let mut out = vec![self.term.clone()];
        for c in &self.children {
            out.extend(c.terms());
        }
        out
    }
}

impl fmt::Display for DerivNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return write!(f, "{}", self.term);
        }
        write!(f, "({}", self.term)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

pub trait Semiring: Clone + Send + Sync + 'static {
    type Value: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn name(&self) -> String;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn plus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn times(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn is_zero(&self, v: &Self::Value) -> bool;

    /// Value of an axiom with the given weight.
    fn from_weight(&self, w: f64, term: &Arc<Term>) -> Self::Value;

    /// Closes a product of antecedent values under its consequent.
    fn wrap(&self, v: Self::Value, _consequent: &Arc<Term>) -> Self::Value {
        v
    }

    /// Probability-like key used by best-first search and pruning.
    fn score(&self, v: &Self::Value) -> f64;

    /// Largest score a new derivation must reach to change `v`.
    fn settle_score(&self, v: &Self::Value) -> f64 {
        self.score(v)
    }

    fn is_ordered(&self) -> bool;
    fn is_idempotent_plus(&self) -> bool;

    /// Equality up to floating-point rounding.
    fn approx_eq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        a == b
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    fn name(&self) -> String {
        "boolean".into()
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn plus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn times(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn is_zero(&self, v: &bool) -> bool {
        !*v
    }
    fn from_weight(&self, w: f64, _: &Arc<Term>) -> bool {
        w > 0.0
    }
    fn score(&self, v: &bool) -> f64 {
        if *v {
            1.0
        } else {
            0.0
        }
    }
    fn is_ordered(&self) -> bool {
        false
    }
    fn is_idempotent_plus(&self) -> bool {
        true
    }
}

/// Number of derivations, saturating at `u128::MAX`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counting;

impl Semiring for Counting {
    type Value = u128;

    fn name(&self) -> String {
        "counting".into()
    }
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1
    }
    fn plus(&self, a: &u128, b: &u128) -> u128 {
        a.saturating_add(*b)
    }
    fn times(&self, a: &u128, b: &u128) -> u128 {
        a.saturating_mul(*b)
    }
    fn is_zero(&self, v: &u128) -> bool {
        *v == 0
    }
    fn from_weight(&self, w: f64, _: &Arc<Term>) -> u128 {
        u128::from(w > 0.0)
    }
    fn score(&self, v: &u128) -> f64 {
        *v as f64
    }
    fn is_ordered(&self) -> bool {
        false
    }
    fn is_idempotent_plus(&self) -> bool {
        false
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Sum-product over non-negative reals. In log space values hold `ln p`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Inside {
    pub log_space: bool,
}

impl Semiring for Inside {
    type Value = f64;

    fn name(&self) -> String {
        "inside".into()
    }
    fn zero(&self) -> f64 {
        if self.log_space {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }
    fn one(&self) -> f64 {
        if self.log_space {
            0.0
        } else {
            1.0
        }
    }
    fn plus(&self, a: &f64, b: &f64) -> f64 {
        if self.log_space {
            log_add(*a, *b)
        } else {
            a + b
        }
    }
    fn times(&self, a: &f64, b: &f64) -> f64 {
        if self.log_space {
            a + b
        } else {
            a * b
        }
    }
    fn is_zero(&self, v: &f64) -> bool {
        *v == self.zero()
    }
    fn from_weight(&self, w: f64, _: &Arc<Term>) -> f64 {
        if self.log_space {
            w.ln()
        } else {
            w
        }
    }
    fn score(&self, v: &f64) -> f64 {
        if self.log_space {
            v.exp()
        } else {
            *v
        }
    }
    fn is_ordered(&self) -> bool {
        true
    }
    fn is_idempotent_plus(&self) -> bool {
        false
    }
    fn approx_eq(&self, a: &f64, b: &f64) -> bool {
        rel_close(self.score(a), self.score(b), 1e-9)
    }
}

/// Max-product over non-negative reals. In log space values hold `ln p`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Viterbi {
    pub log_space: bool,
}

impl Semiring for Viterbi {
    type Value = f64;

    fn name(&self) -> String {
        "viterbi".into()
    }
    fn zero(&self) -> f64 {
        if self.log_space {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }
    fn one(&self) -> f64 {
        if self.log_space {
            0.0
        } else {
            1.0
        }
    }
    fn plus(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }
    fn times(&self, a: &f64, b: &f64) -> f64 {
        if self.log_space {
            a + b
        } else {
            a * b
        }
    }
    fn is_zero(&self, v: &f64) -> bool {
        *v == self.zero()
    }
    fn from_weight(&self, w: f64, _: &Arc<Term>) -> f64 {
        if self.log_space {
            w.ln()
        } else {
            w
        }
    }
    fn score(&self, v: &f64) -> f64 {
        if self.log_space {
            v.exp()
        } else {
            *v
        }
    }
    fn is_ordered(&self) -> bool {
        true
    }
    fn is_idempotent_plus(&self) -> bool {
        true
    }
    fn approx_eq(&self, a: &f64, b: &f64) -> bool {
        rel_close(self.score(a), self.score(b), 1e-9)
    }
}

/// Probability of a derivation list together with the list itself. A
/// complete derivation of a term is a one-element list.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub prob: f64,
    pub derivs: Vec<Derivation>,
}

impl Scored {
    fn cmp_best_first(&self, other: &Scored) -> Ordering {
        other
            .prob
            .total_cmp(&self.prob)
            .then_with(|| self.derivs.cmp(&other.derivs))
    }
}

/// Single most probable derivation. Ties go to the lexicographically least
/// derivation list.
#[derive(Debug, Clone, Copy, Default)]
pub struct ViterbiDerivation;

impl Semiring for ViterbiDerivation {
    type Value = Scored;

    fn name(&self) -> String {
        "viterbi-deriv".into()
    }
    fn zero(&self) -> Scored {
        Scored {
            prob: 0.0,
            derivs: Vec::new(),
        }
    }
    fn one(&self) -> Scored {
        Scored {
            prob: 1.0,
            derivs: Vec::new(),
        }
    }
    fn plus(&self, a: &Scored, b: &Scored) -> Scored {
        match a.cmp_best_first(b) {
            Ordering::Greater => b.clone(),
            _ => a.clone(),
        }
    }
    fn times(&self, a: &Scored, b: &Scored) -> Scored {
        let prob = a.prob * b.prob;
        if prob == 0.0 {
            return self.zero();
        }
        let mut derivs = Vec::with_capacity(a.derivs.len() + b.derivs.len());
        derivs.extend(a.derivs.iter().cloned());
        derivs.extend(b.derivs.iter().cloned());
        Scored { prob, derivs }
    }
    fn is_zero(&self, v: &Scored) -> bool {
        v.prob == 0.0
    }
    fn from_weight(&self, w: f64, term: &Arc<Term>) -> Scored {
        if w <= 0.0 {
            return self.zero();
        }
        Scored {
            prob: w,
            derivs: vec![DerivNode::leaf(term.clone())],
        }
    }
    fn wrap(&self, v: Scored, consequent: &Arc<Term>) -> Scored {
        if v.prob == 0.0 {
            return v;
        }
        let node = Arc::new(DerivNode {
            term: consequent.clone(),
            children: v.derivs,
        });
        Scored {
            prob: v.prob,
            derivs: vec![node],
        }
    }
    fn score(&self, v: &Scored) -> f64 {
        v.prob
    }
    fn is_ordered(&self) -> bool {
        true
    }
    fn is_idempotent_plus(&self) -> bool {
        true
    }
    fn approx_eq(&self, a: &Scored, b: &Scored) -> bool {
        rel_close(a.prob, b.prob, 1e-9) && a.derivs == b.derivs
    }
}

/// The `n` most probable derivations, best first, duplicates removed.
#[derive(Debug, Clone, Copy)]
pub struct ViterbiNBest {
    pub n: usize,
}

impl ViterbiNBest {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "n-best needs n >= 1");
        ViterbiNBest { n }
    }

    fn finish(&self, mut list: Vec<Scored>) -> Vec<Scored> {
        list.retain(|s| s.prob > 0.0);
        list.sort_by(Scored::cmp_best_first);
        list.dedup();
        list.truncate(self.n);
        list
    }
}

impl Semiring for ViterbiNBest {
    type Value = Vec<Scored>;

    fn name(&self) -> String {
        format!("viterbi-nbest:{}", self.n)
    }
    fn zero(&self) -> Vec<Scored> {
        Vec::new()
    }
    fn one(&self) -> Vec<Scored> {
        vec![Scored {
            prob: 1.0,
            derivs: Vec::new(),
        }]
    }
    fn plus(&self, a: &Vec<Scored>, b: &Vec<Scored>) -> Vec<Scored> {
        self.finish(a.iter().chain(b.iter()).cloned().collect())
    }
    fn times(&self, a: &Vec<Scored>, b: &Vec<Scored>) -> Vec<Scored> {
        let vd = ViterbiDerivation;
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                out.push(vd.times(x, y));
            }
        }
        self.finish(out)
    }
    fn is_zero(&self, v: &Vec<Scored>) -> bool {
        v.is_empty()
    }
    fn from_weight(&self, w: f64, term: &Arc<Term>) -> Vec<Scored> {
        self.finish(vec![ViterbiDerivation.from_weight(w, term)])
    }
    fn wrap(&self, v: Vec<Scored>, consequent: &Arc<Term>) -> Vec<Scored> {
        v.into_iter()
            .map(|s| ViterbiDerivation.wrap(s, consequent))
            .collect()
    }
    fn score(&self, v: &Vec<Scored>) -> f64 {
        v.first().map_or(0.0, |s| s.prob)
    }
    fn settle_score(&self, v: &Vec<Scored>) -> f64 {
        if v.len() < self.n {
            0.0
        } else {
            v[self.n - 1].prob
        }
    }
    fn is_ordered(&self) -> bool {
        true
    }
    fn is_idempotent_plus(&self) -> bool {
        true
    }
    fn approx_eq(&self, a: &Vec<Scored>, b: &Vec<Scored>) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| ViterbiDerivation.approx_eq(x, y))
    }
}

/// Derivation forest. The packed forest itself is the chart's record of
/// antecedent sets; the value only says whether the forest is non-empty.
#[derive(Debug, Clone, Copy, Default)]
pub struct Forest;

impl Semiring for Forest {
    type Value = bool;

    fn name(&self) -> String {
        "forest".into()
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn plus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn times(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn is_zero(&self, v: &bool) -> bool {
        !*v
    }
    fn from_weight(&self, w: f64, _: &Arc<Term>) -> bool {
        w > 0.0
    }
    fn score(&self, v: &bool) -> f64 {
        if *v {
            1.0
        } else {
            0.0
        }
    }
    fn is_ordered(&self) -> bool {
        false
    }
    fn is_idempotent_plus(&self) -> bool {
        true
    }
}

/// Semiring selection as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiringKind {
    Boolean,
    Counting,
    Inside,
    Viterbi,
    ViterbiDeriv,
    ViterbiNBest(usize),
    Forest,
}

impl FromStr for SemiringKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "boolean" => SemiringKind::Boolean,
            "counting" => SemiringKind::Counting,
            "inside" => SemiringKind::Inside,
            "viterbi" => SemiringKind::Viterbi,
            "viterbi-deriv" => SemiringKind::ViterbiDeriv,
            "forest" => SemiringKind::Forest,
            other => {
                let n = other
                    .strip_prefix("viterbi-nbest:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::Config(format!("unknown semiring `{other}`")))?;
                SemiringKind::ViterbiNBest(n)
            }
        })
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiringKind::Boolean => f.write_str("boolean"),
            SemiringKind::Counting => f.write_str("counting"),
            SemiringKind::Inside => f.write_str("inside"),
            SemiringKind::Viterbi => f.write_str("viterbi"),
            SemiringKind::ViterbiDeriv => f.write_str("viterbi-deriv"),
            SemiringKind::ViterbiNBest(n) => write!(f, "viterbi-nbest:{n}"),
            SemiringKind::Forest => f.write_str("forest"),
        }
    }
}
