//! A composite grammar evaluator that imitates an I-dimensional PGMTG
//! with a D-dimensional structured grammar and word-to-word lexicons for
//! the remaining dimensions.
//!
//! Structured labels carry lexical heads `X[h]`; unstructured dimensions
//! use the dummy label `λ[u]`. Nonterminating rules come in two shapes:
//!
//! * both children structured: weight of the structured rule, times
//!   Pr(NULL | g) for each unstructured dimension the non-head child never
//!   linked into, times 1/μ(f) for each unstructured dimension where both
//!   children are active;
//! * a structured child Y and a single unstructured word Z: the word links
//!   to Y's head with weight Pr(u | g) when Y is inactive in that dimension,
//!   or attaches with weight Pr(u | NULL)/μ(f) when Y already is active.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::dspan::{Pav, PrecedenceArray};
use crate::grammar::lexicon::{WordLexicon, NULL};
use crate::grammar::{strip_heads, Gmtg, GrammarEvaluator, Label, Partners, Role, Rule, Sym};

/// Number of distinct precedence arrays over two links in which each link
/// occurs between 1 and `f` times, equal indexes are never adjacent within
/// a segment, and there are at most `f` segments.
pub fn mu(f: usize) -> u64 {
    assert!(f >= 1, "fan-out bound must be at least 1");
    static CACHE: Mutex<Vec<u64>> = Mutex::new(Vec::new());
    let mut cache = CACHE.lock().expect("mu cache");
    if cache.len() <= f {
        cache.resize(f + 1, 0);
    }
    if cache[f] == 0 {
        let mut count = 0;
        let mut memo = HashMap::new();
        for last in [1u8, 2] {
            let (c1, c2) = if last == 1 { (1, 0) } else { (0, 1) };
            count += mu_count(f, c1, c2, 1, last, &mut memo);
        }
        cache[f] = count;
    }
    cache[f]
}

/// Arrays extending a prefix with `c1`/`c2` occurrences, `segs` segments,
/// ending in `last`; counts the prefix itself if complete.
fn mu_count(
    f: usize,
    c1: usize,
    c2: usize,
    segs: usize,
    last: u8,
    memo: &mut HashMap<(usize, usize, usize, u8), u64>,
) -> u64 {
    if let Some(&v) = memo.get(&(c1, c2, segs, last)) {
        return v;
    }
    let mut total = u64::from(c1 >= 1 && c2 >= 1);
    for next in [1u8, 2] {
        let (n1, n2) = if next == 1 {
            (c1 + 1, c2)
        } else {
            (c1, c2 + 1)
        };
        if n1 > f || n2 > f {
            continue;
        }
        // continue the segment
        if next != last {
            total += mu_count(f, n1, n2, segs, next, memo);
        }
        // open a new segment
        if segs < f {
            total += mu_count(f, n1, n2, segs + 1, next, memo);
        }
    }
    memo.insert((c1, c2, segs, last), total);
    total
}

#[derive(Debug, Clone)]
pub struct AlignmentEvaluator {
    structured: Gmtg,
    lexicons: Vec<WordLexicon>,
    dims: usize,
    fan_out: usize,
    mu: f64,
    start: Vec<Label>,
    strip: bool,
}

fn all_inactive(labels: &[Label]) -> bool {
    labels.iter().all(|l| !l.is_active())
}

fn first_head(labels: &[Label]) -> Option<Sym> {
    labels
        .iter()
        .find(|l| l.is_active())
        .and_then(|l| l.head.clone())
}

impl AlignmentEvaluator {
    /// `lexicons[k]` gives Pr(word in dimension D+k | structured head) for
    /// each unstructured dimension.
    pub fn new(structured: Gmtg, lexicons: Vec<WordLexicon>, fan_out: usize) -> Self {
        let d = structured.dims();
        let dims = d + lexicons.len();
        let mut start: Vec<Label> = structured.start().to_vec();
        start.extend((d..dims).map(|_| Label::lambda(None)));
        let strip = !structured.is_lexicalized();
        AlignmentEvaluator {
            structured,
            lexicons,
            dims,
            fan_out,
            mu: mu(fan_out) as f64,
            start,
            strip,
        }
    }

    pub fn structured(&self) -> &Gmtg {
        &self.structured
    }

    fn structured_dims(&self) -> usize {
        self.structured.dims()
    }

    fn key(&self, labels: &[Label]) -> Vec<Label> {
        let s = &labels[..self.structured_dims()];
        if self.strip {
            strip_heads(s)
        } else {
            s.to_vec()
        }
    }

    fn lex(&self, dim: usize, given: Option<&Sym>, word: &str) -> f64 {
        let given = given.map_or(NULL, |g| g.as_ref());
        self.lexicons[dim - self.structured_dims()].prob(given, word)
    }

    fn structured_terminal(&self, rule: &Rule, w: f64) -> (Arc<Rule>, f64) {
        match rule {
            Rule::Terminating { dim, lhs, terminal } if self.strip => (
                Arc::new(Rule::Terminating {
                    dim: *dim,
                    lhs: lhs.with_head(Some(terminal.clone())),
                    terminal: terminal.clone(),
                }),
                w,
            ),
            other => (Arc::new(other.clone()), w),
        }
    }

    fn lambda_terminal(dim: usize, token: &Sym) -> (Arc<Rule>, f64) {
        (
            Arc::new(Rule::Terminating {
                dim,
                lhs: Label::lambda(Some(token.clone())),
                terminal: token.clone(),
            }),
            1.0,
        )
    }

    /// Both children structured.
    fn compose_structured(
        &self,
        y: &[Label],
        z: &[Label],
        arrays: &[PrecedenceArray],
    ) -> Vec<(Arc<Rule>, f64)> {
        let sd = self.structured_dims();
        let mut out = Vec::new();
        let head_is_z = z[..sd].iter().any(Label::is_active);
        let (head, nonhead) = if head_is_z { (z, y) } else { (y, z) };
        let nonhead_g = first_head(&nonhead[..sd]);
        let mut factor = 1.0;
        let mut tail = Vec::with_capacity(self.dims - sd);
        for d in sd..self.dims {
            if arrays[d].fan_out() > self.fan_out {
                return out;
            }
            let (ya, za) = (y[d].is_active(), z[d].is_active());
            if ya && za {
                factor /= self.mu;
            }
            if !nonhead[d].is_active() {
                factor *= self.lex(d, nonhead_g.as_ref(), NULL);
            }
            tail.push(if head[d].is_active() {
                head[d].clone()
            } else {
                nonhead[d].clone()
            });
        }
        if factor == 0.0 {
            return out;
        }
        for (rule, w) in self
            .structured
            .nonterminating(&self.key(y), &self.key(z), &arrays[..sd])
        {
            let Rule::Nonterminating { lhs, .. } = rule.as_ref() else {
                continue;
            };
            let mut labels: Vec<Label> = (0..sd)
                .map(|d| {
                    if !self.strip {
                        lhs[d].clone()
                    } else if z[d].is_active() {
                        lhs[d].with_head(z[d].head.clone())
                    } else {
                        lhs[d].with_head(y[d].head.clone())
                    }
                })
                .collect();
            labels.extend(tail.iter().cloned());
            let weight = w * factor;
            if weight > 0.0 {
                out.push((
                    Arc::new(Rule::Nonterminating {
                        lhs: labels,
                        pav: Pav(arrays.to_vec()),
                        y: y.to_vec(),
                        z: z.to_vec(),
                    }),
                    weight,
                ));
            }
        }
        out
    }

    /// Structured Y, single unstructured word Z.
    fn compose_word(
        &self,
        y: &[Label],
        z: &[Label],
        arrays: &[PrecedenceArray],
    ) -> Vec<(Arc<Rule>, f64)> {
        let sd = self.structured_dims();
        if (0..sd).any(|d| arrays[d] != PrecedenceArray::contiguous(vec![1]) && y[d].is_active()) {
            return Vec::new();
        }
        let g = first_head(&y[..sd]);
        let mut factor = 1.0;
        let mut labels: Vec<Label> = y[..sd].to_vec();
        for d in sd..self.dims {
            if arrays[d].fan_out() > self.fan_out {
                return Vec::new();
            }
            match (y[d].is_active(), z[d].is_active()) {
                (_, false) => labels.push(y[d].clone()),
                (false, true) => {
                    let u = z[d]
                        .head
                        .clone()
                        .expect("unstructured word carries its head");
                    factor *= self.lex(d, g.as_ref(), &u);
                    labels.push(Label::lambda(Some(u)));
                }
                (true, true) => {
                    let u = z[d]
                        .head
                        .clone()
                        .expect("unstructured word carries its head");
                    factor *= self.lex(d, None, &u) / self.mu;
                    labels.push(y[d].clone());
                }
            }
        }
        if factor <= 0.0 {
            return Vec::new();
        }
        vec![(
            Arc::new(Rule::Nonterminating {
                lhs: labels,
                pav: Pav(arrays.to_vec()),
                y: y.to_vec(),
                z: z.to_vec(),
            }),
            factor,
        )]
    }
}

impl GrammarEvaluator for AlignmentEvaluator {
    fn dims(&self) -> usize {
        self.dims
    }

    fn start(&self) -> &[Label] {
        &self.start
    }

    fn static_rules(&self) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }

    fn terminating_for(&self, dim: usize, token: &str) -> Vec<(Arc<Rule>, f64)> {
        if dim < self.structured_dims() {
            self.structured
                .terminating_for(dim, token)
                .iter()
                .map(|(r, w)| self.structured_terminal(r, *w))
                .collect()
        } else {
            vec![Self::lambda_terminal(dim, &Sym::from(token))]
        }
    }

    fn terminating_in_dim(&self, dim: usize) -> Vec<(Arc<Rule>, f64)> {
        if dim < self.structured_dims() {
            self.structured
                .terminating_in_dim(dim)
                .iter()
                .map(|(r, w)| self.structured_terminal(r, *w))
                .collect()
        } else {
            Vec::new()
        }
    }

    fn terminating_with_lhs(&self, dim: usize, lhs: &Label) -> Vec<(Arc<Rule>, f64)> {
        if dim >= self.structured_dims() {
            return match (&lhs.head, lhs.is_lambda()) {
                (Some(h), true) => vec![Self::lambda_terminal(dim, h)],
                _ => Vec::new(),
            };
        }
        let key = if self.strip {
            lhs.without_head()
        } else {
            lhs.clone()
        };
        self.structured
            .terminating_with_lhs(dim, &key)
            .iter()
            .map(|(r, w)| self.structured_terminal(r, *w))
            .filter(|(r, _)| {
                !self.strip
                    || lhs.head.is_none()
                    || matches!(r.as_ref(), Rule::Terminating { lhs: l, .. } if l == lhs)
            })
            .collect()
    }

    fn partners(&self, labels: &[Label], role: Role) -> Partners {
        let key = self.key(labels);
        let none = vec![Label::inactive(); self.structured_dims()];
        if key == none {
            return match role {
                Role::Second => Partners::Any,
                _ => Partners::Keys(Vec::new()),
            };
        }
        match (role, self.structured.partners(&key, role)) {
            (Role::First, Partners::Keys(mut keys)) => {
                keys.push(none);
                Partners::Keys(keys)
            }
            (_, p) => p,
        }
    }

    fn index_key(&self, labels: &[Label]) -> Vec<Label> {
        self.key(labels)
    }

    fn nonterminating(
        &self,
        y: &[Label],
        z: &[Label],
        arrays: &[PrecedenceArray],
    ) -> Vec<(Arc<Rule>, f64)> {
        let sd = self.structured_dims();
        if arrays.len() != self.dims || !Pav(arrays.to_vec()).is_normal() {
            return Vec::new();
        }
        match (all_inactive(&y[..sd]), all_inactive(&z[..sd])) {
            (false, false) => self.compose_structured(y, z, arrays),
            (false, true) => {
                let word = z[sd..].iter().filter(|l| l.is_active()).count() == 1;
                if word {
                    self.compose_word(y, z, arrays)
                } else {
                    Vec::new()
                }
            }
            _ => Vec::new(),
        }
    }

    fn nonterminating_by(&self, _: Role, _: &[Label]) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }

    fn weight(&self, rule: &Rule) -> f64 {
        match rule {
            Rule::Terminating { dim, lhs, terminal } => self
                .terminating_for(*dim, terminal)
                .into_iter()
                .find(|(r, _)| matches!(r.as_ref(), Rule::Terminating { lhs: l, .. } if l == lhs))
                .map_or(0.0, |(_, w)| w),
            Rule::Nonterminating { pav, y, z, .. } => self
                .nonterminating(y, z, pav.arrays())
                .into_iter()
                .find(|(r, _)| r.as_ref() == rule)
                .map_or(0.0, |(_, w)| w),
            Rule::Lexical { .. } => 0.0,
        }
    }

    fn lexicalized(&self) -> bool {
        true
    }
}

/// The fallback structure when no monolingual grammar is available: one
/// label `X` that binarizes freely, with uniform terminals over `vocab`.
pub fn flat_grammar(vocab: &[Sym]) -> Gmtg {
    let mut rules = vec![(
        Rule::Nonterminating {
            lhs: vec![Label::new("X")],
            pav: Pav(vec![PrecedenceArray::contiguous(vec![1, 2])]),
            y: vec![Label::new("X")],
            z: vec![Label::new("X")],
        },
        0.5,
    )];
    let share = if vocab.is_empty() {
        0.0
    } else {
        0.5 / vocab.len() as f64
    };
    for w in vocab {
        rules.push((
            Rule::Terminating {
                dim: 0,
                lhs: Label::new("X"),
                terminal: w.clone(),
            },
            share,
        ));
    }
    Gmtg::new(1, vec![Label::new("X")], rules).expect("flat grammar is well formed")
}
