//! Word-to-word translation lexicons and the degenerate grammar they
//! induce for word alignment.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::dspan::PrecedenceArray;
use crate::error::{parse_err, Result};
use crate::grammar::{GrammarEvaluator, Label, Partners, Role, Rule, Sym};

/// Token standing for "no word" on either side of a lexicon entry.
pub const NULL: &str = "<null>";

/// Conditional table Pr(target | source), with NULL allowed on both sides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordLexicon {
    table: BTreeMap<Sym, BTreeMap<Sym, f64>>,
}

impl WordLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn null() -> Sym {
        Sym::from(NULL)
    }

    /// A lexicon translating every word of `vocab` to itself.
    pub fn identity<'a>(vocab: impl IntoIterator<Item = &'a Sym>) -> Self {
        let mut lex = WordLexicon::new();
        for w in vocab {
            lex.set(w.clone(), w.clone(), 1.0);
        }
        lex
    }

    pub fn set(&mut self, source: Sym, target: Sym, prob: f64) {
        self.table.entry(source).or_default().insert(target, prob);
    }

    pub fn prob(&self, source: &str, target: &str) -> f64 {
        self.table
            .get(source)
            .and_then(|row| row.get(target))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn row(&self, source: &str) -> Option<&BTreeMap<Sym, f64>> {
        self.table.get(source)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Sym> {
        self.table.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Sym, &Sym, f64)> {
        self.table
            .iter()
            .flat_map(|(s, row)| row.iter().map(move |(t, p)| (s, t, *p)))
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Whether every conditional distribution sums to 1 within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.table
            .values()
            .all(|row| (row.values().sum::<f64>() - 1.0).abs() <= tol)
    }

    /// Tab-separated `source target prob` lines, sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, t, p) in self.entries() {
            out.push_str(&format!("{s}\t{t}\t{p}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = WordLexicon::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [s, t, p] = fields[..] else {
                return Err(parse_err(k + 1, "expected `source target prob`"));
            };
            let p: f64 = p
                .parse()
                .map_err(|_| parse_err(k + 1, format!("bad probability `{p}`")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(parse_err(k + 1, format!("probability {p} outside [0,1]")));
            }
            lex.set(s.into(), t.into(), p);
        }
        Ok(lex)
    }
}

impl fmt::Display for WordLexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The word-alignment grammar of a lexicon: every production rewrites the
/// start link into one terminal per dimension, or into a single terminal
/// in one dimension for NULL entries.
#[derive(Debug, Clone)]
pub struct LexiconGrammar {
    start: Vec<Label>,
    rules: Vec<(Arc<Rule>, f64)>,
    by_token: HashMap<(usize, Sym), Vec<usize>>,
    weights: HashMap<Arc<Rule>, f64>,
}

impl LexiconGrammar {
    /// Dimension 1 holds sources, dimension 2 targets.
    pub fn new(lexicon: &WordLexicon) -> Self {
        let mut g = LexiconGrammar {
            start: vec![Label::new("S"), Label::new("S")],
            rules: Vec::new(),
            by_token: HashMap::new(),
            weights: HashMap::new(),
        };
        for (s, t, p) in lexicon.entries() {
            let side = |w: &Sym| (w.as_ref() != NULL).then(|| w.clone());
            let tokens = vec![side(s), side(t)];
            if tokens.iter().all(Option::is_none) || p <= 0.0 {
                continue;
            }
            let rule = Arc::new(Rule::Lexical {
                tokens: tokens.clone(),
            });
            let k = g.rules.len();
            for (d, tok) in tokens.iter().enumerate() {
                if let Some(tok) = tok {
                    g.by_token.entry((d, tok.clone())).or_default().push(k);
                }
            }
            g.weights.insert(rule.clone(), p);
            g.rules.push((rule, p));
        }
        g
    }

    pub fn rules(&self) -> &[(Arc<Rule>, f64)] {
        &self.rules
    }
}

impl GrammarEvaluator for LexiconGrammar {
    fn dims(&self) -> usize {
        2
    }
    fn start(&self) -> &[Label] {
        &self.start
    }
    fn static_rules(&self) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }
    fn terminating_for(&self, _: usize, _: &str) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }
    fn terminating_in_dim(&self, _: usize) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }
    fn terminating_with_lhs(&self, _: usize, _: &Label) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }
    fn partners(&self, _: &[Label], _: Role) -> Partners {
        Partners::Keys(Vec::new())
    }
    fn nonterminating(
        &self,
        _: &[Label],
        _: &[Label],
        _: &[PrecedenceArray],
    ) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }
    fn nonterminating_by(&self, _: Role, _: &[Label]) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }
    fn lexical_for(&self, dim: usize, token: &str) -> Vec<(Arc<Rule>, f64)> {
        self.by_token
            .get(&(dim, Sym::from(token)))
            .map(|ids| ids.iter().map(|&k| self.rules[k].clone()).collect())
            .unwrap_or_default()
    }
    fn weight(&self, rule: &Rule) -> f64 {
        self.weights.get(rule).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_transcribes_to_productions() {
        let mut lex = WordLexicon::new();
        lex.set("wash".into(), "moy".into(), 0.7);
        lex.set("wash".into(), NULL.into(), 0.3);
        let g = LexiconGrammar::new(&lex);
        let rule = Rule::Lexical {
            tokens: vec![Some("wash".into()), Some("moy".into())],
        };
        assert_eq!(g.weight(&rule), 0.7);
        let null_rule = Rule::Lexical {
            tokens: vec![Some("wash".into()), None],
        };
        assert_eq!(g.weight(&null_rule), 0.3);
        assert_eq!(g.lexical_for(1, "moy").len(), 1);
        assert_eq!(g.lexical_for(0, "wash").len(), 2);
    }

    #[test]
    fn empty_lexicon_scores_nothing() {
        let g = LexiconGrammar::new(&WordLexicon::new());
        assert!(g.rules().is_empty());
        assert!(g.lexical_for(0, "a").is_empty());
        assert_eq!(
            g.weight(&Rule::Lexical {
                tokens: vec![Some("a".into()), None]
            }),
            0.0
        );
    }

    #[test]
    fn text_round_trip() {
        let mut lex = WordLexicon::new();
        lex.set("a".into(), "x".into(), 0.25);
        lex.set("a".into(), "y".into(), 0.75);
        let again = WordLexicon::parse(&lex.to_text()).unwrap();
        assert_eq!(again, lex);
        assert!(again.is_normalized(1e-9));
    }
}
