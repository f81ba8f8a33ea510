//! Generalized multitext grammars in GCNF and the grammar-evaluator
//! contract consulted by the parsing logics.

pub mod alignment;
pub mod induce;
pub mod lexicon;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dspan::{normalize_pav, Pav, PrecedenceArray};
use crate::error::{parse_err, Error, Result};

pub use alignment::{mu, AlignmentEvaluator};
pub use lexicon::{LexiconGrammar, WordLexicon};

pub type Sym = Arc<str>;

/// The dummy nonterminal used in unstructured dimensions.
pub const LAMBDA: &str = "λ";

/// A nonterminal label in one dimension: a symbol with an optional lexical
/// head, or the inactive label ∅.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Label {
    pub sym: Option<Sym>,
    pub head: Option<Sym>,
}

impl Label {
    pub fn inactive() -> Self {
        Label::default()
    }

    pub fn new(sym: &str) -> Self {
        Label {
            sym: Some(sym.into()),
            head: None,
        }
    }

    pub fn headed(sym: &str, head: &str) -> Self {
        Label {
            sym: Some(sym.into()),
            head: Some(head.into()),
        }
    }

    pub fn lambda(head: Option<Sym>) -> Self {
        Label {
            sym: Some(LAMBDA.into()),
            head,
        }
    }

    pub fn is_active(&self) -> bool {
        self.sym.is_some()
    }

    pub fn is_lambda(&self) -> bool {
        self.sym.as_deref() == Some(LAMBDA)
    }

    pub fn without_head(&self) -> Label {
        Label {
            sym: self.sym.clone(),
            head: None,
        }
    }

    pub fn with_head(&self, head: Option<Sym>) -> Label {
        Label {
            sym: self.sym.clone(),
            head,
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Symbols sort alphabetically; ∅ sorts after every symbol.
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.sym, &other.sym) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(b).then_with(|| self.head.cmp(&other.head)),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.sym, &self.head) {
            (None, _) => f.write_str("_"),
            (Some(s), None) => f.write_str(s),
            (Some(s), Some(h)) => write!(f, "{s}[{h}]"),
        }
    }
}

fn valid_symbol(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || "[](),|@".contains(c))
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "_" {
            return Ok(Label::inactive());
        }
        let (sym, head) = match s.split_once('[') {
            Some((sym, rest)) => {
                let head = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("malformed label `{s}`"))?;
                if head.is_empty() || head.contains(|c: char| c.is_whitespace() || "[]".contains(c))
                {
                    return Err(format!("malformed head in label `{s}`"));
                }
                (sym, Some(Sym::from(head)))
            }
            None => (s, None),
        };
        if !valid_symbol(sym) || sym == "_" {
            return Err(format!("malformed label `{s}`"));
        }
        Ok(Label {
            sym: Some(sym.into()),
            head,
        })
    }
}

/// Displays a label vector as `A/B/_`.
pub fn show_labels(labels: &[Label]) -> String {
    labels
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn parse_link(s: &str) -> std::result::Result<Vec<Label>, String> {
    s.split(',').map(str::parse).collect()
}

fn show_link(labels: &[Label]) -> String {
    labels
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn strip_heads(labels: &[Label]) -> Vec<Label> {
    labels.iter().map(Label::without_head).collect()
}

/// A production rule. Terminating rules are active in one dimension;
/// nonterminating rules have two nonterminal links; lexical rules are the
/// degenerate word-alignment productions rewriting the start link into one
/// terminal (or nothing) per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Terminating {
        dim: usize,
        lhs: Label,
        terminal: Sym,
    },
    Nonterminating {
        lhs: Vec<Label>,
        pav: Pav,
        y: Vec<Label>,
        z: Vec<Label>,
    },
    Lexical {
        tokens: Vec<Option<Sym>>,
    },
}

impl Rule {
    /// The LHS link, with ∅ in every inactive dimension.
    pub fn lhs_link(&self, dims: usize) -> Vec<Label> {
        match self {
            Rule::Terminating { dim, lhs, .. } => {
                let mut v = vec![Label::inactive(); dims];
                v[*dim] = lhs.clone();
                v
            }
            Rule::Nonterminating { lhs, .. } => lhs.clone(),
            Rule::Lexical { tokens } => tokens
                .iter()
                .map(|t| {
                    if t.is_some() {
                        Label::new("S")
                    } else {
                        Label::inactive()
                    }
                })
                .collect(),
        }
    }

    pub fn is_terminating(&self) -> bool {
        matches!(self, Rule::Terminating { .. })
    }

    pub fn is_nonterminating(&self) -> bool {
        matches!(self, Rule::Nonterminating { .. })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Terminating { dim, lhs, terminal } => {
                write!(f, "T d={} {lhs} -> {terminal}", dim + 1)
            }
            Rule::Nonterminating { lhs, pav, y, z } => {
                write!(
                    f,
                    "P {} -> {pav} ({})({})",
                    show_link(lhs),
                    show_link(y),
                    show_link(z)
                )
            }
            Rule::Lexical { tokens } => {
                let toks: Vec<&str> = tokens.iter().map(|t| t.as_deref().unwrap_or("-")).collect();
                write!(f, "L {}", toks.join(" "))
            }
        }
    }
}

/// Checks a nonterminating rule against GCNF and puts its PAV in normal
/// form, swapping the two links when needed.
pub fn canonical_nonterminating(
    lhs: Vec<Label>,
    pav: Pav,
    y: Vec<Label>,
    z: Vec<Label>,
) -> std::result::Result<Rule, String> {
    let dims = lhs.len();
    if y.len() != dims || z.len() != dims || pav.dims() != dims {
        return Err(format!(
            "dimension mismatch: lhs {}, pav {}, links {}/{}",
            dims,
            pav.dims(),
            y.len(),
            z.len()
        ));
    }
    for d in 0..dims {
        let array = &pav.arrays()[d];
        if array.indexes().any(|i| i == 0 || i > 2) {
            return Err(format!(
                "precedence array {array} uses an index other than 1 or 2"
            ));
        }
        let (ya, za, xa) = (y[d].is_active(), z[d].is_active(), lhs[d].is_active());
        if xa != (ya || za) {
            return Err(format!(
                "dimension {}: LHS is {} but RHS links are {}",
                d + 1,
                activity(xa),
                activity(ya || za)
            ));
        }
        if array.is_inactive() == xa {
            return Err(format!(
                "dimension {}: precedence array {array} does not match LHS activity",
                d + 1
            ));
        }
        if (array.count_of(1) > 0) != ya || (array.count_of(2) > 0) != za {
            return Err(format!("dimension {}: precedence array {array} references an inactive link or omits an active one", d + 1));
        }
        if array
            .segments()
            .iter()
            .any(|s| s.windows(2).any(|w| w[0] == w[1]))
        {
            return Err(format!(
                "dimension {}: precedence array {array} repeats an index without a gap",
                d + 1
            ));
        }
        for l in [&lhs[d], &y[d], &z[d]] {
            if !l.is_active() && l.head.is_some() {
                return Err("inactive label carries a head".into());
            }
        }
    }
    let links: Vec<Vec<Option<Label>>> = [&y, &z]
        .iter()
        .map(|link| {
            link.iter()
                .map(|l| l.is_active().then(|| l.clone()))
                .collect()
        })
        .collect();
    let (pav, links) = normalize_pav(&pav, &links);
    let unlink = |col: &Vec<Option<Label>>| {
        col.iter()
            .map(|l| l.clone().unwrap_or_default())
            .collect::<Vec<_>>()
    };
    Ok(Rule::Nonterminating {
        lhs,
        pav,
        y: unlink(&links[0]),
        z: unlink(&links[1]),
    })
}

fn activity(active: bool) -> &'static str {
    if active {
        "active"
    } else {
        "inactive"
    }
}

/// Which position of a nonterminating rule a label vector fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Lhs,
    First,
    Second,
}

/// Which items may pair with a given item in a composition.
#[derive(Debug, Clone)]
pub enum Partners {
    Any,
    Keys(Vec<Vec<Label>>),
}

/// The interface through which logics obtain grammar terms and their
/// values.
pub trait GrammarEvaluator: Send + Sync {
    fn dims(&self) -> usize;

    /// The start link. A label without a head matches any head.
    fn start(&self) -> &[Label];

    /// Grammar terms loaded as axioms at initialization.
    fn static_rules(&self) -> Vec<(Arc<Rule>, f64)>;

    /// Terminating rules rewriting to `token` in `dim`.
    fn terminating_for(&self, dim: usize, token: &str) -> Vec<(Arc<Rule>, f64)>;

    /// All terminating rules active in `dim`.
    fn terminating_in_dim(&self, dim: usize) -> Vec<(Arc<Rule>, f64)>;

    /// Terminating rules in `dim` with the given LHS label.
    fn terminating_with_lhs(&self, dim: usize, lhs: &Label) -> Vec<(Arc<Rule>, f64)>;

    /// Items that can be the other child when an item with `labels` fills
    /// `role` (First or Second).
    fn partners(&self, labels: &[Label], role: Role) -> Partners;

    /// Key under which items are indexed for partner lookup.
    fn index_key(&self, labels: &[Label]) -> Vec<Label> {
        labels.to_vec()
    }

    /// Nonterminating rules with links `y` and `z` whose PAV agrees with
    /// `pav_prefix` on its leading dimensions.
    fn nonterminating(
        &self,
        y: &[Label],
        z: &[Label],
        pav_prefix: &[PrecedenceArray],
    ) -> Vec<(Arc<Rule>, f64)>;

    /// Nonterminating rules with `labels` in the given role.
    fn nonterminating_by(&self, role: Role, labels: &[Label]) -> Vec<(Arc<Rule>, f64)>;

    /// Lexical rules whose token in `dim` is `token`.
    fn lexical_for(&self, _dim: usize, _token: &str) -> Vec<(Arc<Rule>, f64)> {
        Vec::new()
    }

    /// Value of a rule, 0 if the grammar does not contain it.
    fn weight(&self, rule: &Rule) -> f64;

    /// Whether item labels may carry lexical heads.
    fn lexicalized(&self) -> bool {
        false
    }
}

/// Whether an item label vector matches a start link: symbols must agree,
/// and heads must agree where the start link gives one.
pub fn matches_start(start: &[Label], labels: &[Label]) -> bool {
    start.len() == labels.len()
        && start
            .iter()
            .zip(labels)
            .all(|(s, l)| s.sym == l.sym && (s.head.is_none() || s.head == l.head))
}

/// A weighted GMTG in GCNF.
#[derive(Debug, Clone)]
pub struct Gmtg {
    dims: usize,
    start: Vec<Label>,
    rules: Vec<(Arc<Rule>, f64)>,
    index: HashMap<Arc<Rule>, usize>,
    by_token: HashMap<(usize, Sym), Vec<usize>>,
    by_term_lhs: HashMap<(usize, Label), Vec<usize>>,
    by_dim: Vec<Vec<usize>>,
    by_children: HashMap<(Vec<Label>, Vec<Label>), Vec<usize>>,
    by_y: HashMap<Vec<Label>, Vec<usize>>,
    by_z: HashMap<Vec<Label>, Vec<usize>>,
    by_lhs: HashMap<Vec<Label>, Vec<usize>>,
    second_for_first: HashMap<Vec<Label>, Vec<Vec<Label>>>,
    first_for_second: HashMap<Vec<Label>, Vec<Vec<Label>>>,
    lexicalized: bool,
}

impl PartialEq for Gmtg {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.start == other.start && self.rules == other.rules
    }
}

impl Gmtg {
    /// Builds a grammar, validating every rule, normalizing PAVs and merging
    /// duplicate rules by adding their weights.
    pub fn new(
        dims: usize,
        start: Vec<Label>,
        rules: impl IntoIterator<Item = (Rule, f64)>,
    ) -> Result<Self> {
        if start.len() != dims {
            return Err(Error::Production(format!(
                "start link has {} labels for {} dimensions",
                start.len(),
                dims
            )));
        }
        let mut merged: BTreeMap<Rule, f64> = BTreeMap::new();
        for (rule, w) in rules {
            let rule = Self::check(dims, rule).map_err(Error::Production)?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Production(format!(
                    "weight {w} of `{rule}` is not a non-negative number"
                )));
            }
            *merged.entry(rule).or_insert(0.0) += w;
        }
        Ok(Self::from_sorted(
            dims,
            start,
            merged.into_iter().map(|(r, w)| (Arc::new(r), w)).collect(),
        ))
    }

    fn check(dims: usize, rule: Rule) -> std::result::Result<Rule, String> {
        match rule {
            Rule::Terminating { dim, lhs, terminal } => {
                if dim >= dims {
                    return Err(format!(
                        "terminating rule in dimension {} of a {dims}-dimensional grammar",
                        dim + 1
                    ));
                }
                if !lhs.is_active() {
                    return Err("terminating rule with an inactive LHS".into());
                }
                if terminal.is_empty() {
                    return Err("terminating rule with an empty terminal".into());
                }
                Ok(Rule::Terminating { dim, lhs, terminal })
            }
            Rule::Nonterminating { lhs, pav, y, z } => {
                if lhs.len() != dims {
                    return Err(format!(
                        "LHS link has {} labels for {dims} dimensions",
                        lhs.len()
                    ));
                }
                canonical_nonterminating(lhs, pav, y, z)
            }
            Rule::Lexical { .. } => {
                Err("lexical rules belong to a translation lexicon, not a GMTG".into())
            }
        }
    }

    fn from_sorted(dims: usize, start: Vec<Label>, rules: Vec<(Arc<Rule>, f64)>) -> Self {
        let mut g = Gmtg {
            dims,
            start,
            rules,
            index: HashMap::new(),
            by_token: HashMap::new(),
            by_term_lhs: HashMap::new(),
            by_dim: vec![Vec::new(); dims],
            by_children: HashMap::new(),
            by_y: HashMap::new(),
            by_z: HashMap::new(),
            by_lhs: HashMap::new(),
            second_for_first: HashMap::new(),
            first_for_second: HashMap::new(),
            lexicalized: false,
        };
        for (k, (rule, _)) in g.rules.iter().enumerate() {
            g.index.insert(rule.clone(), k);
            match rule.as_ref() {
                Rule::Terminating { dim, lhs, terminal } => {
                    g.by_token
                        .entry((*dim, terminal.clone()))
                        .or_default()
                        .push(k);
                    g.by_term_lhs
                        .entry((*dim, lhs.clone()))
                        .or_default()
                        .push(k);
                    g.by_dim[*dim].push(k);
                }
                Rule::Nonterminating { lhs, y, z, .. } => {
                    g.by_children
                        .entry((y.clone(), z.clone()))
                        .or_default()
                        .push(k);
                    g.by_y.entry(y.clone()).or_default().push(k);
                    g.by_z.entry(z.clone()).or_default().push(k);
                    g.by_lhs.entry(lhs.clone()).or_default().push(k);
                    let zs = g.second_for_first.entry(y.clone()).or_default();
                    if !zs.contains(z) {
                        zs.push(z.clone());
                    }
                    let ys = g.first_for_second.entry(z.clone()).or_default();
                    if !ys.contains(y) {
                        ys.push(y.clone());
                    }
                }
                Rule::Lexical { .. } => unreachable!("rejected by check"),
            }
        }
        g.lexicalized = g
            .rules
            .iter()
            .any(|(r, _)| r.lhs_link(dims).iter().any(|l| l.head.is_some()));
        g
    }

    pub fn rules(&self) -> &[(Arc<Rule>, f64)] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Maximum PAV fan-out over the nonterminating rules; 0 if there are none.
    pub fn fan_out(&self) -> usize {
        self.rules
            .iter()
            .filter_map(|(r, _)| match r.as_ref() {
                Rule::Nonterminating { pav, .. } => Some(pav.fan_out()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Distinct nonterminal symbols across all dimensions.
    pub fn nonterminals(&self) -> Vec<Label> {
        let mut out: Vec<Label> = Vec::new();
        for (r, _) in &self.rules {
            for l in r.lhs_link(self.dims) {
                if l.is_active() && !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_lexicalized(&self) -> bool {
        self.lexicalized
    }

    /// Total weight per LHS link.
    pub fn lhs_totals(&self) -> BTreeMap<Vec<Label>, f64> {
        let mut totals = BTreeMap::new();
        for (r, w) in &self.rules {
            *totals.entry(r.lhs_link(self.dims)).or_insert(0.0) += w;
        }
        totals
    }

    /// Whether every LHS link's weights sum to 1 within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.lhs_totals().values().all(|t| (t - 1.0).abs() <= tol)
    }

    /// Same rules with weights rescaled to sum to 1 per LHS link. Links
    /// whose weights sum to 0 keep zero weights.
    pub fn normalized(&self) -> Gmtg {
        let totals = self.lhs_totals();
        let rules = self
            .rules
            .iter()
            .map(|(r, w)| {
                let t = totals[&r.lhs_link(self.dims)];
                (r.clone(), if t > 0.0 { w / t } else { 0.0 })
            })
            .collect();
        Self::from_sorted(self.dims, self.start.clone(), rules)
    }

    /// Same rules with new weights, looked up by rule.
    pub fn reweighted(&self, weight: impl Fn(&Rule) -> f64) -> Gmtg {
        let rules = self
            .rules
            .iter()
            .map(|(r, _)| (r.clone(), weight(r)))
            .collect();
        Self::from_sorted(self.dims, self.start.clone(), rules)
    }

    /// Parses the line-oriented grammar format.
    pub fn parse(text: &str) -> Result<Gmtg> {
        let mut header: Option<(usize, Vec<Label>)> = None;
        let mut rules = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| parse_err(line_no, m);
            if let Some(rest) = line.strip_prefix("gmtg") {
                if header.is_some() {
                    return Err(err("duplicate header".into()));
                }
                let mut dims = None;
                let mut start = None;
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("D=") {
                        dims = Some(
                            v.parse::<usize>()
                                .map_err(|_| err(format!("bad dimensionality `{v}`")))?,
                        );
                    } else if let Some(v) = field.strip_prefix("start=") {
                        start = Some(parse_link(v).map_err(err)?);
                    } else {
                        return Err(err(format!("unknown header field `{field}`")));
                    }
                }
                let dims = dims.ok_or_else(|| err("header lacks D=".into()))?;
                if dims == 0 {
                    return Err(err("dimensionality must be at least 1".into()));
                }
                let start = start.ok_or_else(|| err("header lacks start=".into()))?;
                if start.len() != dims {
                    return Err(err(format!(
                        "start link has {} labels for D={dims}",
                        start.len()
                    )));
                }
                header = Some((dims, start));
                continue;
            }
            let dims = header
                .as_ref()
                .ok_or_else(|| err("production before header".into()))?
                .0;
            let (body, weight) = match line.rsplit_once('@') {
                Some((b, w)) => (
                    b.trim(),
                    w.trim()
                        .parse::<f64>()
                        .map_err(|_| err(format!("bad weight `{}`", w.trim())))?,
                ),
                None => (line, 1.0),
            };
            let rule = if let Some(rest) = body.strip_prefix("T ") {
                Self::parse_terminating(rest).map_err(err)?
            } else if let Some(rest) = body.strip_prefix("P ") {
                Self::parse_nonterminating(rest).map_err(err)?
            } else {
                return Err(err(format!("unrecognized line `{line}`")));
            };
            let rule = Self::check(dims, rule).map_err(err)?;
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(err(format!("weight {weight} is not a non-negative number")));
            }
            rules.push((rule, weight));
        }
        let (dims, start) = header.ok_or_else(|| parse_err(0, "missing `gmtg` header"))?;
        Gmtg::new(dims, start, rules)
    }

    fn parse_terminating(rest: &str) -> std::result::Result<Rule, String> {
        let mut parts = rest.split_whitespace();
        let dim = parts
            .next()
            .and_then(|d| d.strip_prefix("d="))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&d| d >= 1)
            .ok_or("terminating rule needs d=<k> with k >= 1")?;
        let lhs: Label = parts.next().ok_or("missing LHS")?.parse()?;
        if parts.next() != Some("->") {
            return Err("expected `->`".into());
        }
        let terminal = parts.next().ok_or("missing terminal")?;
        if parts.next().is_some() {
            return Err("terminating rule has more than one terminal".into());
        }
        Ok(Rule::Terminating {
            dim: dim - 1,
            lhs,
            terminal: terminal.into(),
        })
    }

    fn parse_nonterminating(rest: &str) -> std::result::Result<Rule, String> {
        let (lhs, rhs) = rest.split_once("->").ok_or("expected `->`")?;
        let lhs = parse_link(lhs.trim())?;
        let rhs = rhs.trim();
        let close = rhs.find(']').ok_or("missing precedence array vector")?;
        let pav: Pav = rhs[..=close]
            .parse()
            .map_err(|e: crate::dspan::DSpanError| e.to_string())?;
        let links: String = rhs[close + 1..]
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let inner = links
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or("expected `(Y)(Z)` links")?;
        let (y, z) = inner.split_once(")(").ok_or("expected exactly two links")?;
        if z.contains('(') || z.contains(')') {
            return Err("expected exactly two links".into());
        }
        Ok(Rule::Nonterminating {
            lhs,
            pav,
            y: parse_link(y)?,
            z: parse_link(z)?,
        })
    }

    /// Serializes in the grammar format; rules in canonical order.
    pub fn to_text(&self) -> String {
        let mut out = format!("gmtg D={} start={}\n", self.dims, show_link(&self.start));
        for (r, w) in &self.rules {
            out.push_str(&format!("{r} @ {w}\n"));
        }
        out
    }
}

impl fmt::Display for Gmtg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Gmtg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Gmtg::parse(s)
    }
}

impl Gmtg {
    fn pick(&self, ids: Option<&Vec<usize>>) -> Vec<(Arc<Rule>, f64)> {
        ids.map(|ids| ids.iter().map(|&k| self.rules[k].clone()).collect())
            .unwrap_or_default()
    }
}

impl GrammarEvaluator for Gmtg {
    fn dims(&self) -> usize {
        self.dims
    }

    fn start(&self) -> &[Label] {
        &self.start
    }

    fn static_rules(&self) -> Vec<(Arc<Rule>, f64)> {
        self.rules.clone()
    }

    fn terminating_for(&self, dim: usize, token: &str) -> Vec<(Arc<Rule>, f64)> {
        self.pick(self.by_token.get(&(dim, Sym::from(token))))
    }

    fn terminating_in_dim(&self, dim: usize) -> Vec<(Arc<Rule>, f64)> {
        self.pick(self.by_dim.get(dim))
    }

    fn terminating_with_lhs(&self, dim: usize, lhs: &Label) -> Vec<(Arc<Rule>, f64)> {
        self.pick(self.by_term_lhs.get(&(dim, lhs.clone())))
    }

    fn partners(&self, labels: &[Label], role: Role) -> Partners {
        let map = match role {
            Role::First => &self.second_for_first,
            Role::Second => &self.first_for_second,
            Role::Lhs => return Partners::Keys(Vec::new()),
        };
        Partners::Keys(map.get(labels).cloned().unwrap_or_default())
    }

    fn nonterminating(
        &self,
        y: &[Label],
        z: &[Label],
        pav_prefix: &[PrecedenceArray],
    ) -> Vec<(Arc<Rule>, f64)> {
        let Some(ids) = self.by_children.get(&(y.to_vec(), z.to_vec())) else {
            return Vec::new();
        };
        ids.iter()
            .map(|&k| &self.rules[k])
            .filter(|(r, _)| match r.as_ref() {
                Rule::Nonterminating { pav, .. } => pav.arrays()[..pav_prefix.len()] == *pav_prefix,
                _ => false,
            })
            .cloned()
            .collect()
    }

    fn nonterminating_by(&self, role: Role, labels: &[Label]) -> Vec<(Arc<Rule>, f64)> {
        let map = match role {
            Role::Lhs => &self.by_lhs,
            Role::First => &self.by_y,
            Role::Second => &self.by_z,
        };
        self.pick(map.get(labels))
    }

    fn weight(&self, rule: &Rule) -> f64 {
        self.index.get(rule).map_or(0.0, |&k| self.rules[k].1)
    }

    fn lexicalized(&self) -> bool {
        self.lexicalized
    }
}
