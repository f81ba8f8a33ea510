//! Multitrees: construction from derivations, s-expression form, and
//! linearization of their yields.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dspan::Pav;
use crate::error::{Error, Result};
use crate::grammar::{parse_link, Label, Rule, Sym};
use crate::logic::Term;
use crate::semiring::DerivNode;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multitree {
    /// A preterminal: labels active in exactly one dimension, over one token.
    Leaf {
        labels: Vec<Label>,
        dim: usize,
        token: Sym,
    },
    /// A nonterminating production instance with exactly two children.
    Node {
        labels: Vec<Label>,
        pav: Pav,
        children: Vec<Multitree>,
    },
}

fn show(labels: &[Label]) -> String {
    labels
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl Multitree {
    pub fn labels(&self) -> &[Label] {
        match self {
            Multitree::Leaf { labels, .. } | Multitree::Node { labels, .. } => labels,
        }
    }

    pub fn dims(&self) -> usize {
        self.labels().len()
    }

    fn leaf_of_rule(rule: &Rule, dims: usize) -> Result<Multitree> {
        match rule {
            Rule::Terminating { dim, terminal, .. } => Ok(Multitree::Leaf {
                labels: rule.lhs_link(dims),
                dim: *dim,
                token: terminal.clone(),
            }),
            other => Err(Error::Tree(format!(
                "expected a terminating production, found {other}"
            ))),
        }
    }

    /// Reads the multitree encoded by a derivation from Logic C or CT.
    pub fn from_derivation(d: &DerivNode) -> Result<Multitree> {
        let Term::Item(item) = d.term.as_ref() else {
            return Err(Error::Tree(format!(
                "derivation root {} is not an item",
                d.term
            )));
        };
        let dims = item.labels.len();
        let rule_of = |n: &DerivNode| -> Result<Arc<Rule>> {
            match n.term.as_ref() {
                Term::Rule(r) => Ok(r.clone()),
                other => Err(Error::Tree(format!(
                    "expected a grammar term, found {other}"
                ))),
            }
        };
        match d.children.len() {
            // Load or Scan
            1 | 2 => {
                let rule = rule_of(d.children.last().expect("nonempty"))?;
                Self::leaf_of_rule(&rule, dims)
            }
            // Compose or LoadCompose
            3 => {
                let rule = rule_of(&d.children[2])?;
                let Rule::Nonterminating { pav, .. } = rule.as_ref() else {
                    return Err(Error::Tree(format!(
                        "expected a nonterminating production, found {rule}"
                    )));
                };
                let child = |n: &DerivNode| match n.term.as_ref() {
                    Term::Rule(r) => Self::leaf_of_rule(r, dims),
                    _ => Self::from_derivation(n),
                };
                Ok(Multitree::Node {
                    labels: item.labels.clone(),
                    pav: pav.clone(),
                    children: vec![child(&d.children[0])?, child(&d.children[1])?],
                })
            }
            n => Err(Error::Tree(format!("item derived from {n} antecedents"))),
        }
    }

    /// Token segments of the yield in `dim`, in order.
    pub fn segments(&self, dim: usize) -> Result<Vec<Vec<Sym>>> {
        match self {
            Multitree::Leaf { dim: d, token, .. } => Ok(if *d == dim {
                vec![vec![token.clone()]]
            } else {
                Vec::new()
            }),
            Multitree::Node { pav, children, .. } => {
                let array = &pav.arrays()[dim];
                let mut parts: Vec<std::vec::IntoIter<Vec<Sym>>> = Vec::with_capacity(2);
                for (k, c) in children.iter().enumerate() {
                    let segs = c.segments(dim)?;
                    if segs.len() != array.count_of(k as u8 + 1) {
                        return Err(Error::Tree(format!(
                            "child {} has {} segments in dimension {} but the array {array} expects {}",
                            k + 1,
                            segs.len(),
                            dim + 1,
                            array.count_of(k as u8 + 1)
                        )));
                    }
                    parts.push(segs.into_iter());
                }
                let mut out = Vec::with_capacity(array.fan_out());
                for run in array.segments() {
                    let mut seg = Vec::new();
                    for &i in run {
                        seg.extend(
                            parts[i as usize - 1]
                                .next()
                                .expect("segment counts checked"),
                        );
                    }
                    out.push(seg);
                }
                Ok(out)
            }
        }
    }

    /// The yield in `dim`; an error if it is not contiguous.
    pub fn linearize(&self, dim: usize) -> Result<Vec<Sym>> {
        let mut segs = self.segments(dim)?;
        match segs.len() {
            0 => Ok(Vec::new()),
            1 => Ok(segs.pop().unwrap()),
            _ => Err(Error::NonContiguousOutput(dim + 1)),
        }
    }

    /// Nodes in preorder.
    pub fn nodes(&self) -> Vec<&Multitree> {
        let mut out = vec![self];
        if let Multitree::Node { children, .. } = self {
            for c in children {
                out.extend(c.nodes());
            }
        }
        out
    }

    /// The productions used, one per node.
    pub fn productions(&self) -> Vec<Rule> {
        self.nodes()
            .into_iter()
            .map(|n| match n {
                Multitree::Leaf { labels, dim, token } => Rule::Terminating {
                    dim: *dim,
                    lhs: labels[*dim].clone(),
                    terminal: token.clone(),
                },
                Multitree::Node {
                    labels,
                    pav,
                    children,
                } => Rule::Nonterminating {
                    lhs: labels.clone(),
                    pav: pav.clone(),
                    y: children[0].labels().to_vec(),
                    z: children[1].labels().to_vec(),
                },
            })
            .collect()
    }

    /// Checks arity, dimensionality, activity propagation and normal form.
    pub fn validate(&self) -> Result<()> {
        let dims = self.dims();
        for n in self.nodes() {
            if n.dims() != dims {
                return Err(Error::Tree("nodes disagree on dimensionality".into()));
            }
            match n {
                Multitree::Leaf { labels, dim, .. } => {
                    if *dim >= dims
                        || labels
                            .iter()
                            .enumerate()
                            .any(|(d, l)| l.is_active() != (d == *dim))
                    {
                        return Err(Error::Tree(format!(
                            "leaf labels {} are not active in exactly dimension {}",
                            show(labels),
                            dim + 1
                        )));
                    }
                }
                Multitree::Node {
                    labels,
                    pav,
                    children,
                } => {
                    if children.len() != 2 {
                        return Err(Error::Tree(format!(
                            "node with {} children",
                            children.len()
                        )));
                    }
                    crate::grammar::canonical_nonterminating(
                        labels.clone(),
                        pav.clone(),
                        children[0].labels().to_vec(),
                        children[1].labels().to_vec(),
                    )
                    .map_err(Error::Tree)?;
                    if !pav.is_normal() {
                        return Err(Error::Tree(format!(
                            "precedence array vector {pav} is not in normal form"
                        )));
                    }
                }
            }
        }
        for d in 0..dims {
            self.segments(d)?;
        }
        Ok(())
    }

    /// Restriction to one dimension with unary chains collapsed, keeping
    /// the topmost label. `None` if the tree is inactive in `dim`.
    pub fn project(&self, dim: usize) -> Option<Multitree> {
        match self {
            Multitree::Leaf {
                labels,
                dim: d,
                token,
            } => (*d == dim).then(|| Multitree::Leaf {
                labels: vec![labels[dim].clone()],
                dim: 0,
                token: token.clone(),
            }),
            Multitree::Node {
                labels,
                pav,
                children,
            } => {
                let kids: Vec<Option<Multitree>> =
                    children.iter().map(|c| c.project(dim)).collect();
                match (&kids[0], &kids[1]) {
                    (None, None) => None,
                    (Some(_), None) | (None, Some(_)) => {
                        let only = kids.into_iter().flatten().next().unwrap();
                        Some(relabel(only, labels[dim].clone()))
                    }
                    (Some(_), Some(_)) => {
                        let array = pav.arrays()[dim].clone();
                        let mut kids: Vec<Multitree> = kids.into_iter().flatten().collect();
                        // keep the projected array in normal form
                        let array = if array.indexes().next() == Some(2) {
                            kids.swap(0, 1);
                            array.remap(|i| 3 - i)
                        } else {
                            array
                        };
                        Some(Multitree::Node {
                            labels: vec![labels[dim].clone()],
                            pav: Pav(vec![array]),
                            children: kids,
                        })
                    }
                }
            }
        }
    }
}

fn relabel(tree: Multitree, label: Label) -> Multitree {
    match tree {
        Multitree::Leaf { dim, token, .. } => Multitree::Leaf {
            labels: vec![label],
            dim,
            token,
        },
        Multitree::Node { pav, children, .. } => Multitree::Node {
            labels: vec![label],
            pav,
            children,
        },
    }
}

impl fmt::Display for Multitree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multitree::Leaf { labels, dim, token } => {
                write!(f, "({} ({}:{token}))", show(labels), dim + 1)
            }
            Multitree::Node {
                labels,
                pav,
                children,
            } => {
                write!(f, "({}|{pav}", show(labels))?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(s: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(b) = start.take() {
                out.push(Tok::Atom(&s[b..i]));
            }
            match c {
                '(' => out.push(Tok::Open),
                ')' => out.push(Tok::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(b) = start {
        out.push(Tok::Atom(&s[b..]));
    }
    out
}

fn parse_tree(toks: &[Tok], pos: &mut usize) -> Result<Multitree> {
    let err = |m: &str| Error::Tree(m.to_string());
    if toks.get(*pos) != Some(&Tok::Open) {
        return Err(err("expected `(`"));
    }
    *pos += 1;
    let Some(Tok::Atom(head)) = toks.get(*pos) else {
        return Err(err("expected a node label"));
    };
    *pos += 1;
    let tree = if let Some(split) = head.find("|[") {
        let labels = parse_link(&head[..split]).map_err(Error::Tree)?;
        let pav: Pav = head[split + 1..].parse()?;
        let mut children = Vec::new();
        while toks.get(*pos) == Some(&Tok::Open) {
            children.push(parse_tree(toks, pos)?);
        }
        Multitree::Node {
            labels,
            pav,
            children,
        }
    } else {
        let labels = parse_link(head).map_err(Error::Tree)?;
        if toks.get(*pos) != Some(&Tok::Open) {
            return Err(err("expected `(dim:token)`"));
        }
        let Some(Tok::Atom(leaf)) = toks.get(*pos + 1) else {
            return Err(err("expected `dim:token`"));
        };
        if toks.get(*pos + 2) != Some(&Tok::Close) {
            return Err(err("expected `)` after leaf token"));
        }
        *pos += 3;
        let (d, token) = leaf
            .split_once(':')
            .ok_or_else(|| err("leaf token needs `dim:`"))?;
        let dim: usize = d
            .parse()
            .ok()
            .filter(|&d| d >= 1)
            .ok_or_else(|| err("bad leaf dimension"))?;
        if token.is_empty() {
            return Err(err("empty leaf token"));
        }
        Multitree::Leaf {
            labels,
            dim: dim - 1,
            token: token.into(),
        }
    };
    if toks.get(*pos) != Some(&Tok::Close) {
        return Err(err("expected `)`"));
    }
    *pos += 1;
    Ok(tree)
}

impl FromStr for Multitree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks = lex(s);
        let mut pos = 0;
        let tree = parse_tree(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Tree("trailing input after multitree".into()));
        }
        tree.validate()?;
        Ok(tree)
    }
}

/// One multitree per line; blank lines and `#` comments are skipped.
pub fn parse_treebank(text: &str) -> Result<Vec<Multitree>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| {
            l.parse()
                .map_err(|e: Error| crate::error::parse_err(k + 1, e.to_string()))
        })
        .collect()
}

pub fn treebank_to_text(trees: &[Multitree]) -> String {
    trees.iter().map(|t| format!("{t}\n")).collect()
}
