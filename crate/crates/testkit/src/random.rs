//! Random GCNF grammars in a representation of their own, rendered to the
//! text format for loading into the parser.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

/// A nonterminal index per dimension; `None` for an inactive dimension.
pub type Link = Vec<Option<u8>>;

/// Per dimension, the output segments of a precedence array, each a
/// sequence of child indexes 1 or 2. Empty for an inactive dimension.
pub type Arrays = Vec<Vec<Vec<u8>>>;

#[derive(Debug, Clone, PartialEq)]
pub enum RRule {
    Term {
        dim: usize,
        lhs: u8,
        tok: String,
    },
    Bin {
        lhs: Link,
        arrays: Arrays,
        y: Link,
        z: Link,
    },
}

#[derive(Debug, Clone)]
pub struct RGrammar {
    pub dims: usize,
    pub names: Vec<String>,
    pub start: Link,
    pub rules: Vec<(RRule, f64)>,
}

#[derive(Debug, Clone)]
pub struct Spec {
    pub dims: usize,
    pub nonterminals: usize,
    pub max_fan_out: usize,
    pub binary_rules: usize,
    pub vocab: usize,
}

impl Default for Spec {
    fn default() -> Self {
        Spec {
            dims: 2,
            nonterminals: 3,
            max_fan_out: 2,
            binary_rules: 8,
            vocab: 2,
        }
    }
}

impl RRule {
    pub fn lhs_link(&self, dims: usize) -> Link {
        match self {
            RRule::Term { dim, lhs, .. } => {
                (0..dims).map(|d| (d == *dim).then_some(*lhs)).collect()
            }
            RRule::Bin { lhs, .. } => lhs.clone(),
        }
    }

    fn swapped(&self) -> RRule {
        match self {
            RRule::Bin { lhs, arrays, y, z } => RRule::Bin {
                lhs: lhs.clone(),
                arrays: arrays
                    .iter()
                    .map(|a| {
                        a.iter()
                            .map(|s| s.iter().map(|&i| 3 - i).collect())
                            .collect()
                    })
                    .collect(),
                y: z.clone(),
                z: y.clone(),
            },
            t => t.clone(),
        }
    }
}

fn show_link(names: &[String], link: &Link) -> String {
    link.iter()
        .map(|l| l.map_or("_".to_string(), |n| names[n as usize].clone()))
        .collect::<Vec<_>>()
        .join(",")
}

fn show_arrays(arrays: &Arrays) -> String {
    arrays
        .iter()
        .map(|segs| {
            segs.iter()
                .map(|s| s.iter().map(u8::to_string).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join(";")
        })
        .collect::<Vec<_>>()
        .join("|")
}

impl RGrammar {
    pub fn show_rule(&self, r: &RRule) -> String {
        match r {
            RRule::Term { dim, lhs, tok } => {
                format!("T d={} {} -> {tok}", dim + 1, self.names[*lhs as usize])
            }
            RRule::Bin { lhs, arrays, y, z } => format!(
                "P {} -> [{}] ({})({})",
                show_link(&self.names, lhs),
                show_arrays(arrays),
                show_link(&self.names, y),
                show_link(&self.names, z)
            ),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "gmtg D={} start={}\n",
            self.dims,
            show_link(&self.names, &self.start)
        );
        for (r, w) in &self.rules {
            out.push_str(&format!("{} @ {w}\n", self.show_rule(r)));
        }
        out
    }

    /// Scales weights to sum to one per LHS link.
    pub fn normalize(&mut self) {
        let mut totals: BTreeMap<Link, f64> = BTreeMap::new();
        for (r, w) in &self.rules {
            *totals.entry(r.lhs_link(self.dims)).or_default() += w;
        }
        for (r, w) in &mut self.rules {
            *w /= totals[&r.lhs_link(self.dims)];
        }
    }

    pub fn vocab(&self, dim: usize) -> Vec<String> {
        let mut v: Vec<String> = self
            .rules
            .iter()
            .filter_map(|(r, _)| match r {
                RRule::Term { dim: d, tok, .. } if *d == dim => Some(tok.clone()),
                _ => None,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Adds a rule unless it, or its mirror image with the children
    /// exchanged, is already present.
    pub fn push_unique(&mut self, rule: RRule, w: f64) -> bool {
        let mirror = rule.swapped();
        if self.rules.iter().any(|(r, _)| *r == rule || *r == mirror) {
            return false;
        }
        self.rules.push((rule, w));
        true
    }
}

fn random_link<R: Rng>(rng: &mut R, dims: usize, nts: usize) -> Link {
    loop {
        let link: Link = (0..dims)
            .map(|_| rng.gen_bool(0.8).then(|| rng.gen_range(0..nts) as u8))
            .collect();
        if link.iter().any(Option::is_some) {
            return link;
        }
    }
}

/// A random arrangement of `c1` ones and `c2` twos into at most `f`
/// segments with no index repeated inside a segment.
fn random_array<R: Rng>(rng: &mut R, c1: usize, c2: usize, f: usize) -> Option<Vec<Vec<u8>>> {
    for _ in 0..20 {
        let mut seq: Vec<u8> = std::iter::repeat_n(1, c1)
            .chain(std::iter::repeat_n(2, c2))
            .collect();
        seq.shuffle(rng);
        let mut segs: Vec<Vec<u8>> = vec![vec![seq[0]]];
        for &i in &seq[1..] {
            let last = *segs.last().unwrap().last().unwrap();
            if last == i || rng.gen_bool(0.3) {
                segs.push(vec![i]);
            } else {
                segs.last_mut().unwrap().push(i);
            }
        }
        if segs.len() <= f {
            return Some(segs);
        }
    }
    None
}

fn random_binary<R: Rng>(rng: &mut R, spec: &Spec) -> Option<RRule> {
    let lhs = random_link(rng, spec.dims, spec.nonterminals);
    let mut y: Link = vec![None; spec.dims];
    let mut z: Link = vec![None; spec.dims];
    let mut arrays: Arrays = vec![Vec::new(); spec.dims];
    for d in 0..spec.dims {
        if lhs[d].is_none() {
            continue;
        }
        let (ya, za) = match rng.gen_range(0..4) {
            0 => (true, false),
            1 => (false, true),
            _ => (true, true),
        };
        let nt = |rng: &mut R| Some(rng.gen_range(0..spec.nonterminals) as u8);
        if ya {
            y[d] = nt(rng);
        }
        if za {
            z[d] = nt(rng);
        }
        let c = |rng: &mut R, active: bool| {
            if active {
                rng.gen_range(1..=spec.max_fan_out)
            } else {
                0
            }
        };
        let (c1, c2) = (c(rng, ya), c(rng, za));
        arrays[d] = random_array(rng, c1, c2, spec.max_fan_out)?;
    }
    let active = |l: &Link| l.iter().any(Option::is_some);
    (active(&y) && active(&z)).then_some(RRule::Bin { lhs, arrays, y, z })
}

/// A grammar whose start link is active in every dimension, with random
/// nonterminating rules and a terminating rule for most (nonterminal,
/// dimension, token) triples.
pub fn random_grammar<R: Rng>(rng: &mut R, spec: &Spec) -> RGrammar {
    let names: Vec<String> = ["S", "A", "B", "C", "D"]
        .iter()
        .take(spec.nonterminals)
        .map(|s| s.to_string())
        .collect();
    let mut g = RGrammar {
        dims: spec.dims,
        names,
        start: vec![Some(0); spec.dims],
        rules: Vec::new(),
    };
    for dim in 0..spec.dims {
        for lhs in 0..spec.nonterminals as u8 {
            for t in 0..spec.vocab {
                if rng.gen_bool(0.7) {
                    let tok = format!("{}{}", (b'a' + t as u8) as char, dim + 1);
                    g.push_unique(RRule::Term { dim, lhs, tok }, rng.gen_range(0.1..1.0));
                }
            }
        }
    }
    let mut added = 0;
    let mut tries = 0;
    while added < spec.binary_rules && tries < 1000 {
        tries += 1;
        if let Some(r) = random_binary(rng, spec) {
            if g.push_unique(r, rng.gen_range(0.1..1.0)) {
                added += 1;
            }
        }
    }
    g
}

/// Between 1 and `max_len` tokens per dimension drawn from the grammar's
/// terminals.
pub fn random_input<R: Rng>(rng: &mut R, g: &RGrammar, max_len: usize) -> Vec<Vec<String>> {
    (0..g.dims)
        .map(|d| {
            let vocab = g.vocab(d);
            let n = rng.gen_range(1..=max_len);
            (0..n)
                .map(|_| vocab.choose(rng).cloned().unwrap_or_else(|| "a".into()))
                .collect()
        })
        .collect()
}
