//! Textbook inside-outside for a one-dimensional PCFG in Chomsky normal
//! form, over string nonterminals and dense CKY tables.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Pcfg {
    pub start: String,
    /// `A -> B C`
    pub binary: BTreeMap<(String, String, String), f64>,
    /// `A -> a`
    pub lexical: BTreeMap<(String, String), f64>,
}

impl Pcfg {
    pub fn to_text(&self) -> String {
        let mut out = format!("gmtg D=1 start={}\n", self.start);
        for ((a, b, c), w) in &self.binary {
            out.push_str(&format!("P {a} -> [1,2] ({b})({c}) @ {w}\n"));
        }
        for ((a, t), w) in &self.lexical {
            out.push_str(&format!("T d=1 {a} -> {t} @ {w}\n"));
        }
        out
    }

    /// Scales weights to sum to one per left-hand side.
    pub fn normalize(&mut self) {
        let mut totals: BTreeMap<String, f64> = BTreeMap::new();
        for ((a, _, _), w) in &self.binary {
            *totals.entry(a.clone()).or_default() += w;
        }
        for ((a, _), w) in &self.lexical {
            *totals.entry(a.clone()).or_default() += w;
        }
        for ((a, _, _), w) in self.binary.iter_mut() {
            *w /= totals[a];
        }
        for ((a, _), w) in self.lexical.iter_mut() {
            *w /= totals[a];
        }
    }

    /// Weights keyed `"A B C"` for binary and `"A a"` for lexical rules.
    pub fn weights(&self) -> BTreeMap<String, f64> {
        let binary = self
            .binary
            .iter()
            .map(|((a, b, c), w)| (format!("{a} {b} {c}"), *w));
        binary
            .chain(
                self.lexical
                    .iter()
                    .map(|((a, t), w)| (format!("{a} {t}"), *w)),
            )
            .collect()
    }

    fn nonterminals(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .binary
            .keys()
            .flat_map(|(a, b, c)| [a.clone(), b.clone(), c.clone()])
            .chain(self.lexical.keys().map(|(a, _)| a.clone()))
            .collect();
        v.push(self.start.clone());
        v.sort();
        v.dedup();
        v
    }
}

pub struct Expectations {
    pub binary: BTreeMap<(String, String, String), f64>,
    pub lexical: BTreeMap<(String, String), f64>,
    pub log_likelihood: f64,
}

/// Expected rule counts over a corpus, each sentence weighted by its
/// posterior; sentences with zero probability are skipped.
pub fn expectations(g: &Pcfg, corpus: &[Vec<String>]) -> Expectations {
    let nts = g.nonterminals();
    let idx = |s: &str| nts.iter().position(|n| n == s).unwrap();
    let m = nts.len();
    let mut ex = Expectations {
        binary: BTreeMap::new(),
        lexical: BTreeMap::new(),
        log_likelihood: 0.0,
    };
    for s in corpus {
        let n = s.len();
        // inside[i][j][A] for span (i, j)
        let mut inside = vec![vec![vec![0.0f64; m]; n + 1]; n + 1];
        for i in 0..n {
            for ((a, t), w) in &g.lexical {
                if *t == s[i] {
                    inside[i][i + 1][idx(a)] += w;
                }
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                let j = i + len;
                for k in i + 1..j {
                    for ((a, b, c), w) in &g.binary {
                        let v = w * inside[i][k][idx(b)] * inside[k][j][idx(c)];
                        inside[i][j][idx(a)] += v;
                    }
                }
            }
        }
        let z = inside[0][n][idx(&g.start)];
        if z <= 0.0 {
            continue;
        }
        ex.log_likelihood += z.ln();
        let mut outside = vec![vec![vec![0.0f64; m]; n + 1]; n + 1];
        outside[0][n][idx(&g.start)] = 1.0;
        for len in (2..=n).rev() {
            for i in 0..=n - len {
                let j = i + len;
                for k in i + 1..j {
                    for ((a, b, c), w) in &g.binary {
                        let o = outside[i][j][idx(a)];
                        if o == 0.0 {
                            continue;
                        }
                        outside[i][k][idx(b)] += o * w * inside[k][j][idx(c)];
                        outside[k][j][idx(c)] += o * w * inside[i][k][idx(b)];
                    }
                }
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                let j = i + len;
                for k in i + 1..j {
                    for ((a, b, c), w) in &g.binary {
                        let v =
                            outside[i][j][idx(a)] * w * inside[i][k][idx(b)] * inside[k][j][idx(c)]
                                / z;
                        *ex.binary
                            .entry((a.clone(), b.clone(), c.clone()))
                            .or_default() += v;
                    }
                }
            }
        }
        for i in 0..n {
            for ((a, t), w) in &g.lexical {
                if *t == s[i] {
                    *ex.lexical.entry((a.clone(), t.clone())).or_default() +=
                        outside[i][i + 1][idx(a)] * w / z;
                }
            }
        }
    }
    ex
}

/// One EM iteration: expected counts normalized per left-hand side.
pub fn em_step(g: &Pcfg, corpus: &[Vec<String>]) -> (Pcfg, f64) {
    let ex = expectations(g, corpus);
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for ((a, _, _), c) in &ex.binary {
        *totals.entry(a.clone()).or_default() += c;
    }
    for ((a, _), c) in &ex.lexical {
        *totals.entry(a.clone()).or_default() += c;
    }
    let mut next = g.clone();
    for (k, w) in next.binary.iter_mut() {
        let c = ex.binary.get(k).copied().unwrap_or(0.0);
        *w = if c > 0.0 { c / totals[&k.0] } else { 0.0 };
    }
    for (k, w) in next.lexical.iter_mut() {
        let c = ex.lexical.get(k).copied().unwrap_or(0.0);
        *w = if c > 0.0 { c / totals[&k.0] } else { 0.0 };
    }
    (next, ex.log_likelihood)
}
