//! Exhaustive top-down enumeration of the multitrees of a grammar whose
//! yields fit an input tuple. Every multitree has exactly one leaf per
//! input token, so enumeration is bounded by the input length.

use std::collections::HashMap;
use std::rc::Rc;

use crate::random::{Link, RGrammar, RRule};

/// Output segments per dimension.
pub type Yield = Vec<Vec<Vec<String>>>;

/// Goal values under the counting, inside and Viterbi interpretations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Values {
    pub count: u128,
    pub inside: f64,
    pub viterbi: f64,
}

#[derive(Debug)]
pub struct Tree {
    pub rule: usize,
    pub link: Link,
    pub children: Vec<Rc<Tree>>,
    pub yld: Yield,
    pub weight: f64,
}

/// Item key: a link and, per dimension, the intervals it covers.
pub type ItemKey = (Link, Vec<Vec<(u32, u32)>>);

pub struct Enumerator<'g> {
    g: &'g RGrammar,
    input: Vec<Vec<String>>,
    memo: HashMap<(Link, Vec<usize>), Rc<Vec<Rc<Tree>>>>,
}

fn is_substring(hay: &[String], needle: &[String]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// All ways to split `counts` between two children with the given
/// activity patterns.
fn splits(counts: &[usize], ya: &[bool], za: &[bool]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for d in 0..counts.len() {
        let mut next = Vec::new();
        for (a, b) in &out {
            for c1 in 0..=counts[d] {
                let c2 = counts[d] - c1;
                if (c1 > 0) != ya[d] || (c2 > 0) != za[d] {
                    continue;
                }
                let (mut a, mut b) = (a.clone(), b.clone());
                a.push(c1);
                b.push(c2);
                next.push((a, b));
            }
        }
        out = next;
    }
    out
}

fn compose(arrays: &[Vec<Vec<u8>>], y: &Yield, z: &Yield) -> Option<Yield> {
    let mut out = Vec::with_capacity(arrays.len());
    for (d, segs) in arrays.iter().enumerate() {
        let mut next = [0usize, 0usize];
        let mut dim_out = Vec::new();
        for seg in segs {
            let mut toks = Vec::new();
            for &i in seg {
                let child = if i == 1 { &y[d] } else { &z[d] };
                let k = next[i as usize - 1];
                toks.extend(child.get(k)?.iter().cloned());
                next[i as usize - 1] += 1;
            }
            dim_out.push(toks);
        }
        if next[0] != y[d].len() || next[1] != z[d].len() {
            return None;
        }
        out.push(dim_out);
    }
    Some(out)
}

impl<'g> Enumerator<'g> {
    pub fn new(g: &'g RGrammar, input: &[Vec<String>]) -> Self {
        Enumerator {
            g,
            input: input.to_vec(),
            memo: HashMap::new(),
        }
    }

    /// Every multitree rooted in `link` with `counts[d]` leaves in
    /// dimension `d` whose segments all occur in the input.
    pub fn trees(&mut self, link: &Link, counts: &[usize]) -> Rc<Vec<Rc<Tree>>> {
        let key = (link.clone(), counts.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        let dims = self.g.dims;
        for (k, (rule, w)) in self.g.rules.iter().enumerate() {
            if rule.lhs_link(dims) != *link {
                continue;
            }
            match rule {
                RRule::Term { dim, tok, .. } => {
                    if counts
                        .iter()
                        .enumerate()
                        .all(|(d, &c)| c == usize::from(d == *dim))
                    {
                        let mut yld: Yield = vec![Vec::new(); dims];
                        yld[*dim] = vec![vec![tok.clone()]];
                        if is_substring(&self.input[*dim], &yld[*dim][0]) {
                            out.push(Rc::new(Tree {
                                rule: k,
                                link: link.clone(),
                                children: Vec::new(),
                                yld,
                                weight: *w,
                            }));
                        }
                    }
                }
                RRule::Bin { arrays, y, z, .. } => {
                    let ya: Vec<bool> = y.iter().map(Option::is_some).collect();
                    let za: Vec<bool> = z.iter().map(Option::is_some).collect();
                    for (c1, c2) in splits(counts, &ya, &za) {
                        let left = self.trees(y, &c1);
                        if left.is_empty() {
                            continue;
                        }
                        let right = self.trees(z, &c2);
                        for a in left.iter() {
                            for b in right.iter() {
                                let Some(yld) = compose(arrays, &a.yld, &b.yld) else {
                                    continue;
                                };
                                if yld.iter().enumerate().all(|(d, segs)| {
                                    segs.iter().all(|s| is_substring(&self.input[d], s))
                                }) {
                                    out.push(Rc::new(Tree {
                                        rule: k,
                                        link: link.clone(),
                                        children: vec![a.clone(), b.clone()],
                                        yld,
                                        weight: w * a.weight * b.weight,
                                    }));
                                }
                            }
                        }
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        out
    }

    /// Multitrees rooted in the start link whose yield is the input.
    pub fn goal_trees(&mut self) -> Vec<Rc<Tree>> {
        let counts: Vec<usize> = self.input.iter().map(Vec::len).collect();
        let start = self.g.start.clone();
        let input = self.input.clone();
        self.trees(&start, &counts)
            .iter()
            .filter(|t| {
                t.yld
                    .iter()
                    .zip(&input)
                    .all(|(segs, toks)| segs.len() == 1 && segs[0] == *toks)
            })
            .cloned()
            .collect()
    }
}

pub fn goal_values(g: &RGrammar, input: &[Vec<String>]) -> Values {
    let trees = Enumerator::new(g, input).goal_trees();
    Values {
        count: trees.len() as u128,
        inside: trees.iter().map(|t| t.weight).sum(),
        viterbi: trees.iter().map(|t| t.weight).fold(0.0, f64::max),
    }
}

fn assign(
    t: &Rc<Tree>,
    starts: &[Vec<u32>],
    g: &RGrammar,
    visit: &mut dyn FnMut(&Rc<Tree>, ItemKey),
) {
    let spans: Vec<Vec<(u32, u32)>> = t
        .yld
        .iter()
        .zip(starts)
        .map(|(segs, st)| {
            segs.iter()
                .zip(st)
                .map(|(s, &b)| (b, b + s.len() as u32))
                .collect()
        })
        .collect();
    visit(t, (t.link.clone(), spans));
    if let RRule::Bin { arrays, .. } = &g.rules[t.rule].0 {
        let mut child_starts = [vec![Vec::new(); g.dims], vec![Vec::new(); g.dims]];
        for (d, segs) in arrays.iter().enumerate() {
            let mut next = [0usize, 0usize];
            for (k, seg) in segs.iter().enumerate() {
                let mut pos = starts[d][k];
                for &i in seg {
                    let c = i as usize - 1;
                    child_starts[c][d].push(pos);
                    pos += t.children[c].yld[d][next[c]].len() as u32;
                    next[c] += 1;
                }
            }
        }
        for (c, st) in child_starts.iter().enumerate() {
            assign(&t.children[c], st, g, visit);
        }
    }
}

/// Inside and outside values of every item occurring in some goal
/// multitree: inside sums the distinct subtrees at the item, and outside is
/// the total weight of goal multitrees through the item divided by inside.
pub fn item_values(g: &RGrammar, input: &[Vec<String>]) -> HashMap<ItemKey, (f64, f64)> {
    let trees = Enumerator::new(g, input).goal_trees();
    let mut through: HashMap<ItemKey, f64> = HashMap::new();
    let mut subtrees: HashMap<ItemKey, HashMap<*const Tree, f64>> = HashMap::new();
    let root_starts: Vec<Vec<u32>> = vec![vec![0]; g.dims];
    for t in &trees {
        assign(t, &root_starts, g, &mut |node, key| {
            *through.entry(key.clone()).or_default() += t.weight;
            subtrees
                .entry(key)
                .or_default()
                .insert(Rc::as_ptr(node), node.weight);
        });
    }
    through
        .into_iter()
        .map(|(k, w)| {
            let inside: f64 = subtrees[&k].values().sum();
            (k, (inside, w / inside))
        })
        .collect()
}
