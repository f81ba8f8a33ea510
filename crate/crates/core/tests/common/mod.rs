#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synpar::dspan::DSpan;
use synpar::engine::Goal;
use synpar::grammar::{Gmtg, GrammarEvaluator, Sym};
use synpar::logic::{Item, Term};
use synpar::sample::Sampler;
use synpar_testkit::{random_grammar, random_input, RGrammar, Spec};

pub struct Case {
    pub oracle: RGrammar,
    pub grammar: Gmtg,
    pub input: Vec<Vec<String>>,
}

impl Case {
    pub fn syms(&self) -> Vec<Vec<Sym>> {
        syms(&self.input)
    }
}

pub fn syms(input: &[Vec<String>]) -> Vec<Vec<Sym>> {
    input
        .iter()
        .map(|d| d.iter().map(|t| Sym::from(t.as_str())).collect())
        .collect()
}

pub fn goal(grammar: &Gmtg, input: &[Vec<Sym>]) -> Goal {
    let spans = input
        .iter()
        .map(|d| DSpan::interval(0, d.len() as u32))
        .collect();
    Goal::Terms(vec![Term::Item(Item::new(grammar.start().to_vec(), spans))])
}

/// A yield of the grammar with 1..=`max_len` tokens per dimension, if one
/// turns up within a few draws.
fn sampled_input(g: &Gmtg, seed: u64, max_len: usize) -> Option<Vec<Vec<String>>> {
    let mut s = Sampler::new(g, seed);
    s.max_depth = 12;
    for _ in 0..30 {
        let (_, y) = s.corpus(1).ok()?.pop()?;
        if y.iter().all(|d| !d.is_empty() && d.len() <= max_len) {
            return Some(
                y.iter()
                    .map(|d| d.iter().map(|t| t.to_string()).collect())
                    .collect(),
            );
        }
    }
    None
}

/// `count` random grammars, each with an input that is a sampled yield
/// half of the time and uniformly random otherwise.
pub fn suite(seed: u64, count: usize, dims: &[usize], max_len: usize) -> Vec<Case> {
    suite_with_fan_out(seed, count, dims, max_len, 2)
}

pub fn suite_with_fan_out(
    seed: u64,
    count: usize,
    dims: &[usize],
    max_len: usize,
    fan_out: usize,
) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let d = dims[rng.gen_range(0..dims.len())];
        let spec = Spec {
            dims: d,
            nonterminals: rng.gen_range(1..=3),
            max_fan_out: rng.gen_range(1..=fan_out),
            binary_rules: if d == 1 {
                rng.gen_range(3..=10)
            } else {
                rng.gen_range(8..=30)
            },
            vocab: 2,
        };
        let oracle = random_grammar(&mut rng, &spec);
        let grammar =
            Gmtg::parse(&oracle.to_text()).unwrap_or_else(|e| panic!("{e}\n{}", oracle.to_text()));
        let input = if rng.gen_bool(0.5) {
            sampled_input(&grammar, rng.gen(), max_len)
                .unwrap_or_else(|| random_input(&mut rng, &oracle, max_len))
        } else {
            random_input(&mut rng, &oracle, max_len)
        };
        out.push(Case {
            oracle,
            grammar,
            input,
        });
    }
    out
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
