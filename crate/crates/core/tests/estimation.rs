mod common;

use std::collections::BTreeMap;

use common::rel_close;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synpar::estimation::{inside_outside_step, train, Mode, TrainConfig};
use synpar::grammar::{Gmtg, Rule, Sym};
use synpar::sample::Sampler;
use synpar_testkit::classic::{em_step, Pcfg};

fn random_pcfg(rng: &mut ChaCha8Rng) -> Pcfg {
    let nts = ["S", "A", "B"];
    let mut g = Pcfg {
        start: "S".into(),
        binary: BTreeMap::new(),
        lexical: BTreeMap::new(),
    };
    for a in nts {
        let mut ws: Vec<f64> = Vec::new();
        let mut keys = Vec::new();
        for b in nts {
            for c in nts {
                if rng.gen_bool(0.5) {
                    keys.push((Some((b, c)), None));
                    ws.push(rng.gen_range(0.05..1.0));
                }
            }
        }
        for t in ["a", "b"] {
            keys.push((None, Some(t)));
            ws.push(rng.gen_range(0.05..1.0));
        }
        let total: f64 = ws.iter().sum();
        for (k, w) in keys.into_iter().zip(ws) {
            match k {
                (Some((b, c)), _) => {
                    g.binary.insert((a.into(), b.into(), c.into()), w / total);
                }
                (_, Some(t)) => {
                    g.lexical.insert((a.into(), t.into()), w / total);
                }
                _ => unreachable!(),
            }
        }
    }
    g
}

/// Weights of a one-dimensional grammar keyed like the classical trainer.
fn as_pcfg(
    g: &Gmtg,
) -> (
    BTreeMap<(String, String, String), f64>,
    BTreeMap<(String, String), f64>,
) {
    let (mut bin, mut lex) = (BTreeMap::new(), BTreeMap::new());
    for (r, w) in g.rules() {
        let name = |l: &synpar::grammar::Label| l.sym.as_deref().unwrap().to_string();
        match r.as_ref() {
            Rule::Terminating { lhs, terminal, .. } => {
                lex.insert((name(lhs), terminal.to_string()), *w);
            }
            Rule::Nonterminating { lhs, pav, y, z } => {
                let (b, c) = if pav.to_string() == "[1,2]" {
                    (&y[0], &z[0])
                } else {
                    (&z[0], &y[0])
                };
                bin.insert((name(&lhs[0]), name(b), name(c)), *w);
            }
            Rule::Lexical { .. } => unreachable!(),
        }
    }
    (bin, lex)
}

#[test]
fn one_dimensional_restriction_is_classical_inside_outside() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let mut classic = random_pcfg(&mut rng);
        let mut ours = Gmtg::parse(&classic.to_text()).unwrap();
        let corpus: Vec<Vec<String>> = (0..15)
            .map(|_| {
                (0..rng.gen_range(1..=6))
                    .map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }.to_string())
                    .collect()
            })
            .collect();
        let tuples: Vec<Vec<Vec<Sym>>> = corpus
            .iter()
            .map(|s| common::syms(std::slice::from_ref(s)))
            .collect();
        let cfg = TrainConfig {
            smoothing: 0.0,
            ..Default::default()
        };
        for _ in 0..3 {
            let (next, ll) = em_step(&classic, &corpus);
            let step = inside_outside_step(&ours, &tuples, &cfg).unwrap();
            assert!(
                rel_close(step.log_likelihood, ll, 1e-9),
                "{} vs {ll}",
                step.log_likelihood
            );
            let (bin, lex) = as_pcfg(&step.grammar);
            for (k, w) in &next.binary {
                let got = bin.get(k).copied().unwrap_or(0.0);
                assert!((got - w).abs() <= 1e-9, "{k:?}: {got} vs {w}");
            }
            for (k, w) in &next.lexical {
                let got = lex.get(k).copied().unwrap_or(0.0);
                assert!((got - w).abs() <= 1e-9, "{k:?}: {got} vs {w}");
            }
            classic = next;
            ours = step.grammar;
        }
    }
}

const ITG: &str = "\
gmtg D=2 start=S,S
P S,S -> [1,2|1,2] (S,S)(S,S) @ 0.25
P S,S -> [1,2|2,1] (S,S)(S,S) @ 0.15
P S,S -> [1|2] (X,_)(_,Y) @ 0.6
T d=1 X -> a @ 0.5
T d=1 X -> b @ 0.3
T d=1 X -> c @ 0.2
T d=2 Y -> x @ 0.6
T d=2 Y -> y @ 0.4
";

fn sample(g: &Gmtg, seed: u64, n: usize, max_len: usize) -> Vec<Vec<Vec<Sym>>> {
    let mut s = Sampler::new(g, seed);
    let mut out = Vec::new();
    while out.len() < n {
        let (_, y) = s.corpus(1).unwrap().pop().unwrap();
        if y.iter().all(|d| d.len() <= max_len) {
            out.push(y);
        }
    }
    out
}

fn uniform(g: &Gmtg) -> Gmtg {
    g.reweighted(|_| 1.0).normalized()
}

#[test]
fn likelihood_never_decreases() {
    let generator = Gmtg::parse(ITG).unwrap();
    let corpus = sample(&generator, 3, 20, 5);
    let rng = std::cell::RefCell::new(ChaCha8Rng::seed_from_u64(9));
    let start = generator
        .reweighted(|_| rng.borrow_mut().gen_range(0.1..1.0))
        .normalized();
    let cfg = TrainConfig {
        iterations: 10,
        smoothing: 0.0,
        tolerance: 0.0,
        ..Default::default()
    };
    let run = train(&start, &corpus, &cfg).unwrap();
    assert_eq!(run.log_likelihoods.len(), 11);
    for w in run.log_likelihoods.windows(2) {
        assert!(w[1] >= w[0] - 1e-9, "{:?}", run.log_likelihoods);
    }
    assert!(run.log_likelihoods[10] > run.log_likelihoods[0] + 1e-3);
    for g in &run.grammars {
        assert!(g.is_normalized(1e-9));
    }
}

const FAMILY: &str = "\
gmtg D=2 start=S,S
P S,S -> [1,2|2,1] (NP,NP)(V,V) @ 0.8
P S,S -> [1,2|1,2] (NP,NP)(V,V) @ 0.2
P NP,NP -> [1|2,1] (N,N)(_,D) @ 1
P V,V -> [1|2] (MIT,_)(_,WASH) @ 0.6
P V,V -> [1|2] (SUH,_)(_,DRY) @ 0.4
P N,N -> [1|2] (PAS,_)(_,DISH) @ 0.35
P N,N -> [1|2] (KOP,_)(_,CUP) @ 0.65
T d=2 WASH -> Wash @ 0.7
T d=2 WASH -> clean @ 0.3
T d=2 DRY -> Dry @ 1
T d=2 D -> the @ 1
T d=2 DISH -> dishes @ 1
T d=2 CUP -> cups @ 1
T d=1 PAS -> Pasudu @ 1
T d=1 KOP -> kopu @ 1
T d=1 MIT -> moy @ 1
T d=1 SUH -> suh @ 1
";

#[test]
fn recovers_generator_weights() {
    let generator = Gmtg::parse(FAMILY).unwrap();
    let corpus = sample(&generator, 17, 1500, 10);
    for mode in [Mode::Inside, Mode::NBest(3)] {
        let cfg = TrainConfig {
            iterations: 5,
            mode,
            ..Default::default()
        };
        let run = train(&uniform(&generator), &corpus, &cfg).unwrap();
        let learned = run.grammar();
        assert!(learned.is_normalized(1e-9));
        let worst = generator
            .rules()
            .iter()
            .zip(learned.rules())
            .map(|((r1, w1), (r2, w2))| {
                assert_eq!(r1, r2);
                (w1 - w2).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 0.05, "{mode}: L-infinity distance {worst}");
    }
}
