//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use anyhow::{bail, ensure, Result};
use common::{goal, rel_close, suite, suite_with_fan_out};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synpar::align::{align_corpus, evaluator, hier_align, AlignConfig};
use synpar::corpus::tokens;
use synpar::dspan::{join, normalize_pav, DSpan, Joined, Pav};
use synpar::engine::{parse, Goal, Limits, ParseConfig, Strategy};
use synpar::estimation::{inside_outside_step, train, TrainConfig};
use synpar::evaluate::score_pair;
use synpar::grammar::induce::estimate_from_multitreebank;
use synpar::grammar::lexicon::WordLexicon;
use synpar::grammar::{Gmtg, GrammarEvaluator, Label, Rule, Sym};
use synpar::logic::{CLogic, CrLogic, CtLogic, D1cLogic, Inference, Item, Logic, Term};
use synpar::sample::Sampler;
use synpar::semiring::{Boolean, Counting, Inside, Viterbi, ViterbiDerivation};
use synpar::translate::{goal_predicate, translate, Multitree, TranslateConfig};
use synpar_testkit::classic::{em_step, Pcfg};
use synpar_testkit::{catalan, goal_values, item_values};

const PASUDU: &str = "\
gmtg D=2 start=S,S
P S,S -> [1,2|2,1] (NP,NP)(V,V) @ 1
P NP,NP -> [1|2,1] (N,N)(_,D) @ 1
P V,V -> [1|2] (MIT,_)(_,WASH) @ 1
P N,N -> [1|2] (PAS,_)(_,DISH) @ 1
T d=2 WASH -> Wash @ 0.7
T d=2 WASH -> clean @ 0.3
T d=2 D -> the @ 1
T d=2 DISH -> dishes @ 1
T d=1 PAS -> Pasudu @ 1
T d=1 MIT -> moy @ 1
";

fn words(v: &[Sym]) -> String {
    v.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(" ")
}

fn worked_translation() -> Result<String> {
    let g = Gmtg::parse(PASUDU)?;
    let input = vec![tokens("Pasudu moy")];
    let started = Instant::now();
    let cfg = ParseConfig {
        trace: true,
        ..ParseConfig::new(Strategy::UniformCost)
            .with_goal(Goal::Predicate(goal_predicate(g.start(), &input)))
    };
    let chart = parse(&CtLogic::default(), &g, &ViterbiDerivation, &input, &cfg)?;
    let v = chart.goal_value();
    let Some(d) = v.derivs.first() else {
        bail!("no derivation")
    };
    let output = words(&Multitree::from_derivation(d)?.linearize(1)?);
    let secs = started.elapsed().as_secs_f64();
    ensure!(output == "Wash the dishes", "output {output:?}");
    ensure!((v.prob - 0.7).abs() <= 1e-12, "probability {}", v.prob);
    let trace = &chart.stats.trace;
    let last_certain = trace.iter().rposition(|e| e.score == 1.0);
    let first_uncertain = trace.iter().position(|e| e.score < 1.0);
    ensure!(
        matches!((last_certain, first_uncertain), (Some(a), Some(b)) if a < b),
        "firing order {trace:?}"
    );
    ensure!(secs < 1.0, "{secs} s");
    Ok(format!("\"{output}\" p={} in {:.3} ms", v.prob, secs * 1e3))
}

fn disjoint_pair(rng: &mut impl Rng, n: u32) -> (DSpan, DSpan) {
    let owner: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    let runs = |who: u8| {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for (i, &o) in owner.iter().enumerate() {
            let i = i as u32;
            if o == who {
                match out.last_mut() {
                    Some(last) if last.1 == i => last.1 = i + 1,
                    _ => out.push((i, i + 1)),
                }
            }
        }
        DSpan::new(out).unwrap()
    };
    (runs(1), runs(2))
}

fn dspan_algebra() -> Result<String> {
    let a: DSpan = "(1,3;8,9)".parse()?;
    let b: DSpan = "(7,8)".parse()?;
    ensure!(a.concat(&b)?.to_string() == "(1,3;7,9)");
    ensure!(a.relativize(&b)?.to_string() == "[1;2,1]");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=14);
        let (a, b) = disjoint_pair(&mut rng, n);
        let sum = a.concat(&b)?;
        ensure!(sum.subtract(&b)? == a, "({sum}) - ({b})");
        ensure!(sum.subtract(&a)? == b, "({sum}) - ({a})");
        ensure!(
            sum.rev_relativize(&b)? == a.relativize(&b)?,
            "({sum}) / ({b})"
        );
    }
    Ok("worked examples and 10000 round trips".into())
}

fn link(syms: &[&'static str]) -> Vec<Option<&'static str>> {
    syms.iter().map(|&s| (s != "_").then_some(s)).collect()
}

fn render(rows: &[Vec<Joined<&str>>]) -> Vec<String> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|j| match j {
                    Joined::Symbol(s, i) => format!("{s}{i}"),
                    Joined::Gap => ";".into(),
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

fn join_and_normal_form() -> Result<String> {
    let pav: Pav = "[1,2,3|4,2,1,5|3,2,4]".parse()?;
    let links = [
        ["A", "Y", "_"],
        ["B", "X", "U"],
        ["C", "_", "V"],
        ["_", "W", "T"],
        ["_", "Z", "_"],
    ]
    .map(|l| link(&l));
    let joined = render(&join(&pav, &links)?);
    ensure!(
        joined == ["A1 B2 C3", "W4 X2 Y1 Z5", "V3 U2 T4"],
        "{joined:?}"
    );
    let alt: Pav = "[1,2,3|5,2,1,4|3,2,5]".parse()?;
    let alt_links = [
        ["A", "Y", "_"],
        ["B", "X", "U"],
        ["C", "_", "V"],
        ["_", "Z", "_"],
        ["_", "W", "T"],
    ]
    .map(|l| link(&l));
    let (norm, _) = normalize_pav(&alt, &alt_links);
    let second = norm.arrays()[1].to_string();
    ensure!(second == "[4,2,1,5]", "{second}");
    Ok(format!(
        "{} ; normalized second array {second}",
        joined.join(" / ")
    ))
}

fn oracle_equivalence() -> Result<String> {
    let mut nonzero = 0;
    for (k, case) in suite(11, 100, &[1, 2, 2, 2], 4).iter().enumerate() {
        let input = case.syms();
        let want = goal_values(&case.oracle, &case.input);
        let cfg = ParseConfig::new(Strategy::BottomUp).with_goal(goal(&case.grammar, &input));
        let b = parse(&CLogic, &case.grammar, &Boolean, &input, &cfg)?.goal_value();
        let c = parse(&CLogic, &case.grammar, &Counting, &input, &cfg)?.goal_value();
        let i = parse(&CLogic, &case.grammar, &Inside::default(), &input, &cfg)?.goal_value();
        let v = parse(&CLogic, &case.grammar, &Viterbi::default(), &input, &cfg)?.goal_value();
        ensure!(
            b == (want.count > 0) && c == want.count,
            "case {k}: {b} {c} vs {}",
            want.count
        );
        ensure!(
            rel_close(i, want.inside, 1e-9) && rel_close(v, want.viterbi, 1e-9),
            "case {k}: {i} {v} vs {want:?}"
        );
        nonzero += usize::from(want.count > 0);
    }
    let g = Gmtg::parse("gmtg D=1 start=S\nP S -> [1,2] (S)(S) @ 1\nT d=1 S -> a @ 1\n")?;
    for n in 1..=8usize {
        let input = vec![vec![Sym::from("a"); n]];
        let cfg = ParseConfig::new(Strategy::BottomUp).with_goal(goal(&g, &input));
        let c = parse(&CLogic, &g, &Counting, &input, &cfg)?.goal_value();
        ensure!(c == catalan(n - 1), "n={n}: {c}");
    }
    Ok(format!(
        "100 grammars ({nonzero} derivable inputs), Catalan n<=8"
    ))
}

fn inference_set(logic: &dyn Logic, g: &Gmtg, input: &[Vec<Sym>]) -> Result<BTreeSet<Inference>> {
    Ok(parse(
        logic,
        g,
        &Boolean,
        input,
        &ParseConfig::new(Strategy::BottomUp),
    )?
    .inferences()
    .into_iter()
    .collect())
}

fn logic_reductions() -> Result<String> {
    let mut total = 0;
    for case in suite_with_fan_out(21, 100, &[1], 4, 1) {
        let a = inference_set(&CLogic, &case.grammar, &case.syms())?;
        ensure!(
            a == inference_set(&D1cLogic, &case.grammar, &case.syms())?,
            "C vs D1C on\n{}",
            case.grammar.to_text()
        );
        total += a.len();
    }
    for case in suite(22, 100, &[1, 2, 2, 2], 4) {
        let a = inference_set(&CLogic, &case.grammar, &case.syms())?;
        ensure!(
            a == inference_set(&CtLogic::default(), &case.grammar, &case.syms())?,
            "C vs CT on\n{}",
            case.grammar.to_text()
        );
        total += a.len();
    }
    Ok(format!("200 grammars, {total} inferences compared"))
}

fn reverse_values() -> Result<String> {
    let mut items = 0;
    for case in suite(31, 120, &[1, 2, 2], 3) {
        let input = case.syms();
        let cfg = ParseConfig::new(Strategy::BottomUp).with_goal(goal(&case.grammar, &input));
        let chart = parse(&CrLogic, &case.grammar, &Inside::default(), &input, &cfg)?;
        let z = chart.goal_value();
        if z == 0.0 {
            continue;
        }
        let spans: Vec<DSpan> = input
            .iter()
            .map(|d| DSpan::interval(0, d.len() as u32))
            .collect();
        let root = Item::new(case.grammar.start().to_vec(), spans);
        ensure!(
            chart.value(&Term::RevItem(root)) == 1.0,
            "root reverse value"
        );
        for ((link, intervals), (_, outside)) in item_values(&case.oracle, &case.input) {
            let labels = link
                .iter()
                .map(|l| {
                    l.map_or_else(Label::inactive, |n| {
                        Label::new(&case.oracle.names[n as usize])
                    })
                })
                .collect();
            let spans = intervals
                .into_iter()
                .map(|iv| DSpan::new(iv).unwrap())
                .collect();
            let item = Item::new(labels, spans);
            let r = chart.value(&Term::RevItem(item.clone()));
            ensure!(
                rel_close(r, outside, 1e-9),
                "outside of {item}: {r} vs {outside}"
            );
            items += 1;
        }
        for (d, toks) in input.iter().enumerate() {
            for i in 1..=toks.len() as u32 {
                let total: f64 = chart
                    .terms()
                    .filter_map(|(_, t)| match t.as_ref() {
                        Term::Item(it) if it.single_dim() == Some((d, &DSpan::word(i))) => {
                            Some(it.clone())
                        }
                        _ => None,
                    })
                    .map(|it| {
                        chart.value(&Term::Item(it.clone())) * chart.value(&Term::RevItem(it))
                    })
                    .sum();
                ensure!(rel_close(total, z, 1e-9), "position {i}: {total} vs {z}");
            }
        }
    }
    Ok(format!("{items} outside values matched"))
}

fn sample(g: &Gmtg, seed: u64, n: usize, max_len: usize) -> Result<Vec<Vec<Vec<Sym>>>> {
    let mut s = Sampler::new(g, seed);
    let mut out = Vec::new();
    while out.len() < n {
        let Some((_, y)) = s.corpus(1)?.pop() else {
            bail!("sampler returned nothing")
        };
        if y.iter().all(|d| d.len() <= max_len) {
            out.push(y);
        }
    }
    Ok(out)
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

fn classical_weights(g: &Gmtg) -> BTreeMap<String, f64> {
    let name = |l: &Label| l.sym.as_deref().unwrap_or("_").to_string();
    g.rules()
        .iter()
        .map(|(r, w)| {
            let key = match r.as_ref() {
                Rule::Terminating { lhs, terminal, .. } => format!("{} {terminal}", name(lhs)),
                Rule::Nonterminating { lhs, pav, y, z } if pav.to_string() == "[1,2]" => {
                    format!("{} {} {}", name(&lhs[0]), name(&y[0]), name(&z[0]))
                }
                Rule::Nonterminating { lhs, y, z, .. } => {
                    format!("{} {} {}", name(&lhs[0]), name(&z[0]), name(&y[0]))
                }
                Rule::Lexical { .. } => unreachable!(),
            };
            (key, *w)
        })
        .collect()
}

fn estimation() -> Result<String> {
    // monotone likelihood and normalization
    let generator = Gmtg::parse(ITG)?;
    let corpus = sample(&generator, 3, 20, 5)?;
    let rng = std::cell::RefCell::new(ChaCha8Rng::seed_from_u64(9));
    let start = generator
        .reweighted(|_| rng.borrow_mut().gen_range(0.1..1.0))
        .normalized();
    let run = train(
        &start,
        &corpus,
        &TrainConfig {
            iterations: 10,
            smoothing: 0.0,
            tolerance: 0.0,
            ..Default::default()
        },
    )?;
    ensure!(
        run.log_likelihoods.len() == 11,
        "{} iterations",
        run.log_likelihoods.len() - 1
    );
    for w in run.log_likelihoods.windows(2) {
        ensure!(
            w[1] >= w[0] - 1e-9,
            "likelihood fell: {:?}",
            run.log_likelihoods
        );
    }
    ensure!(
        run.grammars.iter().all(|g| g.is_normalized(1e-9)),
        "unnormalized iterate"
    );

    // recovery of a known generator
    let family = Gmtg::parse(&std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/pasudu_family.gmtg"),
    )?)?;
    let corpus = sample(&family, 17, 1000, 10)?;
    let learned = train(
        &family.reweighted(|_| 1.0).normalized(),
        &corpus,
        &TrainConfig {
            iterations: 5,
            ..Default::default()
        },
    )?;
    let worst = family
        .rules()
        .iter()
        .zip(learned.grammar().rules())
        .map(|((_, a), (_, b))| (a - b).abs())
        .fold(0.0, f64::max);
    ensure!(worst <= 0.05, "L-infinity distance {worst}");

    // one-dimensional restriction against a classical trainer
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..5 {
        let mut classic = Pcfg {
            start: "S".into(),
            binary: BTreeMap::new(),
            lexical: BTreeMap::new(),
        };
        for a in ["S", "A", "B"] {
            for b in ["S", "A", "B"] {
                for c in ["S", "A", "B"] {
                    classic
                        .binary
                        .insert((a.into(), b.into(), c.into()), rng.gen_range(0.05..1.0));
                }
            }
            for t in ["a", "b"] {
                classic
                    .lexical
                    .insert((a.into(), t.into()), rng.gen_range(0.05..1.0));
            }
        }
        classic.normalize();
        let mut ours = Gmtg::parse(&classic.to_text())?;
        let strings: Vec<Vec<String>> = (0..15)
            .map(|_| {
                (0..rng.gen_range(1..=6))
                    .map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }.to_string())
                    .collect()
            })
            .collect();
        let tuples: Vec<Vec<Vec<Sym>>> = strings
            .iter()
            .map(|s| common::syms(std::slice::from_ref(s)))
            .collect();
        for _ in 0..3 {
            let (next, ll) = em_step(&classic, &strings);
            let step = inside_outside_step(
                &ours,
                &tuples,
                &TrainConfig {
                    smoothing: 0.0,
                    ..Default::default()
                },
            )?;
            ensure!(
                rel_close(step.log_likelihood, ll, 1e-9),
                "log-likelihood {} vs {ll}",
                step.log_likelihood
            );
            let got = classical_weights(&step.grammar);
            for (k, w) in next.weights() {
                let g = got.get(&k).copied().unwrap_or(0.0);
                ensure!((g - w).abs() <= 1e-9, "{k}: {g} vs {w}");
            }
            classic = next;
            ours = step.grammar;
        }
    }
    let lls = &run.log_likelihoods;
    Ok(format!(
        "LL {:.4} -> {:.4}; recovery L-inf {worst:.4}; classical match",
        lls[0], lls[10]
    ))
}

fn strategy_invariance() -> Result<String> {
    let mut terms = 0;
    for case in suite(23, 100, &[1, 2, 2, 2], 4) {
        let input = case.syms();
        let run = |strategy| -> Result<HashMap<Term, f64>> {
            let cfg = ParseConfig::new(strategy).with_goal(goal(&case.grammar, &input));
            let chart = parse(&CLogic, &case.grammar, &Inside::default(), &input, &cfg)?;
            Ok(chart
                .terms()
                .map(|(id, t)| ((**t).clone(), *chart.value_of(id)))
                .collect())
        };
        let (bu, ucs) = (run(Strategy::BottomUp)?, run(Strategy::UniformCost)?);
        ensure!(
            bu.len() == ucs.len(),
            "chart sizes {} vs {}",
            bu.len(),
            ucs.len()
        );
        for (t, v) in &bu {
            let u = ucs.get(t).copied().unwrap_or(f64::NAN);
            ensure!(rel_close(*v, u, 1e-12), "{t}: {v} vs {u}");
        }
        terms += bu.len();
    }
    Ok(format!("{terms} chart values identical"))
}

const STRUCTURED: &str = "\
gmtg D=1 start=S
P S -> [1,2] (NP)(VP) @ 1
P VP -> [1,2] (V)(OBJ) @ 1
T d=1 NP -> a @ 0.5
T d=1 NP -> d @ 0.5
T d=1 V -> b @ 1
T d=1 OBJ -> c @ 1
";

fn alignment() -> Result<String> {
    let g = Gmtg::parse(STRUCTURED)?;
    let mut lex = WordLexicon::new();
    for (s, t) in [("a", "x"), ("b", "y"), ("c", "z"), ("d", "w")] {
        lex.set(s.into(), t.into(), 1.0);
    }
    let cfg = AlignConfig::default();
    let ev = evaluator(&g, &[lex.clone()], &cfg);
    let input = vec![tokens("a b c"), tokens("y z x")];
    let pc = ParseConfig::new(Strategy::BottomUp)
        .with_goal(Goal::Predicate(goal_predicate(ev.start(), &input)));
    let count = parse(&CLogic, &ev, &Counting, &input, &pc)?.goal_value();
    ensure!(count == 1, "{count} compatible multitrees");
    let expected = synpar::translate::parse_treebank(
        "(S[c],λ[z]|[1,2|2,1] (NP[a],λ[x]|[1|2] (NP[a],_ (1:a)) (_,λ[x] (2:x))) \
         (VP[c],λ[z]|[1,2|1,2] (V[b],λ[y]|[1|2] (V[b],_ (1:b)) (_,λ[y] (2:y))) \
         (OBJ[c],λ[z]|[1|2] (OBJ[c],_ (1:c)) (_,λ[z] (2:z)))))",
    )?;
    let got = hier_align(&ev, &input, &cfg)?.tree;
    ensure!(got.as_ref() == expected.first(), "aligned {got:?}");

    let corpus: Vec<Vec<Vec<Sym>>> = [("a b c", "y z x"), ("d b c", "y z w")]
        .iter()
        .map(|(s, t)| vec![tokens(s), tokens(t)])
        .collect();
    let aligned = align_corpus(&g, &[lex], &corpus, &cfg)?;
    ensure!(aligned.skipped.is_empty(), "skipped {:?}", aligned.skipped);
    let induced = estimate_from_multitreebank(&aligned.trees, None)?.grammar;
    for tuple in &corpus {
        let t = translate(&induced, &tuple[..1], &TranslateConfig::default())?;
        ensure!(
            t.outputs == [tuple[1].clone()],
            "{} -> {:?}",
            words(&tuple[0]),
            t.outputs
        );
    }
    Ok(format!(
        "unique multitree recovered; {} training tuples regenerated",
        corpus.len()
    ))
}

fn complexity() -> Result<String> {
    let g = Gmtg::parse("gmtg D=1 start=S\nP S -> [1,2] (S)(S) @ 0.4\nP S -> [1,2] (A)(S) @ 0.2\nT d=1 S -> a @ 0.3\nT d=1 A -> a @ 0.1\n")?;
    let mut points = Vec::new();
    for n in [4usize, 8, 16, 32] {
        let input = vec![vec![Sym::from("a"); n]];
        let chart = parse(
            &CLogic,
            &g,
            &Counting,
            &input,
            &ParseConfig::new(Strategy::BottomUp),
        )?;
        points.push((
            (n as f64).ln(),
            (chart.stats.per_rule["compose"] as f64).ln(),
        ));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let e = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    ensure!((2.5..=3.5).contains(&e), "exponent {e}");
    Ok(format!("exponent {e:.3}"))
}

fn evaluation() -> Result<String> {
    let mut text = String::from(
        "gmtg D=2 start=S,S
P S,S -> [1,2|1,2] (NP,NP)(VP,VP) @ 1
P VP,VP -> [1,2|1,2] (VB,VB)(PPS,PPS) @ 0.5
P VP,VP -> [1,2|1,2] (V,V)(NP,NP) @ 0.5
P VB,VB -> [1,2|1,2] (V,V)(NP,NP) @ 1
P PPS,PPS -> [1,2|1,2] (PP,PP)(PP,PP) @ 0.6
P PPS,PPS -> [1,2|2,1] (PP,PP)(PP,PP) @ 0.4
P PP,PP -> [1,2|1,2] (P,P)(NP,NP) @ 1
P NP,NP -> [1,2|1,2] (NP,NP)(PP,PP) @ 0.2
P NP,NP -> [1,2|1,2] (DT,DT)(NN,NN) @ 0.3
",
    );
    for (cat, word, w) in [
        ("NP", "pat", 0.15),
        ("NP", "sandy", 0.15),
        ("NP", "friday", 0.1),
        ("NP", "oslo", 0.1),
        ("V", "asked", 1.0),
        ("P", "on", 0.4),
        ("P", "about", 0.3),
        ("P", "from", 0.3),
        ("DT", "the", 1.0),
        ("NN", "man", 1.0),
    ] {
        text.push_str(&format!("P {cat},{cat} -> [1|2] (W_{word},_)(_,W_{word}) @ {w}\nT d=1 W_{word} -> {word} @ 1\nT d=2 W_{word} -> {word} @ 1\n"));
    }
    let g = Gmtg::parse(&text)?;
    let r = tokens("pat asked sandy on friday about the man from oslo");
    let t1 = score_pair(
        &g,
        &r,
        &tokens("pat asked sandy about the man from oslo on friday"),
        Limits::default(),
    )?;
    let t2 = score_pair(
        &g,
        &r,
        &tokens("pat from oslo asked sandy on friday about the man"),
        Limits::default(),
    )?;
    ensure!(t1 > 0.0, "swapped modifiers scored {t1}");
    ensure!(t2 == 0.0, "moved modifier scored {t2}");
    Ok(format!("(R,T1) {t1:.3e}, (R,T2) {t2}"))
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        out.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path())?,
        );
    }
    Ok(out)
}

fn pipeline() -> Result<String> {
    let generator = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/pasudu_family.gmtg");
    let mut runs = Vec::new();
    let started = Instant::now();
    for _ in 0..2 {
        let dir = tempfile::tempdir()?;
        let status = Command::new(env!("CARGO_BIN_EXE_synpar"))
            .args(["pipeline", "--seed", "3", "--synthetic"])
            .arg(&generator)
            .arg("--out-dir")
            .arg(dir.path())
            .output()?;
        ensure!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        runs.push(snapshot(dir.path())?);
    }
    let secs = started.elapsed().as_secs_f64() / 2.0;
    ensure!(secs < 60.0, "{secs} s per run");
    ensure!(runs[0] == runs[1], "runs differ");
    ensure!(runs[0].len() >= 15, "only {} artifacts", runs[0].len());
    Ok(format!(
        "{} artifacts, identical across runs, {secs:.2} s per run",
        runs[0].len()
    ))
}

type Check = fn() -> Result<String>;

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("worked translation example", worked_translation),
        ("d-span algebra", dspan_algebra),
        ("join and normal form", join_and_normal_form),
        ("semiring values match brute force", oracle_equivalence),
        ("logic reductions", logic_reductions),
        ("reverse values", reverse_values),
        ("estimation", estimation),
        ("strategy invariance", strategy_invariance),
        ("hierarchical alignment", alignment),
        ("complexity guard", complexity),
        ("paraphrase evaluation", evaluation),
        ("end-to-end pipeline", pipeline),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(anyhow::anyhow!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e:#}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
