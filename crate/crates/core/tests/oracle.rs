mod common;

use common::{goal, rel_close, suite};
use synpar::engine::{parse, ParseConfig, Strategy};
use synpar::grammar::Gmtg;
use synpar::logic::CLogic;
use synpar::semiring::{Boolean, Counting, Inside, Viterbi};
use synpar_testkit::random::{RGrammar, RRule};
use synpar_testkit::{catalan, goal_values};

#[test]
fn random_grammars_match_brute_force() {
    let mut nonzero = 0;
    for (k, case) in suite(11, 100, &[1, 2, 2, 2], 4).iter().enumerate() {
        let input = case.syms();
        let want = goal_values(&case.oracle, &case.input);
        let cfg = ParseConfig::new(Strategy::BottomUp).with_goal(goal(&case.grammar, &input));
        let ctx = || format!("case {k}\n{}input {:?}", case.oracle.to_text(), case.input);
        let b = parse(&CLogic, &case.grammar, &Boolean, &input, &cfg)
            .unwrap()
            .goal_value();
        assert_eq!(b, want.count > 0, "boolean, {}", ctx());
        let c = parse(&CLogic, &case.grammar, &Counting, &input, &cfg)
            .unwrap()
            .goal_value();
        assert_eq!(c, want.count, "counting, {}", ctx());
        let i = parse(&CLogic, &case.grammar, &Inside::default(), &input, &cfg)
            .unwrap()
            .goal_value();
        assert!(
            rel_close(i, want.inside, 1e-9),
            "inside {i} vs {}, {}",
            want.inside,
            ctx()
        );
        let v = parse(&CLogic, &case.grammar, &Viterbi::default(), &input, &cfg)
            .unwrap()
            .goal_value();
        assert!(
            rel_close(v, want.viterbi, 1e-9),
            "viterbi {v} vs {}, {}",
            want.viterbi,
            ctx()
        );
        nonzero += usize::from(want.count > 0);
    }
    assert!(nonzero >= 25, "only {nonzero} inputs were derivable");
}

#[test]
fn counting_gives_catalan_numbers() {
    let g = Gmtg::parse("gmtg D=1 start=S\nP S -> [1,2] (S)(S) @ 1\nT d=1 S -> a @ 1\n").unwrap();
    for n in 1..=8usize {
        let input = vec![vec![synpar::grammar::Sym::from("a"); n]];
        let cfg = ParseConfig::new(Strategy::BottomUp).with_goal(goal(&g, &input));
        let c = parse(&CLogic, &g, &Counting, &input, &cfg)
            .unwrap()
            .goal_value();
        assert_eq!(c, catalan(n - 1), "n = {n}");
    }
    assert_eq!(catalan(7), 429);
}

/// A constituent discontinuous in dimension 1 wraps around another.
#[test]
fn discontinuous_constituent_matches_brute_force() {
    let names = ["S", "A", "B", "C", "D", "XB", "XC", "XD"]
        .map(String::from)
        .to_vec();
    let bin = |lhs: [Option<u8>; 2],
               arrays: [&[&[u8]]; 2],
               y: [Option<u8>; 2],
               z: [Option<u8>; 2]| RRule::Bin {
        lhs: lhs.to_vec(),
        arrays: arrays
            .iter()
            .map(|a| a.iter().map(|s| s.to_vec()).collect())
            .collect(),
        y: y.to_vec(),
        z: z.to_vec(),
    };
    let t = |dim: usize, lhs: u8, tok: &str| RRule::Term {
        dim,
        lhs,
        tok: tok.into(),
    };
    let (s, a, b, c, d) = (Some(0), Some(1), Some(2), Some(3), Some(4));
    let mut rules = vec![
        (
            bin([s, s], [&[&[1, 2, 1]], &[&[1, 2]]], [a, a], [b, b]),
            0.5,
        ),
        (bin([s, s], [&[&[1, 2]], &[&[1, 2]]], [a, a], [b, b]), 0.5),
        (
            bin([a, a], [&[&[1], &[2]], &[&[1, 2]]], [c, c], [d, d]),
            0.25,
        ),
        (bin([a, a], [&[&[1, 2]], &[&[1, 2]]], [c, c], [d, d]), 0.75),
    ];
    for (k, (lhs, w1, w2)) in [(b, "b1", "b2"), (c, "c1", "c2"), (d, "d1", "d2")]
        .into_iter()
        .enumerate()
    {
        let x = 5 + k as u8;
        rules.push((
            bin(
                [lhs, lhs],
                [&[&[1]], &[&[2]]],
                [Some(x), None],
                [None, Some(x)],
            ),
            1.0,
        ));
        rules.push((t(0, x, w1), 1.0));
        rules.push((t(1, x, w2), 1.0));
    }
    let oracle = RGrammar {
        dims: 2,
        names,
        start: vec![s, s],
        rules,
    };
    let grammar = Gmtg::parse(&oracle.to_text()).unwrap();
    let raw = [vec!["c1", "b1", "d1"], vec!["c2", "d2", "b2"]];
    let input: Vec<Vec<String>> = raw
        .iter()
        .map(|d| d.iter().map(|t| t.to_string()).collect())
        .collect();
    let syms = common::syms(&input);
    let want = goal_values(&oracle, &input);
    assert_eq!(want.count, 1);
    let cfg = ParseConfig::new(Strategy::BottomUp).with_goal(goal(&grammar, &syms));
    assert_eq!(
        parse(&CLogic, &grammar, &Counting, &syms, &cfg)
            .unwrap()
            .goal_value(),
        1
    );
    let i = parse(&CLogic, &grammar, &Inside::default(), &syms, &cfg)
        .unwrap()
        .goal_value();
    assert!(
        rel_close(i, want.inside, 1e-12) && rel_close(i, 0.125, 1e-12),
        "{i}"
    );
}
