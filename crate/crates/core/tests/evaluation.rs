use synpar::corpus::tokens;
use synpar::engine::Limits;
use synpar::evaluate::{score_corpus, score_pair};
use synpar::grammar::Gmtg;

/// Monolingual paraphrase grammar with a production that lets the two
/// prepositional modifiers of a verb phrase change places.
fn paraphrase_grammar() -> Gmtg {
    let mut text = String::from(
        "\
gmtg D=2 start=S,S
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
    let lexicon = [
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
    ];
    for (cat, word, w) in lexicon {
        let pre = format!("W_{word}");
        text.push_str(&format!(
            "P {cat},{cat} -> [1|2] ({pre},_)(_,{pre}) @ {w}\n"
        ));
        text.push_str(&format!(
            "T d=1 {pre} -> {word} @ 1\nT d=2 {pre} -> {word} @ 1\n"
        ));
    }
    Gmtg::parse(&text).unwrap()
}

const R: &str = "pat asked sandy on friday about the man from oslo";
const T1: &str = "pat asked sandy about the man from oslo on friday";
const T2: &str = "pat from oslo asked sandy on friday about the man";

#[test]
fn swapped_modifiers_are_a_paraphrase() {
    let g = paraphrase_grammar();
    let l = Limits::default();
    let identical = score_pair(&g, &tokens(R), &tokens(R), l).unwrap();
    let swapped = score_pair(&g, &tokens(R), &tokens(T1), l).unwrap();
    assert!(identical > 0.0);
    assert!(swapped > 0.0);
    assert!(swapped < identical);
}

#[test]
fn moved_modifier_is_not_a_paraphrase() {
    let g = paraphrase_grammar();
    assert_eq!(
        score_pair(&g, &tokens(R), &tokens(T2), Limits::default()).unwrap(),
        0.0
    );
}

#[test]
fn corpus_report_counts_failures() {
    let g = paraphrase_grammar();
    let pairs = vec![
        (tokens(R), tokens(T1)),
        (tokens(R), tokens(T2)),
        (tokens(R), tokens(R)),
    ];
    let cs = score_corpus(&g, &pairs, Limits::default()).unwrap();
    assert_eq!(cs.unparseable, 1);
    assert!(cs.summary > 0.0);
    assert_eq!(cs.report().lines().count(), 5);
}
