//! Subcommands of the `synpar` tool.

pub mod io;
pub mod pipeline;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use synpar::align::{self, AlignConfig};
use synpar::corpus::{parse_corpus, tokens, Multitext};
use synpar::engine::{parse, Beam, Chart, Goal, Limits, ParseConfig, RunStats, Strategy};
use synpar::estimation::{self, lexicon_em, Mode, TrainConfig};
use synpar::evaluate;
use synpar::grammar::alignment::flat_grammar;
use synpar::grammar::induce::estimate_from_multitreebank;
use synpar::grammar::{Gmtg, GrammarEvaluator, LexiconGrammar, Sym, WordLexicon};
use synpar::logic::{Logic, LogicKind};
use synpar::semiring::{
    Boolean, Counting, Forest, Inside, Semiring, SemiringKind, Viterbi, ViterbiDerivation,
    ViterbiNBest,
};
use synpar::translate::{
    self, goal_predicate, parse_treebank, treebank_to_text, Multitree, TranslateConfig,
};

use crate::io::{read, write_out};

#[derive(Debug, Parser)]
#[command(
    name = "synpar",
    version,
    about = "Generalized semiring parsing for synchronous grammars"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// boolean, counting, inside, viterbi, viterbi-deriv, viterbi-nbest:<n> or forest
    #[arg(long, global = true)]
    pub semiring: Option<String>,
    /// d1c, c, ct, ct-macro, cr or wa
    #[arg(long, global = true)]
    pub logic: Option<String>,
    /// bottomup or ucs
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Threshold θ, or `top:<W>` to keep the W best per signature
    #[arg(long, global = true)]
    pub beam: Option<String>,
    #[arg(long, global = true)]
    pub max_inferences: Option<u64>,
    #[arg(long, global = true)]
    pub max_seconds: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl Global {
    pub fn strategy_or(&self, default: Strategy) -> Result<Strategy> {
        Ok(match &self.strategy {
            Some(s) => s.parse()?,
            None => default,
        })
    }

    pub fn beam(&self) -> Result<Beam> {
        parse_beam(self.beam.as_deref())
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_inferences: self.max_inferences,
            max_seconds: self.max_seconds,
            max_terms: None,
        }
    }
}

pub fn parse_beam(s: Option<&str>) -> Result<Beam> {
    Ok(match s {
        None => Beam::default(),
        Some(s) => match s.strip_prefix("top:") {
            Some(w) => Beam::top(w.parse().with_context(|| format!("bad beam width `{w}`"))?),
            None => Beam::threshold(
                s.parse()
                    .with_context(|| format!("bad beam threshold `{s}`"))?,
            ),
        },
    })
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a word-to-word translation lexicon on a bitext.
    Lexicon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        iters: usize,
        /// Translate every dimension-1 word to itself instead of training.
        #[arg(long)]
        identity: bool,
    },
    /// Hierarchically align a multitext into a multitreebank.
    Align {
        #[arg(long)]
        structured: Option<PathBuf>,
        /// One lexicon per dimension beyond the structured grammar's.
        #[arg(long, required = true)]
        lexicon: Vec<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        fan_out: Option<usize>,
        /// `lexicon-only` aligns under a flat structure when no grammar is given.
        #[arg(long)]
        t3_fallback: Option<String>,
    },
    /// Word-align a bitext.
    Walign {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induce a grammar from a multitreebank by relative frequency.
    Induce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-estimate grammar weights on a multitext corpus.
    Train {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        /// inside or nbest:<n>
        #[arg(long, default_value = "inside")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-iteration log-likelihood table.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        no_smoothing: bool,
    },
    /// Translate the leading dimensions of a multitext into the rest.
    Translate {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        nbest: usize,
        /// Multitrees of the translations, one per line.
        #[arg(long)]
        trees: Option<PathBuf>,
    },
    /// Run the abstract parser over every tuple of a multitext.
    Multiparse {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run reports, one JSON object per line.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score hypotheses against references with a paraphrase grammar.
    Evaluate {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Train, translate and evaluate end to end.
    Pipeline(pipeline::PipelineArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Lexicon {
            input,
            out,
            iters,
            identity,
        } => {
            let corpus = read_corpus(&input)?;
            let lex = if identity {
                identity_lexicon(&corpus)
            } else {
                lexicon_em(&bitext(&corpus)?, iters)?
            };
            write_out(out.as_deref(), &lex.to_text())
        }
        Command::Align {
            structured,
            lexicon,
            input,
            out,
            fan_out,
            t3_fallback,
        } => {
            let corpus = read_corpus(&input)?;
            let lexicons = lexicon
                .iter()
                .map(|p| Ok(WordLexicon::parse(&read(p)?)?))
                .collect::<Result<Vec<_>>>()?;
            let structured =
                structured_grammar(structured.as_ref(), t3_fallback.as_deref(), &corpus)?;
            let cfg = AlignConfig {
                strategy: g.strategy_or(Strategy::UniformCost)?,
                limits: g.limits(),
                beam: g.beam()?,
                fan_out,
            };
            let tuples: Vec<Vec<Vec<Sym>>> = corpus.iter().map(Multitext::all).collect();
            let aligned = align::align_corpus(&structured, &lexicons, &tuples, &cfg)?;
            for (k, why) in &aligned.skipped {
                eprintln!("skipped tuple {}: {why}", k + 1);
            }
            write_out(out.as_deref(), &treebank_to_text(&aligned.trees))
        }
        Command::Walign {
            lexicon,
            input,
            out,
        } => {
            let lex = WordLexicon::parse(&read(&lexicon)?)?;
            let mut text = String::new();
            for (s, t) in bitext(&read_corpus(&input)?)? {
                text.push_str(&format!("{}\n", align::word_align(&lex, &s, &t)?));
            }
            write_out(out.as_deref(), &text)
        }
        Command::Induce { input, out } => {
            let trees = parse_treebank(&read(&input)?)?;
            let induced = estimate_from_multitreebank(&trees, None)?;
            for (k, why) in &induced.rejected {
                eprintln!("rejected tree {}: {why}", k + 1);
            }
            write_out(out.as_deref(), &induced.grammar.to_text())
        }
        Command::Train {
            grammar,
            corpus,
            iters,
            mode,
            out,
            table,
            no_smoothing,
        } => {
            let g0 = read_grammar(&grammar)?;
            let tuples: Vec<Vec<Vec<Sym>>> =
                read_corpus(&corpus)?.iter().map(Multitext::all).collect();
            let cfg = TrainConfig {
                iterations: iters,
                mode: mode.parse()?,
                smoothing: if no_smoothing { 0.0 } else { 1e-6 },
                limits: g.limits(),
                ..Default::default()
            };
            let run = estimation::train(&g0, &tuples, &cfg)?;
            if !run.skipped.is_empty() {
                eprintln!(
                    "tuples without a derivation: {:?}",
                    run.skipped.iter().map(|k| k + 1).collect::<Vec<_>>()
                );
            }
            if let Some(t) = table {
                write_out(Some(&t), &run.likelihood_table())?;
            } else {
                eprint!("{}", run.likelihood_table());
            }
            write_out(out.as_deref(), &run.grammar().to_text())
        }
        Command::Translate {
            grammar,
            input,
            out,
            nbest,
            trees,
        } => {
            let grammar = read_grammar(&grammar)?;
            let cfg = TranslateConfig {
                strategy: g.strategy_or(Strategy::UniformCost)?,
                limits: g.limits(),
                beam: g.beam()?,
                nbest: nbest_of(g, nbest)?,
                macro_mode: g.logic.as_deref() == Some("ct-macro"),
                trace: false,
            };
            let (text, tree_text) = translate_corpus(&grammar, &read_corpus(&input)?, &cfg)?;
            if let Some(t) = trees {
                write_out(Some(&t), &tree_text)?;
            }
            write_out(out.as_deref(), &text)
        }
        Command::Multiparse {
            grammar,
            input,
            out,
            report,
        } => {
            let grammar = read_grammar(&grammar)?;
            let corpus = read_corpus(&input)?;
            let (text, stats) = multiparse(g, &grammar, &corpus)?;
            if let Some(r) = report {
                let lines: Vec<String> = stats
                    .iter()
                    .map(|s| serde_json::to_string(s).expect("stats serialize"))
                    .collect();
                write_out(Some(&r), &(lines.join("\n") + "\n"))?;
            }
            write_out(out.as_deref(), &text)
        }
        Command::Evaluate {
            grammar,
            reference,
            hyp,
            report,
        } => {
            let grammar = read_grammar(&grammar)?;
            let refs = read_lines(&reference)?;
            let hyps = read_lines(&hyp)?;
            if refs.len() != hyps.len() {
                bail!("{} references but {} hypotheses", refs.len(), hyps.len());
            }
            let pairs: Vec<_> = refs.into_iter().zip(hyps).collect();
            let scores = evaluate::score_corpus(&grammar, &pairs, g.limits())?;
            write_out(report.as_deref(), &scores.report())
        }
        Command::Pipeline(args) => pipeline::run(g, &args),
    }
}

fn nbest_of(g: &Global, nbest: usize) -> Result<usize> {
    Ok(
        match g
            .semiring
            .as_deref()
            .map(str::parse::<SemiringKind>)
            .transpose()?
        {
            Some(SemiringKind::ViterbiNBest(n)) => n,
            Some(SemiringKind::ViterbiDeriv) => 1,
            Some(other) => bail!("translation needs viterbi-deriv or viterbi-nbest, not {other}"),
            None => nbest,
        },
    )
}

pub fn read_grammar(path: &Path) -> Result<Gmtg> {
    Gmtg::parse(&read(path)?).with_context(|| format!("in grammar {}", path.display()))
}

pub fn read_corpus(path: &Path) -> Result<Vec<Multitext>> {
    parse_corpus(&read(path)?).with_context(|| format!("in multitext {}", path.display()))
}

fn read_lines(path: &Path) -> Result<Vec<Vec<Sym>>> {
    Ok(read(path)?.lines().map(tokens).collect())
}

/// Dimension 1 and 2 of every tuple.
pub fn bitext(corpus: &[Multitext]) -> Result<Vec<(Vec<Sym>, Vec<Sym>)>> {
    corpus
        .iter()
        .enumerate()
        .map(|(k, m)| match (m.dim(0), m.dim(1)) {
            (Some(a), Some(b)) => Ok((a.to_vec(), b.to_vec())),
            _ => bail!("tuple {} lacks dimension 1 or 2", k + 1),
        })
        .collect()
}

pub fn identity_lexicon(corpus: &[Multitext]) -> WordLexicon {
    let mut vocab: Vec<Sym> = corpus
        .iter()
        .filter_map(|m| m.dim(0))
        .flatten()
        .cloned()
        .collect();
    vocab.sort();
    vocab.dedup();
    WordLexicon::identity(&vocab)
}

/// The grammar structuring dimension 1 during alignment.
pub fn structured_grammar(
    path: Option<&PathBuf>,
    fallback: Option<&str>,
    corpus: &[Multitext],
) -> Result<Gmtg> {
    match (path, fallback) {
        (Some(p), _) => read_grammar(p),
        (None, Some("lexicon-only")) => {
            let mut vocab: Vec<Sym> = corpus
                .iter()
                .filter_map(|m| m.dim(0))
                .flatten()
                .cloned()
                .collect();
            vocab.sort();
            vocab.dedup();
            Ok(flat_grammar(&vocab))
        }
        (None, Some(other)) => bail!("unknown fallback `{other}`"),
        (None, None) => bail!(
            "no structured grammar given; use --t3-fallback lexicon-only to align without one"
        ),
    }
}

/// Output dimensions as a multitext and the multitrees, one line each;
/// untranslatable tuples get empty output dimensions and a comment line.
pub fn translate_corpus(
    grammar: &Gmtg,
    corpus: &[Multitext],
    cfg: &TranslateConfig,
) -> Result<(String, String)> {
    let mut blocks_mt = Vec::new();
    let mut trees = String::new();
    for (k, m) in corpus.iter().enumerate() {
        let input = m
            .input_prefix()
            .with_context(|| format!("tuple {}", k + 1))?;
        let t = translate::translate(grammar, &input, cfg)?;
        let mut dims: Vec<Option<Vec<Sym>>> = vec![None; grammar.dims()];
        for (d, out) in (input.len()..grammar.dims()).zip(&t.outputs) {
            dims[d] = Some(out.clone());
        }
        if t.tree.is_none() {
            for d in dims.iter_mut().skip(input.len()) {
                *d = Some(Vec::new());
            }
        }
        blocks_mt.push(Multitext { dims });
        match &t.tree {
            Some(tree) => trees.push_str(&format!("{tree}\n")),
            None => trees.push_str(&format!("# tuple {} untranslatable\n", k + 1)),
        }
    }
    Ok((synpar::corpus::corpus_to_text(&blocks_mt), trees))
}

fn derivation_text(d: &synpar::semiring::DerivNode) -> String {
    Multitree::from_derivation(d).map_or_else(|_| d.to_string(), |t| t.to_string())
}

fn multiparse(g: &Global, grammar: &Gmtg, corpus: &[Multitext]) -> Result<(String, Vec<RunStats>)> {
    let kind: LogicKind = g.logic.as_deref().unwrap_or("c").parse()?;
    let semiring: SemiringKind = g.semiring.as_deref().unwrap_or("inside").parse()?;
    let logic = kind.build();
    let default_strategy = match semiring {
        SemiringKind::Viterbi | SemiringKind::ViterbiDeriv => Strategy::UniformCost,
        _ => Strategy::BottomUp,
    };
    let mut text = String::new();
    let mut stats = Vec::new();
    for (k, m) in corpus.iter().enumerate() {
        let input = match kind {
            LogicKind::Ct | LogicKind::CtMacro => m.input_prefix()?,
            _ => m.all(),
        };
        let goal = match kind {
            LogicKind::Wa => Goal::None,
            _ => Goal::Predicate(goal_predicate(grammar.start(), &input)),
        };
        let cfg = ParseConfig {
            strategy: g.strategy_or(default_strategy)?,
            goal,
            limits: g.limits(),
            beam: g.beam()?,
            ..Default::default()
        };
        let (value, s) = match semiring {
            SemiringKind::Boolean => run_one(&*logic, grammar, &Boolean, &input, &cfg, |c| {
                c.goal_value().to_string()
            })?,
            SemiringKind::Counting => run_one(&*logic, grammar, &Counting, &input, &cfg, |c| {
                c.goal_value().to_string()
            })?,
            SemiringKind::Inside => {
                run_one(&*logic, grammar, &Inside::default(), &input, &cfg, |c| {
                    c.goal_value().to_string()
                })?
            }
            SemiringKind::Viterbi => {
                run_one(&*logic, grammar, &Viterbi::default(), &input, &cfg, |c| {
                    c.goal_value().to_string()
                })?
            }
            SemiringKind::ViterbiDeriv => {
                run_one(&*logic, grammar, &ViterbiDerivation, &input, &cfg, |c| {
                    let v = c.goal_value();
                    match v.derivs.first() {
                        Some(d) => format!("{}\t{}", v.prob, derivation_text(d)),
                        None => "0".into(),
                    }
                })?
            }
            SemiringKind::ViterbiNBest(n) => {
                run_one(&*logic, grammar, &ViterbiNBest::new(n), &input, &cfg, |c| {
                    let v = c.goal_value();
                    if v.is_empty() {
                        return "0".into();
                    }
                    v.iter()
                        .map(|s| {
                            format!(
                                "{}\t{}",
                                s.prob,
                                s.derivs
                                    .first()
                                    .map(|d| derivation_text(d))
                                    .unwrap_or_default()
                            )
                        })
                        .collect::<Vec<_>>()
                        .join("\t")
                })?
            }
            SemiringKind::Forest => run_one(&*logic, grammar, &Forest, &input, &cfg, |c| {
                let edges: usize = c
                    .goal_ids()
                    .iter()
                    .map(|&id| c.antecedent_sets(id).count())
                    .sum();
                format!(
                    "{}\tgoal-edges={edges}\tinferences={}",
                    c.goal_value(),
                    c.inferences().len()
                )
            })?,
        };
        text.push_str(&format!("{}\t{}\t{}\n", k + 1, value, s.termination));
        stats.push(s);
    }
    Ok((text, stats))
}

fn run_one<S: Semiring>(
    logic: &dyn Logic,
    grammar: &dyn GrammarEvaluator,
    semiring: &S,
    input: &[Vec<Sym>],
    cfg: &ParseConfig,
    show: impl Fn(&Chart<S>) -> String,
) -> Result<(String, RunStats)> {
    let chart = parse(logic, grammar, semiring, input, cfg)?;
    Ok((show(&chart), chart.stats.clone()))
}

/// Lexicon grammar evaluator, exposed for tests of the word aligner.
pub fn lexicon_grammar(lex: &WordLexicon) -> LexiconGrammar {
    LexiconGrammar::new(lex)
}

pub fn train_mode(s: &str) -> Result<Mode> {
    Ok(s.parse()?)
}
