//! The end-to-end recipe: lexicon, structure, alignment, induction and
//! re-estimation for translation and for paraphrase scoring, followed by
//! translation and evaluation of held-out input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;

use synpar::align::{self, AlignConfig};
use synpar::corpus::{corpus_to_text, parse_corpus, Multitext};
use synpar::engine::Strategy;
use synpar::estimation::{self, lexicon_em, TrainConfig};
use synpar::evaluate;
use synpar::grammar::induce::estimate_from_multitreebank;
use synpar::grammar::{Gmtg, GrammarEvaluator, Label, Sym, WordLexicon, LAMBDA};
use synpar::sample::Sampler;
use synpar::translate::{parse_treebank, treebank_to_text, Multitree, TranslateConfig};

use crate::{bitext, identity_lexicon, structured_grammar, translate_corpus, Global};

/// Keys accepted in the config file and as flags.
pub const KEYS: &[&str] = &[
    "out_dir",
    "train",
    "test",
    "structured",
    "treebank",
    "t3_fallback",
    "synthetic",
    "synthetic_size",
    "test_size",
    "paraphrase",
    "mono",
    "lexicon_iters",
    "iters",
    "mode",
    "nbest",
    "fan_out",
    "seed",
];

#[derive(Debug, Clone, Default, Args)]
pub struct PipelineArgs {
    /// key=value file; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory receiving every artifact.
    #[arg(long)]
    pub out_dir: Option<String>,
    /// Training multitext.
    #[arg(long)]
    pub train: Option<String>,
    /// Test multitext: dimension 1 is translated, dimension 2 is the reference.
    #[arg(long)]
    pub test: Option<String>,
    /// Monolingual grammar structuring dimension 1.
    #[arg(long)]
    pub structured: Option<String>,
    /// Monolingual treebank of dimension 1 to induce that grammar from.
    #[arg(long)]
    pub treebank: Option<String>,
    #[arg(long)]
    pub t3_fallback: Option<String>,
    /// Sample training and test corpora from this grammar.
    #[arg(long)]
    pub synthetic: Option<String>,
    #[arg(long)]
    pub synthetic_size: Option<String>,
    #[arg(long)]
    pub test_size: Option<String>,
    /// Train a paraphrase grammar and score translations (true or false).
    #[arg(long)]
    pub paraphrase: Option<String>,
    /// Monolingual target-language multitext for the paraphrase grammar.
    #[arg(long)]
    pub mono: Option<String>,
    #[arg(long)]
    pub lexicon_iters: Option<String>,
    #[arg(long)]
    pub iters: Option<String>,
    /// inside or nbest:<n>
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub nbest: Option<String>,
    #[arg(long)]
    pub fan_out: Option<String>,
}

impl PipelineArgs {
    fn flags(&self, global: &Global) -> Vec<(&'static str, String)> {
        let fields = [
            ("out_dir", &self.out_dir),
            ("train", &self.train),
            ("test", &self.test),
            ("structured", &self.structured),
            ("treebank", &self.treebank),
            ("t3_fallback", &self.t3_fallback),
            ("synthetic", &self.synthetic),
            ("synthetic_size", &self.synthetic_size),
            ("test_size", &self.test_size),
            ("paraphrase", &self.paraphrase),
            ("mono", &self.mono),
            ("lexicon_iters", &self.lexicon_iters),
            ("iters", &self.iters),
            ("mode", &self.mode),
            ("nbest", &self.nbest),
            ("fan_out", &self.fan_out),
        ];
        let mut out: Vec<(&str, String)> = fields
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        if let Some(s) = global.seed {
            out.push(("seed", s.to_string()));
        }
        out
    }
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value", k + 1))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key `{key}`", k + 1);
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

/// Settings after merging the config file with flags.
#[derive(Debug, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const PATH_KEYS: &[&str] = &[
    "out_dir",
    "train",
    "test",
    "structured",
    "treebank",
    "synthetic",
    "mono",
];

impl Settings {
    pub fn merge(args: &PipelineArgs, global: &Global) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(p) = &args.config {
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            for (k, v) in parse_config(&crate::io::read(p)?)? {
                let v = if PATH_KEYS.contains(&k.as_str()) {
                    base.join(&v).to_string_lossy().into_owned()
                } else {
                    v
                };
                values.insert(k, v);
            }
        }
        for (k, v) in args.flags(global) {
            values.insert(k.to_string(), v);
        }
        Ok(Settings { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Paths in the config file are relative to the file; paths given as
    /// flags are relative to the working directory.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("bad value `{v}` for `{key}`")),
        }
    }
}

struct Stage<'a> {
    dir: &'a Path,
}

impl Stage<'_> {
    /// Writes an artifact and parses it back, checking the text is stable.
    fn emit<T>(
        &self,
        name: &str,
        text: String,
        parse: impl Fn(&str) -> synpar::Result<T>,
        show: impl Fn(&T) -> String,
    ) -> Result<T> {
        let path = self.dir.join(name);
        fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
        let back = fs::read_to_string(&path)?;
        let value = parse(&back).with_context(|| format!("re-reading {name}"))?;
        if show(&value) != text {
            bail!("{name} does not round-trip");
        }
        Ok(value)
    }
}

fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().with_context(|| format!("stage {name} failed"))
}

fn map_labels(tree: &Multitree, f: &impl Fn(&Label) -> Label) -> Multitree {
    match tree {
        Multitree::Leaf { labels, dim, token } => Multitree::Leaf {
            labels: labels.iter().map(f).collect(),
            dim: *dim,
            token: token.clone(),
        },
        Multitree::Node {
            labels,
            pav,
            children,
        } => Multitree::Node {
            labels: labels.iter().map(f).collect(),
            pav: pav.clone(),
            children: children.iter().map(|c| map_labels(c, f)).collect(),
        },
    }
}

/// Head-free dimension-`dim` projection with λ renamed to `X`.
fn monolingual(trees: &[Multitree], dim: usize) -> Vec<Multitree> {
    trees
        .iter()
        .filter_map(|t| t.project(dim))
        .map(|t| {
            map_labels(&t, &|l: &Label| {
                let l = l.without_head();
                if l.sym.as_deref() == Some(LAMBDA) {
                    Label::new("X")
                } else {
                    l
                }
            })
        })
        .collect()
}

pub fn run(global: &Global, args: &PipelineArgs) -> Result<()> {
    let s = Settings::merge(args, global)?;
    let dir = s
        .path("out_dir")
        .ok_or_else(|| anyhow!("no out_dir given"))?;
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let st = Stage { dir: &dir };
    let seed: u64 = s.num("seed", 0)?;
    let limits = global.limits();
    let strategy = global.strategy_or(Strategy::UniformCost)?;
    let beam = global.beam()?;
    let fan_out: Option<usize> = s.get("fan_out").map(|_| s.num("fan_out", 1)).transpose()?;

    // corpora
    let (train, test, sampled_trees) = stage("input", || {
        if let Some(g) = s.path("synthetic") {
            let grammar = Gmtg::parse(&crate::io::read(&g)?)?;
            let n: usize = s.num("synthetic_size", 20)?;
            let m: usize = s.num("test_size", 5)?;
            let mut sampler = Sampler::new(&grammar, seed);
            let sample = sampler.corpus(n + m)?;
            let (train, test) = sample.split_at(n);
            let texts = |part: &[(Multitree, Vec<Vec<Sym>>)]| {
                part.iter()
                    .map(|(_, y)| Multitext::from_tokens(y.clone()))
                    .collect::<Vec<_>>()
            };
            let trees: Vec<Multitree> = train.iter().map(|(t, _)| t.clone()).collect();
            st.emit(
                "generator.trees",
                treebank_to_text(&trees),
                parse_treebank,
                |t| treebank_to_text(t),
            )?;
            Ok((texts(train), texts(test), Some(trees)))
        } else {
            let train = parse_corpus(&crate::io::read(
                &s.path("train")
                    .ok_or_else(|| anyhow!("no train corpus given"))?,
            )?)?;
            let test = match s.path("test") {
                Some(p) => parse_corpus(&crate::io::read(&p)?)?,
                None => Vec::new(),
            };
            Ok((train, test, None))
        }
    })?;
    let train = st.emit("train.txt", corpus_to_text(&train), parse_corpus, |c| {
        corpus_to_text(c)
    })?;
    let test = st.emit("test.txt", corpus_to_text(&test), parse_corpus, |c| {
        corpus_to_text(c)
    })?;
    let tuples: Vec<Vec<Vec<Sym>>> = train.iter().map(Multitext::all).collect();

    let lexicon = stage("T1", || {
        let lex = lexicon_em(&bitext(&train)?, s.num("lexicon_iters", 5)?)?;
        st.emit(
            "lexicon.txt",
            lex.to_text(),
            WordLexicon::parse,
            WordLexicon::to_text,
        )
    })?;

    let structured = stage("T2", || {
        let grammar = if let Some(p) = s.path("structured") {
            Gmtg::parse(&crate::io::read(&p)?)?
        } else if let Some(p) = s.path("treebank") {
            estimate_from_multitreebank(&parse_treebank(&crate::io::read(&p)?)?, None)?.grammar
        } else if let Some(trees) = &sampled_trees {
            let mono: Vec<Multitree> = trees.iter().filter_map(|t| t.project(0)).collect();
            let mono = st.emit(
                "treebank1.trees",
                treebank_to_text(&mono),
                parse_treebank,
                |t| treebank_to_text(t),
            )?;
            estimate_from_multitreebank(&mono, None)?.grammar
        } else {
            structured_grammar(None, s.get("t3_fallback"), &train)?
        };
        st.emit(
            "structured.gmtg",
            grammar.to_text(),
            Gmtg::parse,
            Gmtg::to_text,
        )
    })?;

    let align_cfg = AlignConfig {
        strategy,
        limits,
        beam,
        fan_out,
    };
    let aligned = stage("T3", || {
        let out = align::align_corpus(
            &structured,
            std::slice::from_ref(&lexicon),
            &tuples,
            &align_cfg,
        )?;
        if out.trees.is_empty() {
            bail!("no training tuple could be aligned");
        }
        st.emit(
            "aligned.trees",
            treebank_to_text(&out.trees),
            parse_treebank,
            |t| treebank_to_text(t),
        )
    })?;

    let initial = stage("T4", || {
        let g = estimate_from_multitreebank(&aligned, None)?.grammar;
        st.emit("initial.gmtg", g.to_text(), Gmtg::parse, Gmtg::to_text)
    })?;

    let train_cfg = TrainConfig {
        iterations: s.num("iters", 10)?,
        mode: s.get("mode").unwrap_or("inside").parse()?,
        limits,
        ..Default::default()
    };
    let trained = stage("T5", || {
        let run = estimation::train(&initial, &tuples, &train_cfg)?;
        fs::write(dir.join("likelihood.tsv"), run.likelihood_table())?;
        st.emit(
            "trained.gmtg",
            run.grammar().to_text(),
            Gmtg::parse,
            Gmtg::to_text,
        )
    })?;

    let paraphrase = match s.get("paraphrase").unwrap_or("true") {
        "true" => {
            let mono = match s.path("mono") {
                Some(p) => parse_corpus(&crate::io::read(&p)?)?,
                None => train.clone(),
            };
            let target: Vec<Vec<Sym>> = mono
                .iter()
                .filter_map(|m| {
                    m.dim(if s.get("mono").is_some() { 0 } else { 1 })
                        .map(<[Sym]>::to_vec)
                })
                .collect();
            let pairs: Vec<Multitext> = target
                .iter()
                .map(|t| Multitext::from_tokens(vec![t.clone(), t.clone()]))
                .collect();
            let lex = stage("T1'", || {
                let lex = identity_lexicon(&pairs);
                st.emit(
                    "para_lexicon.txt",
                    lex.to_text(),
                    WordLexicon::parse,
                    WordLexicon::to_text,
                )
            })?;
            let structure = stage("T2'", || {
                let mono = monolingual(&aligned, 1);
                let mono = st.emit(
                    "treebank2.trees",
                    treebank_to_text(&mono),
                    parse_treebank,
                    |t| treebank_to_text(t),
                )?;
                let g = estimate_from_multitreebank(&mono, None)?.grammar;
                st.emit(
                    "para_structured.gmtg",
                    g.to_text(),
                    Gmtg::parse,
                    Gmtg::to_text,
                )
            })?;
            let para_tuples: Vec<Vec<Vec<Sym>>> = pairs.iter().map(Multitext::all).collect();
            let para_aligned = stage("T3'", || {
                let out = align::align_corpus(
                    &structure,
                    std::slice::from_ref(&lex),
                    &para_tuples,
                    &align_cfg,
                )?;
                if out.trees.is_empty() {
                    bail!("no target sentence could be aligned with itself");
                }
                st.emit(
                    "para_aligned.trees",
                    treebank_to_text(&out.trees),
                    parse_treebank,
                    |t| treebank_to_text(t),
                )
            })?;
            let para_initial = stage("T4'", || {
                let g = estimate_from_multitreebank(&para_aligned, None)?.grammar;
                st.emit("para_initial.gmtg", g.to_text(), Gmtg::parse, Gmtg::to_text)
            })?;
            Some(stage("T5'", || {
                let run = estimation::train(&para_initial, &para_tuples, &train_cfg)?;
                fs::write(dir.join("para_likelihood.tsv"), run.likelihood_table())?;
                st.emit(
                    "paraphrase.gmtg",
                    run.grammar().to_text(),
                    Gmtg::parse,
                    Gmtg::to_text,
                )
            })?)
        }
        "false" => None,
        other => bail!("paraphrase must be true or false, not `{other}`"),
    };

    let translations = stage("A1-A2", || {
        let inputs: Vec<Multitext> = test.iter().map(|m| m.select(&[0])).collect();
        let mut inputs = inputs;
        for m in &mut inputs {
            m.dims.resize(trained.dims(), None);
        }
        let cfg = TranslateConfig {
            strategy,
            limits,
            beam,
            nbest: s.num("nbest", 8)?,
            ..Default::default()
        };
        let (text, trees) = translate_corpus(&trained, &inputs, &cfg)?;
        fs::write(dir.join("translations.trees"), &trees)?;
        st.emit("translations.txt", text, parse_corpus, |c| {
            corpus_to_text(c)
        })
    })?;

    if let Some(para) = paraphrase {
        stage("E1", || {
            let pairs: Vec<(Vec<Sym>, Vec<Sym>)> = test
                .iter()
                .zip(&translations)
                .map(|(r, h)| {
                    (
                        r.dim(1).unwrap_or_default().to_vec(),
                        h.dim(1).unwrap_or_default().to_vec(),
                    )
                })
                .collect();
            let scores = evaluate::score_corpus(&para, &pairs, limits)?;
            fs::write(dir.join("scores.tsv"), scores.report())?;
            Ok(())
        })?;
    }
    Ok(())
}
