//! The `unischema` command line: `ingest`, `train`, `predict`, `eval`,
//! `gradcheck` and `synth`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
//! failure.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evaluation::{evaluate, evaluate_pooled, write_predictions, write_report, EvalSplit, MapWeighting};
use crate::model_file::ModelFile;
use crate::scoring::{ModelKind, RankedPrediction};
use crate::store::{ingest, parse_fact_line, Fact, FactStore, RelationId, RelationSource, SourceRule};
use crate::training::{train_with, TrainConfig};
use crate::verification::{
    check_gradients, generate_implicature_corpus, generate_lowrank_corpus, GradCheckConfig, ImplicatureRule,
    SynthSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Prefix that marks structured relations when none is given.
pub const DEFAULT_STRUCTURED_PREFIX: &str = "/";

#[derive(Parser, Debug)]
#[command(name = "unischema", version, about = "Universal-schema relation prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a fact file and print vocabulary and fact counts.
    Ingest(IngestArgs),
    /// Train a model on a fact file and write the model file.
    Train(TrainArgs),
    /// Print the top-scoring tuples for one relation.
    Predict(PredictArgs),
    /// Rank held-out facts and report per-relation AP and MAP.
    Eval(EvalArgs),
    /// Compare analytic gradients with finite differences.
    Gradcheck(GradcheckArgs),
    /// Generate a synthetic corpus with a manifest.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    facts: PathBuf,
    /// Relation-name prefix marking structured relations (repeatable).
    #[arg(long = "structured-prefix")]
    structured_prefix: Vec<String>,
    /// Write the deduplicated facts here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    facts: PathBuf,
    /// TOML file with training settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model components, e.g. `nfe`, `nf`, `f`.
    #[arg(long, value_parser = parse_kind)]
    model: Option<ModelKind>,
    #[arg(long)]
    kf: Option<usize>,
    #[arg(long)]
    ke: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// L2 strength for every parameter block.
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long = "l2-relation")]
    l2_relation: Option<f64>,
    #[arg(long = "l2-tuple")]
    l2_tuple: Option<f64>,
    #[arg(long = "l2-weight")]
    l2_weight: Option<f64>,
    #[arg(long = "l2-slot")]
    l2_slot: Option<f64>,
    #[arg(long = "l2-entity")]
    l2_entity: Option<f64>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long = "init-scale")]
    init_scale: Option<f64>,
    #[arg(long = "structured-prefix")]
    structured_prefix: Vec<String>,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    /// Run report path; defaults to `<out>.report.tsv`.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    model: PathBuf,
    relation: String,
    #[arg(long = "top-k", default_value_t = 10)]
    top_k: usize,
    /// Also rank tuples already observed with the relation.
    #[arg(long = "include-observed")]
    include_observed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Collection {
    Structured,
    Pattern,
    All,
}

impl Collection {
    fn admits(self, source: RelationSource) -> bool {
        match self {
            Collection::All => true,
            Collection::Structured => source == RelationSource::Structured,
            Collection::Pattern => source == RelationSource::Pattern,
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    model: PathBuf,
    test: PathBuf,
    #[arg(long, value_enum, default_value_t = Collection::All)]
    collection: Collection,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every ranked candidate in the prediction-dump format.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Weight relations by their number of positives.
    #[arg(long)]
    weighted: bool,
    /// Further systems whose top candidates join the judged pool.
    #[arg(long)]
    pool: Vec<PathBuf>,
    #[arg(long = "pool-depth", default_value_t = 100)]
    pool_depth: usize,
}

#[derive(Args, Debug)]
struct GradcheckArgs {
    /// Model components, or `all` for every combination.
    #[arg(long, default_value = "nfe")]
    model: String,
    #[arg(long, default_value_t = 3)]
    kf: usize,
    #[arg(long, default_value_t = 3)]
    ke: usize,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = GradCheckConfig::default().seed)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    #[arg(long)]
    relations: Option<usize>,
    #[arg(long)]
    tuples: Option<usize>,
    #[arg(long)]
    entities: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    holdout: Option<f64>,
    /// Number of relations named as structured.
    #[arg(long)]
    structured: Option<usize>,
    /// Implicature rule `antecedent,consequent,coverage` (repeatable).
    #[arg(long, value_parser = parse_rule)]
    rule: Vec<ImplicatureRule>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_kind(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rule(s: &str) -> std::result::Result<ImplicatureRule, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("expected antecedent,consequent,coverage; got {s:?}"));
    };
    let num = |x: &str| x.parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok(ImplicatureRule {
        antecedent: num(a)?,
        consequent: num(b)?,
        coverage: c.parse().map_err(|e| format!("{c:?}: {e}"))?,
    })
}

/// Settings read from a `train --config` TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainFile {
    pub model: Option<String>,
    pub kf: Option<usize>,
    pub ke: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub negatives: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub init_scale: Option<f64>,
    pub structured_prefix: Option<Vec<String>>,
    pub l2: Option<L2File>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct L2File {
    pub all: Option<f64>,
    pub relation: Option<f64>,
    pub tuple: Option<f64>,
    pub weight: Option<f64>,
    pub slot: Option<f64>,
    pub entity: Option<f64>,
}

impl TrainFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn resolve_train_config(args: &TrainArgs, file: &TrainFile) -> Result<(TrainConfig, SourceRule)> {
    let mut cfg = TrainConfig::default();
    if let Some(m) = &file.model {
        cfg.kind = m.parse()?;
    }
    set(&mut cfg.latent_dim, file.kf);
    set(&mut cfg.entity_dim, file.ke);
    set(&mut cfg.epochs, file.epochs);
    set(&mut cfg.learning_rate, file.learning_rate);
    set(&mut cfg.negatives_per_positive, file.negatives);
    set(&mut cfg.seed, file.seed);
    set(&mut cfg.workers, file.workers);
    set(&mut cfg.init_scale, file.init_scale);
    if let Some(l2) = &file.l2 {
        if let Some(all) = l2.all {
            cfg.l2 = crate::training::L2::uniform(all);
        }
        set(&mut cfg.l2.relation, l2.relation);
        set(&mut cfg.l2.tuple, l2.tuple);
        set(&mut cfg.l2.weight, l2.weight);
        set(&mut cfg.l2.slot, l2.slot);
        set(&mut cfg.l2.entity, l2.entity);
    }

    set(&mut cfg.kind, args.model);
    set(&mut cfg.latent_dim, args.kf);
    set(&mut cfg.entity_dim, args.ke);
    set(&mut cfg.epochs, args.epochs);
    set(&mut cfg.learning_rate, args.lr);
    set(&mut cfg.negatives_per_positive, args.negatives);
    set(&mut cfg.seed, args.seed);
    set(&mut cfg.workers, args.workers);
    set(&mut cfg.init_scale, args.init_scale);
    if let Some(all) = args.l2 {
        cfg.l2 = crate::training::L2::uniform(all);
    }
    set(&mut cfg.l2.relation, args.l2_relation);
    set(&mut cfg.l2.tuple, args.l2_tuple);
    set(&mut cfg.l2.weight, args.l2_weight);
    set(&mut cfg.l2.slot, args.l2_slot);
    set(&mut cfg.l2.entity, args.l2_entity);
    cfg.validate()?;

    let prefixes = if !args.structured_prefix.is_empty() {
        args.structured_prefix.clone()
    } else {
        file.structured_prefix
            .clone()
            .unwrap_or_else(|| vec![DEFAULT_STRUCTURED_PREFIX.to_string()])
    };
    Ok((cfg, SourceRule::new(prefixes)))
}

fn source_rule(prefixes: &[String]) -> SourceRule {
    if prefixes.is_empty() {
        SourceRule::new([DEFAULT_STRUCTURED_PREFIX])
    } else {
        SourceRule::new(prefixes.iter().cloned())
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Exit code for an error raised by a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::NoComponents | Error::Synth(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (program name first) and runs the command against the
/// process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output and diagnostic streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(&a, out),
        Command::Train(a) => cmd_train(&a, out, err),
        Command::Predict(a) => cmd_predict(&a, out, err),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Gradcheck(a) => cmd_gradcheck(&a, out),
        Command::Synth(a) => cmd_synth(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn cmd_ingest(args: &IngestArgs, out: &mut dyn Write) -> Result<i32> {
    let store = ingest(open(&args.facts)?, source_rule(&args.structured_prefix))?;
    writeln!(out, "{}", store.counts())?;
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        store.write_facts(&mut w)?;
        w.flush()?;
    }
    Ok(EXIT_OK)
}

fn cmd_train(args: &TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = match &args.config {
        Some(path) => TrainFile::read(path)?,
        None => TrainFile::default(),
    };
    let (cfg, rule) = resolve_train_config(args, &file)?;
    let store = ingest(open(&args.facts)?, rule)?;
    writeln!(err, "{}", store.counts())?;
    let started = Instant::now();
    let (params, report) = train_with(&store, &cfg, |stats| {
        if stats.epoch == 0 || (stats.epoch + 1) % 10 == 0 || stats.epoch + 1 == cfg.epochs {
            let _ = writeln!(err, "epoch {}\tloss {:.6}", stats.epoch, stats.mean_loss);
        }
    })?;

    let model = ModelFile::new(store, params, cfg.seed)?;
    let mut w = create(&args.out)?;
    model.write(&mut w)?;
    w.flush()?;

    let report_path = args.report.clone().unwrap_or_else(|| {
        let mut name = args.out.clone().into_os_string();
        name.push(".report.tsv");
        PathBuf::from(name)
    });
    let mut w = create(&report_path)?;
    report.write_tsv(&mut w)?;
    w.flush()?;

    writeln!(
        out,
        "wrote {} ({} model, {} epochs, {} skipped relations, {:.1}s)",
        args.out.display(),
        cfg.kind,
        report.epochs.len(),
        report.skipped_relations,
        started.elapsed().as_secs_f64()
    )?;
    Ok(EXIT_OK)
}

/// The three relation names closest to `name` by edit distance.
fn nearest_relations<'a>(store: &'a FactStore, name: &str) -> Vec<&'a str> {
    let mut scored: Vec<(usize, &str)> = store
        .relations()
        .names()
        .iter()
        .map(|n| (strsim::levenshtein(name, n), n.as_str()))
        .collect();
    scored.sort();
    scored.iter().take(3).map(|&(_, n)| n).collect()
}

fn cmd_predict(args: &PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let model = ModelFile::read(open(&args.model)?)?;
    let store = &model.store;
    let Some(r) = store.relation_id(&args.relation) else {
        writeln!(err, "nearest relations: {}", nearest_relations(store, &args.relation).join(", "))?;
        return Err(Error::UnknownName {
            kind: "relation",
            name: args.relation.clone(),
        });
    };
    let mut predictions: Vec<RankedPrediction> = Vec::new();
    for t in store.tuple_ids() {
        if !args.include_observed && store.contains(r, t) {
            continue;
        }
        predictions.push(model.params.predict(store, r, t)?);
    }
    crate::evaluation::sort_predictions(&mut predictions);
    predictions.truncate(args.top_k);
    let mut w = BufWriter::new(out);
    write_predictions(&mut w, store, &predictions, |p| store.contains(p.relation, p.tuple))?;
    w.flush()?;
    Ok(EXIT_OK)
}

/// Reads held-out facts by name against the training vocabulary.
fn read_test_facts<R: BufRead>(reader: R, store: &FactStore) -> Result<Vec<Fact>> {
    let mut facts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let Some([rel, e1, e2]) = parse_fact_line(&line, i + 1)? else {
            continue;
        };
        let relation = store.relation_id(rel).ok_or_else(|| Error::UnknownName {
            kind: "relation",
            name: rel.to_string(),
        })?;
        let tuple = store.tuple_by_names(e1, e2).ok_or_else(|| Error::UnknownName {
            kind: "tuple",
            name: format!("{e1}\t{e2}"),
        })?;
        if store.contains(relation, tuple) {
            return Err(Error::Evaluation(format!(
                "line {}: test fact {rel} {e1} {e2} is also a training fact",
                i + 1
            )));
        }
        facts.push(Fact::new(relation, tuple));
    }
    Ok(facts)
}

fn same_training_data(a: &FactStore, b: &FactStore) -> bool {
    a.relations().names() == b.relations().names()
        && a.entities().names() == b.entities().names()
        && a.tuple_table() == b.tuple_table()
        && a.facts().eq(b.facts())
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let model = ModelFile::read(open(&args.model)?)?;
    let test = read_test_facts(open(&args.test)?, &model.store)?;
    let split = EvalSplit::with_unobserved_candidates(model.store.clone(), test)?;
    let store = split.train();
    let include = |r: RelationId| args.collection.admits(store.relation_source(r));

    let mut notes = vec![
        "labels come from held-out facts only; unlisted candidates count as negatives".to_string(),
        format!("collection\t{:?}", args.collection).to_lowercase(),
    ];
    let reports = if args.pool.is_empty() {
        evaluate(&split, &model.params, include)?.reports
    } else {
        let mut others = Vec::with_capacity(args.pool.len());
        for path in &args.pool {
            let other = ModelFile::read(open(path)?)?;
            if !same_training_data(&other.store, store) {
                return Err(Error::Evaluation(format!(
                    "{} was trained on different data",
                    path.display()
                )));
            }
            others.push(other.params);
        }
        let mut systems = vec![&model.params];
        systems.extend(others.iter());
        notes.push(format!(
            "pooled over {} systems at depth {}",
            systems.len(),
            args.pool_depth
        ));
        let mut evals = evaluate_pooled(&split, &systems, args.pool_depth)?;
        let mut first = evals.swap_remove(0);
        first.reports.retain(|rep| include(rep.relation));
        first.reports
    };
    if reports.is_empty() {
        return Err(Error::Evaluation("empty collection".into()));
    }
    let weighting = if args.weighted {
        MapWeighting::ByPositives
    } else {
        MapWeighting::Unweighted
    };
    notes.push(format!("weighting\t{weighting:?}").to_lowercase());

    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_report(&mut w, store, &reports, weighting, &notes)?;
            w.flush()?;
        }
        None => {
            write_report(&mut *out, store, &reports, weighting, &notes)?;
        }
    }
    if let Some(path) = &args.predictions {
        let test: BTreeSet<Fact> = split.test().clone();
        let mut w = create(path)?;
        write_predictions(
            &mut w,
            store,
            reports.iter().flat_map(|rep| rep.predictions.iter()),
            |p| test.contains(&Fact::new(p.relation, p.tuple)),
        )?;
        w.flush()?;
    }
    Ok(EXIT_OK)
}

fn cmd_gradcheck(args: &GradcheckArgs, out: &mut dyn Write) -> Result<i32> {
    let kinds: Vec<ModelKind> = if args.model.eq_ignore_ascii_case("all") {
        ModelKind::all().to_vec()
    } else {
        vec![args.model.parse()?]
    };
    let mut failed = false;
    for kind in kinds {
        let cfg = GradCheckConfig {
            kind,
            latent_dim: args.kf,
            entity_dim: args.ke,
            instances: args.instances,
            seed: args.seed,
            ..GradCheckConfig::default()
        };
        let report = check_gradients(&cfg)?;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict}\tmodel={kind}\tinstances={}\tcoordinates={}\tmax_rel_error={:e}\tmismatches={}",
            report.instances,
            report.coordinates,
            report.max_rel_error,
            report.mismatches.len()
        )?;
        for m in report.mismatches.iter().take(5) {
            writeln!(
                out,
                "  instance {} block {} index {}: analytic {:e} numeric {:e}",
                m.instance, m.block, m.index, m.analytic, m.numeric
            )?;
        }
        failed |= !report.passed();
    }
    Ok(if failed { EXIT_VERIFY } else { EXIT_OK })
}

fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<i32> {
    let mut spec = SynthSpec::default();
    set(&mut spec.num_relations, args.relations);
    set(&mut spec.num_tuples, args.tuples);
    set(&mut spec.num_entities, args.entities);
    set(&mut spec.rank, args.rank);
    set(&mut spec.threshold, args.threshold);
    set(&mut spec.holdout, args.holdout);
    set(&mut spec.structured_relations, args.structured);
    set(&mut spec.seed, args.seed);
    spec.rules = args.rule.clone();
    spec.validate()?;
    let mut rng = spec.rng();
    let corpus = if spec.rules.is_empty() {
        generate_lowrank_corpus(&spec, &mut rng)?
    } else {
        generate_implicature_corpus(&spec, &mut rng)?
    };
    let manifest = corpus.write_to(&args.out_dir)?;
    writeln!(
        out,
        "wrote {}: {} training facts, {} test facts",
        args.out_dir.display(),
        manifest.train_facts,
        manifest.test_facts
    )?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> TrainArgs {
        let mut v = vec!["unischema", "train"];
        v.extend(s.split_whitespace());
        match Cli::try_parse_from(v).unwrap().command {
            Command::Train(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_override_config_file_over_defaults() {
        let file: TrainFile = toml::from_str(
            "model = \"nf\"\nkf = 8\nepochs = 3\nseed = 5\n[l2]\nall = 0.2\nweight = 0.5\n",
        )
        .unwrap();
        let (cfg, _) = resolve_train_config(&args("f.tsv --out m --kf 4 --l2-slot 0.7"), &file).unwrap();
        assert_eq!(cfg.kind, ModelKind::NF);
        assert_eq!(cfg.latent_dim, 4);
        assert_eq!(cfg.epochs, 3);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.entity_dim, TrainConfig::default().entity_dim);
        assert_eq!((cfg.l2.relation, cfg.l2.weight, cfg.l2.slot), (0.2, 0.5, 0.7));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<TrainFile>("epoch = 3\n").is_err());
    }

    #[test]
    fn rule_syntax() {
        let r = parse_rule("0, 1, 0.3").unwrap();
        assert_eq!((r.antecedent, r.consequent, r.coverage), (0, 1, 0.3));
        assert!(parse_rule("0,1").is_err());
        assert!(parse_rule("a,1,0.3").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run_with(["unischema", "frobnicate"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run_with(["unischema", "--help"], &mut o, &mut e), EXIT_OK);
        assert_eq!(
            run_with(["unischema", "gradcheck", "--model", "q"], &mut o, &mut e),
            EXIT_USAGE
        );
    }
}
