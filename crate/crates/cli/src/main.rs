use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agendas_core::agendas::{combine, Rule, DEFAULT_FOCAL_CAP};
use agendas_core::canonical::to_canonical_string;
use agendas_core::fca::LatticeExport;
use agendas_core::metalearn::{self, AgendaBank, Aggregator, BankJson, Hyper, TrainedModel, TrainingSet};
use agendas_core::orders::{decide, Relation};
use agendas_core::stability::{argmax_lattice, beta_lattice, stability_report};
use agendas_core::weight::Weight;
use agendas_core::{build_lattice, fsn, interval_scale, BigRational, ConceptLattice, FormalContext, Level, ManyValuedContext, MassFunction, ScalingSpec};
use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const FORMATS: &str = "\
File formats:
  journal CSV      id,tid,account,value           (value: signed decimal, nonzero)
  context CSV      object,<feature1>,...          (values in [-1, 1]; empty cell = 0)
  mass JSON        {\"universe\": [\"x1\", ...], \"level\": \"base\"|\"scaled\",
                    \"focal\": [{\"set\": [\"x1\"], \"mass\": 0.6}, ...]}
  agenda bank JSON {\"level\": \"base\"|\"scaled\", \"agendas\": [[\"x1\", \"x2\"], [\"x3\"]]}
  labels CSV       object,label                   (label 1 = outlier, 0 = inlier)
  lattice JSON     {\"objects\": [...], \"attributes\": [...],
                    \"concepts\": [{\"extent\": [...], \"intent\": [...]}], \"covers\": [[i, j], ...]}

Scaled attributes are named <feature>#<k>, 1 <= k <= s. Base-level masses and
agendas are expanded to every interval of their features.

Exit codes: 0 success, 1 usage error or unreadable input, 2 data or guard
error, 3 order does not hold.";

#[derive(Parser)]
#[command(name = "agendas", version, about = "Concept lattices under interrogative agendas", after_long_help = FORMATS)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a journal into a many-valued context of account shares.
    Ingest {
        #[arg(long)]
        journal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interval-scale a many-valued context into a 0/1 cross table CSV.
    Scale {
        #[arg(long)]
        context: PathBuf,
        #[arg(long = "scale-s")]
        scale_s: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Concept lattice of the scaled context.
    Lattice {
        #[arg(long)]
        context: PathBuf,
        #[arg(long = "scale-s")]
        scale_s: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write a Graphviz Hasse diagram.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Combine mass functions over a shared universe.
    Combine {
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long, num_args = 1.., required = true)]
        masses: Vec<PathBuf>,
        /// Maximum number of focal sets of the result.
        #[arg(long, default_value_t = DEFAULT_FOCAL_CAP)]
        cap: usize,
        /// Use floating point instead of exact rational arithmetic.
        #[arg(long)]
        float: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Feature importances of a mass function.
    Transform {
        #[arg(long)]
        mass: PathBuf,
        #[arg(long, value_enum)]
        kind: TransformKind,
        #[arg(long)]
        float: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Single lattice representing a mass-function agenda.
    Stability {
        #[arg(long)]
        context: PathBuf,
        #[arg(long = "scale-s")]
        scale_s: usize,
        #[arg(long)]
        mass: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = Mode::Stability)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the stability of every extent, by descending stability.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide whether m1 is below m2 in an ordering of mass functions.
    Order {
        #[arg(long, value_parser = parse_relation)]
        relation: Relation,
        #[arg(long)]
        m1: PathBuf,
        #[arg(long)]
        m2: PathBuf,
        #[arg(long)]
        float: bool,
        /// Write the verdict here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn agenda weights from labelled objects.
    Train {
        #[arg(long)]
        context: PathBuf,
        #[arg(long = "scale-s")]
        scale_s: usize,
        #[arg(long)]
        agendas: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 4.0)]
        gamma: f64,
        #[arg(long = "pos-weight", default_value_t = 10.0)]
        pos_weight: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score objects with a trained model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        context: PathBuf,
        /// Defaults to the interval count stored in the model.
        #[arg(long = "scale-s")]
        scale_s: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, value_parser = parse_aggregator, default_value = "logistic")]
        aggregator: Aggregator,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learned agenda of a model, and per-agenda contributions for one object.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, requires = "object")]
        context: Option<PathBuf>,
        #[arg(long, requires = "context")]
        object: Option<String>,
        #[arg(long = "scale-s")]
        scale_s: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Pignistic,
    Plausibility,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Stability,
    Argmax,
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse().map_err(|e: agendas_core::Error| e.to_string())
}

fn parse_relation(s: &str) -> Result<Relation, String> {
    s.parse().map_err(|e: agendas_core::Error| e.to_string())
}

fn parse_aggregator(s: &str) -> Result<Aggregator, String> {
    s.parse().map_err(|e: agendas_core::Error| e.to_string())
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<agendas_core::Error> for Failure {
    fn from(e: agendas_core::Error) -> Self {
        Failure { code: 2, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn open(path: &Path) -> Outcome<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Failure {
        code: 1,
        error: anyhow!("cannot read {}: {e}", path.display()),
    })
}

fn write_atomic(path: &Path, contents: &str) -> Outcome<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write to {}", dir.display()))?;
    tmp.write_all(contents.as_bytes()).context("write failed")?;
    tmp.persist(path).map_err(|e| anyhow!("cannot create {}: {}", path.display(), e.error))?;
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Outcome<()> {
    write_atomic(path, &to_canonical_string(value)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    let reader = open(path)?;
    serde_json::from_reader(reader)
        .with_context(|| format!("malformed JSON in {}", path.display()))
        .map_err(Failure::from)
}

fn read_context(path: &Path) -> Outcome<ManyValuedContext> {
    Ok(ManyValuedContext::read_csv(open(path)?)?)
}

fn scaled_context(path: &Path, s: usize) -> Outcome<(ManyValuedContext, FormalContext, ScalingSpec)> {
    let mv = read_context(path)?;
    let spec = ScalingSpec::new(s)?;
    let ctx = interval_scale(&mv, spec);
    Ok((mv, ctx, spec))
}

/// Loads a mass and aligns it with the scaled context attributes.
fn mass_for_context(path: &Path, mv: &ManyValuedContext, ctx: &FormalContext, spec: ScalingSpec) -> Outcome<MassFunction<f64>> {
    let json: agendas_core::mass::MassJson = read_json(path)?;
    let m = MassFunction::<f64>::from_json(&json)?;
    Ok(match json.level {
        Level::Scaled => m.relabel(ctx.attributes())?,
        Level::Base => m.relabel(mv.features())?.expand_to_scaled(spec),
    })
}

fn load_mass<W: Weight>(path: &Path) -> Outcome<(MassFunction<W>, Level)> {
    let json: agendas_core::mass::MassJson = read_json(path)?;
    Ok((MassFunction::from_json(&json)?, json.level))
}

fn lattice_json(lattice: &ConceptLattice) -> LatticeExport {
    lattice.to_export()
}

fn combine_with<W: Weight>(rule: Rule, paths: &[PathBuf], cap: usize, out: &Path) -> Outcome<()> {
    let mut masses = Vec::with_capacity(paths.len());
    let mut level = Level::Base;
    for p in paths {
        let (m, l) = load_mass::<W>(p)?;
        level = l;
        masses.push(m);
    }
    let first = masses[0].universe().to_vec();
    let masses = masses.iter().map(|m| m.relabel(&first)).collect::<agendas_core::Result<Vec<_>>>()?;
    let result = combine(rule, &masses, cap)?;
    write_json(out, &result.to_json(level))
}

fn transform_with<W: Weight>(path: &Path, kind: TransformKind, out: &Path) -> Outcome<()> {
    let (m, _) = load_mass::<W>(path)?;
    let v = match kind {
        TransformKind::Pignistic => m.pignistic()?,
        TransformKind::Plausibility => m.plausibility_transform()?,
    };
    let values: serde_json::Map<String, Value> = v.features.iter().zip(&v.values).map(|(f, w)| (f.clone(), json!(w.to_f64()))).collect();
    write_json(out, &json!({ "features": v.features, "importance": values }))
}

fn order_with<W: Weight>(relation: Relation, m1: &Path, m2: &Path, out: Option<&Path>) -> Outcome<bool> {
    let (a, _) = load_mass::<W>(m1)?;
    let (b, _) = load_mass::<W>(m2)?;
    let b = b.relabel(a.universe())?;
    let verdict = decide(relation, &a, &b)?;
    let text = to_canonical_string(&verdict.to_json(a.universe()))?;
    match out {
        Some(p) => write_atomic(p, &text)?,
        None => print!("{text}"),
    }
    Ok(verdict.holds)
}

fn model_context(model: &TrainedModel, context: &Path, scale_s: Option<usize>) -> Outcome<FormalContext> {
    let s = scale_s.or(model.scale_s).ok_or_else(|| Failure {
        code: 1,
        error: anyhow!("--scale-s is required: the model does not record its interval count"),
    })?;
    Ok(scaled_context(context, s)?.1)
}

fn run(cli: Cli) -> Outcome<u8> {
    match cli.command {
        Command::Ingest { journal, out } => {
            let entries = fsn::read_journal(open(&journal)?)?;
            let mv = fsn::ingest(&entries)?;
            let mut buf = Vec::new();
            mv.write_csv(&mut buf)?;
            write_atomic(&out, &String::from_utf8(buf).context("context CSV is not UTF-8")?)?;
        }
        Command::Scale { context, scale_s, out } => {
            let (_, ctx, _) = scaled_context(&context, scale_s)?;
            let mut text = std::iter::once("object").chain(ctx.attributes().iter().map(String::as_str)).collect::<Vec<_>>().join(",");
            text.push('\n');
            for (g, name) in ctx.objects().iter().enumerate() {
                text.push_str(name);
                for m in 0..ctx.attribute_count() {
                    text.push_str(if ctx.has(g, m) { ",1" } else { ",0" });
                }
                text.push('\n');
            }
            write_atomic(&out, &text)?;
        }
        Command::Lattice { context, scale_s, out, dot } => {
            let (_, ctx, _) = scaled_context(&context, scale_s)?;
            let lattice = build_lattice(&ctx);
            write_json(&out, &lattice_json(&lattice))?;
            if let Some(dot) = dot {
                write_atomic(&dot, &lattice.to_dot())?;
            }
        }
        Command::Combine { rule, masses, cap, float, out } => {
            if float {
                combine_with::<f64>(rule, &masses, cap, &out)?;
            } else {
                combine_with::<BigRational>(rule, &masses, cap, &out)?;
            }
        }
        Command::Transform { mass, kind, float, out } => {
            if float {
                transform_with::<f64>(&mass, kind, &out)?;
            } else {
                transform_with::<BigRational>(&mass, kind, &out)?;
            }
        }
        Command::Stability {
            context,
            scale_s,
            mass,
            beta,
            mode,
            out,
            dot,
            report,
        } => {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Failure {
                    code: 1,
                    error: anyhow!("--beta must lie in [0, 1]"),
                });
            }
            let (mv, ctx, spec) = scaled_context(&context, scale_s)?;
            let m = mass_for_context(&mass, &mv, &ctx, spec)?;
            let lattice = match mode {
                Mode::Stability => beta_lattice(&ctx, &m, &beta)?.lattice,
                Mode::Argmax => argmax_lattice(&ctx, &m)?,
            };
            write_json(&out, &lattice_json(&lattice))?;
            if let Some(dot) = dot {
                write_atomic(&dot, &lattice.to_dot())?;
            }
            if let Some(path) = report {
                let entries: Vec<Value> = stability_report(&ctx, &m)?
                    .entries
                    .iter()
                    .map(|(g, rho)| json!({"extent": ctx.object_names(g), "rho": rho}))
                    .collect();
                write_json(&path, &json!({ "entries": entries }))?;
            }
        }
        Command::Order { relation, m1, m2, float, out } => {
            let holds = if float {
                order_with::<f64>(relation, &m1, &m2, out.as_deref())?
            } else {
                order_with::<BigRational>(relation, &m1, &m2, out.as_deref())?
            };
            return Ok(if holds { 0 } else { 3 });
        }
        Command::Train {
            context,
            scale_s,
            agendas,
            labels,
            epochs,
            lr,
            gamma,
            pos_weight,
            seed,
            out,
        } => {
            let (_, ctx, _) = scaled_context(&context, scale_s)?;
            let bank_json: BankJson = read_json(&agendas)?;
            let bank = AgendaBank::from_json(&bank_json, &ctx)?;
            let labels = metalearn::read_labels(open(&labels)?)?;
            let set = TrainingSet::new(&ctx, &labels)?;
            let hyper = Hyper {
                gamma,
                lr,
                epochs,
                seed,
                pos_weight,
            };
            let mut model = metalearn::train(&ctx, &bank, &set, &hyper)?;
            model.scale_s = Some(scale_s);
            log::info!("loss {} -> {}", model.loss_trace[0], model.final_loss);
            write_json(&out, &model)?;
        }
        Command::Score {
            model,
            context,
            scale_s,
            threshold,
            aggregator,
            out,
        } => {
            let model: TrainedModel = read_json(&model)?;
            let ctx = model_context(&model, &context, scale_s)?;
            let report = metalearn::predict(&model, &ctx, None, aggregator, threshold)?;
            write_json(&out, &report)?;
        }
        Command::Explain {
            model,
            context,
            object,
            scale_s,
            out,
        } => {
            let model: TrainedModel = read_json(&model)?;
            let mut value = json!({
                "agendas": model.agendas,
                "weights": model.weights,
                "bias": model.bias,
                "learned_agenda": model.mass,
            });
            if let (Some(context), Some(object)) = (context, object) {
                let ctx = model_context(&model, &context, scale_s)?;
                let report = metalearn::predict(&model, &ctx, Some(&[object.as_str()]), Aggregator::Logistic, 0.5)?;
                value["object"] = serde_json::to_value(&report.predictions[0]).context("serialize prediction")?;
            }
            let text = to_canonical_string(&value)?;
            match out {
                Some(p) => write_atomic(&p, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
