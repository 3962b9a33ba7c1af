//! `sub2`: augment, check and summarize corpora by same-label substructure
//! substitution.

mod files;
mod settings;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use sub2_core::augment::{augment, Method};
use sub2_core::corpus::{AnyDataset, Dataset, Example, Provenance, Task};
use sub2_core::substructure::{ConstScheme, DepScheme, PosScheme, TextScheme};
use sub2_core::validate::{stats, validate_dataset, StatsReport, Violation, DEFAULT_TOP_KEYS};
use sub2_core::Error;

use crate::settings::{Counts, Input, Manifest, Run, Settings};

#[derive(Parser)]
#[command(name = "sub2", version, about = "Same-label substructure substitution for NLP corpora")]
struct Cli {
    /// Only log warnings and errors
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an augmented copy of a corpus and a manifest describing the run
    Augment(AugmentArgs),
    /// Report structural violations in a corpus
    Check(CommonArgs),
    /// Summarize a corpus and its substructure inventory
    Stats(StatsArgs),
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    settings: Settings,

    /// TOML file with the same keys as the flags; flags win
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AugmentArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Repeat the run recorded in a manifest; other flags override it
    #[arg(long, value_name = "PATH")]
    from_manifest: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Print the report as JSON
    #[arg(long)]
    json: bool,

    /// Number of largest label keys to list
    #[arg(long, default_value_t = DEFAULT_TOP_KEYS)]
    top: usize,
}

/// Exit status for a failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 1,
        Error::Parse { .. } | Error::Validation { .. } | Error::Io(_) => 2,
        Error::NoAugmentation(_) | Error::ResampleExhausted { .. } => 3,
        Error::Internal(_) => 4,
    }
}

fn describe(e: &Error, input: Option<&Path>) -> String {
    match (e, input) {
        (Error::Parse { line, message }, Some(p)) => format!("{}:{}: {}", p.display(), line, message),
        (Error::Validation { .. }, Some(p)) => format!("{}: {}", p.display(), e),
        _ => e.to_string(),
    }
}

/// Settings from flags, then the config file, then an optional lower layer.
fn layered(common: CommonArgs, lower: Settings) -> Result<Settings, Error> {
    let file = match &common.config {
        Some(path) => Settings::from_toml(path)?,
        None => Settings::default(),
    };
    Ok(common.settings.over(file).over(lower))
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn counts<E: Example>(d: &Dataset<E>) -> Counts {
    let mut c = Counts {
        total: d.len(),
        ..Default::default()
    };
    for p in d.provenance() {
        match p {
            Provenance::Original => c.original += 1,
            Provenance::Generated(_) => c.generated += 1,
            Provenance::Replicated { .. } => c.replicated += 1,
        }
    }
    c
}

fn any_counts(d: &AnyDataset) -> Counts {
    match d {
        AnyDataset::Pos(d) => counts(d),
        AnyDataset::Dep(d) => counts(d),
        AnyDataset::Const(d) => counts(d),
        AnyDataset::Text(d) => counts(d),
    }
}

fn warn_skipped(path: &Path, skipped: &[sub2_core::corpus::Skipped]) {
    for s in skipped {
        log::warn!("{}:{}: skipped sentence {}: {}", path.display(), s.line, s.sentence, s.reason);
    }
}

fn cmd_augment(args: AugmentArgs) -> Result<(), (Error, Option<PathBuf>)> {
    let plain = |e: Error| (e, None);
    let recorded = match &args.from_manifest {
        Some(path) => Some(Manifest::load(path).map_err(plain)?),
        None => None,
    };
    let lower = recorded.as_ref().map(|m| m.config.clone()).unwrap_or_default();
    let settings = layered(args.common, lower).map_err(plain)?;
    let run = Run::resolve(&settings).map_err(plain)?;
    let in_path = run.input.path.clone();
    let at_input = |e: Error| (e, Some(in_path.clone()));

    let bytes = files::read_bytes(&in_path).map_err(at_input)?;
    let digest = sha256(&bytes);
    if let Some(m) = &recorded {
        if m.input_sha256 != digest {
            return Err(at_input(Error::Validation {
                what: "input".into(),
                message: format!("sha256 {} does not match the manifest's {}", digest, m.input_sha256),
            }));
        }
    }
    let (dataset, skipped) =
        files::read(&bytes, run.input.task, run.input.format, run.input.tag_column).map_err(at_input)?;
    warn_skipped(&in_path, &skipped);
    log::info!("read {} {} examples from {}", dataset.len(), run.input.task, in_path.display());

    let out: AnyDataset = match &dataset {
        AnyDataset::Pos(d) => augment(d, &run.config).map(Into::into),
        AnyDataset::Dep(d) => augment(d, &run.config).map(Into::into),
        AnyDataset::Const(d) => augment(d, &run.config).map(Into::into),
        AnyDataset::Text(d) => augment(d, &run.config).map(Into::into),
    }
    .map_err(plain)?;

    let rendered = files::render(&out, run.input.format, run.input.tag_column).map_err(plain)?;
    files::write_bytes(&run.output, &rendered).map_err(plain)?;
    let examples = any_counts(&out);
    log::info!(
        "wrote {} examples ({} original, {} generated, {} replicated) to {}",
        examples.total,
        examples.original,
        examples.generated,
        examples.replicated,
        run.output.display()
    );

    if let Some(path) = &run.manifest {
        let manifest = Manifest {
            tool: "sub2".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: run.resolved.clone(),
            input_sha256: digest,
            output_sha256: sha256(&rendered),
            examples,
        };
        let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| plain(Error::Internal(e.to_string())))?;
        json.push('\n');
        files::write_bytes(path, json.as_bytes()).map_err(plain)?;
    }
    Ok(())
}

fn report<E: Example>(dataset: &Dataset<E>) -> Vec<Violation> {
    validate_dataset(dataset)
}

fn cmd_check(args: CommonArgs) -> Result<bool, (Error, Option<PathBuf>)> {
    let plain = |e: Error| (e, None);
    let settings = layered(args, Settings::default()).map_err(plain)?;
    let input = Input::resolve(&settings).map_err(plain)?;
    let at_input = |e: Error| (e, Some(input.path.clone()));
    let bytes = files::read_bytes(&input.path).map_err(at_input)?;
    let read = files::read_lenient(&bytes, input.task, input.format, input.tag_column).map_err(at_input)?;
    warn_skipped(&input.path, &read.skipped);
    let violations = match &read.dataset {
        AnyDataset::Pos(d) => report(d),
        AnyDataset::Dep(d) => report(d),
        AnyDataset::Const(d) => report(d),
        AnyDataset::Text(d) => report(d),
    };
    for v in &violations {
        let i = v.example_index;
        let name = match &read.names[i] {
            Some(id) => format!("sentence {} ({})", i + 1, id),
            None => format!("example {}", i + 1),
        };
        println!("{}:{}: {}: [{}] {}", input.path.display(), read.lines[i], name, v.rule, v.message);
    }
    println!("{} examples, {} violations", read.dataset.len(), violations.len());
    Ok(violations.is_empty())
}

fn cmd_stats(args: StatsArgs) -> Result<(), (Error, Option<PathBuf>)> {
    let plain = |e: Error| (e, None);
    let settings = layered(args.common, Settings::default()).map_err(plain)?;
    let input = Input::resolve(&settings).map_err(plain)?;
    let at_input = |e: Error| (e, Some(input.path.clone()));
    let bytes = files::read_bytes(&input.path).map_err(at_input)?;
    let (dataset, skipped) = files::read(&bytes, input.task, input.format, input.tag_column).map_err(at_input)?;
    warn_skipped(&input.path, &skipped);

    let cap = settings.max_span_len;
    let use_aux = settings.use_aux.unwrap_or(false);
    let result: Result<StatsReport, Error> = match &dataset {
        AnyDataset::Pos(d) => stats(d, &PosScheme::new(cap), args.top),
        AnyDataset::Dep(d) => stats(d, &DepScheme, args.top),
        AnyDataset::Const(d) => stats(d, &ConstScheme::new(use_aux), args.top),
        AnyDataset::Text(d) => {
            let constraints = Input::constraints(&settings, Task::Text).map_err(plain)?.with_max_span_len(cap);
            let balanced = matches!(settings.method.as_deref().map(str::parse), Some(Ok(Method::BalancedSub2)));
            let scheme = if balanced {
                TextScheme::balanced(constraints)
            } else {
                TextScheme::new(constraints)
            }
            .map_err(plain)?;
            stats(d, &scheme, args.top)
        }
    };
    let report = result.map_err(at_input)?;
    if args.json {
        let json = serde_json::to_string_pretty(&report).map_err(|e| plain(Error::Internal(e.to_string())))?;
        println!("{}", json);
    } else {
        print!("{}", report);
    }
    Ok(())
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
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "warn" } else { "info" }))
        .format_timestamp(None)
        .format_target(false)
        .init();

    let outcome = match cli.command {
        Command::Augment(a) => cmd_augment(a).map(|()| true),
        Command::Check(a) => cmd_check(a),
        Command::Stats(a) => cmd_stats(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err((e, input)) => {
            eprintln!("error: {}", describe(&e, input.as_deref()));
            ExitCode::from(exit_code(&e))
        }
    }
}
